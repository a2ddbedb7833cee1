import init, {
  interpolate_preview,
  bundled_scores,
  ks_explore,
  ks_search,
  timeline_preview,
} from "./pkg/marathon_wasm_demo.js";

const $ = (id) => document.getElementById(id);

function show(el, text, isError = false) {
  el.textContent = text;
  el.classList.toggle("error", isError);
}

// ---- keyframe interpolation ----

const interp = {
  canvas: null,
  keyframes: new Map(),
  drag: null,
};

function frame() {
  return Number($("frame").value);
}

function sortedKeyframes() {
  return [...interp.keyframes.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([frame_index, box]) => ({ frame_index, box }));
}

function drawBox(ctx, b, style, dash = []) {
  ctx.save();
  ctx.strokeStyle = style;
  ctx.lineWidth = 2;
  ctx.setLineDash(dash);
  ctx.strokeRect(b[0], b[1], b[2] - b[0], b[3] - b[1]);
  ctx.restore();
}

function drawInterp() {
  const ctx = interp.canvas.getContext("2d");
  ctx.clearRect(0, 0, interp.canvas.width, interp.canvas.height);
  $("frame-label").textContent = frame();
  const kfs = sortedKeyframes();
  for (const k of kfs) drawBox(ctx, k.box, "#bbb", [4, 4]);

  if (kfs.length === 0) {
    show($("interp-status"), "No keyframes yet.");
  } else {
    try {
      const dense = JSON.parse(interpolate_preview(JSON.stringify(kfs)));
      ctx.strokeStyle = "#7aa6d6";
      ctx.beginPath();
      dense.forEach((d, i) => {
        const cx = (d.box[0] + d.box[2]) / 2;
        const cy = (d.box[1] + d.box[3]) / 2;
        if (i === 0) ctx.moveTo(cx, cy);
        else ctx.lineTo(cx, cy);
      });
      ctx.stroke();
      const here = dense.find((d) => d.frame_index === frame());
      let text = `${kfs.length} keyframe(s), frames ${dense[0].frame_index}-${dense[dense.length - 1].frame_index}\n`;
      if (here) {
        drawBox(ctx, here.box, here.keyframe ? "#c0392b" : "#1f6feb");
        text += `frame ${frame()}: [${here.box.map((c) => c.toFixed(2)).join(", ")}]${here.keyframe ? " (keyframe)" : ""}`;
      } else {
        text += `frame ${frame()} is outside the annotated span`;
      }
      show($("interp-status"), text);
    } catch (e) {
      show($("interp-status"), String(e), true);
    }
  }
  if (interp.drag) drawBox(ctx, normalise(interp.drag), "#2e7d32", [2, 2]);
}

function normalise(d) {
  return [
    Math.min(d.x0, d.x1),
    Math.min(d.y0, d.y1),
    Math.max(d.x0, d.x1),
    Math.max(d.y0, d.y1),
  ];
}

function canvasPoint(ev) {
  const r = interp.canvas.getBoundingClientRect();
  return {
    x: Math.max(0, ((ev.clientX - r.left) * interp.canvas.width) / r.width),
    y: Math.max(0, ((ev.clientY - r.top) * interp.canvas.height) / r.height),
  };
}

function setupInterp() {
  interp.canvas = $("interp-canvas");
  interp.keyframes.set(0, [60, 120, 120, 260]);
  interp.keyframes.set(60, [460, 100, 530, 250]);
  interp.canvas.addEventListener("mousedown", (ev) => {
    const p = canvasPoint(ev);
    interp.drag = { x0: p.x, y0: p.y, x1: p.x, y1: p.y };
  });
  interp.canvas.addEventListener("mousemove", (ev) => {
    if (!interp.drag) return;
    const p = canvasPoint(ev);
    interp.drag.x1 = p.x;
    interp.drag.y1 = p.y;
    drawInterp();
  });
  window.addEventListener("mouseup", () => {
    if (!interp.drag) return;
    const b = normalise(interp.drag).map((c) => Math.round(c));
    interp.drag = null;
    if (b[2] > b[0] && b[3] > b[1]) interp.keyframes.set(frame(), b);
    drawInterp();
  });
  $("frame").addEventListener("input", drawInterp);
  $("clear-kf").addEventListener("click", () => {
    interp.keyframes.clear();
    drawInterp();
  });
  $("delete-kf").addEventListener("click", () => {
    interp.keyframes.delete(frame());
    drawInterp();
  });
  drawInterp();
}

// ---- location sampling ----

const ks = { all: [], distinct: [] };

function selectedSubset() {
  return ks.distinct.filter((v) => $(`score-${v}`).checked);
}

function setSubset(values) {
  for (const v of ks.distinct) $(`score-${v}`).checked = values.includes(v);
}

function drawKs(view) {
  const c = $("ks-canvas");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const lo = ks.distinct[0] - 1;
  const hi = ks.distinct[ks.distinct.length - 1] + 1;
  const pad = 36;
  const X = (x) => pad + ((x - lo) / (hi - lo)) * (c.width - 2 * pad);
  const Y = (y) => c.height - pad - y * (c.height - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.beginPath();
  ctx.moveTo(X(lo), Y(0));
  ctx.lineTo(X(hi), Y(0));
  ctx.moveTo(X(lo), Y(0));
  ctx.lineTo(X(lo), Y(1));
  ctx.stroke();
  for (let v = lo + 1; v < hi; v += 2) ctx.fillText(String(v), X(v) - 6, Y(0) + 14);
  ctx.fillText("1.0", 4, Y(1) + 4);

  const step = (curve, style) => {
    ctx.strokeStyle = style;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(X(lo), Y(0));
    let prev = 0;
    for (const [x, y] of curve) {
      ctx.lineTo(X(x), Y(prev));
      ctx.lineTo(X(x), Y(y));
      prev = y;
    }
    ctx.lineTo(X(hi), Y(prev));
    ctx.stroke();
    ctx.lineWidth = 1;
  };
  step(view.all, "#1f6feb");
  step(view.subset, "#c0392b");

  const at = (curve, x) => curve.filter((p) => p[0] <= x).reduce((_, p) => p[1], 0);
  const w = view.widest_at;
  ctx.strokeStyle = "#2e7d32";
  ctx.setLineDash([3, 3]);
  ctx.beginPath();
  ctx.moveTo(X(w), Y(at(view.all, w)));
  ctx.lineTo(X(w), Y(at(view.subset, w)));
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = "#1f6feb";
  ctx.fillText("all locations", c.width - 150, 20);
  ctx.fillStyle = "#c0392b";
  ctx.fillText("subset", c.width - 150, 34);
}

function refreshKs(extra = "") {
  const subset = selectedSubset();
  const cAlpha = Number($("c-alpha").value);
  if (subset.length === 0) {
    show($("ks-status"), "Select at least one score value.");
    return;
  }
  try {
    const view = JSON.parse(ks_explore(JSON.stringify(ks.all), JSON.stringify(subset), cAlpha));
    drawKs(view);
    show(
      $("ks-status"),
      `${extra}subset {${subset.join(", ")}}\n` +
        `D = ${view.statistic.toFixed(4)}, D_alpha = ${view.critical_value.toFixed(4)}: ` +
        `${view.accepted ? "accepted" : "rejected"} (widest gap at score ${view.widest_at})`,
    );
  } catch (e) {
    show($("ks-status"), String(e), true);
  }
}

function setupKs() {
  ks.all = JSON.parse(bundled_scores());
  ks.distinct = [...new Set(ks.all)].sort((a, b) => a - b);
  const box = $("scores");
  for (const v of ks.distinct) {
    const label = document.createElement("label");
    label.innerHTML = `<input type="checkbox" id="score-${v}"> ${v}`;
    box.appendChild(label);
  }
  setSubset([11, 15, 16, 17, 19, 23]);
  box.addEventListener("change", () => refreshKs());
  $("c-alpha").addEventListener("input", () => refreshKs());
  $("search").addEventListener("click", () => {
    try {
      const found = JSON.parse(
        ks_search(
          JSON.stringify(ks.all),
          Number($("k").value),
          Number($("c-alpha").value),
          Number($("seed").value),
          Number($("iterations").value),
          $("exhaustive").checked,
        ),
      );
      setSubset(found.subset);
      refreshKs(`search evaluated ${found.evaluated} subsets\n`);
    } catch (e) {
      show($("ks-status"), String(e), true);
    }
  });
  refreshKs();
}

// ---- runner timeline ----

const SPLITS = [
  ["5k", 5], ["10k", 10], ["15k", 15], ["20k", 20], ["half", 21.1],
  ["25k", 25], ["30k", 30], ["35k", 35], ["40k", 40], ["finish", 42],
];
const DEFAULTS = {
  "5k": "0:25:00", "10k": "0:50:30", "15k": "1:16:10", "20k": "", "half": "1:47:50",
  "25k": "2:08:00", "30k": "2:35:20", "35k": "3:03:40", "40k": "3:32:00", "finish": "3:44:10",
};

function parseTime(text) {
  const t = text.trim();
  if (t === "") return null;
  if (!t.includes(":")) return Number(t);
  const parts = t.split(":").map(Number);
  return parts.reduce((acc, p) => acc * 60 + p, 0);
}

function fmt(s) {
  const r = Math.round(s);
  const h = Math.floor(r / 3600);
  const m = Math.floor((r % 3600) / 60);
  const sec = r % 60;
  return `${h}:${String(m).padStart(2, "0")}:${String(sec).padStart(2, "0")}`;
}

function refreshTimeline() {
  const splits = [];
  for (const [name, km] of SPLITS) {
    const t = parseTime($(`split-${name}`).value);
    if (t === null) continue;
    if (!Number.isInteger(t) || t < 0) {
      show($("tl-status"), `${name}: "${$(`split-${name}`).value}" is not a time`, true);
      return;
    }
    splits.push({ km, seconds: t });
  }
  let points;
  try {
    points = JSON.parse(timeline_preview(JSON.stringify(splits)));
  } catch (e) {
    show($("tl-status"), String(e), true);
    return;
  }

  const c = $("tl-canvas");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const pad = 40;
  const maxT = Math.max(...splits.map((s) => s.seconds), 1);
  const X = (km) => pad + (km / 42.195) * (c.width - 2 * pad);
  const Y = (t) => c.height - pad - (t / maxT) * (c.height - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(X(0), Y(0));
  ctx.lineTo(X(42.195), Y(0));
  ctx.moveTo(X(0), Y(0));
  ctx.lineTo(X(0), Y(maxT));
  ctx.stroke();
  ctx.fillStyle = "#444";
  for (let km = 0; km <= 40; km += 10) ctx.fillText(`${km} km`, X(km) - 10, Y(0) + 14);
  ctx.fillText(fmt(maxT), 2, Y(maxT) - 4);

  ctx.strokeStyle = "#1f6feb";
  ctx.beginPath();
  ctx.moveTo(X(0), Y(0));
  for (const s of splits) ctx.lineTo(X(s.km), Y(s.seconds));
  ctx.stroke();
  ctx.fillStyle = "#1f6feb";
  for (const s of splits) ctx.fillRect(X(s.km) - 3, Y(s.seconds) - 3, 6, 6);

  const loc = Number($("loc").value);
  ctx.fillStyle = "#c0392b";
  for (const p of points) {
    ctx.beginPath();
    ctx.arc(X(p.km), Y(p.seconds), p.location_number === loc ? 5 : 2, 0, 2 * Math.PI);
    ctx.fill();
  }
  const hit = points.find((p) => p.location_number === loc);
  show(
    $("tl-status"),
    hit
      ? `location ${loc} (${hit.km} km): passing at ${fmt(hit.seconds)} (${hit.seconds.toFixed(1)} s)`
      : `location ${loc} is beyond the last split`,
  );
}

function setupTimeline() {
  const row = $("splits");
  for (const [name] of SPLITS) {
    const label = document.createElement("label");
    label.innerHTML = `${name} <input id="split-${name}" size="7" value="${DEFAULTS[name]}">`;
    row.appendChild(label);
  }
  row.addEventListener("input", refreshTimeline);
  $("loc").addEventListener("input", refreshTimeline);
  refreshTimeline();
}

await init();
setupInterp();
setupKs();
setupTimeline();
