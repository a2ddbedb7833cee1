/* tslint:disable */
/* eslint-disable */

/**
 * Totals of the bundled 35-location score table.
 */
export function bundled_scores(): string;

/**
 * `[{frame_index, box}]` keyframes to `[{frame_index, box, keyframe}]`.
 */
export function interpolate_preview(keyframes_json: string): string;

export function ks_explore(all_json: string, subset_json: string, c_alpha: number): string;

export function ks_search(all_json: string, k: number, c_alpha: number, seed: number, iterations: number, exhaustive: boolean): string;

/**
 * `[{km, seconds}]` splits to passing times at every whole kilometre.
 */
export function timeline_preview(splits_json: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bundled_scores: () => [number, number, number, number];
    readonly interpolate_preview: (a: number, b: number) => [number, number, number, number];
    readonly ks_explore: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly ks_search: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly timeline_preview: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
