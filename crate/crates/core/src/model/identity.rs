use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::LOCATION_COUNT;

/// Label attached to a runner annotation.
///
/// Runners with a readable bib are labelled by it. Everyone else gets a
/// per-location fallback rendered as `L<location>R<runner>`. Bibs render as
/// bare digits, so the two forms never collide textually.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Identity {
    Bib(u32),
    Unique { location: u8, runner: u32 },
}

impl Identity {
    pub fn bib(bib: u32) -> Result<Self, ModelError> {
        if bib == 0 {
            return Err(ModelError::InvalidIdentity("bib must be positive".into()));
        }
        Ok(Self::Bib(bib))
    }

    pub fn unique(location: u8, runner: u32) -> Result<Self, ModelError> {
        if !(1..=LOCATION_COUNT).contains(&location) {
            return Err(ModelError::InvalidIdentity(format!(
                "location {location} outside 1..={LOCATION_COUNT}"
            )));
        }
        if runner == 0 {
            return Err(ModelError::InvalidIdentity(
                "runner number must be positive".into(),
            ));
        }
        Ok(Self::Unique { location, runner })
    }

    pub fn as_bib(&self) -> Option<u32> {
        match self {
            Self::Bib(b) => Some(*b),
            Self::Unique { .. } => None,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bib(b) => write!(f, "{b}"),
            Self::Unique { location, runner } => write!(f, "L{location}R{runner}"),
        }
    }
}

fn parse_positive(digits: &str) -> Option<u64> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

impl FromStr for Identity {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidIdentity(format!("{s:?} is neither a bib nor L<i>R<j>"));
        if let Some(rest) = s.strip_prefix('L') {
            let (loc, runner) = rest.split_once('R').ok_or_else(bad)?;
            let loc = parse_positive(loc).ok_or_else(bad)?;
            let runner = parse_positive(runner).ok_or_else(bad)?;
            let loc = u8::try_from(loc).map_err(|_| bad())?;
            let runner = u32::try_from(runner).map_err(|_| bad())?;
            return Self::unique(loc, runner);
        }
        let bib = parse_positive(s).ok_or_else(bad)?;
        Self::bib(u32::try_from(bib).map_err(|_| bad())?)
    }
}

impl TryFrom<String> for Identity {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Identity> for String {
    fn from(id: Identity) -> Self {
        id.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_both_forms() {
        assert_eq!(Identity::bib(42).unwrap().to_string(), "42");
        assert_eq!(Identity::unique(3, 1).unwrap().to_string(), "L3R1");
    }

    #[test]
    fn parse_rejects_malformed() {
        for s in [
            "", "0", "L0R1", "L43R1", "L3R0", "L3", "R1", "L03R1", "x12", "12a", "-4",
        ] {
            assert!(s.parse::<Identity>().is_err(), "{s:?} should be rejected");
        }
    }

    proptest! {
        #[test]
        fn rendering_round_trips(loc in 1u8..=42, runner in 1u32..100_000, bib in 1u32..u32::MAX) {
            let u = Identity::unique(loc, runner).unwrap();
            prop_assert_eq!(u.to_string().parse::<Identity>().unwrap(), u);
            let b = Identity::bib(bib).unwrap();
            prop_assert_eq!(b.to_string().parse::<Identity>().unwrap(), b);
            prop_assert_ne!(u.to_string(), b.to_string());
        }

        #[test]
        fn rendering_is_injective(a in (1u8..=42, 1u32..500), b in (1u8..=42, 1u32..500)) {
            let ia = Identity::unique(a.0, a.1).unwrap();
            let ib = Identity::unique(b.0, b.1).unwrap();
            prop_assert_eq!(ia.to_string() == ib.to_string(), a == b);
        }
    }
}
