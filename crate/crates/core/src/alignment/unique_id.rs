use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AlignmentError;
use crate::model::Identity;
use crate::LOCATION_COUNT;

/// Issues `L<i>R<j>` identities, numbering runners from 1 per location.
///
/// Not synchronised; callers sharing one counter must serialise calls.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueIdCounter {
    /// Last runner number issued per location.
    issued: BTreeMap<u8, u32>,
}

impl UniqueIdCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, location_number: u8) -> Result<Identity, AlignmentError> {
        if !(1..=LOCATION_COUNT).contains(&location_number) {
            return Err(AlignmentError::UnknownLocation(location_number));
        }
        let last = self.issued.entry(location_number).or_insert(0);
        *last += 1;
        Ok(Identity::Unique {
            location: location_number,
            runner: *last,
        })
    }

    /// Records an identity issued elsewhere so it is never handed out again.
    pub fn observe(&mut self, identity: Identity) {
        if let Identity::Unique { location, runner } = identity {
            let last = self.issued.entry(location).or_insert(0);
            *last = (*last).max(runner);
        }
    }

    pub fn last_issued(&self, location_number: u8) -> u32 {
        self.issued.get(&location_number).copied().unwrap_or(0)
    }
}
