use super::{EisensteinSplit, Enumerator, TernaryForm};
use crate::arith::{isqrt, FactorTable};

/// Computes `r(n, Q)` for one form, through the closed-form Eisenstein count
/// when the form belongs to one of those families and by enumeration
/// otherwise.
#[derive(Debug, Clone)]
pub struct RepresentationCounter {
    enumerator: Enumerator,
    split: Option<(EisensteinSplit, FactorTable)>,
}

impl RepresentationCounter {
    /// Counter sized for arguments up to `n_max`.
    pub fn new(form: &TernaryForm, n_max: u64) -> Self {
        let split = EisensteinSplit::detect(form).map(|s| {
            let limit = (2 * isqrt(n_max as u128) as u64 + 2).max(n_max / s.scale()).min(1 << 26);
            (s, FactorTable::new(limit))
        });
        Self { enumerator: form.enumerator(), split }
    }

    /// Counter that always enumerates.
    pub fn enumerating(form: &TernaryForm) -> Self {
        Self { enumerator: form.enumerator(), split: None }
    }

    pub fn uses_closed_form(&self) -> bool {
        self.split.is_some()
    }

    pub fn count(&self, n: u64) -> u64 {
        match &self.split {
            Some((s, table)) => s.count(n, table),
            None => self.enumerator.count(n),
        }
    }
}
