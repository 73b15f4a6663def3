//! Where random measurement outcomes come from.
//!
//! Bits of a forced policy are consumed strictly in measurement-call order,
//! one per measurement whose outcome is not already determined by the state.
//! Deterministic measurements never consume a bit. This makes `2^m` branch
//! enumeration a matter of iterating over all `m`-bit strings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities closer than this to 0 or 1 are treated as deterministic.
pub const DETERMINISTIC_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomePolicy {
    Sample { seed: u64 },
    Forced(Vec<bool>),
}

impl OutcomePolicy {
    pub fn forced_from_str(bits: &str) -> Result<Self> {
        bits.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::DimensionMismatch(format!("invalid outcome bit '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(OutcomePolicy::Forced)
    }

    /// All `2^m` forced policies of length `m`, bit `k` of the index giving
    /// the `k`-th outcome.
    pub fn enumerate(m: usize) -> impl Iterator<Item = OutcomePolicy> {
        (0u64..(1u64 << m)).map(move |idx| OutcomePolicy::Forced((0..m).map(|k| (idx >> k) & 1 == 1).collect()))
    }

    pub fn stream(&self) -> OutcomeStream {
        OutcomeStream::new(self.clone())
    }
}

/// One recorded measurement event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub outcome: bool,
    pub random: bool,
}

#[derive(Debug, Clone)]
pub struct OutcomeStream {
    source: Source,
    log: Vec<Measurement>,
}

#[derive(Debug, Clone)]
enum Source {
    Sample(Box<ChaCha8Rng>),
    Forced { bits: Vec<bool>, next: usize },
}

impl OutcomeStream {
    pub fn new(policy: OutcomePolicy) -> Self {
        let source = match policy {
            OutcomePolicy::Sample { seed } => Source::Sample(Box::new(ChaCha8Rng::seed_from_u64(seed))),
            OutcomePolicy::Forced(bits) => Source::Forced { bits, next: 0 },
        };
        OutcomeStream { source, log: Vec::new() }
    }

    /// Draws the outcome of a random event whose probability of reading `1`
    /// is `p_one`. Forced bits are honoured even when the probability is
    /// low; callers that can compute it reject zero-probability branches.
    pub fn draw(&mut self, p_one: f64) -> Result<bool> {
        let outcome = match &mut self.source {
            Source::Sample(rng) => rng.random::<f64>() < p_one,
            Source::Forced { bits, next } => {
                let b = *bits.get(*next).ok_or(Error::OutcomesExhausted { supplied: bits.len() })?;
                *next += 1;
                b
            }
        };
        self.log.push(Measurement { outcome, random: true });
        Ok(outcome)
    }

    pub fn record_deterministic(&mut self, outcome: bool) {
        self.log.push(Measurement { outcome, random: false });
    }

    pub fn log(&self) -> &[Measurement] {
        &self.log
    }

    pub fn random_count(&self) -> usize {
        self.log.iter().filter(|m| m.random).count()
    }

    /// Fails if a forced policy supplied more bits than were consumed.
    pub fn finish(&self) -> Result<()> {
        if let Source::Forced { bits, next } = &self.source {
            if *next != bits.len() {
                return Err(Error::OutcomesUnused { supplied: bits.len(), left: bits.len() - next });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_bits_in_order_then_exhaust() {
        let mut s = OutcomePolicy::Forced(vec![true, false]).stream();
        assert!(s.draw(0.5).unwrap());
        s.record_deterministic(false);
        assert!(!s.draw(0.5).unwrap());
        assert!(s.finish().is_ok());
        assert!(matches!(s.draw(0.5), Err(Error::OutcomesExhausted { supplied: 2 })));
        assert_eq!(s.random_count(), 2);
        assert_eq!(s.log().len(), 3);
    }

    #[test]
    fn unused_bits_reported() {
        let s = OutcomePolicy::Forced(vec![true]).stream();
        assert!(matches!(s.finish(), Err(Error::OutcomesUnused { left: 1, .. })));
    }

    #[test]
    fn sampling_is_reproducible() {
        let draw = |seed| {
            let mut s = OutcomePolicy::Sample { seed }.stream();
            (0..32).map(|_| s.draw(0.5).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn enumeration_covers_all_strings() {
        let all: Vec<_> = OutcomePolicy::enumerate(3).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[5], OutcomePolicy::Forced(vec![true, false, true]));
    }
}
