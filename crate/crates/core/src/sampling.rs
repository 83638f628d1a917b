//! Probability sampling of trace instances: simple random, stratified and
//! stratified-squared.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, so samples are
//! identical across platforms for the same seed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eventlog::{EventLog, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Technique {
    Simple,
    Stratified,
    StratifiedSquared,
}

impl Technique {
    pub const ALL: [Technique; 3] = [Technique::Simple, Technique::Stratified, Technique::StratifiedSquared];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Simple => "simple",
            Technique::Stratified => "stratified",
            Technique::StratifiedSquared => "stratified_squared",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("unknown sampling technique `{0}` (expected simple, stratified or stratified_squared)")]
pub struct UnknownTechnique(String);

impl FromStr for Technique {
    type Err = UnknownTechnique;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "simple" => Ok(Technique::Simple),
            "stratified" => Ok(Technique::Stratified),
            "stratified_squared" | "stratified-squared" => Ok(Technique::StratifiedSquared),
            other => Err(UnknownTechnique(other.to_string())),
        }
    }
}

/// A sub-multiset of a parent log together with how it was drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleLog {
    pub log: EventLog,
    pub source_total: u64,
    pub ratio: f64,
    pub technique: Technique,
    pub seed: u64,
}

impl SampleLog {
    pub fn len(&self) -> u64 {
        self.log.total_traces()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }
}

/// Rounds to the nearest integer, sending exact halves to the even neighbour.
pub fn round_half_even(x: f64) -> u64 {
    debug_assert!(x.is_finite() && x >= 0.0);
    x.round_ties_even() as u64
}

pub fn draw(log: &EventLog, ratio: f64, seed: u64, technique: Technique) -> SampleLog {
    match technique {
        Technique::Simple => simple_random(log, ratio, seed),
        Technique::Stratified => stratified(log, ratio, seed),
        Technique::StratifiedSquared => stratified_squared(log, ratio, seed),
    }
}

fn check_ratio(ratio: f64) {
    assert!((0.0..=1.0).contains(&ratio), "sampling ratio {ratio} outside [0, 1]");
}

/// Draws exactly `round_half_even(ratio * |log|)` trace instances without
/// replacement.
///
/// Uses sequential selection (Knuth's Algorithm S) over the instances laid out
/// in lexicographic trace order: instance `i` is kept with probability
/// `needed / remaining`, evaluated as `gen_range(0..remaining) < needed`.
pub fn simple_random(log: &EventLog, ratio: f64, seed: u64) -> SampleLog {
    check_ratio(ratio);
    let total = log.total_traces();
    let mut needed = round_half_even(ratio * total as f64).min(total);
    let mut remaining = total;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = EventLog::new();
    for (trace, m) in log.entries() {
        let mut taken = 0;
        for _ in 0..m {
            if needed == 0 {
                break;
            }
            if rng.gen_range(0..remaining) < needed {
                taken += 1;
                needed -= 1;
            }
            remaining -= 1;
        }
        sample.add(trace.clone(), taken);
        if needed == 0 {
            break;
        }
    }
    SampleLog {
        log: sample,
        source_total: total,
        ratio,
        technique: Technique::Simple,
        seed,
    }
}

/// Takes `round_half_even(ratio * m)` instances from every unique trace of
/// multiplicity `m`. The seed does not influence the result.
pub fn stratified(log: &EventLog, ratio: f64, seed: u64) -> SampleLog {
    check_ratio(ratio);
    let sample = log
        .entries()
        .map(|(t, m)| (t.clone(), round_half_even(ratio * m as f64).min(m)))
        .collect();
    SampleLog {
        log: sample,
        source_total: log.total_traces(),
        ratio,
        technique: Technique::Stratified,
        seed,
    }
}

/// Stratified sampling topped up, one instance at a time, from the most
/// frequent unique traces not yet sampled until the expected sample size
/// `round_half_even(ratio * |log|)` is reached or no such trace remains.
/// Frequency ties go to the lexicographically smaller trace.
pub fn stratified_squared(log: &EventLog, ratio: f64, seed: u64) -> SampleLog {
    let mut sample = stratified(log, ratio, seed);
    let expected = round_half_even(ratio * sample.source_total as f64);
    let mut size = sample.log.total_traces();
    if size < expected {
        let mut excluded: Vec<(&Trace, u64)> = log
            .entries()
            .filter(|(t, _)| sample.log.multiplicity(t) == 0)
            .collect();
        excluded.sort_by(|(ta, ma), (tb, mb)| mb.cmp(ma).then_with(|| ta.cmp(tb)));
        for (trace, _) in excluded {
            if size >= expected {
                break;
            }
            sample.log.add(trace.clone(), 1);
            size += 1;
        }
    }
    sample.technique = Technique::StratifiedSquared;
    sample
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Trace {
        s.split_whitespace().collect()
    }

    #[test]
    fn half_even() {
        assert_eq!(round_half_even(1.5), 2);
        assert_eq!(round_half_even(2.5), 2);
        assert_eq!(round_half_even(0.5), 0);
        assert_eq!(round_half_even(1.3), 1);
        assert_eq!(round_half_even(3.5), 4);
        assert_eq!(round_half_even(2.500001), 3);
    }

    #[test]
    fn technique_names_roundtrip() {
        for t in Technique::ALL {
            assert_eq!(t.name().parse::<Technique>().unwrap(), t);
        }
        assert!("bernoulli".parse::<Technique>().is_err());
    }

    #[test]
    fn simple_full_and_empty() {
        let log: EventLog = [(t("a b"), 3), (t("c"), 2)].into_iter().collect();
        assert_eq!(simple_random(&log, 1.0, 7).log, log);
        assert!(simple_random(&log, 0.0, 7).log.is_empty());
    }

    #[test]
    fn simple_fixed_size() {
        let log: EventLog = (0..40).map(|i| (t(&format!("a{i} b")), 25)).collect();
        assert_eq!(log.total_traces(), 1000);
        for seed in 0..200 {
            let s = simple_random(&log, 0.3, seed);
            assert_eq!(s.len(), 300);
            assert!(s.log.is_sub_multiset_of(&log));
        }
    }

    #[test]
    fn simple_is_deterministic() {
        let log: EventLog = (0..20).map(|i| (t(&format!("x{i}")), i + 1)).collect();
        assert_eq!(simple_random(&log, 0.37, 99), simple_random(&log, 0.37, 99));
        assert_ne!(simple_random(&log, 0.37, 99).log, simple_random(&log, 0.37, 100).log);
    }

    #[test]
    fn stratified_examples() {
        let log: EventLog = [(t("a"), 4), (t("b"), 2)].into_iter().collect();
        let s = stratified(&log, 0.5, 0);
        assert_eq!(s.log.multiplicity(&t("a")), 2);
        assert_eq!(s.log.multiplicity(&t("b")), 1);

        let log: EventLog = [(t("a"), 2), (t("b"), 2)].into_iter().collect();
        assert!(stratified(&log, 0.25, 0).log.is_empty());

        let log: EventLog = [(t("a"), 1)].into_iter().collect();
        assert_eq!(stratified(&log, 1.0, 0).log, log);
    }

    #[test]
    fn stratified_squared_tops_up_smallest_on_tie() {
        let log: EventLog = [(t("b"), 2), (t("a"), 2)].into_iter().collect();
        let s = stratified_squared(&log, 0.25, 0);
        let expected: EventLog = [(t("a"), 1)].into_iter().collect();
        assert_eq!(s.log, expected);
    }

    #[test]
    fn stratified_squared_prefers_frequent() {
        let log: EventLog = [(t("a"), 1), (t("b"), 3), (t("c"), 2), (t("d"), 1)].into_iter().collect();
        // stratified at 0.3: a 0, b 1 (0.9), c 1 (0.6), d 0; expected round(2.1) = 2
        let s = stratified_squared(&log, 0.3, 0);
        assert_eq!(s.len(), 2);
        // at 0.4: b 1 (1.2), c 1 (0.8); expected round(2.8) = 3 -> add a (freq tie with d, a < d)
        let s = stratified_squared(&log, 0.4, 0);
        assert_eq!(s.len(), 3);
        assert_eq!(s.log.multiplicity(&t("a")), 1);
        assert_eq!(s.log.multiplicity(&t("d")), 0);
    }

    #[test]
    fn stratified_squared_noop_when_met() {
        let log: EventLog = [(t("a"), 4), (t("b"), 2)].into_iter().collect();
        assert_eq!(stratified_squared(&log, 0.5, 3).log, stratified(&log, 0.5, 3).log);
    }

    #[test]
    fn stratified_squared_zero_expected() {
        let log: EventLog = [(t("a"), 3)].into_iter().collect();
        assert!(stratified_squared(&log, 0.1, 0).log.is_empty());
    }

    #[test]
    fn stratified_squared_keeps_oversized_stratified() {
        // each stratum rounds 1.5 up to 2, so stratified overshoots round(3.0)
        let log: EventLog = [(t("a"), 3), (t("b"), 3)].into_iter().collect();
        assert_eq!(stratified_squared(&log, 0.5, 0).len(), 4);
    }
}
