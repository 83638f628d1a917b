use std::collections::BTreeMap;

use proptest::prelude::*;

use samplebench::conformance::{short_circuit_entropy, Automaton};
use samplebench::eventlog::{directly_follows, parse_csv, write_csv, Activity, CsvOptions, EventLog, Trace};
use samplebench::processtree::{generate, GeneratorParams, ProcessTree};
use samplebench::quality::{measure, measure_vectors};
use samplebench::sampling::{draw, Technique};
use samplebench::stats::{rank, spearman};

fn trace_strategy(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..5, 0..=max_len)
}

fn log_strategy() -> impl Strategy<Value = EventLog> {
    prop::collection::vec((trace_strategy(7), 1u64..20), 1..12).prop_map(|entries| {
        let mut log = EventLog::new();
        for (t, m) in entries {
            let names: Vec<String> = t.iter().map(|c| ((b'a' + c) as char).to_string()).collect();
            log.add(names.iter().map(String::as_str).collect(), m);
        }
        log
    })
}

fn technique_strategy() -> impl Strategy<Value = Technique> {
    prop::sample::select(Technique::ALL.to_vec())
}

proptest! {
    #[test]
    fn df_counts_add_up(log in log_strategy()) {
        let p = directly_follows(&log);
        let pair_sum: u64 = p.pairs.values().sum();
        let expected: u64 = log.entries().map(|(t, m)| m * t.len().saturating_sub(1) as u64).sum();
        prop_assert_eq!(pair_sum, expected);
        let empty = log.multiplicity(&Trace::default());
        prop_assert_eq!(p.start_counts.values().sum::<u64>(), log.total_traces() - empty);
        prop_assert_eq!(p.end_counts.values().sum::<u64>(), log.total_traces() - empty);
    }

    #[test]
    fn samples_are_contained_and_deterministic(
        log in log_strategy(),
        ratio in 0.0f64..=1.0,
        seed: u64,
        technique in technique_strategy(),
    ) {
        let s = draw(&log, ratio, seed, technique);
        prop_assert!(s.log.is_sub_multiset_of(&log));
        prop_assert!(s.log.alphabet().is_subset(log.alphabet()));
        prop_assert_eq!(&s, &draw(&log, ratio, seed, technique));
    }

    #[test]
    fn quality_bounds(log in log_strategy(), ratio in 0.01f64..=1.0, seed: u64, technique in technique_strategy()) {
        let parent = directly_follows(&log);
        prop_assume!(!parent.pairs.is_empty());
        let q = measure(&parent, &draw(&log, ratio, seed, technique)).unwrap();
        prop_assert!((0.0..=1.0).contains(&q.coverage));
        prop_assert!((0.0..=1.0).contains(&q.smape));
        prop_assert!((0.0..=1.0).contains(&q.srmspe));
        prop_assert!(q.nmae >= 0.0);
        // Root-mean-square dominates the mean of absolute values.
        prop_assert!(q.srmspe >= q.smape - 1e-12);
        prop_assert!(q.nrmse >= q.nmae - 1e-12);
        prop_assert_eq!(q.n, parent.pairs.len());
    }

    #[test]
    fn error_measures_vanish_at_expectation(e in prop::collection::vec(0.5f64..100.0, 1..10)) {
        let q = measure_vectors(&e, &e, 0.5);
        prop_assert_eq!((q.nmae, q.nrmse, q.smape, q.srmspe), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn spearman_rank_invariance(xy in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..40)) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let Ok(r) = spearman(&x, &y) else { return Ok(()); };
        let x2: Vec<f64> = x.iter().map(|v| v.exp2().min(f64::MAX).atan() + v * 3.0).collect();
        let y2: Vec<f64> = y.iter().map(|v| v.powi(3) + 7.0).collect();
        prop_assert_eq!(rank(&x), rank(&x2));
        let r2 = spearman(&x2, &y2).unwrap();
        prop_assert!((r.rho - r2.rho).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&r.rho));
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert!((spearman(&x, &x).unwrap().rho - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!((spearman(&x, &neg).unwrap().rho + 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_ignores_labels(seed in 0u64..500, shift in 1u8..20) {
        let tree = generate(&GeneratorParams { seed, ..GeneratorParams::default() }).unwrap();
        let renamed = rename(&tree, shift);
        let a = short_circuit_entropy(&tree.to_automaton()).unwrap();
        let b = short_circuit_entropy(&renamed.to_automaton()).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn csv_round_trip(log in log_strategy()) {
        // Empty traces have no rows in the CSV form.
        let mut log = log;
        let mut nonempty = EventLog::new();
        for (t, m) in log.entries() {
            if !t.is_empty() {
                nonempty.add(t.clone(), m);
            }
        }
        prop_assume!(!nonempty.is_empty());
        log = nonempty;
        let mut first = Vec::new();
        write_csv(&log, &mut first).unwrap();
        let back = parse_csv(first.as_slice(), &CsvOptions::default()).unwrap();
        prop_assert_eq!(&back, &log);
        let mut second = Vec::new();
        write_csv(&back, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn tree_text_round_trip(seed: u64) {
        let tree = generate(&GeneratorParams { seed, ..GeneratorParams::default() }).unwrap();
        let text = tree.to_string();
        prop_assert_eq!(text.parse::<ProcessTree>().unwrap(), tree);
    }

    #[test]
    fn minimization_respects_language(words in prop::collection::vec(trace_strategy(5), 1..10)) {
        let acts: Vec<Vec<Activity>> = words
            .iter()
            .map(|w| w.iter().map(|c| Activity::from(((b'a' + c) as char).to_string().as_str())).collect())
            .collect();
        let a = Automaton::from_words(acts.iter().map(Vec::as_slice));
        for w in &acts {
            prop_assert!(a.accepts(w));
        }
        let mut distinct = acts.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(a.words_up_to(5).len(), distinct.len());
    }
}

fn rename(tree: &ProcessTree, shift: u8) -> ProcessTree {
    let map = |t: &ProcessTree| rename(t, shift);
    match tree {
        ProcessTree::Leaf(a) => {
            let label: String = a.as_str().bytes().map(|b| (b'a' + (b - b'a' + shift) % 26) as char).collect();
            ProcessTree::leaf(&format!("x{label}"))
        }
        ProcessTree::Silent => ProcessTree::Silent,
        ProcessTree::Sequence(c) => ProcessTree::Sequence(c.iter().map(map).collect()),
        ProcessTree::Xor(c) => ProcessTree::Xor(c.iter().map(map).collect()),
        ProcessTree::Parallel(c) => ProcessTree::Parallel(c.iter().map(map).collect()),
        ProcessTree::Loop(b, r) => ProcessTree::looped(map(b), map(r)),
    }
}

#[test]
fn renaming_keeps_structure() {
    let t: ProcessTree = "seq(a,loop(b,c))".parse().unwrap();
    let r = rename(&t, 1);
    assert_eq!(r.to_string(), "seq(xb,loop(xc,xd))");
    let lengths = |t: &ProcessTree| {
        let mut by_len = BTreeMap::new();
        for w in t.to_automaton().words_up_to(6) {
            *by_len.entry(w.len()).or_insert(0) += 1;
        }
        by_len
    };
    assert_eq!(lengths(&t), lengths(&r));
}
