use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ProcessTree;
use crate::eventlog::{Activity, EventLog, Trace};

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationParams {
    pub trace_count: u64,
    /// Probability of running `redo · do` once more after each loop body.
    pub loop_continue_probability: f64,
    /// Maximum number of loop body executions per loop visit.
    pub max_loop_iterations: usize,
}

impl Default for SimulationParams {
    fn default() -> Self {
        SimulationParams {
            trace_count: 5000,
            loop_continue_probability: 0.4,
            max_loop_iterations: 8,
        }
    }
}

/// Plays out `trace_count` independent traces.
pub fn simulate(tree: &ProcessTree, params: &SimulationParams, seed: u64) -> EventLog {
    assert!(params.trace_count >= 1, "trace_count must be at least 1");
    assert!((0.0..1.0).contains(&params.loop_continue_probability));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = EventLog::new();
    for _ in 0..params.trace_count {
        log.add(Trace::new(simulate_trace(tree, params, &mut rng)), 1);
    }
    log
}

pub fn simulate_trace<R: Rng>(tree: &ProcessTree, params: &SimulationParams, rng: &mut R) -> Vec<Activity> {
    let mut out = Vec::new();
    play(tree, params, rng, &mut out);
    out
}

fn play<R: Rng>(tree: &ProcessTree, params: &SimulationParams, rng: &mut R, out: &mut Vec<Activity>) {
    match tree {
        ProcessTree::Leaf(a) => out.push(a.clone()),
        ProcessTree::Silent => {}
        ProcessTree::Sequence(children) => {
            for c in children {
                play(c, params, rng, out);
            }
        }
        ProcessTree::Xor(children) => {
            let i = rng.gen_range(0..children.len());
            play(&children[i], params, rng, out);
        }
        ProcessTree::Parallel(children) => {
            let branches: Vec<Vec<Activity>> = children.iter().map(|c| simulate_trace(c, params, rng)).collect();
            interleave(branches, rng, out);
        }
        ProcessTree::Loop(body, redo) => {
            play(body, params, rng, out);
            let mut iterations = 1;
            while iterations < params.max_loop_iterations.max(1) && rng.gen_bool(params.loop_continue_probability) {
                play(redo, params, rng, out);
                play(body, params, rng, out);
                iterations += 1;
            }
        }
    }
}

/// Uniformly random merge: the next event comes from branch `i` with
/// probability proportional to its remaining length, which makes every
/// interleaving equally likely.
fn interleave<R: Rng>(branches: Vec<Vec<Activity>>, rng: &mut R, out: &mut Vec<Activity>) {
    let mut cursors: Vec<std::vec::IntoIter<Activity>> = branches.into_iter().map(Vec::into_iter).collect();
    let mut remaining: usize = cursors.iter().map(ExactSizeIterator::len).sum();
    while remaining > 0 {
        let mut pick = rng.gen_range(0..remaining);
        for cursor in cursors.iter_mut() {
            if pick < cursor.len() {
                out.push(cursor.next().unwrap());
                break;
            }
            pick -= cursor.len();
        }
        remaining -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(t: u64) -> SimulationParams {
        SimulationParams {
            trace_count: t,
            ..Default::default()
        }
    }

    fn tree(s: &str) -> ProcessTree {
        s.parse().unwrap()
    }

    #[test]
    fn leaf_only() {
        let log = simulate(&tree("a"), &params(5), 1);
        assert_eq!(log.unique_traces(), 1);
        assert_eq!(log.total_traces(), 5);
    }

    #[test]
    fn parallel_two() {
        let log = simulate(&tree("and(a,b)"), &params(200), 3);
        let ab: Trace = ["a", "b"].into_iter().collect();
        let ba: Trace = ["b", "a"].into_iter().collect();
        assert_eq!(log.multiplicity(&ab) + log.multiplicity(&ba), 200);
        assert!(log.multiplicity(&ab) > 0 && log.multiplicity(&ba) > 0);
    }

    #[test]
    fn xor_is_fair() {
        // 99.99% binomial interval for p = 0.5, n = 10000 is ±0.0195
        let log = simulate(&tree("xor(a,b)"), &params(10_000), 11);
        let a: Trace = ["a"].into_iter().collect();
        let frac = log.multiplicity(&a) as f64 / 10_000.0;
        assert!((frac - 0.5).abs() <= 0.02, "{frac}");
    }

    #[test]
    fn interleavings_uniform() {
        // and(a, seq(b,c)) has 3 interleavings; each ≈ 1/3
        let log = simulate(&tree("and(a,seq(b,c))"), &params(30_000), 5);
        assert_eq!(log.unique_traces(), 3);
        for (_, m) in log.entries() {
            assert!((m as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn loop_cap() {
        let p = SimulationParams {
            trace_count: 2000,
            loop_continue_probability: 0.9,
            max_loop_iterations: 3,
        };
        let t = tree("loop(a,b)");
        let log = simulate(&t, &p, 0);
        for (trace, _) in log.entries() {
            assert!(trace.len() <= t.max_trace_len(3));
        }
        assert!(log.entries().any(|(tr, _)| tr.len() == 5));
    }

    #[test]
    fn deterministic() {
        let t = tree("seq(a,and(b,loop(c,d)),xor(e,tau))");
        assert_eq!(simulate(&t, &params(300), 9), simulate(&t, &params(300), 9));
    }
}
