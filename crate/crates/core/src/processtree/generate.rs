use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::ProcessTree;
use crate::eventlog::Activity;

/// Parameters of the random tree generator.
///
/// Trees are grown top-down over a randomly chosen set of distinct
/// activities. Every operator node is binary; the activity set is split at a
/// random point between its two children. With `silent_probability` a node is
/// instead wrapped as `xor(child, tau)` or `loop(child, tau)` (picked by the
/// xor/loop weights), which makes the child optional or repeatable.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub alphabet_size: usize,
    pub min_activities: usize,
    pub max_activities: usize,
    pub sequence_weight: f64,
    pub xor_weight: f64,
    pub parallel_weight: f64,
    pub loop_weight: f64,
    pub silent_probability: f64,
    /// Upper bound on `ProcessTree::depth`; `None` leaves depth unconstrained.
    pub max_depth: Option<usize>,
    /// Redraw until the tree satisfies `ProcessTree::is_rediscoverable`.
    /// Silent wrappers never qualify, so pair this with
    /// `silent_probability = 0`.
    pub rediscoverable: bool,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            alphabet_size: 12,
            min_activities: 5,
            max_activities: 8,
            sequence_weight: 1.0,
            xor_weight: 1.0,
            parallel_weight: 1.0,
            loop_weight: 0.5,
            silent_probability: 0.1,
            max_depth: None,
            rediscoverable: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("alphabet of {alphabet} activities cannot supply {min} distinct activities")]
    AlphabetTooSmall { alphabet: usize, min: usize },
    #[error("invalid generator parameters: {0}")]
    Invalid(&'static str),
    #[error("no rediscoverable tree within {0} draws")]
    Exhausted(usize),
}

/// Label of the `i`-th alphabet activity: `a`..`z`, then `aa`, `ab`, ...
pub fn activity_name(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

#[derive(Clone, Copy)]
enum Op {
    Sequence,
    Xor,
    Parallel,
    Loop,
}

fn capacity(depth: Option<usize>) -> usize {
    match depth {
        None => usize::MAX,
        Some(0) => 0,
        Some(d) => 1usize.checked_shl((d - 1) as u32).unwrap_or(usize::MAX),
    }
}

struct Builder<'p> {
    params: &'p GeneratorParams,
    rng: ChaCha8Rng,
}

impl Builder<'_> {
    fn pick(&mut self, ops: &[(Op, f64)]) -> Op {
        let total: f64 = ops.iter().map(|(_, w)| w).sum();
        let mut x = self.rng.gen::<f64>() * total;
        for &(op, w) in ops {
            if x < w {
                return op;
            }
            x -= w;
        }
        ops.iter().rev().find(|(_, w)| *w > 0.0).unwrap().0
    }

    fn build(&mut self, acts: &[Activity], depth: Option<usize>) -> ProcessTree {
        let p = self.params;
        let child_depth = depth.map(|d| d - 1);
        let can_wrap = p.xor_weight + p.loop_weight > 0.0 && acts.len() <= capacity(child_depth);
        if can_wrap && self.rng.gen_bool(p.silent_probability) {
            let op = self.pick(&[(Op::Xor, p.xor_weight), (Op::Loop, p.loop_weight)]);
            let child = self.build(acts, child_depth);
            return match op {
                Op::Loop => ProcessTree::looped(child, ProcessTree::Silent),
                _ if self.rng.gen_bool(0.5) => ProcessTree::Xor(vec![child, ProcessTree::Silent]),
                _ => ProcessTree::Xor(vec![ProcessTree::Silent, child]),
            };
        }
        if acts.len() == 1 {
            return ProcessTree::Leaf(acts[0].clone());
        }
        let op = self.pick(&[
            (Op::Sequence, p.sequence_weight),
            (Op::Xor, p.xor_weight),
            (Op::Parallel, p.parallel_weight),
            (Op::Loop, p.loop_weight),
        ]);
        let cap = capacity(child_depth);
        let n = acts.len();
        let lo = n.saturating_sub(cap).max(1);
        let hi = cap.min(n - 1);
        let split = self.rng.gen_range(lo..=hi);
        let left = self.build(&acts[..split], child_depth);
        let right = self.build(&acts[split..], child_depth);
        match op {
            Op::Sequence => ProcessTree::Sequence(vec![left, right]),
            Op::Xor => ProcessTree::Xor(vec![left, right]),
            Op::Parallel => ProcessTree::Parallel(vec![left, right]),
            Op::Loop => ProcessTree::looped(left, right),
        }
    }
}

/// Draws a random duplicate-free process tree.
pub fn generate(params: &GeneratorParams) -> Result<ProcessTree, GeneratorError> {
    let weights = [
        params.sequence_weight,
        params.xor_weight,
        params.parallel_weight,
        params.loop_weight,
    ];
    if params.min_activities == 0 || params.min_activities > params.max_activities {
        return Err(GeneratorError::Invalid("need 1 <= min_activities <= max_activities"));
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(GeneratorError::Invalid("operator weights must be nonnegative and not all zero"));
    }
    if !(0.0..1.0).contains(&params.silent_probability) {
        return Err(GeneratorError::Invalid("silent_probability must be in [0, 1)"));
    }
    if params.alphabet_size < params.min_activities {
        return Err(GeneratorError::AlphabetTooSmall {
            alphabet: params.alphabet_size,
            min: params.min_activities,
        });
    }
    let cap = capacity(params.max_depth);
    if params.min_activities > cap {
        return Err(GeneratorError::Invalid("max_depth cannot hold min_activities leaves"));
    }
    let mut builder = Builder {
        params,
        rng: ChaCha8Rng::seed_from_u64(params.seed),
    };
    let upper = params.max_activities.min(params.alphabet_size).min(cap);
    for _ in 0..MAX_DRAWS {
        let k = builder.rng.gen_range(params.min_activities..=upper);
        let mut alphabet: Vec<Activity> = (0..params.alphabet_size)
            .map(|i| Activity::from(activity_name(i).as_str()))
            .collect();
        alphabet.shuffle(&mut builder.rng);
        alphabet.truncate(k);
        let tree = builder.build(&alphabet, params.max_depth);
        if !params.rediscoverable || tree.is_rediscoverable() {
            return Ok(tree);
        }
    }
    Err(GeneratorError::Exhausted(MAX_DRAWS))
}

/// Draw limit for `rediscoverable` generation.
pub const MAX_DRAWS: usize = 100_000;
