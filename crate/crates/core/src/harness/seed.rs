//! Per-cell seed derivation.
//!
//! `derive_seed` folds the tuple `(master, model, log, ratio_index,
//! repetition)` through the SplitMix64 finalizer: starting from
//! `h = mix(master ^ DOMAIN)`, each coordinate `v` updates
//! `h = mix(h ^ mix(v + GOLDEN_GAMMA))`. Every step is a bijection on `u64`
//! with full avalanche, so cells get independent-looking streams.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const DOMAIN: u64 = 0x5341_4D50_4C45_5153; // "SAMPLEQS"

/// Coordinate used in place of `log_id`/`ratio_index` for streams that are
/// not tied to a sample: tree generation and log simulation.
pub const NO_COORD: u64 = u64::MAX;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, model_id: u64, log_id: u64, ratio_index: u64, repetition: u64) -> u64 {
    [model_id, log_id, ratio_index, repetition]
        .into_iter()
        .fold(mix(master ^ DOMAIN), |h, v| mix(h ^ mix(v.wrapping_add(GOLDEN_GAMMA))))
}

/// Seed for generating model `model_id`.
pub fn model_seed(master: u64, model_id: u64) -> u64 {
    derive_seed(master, model_id, NO_COORD, NO_COORD, 0)
}

/// Seed for simulating log `log_id` of model `model_id`.
pub fn log_seed(master: u64, model_id: u64, log_id: u64) -> u64 {
    derive_seed(master, model_id, log_id, NO_COORD, 1)
}
