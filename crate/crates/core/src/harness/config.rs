//! Experiment configuration in a flat `key = value` text format.
//!
//! Lists are comma-separated, `#` starts a comment, and every missing key
//! keeps its default. Generator and simulation settings use the
//! `generator.` and `simulation.` prefixes.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::processtree::{GeneratorParams, SimulationParams};
use crate::sampling::Technique;

/// Environment variable that overrides `master_seed`.
pub const SEED_ENV: &str = "SAMPLEBENCH_MASTER_SEED";

/// 0.01, 0.02, 0.05, then 0.1 to 0.9 in steps of 0.1.
pub const DEFAULT_RATIOS: [f64; 12] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {value}")]
    Value { line: usize, key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Settings of an experiment run.
///
/// The default generator only draws true processes the miner can
/// rediscover: no silent steps, no duplicate labels, separable loop bodies.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub ratios: Vec<f64>,
    pub samples_per_ratio: usize,
    pub models: usize,
    pub logs_per_model: usize,
    pub traces_per_log: u64,
    pub sampler: Technique,
    pub generator: GeneratorParams,
    pub simulation: SimulationParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: 0,
            ratios: DEFAULT_RATIOS.to_vec(),
            samples_per_ratio: 10,
            models: 10,
            logs_per_model: 1,
            traces_per_log: 5000,
            sampler: Technique::Simple,
            generator: GeneratorParams {
                silent_probability: 0.0,
                rediscoverable: true,
                ..GeneratorParams::default()
            },
            simulation: SimulationParams::default(),
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or_default().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            let g = &mut cfg.generator;
            let s = &mut cfg.simulation;
            match key {
                "master_seed" => cfg.master_seed = parse_value(line, key, value)?,
                "ratios" => {
                    cfg.ratios = value
                        .split(',')
                        .map(|v| parse_value(line, key, v.trim()))
                        .collect::<Result<_, _>>()?
                }
                "samples_per_ratio" => cfg.samples_per_ratio = parse_value(line, key, value)?,
                "models" => cfg.models = parse_value(line, key, value)?,
                "logs_per_model" => cfg.logs_per_model = parse_value(line, key, value)?,
                "traces_per_log" => cfg.traces_per_log = parse_value(line, key, value)?,
                "sampler" => cfg.sampler = parse_value(line, key, value)?,
                "generator.alphabet_size" => g.alphabet_size = parse_value(line, key, value)?,
                "generator.min_activities" => g.min_activities = parse_value(line, key, value)?,
                "generator.max_activities" => g.max_activities = parse_value(line, key, value)?,
                "generator.sequence_weight" => g.sequence_weight = parse_value(line, key, value)?,
                "generator.xor_weight" => g.xor_weight = parse_value(line, key, value)?,
                "generator.parallel_weight" => g.parallel_weight = parse_value(line, key, value)?,
                "generator.loop_weight" => g.loop_weight = parse_value(line, key, value)?,
                "generator.silent_probability" => g.silent_probability = parse_value(line, key, value)?,
                "generator.max_depth" => {
                    g.max_depth = match value {
                        "" | "none" => None,
                        v => Some(parse_value(line, key, v)?),
                    }
                }
                "generator.rediscoverable" => g.rediscoverable = parse_value(line, key, value)?,
                "simulation.loop_continue_probability" => s.loop_continue_probability = parse_value(line, key, value)?,
                "simulation.max_loop_iterations" => s.max_loop_iterations = parse_value(line, key, value)?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.ratios.is_empty() || self.ratios.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return invalid("ratios must be non-empty and within (0, 1]");
        }
        if self.samples_per_ratio == 0 || self.models == 0 || self.logs_per_model == 0 || self.traces_per_log == 0 {
            return invalid("samples_per_ratio, models, logs_per_model and traces_per_log must be at least 1");
        }
        if !(0.0..1.0).contains(&self.simulation.loop_continue_probability) {
            return invalid("simulation.loop_continue_probability must be in [0, 1)");
        }
        Ok(())
    }

    /// Applies the `SAMPLEBENCH_MASTER_SEED` override when it is set.
    pub fn with_env_seed(mut self) -> Result<Self, ConfigError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.master_seed = v.trim().parse().map_err(|_| ConfigError::Value {
                line: 0,
                key: SEED_ENV.to_string(),
                value: v.clone(),
            })?;
        }
        Ok(self)
    }

    pub fn simulation_params(&self) -> SimulationParams {
        SimulationParams {
            trace_count: self.traces_per_log,
            ..self.simulation.clone()
        }
    }

    /// Renders every field in the file format; `parse(to_text())` restores the config.
    pub fn to_text(&self) -> String {
        let g = &self.generator;
        let s = &self.simulation;
        let ratios: Vec<String> = self.ratios.iter().map(f64::to_string).collect();
        let mut out = String::new();
        let _ = writeln!(out, "master_seed = {}", self.master_seed);
        let _ = writeln!(out, "ratios = {}", ratios.join(", "));
        let _ = writeln!(out, "samples_per_ratio = {}", self.samples_per_ratio);
        let _ = writeln!(out, "models = {}", self.models);
        let _ = writeln!(out, "logs_per_model = {}", self.logs_per_model);
        let _ = writeln!(out, "traces_per_log = {}", self.traces_per_log);
        let _ = writeln!(out, "sampler = {}", self.sampler);
        let _ = writeln!(out, "generator.alphabet_size = {}", g.alphabet_size);
        let _ = writeln!(out, "generator.min_activities = {}", g.min_activities);
        let _ = writeln!(out, "generator.max_activities = {}", g.max_activities);
        let _ = writeln!(out, "generator.sequence_weight = {}", g.sequence_weight);
        let _ = writeln!(out, "generator.xor_weight = {}", g.xor_weight);
        let _ = writeln!(out, "generator.parallel_weight = {}", g.parallel_weight);
        let _ = writeln!(out, "generator.loop_weight = {}", g.loop_weight);
        let _ = writeln!(out, "generator.silent_probability = {}", g.silent_probability);
        let depth = g.max_depth.map_or("none".to_string(), |d| d.to_string());
        let _ = writeln!(out, "generator.max_depth = {depth}");
        let _ = writeln!(out, "generator.rediscoverable = {}", g.rediscoverable);
        let _ = writeln!(out, "simulation.loop_continue_probability = {}", s.loop_continue_probability);
        let _ = writeln!(out, "simulation.max_loop_iterations = {}", s.max_loop_iterations);
        out
    }
}
