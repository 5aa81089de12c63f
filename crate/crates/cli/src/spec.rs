//! Experiment definitions: a flat `key = value` file plus overrides.

use std::path::Path;

use mimo_ic::{Algorithm, EvalChannel};

use crate::scenario::Scenario;
use crate::{invalid, RunError};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub snr_db_list: Vec<f64>,
    pub sigma2_list: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub eval_channel: EvalChannel,
    pub alternations: usize,
    pub rel_tol: f64,
    pub mc_draws: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            scenario: Scenario::new(4, 3, 3, 1),
            snr_db_list: (-1..=7).map(|i| f64::from(i) * 5.0).collect(),
            sigma2_list: vec![0.1],
            trials: 200,
            seed: 1,
            algorithms: Algorithm::ALL.to_vec(),
            eval_channel: EvalChannel::True,
            alternations: 100,
            rel_tol: 1e-6,
            mc_draws: 10_000,
        }
    }
}

/// Parses `a,b,c` or an inclusive range `start:step:stop`.
pub fn parse_float_list(text: &str) -> Result<Vec<f64>, RunError> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| invalid(format!("{t:?} is not a number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 || stop < start {
                return Err(invalid(format!("range {text:?} is empty or has a non-positive step")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        [_] => text
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(num)
            .collect(),
        _ => Err(invalid(format!("cannot parse list {text:?}"))),
    }
}

fn parse_count(key: &str, value: &str) -> Result<usize, RunError> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("{key} must be a non-negative integer, got {value:?}")))
}

impl ExperimentSpec {
    /// Sets one field from its textual form. Keys match the command-line
    /// flags, with `-` and `_` interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "scenario" => self.scenario = value.parse()?,
            "snr" | "snr_db" => self.snr_db_list = parse_float_list(value)?,
            "sigma2" => self.sigma2_list = parse_float_list(value)?,
            "trials" => self.trials = parse_count(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| invalid(format!("seed must be an unsigned integer, got {value:?}")))?
            }
            "algo" | "algorithms" => {
                self.algorithms = value
                    .split(',')
                    .map(|a| {
                        Algorithm::parse(a.trim()).ok_or_else(|| invalid(format!("unknown algorithm {a:?}")))
                    })
                    .collect::<Result<_, _>>()?
            }
            "iters" | "alternations" => self.alternations = parse_count(key, value)?,
            "rel_tol" => {
                self.rel_tol = value
                    .parse()
                    .map_err(|_| invalid(format!("rel_tol must be a number, got {value:?}")))?
            }
            "mc_draws" => self.mc_draws = parse_count(key, value)?,
            "eval_channel" => {
                self.eval_channel = EvalChannel::parse(value)
                    .ok_or_else(|| invalid(format!("eval_channel must be true or estimated, got {value:?}")))?
            }
            other => return Err(invalid(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document on top of `self`. Blank lines and
    /// `#` comments are ignored.
    pub fn apply_config(&mut self, text: &str) -> Result<(), RunError> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_config_file(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let mut spec = Self::default();
        spec.apply_config(&text)?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.snr_db_list.is_empty() {
            return Err(invalid("SNR list is empty"));
        }
        if self.sigma2_list.is_empty() {
            return Err(invalid("sigma2 list is empty"));
        }
        if let Some(s) = self.sigma2_list.iter().find(|s| !(**s >= 0.0)) {
            return Err(invalid(format!("sigma2 must be non-negative, got {s}")));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("no algorithm selected"));
        }
        if self.alternations == 0 {
            return Err(invalid("iters must be at least 1"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(invalid("rel_tol must be non-negative"));
        }
        for &snr in &self.snr_db_list {
            for &s2 in &self.sigma2_list {
                self.scenario
                    .config(snr, s2)
                    .map_err(|e| invalid(format!("SNR {snr} dB, sigma2 {s2}: {e}")))?;
            }
        }
        Ok(())
    }

    /// Accuracy runs need enough draws for a stable Monte Carlo mean.
    pub fn validate_accuracy(&self) -> Result<(), RunError> {
        self.validate()?;
        if self.mc_draws < 10_000 {
            return Err(invalid(format!("mc_draws must be at least 10000, got {}", self.mc_draws)));
        }
        Ok(())
    }
}
