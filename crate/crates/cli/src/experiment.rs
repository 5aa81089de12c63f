//! The three experiments. Trials run in parallel; every trial draws from its
//! own seed so rows come out identical and in trial-major order regardless
//! of scheduling.

use mimo_ic::analysis::{self, AccuracyRow};
use mimo_ic::beamform::{self, AlgoOptions, Algorithm};
use mimo_ic::rng::{self, Stream};
use mimo_ic::ChannelSet;
use rayon::prelude::*;

use crate::csv::{fmt_float, CsvRow};
use crate::spec::ExperimentSpec;
use crate::RunError;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub algorithm: &'static str,
    pub snr_db: f64,
    pub sigma2: f64,
    pub trial: usize,
    pub seed: u64,
    pub sum_rate_bits: f64,
    pub energy_efficiency: f64,
    pub metric_final: f64,
    pub iterations: usize,
    pub alpha_pct: Option<f64>,
}

impl CsvRow for ResultRow {
    const HEADER: &'static str = "scenario,algorithm,snr_db,sigma2,trial,seed,sum_rate_bits,energy_efficiency,metric_final,iterations,alpha_pct";

    fn fields(&self) -> Vec<String> {
        vec![
            self.scenario.clone(),
            self.algorithm.to_string(),
            fmt_float(self.snr_db),
            fmt_float(self.sigma2),
            self.trial.to_string(),
            self.seed.to_string(),
            fmt_float(self.sum_rate_bits),
            fmt_float(self.energy_efficiency),
            fmt_float(self.metric_final),
            self.iterations.to_string(),
            self.alpha_pct.map(fmt_float).unwrap_or_default(),
        ]
    }
}

impl CsvRow for AccuracyRow {
    const HEADER: &'static str = "snr_db,sigma2,numeric_mean,approx_mean,alpha_pct";

    fn fields(&self) -> Vec<String> {
        [self.snr_db, self.sigma2, self.numeric_mean, self.approx_mean, self.alpha_pct]
            .into_iter()
            .map(fmt_float)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    pub snr_db: f64,
    pub sigma2: f64,
    pub trial: usize,
    pub half_step: usize,
    pub metric: f64,
}

impl CsvRow for ConvergeRow {
    const HEADER: &'static str = "snr_db,sigma2,trial,half_step,metric";

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.snr_db),
            fmt_float(self.sigma2),
            self.trial.to_string(),
            self.half_step.to_string(),
            fmt_float(self.metric),
        ]
    }
}

fn options(spec: &ExperimentSpec, algorithm: Algorithm) -> AlgoOptions {
    AlgoOptions { max_alternations: spec.alternations, rel_tol: spec.rel_tol, algorithm }
}

fn grid(spec: &ExperimentSpec) -> Vec<(f64, f64)> {
    spec.snr_db_list
        .iter()
        .flat_map(|&snr| spec.sigma2_list.iter().map(move |&s2| (snr, s2)))
        .collect()
}

/// Sum rate and energy efficiency of every algorithm over the SNR × σ² grid.
pub fn sweep(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, RunError> {
    spec.validate()?;
    let scenario = spec.scenario.to_string();
    let points = grid(spec);
    let per_trial = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = rng::trial_seed(spec.seed, trial as u64);
            let mut rows = Vec::with_capacity(points.len() * spec.algorithms.len());
            for &(snr_db, sigma2) in &points {
                let cfg = spec.scenario.config(snr_db, sigma2)?;
                let set = ChannelSet::sample(&cfg, seed);
                let eval = spec.eval_channel.select(&set);
                for &algorithm in &spec.algorithms {
                    let mut init = rng::stream(seed, Stream::Filters);
                    let (bank, trace) = beamform::run(&set.estimate, &cfg, &options(spec, algorithm), &mut init)?;
                    let rate = analysis::sum_rate(eval, &bank.precoders, &bank.suppressors, &cfg)?;
                    rows.push(ResultRow {
                        scenario: scenario.clone(),
                        algorithm: algorithm.name(),
                        snr_db,
                        sigma2,
                        trial,
                        seed,
                        sum_rate_bits: rate,
                        energy_efficiency: analysis::energy_efficiency(rate, &cfg),
                        metric_final: *trace.metric_values.last().expect("trace is never empty"),
                        iterations: trace.iterations_run,
                        alpha_pct: None,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Monte Carlo mean SINR against its first-order approximation for filters
/// designed by the proposed algorithm. Both means are averaged over streams
/// and trials before `alpha` is formed.
pub fn accuracy(spec: &ExperimentSpec) -> Result<Vec<AccuracyRow>, RunError> {
    spec.validate_accuracy()?;
    let opts = options(spec, Algorithm::Proposed);
    let mut rows = Vec::new();
    for &sigma2 in &spec.sigma2_list {
        for &snr_db in &spec.snr_db_list {
            let cfg = spec.scenario.config(snr_db, sigma2)?;
            let per_trial = (0..spec.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = rng::trial_seed(spec.seed, trial as u64);
                    let set = ChannelSet::sample(&cfg, seed);
                    let h = &set.estimate;
                    let (bank, _) = beamform::run(h, &cfg, &opts, &mut rng::stream(seed, Stream::Filters))?;
                    let (v, u) = (&bank.precoders, &bank.suppressors);
                    let numeric = analysis::mean_sinr_numeric_all(
                        h,
                        v,
                        u,
                        &cfg,
                        spec.mc_draws,
                        &mut rng::stream(seed, Stream::MonteCarlo),
                    )?;
                    let mut approx = Vec::with_capacity(numeric.len());
                    for k in 0..cfg.users {
                        for d in 0..cfg.streams[k] {
                            approx.push(analysis::mean_sinr_first_order(h, v, u, &cfg, k, d)?);
                        }
                    }
                    let n = numeric.len() as f64;
                    Ok((numeric.iter().sum::<f64>() / n, approx.iter().sum::<f64>() / n))
                })
                .collect::<Result<Vec<_>, RunError>>()?;
            let t = per_trial.len() as f64;
            let numeric = per_trial.iter().map(|p| p.0).sum::<f64>() / t;
            let approx = per_trial.iter().map(|p| p.1).sum::<f64>() / t;
            rows.push(AccuracyRow::new(snr_db, sigma2, numeric, approx)?);
        }
    }
    Ok(rows)
}

/// Full metric trace of the proposed algorithm for every trial and grid
/// point.
pub fn converge(spec: &ExperimentSpec) -> Result<Vec<ConvergeRow>, RunError> {
    spec.validate()?;
    let opts = options(spec, Algorithm::Proposed);
    let points = grid(spec);
    let per_trial = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = rng::trial_seed(spec.seed, trial as u64);
            let mut rows = Vec::new();
            for &(snr_db, sigma2) in &points {
                let cfg = spec.scenario.config(snr_db, sigma2)?;
                let set = ChannelSet::sample(&cfg, seed);
                let (_, trace) = beamform::run(&set.estimate, &cfg, &opts, &mut rng::stream(seed, Stream::Filters))?;
                rows.extend(trace.metric_values.iter().enumerate().map(|(half_step, &metric)| ConvergeRow {
                    snr_db,
                    sigma2,
                    trial,
                    half_step,
                    metric,
                }));
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}
