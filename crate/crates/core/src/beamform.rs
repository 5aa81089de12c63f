//! Alternating transceiver design on the forward and reciprocal networks.
//!
//! For receiver `k` and stream `d` the design maximizes the first-order
//! approximate mean SINR
//!
//! ```text
//!        u† [P·s·s† + P·σ²·I] u
//!   ---------------------------------------------------------- ,  s = H_kk·v_d
//!   u† [P·Σ_(j,m)≠(k,d) H_kj·v_m·v_m†·H_kj† + (P·σ²·(ΣD − 1) + N0)·I] u
//! ```
//!
//! whose maximizer is the leading eigenvector of the pencil `(Q, F)`. Step I
//! updates every receive filter on the forward network. Step II does the same
//! on the reciprocal network, whose receivers are the original transmitters,
//! and the result becomes the new set of precoders.
//!
//! Reciprocal channels are plain transposes, so a receive filter `u` is
//! re-used as the reverse-link precoder `conj(u)` and a reverse receive filter
//! `w` becomes the forward precoder `conj(w)`. With that mapping the reverse
//! link gain `|conj(v)† Hᵀ conj(u)|` equals the forward gain `|u† H v|`.

use num_complex::Complex64;

use crate::network::{ChannelMap, NetworkConfig};
use crate::numerics::{self, hermitize, CMatrix, CVector};
use crate::rng::SimRng;
use crate::{Error, Result};

/// Precoders `V[j]` (M×Dʲ) and receive filters `U[k]` (N×Dᵏ).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub precoders: Vec<CMatrix>,
    pub suppressors: Vec<CMatrix>,
}

impl FilterBank {
    /// The same filters seen from the reciprocal network.
    pub fn reciprocal(&self) -> Self {
        Self {
            precoders: conjugate_all(&self.suppressors),
            suppressors: conjugate_all(&self.precoders),
        }
    }

    /// Largest deviation of any column norm from one.
    pub fn max_norm_error(&self) -> f64 {
        self.precoders
            .iter()
            .chain(&self.suppressors)
            .flat_map(|m| m.column_iter().map(|c| (c.norm() - 1.0).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }
}

fn conjugate_all(ms: &[CMatrix]) -> Vec<CMatrix> {
    ms.iter().map(|m| m.map(|z| z.conj())).collect()
}

/// Numerator and denominator matrices of one stream's objective.
#[derive(Debug, Clone, PartialEq)]
pub struct QfPair {
    pub q: CMatrix,
    pub f: CMatrix,
}

impl QfPair {
    /// `u†Qu / u†Fu`.
    pub fn quotient(&self, u: &CVector) -> f64 {
        let num = u.dotc(&(&self.q * u)).re;
        let den = u.dotc(&(&self.f * u)).re;
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Maximizes the approximate mean SINR with the configured error variance.
    Proposed,
    /// The same update with the error variance set to zero.
    MaxSinr,
    /// Receive filters span the weakest directions of the interference.
    MinLeakage,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Proposed, Algorithm::MaxSinr, Algorithm::MinLeakage];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::MaxSinr => "max_sinr",
            Algorithm::MinLeakage => "min_leakage",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    /// Error variance the update designs for.
    pub fn design_sigma2(self, cfg: &NetworkConfig) -> f64 {
        match self {
            Algorithm::Proposed => cfg.sigma2,
            Algorithm::MaxSinr | Algorithm::MinLeakage => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoOptions {
    pub max_alternations: usize,
    /// Relative metric change over one full alternation that counts as
    /// converged.
    pub rel_tol: f64,
    pub algorithm: Algorithm,
}

impl Default for AlgoOptions {
    fn default() -> Self {
        Self { max_alternations: 100, rel_tol: 1e-6, algorithm: Algorithm::Proposed }
    }
}

impl AlgoOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_alternations == 0 {
            return Err(Error::InvalidConfig("max_alternations must be at least 1".into()));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidConfig("rel_tol must be non-negative".into()));
        }
        Ok(())
    }
}

/// Metric after the initial draw and after every half-step.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub metric_values: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Initial,
    /// Step I: receive filters updated on the forward network.
    Forward,
    /// Step II: precoders updated on the reciprocal network.
    Reverse,
}

fn check_shapes(channels: &ChannelMap, precoders: &[CMatrix], cfg: &NetworkConfig) -> Result<()> {
    if channels.users() != cfg.users || channels.shape() != (cfg.rx_antennas, cfg.tx_antennas) {
        return Err(Error::DimensionMismatch(format!(
            "channels are {:?} for {} users, config expects {:?} for {}",
            channels.shape(),
            channels.users(),
            (cfg.rx_antennas, cfg.tx_antennas),
            cfg.users
        )));
    }
    if precoders.len() != cfg.users
        || precoders
            .iter()
            .zip(&cfg.streams)
            .any(|(v, &d)| v.shape() != (cfg.tx_antennas, d))
    {
        return Err(Error::DimensionMismatch("precoders do not match the configuration".into()));
    }
    Ok(())
}

fn check_stream(cfg: &NetworkConfig, k: usize, d: usize) -> Result<()> {
    if k >= cfg.users || d >= cfg.streams[k] {
        return Err(Error::IndexOutOfRange(format!("stream ({k}, {d})")));
    }
    Ok(())
}

/// Builds `(Q, F)` for receiver `k`, stream `d`.
pub fn build_qf(
    k: usize,
    d: usize,
    channels: &ChannelMap,
    precoders: &[CMatrix],
    cfg: &NetworkConfig,
    sigma2_eff: f64,
) -> Result<QfPair> {
    check_shapes(channels, precoders, cfg)?;
    check_stream(cfg, k, d)?;
    let n = cfg.rx_antennas;
    let p = cfg.power;
    let one = Complex64::new(1.0, 0.0);

    let own = channels.link(k, k) * precoders[k].column(d);
    let mut q = &own * own.adjoint();
    q.scale_mut(p);
    for i in 0..n {
        q[(i, i)] += p * sigma2_eff;
    }

    let mut f = CMatrix::zeros(n, n);
    for (j, v) in precoders.iter().enumerate() {
        let h = channels.link(k, j);
        for m in 0..v.ncols() {
            if j == k && m == d {
                continue;
            }
            let s = h * v.column(m);
            f.ger(Complex64::new(p, 0.0), &s, &s.conjugate(), one);
        }
    }
    let floor = p * sigma2_eff * (cfg.total_streams() as f64 - 1.0) + cfg.noise;
    for i in 0..n {
        f[(i, i)] += floor;
    }
    Ok(QfPair { q: hermitize(&q), f: hermitize(&f) })
}

/// Step I on the given network: every receive column becomes the leading
/// generalized eigenvector of its own pencil. Streams are updated
/// independently.
pub fn receiver_update(
    channels: &ChannelMap,
    precoders: &[CMatrix],
    cfg: &NetworkConfig,
    sigma2_eff: f64,
) -> Result<Vec<CMatrix>> {
    (0..cfg.users)
        .map(|k| {
            let columns = (0..cfg.streams[k])
                .map(|d| {
                    let qf = build_qf(k, d, channels, precoders, cfg, sigma2_eff)?;
                    Ok(numerics::leading_generalized_eigvec(&qf.q, &qf.f)?.vector)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CMatrix::from_columns(&columns))
        })
        .collect()
}

/// Leakage-minimizing receive filters: the `Dᵏ` weakest eigenvectors of the
/// interference covariance `Σ_{j≠k} P·H_kj·Vʲ·Vʲ†·H_kj†`.
pub fn leakage_update(
    channels: &ChannelMap,
    precoders: &[CMatrix],
    cfg: &NetworkConfig,
) -> Result<Vec<CMatrix>> {
    check_shapes(channels, precoders, cfg)?;
    let n = cfg.rx_antennas;
    (0..cfg.users)
        .map(|k| {
            let mut cov = CMatrix::zeros(n, n);
            for (j, v) in precoders.iter().enumerate() {
                if j != k {
                    let hv = channels.link(k, j) * v;
                    cov += (&hv * hv.adjoint()).scale(cfg.power);
                }
            }
            Ok(numerics::smallest_eigvecs(&hermitize(&cov), cfg.streams[k])?.0)
        })
        .collect()
}

/// Sum over all streams of `u†Qu / u†Fu`, the Lagrangian value at its
/// stationary multiplier. Independent of column scaling.
pub fn metric(
    channels: &ChannelMap,
    precoders: &[CMatrix],
    suppressors: &[CMatrix],
    cfg: &NetworkConfig,
    sigma2_eff: f64,
) -> Result<f64> {
    if suppressors.len() != cfg.users
        || suppressors
            .iter()
            .zip(&cfg.streams)
            .any(|(u, &d)| u.shape() != (cfg.rx_antennas, d))
    {
        return Err(Error::DimensionMismatch("receive filters do not match the configuration".into()));
    }
    let mut total = 0.0;
    for (k, u) in suppressors.iter().enumerate() {
        for d in 0..u.ncols() {
            let qf = build_qf(k, d, channels, precoders, cfg, sigma2_eff)?;
            total += qf.quotient(&u.column(d).into_owned());
        }
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::NonFinite("metric"))
    }
}

/// Metric of `bank` evaluated on the reciprocal network.
pub fn reciprocal_metric(
    channels: &ChannelMap,
    bank: &FilterBank,
    cfg: &NetworkConfig,
    sigma2_eff: f64,
) -> Result<f64> {
    let rev = bank.reciprocal();
    metric(&channels.reciprocal(), &rev.precoders, &rev.suppressors, &cfg.reversed(), sigma2_eff)
}

fn half_step(
    algorithm: Algorithm,
    channels: &ChannelMap,
    precoders: &[CMatrix],
    cfg: &NetworkConfig,
    sigma2_eff: f64,
) -> Result<Vec<CMatrix>> {
    match algorithm {
        Algorithm::Proposed | Algorithm::MaxSinr => receiver_update(channels, precoders, cfg, sigma2_eff),
        Algorithm::MinLeakage => leakage_update(channels, precoders, cfg),
    }
}

/// Random initial filters with orthonormal columns, precoders first.
pub fn initial_filters(cfg: &NetworkConfig, rng: &mut SimRng) -> Result<FilterBank> {
    let precoders = cfg
        .streams
        .iter()
        .map(|&d| numerics::orthonormal_columns(rng, cfg.tx_antennas, d))
        .collect::<Result<Vec<_>>>()?;
    let suppressors = cfg
        .streams
        .iter()
        .map(|&d| numerics::orthonormal_columns(rng, cfg.rx_antennas, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(FilterBank { precoders, suppressors })
}

/// Runs the alternating design on estimated channels `h`.
pub fn run(
    h: &ChannelMap,
    cfg: &NetworkConfig,
    opts: &AlgoOptions,
    rng: &mut SimRng,
) -> Result<(FilterBank, RunTrace)> {
    run_observed(h, cfg, opts, rng, |_, _, _| {})
}

/// [`run`], calling `observe(alternation, phase, filters)` after the initial
/// draw and after every half-step.
pub fn run_observed(
    h: &ChannelMap,
    cfg: &NetworkConfig,
    opts: &AlgoOptions,
    rng: &mut SimRng,
    mut observe: impl FnMut(usize, Phase, &FilterBank),
) -> Result<(FilterBank, RunTrace)> {
    cfg.validate()?;
    opts.validate()?;
    let sigma2_eff = opts.algorithm.design_sigma2(cfg);
    let rev_channels = h.reciprocal();
    let rev_cfg = cfg.reversed();

    let mut bank = initial_filters(cfg, rng)?;
    let mut values = vec![metric(h, &bank.precoders, &bank.suppressors, cfg, sigma2_eff)?];
    observe(0, Phase::Initial, &bank);

    let mut previous = values[0];
    let mut converged = false;
    let mut iterations_run = 0;
    for alternation in 1..=opts.max_alternations {
        bank.suppressors = half_step(opts.algorithm, h, &bank.precoders, cfg, sigma2_eff)?;
        values.push(metric(h, &bank.precoders, &bank.suppressors, cfg, sigma2_eff)?);
        observe(alternation, Phase::Forward, &bank);

        let rev_precoders = conjugate_all(&bank.suppressors);
        let rev_receivers = half_step(opts.algorithm, &rev_channels, &rev_precoders, &rev_cfg, sigma2_eff)?;
        bank.precoders = conjugate_all(&rev_receivers);
        let current = metric(&rev_channels, &rev_precoders, &rev_receivers, &rev_cfg, sigma2_eff)?;
        values.push(current);
        observe(alternation, Phase::Reverse, &bank);

        iterations_run = alternation;
        if (current - previous).abs() <= opts.rel_tol * previous.abs() {
            converged = true;
            break;
        }
        previous = current;
    }
    Ok((bank, RunTrace { metric_values: values, iterations_run, converged }))
}
