//! Evaluation: per-stream SINR, sum rate, energy efficiency and the two
//! mean-SINR estimates (first-order closed form and Monte Carlo).

use num_complex::Complex64;
use rand::Rng;

use crate::beamform::build_qf;
use crate::network::{ChannelMap, ChannelSet, NetworkConfig};
use crate::numerics::{complex_gaussian, CMatrix, CVector};
use crate::{Error, Result};

/// Which channel the filters are scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalChannel {
    /// The physical channel `G`.
    #[default]
    True,
    /// The designer's estimate `H`.
    Estimated,
}

impl EvalChannel {
    pub fn select(self, set: &ChannelSet) -> &ChannelMap {
        match self {
            EvalChannel::True => &set.truth,
            EvalChannel::Estimated => &set.estimate,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EvalChannel::True => "true",
            EvalChannel::Estimated => "estimated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "true" => Some(EvalChannel::True),
            "estimated" => Some(EvalChannel::Estimated),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamStat {
    pub k: usize,
    pub d: usize,
    pub sinr: f64,
    pub rate_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyRow {
    pub snr_db: f64,
    pub sigma2: f64,
    pub numeric_mean: f64,
    pub approx_mean: f64,
    pub alpha_pct: f64,
}

impl AccuracyRow {
    pub fn new(snr_db: f64, sigma2: f64, numeric_mean: f64, approx_mean: f64) -> Result<Self> {
        Ok(Self {
            snr_db,
            sigma2,
            numeric_mean,
            approx_mean,
            alpha_pct: accuracy_alpha(numeric_mean, approx_mean)?,
        })
    }
}

fn check_filters(channels: &ChannelMap, v: &[CMatrix], u: &[CMatrix], cfg: &NetworkConfig) -> Result<()> {
    let ok = channels.users() == cfg.users
        && channels.shape() == (cfg.rx_antennas, cfg.tx_antennas)
        && v.len() == cfg.users
        && u.len() == cfg.users
        && (0..cfg.users).all(|i| {
            v[i].shape() == (cfg.tx_antennas, cfg.streams[i]) && u[i].shape() == (cfg.rx_antennas, cfg.streams[i])
        });
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("channels or filters do not match the configuration".into()))
    }
}

fn check_index(cfg: &NetworkConfig, k: usize, d: usize) -> Result<()> {
    if k < cfg.users && d < cfg.streams[k] {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(format!("stream ({k}, {d})")))
    }
}

/// Effective scalar gains `u_dᵏ† C_kj v_mʲ` seen by one receive stream, laid
/// out transmitter-major.
struct GainRow {
    gains: Vec<Complex64>,
    offsets: Vec<usize>,
}

impl GainRow {
    fn new(cfg: &NetworkConfig) -> Self {
        let mut offsets = Vec::with_capacity(cfg.users + 1);
        let mut acc = 0;
        for &d in &cfg.streams {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        Self { gains: vec![Complex64::new(0.0, 0.0); acc], offsets }
    }

    fn fill(&mut self, channels: &ChannelMap, v: &[CMatrix], u: &CVector, k: usize) {
        for (j, vj) in v.iter().enumerate() {
            let hv = channels.link(k, j) * vj;
            for m in 0..vj.ncols() {
                self.gains[self.offsets[j] + m] = u.dotc(&hv.column(m));
            }
        }
    }

    /// `(A, B)` of the SINR with the own stream at flat index `own`.
    fn parts(&self, own: usize, cfg: &NetworkConfig, u_norm2: f64) -> (f64, f64) {
        let p = cfg.power;
        let signal = p * self.gains[own].norm_sqr();
        let interference: f64 = self
            .gains
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != own)
            .map(|(_, g)| g.norm_sqr())
            .sum();
        (signal, p * interference + cfg.noise * u_norm2)
    }
}

/// Numerator and denominator of the SINR of stream `d` at receiver `k`
/// over `channels`.
pub fn sinr_parts(
    channels: &ChannelMap,
    v: &[CMatrix],
    u: &[CMatrix],
    cfg: &NetworkConfig,
    k: usize,
    d: usize,
) -> Result<(f64, f64)> {
    check_filters(channels, v, u, cfg)?;
    check_index(cfg, k, d)?;
    let mut row = GainRow::new(cfg);
    let ud = u[k].column(d).into_owned();
    row.fill(channels, v, &ud, k);
    Ok(row.parts(row.offsets[k] + d, cfg, ud.norm_squared()))
}

/// SINR of stream `d` at receiver `k`, evaluated on `channels`.
pub fn sinr_stream(
    channels: &ChannelMap,
    v: &[CMatrix],
    u: &[CMatrix],
    cfg: &NetworkConfig,
    k: usize,
    d: usize,
) -> Result<f64> {
    let (a, b) = sinr_parts(channels, v, u, cfg, k, d)?;
    Ok(a / b)
}

pub fn stream_stats(channels: &ChannelMap, v: &[CMatrix], u: &[CMatrix], cfg: &NetworkConfig) -> Result<Vec<StreamStat>> {
    let mut out = Vec::with_capacity(cfg.total_streams());
    for k in 0..cfg.users {
        for d in 0..cfg.streams[k] {
            let sinr = sinr_stream(channels, v, u, cfg, k, d)?;
            out.push(StreamStat { k, d, sinr, rate_bits: (1.0 + sinr).log2() });
        }
    }
    Ok(out)
}

/// Sum of `log₂(1 + SINR)` over all streams, in b/s/Hz.
pub fn sum_rate(channels: &ChannelMap, v: &[CMatrix], u: &[CMatrix], cfg: &NetworkConfig) -> Result<f64> {
    Ok(stream_stats(channels, v, u, cfg)?.iter().map(|s| s.rate_bits).sum())
}

/// Sum rate per unit of radiated power `P·ΣDʲ`.
pub fn energy_efficiency(rate: f64, cfg: &NetworkConfig) -> f64 {
    rate / (cfg.power * cfg.total_streams() as f64)
}

/// First-order approximation `E[A]/E[B]` of the mean SINR over the CSI
/// error, given the estimate `h`.
pub fn mean_sinr_first_order(
    h: &ChannelMap,
    v: &[CMatrix],
    u: &[CMatrix],
    cfg: &NetworkConfig,
    k: usize,
    d: usize,
) -> Result<f64> {
    check_filters(h, v, u, cfg)?;
    let qf = build_qf(k, d, h, v, cfg, cfg.sigma2)?;
    Ok(qf.quotient(&u[k].column(d).into_owned()))
}

/// Monte Carlo mean SINR of every stream (receiver-major order) with the
/// true channel `h + E` and fresh errors `E` of variance `cfg.sigma2` drawn
/// for every link on each of `draws` rounds.
pub fn mean_sinr_numeric_all<R: Rng + ?Sized>(
    h: &ChannelMap,
    v: &[CMatrix],
    u: &[CMatrix],
    cfg: &NetworkConfig,
    draws: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_filters(h, v, u, cfg)?;
    if draws == 0 {
        return Err(Error::InvalidConfig("at least one Monte Carlo draw is required".into()));
    }
    let (n, m) = h.shape();
    let users = cfg.users;
    let columns: Vec<Vec<CVector>> = u
        .iter()
        .map(|uk| uk.column_iter().map(|c| c.into_owned()).collect())
        .collect();
    let norms: Vec<Vec<f64>> = columns
        .iter()
        .map(|cols| cols.iter().map(|c| c.norm_squared()).collect())
        .collect();

    let mut base: Vec<Vec<GainRow>> = Vec::with_capacity(users);
    for k in 0..users {
        base.push(
            columns[k]
                .iter()
                .map(|ud| {
                    let mut row = GainRow::new(cfg);
                    row.fill(h, v, ud, k);
                    row
                })
                .collect(),
        );
    }
    let mut work: Vec<Vec<GainRow>> = (0..users)
        .map(|k| (0..cfg.streams[k]).map(|_| GainRow::new(cfg)).collect())
        .collect();

    // running means, exact when every draw gives the same value
    let mut means = vec![0.0; cfg.total_streams()];
    let mut err = CMatrix::zeros(n, m);
    let mut ev = CVector::zeros(n);
    for draw in 1..=draws {
        for k in 0..users {
            for j in 0..users {
                for r in 0..n {
                    for c in 0..m {
                        err[(r, c)] = complex_gaussian(rng, cfg.sigma2);
                    }
                }
                let offset = base[k][0].offsets[j];
                for (mi, vm) in v[j].column_iter().enumerate() {
                    err.mul_to(&vm, &mut ev);
                    for (d, ud) in columns[k].iter().enumerate() {
                        work[k][d].gains[offset + mi] = base[k][d].gains[offset + mi] + ud.dotc(&ev);
                    }
                }
            }
        }
        let mut idx = 0;
        for k in 0..users {
            for d in 0..cfg.streams[k] {
                let (a, b) = work[k][d].parts(base[k][d].offsets[k] + d, cfg, norms[k][d]);
                means[idx] += (a / b - means[idx]) / draw as f64;
                idx += 1;
            }
        }
    }
    Ok(means)
}

/// Monte Carlo mean SINR of one stream; see [`mean_sinr_numeric_all`].
#[allow(clippy::too_many_arguments)]
pub fn mean_sinr_numeric<R: Rng + ?Sized>(
    h: &ChannelMap,
    v: &[CMatrix],
    u: &[CMatrix],
    cfg: &NetworkConfig,
    k: usize,
    d: usize,
    draws: usize,
    rng: &mut R,
) -> Result<f64> {
    check_index(cfg, k, d)?;
    let flat = cfg.streams[..k].iter().sum::<usize>() + d;
    Ok(mean_sinr_numeric_all(h, v, u, cfg, draws, rng)?[flat])
}

/// `100·(numeric − approx)/numeric`.
pub fn accuracy_alpha(numeric: f64, approx: f64) -> Result<f64> {
    if numeric == 0.0 {
        return Err(Error::DivisionByZero("numeric mean is zero"));
    }
    Ok(100.0 * (numeric - approx) / numeric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamform::initial_filters;
    use crate::rng::{stream, Stream};

    fn one() -> CMatrix {
        CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0))
    }

    #[test]
    fn scalar_network() {
        let cfg = NetworkConfig::new(1, 1, 1, vec![1], 1.0, 1.0, 0.0).unwrap();
        let ch = ChannelMap::from_links(1, vec![one()]).unwrap();
        let sinr = sinr_stream(&ch, &[one()], &[one()], &cfg, 0, 0).unwrap();
        assert_eq!(sinr, 1.0);
        assert_eq!(sum_rate(&ch, &[one()], &[one()], &cfg).unwrap(), 1.0);
    }

    #[test]
    fn orthogonal_filter_gives_zero() {
        let cfg = NetworkConfig::new(2, 2, 2, vec![1, 1], 1.0, 1.0, 0.0).unwrap();
        let c = |re| Complex64::new(re, 0.0);
        let e0 = CMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        let e1 = CMatrix::from_column_slice(2, 1, &[c(0.0), c(1.0)]);
        let only_first = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(0.0)]);
        let ch = ChannelMap::from_links(2, vec![only_first; 4]).unwrap();
        let v = [e0.clone(), e0];
        let sinr = sinr_stream(&ch, &v, &[e1.clone(), e1], &cfg, 0, 0).unwrap();
        assert_eq!(sinr, 0.0);
    }

    #[test]
    fn zero_channels_have_zero_rate() {
        let cfg = NetworkConfig::symmetric(2, 2, 2, 1, 10.0, 1.0, 0.0).unwrap();
        let ch = ChannelMap::from_links(2, vec![CMatrix::zeros(2, 2); 4]).unwrap();
        let bank = initial_filters(&cfg, &mut stream(0, Stream::Filters)).unwrap();
        assert_eq!(sum_rate(&ch, &bank.precoders, &bank.suppressors, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn rate_is_sum_of_streams() {
        let cfg = NetworkConfig::symmetric(2, 3, 4, 2, 10.0, 1.0, 0.1).unwrap();
        let set = ChannelSet::sample(&cfg, 12);
        let bank = initial_filters(&cfg, &mut stream(12, Stream::Filters)).unwrap();
        let stats = stream_stats(&set.truth, &bank.precoders, &bank.suppressors, &cfg).unwrap();
        let total: f64 = stats.iter().map(|s| s.rate_bits).sum();
        let rate = sum_rate(&set.truth, &bank.precoders, &bank.suppressors, &cfg).unwrap();
        assert!((rate - total).abs() < 1e-12);
        assert_eq!(stats.len(), 4);
    }

    #[test]
    fn energy_efficiency_examples() {
        let cfg = NetworkConfig::symmetric(4, 3, 3, 1, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(energy_efficiency(10.0, &cfg), 2.5);
        assert_eq!(energy_efficiency(0.0, &cfg), 0.0);
        let doubled = NetworkConfig { power: 2.0, ..cfg.clone() };
        assert_eq!(energy_efficiency(10.0, &doubled), 1.25);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(accuracy_alpha(2.0, 1.0).unwrap(), 50.0);
        assert_eq!(accuracy_alpha(3.5, 3.5).unwrap(), 0.0);
        assert!(matches!(accuracy_alpha(0.0, 1.0), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn first_order_is_exact_without_error() {
        let cfg = NetworkConfig::symmetric(3, 2, 2, 1, 20.0, 1.0, 0.0).unwrap();
        let set = ChannelSet::sample(&cfg, 5);
        let bank = initial_filters(&cfg, &mut stream(5, Stream::Filters)).unwrap();
        for k in 0..3 {
            let exact = sinr_stream(&set.estimate, &bank.precoders, &bank.suppressors, &cfg, k, 0).unwrap();
            let approx = mean_sinr_first_order(&set.estimate, &bank.precoders, &bank.suppressors, &cfg, k, 0).unwrap();
            assert!((exact - approx).abs() <= 1e-12 * exact.max(1.0));
            let numeric = mean_sinr_numeric(
                &set.estimate,
                &bank.precoders,
                &bank.suppressors,
                &cfg,
                k,
                0,
                7,
                &mut stream(1, Stream::MonteCarlo),
            )
            .unwrap();
            assert_eq!(numeric, exact);
        }
    }

    #[test]
    fn first_order_ignores_filter_scale() {
        let cfg = NetworkConfig::symmetric(3, 2, 2, 1, 10.0, 1.0, 0.1).unwrap();
        let set = ChannelSet::sample(&cfg, 5);
        let bank = initial_filters(&cfg, &mut stream(5, Stream::Filters)).unwrap();
        let scaled: Vec<CMatrix> = bank.suppressors.iter().map(|u| u * Complex64::new(0.0, 3.0)).collect();
        let a = mean_sinr_first_order(&set.estimate, &bank.precoders, &bank.suppressors, &cfg, 1, 0).unwrap();
        let b = mean_sinr_first_order(&set.estimate, &bank.precoders, &scaled, &cfg, 1, 0).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn index_errors() {
        let cfg = NetworkConfig::symmetric(2, 2, 2, 1, 10.0, 1.0, 0.1).unwrap();
        let set = ChannelSet::sample(&cfg, 5);
        let bank = initial_filters(&cfg, &mut stream(5, Stream::Filters)).unwrap();
        let r = sinr_stream(&set.truth, &bank.precoders, &bank.suppressors, &cfg, 2, 0);
        assert!(matches!(r, Err(Error::IndexOutOfRange(_))));
        let r = mean_sinr_numeric_all(&set.truth, &bank.precoders, &bank.suppressors, &cfg, 0, &mut stream(0, Stream::MonteCarlo));
        assert!(r.is_err());
    }
}
