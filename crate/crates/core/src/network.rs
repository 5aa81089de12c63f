//! Network configuration, channel sampling and the TDD-reciprocal view.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{complex_gaussian, CMatrix};
use crate::rng::{self, SimRng, Stream};
use crate::{Error, Result};

/// Dimensions, powers and CSI error level of a K-user interference network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// K, number of transmitter/receiver pairs.
    pub users: usize,
    /// M, antennas per transmitter.
    pub tx_antennas: usize,
    /// N, antennas per receiver.
    pub rx_antennas: usize,
    /// Data streams of each user.
    pub streams: Vec<usize>,
    /// Transmit power per stream (linear).
    pub power: f64,
    /// Receiver noise power (linear).
    pub noise: f64,
    /// Variance of each complex CSI error entry.
    pub sigma2: f64,
}

impl NetworkConfig {
    pub fn new(
        users: usize,
        tx_antennas: usize,
        rx_antennas: usize,
        streams: Vec<usize>,
        power: f64,
        noise: f64,
        sigma2: f64,
    ) -> Result<Self> {
        let cfg = Self { users, tx_antennas, rx_antennas, streams, power, noise, sigma2 };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Symmetric network with `streams` per user and `P = N0·10^(snr_db/10)`.
    pub fn symmetric(
        users: usize,
        tx_antennas: usize,
        rx_antennas: usize,
        streams: usize,
        snr_db: f64,
        noise: f64,
        sigma2: f64,
    ) -> Result<Self> {
        Self::new(
            users,
            tx_antennas,
            rx_antennas,
            vec![streams; users],
            snr_to_power(snr_db, noise),
            noise,
            sigma2,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.users == 0 {
            return bad("at least one user is required".into());
        }
        if self.tx_antennas == 0 || self.rx_antennas == 0 {
            return bad("antenna counts must be positive".into());
        }
        if self.streams.len() != self.users {
            return bad(format!(
                "{} stream counts given for {} users",
                self.streams.len(),
                self.users
            ));
        }
        let cap = self.tx_antennas.min(self.rx_antennas);
        if let Some((k, &d)) = self.streams.iter().enumerate().find(|(_, &d)| d == 0 || d > cap) {
            return bad(format!("user {k} has {d} streams, allowed 1..={cap}"));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return bad(format!("power must be positive and finite, got {}", self.power));
        }
        if !(self.noise > 0.0 && self.noise.is_finite()) {
            return bad(format!("noise power must be positive and finite, got {}", self.noise));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return bad(format!("error variance must be non-negative, got {}", self.sigma2));
        }
        Ok(())
    }

    pub fn total_streams(&self) -> usize {
        self.streams.iter().sum()
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.power / self.noise).log10()
    }

    /// Configuration of the reciprocal network: transmitters and receivers
    /// swap roles, so the antenna counts swap while every user keeps its
    /// stream count.
    pub fn reversed(&self) -> Self {
        Self {
            tx_antennas: self.rx_antennas,
            rx_antennas: self.tx_antennas,
            ..self.clone()
        }
    }

    pub fn with_sigma2(&self, sigma2: f64) -> Self {
        Self { sigma2, ..self.clone() }
    }
}

pub fn snr_to_power(snr_db: f64, noise: f64) -> f64 {
    noise * 10f64.powf(snr_db / 10.0)
}

/// One matrix per (receiver, transmitter) link, all of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMap {
    users: usize,
    links: Vec<CMatrix>,
}

impl ChannelMap {
    /// Builds a map from `links[k * users + j]`, the channel from transmitter
    /// `j` to receiver `k`.
    pub fn from_links(users: usize, links: Vec<CMatrix>) -> Result<Self> {
        if users == 0 || links.len() != users * users {
            return Err(Error::DimensionMismatch(format!(
                "{} links for {users} users",
                links.len()
            )));
        }
        let shape = links[0].shape();
        if shape.0 == 0 || shape.1 == 0 || links.iter().any(|m| m.shape() != shape) {
            return Err(Error::DimensionMismatch("links must share one non-empty shape".into()));
        }
        Ok(Self { users, links })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// (receive antennas, transmit antennas) of every link.
    pub fn shape(&self) -> (usize, usize) {
        self.links[0].shape()
    }

    /// Channel from transmitter `tx` to receiver `rx`.
    pub fn link(&self, rx: usize, tx: usize) -> &CMatrix {
        &self.links[rx * self.users + tx]
    }

    pub fn links(&self) -> impl Iterator<Item = ((usize, usize), &CMatrix)> {
        self.links
            .iter()
            .enumerate()
            .map(move |(i, m)| ((i / self.users, i % self.users), m))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        Self {
            users: self.users,
            links: self.links.iter().zip(&other.links).map(|(a, b)| op(a, b)).collect(),
        }
    }

    /// The reciprocal network: link `(j, k)` of the result is the plain
    /// transpose (no conjugation) of link `(k, j)` here.
    pub fn reciprocal(&self) -> Self {
        let k = self.users;
        let links = (0..k * k)
            .map(|i| self.link(i % k, i / k).transpose())
            .collect();
        Self { users: k, links }
    }

    fn to_nested(&self) -> Vec<Vec<Vec<Vec<[f64; 2]>>>> {
        (0..self.users)
            .map(|rx| {
                (0..self.users)
                    .map(|tx| {
                        let m = self.link(rx, tx);
                        (0..m.nrows())
                            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn from_nested(nested: &[Vec<Vec<Vec<[f64; 2]>>>]) -> Result<Self> {
        let users = nested.len();
        let mut links = Vec::with_capacity(users * users);
        for row in nested {
            if row.len() != users {
                return Err(Error::Io("link map is not square".into()));
            }
            for m in row {
                let rows = m.len();
                let cols = m.first().map_or(0, Vec::len);
                if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
                    return Err(Error::Io("ragged or empty channel matrix".into()));
                }
                links.push(CMatrix::from_row_iterator(
                    rows,
                    cols,
                    m.iter().flatten().map(|&[re, im]| Complex64::new(re, im)),
                ));
            }
        }
        Self::from_links(users, links)
    }
}

/// True channels `G`, estimation errors `E` and estimates `H = G − E`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub truth: ChannelMap,
    pub error: ChannelMap,
    pub estimate: ChannelMap,
}

/// Sampled entries live on this grid so that sums and differences of
/// channel, error and estimate entries are exact in `f64`.
const GRID: f64 = (1u64 << 44) as f64;

fn snap(z: Complex64) -> Complex64 {
    Complex64::new((z.re * GRID).round() / GRID, (z.im * GRID).round() / GRID)
}

fn sample_map<R: Rng + ?Sized>(rng: &mut R, users: usize, rows: usize, cols: usize, var: f64) -> ChannelMap {
    let scale = var.sqrt();
    let links = (0..users * users)
        .map(|_| {
            CMatrix::from_row_iterator(
                rows,
                cols,
                (0..rows * cols).map(|_| snap(complex_gaussian(rng, 1.0) * scale)),
            )
        })
        .collect();
    ChannelMap { users, links }
}

impl ChannelSet {
    /// Draws the true channels with unit-variance CN entries, the errors
    /// with variance `sigma2` from an independent stream, and sets
    /// `H = G − E`.
    pub fn sample(cfg: &NetworkConfig, seed: u64) -> Self {
        Self::sample_with(
            cfg,
            &mut rng::stream(seed, Stream::Channels),
            &mut rng::stream(seed, Stream::Errors),
        )
    }

    pub fn sample_with(cfg: &NetworkConfig, channels: &mut SimRng, errors: &mut SimRng) -> Self {
        let (k, n, m) = (cfg.users, cfg.rx_antennas, cfg.tx_antennas);
        let truth = sample_map(channels, k, n, m, 1.0);
        let error = sample_map(errors, k, n, m, cfg.sigma2);
        let estimate = truth.zip_with(&error, |g, e| g - e);
        Self { truth, error, estimate }
    }

    pub fn to_json(&self, cfg: &NetworkConfig, seed: u64) -> String {
        let dump = ChannelDump {
            config: cfg.clone(),
            seed,
            g: self.truth.to_nested(),
            e: self.error.to_nested(),
            h: self.estimate.to_nested(),
        };
        serde_json::to_string(&dump).expect("channel dump serializes")
    }

    pub fn from_json(text: &str) -> Result<(Self, NetworkConfig, u64)> {
        let dump: ChannelDump = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        dump.config.validate()?;
        let set = Self {
            truth: ChannelMap::from_nested(&dump.g)?,
            error: ChannelMap::from_nested(&dump.e)?,
            estimate: ChannelMap::from_nested(&dump.h)?,
        };
        let want = (dump.config.rx_antennas, dump.config.tx_antennas);
        for map in [&set.truth, &set.error, &set.estimate] {
            if map.users() != dump.config.users || map.shape() != want {
                return Err(Error::Io("channel dimensions disagree with config".into()));
            }
        }
        Ok((set, dump.config, dump.seed))
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelDump {
    config: NetworkConfig,
    seed: u64,
    #[serde(rename = "G")]
    g: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(rename = "E")]
    e: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(rename = "H")]
    h: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}
