//! Shared fixtures for the benchmarks.

use mimo_ic::beamform::{self, AlgoOptions};
use mimo_ic::rng::{stream, Stream};
use mimo_ic::{ChannelSet, FilterBank, NetworkConfig};

/// Symmetric network `(MxN,D)^K` with unit noise and its sampled channels.
pub fn fixture(users: usize, m: usize, n: usize, d: usize, snr_db: f64, sigma2: f64, seed: u64) -> (NetworkConfig, ChannelSet) {
    let cfg = NetworkConfig::symmetric(users, m, n, d, snr_db, 1.0, sigma2).expect("valid fixture");
    let set = ChannelSet::sample(&cfg, seed);
    (cfg, set)
}

/// Filters designed by the proposed algorithm on the estimated channel.
pub fn designed(cfg: &NetworkConfig, set: &ChannelSet, seed: u64) -> FilterBank {
    beamform::run(&set.estimate, cfg, &AlgoOptions::default(), &mut stream(seed, Stream::Filters))
        .expect("design runs")
        .0
}
