use std::fmt;
use std::str::FromStr;

use mimo_ic::NetworkConfig;

use crate::{invalid, RunError};

/// Network dimensions written `(MxN,D)^K`: K users, M transmit and N receive
/// antennas, D streams per user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub users: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub streams: usize,
}

impl Scenario {
    pub const fn new(users: usize, tx_antennas: usize, rx_antennas: usize, streams: usize) -> Self {
        Self { users, tx_antennas, rx_antennas, streams }
    }

    /// Configuration at a given SNR (dB) with the noise power fixed to one.
    pub fn config(&self, snr_db: f64, sigma2: f64) -> Result<NetworkConfig, RunError> {
        Ok(NetworkConfig::symmetric(
            self.users,
            self.tx_antennas,
            self.rx_antennas,
            self.streams,
            snr_db,
            1.0,
            sigma2,
        )?)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}x{},{})^{}", self.tx_antennas, self.rx_antennas, self.streams, self.users)
    }
}

impl FromStr for Scenario {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || invalid(format!("scenario {s:?} is not of the form (MxN,D)^K"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let rest = compact.strip_prefix('(').ok_or_else(bad)?;
        let (inner, users) = rest.split_once(")^").ok_or_else(bad)?;
        let (antennas, streams) = inner.split_once(',').ok_or_else(bad)?;
        let (tx, rx) = antennas.split_once(['x', 'X', '×']).ok_or_else(bad)?;
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let scenario = Scenario::new(num(users)?, num(tx)?, num(rx)?, num(streams)?);
        if scenario.users == 0
            || scenario.streams == 0
            || scenario.streams > scenario.tx_antennas.min(scenario.rx_antennas)
        {
            return Err(invalid(format!("scenario {s} has invalid dimensions")));
        }
        Ok(scenario)
    }
}
