//! Threshold vectors and the bin-indexing quantizer.
//!
//! A [`Thresholds`] value `[0, t_1, ..., t_Q]` splits `[0, t_Q)` into `Q` bins.
//! Bin `r` is the half-open interval `[t_r, t_{r+1})`. Every other module goes
//! through this type to turn test strengths into observed symbols.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quantizer thresholds `[0, t_1, ..., t_Q]`, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Thresholds {
    eta: Vec<u64>,
}

impl Thresholds {
    pub fn new(eta: Vec<u64>) -> Result<Self> {
        if eta.len() < 2 {
            return Err(Error::InvalidThresholds(format!(
                "need at least one bin (2 thresholds), got {}",
                eta.len()
            )));
        }
        if eta[0] != 0 {
            return Err(Error::InvalidThresholds(format!(
                "first threshold must be 0, got {}",
                eta[0]
            )));
        }
        if let Some(i) = (1..eta.len()).find(|&i| eta[i] <= eta[i - 1]) {
            return Err(Error::InvalidThresholds(format!(
                "thresholds must be strictly increasing: t[{}]={} <= t[{}]={}",
                i,
                eta[i],
                i - 1,
                eta[i - 1]
            )));
        }
        Ok(Self { eta })
    }

    /// Equally spaced thresholds `[0, step, 2*step, ..., bins*step]`.
    pub fn uniform(step: u64, bins: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidThresholds("step must be positive".into()));
        }
        Self::new((0..=bins as u64).map(|i| i * step).collect())
    }

    /// Parses a JSON array such as `[0, 3, 6, 9]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<u64> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.eta).expect("integer arrays always serialize")
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.eta
    }

    /// Number of bins `Q`.
    pub fn bins(&self) -> usize {
        self.eta.len() - 1
    }

    /// The top threshold `t_Q`. Every admissible strength is strictly below it.
    pub fn top(&self) -> u64 {
        self.eta[self.eta.len() - 1]
    }

    /// The first nonzero threshold `t_1`.
    pub fn first(&self) -> u64 {
        self.eta[1]
    }

    pub fn quantize(&self, alpha: u64) -> Result<usize> {
        if alpha >= self.top() {
            return Err(Error::OutOfRange {
                value: alpha,
                top: self.top(),
                coordinate: None,
            });
        }
        // eta[0] = 0 <= alpha, so the partition point is at least 1.
        Ok(self.eta.partition_point(|&t| t <= alpha) - 1)
    }

    pub fn quantize_vector(&self, values: &[u64]) -> Result<Vec<usize>> {
        values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                self.quantize(v).map_err(|_| Error::OutOfRange {
                    value: v,
                    top: self.top(),
                    coordinate: Some(k),
                })
            })
            .collect()
    }

    /// `a` lies in a strictly higher bin than `b`.
    pub fn bin_greater(&self, a: u64, b: u64) -> Result<bool> {
        Ok(self.quantize(a)? > self.quantize(b)?)
    }

    /// Lower (inclusive) and upper (exclusive) threshold of bin `r`.
    pub fn bin_bounds(&self, r: usize) -> Result<(u64, u64)> {
        if r >= self.bins() {
            return Err(Error::InvalidBin {
                bin: r,
                bins: self.bins(),
            });
        }
        Ok((self.eta[r], self.eta[r + 1]))
    }

    /// Largest gap among the first `s` thresholds, `max_{1<=i<=s} (t_i - t_{i-1})`.
    pub fn largest_gap(&self, s: usize) -> Result<u64> {
        if s == 0 || s > self.bins() {
            return Err(Error::InvalidInput(format!(
                "gap prefix length {s} not in [1, {}]",
                self.bins()
            )));
        }
        Ok(self.eta[..=s]
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .expect("s >= 1"))
    }

    /// Largest gap over all bins.
    pub fn max_gap(&self) -> u64 {
        self.largest_gap(self.bins()).expect("at least one bin")
    }
}

impl TryFrom<Vec<u64>> for Thresholds {
    type Error = Error;

    fn try_from(eta: Vec<u64>) -> Result<Self> {
        Self::new(eta)
    }
}

impl From<Thresholds> for Vec<u64> {
    fn from(th: Thresholds) -> Self {
        th.eta
    }
}

impl fmt::Display for Thresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Linear scan over the bins. Kept as a reference for [`Thresholds::quantize`].
pub fn quantize_scan(th: &Thresholds, alpha: u64) -> Option<usize> {
    let eta = th.as_slice();
    (0..th.bins()).find(|&r| eta[r] <= alpha && alpha < eta[r + 1])
}
