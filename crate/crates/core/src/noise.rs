//! Computational-basis dephasing of stored clusters.
//!
//! Single-qubit channel with Kraus operators `K1 = diag(1, sqrt(1-p))` and
//! `K2 = diag(0, sqrt(p))`. Storing a `q`-qubit cluster applies it to every
//! qubit independently, which damps the density-matrix entry `(i, j)` by
//! `sqrt(1-p)^popcount(i ^ j)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::cluster::ClusterChain;
use crate::densmat::{apply_local, CMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Dephasing strength `p` in `[0, 1]`.
#[derive(Copy, Clone, Debug, PartialEq, PartialOrd, Serialize)]
pub struct DephasingStrength(f64);

impl DephasingStrength {
    pub const ZERO: Self = Self(0.0);
    pub const FULL: Self = Self(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::StrengthOutOfRange(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - p`, the surviving coherence squared.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }

    /// Strength of applying `self` and then `other`: `1 - (1-p)(1-p')`.
    pub fn then(self, other: Self) -> Self {
        Self(1.0 - self.complement() * other.complement())
    }
}

impl TryFrom<f64> for DephasingStrength {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

pub fn dephasing_kraus(p: DephasingStrength) -> [CMatrix; 2] {
    let c = |x: f64| Complex64::new(x, 0.0);
    let k1 = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(p.complement().sqrt())]);
    let k2 = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(p.value().sqrt())]);
    [k1, k2]
}

/// Dephases every qubit of a raw state, one qubit at a time.
pub fn dephase_state(rho: &DensityMatrix, p: DephasingStrength) -> DensityMatrix {
    if p.value() == 0.0 {
        return rho.clone();
    }
    let ops = dephasing_kraus(p);
    (1..=rho.qubits()).fold(rho.clone(), |acc, k| {
        apply_local(&acc, k, &ops).expect("single-qubit dephasing fits any register")
    })
}

pub fn dephase_all(chain: &ClusterChain, p: DephasingStrength) -> ClusterChain {
    chain.with_state(dephase_state(chain.state(), p))
}

/// `p = 1 - exp(-kappa * tau)`.
pub fn time_to_strength(kappa: f64, tau: f64) -> Result<DephasingStrength> {
    for (name, value) in [("decay rate", kappa), ("storage time", tau)] {
        if value.is_nan() || value < 0.0 {
            return Err(Error::NegativeInput { name, value });
        }
    }
    let rate = kappa * tau;
    // 0 * inf: no time elapsed, or no decay
    if rate.is_nan() {
        return Ok(DephasingStrength::ZERO);
    }
    DephasingStrength::new(-(-rate).exp_m1())
}
