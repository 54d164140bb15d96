//! Units and the coherent-state family that defines the phase-space metric.
//!
//! The coherent family is the isotropic, factorised Gaussian with position
//! variance `2ħσ²` and momentum variance `ħ/(8σ²)` per mode, so that the
//! oscillator ground state with `σ² = 1/(4mω)` is a member of the family.
//! Entropies use the phase-space measure `dq dp / (2πħ)` per mode, natural log.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Conventions<T> {
    pub hbar: T,
    pub sigma2: T,
}

impl<T: Real> Default for Conventions<T> {
    fn default() -> Self {
        Self { hbar: T::one(), sigma2: lit(0.25) }
    }
}

impl<T: Real> Conventions<T> {
    pub fn new(hbar: T, sigma2: T) -> Result<Self> {
        let conv = Self { hbar, sigma2 };
        conv.validate()?;
        Ok(conv)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > T::zero()) {
            return Err(Error::InvalidConventions(format!("hbar must be > 0, got {:?}", self.hbar)));
        }
        if !(self.sigma2 > T::zero()) {
            return Err(Error::InvalidConventions(format!("sigma2 must be > 0, got {:?}", self.sigma2)));
        }
        Ok(())
    }

    /// Same ħ, different family width.
    pub fn with_sigma2(&self, sigma2: T) -> Self {
        Self { hbar: self.hbar, sigma2 }
    }

    /// Family width matched to an oscillator of mass `m`, frequency `omega`.
    pub fn matched(hbar: T, mass: T, omega: T) -> Self {
        Self { hbar, sigma2: T::one() / (lit::<T>(4.0) * mass * omega) }
    }

    pub fn coherent_position_variance(&self) -> T {
        lit::<T>(2.0) * self.hbar * self.sigma2
    }

    pub fn coherent_momentum_variance(&self) -> T {
        self.hbar / (lit::<T>(8.0) * self.sigma2)
    }

    /// Scale taking the dimensionless quadrature X (vacuum variance 1/2) to position.
    pub fn position_scale(&self) -> T {
        lit::<T>(2.0) * (self.hbar * self.sigma2).sqrt()
    }

    /// Scale taking the dimensionless quadrature P to momentum; `position_scale * momentum_scale = ħ`.
    pub fn momentum_scale(&self) -> T {
        self.hbar / self.position_scale()
    }

    /// Wigner covariance of a coherent state, `(q..., p...)` ordering.
    pub fn coherent_covariance(&self, n: usize) -> DMatrix<T> {
        let mut diag = DVector::from_element(2 * n, self.coherent_position_variance());
        for i in 0..n {
            diag[n + i] = self.coherent_momentum_variance();
        }
        DMatrix::from_diagonal(&diag)
    }

    /// `2πħ`, the phase-space volume of one state per mode.
    pub fn cell_quantum(&self) -> T {
        T::two_pi() * self.hbar
    }
}
