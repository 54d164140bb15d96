//! Per-mode squeezing entropy for particle creation: `n = sinh² r`, `I = 1 + ln(1 + n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

const CONSISTENCY_TOL: f64 = 1e-9;

fn non_negative<T: Real>(x: T) -> Result<T> {
    if x >= T::zero() {
        Ok(x)
    } else {
        Err(Error::NegativeInput(to_f64(x)))
    }
}

pub fn n_from_r<T: Real>(r: T) -> Result<T> {
    let s = non_negative(r)?.sinh();
    Ok(s * s)
}

pub fn r_from_n<T: Real>(n: T) -> Result<T> {
    Ok(non_negative(n)?.sqrt().asinh())
}

/// `1 + ln(1 + n)`.
pub fn entropy_per_mode<T: Real>(n: T) -> Result<T> {
    Ok(T::one() + non_negative(n)?.ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Mode<T> {
    pub k: T,
    pub r: T,
    pub phi: T,
    pub n: T,
}

impl<T: Real> Mode<T> {
    /// Accepts `r`, `n`, or both; when both are given they must satisfy `n = sinh² r`.
    pub fn new(k: T, r: Option<T>, n: Option<T>, phi: Option<T>) -> Result<Self> {
        let phi = phi.unwrap_or_else(T::zero);
        let (r, n) = match (r, n) {
            (Some(r), Some(n)) => {
                let expected = n_from_r(r)?;
                non_negative(n)?;
                if (expected - n).abs() > lit::<T>(CONSISTENCY_TOL) * (T::one() + n) {
                    return Err(Error::InvalidParams(format!(
                        "mode k = {}: n = {} but sinh^2 r = {}",
                        to_f64(k),
                        to_f64(n),
                        to_f64(expected)
                    )));
                }
                (r, n)
            }
            (Some(r), None) => (r, n_from_r(r)?),
            (None, Some(n)) => (r_from_n(n)?, n),
            (None, None) => return Err(Error::InvalidParams(format!("mode k = {} needs r or n", to_f64(k)))),
        };
        Ok(Self { k, r, phi, n })
    }

    pub fn entropy(&self) -> T {
        T::one() + self.n.ln_1p()
    }

    /// `ΔI = 2 ln cosh r` of the two-mode block.
    pub fn excess(&self) -> T {
        lit::<T>(2.0) * self.r.cosh().ln()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ModeSpectrum<T> {
    pub modes: Vec<Mode<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SpectrumTotals<T> {
    pub excess: T,
    pub particles: T,
}

pub fn spectrum_totals<T: Real>(ms: &ModeSpectrum<T>) -> SpectrumTotals<T> {
    ms.modes.iter().fold(SpectrumTotals { excess: T::zero(), particles: T::zero() }, |acc, m| SpectrumTotals {
        excess: acc.excess + m.excess(),
        particles: acc.particles + m.n,
    })
}

/// `r_k(t) = H t` for every wavenumber.
pub fn de_sitter_schedule<T: Real>(hubble: T, times: &[T], ks: &[T]) -> Result<Vec<(T, ModeSpectrum<T>)>> {
    if !(hubble > T::zero()) {
        return Err(Error::InvalidParams(format!("Hubble rate must be positive, got {}", to_f64(hubble))));
    }
    times
        .iter()
        .map(|&t| {
            let modes = ks.iter().map(|&k| Mode::new(k, Some(hubble * t), None, None)).collect::<Result<Vec<_>>>()?;
            Ok((t, ModeSpectrum { modes }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::two_mode_squeeze;
    use crate::entropy::sw_entropy_from_bogoliubov;
    use approx::assert_relative_eq;

    #[test]
    fn number_squeeze_maps() {
        assert_eq!(n_from_r(0.0f64).unwrap(), 0.0);
        assert_relative_eq!(n_from_r(2.0f64).unwrap(), 13.154_1, epsilon = 1e-4);
        assert_relative_eq!(n_from_r(r_from_n(5.0f64).unwrap()).unwrap(), 5.0, epsilon = 1e-12);
        assert!(matches!(n_from_r(-1.0f64), Err(Error::NegativeInput(_))));
        assert!(matches!(r_from_n(-1.0f64), Err(Error::NegativeInput(_))));
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy_per_mode(0.0f64).unwrap(), 1.0);
        let n = n_from_r(2.0f64).unwrap();
        assert_relative_eq!(entropy_per_mode(n).unwrap(), 1.0 + 2.0 * 2f64.cosh().ln(), epsilon = 1e-12);
        assert_relative_eq!(entropy_per_mode(n).unwrap(), 3.650_005_5, epsilon = 1e-7);
        let mut prev = 0.0;
        for i in 0..50 {
            let e = entropy_per_mode(i as f64 * 0.7).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn agrees_with_two_mode_block() {
        for i in 0..=20 {
            let r = 0.1 * i as f64;
            for phi in [0.0, 0.9, 2.5] {
                let m = Mode::new(1.0, Some(r), None, Some(phi)).unwrap();
                let ex = sw_entropy_from_bogoliubov(&two_mode_squeeze(r, phi).unwrap()).excess;
                assert_relative_eq!(ex, m.excess(), epsilon = 1e-12);
                assert_relative_eq!(m.entropy() - 1.0, 2.0 * r.cosh().ln(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mode_input_consistency() {
        let r = 1.3f64;
        assert!(Mode::new(1.0, Some(r), Some(r.sinh().powi(2)), None).is_ok());
        assert!(Mode::new(1.0, Some(r), Some(1.0), None).is_err());
        assert!(Mode::<f64>::new(1.0, None, None, None).is_err());
        assert_relative_eq!(Mode::new(2.0, None, Some(3.0f64), None).unwrap().r, 3f64.sqrt().asinh());
    }

    #[test]
    fn totals() {
        let empty = spectrum_totals(&ModeSpectrum::<f64>::default());
        assert_eq!((empty.excess, empty.particles), (0.0, 0.0));
        let one = ModeSpectrum { modes: vec![Mode::new(1.0, Some(1.0f64), None, None).unwrap()] };
        let t = spectrum_totals(&one);
        assert_relative_eq!(t.excess, 2.0 * 1f64.cosh().ln(), epsilon = 1e-15);
        assert_relative_eq!(t.particles, 1f64.sinh().powi(2), epsilon = 1e-15);
        let other = ModeSpectrum { modes: vec![Mode::new(3.0, None, Some(4.0f64), None).unwrap()] };
        let both = ModeSpectrum { modes: [one.modes.clone(), other.modes.clone()].concat() };
        let tb = spectrum_totals(&both);
        assert_relative_eq!(tb.excess, t.excess + spectrum_totals(&other).excess, epsilon = 1e-14);
    }

    #[test]
    fn de_sitter_growth() {
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let series = de_sitter_schedule(1.0, &times, &[0.5, 1.0, 2.0]).unwrap();
        assert!(series[0].1.modes.iter().all(|m| m.r == 0.0));
        let at3 = &series[12].1.modes[0];
        assert_relative_eq!(at3.entropy(), 1.0 + 2.0 * 3f64.cosh().ln(), epsilon = 1e-12);
        assert_relative_eq!(at3.entropy(), 5.618_657, epsilon = 1e-6);
        let (t1, s1) = &series[36];
        let (t2, s2) = &series[40];
        let slope = (s2.modes[1].entropy() - s1.modes[1].entropy()) / (t2 - t1);
        assert!((slope / 2.0 - 1.0).abs() < 0.01);
        assert!(de_sitter_schedule(0.0, &times, &[1.0]).is_err());
    }

    #[test]
    fn works_in_f32() {
        let m = Mode::new(1.0f32, Some(0.5), None, None).unwrap();
        assert!((m.entropy() - (1.0 + 0.5f32.cosh().powi(2).ln())).abs() < 1e-6);
    }
}
