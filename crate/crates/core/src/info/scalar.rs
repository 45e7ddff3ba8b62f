use crate::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Prob(f64);

impl Prob {
    pub const ZERO: Prob = Prob(0.0);
    pub const HALF: Prob = Prob(0.5);
    pub const ONE: Prob = Prob(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Prob(p))
        } else {
            Err(Error::Domain { what: "probability", value: p })
        }
    }

    #[inline]
    pub const fn get(self) -> f64 {
        self.0
    }

    /// Binary convolution `self ⋆ other`.
    #[inline]
    pub fn star(self, other: Prob) -> Prob {
        Prob(starf(self.0, other.0))
    }
}

impl TryFrom<f64> for Prob {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Prob::new(p)
    }
}

impl From<Prob> for f64 {
    fn from(p: Prob) -> f64 {
        p.0
    }
}

/// Binary entropy in bits, with `0 log 0 = 0`.
#[inline]
pub fn h2(p: Prob) -> f64 {
    h2f(p.0)
}

/// Binary convolution `a + b - 2ab`: the crossover of two cascaded BSCs.
#[inline]
pub fn star(a: Prob, b: Prob) -> Prob {
    a.star(b)
}

const H2_INV_TOL: f64 = 1e-12;
const H2_INV_MAX_ITER: usize = 200;

/// Inverse of [`h2`] restricted to `[0, 1/2]`, by bisection.
pub fn h2_inv(y: f64) -> Result<Prob> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain { what: "binary entropy value", value: y });
    }
    if y == 0.0 {
        return Ok(Prob::ZERO);
    }
    if y == 1.0 {
        return Ok(Prob::HALF);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..H2_INV_MAX_ITER {
        if hi - lo <= H2_INV_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h2f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Prob(0.5 * (lo + hi)))
}

/// Capacity of a Gaussian channel at the given SNR, `log2(1 + snr) / 2`.
pub fn gauss_cap(snr: f64) -> Result<f64> {
    if snr >= 0.0 {
        Ok(capf(snr))
    } else {
        Err(Error::Domain { what: "SNR", value: snr })
    }
}

#[inline]
pub(crate) fn h2f(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * libm::log2(p) - (1.0 - p) * libm::log2(1.0 - p)
    }
}

#[inline]
pub(crate) fn starf(a: f64, b: f64) -> f64 {
    a + b - 2.0 * a * b
}

#[inline]
pub(crate) fn capf(snr: f64) -> f64 {
    0.5 * libm::log2(1.0 + snr)
}

/// `p log2 p` with the continuity convention at zero.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * libm::log2(p)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(x: f64) -> Prob {
        Prob::new(x).unwrap()
    }

    #[test]
    fn h2_values() {
        assert_eq!(h2(Prob::ZERO), 0.0);
        assert_eq!(h2(Prob::ONE), 0.0);
        assert_abs_diff_eq!(h2(Prob::HALF), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h2(p(0.01)), 0.080793, epsilon = 1e-6);
        assert_abs_diff_eq!(h2(p(0.05)), 0.286397, epsilon = 1e-6);
    }

    #[test]
    fn prob_rejects_out_of_range() {
        assert!(Prob::new(-1e-9).is_err());
        assert!(Prob::new(1.0 + 1e-9).is_err());
        assert!(Prob::new(f64::NAN).is_err());
    }

    #[test]
    fn h2_inv_values() {
        assert_eq!(h2_inv(0.0).unwrap(), Prob::ZERO);
        assert_eq!(h2_inv(1.0).unwrap(), Prob::HALF);
        assert_abs_diff_eq!(h2_inv(0.5).unwrap().get(), 0.110028, epsilon = 1e-6);
        assert!(h2_inv(1.5).is_err());
        assert!(h2_inv(-0.1).is_err());
    }

    #[test]
    fn star_values() {
        for a in [0.0, 0.3, 0.5] {
            assert_abs_diff_eq!(star(p(a), Prob::ZERO).get(), a, epsilon = 1e-15);
            assert_abs_diff_eq!(star(p(a), Prob::HALF).get(), 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(star(p(0.05), p(0.01)).get(), 0.059, epsilon = 1e-15);
    }

    #[test]
    fn gauss_cap_values() {
        assert_eq!(gauss_cap(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(gauss_cap(1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(gauss_cap(8.0).unwrap(), 1.584963, epsilon = 1e-6);
        assert!(gauss_cap(-0.5).is_err());
    }
}
