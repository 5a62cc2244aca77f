//! Bessel functions of the first kind.
//!
//! Parametric modulation with index β turns a static exchange coupling `g`
//! into a resonant coupling `J₁(β)·g`; these functions are used to calibrate
//! modulation indices and to build effective Hamiltonians.

use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

/// Largest supported |β|.
pub const MAX_ARGUMENT: f64 = 20.0;

/// Location of the first maximum of `J₁`.
pub const J1_PEAK_ARGUMENT: f64 = 1.841_183_781_340_659_3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesselError {
    /// |β| beyond [`MAX_ARGUMENT`].
    OutOfRange { beta: f64 },
    /// `J₁(β) = value` has no solution on the rising branch `[0, 1.8412]`.
    Unreachable { value: f64 },
}

impl fmt::Display for BesselError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutOfRange { beta } => {
                write!(f, "Bessel argument {beta} outside supported range |β| ≤ {MAX_ARGUMENT}")
            }
            Self::Unreachable { value } => {
                write!(f, "J1(β) = {value} has no solution below the first maximum")
            }
        }
    }
}

impl core::error::Error for BesselError {}

/// `J_m(β)` for integer order `m ≥ 0`.
///
/// Miller's backward recurrence normalised with `J₀ + 2ΣJ_{2k} = 1`; the
/// absolute error is at the 1e-15 level over the supported range.
pub fn bessel_j(m: u32, beta: f64) -> Result<f64, BesselError> {
    if !beta.is_finite() || beta.abs() > MAX_ARGUMENT {
        return Err(BesselError::OutOfRange { beta });
    }
    let x = beta.abs();
    if x == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    let order = m as usize;
    let reach = (order as f64).max(x);
    let mut start = (reach + 20.0 + (50.0 * reach).sqrt()) as usize;
    start += start % 2;

    let mut next = 0.0f64; // J_{k+1}
    let mut current = 1e-300f64; // J_k
    let mut norm = 0.0f64;
    let mut wanted = 0.0f64;
    for k in (1..=start).rev() {
        let previous = (2.0 * k as f64 / x) * current - next;
        next = current;
        current = previous;
        // rescale to avoid overflow
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
        let index = k - 1;
        if index == order {
            wanted = current;
        }
        if index > 0 && index % 2 == 0 {
            norm += 2.0 * current;
        }
    }
    norm += current;
    let value = wanted / norm;
    let sign = if beta < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sign * value)
}

/// Smallest β ≥ 0 with `J₁(β) = value`, for `0 ≤ value ≤ J₁(1.8412)`.
pub fn invert_j1(value: f64) -> Result<f64, BesselError> {
    let peak = bessel_j(1, J1_PEAK_ARGUMENT)?;
    if !(0.0..=peak).contains(&value) {
        return Err(BesselError::Unreachable { value });
    }
    if value == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, J1_PEAK_ARGUMENT);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j(1, mid)? < value {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ascending series; accurate for small arguments only.
    fn series(m: u32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(m as i32);
        for k in 1..=m {
            term /= k as f64;
        }
        let mut sum = term;
        for k in 1..60 {
            term *= -(0.25 * x * x) / (k as f64 * (k + m) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j1_at_modulation_index() {
        let v = bessel_j(1, 1.6).unwrap();
        assert!((v - 0.569896).abs() < 5e-7, "{v}");
        assert!((v - series(1, 1.6)).abs() < 1e-14);
    }

    #[test]
    fn odd_orders_are_odd() {
        for m in 0..5u32 {
            let a = bessel_j(m, 2.3).unwrap();
            let b = bessel_j(m, -2.3).unwrap();
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            assert!((a - sign * b).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(bessel_j(1, 20.5), Err(BesselError::OutOfRange { .. })));
        assert!(bessel_j(1, f64::NAN).is_err());
        assert!(bessel_j(3, -20.0).is_ok());
    }

    #[test]
    fn inverse_round_trip() {
        let g = bessel_j(1, 1.6).unwrap();
        let beta = invert_j1(g).unwrap();
        assert!((beta - 1.6).abs() < 1e-12, "{beta}");
        assert_eq!(invert_j1(0.0).unwrap(), 0.0);
        assert!(matches!(invert_j1(0.7), Err(BesselError::Unreachable { .. })));
    }
}
