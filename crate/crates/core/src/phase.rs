//! Unit exponentials `e(x) = exp(2πix)` with exact phase reduction.
//!
//! A double `α ∈ [0, 1)` is the dyadic rational `m / 2^K`, so `frac(n·α)` can
//! be reduced exactly in 128-bit integer arithmetic before it touches `sin`
//! and `cos`. Multiplying first in floating point would cost `log₂ n` bits of
//! phase accuracy, which matters once `n` reaches `10⁶` and beyond.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// `x mod 1` in `[0, 1)`.
pub fn reduce_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn decompose(x: f64) -> (u64, i32) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    }
}

/// `α mod 1` held as `m / 2^k`, for repeated `frac(n·α)`.
#[derive(Debug, Clone, Copy)]
pub struct DyadicPhase {
    alpha: f64,
    m: u128,
    k: i32,
    scale: f64,
}

impl DyadicPhase {
    pub fn new(alpha: f64) -> Self {
        let alpha = reduce_unit(alpha);
        if alpha == 0.0 {
            return DyadicPhase { alpha, m: 0, k: 0, scale: 1.0 };
        }
        let (m, e) = decompose(alpha);
        let k = -e;
        let shift = (m.trailing_zeros() as i32).min(k);
        let k = k - shift;
        DyadicPhase {
            alpha,
            m: (m >> shift) as u128,
            k,
            scale: if k <= 127 { 2f64.powi(-k) } else { 0.0 },
        }
    }

    /// The reduced `α`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `frac(n·α)`, exact up to the final rounding.
    #[inline]
    pub fn frac(&self, n: u64) -> f64 {
        if self.k <= 0 || n == 0 {
            return 0.0;
        }
        if self.k > 127 {
            // α < 2⁻⁷⁵, so n·α < 1 and the product is already the fractional part.
            return n as f64 * self.alpha;
        }
        let r = (n as u128 * self.m) & ((1u128 << self.k) - 1);
        let v = r as f64 * self.scale;
        if v >= 1.0 {
            0.0
        } else {
            v
        }
    }

    /// `e(n·α)`.
    #[inline]
    pub fn e(&self, n: u64) -> Complex64 {
        e(self.frac(n))
    }
}

/// `frac(n·α)` for `α` reduced mod 1, computed without losing the bits of `n`.
pub fn frac_mul(n: u64, alpha: f64) -> f64 {
    DyadicPhase::new(alpha).frac(n)
}

/// `e(x) = exp(2πix)`, reducing `x` to `[-1/2, 1/2]` first.
pub fn e(x: f64) -> Complex64 {
    let r = x - x.round();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `e(n·α)` with the phase reduced exactly.
pub fn e_mul(n: u64, alpha: f64) -> Complex64 {
    e(frac_mul(n, alpha))
}

/// `e(n·α)` for a signed integer `n`.
pub fn e_mul_signed(n: i64, alpha: f64) -> Complex64 {
    let z = e_mul(n.unsigned_abs(), alpha);
    if n < 0 {
        z.conj()
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_unit_wraps_negatives() {
        assert_eq!(reduce_unit(0.25), 0.25);
        assert_eq!(reduce_unit(-0.25), 0.75);
        assert_eq!(reduce_unit(3.5), 0.5);
        assert_eq!(reduce_unit(-1.0), 0.0);
    }

    #[test]
    fn frac_mul_matches_exact_dyadics() {
        assert_eq!(frac_mul(3, 0.5), 0.5);
        assert_eq!(frac_mul(4, 0.5), 0.0);
        assert_eq!(frac_mul(5, 0.375), 0.875);
        assert_eq!(frac_mul(0, 0.123), 0.0);
        // 1/3 as a double times 3 is 1 - 2^-54, not 0.
        let x = frac_mul(3, 1.0 / 3.0);
        assert!(x > 0.999_999_999_999 || x < 1e-15);
    }

    #[test]
    fn frac_mul_keeps_precision_for_large_n() {
        let alpha = 0.1234567;
        let n = 1_000_000_007u64;
        let got = frac_mul(n, alpha);
        // reference through a two-term split of n; both products are exact-ish
        let hi = 1_000_000_000u64;
        let lo = n - hi;
        let r = frac_mul(hi, alpha) + frac_mul(lo, alpha);
        let d = got - r;
        assert!((d - d.round()).abs() < 1e-12);
    }

    #[test]
    fn tiny_alpha_falls_back_to_product() {
        let alpha = 1e-30;
        assert_eq!(frac_mul(1000, alpha), 1000.0 * alpha);
    }

    #[test]
    fn unit_exponential_values() {
        let z = e(0.25);
        assert!((z.re).abs() < 1e-15 && (z.im - 1.0).abs() < 1e-15);
        let z = e(7.5);
        assert!((z.re + 1.0).abs() < 1e-15);
        assert!((e_mul_signed(-3, 0.25) - e(0.25)).norm() < 1e-15);
    }
}
