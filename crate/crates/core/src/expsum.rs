//! Exponential sums weighted by `d₂(n)` or by a digit-set indicator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::digitset::{lambda, DigitSet};
use crate::error::{Error, Result};
use crate::ntheory::SieveTable;
use crate::phase::{self, e, e_mul, reduce_unit};
use crate::sum::{sum_f64, ComplexSum, NeumaierSum};

/// Phase recurrences are re-anchored to an exact exponential this often.
pub const REANCHOR_EVERY: u64 = 1 << 10;

/// Minimum trapezoid nodes per oscillation of the fastest phase `e(α g^k)`.
pub const L1_NODES_PER_OSCILLATION: u64 = 32;

const L1_CHUNK: usize = 4096;

/// A frequency and the value of a sum there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub alpha: f64,
    pub value: Complex64,
}

/// `S₂(α; X, X+H) = Σ_{n=X}^{X+H} d₂(n) e(nα)`.
///
/// Phases advance by one complex multiplication per term and snap back to
/// `e(nα)` every [`REANCHOR_EVERY`] terms; accumulation is compensated.
pub fn expsum_divisor(alpha: f64, x: u64, h: u64, table: &SieveTable) -> Result<Complex64> {
    let hi = x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    let values = table.slice(x, hi)?;
    Ok(weighted_sum(alpha, x, values))
}

/// `Σ_i w_i e((start + i)α)` with the recurrence/re-anchor scheme.
pub fn weighted_sum(alpha: f64, start: u64, weights: &[i64]) -> Complex64 {
    let alpha = reduce_unit(alpha);
    let step = e(alpha);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = ComplexSum::new();
    for (i, &w) in weights.iter().enumerate() {
        if i as u64 % REANCHOR_EVERY == 0 {
            z = e_mul(start + i as u64, alpha);
        }
        acc.add(z * w as f64);
        z *= step;
    }
    acc.value()
}

/// `Σ_{n ∈ (lo, hi]*} e(nα)`, term by term.
pub fn expsum_digitset_direct(ds: &DigitSet, alpha: f64, lo: u64, hi: u64) -> Complex64 {
    let phase = phase::DyadicPhase::new(alpha);
    let mut acc = ComplexSum::new();
    ds.for_each_in(lo, hi, |n| acc.add(phase.e(n)));
    acc.value()
}

/// `Σ_{d ≠ b} e(dθ)`, one factor of the digit product.
#[inline]
pub fn digit_factor(ds: &DigitSet, theta: f64) -> Complex64 {
    let w = e(theta);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 0..ds.base() {
        if d != ds.excluded() {
            acc += z;
        }
        z *= w;
    }
    acc
}

/// `B_j(α) = Π_{t<j} Σ_{d≠b} e(α d g^t)` for `j = 0..=k`.
fn block_products(ds: &DigitSet, alpha: f64, k: u32) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(Complex64::new(1.0, 0.0));
    let mut gj = 1u64;
    for t in 0..k {
        let theta = phase::frac_mul(gj, alpha);
        let next = out[t as usize] * digit_factor(ds, theta);
        out.push(next);
        if t + 1 < k {
            gj = gj.checked_mul(ds.base()).ok_or(Error::Overflow("g^k"))?;
        }
    }
    Ok(out)
}

/// `Σ_{n ∈ [0, g^k), no digit b} e(nα)` through the digit-product formula.
pub fn expsum_digitset_block(ds: &DigitSet, alpha: f64, k: u32) -> Result<Complex64> {
    ds.pow(k)?;
    let alpha = reduce_unit(alpha);
    Ok(*block_products(ds, alpha, k)?.last().expect("k + 1 entries"))
}

/// `Σ_{n ∈ (0, H]*} e(nα)` in `O(g·log_g H)`.
///
/// `[0, H]` splits along the base-`g` prefix tree of `H` into full blocks
/// `[p·g^j, (p+1)·g^j)`, each a phase times a digit product.
pub fn expsum_digitset_prefix(ds: &DigitSet, alpha: f64, h: u64) -> Result<Complex64> {
    if h == 0 {
        return Err(Error::invalid("H must be ≥ 1"));
    }
    let alpha = reduce_unit(alpha);
    let g = ds.base();
    let digits = crate::digitset::base_digits(h, g);
    let len = digits.len();
    let blocks = block_products(ds, alpha, len as u32 - 1)?;
    let mut acc = ComplexSum::new();
    let mut prefix = 0u64;
    let mut h_allowed = true;
    for (i, &hd) in digits.iter().enumerate() {
        let j = (len - 1 - i) as u32;
        let scale = g.pow(j);
        for d in 0..hd {
            if d == ds.excluded() {
                continue;
            }
            let start = (prefix * g + d) * scale;
            acc.add(e_mul(start, alpha) * blocks[j as usize]);
        }
        if hd == ds.excluded() {
            h_allowed = false;
            break;
        }
        prefix = prefix * g + hd;
    }
    if h_allowed {
        acc.add(e_mul(h, alpha));
    }
    // drop n = 0
    acc.add(Complex64::new(-1.0, 0.0));
    Ok(acc.value())
}

/// `Σ_{n ∈ (X, X+H]*} e(nα)`; uses `e(αX)·S_{(0,H]*}(α)` when `X = g^m`, `H < X`.
pub fn expsum_digitset_interval(ds: &DigitSet, alpha: f64, x: u64, h: u64) -> Result<Complex64> {
    let hi = x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    if h == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if ds.power_exponent(x).is_some() && h < x {
        Ok(e_mul(x, alpha) * expsum_digitset_prefix(ds, alpha, h)?)
    } else {
        Ok(expsum_digitset_direct(ds, alpha, x, hi))
    }
}

/// `F(α) = |S_{(X,X+H]*}(α)| / |(X, X+H]*|`.
pub fn normalized_f(ds: &DigitSet, alpha: f64, x: u64, h: u64) -> Result<f64> {
    let hi = x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    let size = ds.count_range(x, hi);
    if size == 0 {
        return Err(Error::EmptySet);
    }
    Ok(expsum_digitset_interval(ds, alpha, x, h)?.norm() / size as f64)
}

/// Trapezoid estimate of `∫₀¹ |S_{(0,g^k]*}(α)| dα` and its comparison with
/// `|(0, g^k]*|^{1-λ(g)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Estimate {
    pub k: u32,
    pub nodes: u64,
    pub integral: f64,
    pub set_size: u64,
    pub bound: f64,
    pub ratio: f64,
}

/// Smallest admissible node count for [`l1_norm_estimate`].
pub fn l1_min_nodes(ds: &DigitSet, k: u32) -> Result<u64> {
    ds.pow(k)?
        .checked_mul(L1_NODES_PER_OSCILLATION)
        .ok_or(Error::Overflow("L¹ node count"))
}

/// Uniform trapezoid rule on the periodic integrand, evaluated in parallel
/// over fixed chunks and reduced in chunk order.
pub fn l1_norm_estimate(ds: &DigitSet, k: u32, nodes_per_unit: u64) -> Result<L1Estimate> {
    let min = l1_min_nodes(ds, k)?;
    if nodes_per_unit < min {
        return Err(Error::invalid(format!(
            "{nodes_per_unit} nodes is below the required {min} for k = {k}"
        )));
    }
    let gk = ds.pow(k)?;
    let n = nodes_per_unit;
    let chunks = (n as usize).div_ceil(L1_CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = (c * L1_CHUNK) as u64;
            let end = (start + L1_CHUNK as u64).min(n);
            let mut acc = NeumaierSum::new();
            for j in start..end {
                let alpha = j as f64 / n as f64;
                let block = block_products(ds, alpha, k).expect("g^k checked above");
                let s = block[k as usize] - 1.0 + e_mul(gk, alpha);
                acc.add(s.norm());
            }
            acc.value()
        })
        .collect();
    let integral = sum_f64(&partial) / n as f64;
    let set_size = ds.count_range(0, gk);
    let bound = (set_size as f64).powf(1.0 - lambda(ds.base()));
    Ok(L1Estimate {
        k,
        nodes: n,
        integral,
        set_size,
        bound,
        ratio: integral / bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::sieve_divisor_count;

    #[test]
    fn divisor_sum_at_zero_and_half() {
        let t = sieve_divisor_count(1, 10).unwrap();
        let z = expsum_divisor(0.0, 1, 9, &t).unwrap();
        assert_eq!(z.re, 27.0);
        assert_eq!(z.im, 0.0);
        let z = expsum_divisor(0.5, 1, 3, &t).unwrap();
        assert!((z.re - 2.0).abs() < 1e-12 && z.im.abs() < 1e-12);
    }

    #[test]
    fn divisor_sum_range_guard() {
        let t = sieve_divisor_count(10, 20).unwrap();
        assert!(matches!(
            expsum_divisor(0.1, 5, 10, &t),
            Err(Error::RangeMismatch { .. })
        ));
    }

    #[test]
    fn digitset_direct_examples() {
        let ds = DigitSet::new(10, 7).unwrap();
        let z = expsum_digitset_direct(&ds, 0.0, 0, 100);
        assert_eq!(z.re, 81.0);
        let z = expsum_digitset_direct(&ds, 0.5, 0, 10);
        assert!((z.re - 1.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        assert_eq!(expsum_digitset_direct(&ds, 0.3, 50, 50), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn block_examples() {
        let ds = DigitSet::new(10, 7).unwrap();
        assert!((expsum_digitset_block(&ds, 0.0, 4).unwrap().re - 6561.0).abs() < 1e-9);
        let a = 0.3141;
        let single = expsum_digitset_block(&ds, a, 1).unwrap();
        let direct: Complex64 = (0..10u64).filter(|&d| d != 7).map(|d| e_mul(d, a)).sum();
        assert!((single - direct).norm() < 1e-13);
        assert!(matches!(
            expsum_digitset_block(&ds, a, 20),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn prefix_examples() {
        let ds = DigitSet::new(10, 7).unwrap();
        let a = 0.2718;
        let z = expsum_digitset_prefix(&ds, a, 1).unwrap();
        assert!((z - e_mul(1, a)).norm() < 1e-14);
        let z = expsum_digitset_prefix(&ds, a, 25).unwrap();
        assert!((z - expsum_digitset_direct(&ds, a, 0, 25)).norm() < 1e-10);
        // full block: (0, 10⁴] = [0, 10⁴) - {0} + {10⁴}
        let block = expsum_digitset_block(&ds, a, 4).unwrap();
        let z = expsum_digitset_prefix(&ds, a, 10_000).unwrap();
        assert!((z - (block - 1.0 + e_mul(10_000, a))).norm() < 1e-10);
        // H containing the excluded digit
        let z = expsum_digitset_prefix(&ds, a, 1789).unwrap();
        assert!((z - expsum_digitset_direct(&ds, a, 0, 1789)).norm() < 1e-10);
        assert!(expsum_digitset_prefix(&ds, a, 0).is_err());
    }

    #[test]
    fn normalized_f_examples() {
        let ds = DigitSet::new(10, 7).unwrap();
        assert!((normalized_f(&ds, 0.0, 10_000, 1000).unwrap() - 1.0).abs() < 1e-15);
        let f = normalized_f(&ds, 0.3, 10_000, 1000).unwrap();
        let brute = expsum_digitset_direct(&ds, 0.3, 10_000, 11_000).norm()
            / ds.count_range(10_000, 11_000) as f64;
        assert!((f - brute).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&f));
        // not a power of g: direct fallback
        let f = normalized_f(&ds, 0.3, 12_345, 100).unwrap();
        assert!((0.0..=1.0).contains(&f));
        assert!(matches!(normalized_f(&ds, 0.3, 70_000, 5000), Err(Error::EmptySet)));
    }

    #[test]
    fn l1_small_cases() {
        let ds = DigitSet::new(10, 7).unwrap();
        let k0 = l1_norm_estimate(&ds, 0, 32).unwrap();
        assert!((k0.integral - 1.0).abs() < 1e-14);
        assert!(l1_norm_estimate(&ds, 1, 319).is_err());

        let coarse = l1_norm_estimate(&ds, 1, 320).unwrap();
        let fine = l1_norm_estimate(&ds, 1, 3200).unwrap();
        assert!((coarse.integral - fine.integral).abs() / fine.integral < 1e-3);
        assert_eq!(coarse.set_size, 9);
    }

    #[test]
    fn l1_is_thread_count_independent() {
        let ds = DigitSet::new(10, 7).unwrap();
        let a = l1_norm_estimate(&ds, 2, 3200 * 7).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| l1_norm_estimate(&ds, 2, 3200 * 7).unwrap());
        assert_eq!(a.integral.to_bits(), b.integral.to_bits());
    }
}
