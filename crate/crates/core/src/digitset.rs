//! Integers whose base-`g` expansion avoids the digit `b`.
//!
//! Intervals are half-open on the left: `(lo, hi]`, matching `(X, X+H]*`.

use crate::error::{Error, Result};

/// Base `g ≥ 3` with one excluded digit `b ∈ [2, g-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DigitSet {
    base: u64,
    excluded: u64,
}

impl DigitSet {
    pub fn new(base: u64, excluded: u64) -> Result<Self> {
        if base < 3 {
            return Err(Error::invalid(format!("base must be ≥ 3, got {base}")));
        }
        if excluded < 2 || excluded >= base {
            return Err(Error::invalid(format!(
                "excluded digit must lie in [2, {}], got {excluded}",
                base - 1
            )));
        }
        Ok(DigitSet { base, excluded })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn excluded(&self) -> u64 {
        self.excluded
    }

    /// Number of permitted digits, `g - 1`.
    pub fn allowed_count(&self) -> u64 {
        self.base - 1
    }

    /// Permitted digits in increasing order.
    pub fn allowed_digits(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.base).filter(move |&d| d != self.excluded)
    }

    /// True iff no base-`g` digit of `n` equals `b`.
    pub fn contains(&self, mut n: u64) -> bool {
        while n > 0 {
            if n % self.base == self.excluded {
                return false;
            }
            n /= self.base;
        }
        true
    }

    /// Elements of `(lo, hi]` in ascending order.
    pub fn enumerate(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_in(lo, hi, |n| out.push(n));
        out
    }

    /// Calls `visit` on each element of `(lo, hi]` in ascending order and
    /// returns the number of digit-tree nodes the descent touched.
    ///
    /// Subtrees whose value range misses `(lo, hi]` are pruned, so the work is
    /// `O((output + g)·digits)` regardless of `hi - lo`.
    pub fn for_each_in(&self, lo: u64, hi: u64, mut visit: impl FnMut(u64)) -> u64 {
        if hi <= lo {
            return 0;
        }
        let g = self.base as u128;
        let mut digits = 0u32;
        let mut span = 1u128;
        while span <= hi as u128 {
            span *= g;
            digits += 1;
        }
        let mut ops = 0u64;
        self.descend(0, digits, span, lo as u128, hi as u128, &mut visit, &mut ops);
        ops
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        prefix: u128,
        remaining: u32,
        span: u128,
        lo: u128,
        hi: u128,
        visit: &mut impl FnMut(u64),
        ops: &mut u64,
    ) {
        *ops += 1;
        let first = prefix * span;
        let last = first + span - 1;
        if last <= lo || first > hi {
            return;
        }
        if remaining == 0 {
            visit(first as u64);
            return;
        }
        let child_span = span / self.base as u128;
        for d in 0..self.base {
            if d == self.excluded {
                continue;
            }
            let child_first = (prefix * self.base as u128 + d as u128) * child_span;
            if child_first > hi {
                break;
            }
            self.descend(
                prefix * self.base as u128 + d as u128,
                remaining - 1,
                child_span,
                lo,
                hi,
                visit,
                ops,
            );
        }
    }

    /// `(g-1)^k`, the number of `n ∈ [0, g^k)` avoiding `b`.
    pub fn count_block(&self, k: u32) -> Result<u64> {
        (self.base - 1)
            .checked_pow(k)
            .ok_or(Error::Overflow("count_block"))
    }

    /// Number of `m ∈ [0, n]` avoiding `b`.
    pub fn count_upto(&self, n: u64) -> u64 {
        let digits = base_digits(n, self.base);
        let free = self.base - 1;
        let mut total = 0u64;
        for (i, &h) in digits.iter().enumerate() {
            let rest = (digits.len() - 1 - i) as u32;
            let below = (0..h).filter(|&d| d != self.excluded).count() as u64;
            total += below * free.pow(rest);
            if h == self.excluded {
                return total;
            }
        }
        total + 1
    }

    /// `|(lo, hi]*|`.
    pub fn count_range(&self, lo: u64, hi: u64) -> u64 {
        if hi <= lo {
            0
        } else {
            self.count_upto(hi) - self.count_upto(lo)
        }
    }

    /// `g^k`, with overflow guard.
    pub fn pow(&self, k: u32) -> Result<u64> {
        self.base.checked_pow(k).ok_or(Error::Overflow("g^k"))
    }

    /// `Some(m)` when `x = g^m`.
    pub fn power_exponent(&self, x: u64) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let mut m = 0;
        let mut v = x;
        while v % self.base == 0 {
            v /= self.base;
            m += 1;
        }
        (v == 1).then_some(m)
    }
}

/// Digits of `n` in base `g`, most significant first (`[0]` for `n = 0`).
pub fn base_digits(mut n: u64, g: u64) -> Vec<u64> {
    let mut out = Vec::new();
    loop {
        out.push(n % g);
        n /= g;
        if n == 0 {
            break;
        }
    }
    out.reverse();
    out
}

/// `λ(g) = 1 - log(log g + 1) / log(g - 1)`.
pub fn lambda(g: u64) -> f64 {
    let g = g as f64;
    1.0 - (g.ln() + 1.0).ln() / (g - 1.0).ln()
}

/// An interval `(X, X+H]` with `X = g^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalSpec {
    pub x: u64,
    pub h: u64,
    pub m: u32,
}

impl IntervalSpec {
    pub fn new(ds: &DigitSet, x: u64, h: u64) -> Result<Self> {
        let m = ds
            .power_exponent(x)
            .ok_or_else(|| Error::invalid(format!("X = {x} is not a power of {}", ds.base())))?;
        if h == 0 {
            return Err(Error::invalid("H must be ≥ 1"));
        }
        x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
        Ok(IntervalSpec { x, h, m })
    }

    /// `H ≥ X`: the shift identity no longer applies.
    pub fn h_exceeds_x(&self) -> bool {
        self.h >= self.x
    }
}

/// Interval sized so that `|(0, H]*|` tracks `(X/(log X)³)^{1/(2λ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HChoice {
    pub spec: IntervalSpec,
    /// `H = g^k`.
    pub k: u32,
    /// The real target for `|(0, H]*|`.
    pub target: f64,
    /// The exact `|(0, H]*|` achieved.
    pub achieved: u64,
    /// Set when `H ≥ X`.
    pub warning: bool,
}

/// Nearest block exponent `k` with `(g-1)^k ≈ target`; ties go to the smaller `k`.
pub fn round_block_exponent(target: f64, g: u64) -> u32 {
    let exact = target.ln() / ((g - 1) as f64).ln();
    let nearest = exact.round();
    // snap floating noise on exact hits before the tie rule
    let k = if (exact - nearest).abs() < 1e-9 {
        nearest
    } else {
        (exact - 0.5).ceil()
    };
    k.max(0.0) as u32
}

pub fn choose_h(ds: &DigitSet, x: u64) -> Result<HChoice> {
    let m = ds
        .power_exponent(x)
        .ok_or_else(|| Error::invalid(format!("X = {x} is not a power of {}", ds.base())))?;
    if m < 2 {
        return Err(Error::invalid("choose_h needs X = g^m with m ≥ 2"));
    }
    let lam = lambda(ds.base());
    if lam <= 0.0 {
        return Err(Error::invalid(format!(
            "λ({}) = {lam:.4} ≤ 0; the interval size is undefined",
            ds.base()
        )));
    }
    let log_x = (x as f64).ln();
    let target = ((x as f64).ln() - 3.0 * log_x.ln()) / (2.0 * lam);
    let target = target.exp();
    let k = round_block_exponent(target, ds.base());
    let h = ds.pow(k)?;
    let spec = IntervalSpec { x, h, m };
    x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    Ok(HChoice {
        spec,
        k,
        target,
        achieved: ds.count_range(0, h),
        warning: h >= x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(ds: &DigitSet, lo: u64, hi: u64) -> usize {
        ((lo + 1)..=hi).filter(|&n| ds.contains(n)).count()
    }

    #[test]
    fn construction_guards() {
        assert!(DigitSet::new(2, 1).is_err());
        assert!(DigitSet::new(10, 0).is_err());
        assert!(DigitSet::new(10, 1).is_err());
        assert!(DigitSet::new(10, 10).is_err());
        let ds = DigitSet::new(10, 9).unwrap();
        assert_eq!(ds.allowed_count(), 9);
        assert_eq!(ds.allowed_digits().count(), 9);
    }

    #[test]
    fn membership_examples() {
        let ds = DigitSet::new(10, 7).unwrap();
        assert!(ds.contains(42));
        assert!(!ds.contains(17));
        assert!(ds.contains(100));
        assert!(ds.contains(0));
    }

    #[test]
    fn enumeration_examples() {
        let ds = DigitSet::new(10, 7).unwrap();
        assert_eq!(ds.enumerate(0, 10), vec![1, 2, 3, 4, 5, 6, 8, 9, 10]);
        assert_eq!(ds.enumerate(0, 100).len(), brute_count(&ds, 0, 100));
        assert_eq!(ds.enumerate(0, 100).len(), 81);
        let ds2 = DigitSet::new(10, 2).unwrap();
        assert_eq!(ds2.enumerate(0, 1000).len(), brute_count(&ds2, 0, 1000));
        assert!(ds.enumerate(5, 5).is_empty());
        assert!(ds.enumerate(9, 3).is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force_on_windows() {
        for (g, b) in [(10, 7), (10, 2), (12, 7), (3, 2), (5, 4)] {
            let ds = DigitSet::new(g, b).unwrap();
            for (lo, hi) in [(0, 1), (0, 2000), (123, 4567), (999, 1001), (77, 78)] {
                let brute: Vec<u64> = ((lo + 1)..=hi).filter(|&n| ds.contains(n)).collect();
                assert_eq!(ds.enumerate(lo, hi), brute, "g={g} b={b} ({lo}, {hi}]");
                assert_eq!(ds.count_range(lo, hi), brute.len() as u64);
            }
        }
    }

    #[test]
    fn block_counts() {
        let ds = DigitSet::new(10, 7).unwrap();
        assert_eq!(ds.count_block(0).unwrap(), 1);
        assert_eq!(ds.count_block(2).unwrap(), 81);
        let brute = (0..1000u64).filter(|&n| ds.contains(n)).count() as u64;
        assert_eq!(ds.count_block(3).unwrap(), brute);
        assert_eq!(brute, 729);
        assert!(matches!(ds.count_block(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn sparse_range_cost_tracks_output() {
        let ds = DigitSet::new(10, 7).unwrap();
        // (10¹², 10¹² + 50]: 50 candidates inside a huge numeric range
        let lo = 1_000_000_000_000u64;
        let mut out = Vec::new();
        let ops = ds.for_each_in(lo, lo + 50, |n| out.push(n));
        assert_eq!(out.len(), brute_count(&ds, lo, lo + 50));
        let digits = 13;
        assert!(ops <= (out.len() as u64 + 10) * digits * 2, "ops = {ops}");
        // everything above 7·10¹¹ in (0, 8·10¹¹] is pruned by the leading digit
        let ops = ds.for_each_in(7 * 10u64.pow(11), 8 * 10u64.pow(11), |_| {});
        assert!(ops < 200, "ops = {ops}");
    }

    #[test]
    fn lambda_values() {
        assert!((lambda(10) - 0.456_266).abs() < 1e-6);
        assert!((lambda(30) - 0.559_921).abs() < 1e-6);
        assert!(lambda(100) > lambda(10));
        assert!(lambda(3) < 0.0);
    }

    #[test]
    fn choose_h_examples() {
        let ds = DigitSet::new(30, 7).unwrap();
        let x = 30u64.pow(8);
        let c = choose_h(&ds, x).unwrap();
        assert_eq!(c.k, 5);
        assert_eq!(c.spec.h, 30u64.pow(5));
        assert!((c.target / 5.1e6 - 1.0).abs() < 0.01);
        assert_eq!(c.achieved, 29u64.pow(5));
        assert!(!c.warning);

        let ds10 = DigitSet::new(10, 7).unwrap();
        let c = choose_h(&ds10, 1_000_000).unwrap();
        assert_eq!(c.k, 3);
        assert!(!c.warning);

        let ds4 = DigitSet::new(4, 2).unwrap();
        let c = choose_h(&ds4, 4u64.pow(12)).unwrap();
        assert!(c.warning && c.spec.h >= c.spec.x);

        assert!(choose_h(&ds10, 999).is_err());
        assert!(choose_h(&ds10, 10).is_err());
        assert!(choose_h(&DigitSet::new(3, 2).unwrap(), 81).is_err());
    }

    #[test]
    fn block_exponent_rounding() {
        assert_eq!(round_block_exponent(729.0, 10), 3);
        assert_eq!(round_block_exponent(81.0 * 81.0, 10), 4);
        // exact midpoint between k = 2 and 3 on the log scale goes down
        assert_eq!(round_block_exponent(9f64.powf(2.5), 10), 2);
        assert_eq!(round_block_exponent(9f64.powf(2.51), 10), 3);
        assert_eq!(round_block_exponent(0.5, 10), 0);
    }

    #[test]
    fn shift_identity_exhaustive() {
        for g in [10u64, 12] {
            let ds = DigitSet::new(g, 7).unwrap();
            for m in 3..=5u32 {
                let x = g.pow(m);
                let h = g.pow(m - 1);
                for n in 1..=h {
                    assert_eq!(ds.contains(n), ds.contains(x + n), "g={g} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn interval_spec_validation() {
        let ds = DigitSet::new(10, 7).unwrap();
        let s = IntervalSpec::new(&ds, 10_000, 100).unwrap();
        assert_eq!(s.m, 4);
        assert!(!s.h_exceeds_x());
        assert!(IntervalSpec::new(&ds, 10_000, 20_000).unwrap().h_exceeds_x());
        assert!(IntervalSpec::new(&ds, 12_000, 10).is_err());
        assert!(IntervalSpec::new(&ds, 10_000, 0).is_err());
        assert_eq!(ds.power_exponent(1), Some(0));
        assert_eq!(ds.power_exponent(0), None);
    }
}
