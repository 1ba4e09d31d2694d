//! Experiment-level diagnostics and reporting.

pub mod report;

use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::ntheory::{gcd, isqrt, sieve_divisor_count, RamanujanTable};

pub use report::{fmt_float, parse_config, CsvTable, RunManifest, Value};

/// Deviation of a digit set from equidistribution mod `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyRow {
    pub q: u64,
    /// `max_a | #{n ≡ a (mod q)} - |set|/q |`.
    pub max_residue_deviation: f64,
    /// `q × max_residue_deviation`.
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub rows: Vec<DiscrepancyRow>,
    /// Residue-class counts, aligned with `rows`.
    pub counts: Vec<Vec<u64>>,
    pub set_size: u64,
    /// `Σ_q` of the deviation (weighted or not, as requested).
    pub total: f64,
    /// `total / |set|`.
    pub ratio: f64,
}

/// Residue distribution of `[1, X]* = (0, X]*` for every `q ≤ q_max`
/// (optionally only `gcd(q, g(g-1)) = 1`), from one enumeration pass.
pub fn discrepancy(
    ds: &DigitSet,
    x: u64,
    q_max: u64,
    coprime_filter: bool,
    weighted: bool,
) -> Result<Discrepancy> {
    if q_max == 0 {
        return Err(Error::invalid("q_max must be ≥ 1"));
    }
    let g = ds.base();
    let modulus = g * (g - 1);
    let qs: Vec<u64> = (1..=q_max)
        .filter(|&q| !coprime_filter || gcd(q, modulus) == 1)
        .collect();
    let mut counts: Vec<Vec<u64>> = qs.iter().map(|&q| vec![0u64; q as usize]).collect();
    let mut set_size = 0u64;
    ds.for_each_in(0, x, |n| {
        set_size += 1;
        for (c, &q) in counts.iter_mut().zip(&qs) {
            c[(n % q) as usize] += 1;
        }
    });
    let size = set_size as f64;
    let rows: Vec<DiscrepancyRow> = qs
        .iter()
        .zip(&counts)
        .map(|(&q, c)| {
            let share = size / q as f64;
            let dev = c
                .iter()
                .map(|&k| (k as f64 - share).abs())
                .fold(0.0, f64::max);
            DiscrepancyRow {
                q,
                max_residue_deviation: dev,
                weighted: q as f64 * dev,
            }
        })
        .collect();
    let total: f64 = rows
        .iter()
        .map(|r| if weighted { r.weighted } else { r.max_residue_deviation })
        .sum();
    Ok(Discrepancy {
        rows,
        counts,
        set_size,
        total,
        ratio: if set_size == 0 { 0.0 } else { total / size },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSums {
    /// `Σ_n Σ_{q<P} c_q(n)/q`.
    pub signed: f64,
    /// `Σ_n Σ_{q<P} |c_q(n)|/q`.
    pub absolute: f64,
    /// `|set| · log X · log P`.
    pub comparison: f64,
    pub set_size: u64,
}

/// Ramanujan double sums over `n ∈ (X, X+H]*`, `q < P`.
pub fn ramanujan_double_sums(ds: &DigitSet, x: u64, h: u64, p: u64) -> Result<DoubleSums> {
    let hi = x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    let set = ds.enumerate(x, hi);
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut signed = 0.0;
    let mut absolute = 0.0;
    if p > 1 {
        let table = RamanujanTable::new(p - 1)?;
        for q in 1..p {
            let (mut s, mut a) = (0i64, 0i64);
            for &n in &set {
                let c = table.c(q, n);
                s += c;
                a += c.abs();
            }
            signed += s as f64 / q as f64;
            absolute += a as f64 / q as f64;
        }
    }
    let size = set.len() as u64;
    Ok(DoubleSums {
        signed,
        absolute,
        comparison: size as f64 * (x as f64).ln() * (p.max(1) as f64).ln(),
        set_size: size,
    })
}

/// `Σ_{n ∈ (X, X+H]*} d₂(n)` against the upper bound shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryReport {
    pub set_size: u64,
    pub divisor_sum: u64,
    /// `d₂(g(g-1))`.
    pub d2_gg1: u64,
    /// `sum / (d₂(g(g-1)) |set| (log X)³)`.
    pub r1: f64,
    /// `sum / (|set| log X)`.
    pub r2: f64,
}

pub fn corollary_ratio(ds: &DigitSet, x: u64, h: u64) -> Result<CorollaryReport> {
    if ds.power_exponent(x).is_none() {
        return Err(Error::invalid(format!("X = {x} is not a power of {}", ds.base())));
    }
    if h == 0 {
        return Err(Error::EmptySet);
    }
    let hi = x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    let table = sieve_divisor_count(x + 1, hi)?;
    let mut set_size = 0u64;
    let mut divisor_sum = 0u64;
    ds.for_each_in(x, hi, |n| {
        set_size += 1;
        divisor_sum += table.get(n).expect("n in (X, X+H]") as u64;
    });
    if set_size == 0 {
        return Err(Error::EmptySet);
    }
    let g = ds.base();
    let gg1 = g * (g - 1);
    let d2_gg1 = (1..=gg1).filter(|d| gg1 % d == 0).count() as u64;
    let log_x = (x as f64).ln();
    let size = set_size as f64;
    Ok(CorollaryReport {
        set_size,
        divisor_sum,
        d2_gg1,
        r1: divisor_sum as f64 / (d2_gg1 as f64 * size * log_x.powi(3)),
        r2: divisor_sum as f64 / (size * log_x),
    })
}

/// Two exact evaluations of `Σ_{n ∈ (X, 2X]*} d₂(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HyperbolaReport {
    pub sieve_sum: u64,
    pub hyperbola_sum: u64,
    pub difference: i64,
}

/// `#{n ∈ (lo, hi]* : m | n, n ≥ min}`.
pub fn multiples_in_set(ds: &DigitSet, lo: u64, hi: u64, m: u64, min: u64) -> u64 {
    let start = (lo + 1).max(min);
    if start > hi {
        return 0;
    }
    let mut n = start.div_ceil(m) * m;
    let mut count = 0;
    while n <= hi {
        if ds.contains(n) {
            count += 1;
        }
        n += m;
    }
    count
}

/// Sieve-and-filter against `2·Σ_{m ≤ √(2X)} #{n ∈ set : m | n, m² ≤ n} - #{squares in set}`.
pub fn hyperbola_check(ds: &DigitSet, x: u64) -> Result<HyperbolaReport> {
    if ds.power_exponent(x).is_none() {
        return Err(Error::invalid(format!("X = {x} is not a power of {}", ds.base())));
    }
    let hi = x.checked_mul(2).ok_or(Error::Overflow("2X"))?;
    let table = sieve_divisor_count(x + 1, hi)?;
    let mut sieve_sum = 0u64;
    ds.for_each_in(x, hi, |n| sieve_sum += table.get(n).expect("n in (X, 2X]") as u64);

    let mut pairs = 0u64;
    for m in 1..=isqrt(hi) {
        pairs += multiples_in_set(ds, x, hi, m, m * m);
    }
    let squares = ((isqrt(x) + 1)..=isqrt(hi))
        .filter(|&s| ds.contains(s * s))
        .count() as u64;
    let hyperbola_sum = 2 * pairs - squares;
    Ok(HyperbolaReport {
        sieve_sum,
        hyperbola_sum,
        difference: sieve_sum as i64 - hyperbola_sum as i64,
    })
}
