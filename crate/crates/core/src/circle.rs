//! Farey dissection of `[0, 1)` and the major-arc main term.
//!
//! Major arcs are `(a/q - 1/(qQ), a/q + 1/(qQ))` for coprime `a/q` with
//! `q ≤ P`, including the `q = 1` arcs around `0` and `1` so that the major
//! and minor arcs cover the whole unit interval.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::expsum::expsum_divisor;
use crate::ntheory::{gcd, RamanujanTable, SieveTable};
use crate::phase::{e, e_mul, reduce_unit};
use crate::quad::{self, panels_for_cycles, GL8_POINTS};
use crate::sum::{sum_f64, ComplexSum};
use crate::voronoi::{ju2_main, p2q_star_raw};

pub const DEFAULT_ETA: f64 = 0.02;

/// Exponent standing in for `ε` in the error-term bounds.
pub const DEFAULT_EPS: f64 = 0.05;

/// Node budget for a single main-term assembly.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

const MIN_PANELS: usize = 16;

/// Largest bound accepted by [`dirichlet_approx`].
pub const MAX_DIRICHLET_BOUND: u64 = 1 << 32;

/// `X`, `η` and the derived `P = ⌊X^{1/4-η}⌋`, `Q = ⌊X^{1/2-2η}⌋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcParams {
    pub x: u64,
    pub eta: f64,
    pub p: u64,
    pub q: u64,
}

fn floor_power(x: u64, exponent: f64) -> u64 {
    let v = (x as f64).powf(exponent);
    // absorb rounding on exact powers, e.g. (10⁸)^{1/4}
    (v * (1.0 + 1e-12)).floor() as u64
}

impl ArcParams {
    pub fn new(x: u64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 0.25) {
            return Err(Error::invalid(format!("η must lie in (0, 1/4), got {eta}")));
        }
        if x < 2 {
            return Err(Error::invalid("X must be ≥ 2"));
        }
        let p = floor_power(x, 0.25 - eta);
        let q = floor_power(x, 0.5 - 2.0 * eta);
        let params = ArcParams { x, eta, p, q };
        params.validate()?;
        if q.abs_diff(p * p) > 2 * p {
            return Err(Error::Numerical(format!(
                "|Q - P²| = {} exceeds 2P = {}",
                q.abs_diff(p * p),
                2 * p
            )));
        }
        Ok(params)
    }

    /// Parameters with `P`, `Q` given directly (`η` is recorded as NaN).
    pub fn explicit(x: u64, p: u64, q: u64) -> Result<Self> {
        let params = ArcParams {
            x,
            eta: f64::NAN,
            p,
            q,
        };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::invalid(format!("P = {} < 1; X is too small for η", self.p)));
        }
        if 2 * self.p > self.q {
            return Err(Error::invalid(format!(
                "2P = {} > Q = {}; major arcs would overlap",
                2 * self.p,
                self.q
            )));
        }
        Ok(())
    }

    /// Radius `1/(qQ)` of the arcs with denominator `q`.
    pub fn radius(&self, q: u64) -> f64 {
        1.0 / (q as f64 * self.q as f64)
    }

    /// Every major arc, ordered by centre.
    pub fn major_arcs(&self) -> Vec<Arc> {
        let mut arcs: Vec<Arc> = (1..=self.p)
            .flat_map(|q| {
                (0..=q)
                    .filter(move |&a| gcd(a, q) == 1)
                    .map(move |a| Arc {
                        a,
                        q,
                        radius: self.radius(q),
                    })
            })
            .collect();
        arcs.sort_by(|l, r| l.center().total_cmp(&r.center()));
        arcs
    }
}

/// The arc around `a/q` of radius `1/(qQ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub a: u64,
    pub q: u64,
    pub radius: f64,
}

impl Arc {
    pub fn center(&self) -> f64 {
        self.a as f64 / self.q as f64
    }

    pub fn contains(&self, alpha: f64) -> bool {
        (alpha - self.center()).abs() < self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    Major(Arc),
    Minor,
}

impl Classification {
    pub fn is_major(&self) -> bool {
        matches!(self, Classification::Major(_))
    }
}

/// Major arc containing `α ∈ [0, 1)`, if any.
///
/// Arcs of one denominator are narrower than half the spacing of their
/// centres, so `a = round(αq)` is the only candidate for each `q`.
pub fn classify(params: &ArcParams, alpha: f64) -> Classification {
    for q in 1..=params.p {
        let a = (alpha * q as f64).round();
        if a < 0.0 || a > q as f64 {
            continue;
        }
        let arc = Arc {
            a: a as u64,
            q,
            radius: params.radius(q),
        };
        if gcd(arc.a, q) == 1 && arc.contains(alpha) {
            return Classification::Major(arc);
        }
    }
    Classification::Minor
}

// α = num / den exactly, den a power of two.
fn dyadic(alpha: f64) -> (u128, u128) {
    let bits = alpha.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let shift = (m.trailing_zeros() as i32).min(-e);
    ((m >> shift) as u128, 1u128 << (-e - shift))
}

fn satisfies(num: u128, den: u128, a: u128, q: u128, bound: u128) -> bool {
    let diff = (num * q).abs_diff(a * den);
    diff * bound <= den
}

/// Coprime `(a, q)` with `1 ≤ q ≤ bound` and `|α - a/q| ≤ 1/(q·bound)`.
///
/// Uses the last continued-fraction convergent of `α` with denominator at
/// most `bound`, computed exactly on the dyadic value of `α`.
pub fn dirichlet_approx(alpha: f64, bound: u64) -> Result<(u64, u64)> {
    if bound == 0 || bound > MAX_DIRICHLET_BOUND {
        return Err(Error::invalid(format!(
            "Dirichlet bound must lie in [1, 2^32], got {bound}"
        )));
    }
    let alpha = reduce_unit(alpha);
    // |α - 0/1| ≤ 1/bound already; this also keeps the dyadic denominator small
    if alpha * 2.0 * bound as f64 <= 1.0 {
        return Ok((0, 1));
    }
    if (1.0 - alpha) * 2.0 * bound as f64 <= 1.0 {
        return Ok((1, 1));
    }
    let (num, den) = dyadic(alpha);
    let b = bound as u128;
    let (mut h_prev, mut h) = (0u128, 1u128);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let (mut n, mut d) = (num, den);
    let mut best = (0u128, 1u128);
    while d != 0 {
        let t = n / d;
        let h_next = t * h + h_prev;
        let k_next = t * k + k_prev;
        if k_next > b {
            break;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        best = (h, k);
        (n, d) = (d, n - t * d);
    }
    if best.1 >= 1 && satisfies(num, den, best.0, best.1, b) {
        return Ok((best.0 as u64, best.1 as u64));
    }
    for q in 1..=b {
        let a = (num * q + den / 2) / den;
        if gcd(a as u64, q as u64) == 1 && satisfies(num, den, a, q, b) {
            return Ok((a as u64, q as u64));
        }
    }
    Err(Error::Numerical(format!("no Dirichlet approximation for α = {alpha}")))
}

fn check_budget(needed: u64, budget: u64) -> Result<()> {
    if needed > budget {
        Err(Error::Budget { needed, budget })
    } else {
        Ok(())
    }
}

fn integral_panels(beta: f64, h: u64) -> usize {
    panels_for_cycles(beta * h as f64, MIN_PANELS)
}

/// `∫_X^{X+H} p*₂,q(x) e(βx) dx`.
///
/// Composite Gauss–Legendre with at least 50 nodes per period `1/|β|`; the
/// phase is split as `e(βX)·e(β(x - X))`. At `β = 0` the boundary closed form
/// is returned.
pub fn major_arc_main_integral(q: u64, beta: f64, x: u64, h: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::invalid("q must be ≥ 1"));
    }
    if !(beta.abs() <= 1.0) {
        return Err(Error::invalid(format!("need |β| ≤ 1, got {beta}")));
    }
    if beta == 0.0 {
        return Ok(Complex64::new(ju2_main(q, x, h)?, 0.0));
    }
    let panels = integral_panels(beta, h);
    check_budget((panels * GL8_POINTS) as u64, DEFAULT_NODE_BUDGET)?;
    Ok(major_arc_integral_with(q, beta, x, h, panels))
}

fn major_arc_integral_with(q: u64, beta: f64, x: u64, h: u64, panels: usize) -> Complex64 {
    let xf = x as f64;
    let anchor = if beta >= 0.0 {
        e_mul(x, beta)
    } else {
        e_mul(x, -beta).conj()
    };
    let body = quad::integrate_complex(0.0, h as f64, panels, |s| {
        e(beta * s) * p2q_star_raw(q, xf + s)
    });
    anchor * body
}

#[inline]
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

fn kernel_panels(t: f64, len: f64) -> usize {
    panels_for_cycles(t * len, MIN_PANELS / 2)
}

fn kernel_nodes(x: u64, h: u64, n: u64, t: f64) -> u64 {
    let (lo, hi) = (x as f64, (x + h) as f64);
    let nf = n as f64;
    let pieces: &[(f64, f64)] = if nf > lo && nf < hi {
        &[(lo, nf), (nf, hi)]
    } else {
        &[(lo, hi)]
    };
    pieces
        .iter()
        .map(|&(a, b)| (kernel_panels(t, b - a) * GL8_POINTS) as u64)
        .sum()
}

/// `(1/π) ∫_X^{X+H} p*₂,q(x) sin(2πT(x - n))/(x - n) dx`.
///
/// Integrated as `p*(x)·2T·sinc(2πT(x - n))`, which is regular at `x = n`;
/// the panels are split at `n` when it lies inside the interval.
pub fn sine_kernel_term(q: u64, n: u64, x: u64, h: u64, t: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::invalid("q must be ≥ 1"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("T must be positive, got {t}")));
    }
    check_budget(kernel_nodes(x, h, n, t), DEFAULT_NODE_BUDGET)?;
    Ok(sine_kernel_unchecked(q, n, x, h, t))
}

fn sine_kernel_unchecked(q: u64, n: u64, x: u64, h: u64, t: f64) -> f64 {
    let xf = x as f64;
    // offset of x from n, exact for integers below 2⁵³
    let base = x as f64 - n as f64;
    let hf = h as f64;
    let split = n as f64 - xf;
    let omega = std::f64::consts::TAU * t;
    let f = |s: f64| p2q_star_raw(q, xf + s) * 2.0 * t * sinc(omega * (base + s));
    if split > 0.0 && split < hf {
        quad::integrate(0.0, split, kernel_panels(t, split), f)
            + quad::integrate(split, hf, kernel_panels(t, hf - split), f)
    } else {
        quad::integrate(0.0, hf, kernel_panels(t, hf), f)
    }
}

/// Which algebraic form [`theorem_main_term`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MainTermForm {
    /// `Σ_q ∫_{|β|<1/(qQ)} (∫ p* e(βx) dx)(Σ_n c_q(n) e(-nβ)) dβ`.
    BetaQuadrature,
    /// `Σ_q Σ_n c_q(n) (1/π)∫ p*(x) sin(2πT(x-n))/(x-n) dx`, `T = 1/(qQ)`.
    SineKernel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainTerm {
    pub value: f64,
    /// `|Im| / |Re|` of the assembled value (zero for the sine-kernel form).
    pub imag_residue: f64,
    pub set_size: u64,
    pub nodes: u64,
}

/// Imaginary residue above which the β-quadrature is reported as a failure.
pub const IMAG_RESIDUE_TOL: f64 = 1e-6;

/// Major-arc main term of `Σ_{n ∈ (X, X+H]*} d₂(n)`.
pub fn theorem_main_term(
    ds: &DigitSet,
    x: u64,
    h: u64,
    params: &ArcParams,
    form: MainTermForm,
    budget: u64,
) -> Result<MainTerm> {
    if ds.power_exponent(x).is_none() {
        return Err(Error::invalid(format!("X = {x} is not a power of {}", ds.base())));
    }
    let hi = x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    let set = ds.enumerate(x, hi);
    let set_size = set.len() as u64;
    if set.is_empty() {
        return Ok(MainTerm {
            value: 0.0,
            imag_residue: 0.0,
            set_size,
            nodes: 0,
        });
    }
    let table = RamanujanTable::new(params.p)?;
    match form {
        MainTermForm::SineKernel => sine_kernel_form(&set, x, h, params, &table, budget),
        MainTermForm::BetaQuadrature => beta_form(&set, x, h, params, &table, budget),
    }
}

fn sine_kernel_form(
    set: &[u64],
    x: u64,
    h: u64,
    params: &ArcParams,
    table: &RamanujanTable,
    budget: u64,
) -> Result<MainTerm> {
    let mut cells = Vec::new();
    let mut nodes = 0u64;
    for q in 1..=params.p {
        let t = params.radius(q);
        for &n in set {
            let c = table.c(q, n);
            if c != 0 {
                nodes = nodes.saturating_add(kernel_nodes(x, h, n, t));
                cells.push((q, n, c, t));
            }
        }
    }
    check_budget(nodes, budget)?;
    let terms: Vec<f64> = cells
        .par_iter()
        .map(|&(q, n, c, t)| c as f64 * sine_kernel_unchecked(q, n, x, h, t))
        .collect();
    Ok(MainTerm {
        value: sum_f64(&terms),
        imag_residue: 0.0,
        set_size: set.len() as u64,
        nodes,
    })
}

fn beta_form(
    set: &[u64],
    x: u64,
    h: u64,
    params: &ArcParams,
    table: &RamanujanTable,
    budget: u64,
) -> Result<MainTerm> {
    let mut plan = Vec::new();
    let mut nodes = 0u64;
    for q in 1..=params.p {
        let t = params.radius(q);
        // the β-integrand only oscillates at frequencies |x - n| ≤ H
        let outer = panels_for_cycles(2.0 * t * h as f64, MIN_PANELS);
        let inner = integral_panels(t, h);
        let per_node = (inner * GL8_POINTS + set.len()) as u64;
        nodes = nodes.saturating_add((outer * GL8_POINTS) as u64 * per_node);
        plan.push((q, t, outer, inner));
    }
    check_budget(nodes, budget)?;
    let parts: Vec<Complex64> = plan
        .par_iter()
        .map(|&(q, t, outer, inner)| {
            let coeffs: Vec<(u64, f64)> = set
                .iter()
                .map(|&n| (n, table.c(q, n) as f64))
                .filter(|&(_, c)| c != 0.0)
                .collect();
            quad::integrate_complex(-t, t, outer, |beta| {
                let main = major_arc_integral_with(q, beta, x, h, inner);
                let mut twist = ComplexSum::new();
                for &(n, c) in &coeffs {
                    let z = if beta >= 0.0 {
                        e_mul(n, beta).conj()
                    } else {
                        e_mul(n, -beta)
                    };
                    twist.add(z * c);
                }
                main * twist.value()
            })
        })
        .collect();
    let total = crate::sum::sum_complex(&parts);
    let imag_residue = total.im.abs() / total.re.abs().max(f64::MIN_POSITIVE);
    Ok(MainTerm {
        value: total.re,
        imag_residue,
        set_size: set.len() as u64,
        nodes,
    })
}

/// Normalised error of the major-arc approximation at `a/q + β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorArcError {
    pub raw: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `|S₂(a/q + β; X, X+H) - ∫ p*₂,q e(βx) dx|` over
/// `q X^ε + q^{1/2} H X^{-1/2} (log X)² + |β| q^{3/4} X^{5/8} H^{1/2}`.
pub fn lemma35_error(
    a: u64,
    q: u64,
    beta: f64,
    x: u64,
    h: u64,
    table: &SieveTable,
    eps: f64,
) -> Result<MajorArcError> {
    if q == 0 || gcd(a, q) != 1 {
        return Err(Error::NotCoprime {
            a,
            q,
            gcd: gcd(a, q),
        });
    }
    let alpha = reduce_unit(a as f64 / q as f64 + beta);
    let s = expsum_divisor(alpha, x, h, table)?;
    let main = major_arc_main_integral(q, beta, x, h)?;
    let raw = (s - main).norm();
    let (qf, xf, hf) = (q as f64, x as f64, h as f64);
    let bound = qf * xf.powf(eps)
        + qf.sqrt() * hf / xf.sqrt() * xf.ln().powi(2)
        + beta.abs() * qf.powf(0.75) * xf.powf(0.625) * hf.sqrt();
    Ok(MajorArcError {
        raw,
        bound,
        ratio: raw / bound,
    })
}

/// Largest `|S₂(α; X, X+H)|` over minor-arc points of a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinorScan {
    pub nodes: u64,
    pub minor_count: u64,
    /// No grid point fell on a minor arc.
    pub empty: bool,
    pub max: f64,
    pub argmax: f64,
    /// `max / (X^{1/2} log X)`.
    pub ratio: f64,
}

pub const MIN_SCAN_NODES: u64 = 10_000;

/// Scans `α = j/N`, `j < N`, keeping only minor-arc points. Ties in the
/// maximum resolve to the smallest `α`.
pub fn minor_arc_sup_scan(
    x: u64,
    h: u64,
    params: &ArcParams,
    grid_nodes: u64,
    table: &SieveTable,
) -> Result<MinorScan> {
    if grid_nodes < MIN_SCAN_NODES {
        return Err(Error::invalid(format!(
            "grid needs at least {MIN_SCAN_NODES} nodes, got {grid_nodes}"
        )));
    }
    let hi = x.checked_add(h).ok_or(Error::Overflow("X + H"))?;
    table.slice(x, hi)?;
    let values: Vec<Option<f64>> = (0..grid_nodes)
        .into_par_iter()
        .map(|j| {
            let alpha = j as f64 / grid_nodes as f64;
            match classify(params, alpha) {
                Classification::Major(_) => None,
                Classification::Minor => Some(
                    expsum_divisor(alpha, x, h, table)
                        .expect("table range checked")
                        .norm(),
                ),
            }
        })
        .collect();
    let mut best: Option<(u64, f64)> = None;
    let mut minor_count = 0;
    for (j, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            minor_count += 1;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((j as u64, v));
            }
        }
    }
    let scale = (x as f64).sqrt() * (x as f64).ln();
    Ok(match best {
        Some((j, v)) => MinorScan {
            nodes: grid_nodes,
            minor_count,
            empty: false,
            max: v,
            argmax: j as f64 / grid_nodes as f64,
            ratio: v / scale,
        },
        None => MinorScan {
            nodes: grid_nodes,
            minor_count: 0,
            empty: true,
            max: 0.0,
            argmax: f64::NAN,
            ratio: 0.0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::sieve_divisor_count;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_classify(params: &ArcParams, alpha: f64) -> Option<(u64, u64)> {
        for q in 1..=params.p {
            for a in 0..=q {
                if gcd(a, q) == 1 && (alpha - a as f64 / q as f64).abs() < params.radius(q) {
                    return Some((a, q));
                }
            }
        }
        None
    }

    #[test]
    fn default_parameters_at_one_million() {
        let p = ArcParams::new(1_000_000, DEFAULT_ETA).unwrap();
        assert_eq!((p.p, p.q), (23, 575));
        assert!(p.p * p.p <= p.q);
        assert!(ArcParams::new(1_000_000, 0.0).is_err());
        assert!(ArcParams::new(10, 0.2).is_err());
        assert!(ArcParams::explicit(100, 5, 9).is_err());
        assert!(ArcParams::explicit(100, 3, 9).is_ok());
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_approx(1.0 / 3.0, 10).unwrap(), (1, 3));
        assert_eq!(dirichlet_approx(1e-9, 50).unwrap(), (0, 1));
        let alpha = 0.141_592_653_5;
        let (a, q) = dirichlet_approx(alpha, 120).unwrap();
        // 1/7 misses: |α - 1/7| ≈ 1.26e-3 > 1/840
        assert!((alpha - 1.0 / 7.0).abs() > 1.0 / 840.0);
        assert_eq!((a, q), (16, 113));
        assert!((alpha - a as f64 / q as f64).abs() <= 1.0 / (q as f64 * 120.0));
        assert!(dirichlet_approx(0.3, 0).is_err());
        assert_eq!(dirichlet_approx(1.0 - 1e-12, 1000).unwrap(), (1, 1));
    }

    #[test]
    fn dirichlet_against_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let alpha: f64 = rng.gen();
            let bound = rng.gen_range(1..=200u64);
            let (a, q) = dirichlet_approx(alpha, bound).unwrap();
            assert!(q >= 1 && q <= bound);
            assert_eq!(gcd(a, q), 1);
            let err = (alpha - a as f64 / q as f64).abs();
            assert!(err <= 1.0 / (q as f64 * bound as f64) * (1.0 + 1e-12));
            let exists = (1..=bound).any(|q| {
                let a = (alpha * q as f64).round();
                (alpha - a / q as f64).abs() <= 1.0 / (q as f64 * bound as f64)
            });
            assert!(exists);
        }
    }

    #[test]
    fn classification_examples() {
        let p = ArcParams::new(1_000_000, DEFAULT_ETA).unwrap();
        match classify(&p, 0.0) {
            Classification::Major(arc) => assert_eq!((arc.a, arc.q), (0, 1)),
            Classification::Minor => panic!("0 must be major"),
        }
        assert_eq!(classify(&p, 0.5 + 2.0 / p.q as f64), Classification::Minor);
        assert!(classify(&p, 0.999_999).is_major());
    }

    #[test]
    fn classification_matches_brute_force() {
        let p = ArcParams::new(1_000_000, DEFAULT_ETA).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut major = 0;
        for _ in 0..2000 {
            let alpha: f64 = rng.gen();
            let got = match classify(&p, alpha) {
                Classification::Major(arc) => {
                    assert!(arc.contains(alpha) && arc.q <= p.p);
                    major += 1;
                    Some((arc.a, arc.q))
                }
                Classification::Minor => None,
            };
            assert_eq!(got, brute_classify(&p, alpha), "α = {alpha}");
        }
        assert!(major > 0);
        // arcs near a/q with small q are hit on purpose
        for q in 1..=p.p {
            for a in 0..=q {
                if gcd(a, q) == 1 {
                    let alpha = (a as f64 / q as f64 + 0.5 * p.radius(q)).min(0.999_999_9);
                    assert_eq!(classify(&p, alpha).is_major(), brute_classify(&p, alpha).is_some());
                }
            }
        }
    }

    #[test]
    fn major_arcs_are_disjoint() {
        for x in [10_000u64, 100_000, 1_000_000] {
            for eta in [0.01, 0.02, 0.05] {
                let Ok(p) = ArcParams::new(x, eta) else { continue };
                let arcs = p.major_arcs();
                for w in arcs.windows(2) {
                    assert!(
                        w[0].center() + w[0].radius <= w[1].center() - w[1].radius,
                        "X={x} η={eta}: {:?} overlaps {:?}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }

    #[test]
    fn main_integral_closed_form_and_refinement() {
        let z = major_arc_main_integral(3, 0.0, 1_000_000, 1000).unwrap();
        assert_eq!(z, Complex64::new(ju2_main(3, 1_000_000, 1000).unwrap(), 0.0));
        let (x, h, beta) = (1_000_000u64, 1000u64, 1e-6);
        let base = major_arc_main_integral(1, beta, x, h).unwrap();
        let fine = major_arc_integral_with(1, beta, x, h, 10 * integral_panels(beta, h));
        assert!((base - fine).norm() / fine.norm() < 1e-9);
        for (q, beta) in [(1u64, 0.3), (7, -0.01), (2, 1e-3)] {
            let z = major_arc_main_integral(q, beta, x, h).unwrap();
            let bound = h as f64 * p2q_star_raw(q, (x + h) as f64);
            assert!(z.norm() <= bound);
            // symmetry of the real integrand
            let w = major_arc_main_integral(q, -beta, x, h).unwrap();
            assert!((z - w.conj()).norm() < 1e-9 * bound);
        }
        assert!(major_arc_main_integral(1, 1.5, x, h).is_err());
    }

    #[test]
    fn sine_kernel_small_t_vanishes() {
        let v = sine_kernel_term(1, 110, 100, 20, 1e-12).unwrap();
        assert!(v.abs() < 1e-9);
        assert!(sine_kernel_term(1, 110, 100, 20, 0.0).is_err());
    }

    #[test]
    fn sine_kernel_matches_beta_integral() {
        let (x, h) = (100u64, 20u64);
        for q in 1..=3u64 {
            let t = 1.0 / (q as f64 * 9.0);
            for n in [95u64, 101, 110, 120, 130] {
                let kernel = sine_kernel_term(q, n, x, h, t).unwrap();
                let oracle = quad::integrate(-t, t, 64, |beta| {
                    let main = major_arc_integral_with(q, beta, x, h, 64);
                    let twist = if beta >= 0.0 { e_mul(n, beta).conj() } else { e_mul(n, -beta) };
                    (main * twist).re
                });
                assert!((kernel - oracle).abs() < 1e-6 * oracle.abs().max(1e-3), "q={q} n={n}: {kernel} vs {oracle}");
            }
        }
    }

    #[test]
    fn sine_kernel_far_from_interval_is_small() {
        let (x, h, q) = (100u64, 20u64, 1u64);
        let t = 1.0 / 9.0;
        let n = 400u64;
        let v = sine_kernel_term(q, n, x, h, t).unwrap();
        // |sin| ≤ 1 and |x - n| ≥ dist on the whole interval
        let dist = (n - x - h) as f64;
        let bound = p2q_star_raw(q, (x + h) as f64) * h as f64 / (std::f64::consts::PI * dist);
        assert!(v.abs() <= bound);
    }

    #[test]
    fn main_term_forms_agree_on_small_instance() {
        let ds = DigitSet::new(10, 7).unwrap();
        let p = ArcParams::explicit(100, 3, 9).unwrap();
        let sk = theorem_main_term(&ds, 100, 20, &p, MainTermForm::SineKernel, DEFAULT_NODE_BUDGET).unwrap();
        let bq = theorem_main_term(&ds, 100, 20, &p, MainTermForm::BetaQuadrature, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(sk.set_size, 18);
        assert!((sk.value - bq.value).abs() / sk.value.abs() < 1e-6, "{} vs {}", sk.value, bq.value);
        assert!(bq.imag_residue < IMAG_RESIDUE_TOL);
        assert!(matches!(
            theorem_main_term(&ds, 100, 20, &p, MainTermForm::BetaQuadrature, 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn main_term_empty_set() {
        let ds = DigitSet::new(10, 7).unwrap();
        let p = ArcParams::explicit(100, 3, 9).unwrap();
        // (10⁴·7 ... ] is not a power; use (10⁴, 10⁴] instead
        let m = theorem_main_term(&ds, 10_000, 0, &p, MainTermForm::SineKernel, 1000).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(theorem_main_term(&ds, 120, 5, &p, MainTermForm::SineKernel, 1000).is_err());
    }

    #[test]
    fn major_arc_error_ratio_is_finite() {
        let (x, h) = (1_000_000u64, 10_000u64);
        let t = sieve_divisor_count(x, x + h).unwrap();
        let r = lemma35_error(0, 1, 0.0, x, h, &t, DEFAULT_EPS).unwrap();
        assert!(r.ratio.is_finite() && r.raw > 0.0);
        assert!(r.ratio < 1.0);
        assert!(lemma35_error(2, 4, 0.0, x, h, &t, DEFAULT_EPS).is_err());
    }

    #[test]
    fn minor_scan_degenerate_and_refinement() {
        let (x, h) = (10_000u64, 1000u64);
        let t = sieve_divisor_count(x, x + h).unwrap();
        let all_major = ArcParams { x, eta: f64::NAN, p: 5, q: 1 };
        let s = minor_arc_sup_scan(x, h, &all_major, MIN_SCAN_NODES, &t).unwrap();
        assert!(s.empty && s.minor_count == 0);

        let p = ArcParams::explicit(x, 4, 20).unwrap();
        let coarse = minor_arc_sup_scan(x, h, &p, 10_000, &t).unwrap();
        let fine = minor_arc_sup_scan(x, h, &p, 20_000, &t).unwrap();
        assert!(!coarse.empty && fine.max >= coarse.max);
        assert!(minor_arc_sup_scan(x, h, &p, 9_999, &t).is_err());
    }
}
