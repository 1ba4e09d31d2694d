//! Twisted Voronoi apparatus for `S₂(a/q; x) = Σ_{n ≤ x} d₂(n) e(an/q)`.
//!
//! Main terms `p₂,q` / `p*₂,q`, the residual `Δ(a/q; x)` exactly and through
//! its truncated cosine expansion, the short-interval boundary formula, the
//! reflection to a dual sum near `a/q`, and the mean square of `Δ`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ntheory::{gcd, mod_inverse, CumulativeDivisor, SieveTable};
use crate::phase::{e, reduce_unit, DyadicPhase};
use crate::quad::{self, GL8_NODES, GL8_WEIGHTS};
use crate::sum::{ComplexSum, NeumaierSum};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// `ζ(3/2)`.
pub const ZETA_3_2: f64 = 2.612_375_348_685_488;
/// `ζ(3)`.
pub const ZETA_3: f64 = 1.202_056_903_159_594;

/// Constants entering the divisor main terms and the mean-square law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiConstants {
    pub gamma: f64,
    pub zeta32: f64,
    pub zeta3: f64,
    /// `ζ(3/2)⁴ / (6π² ζ(3))`.
    pub moment_c: f64,
}

impl VoronoiConstants {
    pub fn new() -> Self {
        VoronoiConstants {
            gamma: EULER_GAMMA,
            zeta32: ZETA_3_2,
            zeta3: ZETA_3,
            moment_c: ZETA_3_2.powi(4) / (6.0 * PI * PI * ZETA_3),
        }
    }
}

impl Default for VoronoiConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `ζ(s)` for real `s > 1` by Euler–Maclaurin with `N = 20` and six
/// Bernoulli corrections.
pub fn zeta(s: f64) -> f64 {
    const N: f64 = 20.0;
    // B_{2j} / (2j)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut acc = NeumaierSum::new();
    for n in 1..(N as u32) {
        acc.add((n as f64).powf(-s));
    }
    acc.add(N.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * N.powf(-s));
    // s(s+1)…(s+2j-2) · N^{-s-2j+1}
    let mut rising = s;
    let mut power = N.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        acc.add(b * rising * power);
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power /= N * N;
    }
    acc.value()
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("x must be positive, got {x}")))
    }
}

#[inline]
pub(crate) fn p2q_raw(q: u64, x: f64) -> f64 {
    let q = q as f64;
    (x.ln() + 2.0 * EULER_GAMMA - 1.0 - 2.0 * q.ln()) / q
}

#[inline]
pub(crate) fn p2q_star_raw(q: u64, x: f64) -> f64 {
    let q = q as f64;
    (x.ln() + 2.0 * EULER_GAMMA - 2.0 * q.ln()) / q
}

/// `p₂,q(x) = (log x + 2γ - 1 - 2 log q)/q`.
pub fn p2q(q: u64, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(p2q_raw(q.max(1), x))
}

/// `p*₂,q(x) = (log x + 2γ - 2 log q)/q`, the derivative of `x·p₂,q(x)`.
pub fn p2q_star(q: u64, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(p2q_star_raw(q.max(1), x))
}

/// `d₂(n)` for `n ∈ [lo, hi]` recovered from prefix sums.
fn divisor_values(cum: &CumulativeDivisor, lo: u64, hi: u64) -> Result<impl Iterator<Item = (u64, u64)> + '_> {
    if lo == 0 || hi > cum.up_to() {
        return Err(Error::RangeMismatch {
            lo: 1,
            hi: cum.up_to(),
            need_lo: lo,
            need_hi: hi,
        });
    }
    Ok((lo..=hi).map(move |n| (n, cum.at(n) - cum.at(n - 1))))
}

/// Exact divisor sums per residue class mod `q` over `[lo, hi]`.
///
/// Twisting by `e(ar/q)` afterwards gives `Σ d₂(n) e(an/q)` for every `a`
/// from one pass over the interval.
#[derive(Debug, Clone)]
pub struct ResidueBuckets {
    q: u64,
    sums: Vec<u64>,
}

impl ResidueBuckets {
    pub fn from_cumulative(cum: &CumulativeDivisor, q: u64, lo: u64, hi: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("q must be ≥ 1"));
        }
        let mut sums = vec![0u64; q as usize];
        if hi >= lo {
            for (n, d) in divisor_values(cum, lo, hi)? {
                sums[(n % q) as usize] += d;
            }
        }
        Ok(ResidueBuckets { q, sums })
    }

    pub fn from_table(table: &SieveTable, q: u64, lo: u64, hi: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("q must be ≥ 1"));
        }
        let mut sums = vec![0u64; q as usize];
        if hi >= lo {
            for (i, &d) in table.slice(lo, hi)?.iter().enumerate() {
                sums[((lo + i as u64) % q) as usize] += d as u64;
            }
        }
        Ok(ResidueBuckets { q, sums })
    }

    pub fn sums(&self) -> &[u64] {
        &self.sums
    }

    /// `Σ_r e(ar/q)·R_r`.
    pub fn twisted(&self, a: u64) -> Complex64 {
        let q = self.q;
        let mut acc = ComplexSum::new();
        for (r, &s) in self.sums.iter().enumerate() {
            if s != 0 {
                let num = (a as u128 * r as u128 % q as u128) as f64;
                acc.add(e(num / q as f64) * s as f64);
            }
        }
        acc.value()
    }
}

fn check_coprime(a: u64, q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::invalid("q must be ≥ 1"));
    }
    let g = gcd(a, q);
    if g != 1 {
        return Err(Error::NotCoprime { a, q, gcd: g });
    }
    Ok(())
}

/// `S₂(a/q; x)` through residue bucketing.
pub fn s2_rational(a: u64, q: u64, x: u64, cum: &CumulativeDivisor) -> Result<Complex64> {
    check_coprime(a, q)?;
    if q == 1 {
        if x > cum.up_to() {
            return Err(Error::RangeMismatch {
                lo: 1,
                hi: cum.up_to(),
                need_lo: 1,
                need_hi: x,
            });
        }
        return Ok(Complex64::new(cum.at(x) as f64, 0.0));
    }
    Ok(ResidueBuckets::from_cumulative(cum, q, 1, x)?.twisted(a))
}

/// `Δ(a/q; x) = S₂(a/q; x) - x·p₂,q(x)`.
pub fn delta_exact(a: u64, q: u64, x: f64, cum: &CumulativeDivisor) -> Result<Complex64> {
    if !(x >= 1.0) {
        return Err(Error::invalid(format!("x must be ≥ 1, got {x}")));
    }
    let s = s2_rational(a, q, x.floor() as u64, cum)?;
    Ok(s - x * p2q_raw(q, x))
}

/// `(π√2)⁻¹ q^{1/2} x^{1/4} Σ_{n≤N} d(n) e(-nā/q) n^{-3/4} cos(4π√(nx)/q - π/4)`.
pub fn delta_truncated(a: u64, q: u64, x: f64, terms: u64, table: &SieveTable) -> Result<Complex64> {
    check_coprime(a, q)?;
    check_x(x)?;
    if terms == 0 {
        return Err(Error::invalid("truncation N must be ≥ 1"));
    }
    let a_bar = mod_inverse(a, q)?;
    let d = table.slice(1, terms)?;
    let qf = q as f64;
    let mut acc = ComplexSum::new();
    for (i, &dn) in d.iter().enumerate() {
        let n = i as u64 + 1;
        let nf = n as f64;
        let amp = dn as f64 * nf.powf(-0.75) * (4.0 * PI * (nf * x).sqrt() / qf - PI / 4.0).cos();
        // e(-nā/q) from the exact residue of nā mod q
        let z = if q == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            let r = (n as u128 * a_bar as u128 % q as u128) as f64;
            e(-r / qf)
        };
        acc.add(z * amp);
    }
    Ok(acc.value() * (qf.sqrt() * x.powf(0.25) / (PI * SQRT_2)))
}

/// `(X+H)p₂,q(X+H) - X p₂,q(X)`, evaluated as `H p₂,q(X+H) + (X/q) log(1 + H/X)`
/// to avoid cancellation.
pub fn ju2_main(q: u64, x: u64, h: u64) -> Result<f64> {
    if q == 0 || x == 0 {
        return Err(Error::invalid("ju2_main needs q ≥ 1 and X ≥ 1"));
    }
    if h == 0 {
        return Ok(0.0);
    }
    let (xf, hf) = (x as f64, h as f64);
    Ok(hf * p2q_raw(q, xf + hf) + xf / q as f64 * (hf / xf).ln_1p())
}

/// `∫_X^{X+H} p*₂,q(x) dx` by composite Gauss–Legendre.
pub fn ju2_quadrature(q: u64, x: u64, h: u64, panels: usize) -> Result<f64> {
    if q == 0 || x == 0 {
        return Err(Error::invalid("needs q ≥ 1 and X ≥ 1"));
    }
    let (xf, hf) = (x as f64, h as f64);
    Ok(quad::integrate(xf, xf + hf, panels, |t| p2q_star_raw(q, t)))
}

/// Reflected short sum near `a/q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub value: Complex64,
    /// Integers `n` summed: `[first, end)`.
    pub first: u64,
    pub end: u64,
    /// Reflected range contained no integer.
    pub degenerate: bool,
    /// `q|β| < X^{-1/2}/10`, outside the regime of the approximation.
    pub outside_regime: bool,
}

/// Integer range `[⌈(qβ)²X⌉, ⌈(qβ)²(X+H)⌉)` of the reflected sum, clipped to `n ≥ 1`.
pub fn reflected_range(q: u64, beta: f64, x: u64, h: u64) -> (u64, u64) {
    let s = (q as f64 * beta).powi(2);
    let lo = (s * x as f64).ceil().max(1.0);
    let hi = (s * (x as f64 + h as f64)).ceil().max(1.0);
    (lo as u64, (hi as u64).max(lo as u64))
}

/// `(q|β|)⁻¹ Σ_{n ∈ [(qβ)²X, (qβ)²(X+H))} d₂(n) e((-ā/q - 1/(q²β)) n)`.
///
/// Negative `β` is evaluated at `(q - a, |β|)` and conjugated, which is the
/// exact symmetry `S₂(-α) = conj S₂(α)`. The table must cover the reflected
/// range; see [`reflected_range`].
pub fn ju1_reflection(a: u64, q: u64, beta: f64, x: u64, h: u64, table: &SieveTable) -> Result<Reflection> {
    check_coprime(a, q)?;
    let (qf, xf) = (q as f64, x as f64);
    if !(beta != 0.0 && beta.abs() < 1.0 / (qf * qf)) {
        return Err(Error::invalid(format!("need 0 < |β| < 1/q², got β = {beta}")));
    }
    if qf > xf.sqrt() {
        return Err(Error::invalid(format!("need q ≤ X^(1/2), got q = {q}")));
    }
    if beta < 0.0 {
        let mirrored = (q - a % q) % q;
        let r = ju1_reflection(mirrored, q, -beta, x, h, table)?;
        return Ok(Reflection {
            value: r.value.conj(),
            ..r
        });
    }
    let a_bar = mod_inverse(a, q)?;
    let (first, end) = reflected_range(q, beta, x, h);
    let outside_regime = qf * beta < 0.1 / xf.sqrt();
    if first >= end {
        return Ok(Reflection {
            value: Complex64::new(0.0, 0.0),
            first,
            end,
            degenerate: true,
            outside_regime,
        });
    }
    let freq = reduce_unit(-(a_bar as f64) / qf - 1.0 / (qf * qf * beta));
    let d = table.slice(first, end - 1)?;
    let phase = DyadicPhase::new(freq);
    let mut acc = ComplexSum::new();
    for (i, &dn) in d.iter().enumerate() {
        acc.add(phase.e(first + i as u64) * dn as f64);
    }
    Ok(Reflection {
        value: acc.value() / (qf * beta),
        first,
        end,
        degenerate: false,
        outside_regime,
    })
}

/// Largest `X` accepted by [`second_moment`].
pub const MAX_MOMENT_X: u64 = 1 << 28;

/// `∫_1^X |S₂(a/q, x) - x p₂,q(x)|² dx` at each requested `X` (ascending),
/// from one pass.
///
/// On `[n, n+1)` the partial sum is a constant `A_n`, so each unit piece is
/// the smooth `|A_n - x p₂,q(x)|²`, integrated by 8-point Gauss–Legendre.
pub fn second_moment_profile(a: u64, q: u64, xs: &[u64], cum: &CumulativeDivisor) -> Result<Vec<f64>> {
    check_coprime(a, q)?;
    let Some(&x_max) = xs.last() else {
        return Ok(Vec::new());
    };
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("X values must be ascending"));
    }
    if x_max > MAX_MOMENT_X {
        return Err(Error::invalid(format!("X = {x_max} exceeds the memory guard {MAX_MOMENT_X}")));
    }
    if q > xs[0].max(1) {
        return Err(Error::invalid(format!("need q ≤ X, got q = {q}")));
    }
    if x_max > cum.up_to() + 1 {
        return Err(Error::RangeMismatch {
            lo: 1,
            hi: cum.up_to(),
            need_lo: 1,
            need_hi: x_max - 1,
        });
    }
    let qf = q as f64;
    let mut partial = ComplexSum::new();
    let mut integral = NeumaierSum::new();
    let mut out = Vec::with_capacity(xs.len());
    let mut next = xs.iter().peekable();
    while next.peek().is_some_and(|&&x| x <= 1) {
        out.push(0.0);
        next.next();
    }
    for n in 1..x_max {
        let d = (cum.at(n) - cum.at(n - 1)) as f64;
        let phase = if q == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            let r = (a as u128 * n as u128 % q as u128) as f64;
            e(r / qf)
        };
        partial.add(phase * d);
        let s = partial.value();
        let mid = n as f64 + 0.5;
        let mut piece = 0.0;
        for (t, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            for x in [mid - 0.5 * t, mid + 0.5 * t] {
                let re = s.re - x * p2q_raw(q, x);
                piece += w * (re * re + s.im * s.im);
            }
        }
        integral.add(0.5 * piece);
        while next.peek().is_some_and(|&&x| x == n + 1) {
            out.push(integral.value());
            next.next();
        }
    }
    Ok(out)
}

/// `∫_1^X |S₂(a/q, x) - x p₂,q(x)|² dx`.
pub fn second_moment(a: u64, q: u64, x: u64, cum: &CumulativeDivisor) -> Result<f64> {
    Ok(second_moment_profile(a, q, &[x], cum)?[0])
}

/// `ζ(3/2)⁴ / (6π² ζ(3)) · q · X^{3/2}`.
pub fn second_moment_prediction(q: u64, x: u64) -> f64 {
    VoronoiConstants::new().moment_c * q as f64 * (x as f64).powf(1.5)
}
