//! Multiplicative-function sieves and Ramanujan sums.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::phase;
use crate::sum::ComplexSum;

/// Largest admissible sieve endpoint.
pub const MAX_SIEVE_HI: u64 = 1 << 62;

/// Largest number of entries a single table may hold.
pub const MAX_SIEVE_LEN: u64 = 1 << 28;

/// Magic prefix of the binary sieve cache format.
pub const CACHE_MAGIC: &[u8; 8] = b"MDDSIEV1";

/// Tolerance on the imaginary part in [`ramanujan_sum_direct`].
pub const DIRECT_IMAG_TOL: f64 = 1e-6;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `⌊√n⌋`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Which arithmetic function a [`SieveTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SieveKind {
    DivisorCount,
    Mobius,
    Totient,
}

impl SieveKind {
    pub fn tag(self) -> u8 {
        match self {
            SieveKind::DivisorCount => 1,
            SieveKind::Mobius => 2,
            SieveKind::Totient => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(SieveKind::DivisorCount),
            2 => Some(SieveKind::Mobius),
            3 => Some(SieveKind::Totient),
            _ => None,
        }
    }
}

/// Values of `d₂`, `μ` or `φ` on the closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveTable {
    lo: u64,
    kind: SieveKind,
    values: Vec<i64>,
}

impl SieveTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.lo + self.values.len() as u64 - 1
    }

    pub fn kind(&self) -> SieveKind {
        self.kind
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: u64) -> Option<i64> {
        if n < self.lo {
            return None;
        }
        self.values.get((n - self.lo) as usize).copied()
    }

    pub fn covers(&self, lo: u64, hi: u64) -> bool {
        lo >= self.lo && hi <= self.hi()
    }

    /// Values for `n ∈ [lo, hi]`, or a range error.
    pub fn slice(&self, lo: u64, hi: u64) -> Result<&[i64]> {
        if lo > hi || !self.covers(lo, hi) {
            return Err(Error::RangeMismatch {
                lo: self.lo,
                hi: self.hi(),
                need_lo: lo,
                need_hi: hi,
            });
        }
        let start = (lo - self.lo) as usize;
        let end = (hi - self.lo) as usize;
        Ok(&self.values[start..=end])
    }

    /// Serialises in the `MDDSIEV1` cache format.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&[self.kind.tag()])?;
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi().to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Reads a table written by [`SieveTable::write_cache`].
    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache(format!("unknown magic {magic:?}")));
        }
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let kind = SieveKind::from_tag(tag[0])
            .ok_or_else(|| Error::Cache(format!("unknown kind tag {}", tag[0])))?;
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let lo = u64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let hi = u64::from_le_bytes(word);
        if hi < lo || hi - lo >= MAX_SIEVE_LEN {
            return Err(Error::Cache(format!("bad range [{lo}, {hi}]")));
        }
        let len = (hi - lo + 1) as usize;
        let mut bytes = vec![0u8; len * 8];
        r.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| i64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok(SieveTable { lo, kind, values })
    }
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 {
        return Err(Error::invalid("d₂(0) is undefined; lo must be ≥ 1"));
    }
    if hi < lo {
        return Err(Error::invalid(format!("empty range: hi = {hi} < lo = {lo}")));
    }
    if hi > MAX_SIEVE_HI {
        return Err(Error::Overflow("sieve endpoint above 2^62"));
    }
    if hi - lo >= MAX_SIEVE_LEN {
        return Err(Error::invalid(format!(
            "sieve of {} entries exceeds the memory guard",
            hi - lo + 1
        )));
    }
    Ok(())
}

/// `d₂(n)` for `n ∈ [lo, hi]`.
///
/// Every `d ≤ √hi` marks its multiples `m ≥ d²` in the window, which counts
/// the divisors `d ≤ √m`; then `d₂(m) = 2·count − [m is a square]`.
pub fn sieve_divisor_count(lo: u64, hi: u64) -> Result<SieveTable> {
    check_range(lo, hi)?;
    let len = (hi - lo + 1) as usize;
    let mut small = vec![0i64; len];
    let root = isqrt(hi);
    for d in 1..=root {
        let floor = lo.max(d * d);
        let start = floor.div_ceil(d) * d;
        let mut m = start;
        while m <= hi {
            small[(m - lo) as usize] += 1;
            m += d;
        }
    }
    for c in small.iter_mut() {
        *c *= 2;
    }
    let mut s = isqrt(lo - 1) + 1;
    while s * s <= hi {
        small[(s * s - lo) as usize] -= 1;
        s += 1;
    }
    Ok(SieveTable {
        lo,
        kind: SieveKind::DivisorCount,
        values: small,
    })
}

// Linear sieve returning the smallest prime factor for 0..=n.
fn least_prime_factors(n: usize) -> (Vec<u32>, Vec<u32>) {
    let mut lpf = vec![0u32; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if lpf[i] == 0 {
            lpf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > lpf[i] || ip > n {
                break;
            }
            lpf[ip] = p;
        }
    }
    (lpf, primes)
}

fn check_table_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("table size must be ≥ 1"));
    }
    if n > MAX_SIEVE_LEN || n > u32::MAX as u64 {
        return Err(Error::invalid(format!("table of {n} entries exceeds the memory guard")));
    }
    Ok(())
}

/// `μ(k)` for `k ∈ [1, n]`.
pub fn sieve_mobius(n: u64) -> Result<SieveTable> {
    check_table_n(n)?;
    let n = n as usize;
    let (lpf, _) = least_prime_factors(n);
    let mut mu = vec![0i64; n + 1];
    mu[1] = 1;
    for k in 2..=n {
        let p = lpf[k] as usize;
        let r = k / p;
        mu[k] = if r % p == 0 { 0 } else { -mu[r] };
    }
    Ok(SieveTable {
        lo: 1,
        kind: SieveKind::Mobius,
        values: mu.split_off(1),
    })
}

/// `φ(k)` for `k ∈ [1, n]`.
pub fn sieve_totient(n: u64) -> Result<SieveTable> {
    check_table_n(n)?;
    let n = n as usize;
    let (lpf, _) = least_prime_factors(n);
    let mut phi = vec![0i64; n + 1];
    phi[1] = 1;
    for k in 2..=n {
        let p = lpf[k] as usize;
        let r = k / p;
        phi[k] = if r % p == 0 {
            phi[r] * p as i64
        } else {
            phi[r] * (p as i64 - 1)
        };
    }
    Ok(SieveTable {
        lo: 1,
        kind: SieveKind::Totient,
        values: phi.split_off(1),
    })
}

/// `(μ(n), φ(n))` by trial division.
pub fn mobius_totient(mut n: u64) -> (i64, u64) {
    assert!(n >= 1);
    let mut mu = 1i64;
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1u64;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            mu = if pk == p { -mu } else { 0 };
            phi *= pk / p * (p - 1);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        mu = -mu;
        phi *= n - 1;
    }
    (mu, phi)
}

/// `c_q(n) = μ(q/d)·φ(q)/φ(q/d)` with `d = gcd(n, q)`.
pub fn ramanujan_sum(q: u64, n: u64) -> Result<i64> {
    if q == 0 {
        return Err(Error::invalid("Ramanujan sum needs q ≥ 1"));
    }
    let d = gcd(n, q);
    let (mu_r, phi_r) = mobius_totient(q / d);
    if mu_r == 0 {
        return Ok(0);
    }
    let (_, phi_q) = mobius_totient(q);
    Ok(mu_r * (phi_q / phi_r) as i64)
}

/// `c_q(n)` from its defining sum `Σ_{a ≤ q, (a,q)=1} e(an/q)`.
pub fn ramanujan_sum_direct(q: u64, n: u64) -> Result<i64> {
    if q == 0 {
        return Err(Error::invalid("Ramanujan sum needs q ≥ 1"));
    }
    let r = n % q;
    let acc: ComplexSum = (1..=q)
        .filter(|&a| gcd(a, q) == 1)
        .map(|a| {
            let num = ((a as u128 * r as u128) % q as u128) as f64;
            phase::e(num / q as f64)
        })
        .collect();
    let z = acc.value();
    if z.im.abs() >= DIRECT_IMAG_TOL {
        return Err(Error::Numerical(format!(
            "c_{q}({n}) has imaginary residue {:.3e}",
            z.im
        )));
    }
    Ok(z.re.round() as i64)
}

/// Precomputed `μ` and `φ` for repeated `c_q(n)` with `q ≤ q_max`.
#[derive(Debug, Clone)]
pub struct RamanujanTable {
    mu: Vec<i64>,
    phi: Vec<i64>,
}

impl RamanujanTable {
    pub fn new(q_max: u64) -> Result<Self> {
        let q_max = q_max.max(1);
        Ok(RamanujanTable {
            mu: sieve_mobius(q_max)?.values,
            phi: sieve_totient(q_max)?.values,
        })
    }

    pub fn q_max(&self) -> u64 {
        self.mu.len() as u64
    }

    /// `c_q(n)`; panics if `q` is outside `[1, q_max]`.
    #[inline]
    pub fn c(&self, q: u64, n: u64) -> i64 {
        let d = gcd(n, q);
        let r = (q / d) as usize;
        let mu = self.mu[r - 1];
        if mu == 0 {
            0
        } else {
            mu * (self.phi[q as usize - 1] / self.phi[r - 1])
        }
    }
}

/// `ā ∈ [0, q)` with `a·ā ≡ 1 (mod q)`; `q = 1` gives `0`.
pub fn mod_inverse(a: u64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::invalid("modulus must be ≥ 1"));
    }
    let g = gcd(a, q);
    if g != 1 {
        return Err(Error::NotCoprime { a, q, gcd: g });
    }
    if q == 1 {
        return Ok(0);
    }
    let (mut old_r, mut r) = ((a % q) as i128, q as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    Ok(old_s.rem_euclid(q as i128) as u64)
}

/// Prefix sums `Σ_{n ≤ m} d₂(n)` for `m ∈ [1, up_to]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulativeDivisor {
    partial_sums: Vec<u64>,
}

impl CumulativeDivisor {
    pub fn up_to(&self) -> u64 {
        self.partial_sums.len() as u64
    }

    /// Entry `m - 1` is `Σ_{n ≤ m} d₂(n)`.
    pub fn partial_sums(&self) -> &[u64] {
        &self.partial_sums
    }

    /// `Σ_{n ≤ m} d₂(n)`, zero for `m = 0`; panics past `up_to`.
    #[inline]
    pub fn at(&self, m: u64) -> u64 {
        if m == 0 {
            0
        } else {
            self.partial_sums[m as usize - 1]
        }
    }

    pub fn from_table(table: &SieveTable) -> Result<Self> {
        if table.kind() != SieveKind::DivisorCount || table.lo() != 1 {
            return Err(Error::invalid("cumulative sums need a d₂ table starting at 1"));
        }
        let mut acc = 0u64;
        let partial_sums = table
            .values()
            .iter()
            .map(|&d| {
                acc += d as u64;
                acc
            })
            .collect();
        Ok(CumulativeDivisor { partial_sums })
    }
}

pub fn cumulative_divisor(up_to: u64) -> Result<CumulativeDivisor> {
    CumulativeDivisor::from_table(&sieve_divisor_count(1, up_to)?)
}
