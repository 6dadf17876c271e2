//! Integer number theory: primes, Möbius, squarefree tests, the Kronecker
//! symbol and fundamental discriminants.

use std::fmt;

use crate::error::{invalid, Result};

/// Primality table and prime list up to `limit`.
#[derive(Clone)]
pub struct PrimeSieve {
    limit: u64,
    composite: Vec<bool>,
    primes: Vec<u64>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(invalid(format!("sieve limit must be at least 2, got {limit}")));
        }
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        composite[0] = true;
        composite[1] = true;
        let mut i = 2usize;
        while i * i <= n {
            if !composite[i] {
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
            i += 1;
        }
        let primes = (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect();
        Ok(Self { limit, composite, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// # Panics
    /// If `n` exceeds the sieve limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        !self.composite[n as usize]
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `p <= bound` (clamped to the sieve limit).
    pub fn primes_up_to(&self, bound: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..end]
    }
}

impl fmt::Debug for PrimeSieve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeSieve")
            .field("limit", &self.limit)
            .field("count", &self.primes.len())
            .finish()
    }
}

/// Smallest-prime-factor table for fast factorization of small integers.
#[derive(Debug, Clone)]
pub struct FactorTable {
    spf: Vec<u32>,
}

impl FactorTable {
    pub fn new(limit: u64) -> Self {
        let n = limit.max(2) as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Appends the prime factorization of `n` (with multiplicity, ascending)
    /// to `out`. Falls back to trial division above the table limit.
    pub fn factor_into(&self, mut n: u64, out: &mut Vec<(u64, u32)>) {
        if n > self.limit() {
            out.extend(factorize(n));
            return;
        }
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut d = 5u64;
    let mut step = 2;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn moebius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(invalid("moebius(0) is undefined"));
    }
    let mut mu = 1i8;
    for (_, e) in factorize(n) {
        if e > 1 {
            return Ok(0);
        }
        mu = -mu;
    }
    Ok(mu)
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(invalid("squarefree test of 0 is undefined"));
    }
    Ok(factorize(n).iter().all(|&(_, e)| e == 1))
}

fn squarefree_abs(n: i64) -> bool {
    n != 0 && factorize(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// The Kronecker symbol `(a/n)`, extended completely multiplicatively to all
/// integers `n`: `(a/2)` by `a mod 8`, `(a/-1)` by the sign of `a`, and
/// `(a/0) = 1` exactly when `a = ±1`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    // (a/2) for odd a, indexed by a mod 8
    const TAB2: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

    let mut a = a as i128;
    let mut b = n as i128;
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k: i8 = if v.is_multiple_of(2) { 1 } else { TAB2[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // b is odd and positive from here on
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    match d.rem_euclid(4) {
        1 => squarefree_abs(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree_abs(m)
        }
        _ => false,
    }
}

/// A fundamental discriminant. `1` is admitted and stands for the trivial
/// symbol; use [`FundamentalDiscriminant::field`] where a genuine quadratic
/// field is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental_discriminant(d) {
            Ok(Self(d))
        } else {
            Err(invalid(format!("{d} is not a fundamental discriminant")))
        }
    }

    /// Like [`new`](Self::new) but rejects `D = 1`.
    pub fn field(d: i64) -> Result<Self> {
        if d == 1 {
            return Err(invalid("D = 1 does not define a quadratic field"));
        }
        Self::new(d)
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 1
    }

    /// `χ_D(n)`.
    pub fn chi(self, n: i64) -> i8 {
        kronecker(self.0, n)
    }
}

impl fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Floor square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Ceiling square root.
pub fn isqrt_ceil(n: u128) -> u128 {
    let r = isqrt(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// `Some(r)` when `n = r²`.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128) as i128;
    (r * r == n).then_some(r)
}
