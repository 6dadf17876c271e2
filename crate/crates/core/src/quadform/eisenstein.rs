//! Closed-form representation counts for forms `u² + c·N(α)`.
//!
//! Two families reduce to the Eisenstein norm `N(α) = y² + yz + z²` on
//! `ℤ[ω]`:
//!
//! ```text
//! x² + c(y² + 3z²)              = u² + c·N(α),  α ≡ 0, 1 (mod 2)
//! 4x² + 4xz + (c+1)z² + c(y² + yz)
//!   = (2x + z)² + c(y² + yz + z²) = u² + c·N(α),  α mod 2 tied to u mod 2
//! ```
//!
//! In the second family `u = 2x + z`, so `u ≡ z (mod 2)`: even `u` pairs
//! with `α ∈ {0, 1} mod 2` and odd `u` with `α ∈ {ω, ω²} mod 2`.
//!
//! Norm-`m` elements of `ℤ[ω]` number `6·g(m)` with `g(m) = Σ_{d|m} (-3/d)`.
//! Since 2 is inert, an element of even norm is divisible by 2, and the six
//! units permute the three nonzero classes mod 2 transitively; this gives
//! the count in each class directly from `g(m)`.
//!
//! For `n = s²` the factorization of `n - u² = (s - u)(s + u)` comes from two
//! small factorizations, which makes `r(p², Q)` cheap for large primes `p`.

use super::{Gram, TernaryForm};
use crate::arith::{exact_sqrt, factorize, isqrt, FactorTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `α ∈ {0, 1} mod 2` for every `u`.
    Free,
    /// `α ∈ {0, 1}` for even `u`, `α ∈ {ω, ω²}` for odd `u`.
    Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EisensteinSplit {
    scale: u64,
    coupling: Coupling,
}

impl EisensteinSplit {
    /// Recognizes the two families by their Gram matrices.
    pub fn detect(form: &TernaryForm) -> Option<Self> {
        let g = form.gram();
        let c = g[1][1] / 2;
        if c <= 0 {
            return None;
        }
        let free: Gram = [[2, 0, 0], [0, 2 * c, 0], [0, 0, 6 * c]];
        let parity: Gram = [[8, 0, 4], [0, 2 * c, c], [4, c, 2 + 2 * c]];
        let coupling = if *g == free {
            Coupling::Free
        } else if *g == parity {
            Coupling::Parity
        } else {
            return None;
        };
        Some(Self { scale: c as u64, coupling })
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// `r(n, Q)`. `table` should cover `2·√n` for square `n` (and `n / c`
    /// otherwise) to avoid trial division.
    pub fn count(&self, n: u64, table: &FactorTable) -> u64 {
        let c = self.scale;
        let c_factors = factorize(c);
        let root = exact_sqrt(n as i128).map(|s| s as u64);
        let umax = isqrt(n as u128) as u64;
        let mut buf: Vec<(u64, u32)> = Vec::with_capacity(24);
        let mut total = 0u64;
        for u in 0..=umax {
            let rest = n - u * u;
            if !rest.is_multiple_of(c) {
                continue;
            }
            let m = rest / c;
            let odd_class = self.coupling == Coupling::Parity && u % 2 == 1;
            let cnt = if m == 0 {
                u64::from(!odd_class)
            } else {
                buf.clear();
                match root {
                    Some(s) => {
                        table.factor_into(s - u, &mut buf);
                        table.factor_into(s + u, &mut buf);
                        for &(p, e) in &c_factors {
                            buf.push((p, e));
                        }
                        class_count(m, divisor_chi3_sum(&mut buf, &c_factors), odd_class)
                    }
                    None => {
                        table.factor_into(m, &mut buf);
                        class_count(m, divisor_chi3_sum(&mut buf, &[]), odd_class)
                    }
                }
            };
            total += if u == 0 { cnt } else { 2 * cnt };
        }
        total
    }
}

/// Number of `α` with `N(α) = m > 0` in the requested classes mod 2.
fn class_count(m: u64, g: u64, odd_class: bool) -> u64 {
    if m % 2 == 1 {
        // units spread evenly over the three nonzero classes
        if odd_class {
            4 * g
        } else {
            2 * g
        }
    } else if odd_class || !m.is_multiple_of(4) {
        0
    } else {
        6 * g
    }
}

/// `Σ_{d|m} (-3/d)` from a factor list. Entries of `subtract` were appended
/// to `buf` and are removed (their exponents subtracted) here.
fn divisor_chi3_sum(buf: &mut [(u64, u32)], subtract: &[(u64, u32)]) -> u64 {
    let split = buf.len() - subtract.len();
    buf[..split].sort_unstable_by_key(|&(p, _)| p);
    let mut g = 1u64;
    let mut i = 0;
    while i < split {
        let p = buf[i].0;
        let mut e: i64 = 0;
        while i < split && buf[i].0 == p {
            e += buf[i].1 as i64;
            i += 1;
        }
        e -= subtract.iter().filter(|&&(q, _)| q == p).map(|&(_, f)| f as i64).sum::<i64>();
        debug_assert!(e >= 0);
        match p % 3 {
            0 => {}
            1 => g *= (e + 1) as u64,
            _ => {
                if e % 2 == 1 {
                    return 0;
                }
            }
        }
    }
    g
}
