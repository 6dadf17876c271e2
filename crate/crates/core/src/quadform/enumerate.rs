//! Exact ellipsoid enumeration.
//!
//! With `x` the coordinate of smallest diagonal entry and `a = G_xx / 2`,
//! completing the square gives
//!
//! ```text
//! 4a·Q(v) = (2a·x + B(y, z))² + R(y, z)
//! ```
//!
//! where `B` is linear and `R` is a positive-definite integral binary form.
//! The outer pair `(y, z)` ranges over the integer points of the ellipse
//! `R <= 4a·n`; the inner coordinate is then solved exactly. All bounds are
//! integer computations, so no vector on the boundary is ever missed.

use super::TernaryForm;
use crate::arith::{exact_sqrt, isqrt, isqrt_ceil};

#[derive(Debug, Clone)]
pub struct Enumerator {
    inner: usize,
    outer: [usize; 2],
    /// `G_xx / 2`.
    a: i128,
    /// `B(y, z) = by·y + bz·z`.
    by: i128,
    bz: i128,
    /// `R(y, z) = alpha·y² + beta·yz + gamma·z²`.
    alpha: i128,
    beta: i128,
    gamma: i128,
}

impl Enumerator {
    pub fn new(form: &TernaryForm) -> Self {
        let g = form.gram();
        let inner = (0..3).min_by_key(|&i| g[i][i]).expect("three coordinates");
        let outer = match inner {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        };
        let [j, k] = outer;
        let gi = |r: usize, c: usize| g[r][c] as i128;
        let a = gi(inner, inner) / 2;
        let (by, bz) = (gi(inner, j), gi(inner, k));
        // 4a·C(y,z) - B(y,z)², with C(y,z) = (G_jj/2) y² + G_jk yz + (G_kk/2) z²
        let alpha = 2 * a * gi(j, j) - by * by;
        let beta = 4 * a * gi(j, k) - 2 * by * bz;
        let gamma = 2 * a * gi(k, k) - bz * bz;
        Self { inner, outer, a, by, bz, alpha, beta, gamma }
    }

    fn assemble(&self, x: i128, y: i128, z: i128) -> [i64; 3] {
        let mut v = [0i64; 3];
        v[self.inner] = x as i64;
        v[self.outer[0]] = y as i64;
        v[self.outer[1]] = z as i64;
        v
    }

    /// Calls `f(y, z, R(y,z), B(y,z))` for each outer pair with `R <= bound`.
    fn for_each_outer(&self, bound: i128, mut f: impl FnMut(i128, i128, i128, i128)) {
        let (al, be, ga) = (self.alpha, self.beta, self.gamma);
        let delta = 4 * al * ga - be * be;
        // z²·delta <= 4·alpha·bound
        let zmax = isqrt((4 * al * bound / delta) as u128) as i128;
        for z in -zmax..=zmax {
            let disc = 4 * al * bound - delta * z * z;
            if disc < 0 {
                continue;
            }
            let s = isqrt_ceil(disc as u128) as i128;
            let ylo = (-be * z - s).div_euclid(2 * al);
            let yhi = -((be * z - s).div_euclid(2 * al));
            for y in ylo..=yhi {
                let r = al * y * y + be * y * z + ga * z * z;
                if r <= bound {
                    f(y, z, r, self.by * y + self.bz * z);
                }
            }
        }
    }

    /// Visits every `v` with `Q(v) <= n_max`, passing `Q(v)`.
    pub fn for_each_vector(&self, n_max: u64, mut f: impl FnMut([i64; 3], u64)) {
        let four_a = 4 * self.a;
        let bound = four_a * n_max as i128;
        let two_a = 2 * self.a;
        self.for_each_outer(bound, |y, z, r, b| {
            // (2a x + b)² <= bound - r
            let s = isqrt((bound - r) as u128) as i128;
            let xlo = -((b + s).div_euclid(two_a));
            let xhi = (s - b).div_euclid(two_a);
            for x in xlo..=xhi {
                let t = two_a * x + b;
                let q = (t * t + r) / four_a;
                f(self.assemble(x, y, z), q as u64);
            }
        });
    }

    /// Visits every `v` with `Q(v) = n`.
    pub fn for_each_of_norm(&self, n: u64, mut f: impl FnMut([i64; 3])) {
        let two_a = 2 * self.a;
        let bound = 4 * self.a * n as i128;
        self.for_each_outer(bound, |y, z, r, b| {
            let Some(s) = exact_sqrt(bound - r) else { return };
            for t in if s == 0 { vec![0] } else { vec![-s, s] } {
                let num = t - b;
                if num % two_a == 0 {
                    f(self.assemble(num / two_a, y, z));
                }
            }
        });
    }

    pub fn count(&self, n: u64) -> u64 {
        let mut c = 0;
        self.for_each_of_norm(n, |_| c += 1);
        c
    }

    pub fn vectors_of_norm(&self, n: u64) -> Vec<[i64; 3]> {
        let mut out = Vec::new();
        self.for_each_of_norm(n, |v| out.push(v));
        out
    }
}
