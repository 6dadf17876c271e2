//! Positive-definite integral ternary quadratic forms.
//!
//! A form is stored through its doubled Gram matrix `G` (even diagonal), so
//! `Q(v) = ½ vᵀ G v` and the bilinear form is `B(v, w) = ½ vᵀ G w`. Forms with
//! odd cross coefficients such as `4x² + 48y² + 49z² + 4xz + 48yz` are then
//! exactly representable.

pub mod automorph;
mod counter;
mod eisenstein;
mod enumerate;

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::Rational;

pub use automorph::Isometry;
pub use counter::RepresentationCounter;
pub use eisenstein::{Coupling, EisensteinSplit};
pub use enumerate::Enumerator;

pub type Gram = [[i64; 3]; 3];

#[derive(Clone, PartialEq, Eq)]
pub struct TernaryForm {
    name: String,
    gram: Gram,
}

impl TernaryForm {
    pub fn new(name: impl Into<String>, gram: Gram) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                if gram[i][j] != gram[j][i] {
                    return Err(invalid(format!("gram is not symmetric at ({i},{j})")));
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(invalid(format!("gram diagonal entry {i} is odd")));
            }
        }
        let m1 = gram[0][0] as i128;
        let m2 = m1 * gram[1][1] as i128 - (gram[0][1] as i128).pow(2);
        if m1 <= 0 || m2 <= 0 || det3(&gram) <= 0 {
            return Err(invalid("gram matrix is not positive definite"));
        }
        Ok(Self { name: name.into(), gram })
    }

    /// `a x² + b y² + c z² + d yz + e xz + f xy`.
    pub fn from_coefficients(name: impl Into<String>, coeffs: [i64; 6]) -> Result<Self> {
        let [a, b, c, d, e, f] = coeffs;
        Self::new(name, [[2 * a, f, e], [f, 2 * b, d], [e, d, 2 * c]])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn evaluate(&self, v: [i64; 3]) -> u64 {
        let g = &self.gram;
        let mut twice = 0i128;
        for i in 0..3 {
            for j in 0..3 {
                twice += v[i] as i128 * g[i][j] as i128 * v[j] as i128;
            }
        }
        (twice / 2) as u64
    }

    /// `vᵀ G w`, i.e. twice the bilinear form.
    pub fn gram_product(&self, v: [i64; 3], w: [i64; 3]) -> i64 {
        let g = &self.gram;
        let mut acc = 0i64;
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i] * g[i][j] * w[j];
            }
        }
        acc
    }

    /// `det(G)`.
    pub fn gram_determinant(&self) -> i128 {
        det3(&self.gram)
    }

    /// Level `N` (least `N` with `N G⁻¹` integral with even diagonal) and
    /// determinant `det(G) / 8`, the determinant of the half-Gram matrix.
    pub fn level_and_determinant(&self) -> (u64, Rational) {
        let det = det3(&self.gram);
        let adj = adjugate(&self.gram);
        let mut level: u128 = 1;
        for i in 0..3 {
            for j in 0..3 {
                let (num, den) = if i == j { (adj[i][j], 2 * det) } else { (adj[i][j], det) };
                let need = den as u128 / num_integer::gcd(num.unsigned_abs(), den as u128);
                level = num_integer::lcm(level, need);
            }
        }
        (level as u64, Rational::new(BigInt::from(det), BigInt::from(8)))
    }

    pub fn level(&self) -> u64 {
        self.level_and_determinant().0
    }

    pub fn enumerator(&self) -> Enumerator {
        Enumerator::new(self)
    }

    /// `r(n, Q)` by ellipsoid enumeration.
    pub fn representation_count(&self, n: u64) -> u64 {
        self.enumerator().count(n)
    }

    /// Number of `v` with `Q(v) = n` and `gcd(v) = 1`.
    pub fn primitive_representation_count(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(invalid("0 has no primitive representations"));
        }
        Ok(self
            .enumerator()
            .vectors_of_norm(n)
            .into_iter()
            .filter(|v| {
                let g = num_integer::gcd(num_integer::gcd(v[0], v[1]), v[2]);
                g.abs() == 1
            })
            .count() as u64)
    }

    /// `r(n, Q)` for `0 <= n <= n_max` from one enumeration sweep.
    pub fn theta_coefficients(&self, n_max: u64) -> Vec<u64> {
        let mut out = vec![0u64; n_max as usize + 1];
        self.enumerator().for_each_vector(n_max, |_, q| out[q as usize] += 1);
        out
    }

    /// All `U ∈ GL₃(ℤ)` with `Uᵀ G U = G`.
    pub fn automorphisms(&self) -> Vec<Isometry> {
        automorph::automorphisms(self)
    }

    /// Whether `other` is in the same class, i.e. `ℤ`-equivalent.
    pub fn is_isometric(&self, other: &TernaryForm) -> bool {
        automorph::isometry(self, other).is_some()
    }

    pub fn automorphism_order(&self) -> u64 {
        self.automorphisms().len() as u64
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: FormFile = serde_json::from_str(json)
            .map_err(|e| Error::Parse(format!("form definition: {e}")))?;
        file.build()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_file(&self) -> FormFile {
        FormFile { name: self.name.clone(), gram: self.gram }
    }
}

impl fmt::Debug for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryForm({:?}, {:?})", self.name, self.gram)
    }
}

impl fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.gram;
        let terms = [
            (g[0][0] / 2, "x²"),
            (g[1][1] / 2, "y²"),
            (g[2][2] / 2, "z²"),
            (g[0][1], "xy"),
            (g[0][2], "xz"),
            (g[1][2], "yz"),
        ];
        let mut first = true;
        for (c, m) in terms {
            if c == 0 {
                continue;
            }
            let sep = if first { "" } else if c < 0 { " - " } else { " + " };
            let c = if first { c } else { c.abs() };
            let coeff = if c == 1 { String::new() } else { c.to_string() };
            write!(f, "{sep}{coeff}{m}")?;
            first = false;
        }
        Ok(())
    }
}

/// On-disk form definition: `{"name": "Q2", "gram": [[8,0,4],[0,96,48],[4,48,98]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub name: String,
    pub gram: Gram,
}

impl FormFile {
    pub fn build(&self) -> Result<TernaryForm> {
        TernaryForm::new(self.name.clone(), self.gram)
    }
}

fn det3(g: &Gram) -> i128 {
    let m = |i: usize, j: usize| g[i][j] as i128;
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

fn adjugate(g: &Gram) -> [[i128; 3]; 3] {
    let mut adj = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = g[r0][c0] as i128 * g[r1][c1] as i128 - g[r0][c1] as i128 * g[r1][c0] as i128;
            adj[i][j] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

/// The two classes of the spinor genus used in the constant-sign example.
pub mod fixtures {
    use super::TernaryForm;

    /// `x² + 48y² + 144z²`.
    pub fn q1() -> TernaryForm {
        TernaryForm::from_coefficients("Q1", [1, 48, 144, 0, 0, 0]).expect("valid form")
    }

    /// `4x² + 48y² + 49z² + 4xz + 48yz`.
    pub fn q2() -> TernaryForm {
        TernaryForm::from_coefficients("Q2", [4, 48, 49, 48, 4, 0]).expect("valid form")
    }

    /// `x² + y² + z²`.
    pub fn sum_of_three_squares() -> TernaryForm {
        TernaryForm::from_coefficients("I3", [1, 1, 1, 0, 0, 0]).expect("valid form")
    }
}
