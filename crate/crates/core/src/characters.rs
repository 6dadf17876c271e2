//! Dirichlet characters with exact values.
//!
//! A character is a dense value table mod its modulus. Values are roots of
//! unity stored as reduced fractions `exp/order` of a full turn, so products
//! and equality are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, kronecker, lcm, FundamentalDiscriminant};
use crate::error::{invalid, Error, Result};

/// `exp(2πi · exp / order)`, kept reduced with `0 <= exp < order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    order: u32,
    exp: u32,
}

impl RootOfUnity {
    pub const ONE: Self = Self { order: 1, exp: 0 };
    pub const MINUS_ONE: Self = Self { order: 2, exp: 1 };

    pub fn new(order: u32, exp: u32) -> Result<Self> {
        if order == 0 {
            return Err(invalid("root of unity with order 0"));
        }
        let e = exp % order;
        let g = gcd(order as u64, e as u64) as u32;
        Ok(Self { order: order / g, exp: e / g })
    }

    pub fn order(self) -> u32 {
        self.order
    }

    pub fn exp(self) -> u32 {
        self.exp
    }

    pub fn mul(self, other: Self) -> Self {
        let order = lcm(self.order as u64, other.order as u64);
        let e = self.exp as u64 * (order / self.order as u64)
            + other.exp as u64 * (order / other.order as u64);
        Self::new(order as u32, (e % order) as u32).expect("nonzero order")
    }

    pub fn conj(self) -> Self {
        Self::new(self.order, self.order - self.exp).expect("nonzero order")
    }

    /// `±1` as an integer, or `None` for a non-real root.
    pub fn as_sign(self) -> Option<i8> {
        match (self.order, self.exp) {
            (1, 0) => Some(1),
            (2, 1) => Some(-1),
            _ => None,
        }
    }
}

/// A character value: zero or a root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharValue {
    Zero,
    Root(RootOfUnity),
}

impl CharValue {
    pub const ONE: Self = CharValue::Root(RootOfUnity::ONE);
    pub const MINUS_ONE: Self = CharValue::Root(RootOfUnity::MINUS_ONE);

    pub fn from_sign(s: i8) -> Self {
        match s {
            0 => CharValue::Zero,
            s if s > 0 => CharValue::ONE,
            _ => CharValue::MINUS_ONE,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (CharValue::Root(a), CharValue::Root(b)) => CharValue::Root(a.mul(b)),
            _ => CharValue::Zero,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, CharValue::Zero)
    }

    /// The value as an integer in `{-1, 0, 1}` if it is real.
    pub fn real(self) -> Option<i8> {
        match self {
            CharValue::Zero => Some(0),
            CharValue::Root(r) => r.as_sign(),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<CharValue>,
    conductor: u64,
}

impl DirichletCharacter {
    /// Builds a character from a value table, checking the zero pattern,
    /// `χ(1) = 1` and multiplicativity.
    pub fn from_values(modulus: u64, values: Vec<CharValue>) -> Result<Self> {
        if modulus == 0 {
            return Err(invalid("character modulus must be positive"));
        }
        if values.len() as u64 != modulus {
            return Err(invalid(format!(
                "character table has {} entries, modulus is {modulus}",
                values.len()
            )));
        }
        for (a, v) in values.iter().enumerate() {
            let coprime = gcd(a as u64, modulus) == 1;
            if coprime == v.is_zero() {
                return Err(invalid(format!(
                    "value at residue {a} must be {} mod {modulus}",
                    if coprime { "nonzero" } else { "zero" }
                )));
            }
        }
        if values[(1 % modulus) as usize] != CharValue::ONE {
            return Err(invalid("character must take the value 1 at 1"));
        }
        // Multiplicativity against every prime below the modulus implies it
        // for every pair, since each unit residue is a product of such primes.
        if modulus > 2 {
            let primes = arith::PrimeSieve::new(modulus)?;
            for &p in primes.primes() {
                if modulus.is_multiple_of(p) {
                    continue;
                }
                let vp = values[p as usize];
                for a in 0..modulus {
                    let lhs = values[((a * p) % modulus) as usize];
                    if lhs != values[a as usize].mul(vp) {
                        return Err(invalid(format!(
                            "table is not multiplicative at {a} * {p} mod {modulus}"
                        )));
                    }
                }
            }
        }
        Ok(Self::from_checked(modulus, values))
    }

    fn from_checked(modulus: u64, values: Vec<CharValue>) -> Self {
        let mut chi = Self { modulus, values, conductor: modulus };
        chi.conductor = chi.compute_conductor();
        chi
    }

    fn from_fn(modulus: u64, f: impl Fn(u64) -> CharValue) -> Self {
        let values = (0..modulus)
            .map(|a| if gcd(a, modulus) == 1 { f(a) } else { CharValue::Zero })
            .collect();
        Self::from_checked(modulus, values)
    }

    pub fn principal(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(invalid("character modulus must be positive"));
        }
        Ok(Self::from_fn(modulus, |_| CharValue::ONE))
    }

    /// `χ_D(n) = (D/n)` as a character mod `|D|` (mod 1 for `D = 1`).
    pub fn from_kronecker(d: FundamentalDiscriminant) -> Self {
        let m = d.value().unsigned_abs();
        Self::from_fn(m, |a| CharValue::from_sign(kronecker(d.value(), a as i64)))
    }

    /// `n ↦ (a/n)` for an arbitrary nonzero integer `a`, as a character mod
    /// `4|a|`. For fundamental `a` this is the character induced from
    /// [`from_kronecker`](Self::from_kronecker).
    pub fn kronecker_symbol(a: i64) -> Result<Self> {
        if a == 0 {
            return Err(invalid("Kronecker symbol character needs a nonzero upper entry"));
        }
        let m = 4 * a.unsigned_abs();
        Ok(Self::from_fn(m, |n| CharValue::from_sign(kronecker(a, n as i64))))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn values(&self) -> &[CharValue] {
        &self.values
    }

    pub fn eval(&self, n: i64) -> CharValue {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// `χ(n)` as an integer; errors if the value is not real.
    pub fn eval_real(&self, n: i64) -> Result<i8> {
        self.eval(n).real().ok_or_else(|| {
            Error::Unsupported(format!("character mod {} is not real at {n}", self.modulus))
        })
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.real().is_some())
    }

    pub fn is_principal(&self) -> bool {
        self.conductor == 1
    }

    /// Pointwise product, mod the lcm of the moduli.
    pub fn multiply(&self, other: &Self) -> Self {
        let m = lcm(self.modulus, other.modulus);
        Self::from_fn(m, |a| self.eval(a as i64).mul(other.eval(a as i64)))
    }

    pub fn conj(&self) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| match v {
                CharValue::Zero => CharValue::Zero,
                CharValue::Root(r) => CharValue::Root(r.conj()),
            })
            .collect();
        Self::from_checked(self.modulus, values)
    }

    /// `ψ_{t,N}(d) = ψ(d) · ((-1)^k t / d)`.
    pub fn psi_tn(psi: &Self, t: u64, k: u32) -> Result<Self> {
        if t == 0 || !arith::is_squarefree(t)? {
            return Err(invalid(format!("t = {t} must be a squarefree positive integer")));
        }
        if k == 0 {
            return Err(invalid("weight index k must be positive"));
        }
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        let symbol = Self::kronecker_symbol(sign * t as i64)?;
        Ok(psi.multiply(&symbol))
    }

    /// Value of the primitive character inducing `self` at a residue `a` that
    /// is coprime to the conductor.
    fn primitive_value(&self, a: u64) -> CharValue {
        let f = self.conductor;
        let mut b = a % f;
        while gcd(b, self.modulus) != 1 {
            b += f;
        }
        self.values[(b % self.modulus) as usize]
    }

    /// `χ1 ≃ χ2`: agreement at every residue class mod `lcm(f1, f2)` coprime
    /// to `f1 f2`, where `f1`, `f2` are the conductors. Each such class
    /// contains infinitely many primes, so this is the same as agreement at
    /// all primes not dividing either conductor.
    pub fn almost_equal(&self, other: &Self) -> bool {
        let (f1, f2) = (self.conductor, other.conductor);
        let m = lcm(f1, f2);
        (0..m)
            .filter(|&a| gcd(a, f1 * f2) == 1)
            .all(|a| self.primitive_value(a) == other.primitive_value(a))
    }

    fn compute_conductor(&self) -> u64 {
        let n = self.modulus;
        arith::divisors(n)
            .into_iter()
            .find(|&d| {
                (1..n)
                    .step_by(d as usize)
                    .filter(|&a| gcd(a, n) == 1)
                    .all(|a| self.values[a as usize] == CharValue::ONE)
            })
            .unwrap_or(n)
    }

    pub fn to_literal(&self) -> CharacterLiteral {
        CharacterLiteral::Table {
            modulus: self.modulus,
            values: self
                .values
                .iter()
                .map(|v| match v {
                    CharValue::Zero => ValueLiteral::Zero(0),
                    CharValue::Root(r) => ValueLiteral::Root([r.order, r.exp]),
                })
                .collect(),
        }
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus)
            .field("conductor", &self.conductor)
            .field("real", &self.is_real())
            .finish()
    }
}

/// Character literal as written in configuration files:
/// `{"kronecker": D}` or `{"modulus": N, "values": [[q, e] | 0, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CharacterLiteral {
    Kronecker { kronecker: i64 },
    Table { modulus: u64, values: Vec<ValueLiteral> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueLiteral {
    Zero(u8),
    Root([u32; 2]),
}

impl CharacterLiteral {
    pub fn build(&self) -> Result<DirichletCharacter> {
        match self {
            CharacterLiteral::Kronecker { kronecker } => Ok(DirichletCharacter::from_kronecker(
                FundamentalDiscriminant::new(*kronecker)?,
            )),
            CharacterLiteral::Table { modulus, values } => {
                let vals = values
                    .iter()
                    .map(|v| match v {
                        ValueLiteral::Zero(0) => Ok(CharValue::Zero),
                        ValueLiteral::Zero(x) => {
                            Err(invalid(format!("character value {x} is not 0 or [q, e]")))
                        }
                        ValueLiteral::Root([q, e]) => RootOfUnity::new(*q, *e).map(CharValue::Root),
                    })
                    .collect::<Result<Vec<_>>>()?;
                DirichletCharacter::from_values(*modulus, vals)
            }
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("character literal: {e}")))
    }
}
