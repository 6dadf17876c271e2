//! Square-class coefficient series, the Shimura lift, its Möbius inverse,
//! twists and the CM vanishing check.
//!
//! A half-integral weight form `f` of weight `k + 1/2` is seen only through
//! its square class `n ↦ a(t n²)`. The `t`-th lift has coefficients
//!
//! ```text
//! A(n) = Σ_{d | n} ψ_{t,N}(d) d^{k-1} a(t (n/d)²)
//! ```
//!
//! and, because `d ↦ ψ_{t,N}(d) d^{k-1}` is completely multiplicative, the
//! inverse is the same sum twisted by `μ(d)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{self, FundamentalDiscriminant};
use crate::characters::DirichletCharacter;
use crate::error::{invalid, Error, Result};
use crate::rational::{self, pow_u64, Rational};

/// Read access to `a(t n²)` shared by dense and prime-indexed series.
pub trait SquareClassSeries {
    fn t(&self) -> u64;
    /// The form has weight `k + 1/2`.
    fn k(&self) -> u32;
    /// `a(t n²)`.
    fn coefficient(&self, n: u64) -> Result<&Rational>;
    /// Largest `n` with a stored coefficient.
    fn max_index(&self) -> u64;
}

/// Dense table `n ↦ a(t n²)` for `1 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    t: u64,
    k: u32,
    level: u64,
    psi: DirichletCharacter,
    values: Vec<Rational>,
}

fn check_t_k(t: u64, k: u32) -> Result<()> {
    if t == 0 || !arith::is_squarefree(t)? {
        return Err(invalid(format!("t = {t} must be squarefree and positive")));
    }
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    Ok(())
}

impl CoefficientSeries {
    /// `values[n - 1] = a(t n²)`.
    pub fn new(
        t: u64,
        k: u32,
        level: u64,
        psi: DirichletCharacter,
        values: Vec<Rational>,
    ) -> Result<Self> {
        check_t_k(t, k)?;
        if values.is_empty() {
            return Err(invalid("a coefficient series needs at least a(t)"));
        }
        if level == 0 {
            return Err(invalid("level must be positive"));
        }
        Ok(Self { t, k, level, psi, values })
    }

    pub fn zero(t: u64, k: u32, level: u64, psi: DirichletCharacter, n_max: u64) -> Result<Self> {
        Self::new(t, k, level, psi, vec![Rational::zero(); n_max as usize])
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn psi(&self) -> &DirichletCharacter {
        &self.psi
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `a(t)`.
    pub fn base(&self) -> &Rational {
        &self.values[0]
    }

    pub fn psi_tn(&self) -> Result<DirichletCharacter> {
        DirichletCharacter::psi_tn(&self.psi, self.t, self.k)
    }

    /// Keeps the prime indices only.
    pub fn restrict_to_primes(&self) -> PrimeSeries {
        let sieve = arith::PrimeSieve::new(self.n_max().max(2)).expect("limit >= 2");
        let values = sieve
            .primes_up_to(self.n_max())
            .iter()
            .map(|&p| (p, self.values[p as usize - 1].clone()))
            .collect();
        PrimeSeries { t: self.t, k: self.k, values }
    }

    /// CSV with header `n,numerator,denominator`.
    pub fn to_csv(&self) -> String {
        values_to_csv(&self.values)
    }

    pub fn from_csv(
        text: &str,
        t: u64,
        k: u32,
        level: u64,
        psi: DirichletCharacter,
    ) -> Result<Self> {
        Self::new(t, k, level, psi, values_from_csv(text)?)
    }
}

impl SquareClassSeries for CoefficientSeries {
    fn t(&self) -> u64 {
        self.t
    }

    fn k(&self) -> u32 {
        self.k
    }

    fn coefficient(&self, n: u64) -> Result<&Rational> {
        if n == 0 || n > self.n_max() {
            return Err(Error::Range { needed: n, available: self.n_max() });
        }
        Ok(&self.values[n as usize - 1])
    }

    fn max_index(&self) -> u64 {
        self.n_max()
    }
}

/// `p ↦ a(t p²)` on a set of primes only. Used where a dense table up to the
/// largest prime would be too expensive to compute.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeSeries {
    t: u64,
    k: u32,
    values: BTreeMap<u64, Rational>,
}

impl PrimeSeries {
    pub fn new(t: u64, k: u32, values: BTreeMap<u64, Rational>) -> Result<Self> {
        check_t_k(t, k)?;
        Ok(Self { t, k, values })
    }

    pub fn values(&self) -> &BTreeMap<u64, Rational> {
        &self.values
    }
}

impl SquareClassSeries for PrimeSeries {
    fn t(&self) -> u64 {
        self.t
    }

    fn k(&self) -> u32 {
        self.k
    }

    fn coefficient(&self, n: u64) -> Result<&Rational> {
        self.values
            .get(&n)
            .ok_or(Error::Range { needed: n, available: self.max_index() })
    }

    fn max_index(&self) -> u64 {
        self.values.keys().next_back().copied().unwrap_or(0)
    }
}

/// Coefficients `n ↦ A(n)` of the lift `f_t` of weight `2k` and level `N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftSeries {
    t: u64,
    k: u32,
    source_level: u64,
    psi: DirichletCharacter,
    psi_tn: DirichletCharacter,
    values: Vec<Rational>,
}

impl LiftSeries {
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `A(n)`, `n >= 1`.
    pub fn get(&self, n: u64) -> Result<&Rational> {
        if n == 0 || n > self.len() {
            return Err(Error::Range { needed: n, available: self.len() });
        }
        Ok(&self.values[n as usize - 1])
    }

    pub fn weight(&self) -> u32 {
        2 * self.k
    }

    pub fn level(&self) -> u64 {
        self.source_level / 2
    }

    pub fn psi_tn(&self) -> &DirichletCharacter {
        &self.psi_tn
    }

    /// `λ(n) = A(n) / n^{k - 1/2}`, for diagnostics only.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        let a = rational::to_f64(self.get(n)?);
        Ok(a / (n as f64).powf(self.k as f64 - 0.5))
    }

    pub fn to_csv(&self) -> String {
        values_to_csv(&self.values)
    }
}

fn real_weights(psi_tn: &DirichletCharacter, k: u32, len: u64) -> Result<Vec<Rational>> {
    if !psi_tn.is_real() {
        return Err(Error::Unsupported(
            "ψ_{t,N} is not real; only real square-class series are supported".into(),
        ));
    }
    (1..=len)
        .map(|d| {
            let s = psi_tn.eval_real(d as i64)?;
            Ok(pow_u64(d, k - 1) * rational::from_int(s as i64))
        })
        .collect()
}

/// `A(n) = Σ_{d|n} ψ(d) d^{k-1} a(n/d)` on raw values (`values[n-1] = a(t n²)`).
pub fn lift_values(values: &[Rational], psi_tn: &DirichletCharacter, k: u32) -> Result<Vec<Rational>> {
    let len = values.len() as u64;
    let w = real_weights(psi_tn, k, len)?;
    let mut out = vec![Rational::zero(); values.len()];
    for d in 1..=len {
        let wd = &w[d as usize - 1];
        if wd.is_zero() {
            continue;
        }
        let mut n = d;
        let mut m = 1;
        while n <= len {
            out[n as usize - 1] += wd * &values[m as usize - 1];
            n += d;
            m += 1;
        }
    }
    Ok(out)
}

/// `a(n) = Σ_{d|n} μ(d) ψ(d) d^{k-1} A(n/d)`.
pub fn mobius_invert_values(
    lift: &[Rational],
    psi_tn: &DirichletCharacter,
    k: u32,
) -> Result<Vec<Rational>> {
    let len = lift.len() as u64;
    let w = real_weights(psi_tn, k, len)?;
    let mut out = vec![Rational::zero(); lift.len()];
    for d in 1..=len {
        let mu = arith::moebius(d)?;
        let wd = &w[d as usize - 1];
        if mu == 0 || wd.is_zero() {
            continue;
        }
        let coeff = if mu > 0 { wd.clone() } else { -wd };
        let mut n = d;
        let mut m = 1;
        while n <= len {
            out[n as usize - 1] += &coeff * &lift[m as usize - 1];
            n += d;
            m += 1;
        }
    }
    Ok(out)
}

/// The `t`-th Shimura lift over the full range of `s`.
pub fn shimura_lift(s: &CoefficientSeries) -> Result<LiftSeries> {
    let psi_tn = s.psi_tn()?;
    let values = lift_values(&s.values, &psi_tn, s.k)?;
    Ok(LiftSeries {
        t: s.t,
        k: s.k,
        source_level: s.level,
        psi: s.psi.clone(),
        psi_tn,
        values,
    })
}

/// A single lift coefficient `A(n)`.
pub fn shimura_lift_at(s: &CoefficientSeries, n: u64) -> Result<Rational> {
    if n == 0 || n > s.n_max() {
        return Err(Error::Range { needed: n, available: s.n_max() });
    }
    let psi_tn = s.psi_tn()?;
    if !psi_tn.is_real() {
        return Err(Error::Unsupported("ψ_{t,N} is not real".into()));
    }
    let mut acc = Rational::zero();
    for d in arith::divisors(n) {
        let sign = psi_tn.eval_real(d as i64)?;
        if sign == 0 {
            continue;
        }
        let term = pow_u64(d, s.k - 1) * s.coefficient(n / d)?;
        if sign > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Recovers the square-class series from its lift.
pub fn mobius_invert(lift: &LiftSeries) -> Result<CoefficientSeries> {
    let values = mobius_invert_values(&lift.values, &lift.psi_tn, lift.k)?;
    CoefficientSeries::new(lift.t, lift.k, lift.source_level, lift.psi.clone(), values)
}

/// `n ↦ χ(n) A(n)`. The character must be real to keep coefficients rational.
pub fn twist_series(lift: &LiftSeries, chi: &DirichletCharacter) -> Result<LiftSeries> {
    if !chi.is_real() {
        return Err(Error::Unsupported("twist by a non-real character".into()));
    }
    let values = lift
        .values
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let s = chi.eval_real(i as i64 + 1).expect("real character");
            a * rational::from_int(s as i64)
        })
        .collect();
    Ok(LiftSeries { values, ..lift.clone() })
}

/// Primes `p <= bound` with `χ_D(p) = -1` and `A(p) != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CmReport {
    pub disc: i64,
    pub bound: u64,
    pub checked: Vec<u64>,
    pub violations: Vec<(u64, Rational)>,
}

impl CmReport {
    pub fn is_cm_compatible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `A(p) = 0` at every prime `p <= bound` inert for `D`, skipping
/// primes dividing `exclude` when given.
pub fn cm_vanishing_check(
    lift: &LiftSeries,
    d: FundamentalDiscriminant,
    bound: u64,
    exclude: Option<u64>,
) -> Result<CmReport> {
    if bound > lift.len() {
        return Err(Error::Range { needed: bound, available: lift.len() });
    }
    let mut checked = Vec::new();
    let mut violations = Vec::new();
    if bound >= 2 {
        for &p in arith::PrimeSieve::new(bound)?.primes() {
            if d.chi(p as i64) != -1 || exclude.is_some_and(|m| m % p == 0) {
                continue;
            }
            checked.push(p);
            let a = lift.get(p)?;
            if !a.is_zero() {
                violations.push((p, a.clone()));
            }
        }
    }
    Ok(CmReport { disc: d.value(), bound, checked, violations })
}

fn values_to_csv(values: &[Rational]) -> String {
    let mut out = String::from("n,numerator,denominator\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, v.numer(), v.denom());
    }
    out
}

fn values_from_csv(text: &str) -> Result<Vec<Rational>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty series file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["n", "numerator", "denominator"] {
        return Err(Error::Parse(format!(
            "series header must be `n,numerator,denominator`, got `{header}`"
        )));
    }
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("series row {}: expected 3 fields", i + 1)));
        }
        let n: u64 = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("series row {}: n: {e}", i + 1)))?;
        if n != i as u64 + 1 {
            return Err(Error::Parse(format!("series rows must be n = 1, 2, ...; found {n}")));
        }
        let parse = |s: &str, what: &str| {
            s.parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("series row {n}: {what}: {e}")))
        };
        let den = parse(fields[2], "denominator")?;
        if !den.is_positive() {
            return Err(Error::Parse(format!("series row {n}: denominator must be positive")));
        }
        values.push(rational::from_parts(parse(fields[1], "numerator")?, den)?);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_frac, from_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn principal(n: u64) -> DirichletCharacter {
        DirichletCharacter::principal(n).unwrap()
    }

    fn series(values: Vec<Rational>, t: u64, k: u32, psi: DirichletCharacter) -> CoefficientSeries {
        CoefficientSeries::new(t, k, 4 * psi.modulus(), psi, values).unwrap()
    }

    fn random_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rational> {
        (0..len).map(|_| from_frac(rng.gen_range(-50..=50), rng.gen_range(1..=12))).collect()
    }

    #[test]
    fn lift_at_one_is_base() {
        let s = series(vec![from_int(7), from_int(3)], 1, 1, principal(4));
        assert_eq!(shimura_lift(&s).unwrap().values()[0], from_int(7));
    }

    #[test]
    fn lift_at_prime_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (t, k) in [(1u64, 1u32), (2, 2), (5, 3), (3, 1)] {
            let psi = DirichletCharacter::kronecker_symbol(12).unwrap();
            let s = series(random_values(&mut rng, 100), t, k, psi);
            let lift = shimura_lift(&s).unwrap();
            let ptn = s.psi_tn().unwrap();
            for p in arith::PrimeSieve::new(100).unwrap().primes() {
                let expect = from_int(ptn.eval_real(*p as i64).unwrap() as i64)
                    * pow_u64(*p, k - 1)
                    * s.base()
                    + s.coefficient(*p).unwrap();
                assert_eq!(lift.get(*p).unwrap(), &expect, "t={t} k={k} p={p}");
            }
        }
    }

    #[test]
    fn nebentypus_decides_a5() {
        let values = vec![from_int(-1); 5];
        let plain = CoefficientSeries::new(1, 1, 576, principal(576), values.clone()).unwrap();
        assert_eq!(shimura_lift_at(&plain, 5).unwrap(), from_int(-2));
        let chi12 = DirichletCharacter::kronecker_symbol(12).unwrap().multiply(&principal(576));
        let twisted = CoefficientSeries::new(1, 1, 576, chi12, values).unwrap();
        assert_eq!(shimura_lift_at(&twisted, 5).unwrap(), from_int(0));
    }

    #[test]
    fn pointwise_lift_matches_sieve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = series(random_values(&mut rng, 60), 1, 2, principal(8));
        let lift = shimura_lift(&s).unwrap();
        for n in 1..=60 {
            assert_eq!(&shimura_lift_at(&s, n).unwrap(), lift.get(n).unwrap());
        }
        assert!(matches!(shimura_lift_at(&s, 61), Err(Error::Range { .. })));
    }

    #[test]
    fn inversion_at_prime() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = series(random_values(&mut rng, 30), 1, 2, principal(4));
        let lift = shimura_lift(&s).unwrap();
        let back = mobius_invert(&lift).unwrap();
        let ptn = lift.psi_tn().clone();
        assert_eq!(back.base(), lift.get(1).unwrap());
        for p in [2u64, 3, 5, 7, 29] {
            let expect = lift.get(p).unwrap()
                - from_int(ptn.eval_real(p as i64).unwrap() as i64) * pow_u64(p, 1) * lift.get(1).unwrap();
            assert_eq!(back.coefficient(p).unwrap(), &expect);
        }
    }

    #[test]
    fn roundtrip_both_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let k = rng.gen_range(1..=3);
            let t = [1u64, 2, 3, 5, 6, 7][rng.gen_range(0..6)];
            let s = series(random_values(&mut rng, 50), t, k, principal(4));
            let lift = shimura_lift(&s).unwrap();
            assert_eq!(mobius_invert(&lift).unwrap().values(), s.values());
            let ptn = lift.psi_tn().clone();
            let inv = mobius_invert_values(s.values(), &ptn, k).unwrap();
            assert_eq!(lift_values(&inv, &ptn, k).unwrap(), s.values());
        }
    }

    #[test]
    fn lift_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = principal(4);
        let a = random_values(&mut rng, 40);
        let b = random_values(&mut rng, 40);
        let (x, y) = (from_frac(3, 7), from_frac(-5, 2));
        let combo: Vec<Rational> = a.iter().zip(&b).map(|(p, q)| &x * p + &y * q).collect();
        let la = shimura_lift(&series(a, 1, 2, psi.clone())).unwrap();
        let lb = shimura_lift(&series(b, 1, 2, psi.clone())).unwrap();
        let lc = shimura_lift(&series(combo, 1, 2, psi)).unwrap();
        for i in 0..40 {
            assert_eq!(lc.values()[i], &x * &la.values()[i] + &y * &lb.values()[i]);
        }
    }

    #[test]
    fn complex_psi_rejected() {
        let mut values = vec![crate::characters::CharValue::Zero; 5];
        let mut g = 1u64;
        for e in 0..4 {
            values[g as usize] =
                crate::characters::CharValue::Root(crate::characters::RootOfUnity::new(4, e).unwrap());
            g = g * 2 % 5;
        }
        let quartic = DirichletCharacter::from_values(5, values).unwrap();
        let s = CoefficientSeries::new(1, 1, 20, quartic.clone(), vec![from_int(1); 5]).unwrap();
        assert!(matches!(shimura_lift(&s), Err(Error::Unsupported(_))));
        let lift = shimura_lift(&series(vec![from_int(1); 5], 1, 1, principal(4))).unwrap();
        assert!(matches!(twist_series(&lift, &quartic), Err(Error::Unsupported(_))));
    }

    #[test]
    fn twists() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let lift = shimura_lift(&series(random_values(&mut rng, 60), 1, 1, principal(4))).unwrap();
        assert_eq!(twist_series(&lift, &principal(1)).unwrap(), lift);

        let n = 6u64;
        let trivial_n2 = principal(n * n);
        let tw = twist_series(&lift, &trivial_n2).unwrap();
        for i in 1..=60u64 {
            if arith::gcd(i, n) > 1 {
                assert!(tw.get(i).unwrap().is_zero());
            } else {
                assert_eq!(tw.get(i).unwrap(), lift.get(i).unwrap());
            }
        }

        let chi = DirichletCharacter::from_kronecker(FundamentalDiscriminant::new(-3).unwrap());
        let twice = twist_series(&twist_series(&lift, &chi).unwrap(), &chi).unwrap();
        for i in 1..=60u64 {
            if arith::gcd(i, chi.conductor()) == 1 {
                assert_eq!(twice.get(i).unwrap(), lift.get(i).unwrap());
            }
        }
    }

    #[test]
    fn cm_checks() {
        let d = FundamentalDiscriminant::new(-3).unwrap();
        let mut values = vec![from_int(1); 20];
        for p in [2usize, 3, 5, 7, 11, 13, 17, 19] {
            values[p - 1] = Rational::zero();
        }
        let lift = LiftSeries {
            t: 1,
            k: 1,
            source_level: 8,
            psi: principal(4),
            psi_tn: principal(4),
            values,
        };
        let rep = cm_vanishing_check(&lift, d, 20, None).unwrap();
        assert!(rep.is_cm_compatible());
        assert_eq!(rep.checked, vec![2, 5, 11, 17]);

        let mut values = vec![Rational::zero(); 10];
        values[4] = from_int(1);
        let lift = LiftSeries { values, ..lift };
        let rep = cm_vanishing_check(&lift, d, 10, None).unwrap();
        assert_eq!(rep.violations, vec![(5, from_int(1))]);
        assert!(matches!(cm_vanishing_check(&lift, d, 11, None), Err(Error::Range { .. })));
    }

    #[test]
    fn csv_roundtrip_and_errors() {
        let s = series(vec![from_frac(-1, 2), from_int(3), from_int(0)], 1, 1, principal(4));
        let text = s.to_csv();
        assert_eq!(text, "n,numerator,denominator\n1,-1,2\n2,3,1\n3,0,1\n");
        let back = CoefficientSeries::from_csv(&text, 1, 1, 16, principal(4)).unwrap();
        assert_eq!(back.values(), s.values());
        assert!(values_from_csv("n,num,den\n1,1,1\n").is_err());
        assert!(values_from_csv("n,numerator,denominator\n2,1,1\n").is_err());
        assert!(values_from_csv("n,numerator,denominator\n1,1,0\n").is_err());
    }

    #[test]
    fn prime_restriction() {
        let s = series((1..=20).map(from_int).collect(), 1, 1, principal(4));
        let ps = s.restrict_to_primes();
        assert_eq!(ps.values().keys().copied().collect::<Vec<_>>(), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(ps.coefficient(7).unwrap(), &from_int(7));
        assert!(ps.coefficient(4).is_err());
        assert_eq!(ps.max_index(), 19);
    }

    #[test]
    fn lambda_normalization() {
        let s = series(vec![from_int(4), from_int(0)], 1, 2, principal(4));
        let lift = shimura_lift(&s).unwrap();
        assert!((lift.lambda(1).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(lift.weight(), 4);
        assert_eq!(lift.level(), 8);
    }
}
