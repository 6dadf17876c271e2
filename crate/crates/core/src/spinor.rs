//! Class sets of a spinor genus (or genus), Siegel–Weil averages and the
//! decomposition `θ_Q = E + H + f`.
//!
//! For a class set `{K}` the mass-weighted average is
//!
//! ```text
//! r(n, spn) = (Σ_K 1/|O(K)|)⁻¹ · Σ_K r(n, K)/|O(K)|
//! ```
//!
//! and the cuspidal coefficient of the distinguished form `Q` is
//! `a_f(n, Q) = r(n, Q) - r(n, spn(Q))`. With genus data as well,
//! `a_E(n) = r(n, gen)` and `a_H(n) = r(n, spn) - r(n, gen)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::characters::{CharacterLiteral, DirichletCharacter};
use crate::error::{invalid, Error, Result};
use crate::quadform::{FormFile, RepresentationCounter, TernaryForm};
use crate::rational::{self, Rational};
use crate::shimura::{CoefficientSeries, PrimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    #[serde(rename = "spinor-genus")]
    SpinorGenus,
    #[serde(rename = "genus")]
    Genus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassEntry {
    pub form: TernaryForm,
    pub aut_order: u64,
}

#[derive(Debug, Clone)]
pub struct SpinorClassSet {
    kind: ClassKind,
    classes: Vec<ClassEntry>,
    distinguished: usize,
    level: u64,
    determinant: Rational,
    nebentypus: Option<DirichletCharacter>,
}

impl SpinorClassSet {
    /// Builds a class set, computing every automorphism order.
    pub fn new(kind: ClassKind, forms: Vec<TernaryForm>, distinguished: usize) -> Result<Self> {
        Self::with_aut_orders(kind, forms.into_iter().map(|f| (f, None)).collect(), distinguished)
    }

    /// Builds a class set from forms with optionally declared automorphism
    /// orders. Declared orders are checked against the recomputed group.
    pub fn with_aut_orders(
        kind: ClassKind,
        forms: Vec<(TernaryForm, Option<u64>)>,
        distinguished: usize,
    ) -> Result<Self> {
        if forms.is_empty() {
            return Err(invalid("class set is empty"));
        }
        if distinguished >= forms.len() {
            return Err(invalid(format!(
                "distinguished index {distinguished} out of range for {} classes",
                forms.len()
            )));
        }
        let (level, determinant) = forms[0].0.level_and_determinant();
        let mut classes = Vec::with_capacity(forms.len());
        for (form, declared) in forms {
            let (l, d) = form.level_and_determinant();
            if l != level || d != determinant {
                return Err(invalid(format!(
                    "class {} has level {l} and determinant {d}, expected {level} and {determinant}",
                    form.name()
                )));
            }
            let aut_order = form.automorphism_order();
            if let Some(declared) = declared {
                if declared != aut_order {
                    return Err(Error::Inconsistent(format!(
                        "class {} declares |O| = {declared} but the automorphism group has order {aut_order}",
                        form.name()
                    )));
                }
            }
            classes.push(ClassEntry { form, aut_order });
        }
        Ok(Self { kind, classes, distinguished, level, determinant, nebentypus: None })
    }

    pub fn with_nebentypus(mut self, psi: DirichletCharacter) -> Self {
        self.nebentypus = Some(psi);
        self
    }

    /// Same classes with a different distinguished form.
    pub fn with_distinguished(mut self, index: usize) -> Result<Self> {
        if index >= self.classes.len() {
            return Err(invalid(format!("distinguished index {index} out of range")));
        }
        self.distinguished = index;
        Ok(self)
    }

    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    pub fn classes(&self) -> &[ClassEntry] {
        &self.classes
    }

    pub fn distinguished_index(&self) -> usize {
        self.distinguished
    }

    pub fn distinguished(&self) -> &TernaryForm {
        &self.classes[self.distinguished].form
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn determinant(&self) -> &Rational {
        &self.determinant
    }

    /// The character of the theta series, when the class-set data supplies it.
    pub fn nebentypus(&self) -> Option<&DirichletCharacter> {
        self.nebentypus.as_ref()
    }

    /// `Σ_K 1/|O(K)|`.
    pub fn mass(&self) -> Rational {
        self.classes.iter().map(|c| rational::from_frac(1, c.aut_order as i64)).sum()
    }

    /// Mass-weighted average of per-class counts (in class order).
    pub fn average_of(&self, counts: &[u64]) -> Rational {
        assert_eq!(counts.len(), self.classes.len());
        let weighted: Rational = self
            .classes
            .iter()
            .zip(counts)
            .map(|(c, &r)| rational::from_frac(r as i64, c.aut_order as i64))
            .sum();
        weighted / self.mass()
    }

    /// Counters for every class, sized for arguments up to `n_max`.
    pub fn counters(&self, n_max: u64) -> ClassCounters<'_> {
        ClassCounters {
            set: self,
            counters: self.classes.iter().map(|c| RepresentationCounter::new(&c.form, n_max)).collect(),
        }
    }

    /// `r(n, spn)` (or `r(n, gen)` for a genus set).
    pub fn siegel_weil_average(&self, n: u64) -> Rational {
        self.counters(n).average(n)
    }

    /// `a_f(n, Q) = r(n, Q) - r(n, spn(Q))` for the distinguished form.
    pub fn cusp_coefficient(&self, n: u64) -> Result<Rational> {
        self.require_spinor()?;
        Ok(self.counters(n).cusp(n))
    }

    fn require_spinor(&self) -> Result<()> {
        if self.kind != ClassKind::SpinorGenus {
            return Err(invalid("cusp coefficients need a spinor-genus class set"));
        }
        Ok(())
    }

    fn series_character(&self, psi: Option<&DirichletCharacter>) -> Result<DirichletCharacter> {
        let base = match psi.or(self.nebentypus.as_ref()) {
            Some(p) => p.clone(),
            None => DirichletCharacter::principal(1)?,
        };
        Ok(base.multiply(&DirichletCharacter::principal(self.level)?))
    }

    /// Dense weight-3/2 series `n ↦ a_f(t n², Q)` for `1 <= n <= n_max`.
    /// `psi` overrides the stored nebentypus; either is lifted to the level.
    pub fn cusp_series(
        &self,
        t: u64,
        psi: Option<&DirichletCharacter>,
        n_max: u64,
    ) -> Result<CoefficientSeries> {
        self.require_spinor()?;
        if n_max == 0 {
            return Err(invalid("n_max must be positive"));
        }
        let top = t * n_max * n_max;
        let counters = self.counters(top);
        // theta sweeps for classes without a closed-form count
        let sweeps: Vec<Option<Vec<u64>>> = self
            .classes
            .iter()
            .zip(&counters.counters)
            .map(|(c, ctr)| (!ctr.uses_closed_form()).then(|| c.form.theta_coefficients(top)))
            .collect();
        let values = (1..=n_max)
            .map(|n| {
                let m = t * n * n;
                let counts: Vec<u64> = counters
                    .counters
                    .iter()
                    .zip(&sweeps)
                    .map(|(ctr, sweep)| match sweep {
                        Some(theta) => theta[m as usize],
                        None => ctr.count(m),
                    })
                    .collect();
                rational::from_int(counts[self.distinguished] as i64) - self.average_of(&counts)
            })
            .collect();
        CoefficientSeries::new(t, 1, self.level, self.series_character(psi)?, values)
    }

    /// `p ↦ a_f(t p², Q)` at the given primes.
    pub fn cusp_prime_series(&self, t: u64, primes: &[u64]) -> Result<PrimeSeries> {
        self.require_spinor()?;
        let top = primes.iter().map(|&p| t * p * p).max().unwrap_or(1);
        let counters = self.counters(top);
        let values: BTreeMap<u64, Rational> =
            primes.iter().map(|&p| (p, counters.cusp(t * p * p))).collect();
        PrimeSeries::new(t, 1, values)
    }

    /// For each prime `p <= prime_bound` accepted by `filter`, records the
    /// class counts at `t p²`, the spinor average, the cusp coefficient, and
    /// whether every class keeps `r(t p², K) = r(t, K)`.
    pub fn spinor_exception_scan(
        &self,
        t: u64,
        prime_bound: u64,
        filter: impl Fn(u64) -> bool,
    ) -> Result<ExceptionScan> {
        self.require_spinor()?;
        if t == 0 || !arith::is_squarefree(t)? {
            return Err(invalid(format!("t = {t} must be squarefree and positive")));
        }
        let primes: Vec<u64> = if prime_bound >= 2 {
            arith::PrimeSieve::new(prime_bound)?.primes().iter().copied().filter(|&p| filter(p)).collect()
        } else {
            Vec::new()
        };
        let top = primes.iter().map(|&p| t * p * p).max().unwrap_or(t);
        let counters = self.counters(top);
        let base = counters.counts(t);
        let rows = primes
            .into_iter()
            .map(|p| {
                let n = t * p * p;
                let counts = counters.counts(n);
                let r_spn = self.average_of(&counts);
                let a_f = rational::from_int(counts[self.distinguished] as i64) - &r_spn;
                let stable = counts == base;
                ExceptionRow { p, counts, r_spn, a_f, stable }
            })
            .collect();
        Ok(ExceptionScan { t, base_counts: base, rows })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: ClassSetFile = serde_json::from_str(json)
            .map_err(|e| Error::Parse(format!("class-set file: {e}")))?;
        file.build()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Per-class counters bound to a class set.
pub struct ClassCounters<'a> {
    set: &'a SpinorClassSet,
    counters: Vec<RepresentationCounter>,
}

impl ClassCounters<'_> {
    pub fn counts(&self, n: u64) -> Vec<u64> {
        self.counters.iter().map(|c| c.count(n)).collect()
    }

    pub fn average(&self, n: u64) -> Rational {
        self.set.average_of(&self.counts(n))
    }

    pub fn cusp(&self, n: u64) -> Rational {
        let counts = self.counts(n);
        rational::from_int(counts[self.set.distinguished] as i64) - self.set.average_of(&counts)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionRow {
    pub p: u64,
    pub counts: Vec<u64>,
    pub r_spn: Rational,
    pub a_f: Rational,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionScan {
    pub t: u64,
    /// `r(t, K)` per class.
    pub base_counts: Vec<u64>,
    pub rows: Vec<ExceptionRow>,
}

impl ExceptionScan {
    pub fn all_stable(&self) -> bool {
        self.rows.iter().all(|r| r.stable)
    }

    /// CSV `p,r_class_0,r_class_1,...,r_spn,a_f,stable`; rationals as `n/d`.
    pub fn to_csv(&self) -> String {
        let classes = self.base_counts.len();
        let mut out = String::from("p");
        for i in 0..classes {
            let _ = write!(out, ",r_class_{i}");
        }
        out.push_str(",r_spn,a_f,stable\n");
        for row in &self.rows {
            let _ = write!(out, "{}", row.p);
            for c in &row.counts {
                let _ = write!(out, ",{c}");
            }
            let _ = writeln!(
                out,
                ",{},{},{}",
                rational::encode(&row.r_spn),
                rational::encode(&row.a_f),
                row.stable
            );
        }
        out
    }
}

/// Exact decomposition of `θ_Q` up to `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaDecomposition {
    pub n_max: u64,
    pub source: String,
    /// `r(n, Q)`.
    pub theta: Vec<u64>,
    /// `r(n, spn(Q))`.
    pub spinor_average: Vec<Rational>,
    /// `a_E(n) = r(n, gen)`; present only with genus data.
    pub e_part: Option<Vec<Rational>>,
    /// `a_H(n) = r(n, spn) - r(n, gen)`; present only with genus data.
    pub h_part: Option<Vec<Rational>>,
    /// `a_f(n) = r(n, Q) - r(n, spn)`.
    pub f_part: Vec<Rational>,
}

fn sweep_average(set: &SpinorClassSet, n_max: u64) -> Vec<Rational> {
    let thetas: Vec<Vec<u64>> =
        set.classes.iter().map(|c| c.form.theta_coefficients(n_max)).collect();
    (0..=n_max as usize)
        .map(|n| set.average_of(&thetas.iter().map(|t| t[n]).collect::<Vec<_>>()))
        .collect()
}

pub fn decompose_theta(
    spn: &SpinorClassSet,
    gen: Option<&SpinorClassSet>,
    n_max: u64,
) -> Result<ThetaDecomposition> {
    spn.require_spinor()?;
    if let Some(g) = gen {
        if g.kind != ClassKind::Genus {
            return Err(invalid("genus data must be a class set of kind genus"));
        }
        if g.level != spn.level || g.determinant != spn.determinant {
            return Err(invalid("genus and spinor genus have different level or determinant"));
        }
        for c in &spn.classes {
            if !g.classes.iter().any(|k| k.form.is_isometric(&c.form)) {
                return Err(invalid(format!("class {} is missing from the genus", c.form.name())));
            }
        }
    }
    let theta = spn.distinguished().theta_coefficients(n_max);
    let spinor_average = sweep_average(spn, n_max);
    let f_part = theta
        .iter()
        .zip(&spinor_average)
        .map(|(&r, avg)| rational::from_int(r as i64) - avg)
        .collect();
    let (e_part, h_part) = match gen {
        Some(g) => {
            let e = sweep_average(g, n_max);
            let h = spinor_average.iter().zip(&e).map(|(s, e)| s - e).collect();
            (Some(e), Some(h))
        }
        None => (None, None),
    };
    Ok(ThetaDecomposition {
        n_max,
        source: spn.distinguished().name().to_string(),
        theta,
        spinor_average,
        e_part,
        h_part,
        f_part,
    })
}

/// On-disk class set:
/// `{"kind": "spinor-genus", "distinguished": 1, "classes": [{"name": .., "gram": ..}, ..]}`
/// with optional per-class `"aut_order"` and an optional `"nebentypus"`
/// character literal.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSetFile {
    pub kind: ClassKind,
    pub distinguished: usize,
    pub classes: Vec<ClassFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nebentypus: Option<CharacterLiteral>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    #[serde(flatten)]
    pub form: FormFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<u64>,
}

impl ClassSetFile {
    pub fn build(&self) -> Result<SpinorClassSet> {
        let forms = self
            .classes
            .iter()
            .map(|c| Ok((c.form.build()?, c.aut_order)))
            .collect::<Result<Vec<_>>>()?;
        let set = SpinorClassSet::with_aut_orders(self.kind, forms, self.distinguished)?;
        Ok(match &self.nebentypus {
            Some(lit) => set.with_nebentypus(lit.build()?),
            None => set,
        })
    }
}

/// The shipped `{Q1, Q2}` spinor genus.
pub mod fixtures {
    use super::SpinorClassSet;

    pub const Q1_Q2_JSON: &str = include_str!("../fixtures/q1_q2_spinor.json");

    /// `{Q1, Q2}` with `Q2` distinguished and nebentypus `(12/·)`.
    pub fn q1_q2() -> SpinorClassSet {
        SpinorClassSet::from_json(Q1_Q2_JSON).expect("shipped fixture is valid")
    }
}

impl ThetaDecomposition {
    /// `e + h + f = r(n, Q)` when genus data are present, else
    /// `r(n, spn) + f = r(n, Q)`.
    pub fn identity_holds(&self) -> bool {
        (0..=self.n_max as usize).all(|n| {
            let r = rational::from_int(self.theta[n] as i64);
            let spn_ok = &self.spinor_average[n] + &self.f_part[n] == r;
            let full_ok = match (&self.e_part, &self.h_part) {
                (Some(e), Some(h)) => &e[n] + &h[n] + &self.f_part[n] == r,
                _ => true,
            };
            spn_ok && full_ok
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker;
    use crate::quadform::fixtures::{q1, q2, sum_of_three_squares};
    use crate::rational::from_int;

    fn spn() -> SpinorClassSet {
        fixtures::q1_q2()
    }

    #[test]
    fn fixture_loads() {
        let s = spn();
        assert_eq!(s.kind(), ClassKind::SpinorGenus);
        assert_eq!(s.distinguished().name(), "Q2");
        assert_eq!(s.level(), 576);
        assert_eq!(s.classes().iter().map(|c| c.aut_order).collect::<Vec<_>>(), vec![8, 8]);
        let psi = s.nebentypus().unwrap();
        assert_eq!(psi.eval_real(5).unwrap(), -1);
        assert_eq!(psi.eval_real(11).unwrap(), 1);
        assert_eq!(s.mass(), rational::from_frac(1, 4));
    }

    #[test]
    fn averages_and_cusp_at_one() {
        let s = spn();
        assert_eq!(s.siegel_weil_average(1), from_int(1));
        assert_eq!(s.cusp_coefficient(1).unwrap(), from_int(-1));
        let s1 = s.with_distinguished(0).unwrap();
        assert_eq!(s1.cusp_coefficient(1).unwrap(), from_int(1));
    }

    #[test]
    fn average_brackets_class_counts_and_denominators_divide() {
        let s = spn();
        let lcm = s.classes().iter().fold(1, |l, c| crate::arith::lcm(l, c.aut_order));
        let thetas: Vec<Vec<u64>> =
            s.classes().iter().map(|c| c.form.theta_coefficients(400)).collect();
        let counters = s.counters(400);
        for n in 0..=400u64 {
            let counts: Vec<u64> = thetas.iter().map(|t| t[n as usize]).collect();
            assert_eq!(counters.counts(n), counts);
            let avg = counters.average(n);
            let lo = from_int(*counts.iter().min().unwrap() as i64);
            let hi = from_int(*counts.iter().max().unwrap() as i64);
            assert!(lo <= avg && avg <= hi, "n = {n}");
            // avg · mass · lcm = Σ r(n, K) · lcm / |O(K)|
            let scaled = &avg * s.mass() * from_int(lcm as i64);
            assert!(scaled.is_integer(), "n = {n}");
        }
    }

    #[test]
    fn average_independent_of_distinguished() {
        let a = spn();
        let b = a.clone().with_distinguished(0).unwrap();
        for n in 0..200 {
            assert_eq!(a.siegel_weil_average(n), b.siegel_weil_average(n));
        }
        assert!(a.with_distinguished(2).is_err());
    }

    #[test]
    fn singleton_has_zero_cusp_part() {
        let s = SpinorClassSet::new(ClassKind::SpinorGenus, vec![sum_of_three_squares()], 0).unwrap();
        for n in 0..50 {
            assert_eq!(s.cusp_coefficient(n).unwrap(), from_int(0));
        }
        let d = decompose_theta(&s, None, 50).unwrap();
        assert!(d.f_part.iter().all(|f| *f == from_int(0)));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            SpinorClassSet::new(ClassKind::SpinorGenus, vec![], 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            SpinorClassSet::new(ClassKind::SpinorGenus, vec![q1(), sum_of_three_squares()], 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            SpinorClassSet::with_aut_orders(
                ClassKind::SpinorGenus,
                vec![(q1(), Some(8)), (q2(), Some(16))],
                1
            ),
            Err(Error::Inconsistent(_))
        ));
        let gen = SpinorClassSet::new(ClassKind::Genus, vec![q1(), q2()], 1).unwrap();
        assert!(gen.cusp_coefficient(1).is_err());
    }

    #[test]
    fn json_roundtrip_and_faults() {
        let file: ClassSetFile = serde_json::from_str(fixtures::Q1_Q2_JSON).unwrap();
        let json = serde_json::to_string(&file).unwrap();
        let back = SpinorClassSet::from_json(&json).unwrap();
        assert_eq!(back.classes(), spn().classes());
        let corrupted = fixtures::Q1_Q2_JSON.replacen("\"aut_order\": 8", "\"aut_order\": 12", 1);
        assert!(matches!(SpinorClassSet::from_json(&corrupted), Err(Error::Inconsistent(_))));
        let bad = fixtures::Q1_Q2_JSON.replace("\"kind\"", "\"sort\"");
        assert!(matches!(SpinorClassSet::from_json(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_theta(&spn(), None, 1).unwrap();
        assert_eq!(d.f_part, vec![from_int(0), from_int(-1)]);
        assert_eq!(d.source, "Q2");
        let d = decompose_theta(&spn().with_distinguished(0).unwrap(), None, 1).unwrap();
        assert_eq!(d.f_part, vec![from_int(0), from_int(1)]);
        let d = decompose_theta(&spn(), None, 300).unwrap();
        assert!(d.identity_holds());
        assert!(d.e_part.is_none());
    }

    #[test]
    fn decomposition_with_genus_data() {
        let gen = SpinorClassSet::new(ClassKind::Genus, vec![q1(), q2()], 1).unwrap();
        let d = decompose_theta(&spn(), Some(&gen), 200).unwrap();
        assert!(d.identity_holds());
        assert!(d.h_part.unwrap().iter().all(|h| *h == from_int(0)));
        let other = SpinorClassSet::new(ClassKind::Genus, vec![q1()], 0).unwrap();
        assert!(decompose_theta(&spn(), Some(&other), 10).is_err());
    }

    #[test]
    fn exception_scan_inert_primes() {
        let scan = spn()
            .spinor_exception_scan(1, 17, |p| p % 3 == 2 && p != 2)
            .unwrap();
        assert_eq!(scan.rows.iter().map(|r| r.p).collect::<Vec<_>>(), vec![5, 11, 17]);
        assert!(scan.all_stable());
        for row in &scan.rows {
            assert_eq!(row.a_f, from_int(-1));
            assert_eq!(row.counts[1], 0);
        }
        let csv = scan.to_csv();
        assert!(csv.starts_with("p,r_class_0,r_class_1,r_spn,a_f,stable\n5,"));
        assert!(csv.contains(",-1/1,true"));
    }

    #[test]
    fn exception_scan_split_primes_change_sign() {
        let scan = spn().spinor_exception_scan(1, 100, |p| p % 3 == 1).unwrap();
        assert!(!scan.rows.is_empty());
        assert!(scan.rows.iter().all(|r| !r.stable));
        assert!(scan.rows.iter().any(|r| r.a_f > from_int(0)));
        assert!(spn().spinor_exception_scan(4, 10, |_| true).is_err());
    }

    #[test]
    fn cusp_series_matches_pointwise() {
        let s = spn();
        let dense = s.cusp_series(1, None, 40).unwrap();
        let sieve = crate::arith::PrimeSieve::new(40).unwrap();
        let primes = s.cusp_prime_series(1, sieve.primes()).unwrap();
        for (&p, v) in primes.values() {
            assert_eq!(&dense.values()[p as usize - 1], v);
        }
        for n in 1..=40u64 {
            assert_eq!(dense.values()[n as usize - 1], s.cusp_coefficient(n * n).unwrap());
        }
        assert_eq!(dense.level(), 576);
        for p in [5i64, 7, 11, 13] {
            let expected = kronecker(12, p);
            assert_eq!(dense.psi().eval_real(p).unwrap(), expected);
        }
        assert_eq!(dense.psi().eval_real(3).unwrap(), 0);
    }
}
