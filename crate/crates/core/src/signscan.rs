//! Split and inert primes of a quadratic field, sign changes along
//! prime-indexed subsequences, and partial-sum diagnostics.

use serde::{Deserialize, Serialize};

use crate::arith::{FundamentalDiscriminant, PrimeSieve};
use crate::characters::DirichletCharacter;
use crate::error::{invalid, Error, Result};
use crate::rational::{self, Rational};
use crate::shimura::SquareClassSeries;

fn check_sign(name: &str, s: i8) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be +1 or -1, got {s}")))
    }
}

/// The primes `p <= bound` with `χ_D(p) = ε`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSplitSequence {
    disc: FundamentalDiscriminant,
    epsilon: i8,
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeSplitSequence {
    pub fn disc(&self) -> FundamentalDiscriminant {
        self.disc
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `p_{D,n,ε}` (1-based).
    pub fn nth(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }
}

pub fn split_inert_primes(
    disc: FundamentalDiscriminant,
    epsilon: i8,
    bound: u64,
) -> Result<PrimeSplitSequence> {
    check_sign("epsilon", epsilon)?;
    if disc.is_trivial() {
        return Err(invalid("D = 1 does not define a quadratic field"));
    }
    if bound < 2 {
        return Err(invalid(format!("prime bound must be at least 2, got {bound}")));
    }
    let sieve = PrimeSieve::new(bound)?;
    Ok(split_from_sieve(&sieve, disc, epsilon, bound))
}

fn split_from_sieve(
    sieve: &PrimeSieve,
    disc: FundamentalDiscriminant,
    epsilon: i8,
    bound: u64,
) -> PrimeSplitSequence {
    let primes = sieve
        .primes_up_to(bound)
        .iter()
        .copied()
        .filter(|&p| disc.chi(p as i64) == epsilon)
        .collect();
    PrimeSplitSequence { disc, epsilon, bound, primes }
}

/// Strict sign changes `a(n₀) a(n₀ + 1) < 0` of a finite sequence.
/// Indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct SignChangeReport {
    /// The prime attached to each value; empty for a bare sequence.
    pub primes: Vec<u64>,
    pub values: Vec<Rational>,
    pub change_indices: Vec<usize>,
    pub zero_indices: Vec<usize>,
}

impl SignChangeReport {
    pub fn count(&self) -> usize {
        self.change_indices.len()
    }

    pub fn first_change_prime(&self) -> Option<u64> {
        self.change_indices.first().and_then(|&i| self.primes.get(i - 1).copied())
    }

    pub fn to_json(&self) -> String {
        let file = ReportFile {
            count: self.count(),
            first_change_prime: self.first_change_prime(),
            change_indices: self.change_indices.clone(),
            zero_indices: self.zero_indices.clone(),
            primes: self.primes.clone(),
            values: self.values.iter().map(rational::encode).collect(),
        };
        serde_json::to_string_pretty(&file).expect("report serializes") + "\n"
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: ReportFile = serde_json::from_str(json)
            .map_err(|e| Error::Parse(format!("sign-change report: {e}")))?;
        let values = file.values.iter().map(|v| rational::decode(v)).collect::<Result<Vec<_>>>()?;
        let mut report = detect_sign_changes(&values);
        report.primes = file.primes;
        if report.change_indices != file.change_indices || report.count() != file.count {
            return Err(Error::Inconsistent("stored change indices do not match the values".into()));
        }
        Ok(report)
    }
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    count: usize,
    first_change_prime: Option<u64>,
    change_indices: Vec<usize>,
    zero_indices: Vec<usize>,
    primes: Vec<u64>,
    values: Vec<String>,
}

pub fn detect_sign_changes(values: &[Rational]) -> SignChangeReport {
    let signs: Vec<i8> = values.iter().map(rational::sign).collect();
    let change_indices = signs
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] * w[1] < 0)
        .map(|(i, _)| i + 1)
        .collect();
    let zero_indices =
        signs.iter().enumerate().filter(|(_, &s)| s == 0).map(|(i, _)| i + 1).collect();
    SignChangeReport { primes: Vec::new(), values: values.to_vec(), change_indices, zero_indices }
}

fn branch_primes(
    disc: FundamentalDiscriminant,
    epsilon: i8,
    bound: u64,
    exclude_divisors_of: Option<u64>,
) -> Result<Vec<u64>> {
    if exclude_divisors_of == Some(0) {
        return Err(invalid("exclusion modulus must be positive"));
    }
    if bound < 2 {
        check_sign("epsilon", epsilon)?;
        return Ok(Vec::new());
    }
    let seq = split_inert_primes(disc, epsilon, bound)?;
    Ok(seq
        .primes
        .into_iter()
        .filter(|p| exclude_divisors_of.is_none_or(|m| m % p != 0))
        .collect())
}

/// Sign changes of `a(t p²)` along `p = p_{D,n,ε} <= prime_bound`,
/// optionally skipping primes dividing `exclude_divisors_of`.
pub fn scan_square_class<S: SquareClassSeries + ?Sized>(
    series: &S,
    disc: FundamentalDiscriminant,
    epsilon: i8,
    prime_bound: u64,
    exclude_divisors_of: Option<u64>,
) -> Result<SignChangeReport> {
    let primes = branch_primes(disc, epsilon, prime_bound, exclude_divisors_of)?;
    let values = primes
        .iter()
        .map(|&p| series.coefficient(p).cloned())
        .collect::<Result<Vec<_>>>()?;
    let mut report = detect_sign_changes(&values);
    report.primes = primes;
    Ok(report)
}

/// Running sums over the branch primes, sampled at each threshold (in the
/// order given). `term` maps `(p, a(t p²))` to a summand.
fn running_sums<S: SquareClassSeries + ?Sized>(
    series: &S,
    disc: FundamentalDiscriminant,
    epsilon: i8,
    thresholds: &[u64],
    exclude_divisors_of: Option<u64>,
    term: impl Fn(u64, f64) -> f64,
) -> Result<Vec<(u64, f64)>> {
    let top = thresholds.iter().copied().max().unwrap_or(0);
    let primes = branch_primes(disc, epsilon, top, exclude_divisors_of)?;
    let mut prefix = Vec::with_capacity(primes.len());
    let mut acc = 0.0;
    for &p in &primes {
        acc += term(p, rational::to_f64(series.coefficient(p)?));
        prefix.push(acc);
    }
    Ok(thresholds
        .iter()
        .map(|&x| {
            let m = primes.partition_point(|&p| p <= x);
            (x, if m == 0 { 0.0 } else { prefix[m - 1] })
        })
        .collect())
}

/// `S(x) = Σ_{p <= x, χ_D(p) = ε} a(t p²) / p^{k + 1/2}`.
pub fn partial_sum_linear<S: SquareClassSeries + ?Sized>(
    series: &S,
    disc: FundamentalDiscriminant,
    epsilon: i8,
    thresholds: &[u64],
    exclude_divisors_of: Option<u64>,
) -> Result<Vec<(u64, f64)>> {
    let e = series.k() as f64 + 0.5;
    running_sums(series, disc, epsilon, thresholds, exclude_divisors_of, |p, a| {
        a / (p as f64).powf(e)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareSums {
    pub sums: Vec<(u64, f64)>,
    /// Two-point `log log` slope over the two largest thresholds, when
    /// at least two distinct thresholds above `e` were given.
    pub growth_constant: Option<f64>,
}

impl SquareSums {
    pub fn fitted_constant(&self) -> Result<f64> {
        self.growth_constant
            .ok_or_else(|| invalid("the growth fit needs two distinct thresholds greater than e"))
    }
}

/// `T(x) = Σ_{p <= x, χ_D(p) = ε} a(t p²)² / p^{2k}` with the fitted
/// `Ĉ = (T(x₂) - T(x₁)) / (log log x₂ - log log x₁)`.
pub fn partial_sum_square<S: SquareClassSeries + ?Sized>(
    series: &S,
    disc: FundamentalDiscriminant,
    epsilon: i8,
    thresholds: &[u64],
    exclude_divisors_of: Option<u64>,
) -> Result<SquareSums> {
    let e = 2.0 * series.k() as f64;
    let sums = running_sums(series, disc, epsilon, thresholds, exclude_divisors_of, |p, a| {
        a * a / (p as f64).powf(e)
    })?;
    let mut usable: Vec<(u64, f64)> = sums.iter().copied().filter(|&(x, _)| x >= 3).collect();
    usable.sort_by_key(|&(x, _)| x);
    usable.dedup_by_key(|&mut (x, _)| x);
    let growth_constant = match usable.as_slice() {
        [.., (x1, t1), (x2, t2)] => {
            let ll = |x: u64| (x as f64).ln().ln();
            Some((t2 - t1) / (ll(*x2) - ll(*x1)))
        }
        _ => None,
    };
    Ok(SquareSums { sums, growth_constant })
}

/// `Σ_{p <= x, χ_D(p) = ε, ψ(p) = sign·ε} log p / p`.
pub fn mertens_quarter_sum(
    psi: &DirichletCharacter,
    disc: FundamentalDiscriminant,
    epsilon: i8,
    sign: i8,
    x: u64,
) -> Result<f64> {
    check_sign("epsilon", epsilon)?;
    check_sign("sign", sign)?;
    if !psi.is_real() {
        return Err(invalid("the quarter-log sum needs a real character"));
    }
    if x < 2 {
        return Ok(0.0);
    }
    let sieve = PrimeSieve::new(x)?;
    let mut total = 0.0;
    for &p in sieve.primes() {
        if disc.chi(p as i64) == epsilon && psi.eval_real(p as i64)? == sign * epsilon {
            total += (p as f64).ln() / p as f64;
        }
    }
    Ok(total)
}
