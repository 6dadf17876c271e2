use std::fmt::{self, Write as _};
use std::fs;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

use halfsign::characters::CharacterLiteral;
use halfsign::rational::{self, from_int, Rational};
use halfsign::shimura::{cm_vanishing_check, shimura_lift};
use halfsign::signscan::{
    detect_sign_changes, mertens_quarter_sum, partial_sum_linear, partial_sum_square,
    scan_square_class, split_inert_primes,
};
use halfsign::spinor::fixtures;
use halfsign::{
    CoefficientSeries, DirichletCharacter, Error, FundamentalDiscriminant, SpinorClassSet,
    SquareClassSeries, TernaryForm,
};

use crate::args::{
    CounterexampleArgs, DiagArgs, Format, LiftArgs, Output, ScanArgs, SeriesSource, ThetaArgs,
};

/// A failed run and its exit status.
#[derive(Debug)]
pub enum Failure {
    /// The counterexample checks did not hold (exit 1).
    Assertion(String),
    /// Bad input (exit 2).
    Input(String),
    /// Ingested data disagree with recomputed values (exit 3).
    Consistency(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Input(_) => 2,
            Failure::Consistency(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Assertion(m) | Failure::Input(m) | Failure::Consistency(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(_) => Failure::Consistency(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

pub type Outcome = Result<(), Failure>;

fn with_path(path: &std::path::Path, e: Error) -> Failure {
    let f = Failure::from(e);
    match f {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        Failure::Consistency(m) => Failure::Consistency(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn emit(output: &Output, text: &str) -> Outcome {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

fn field(d: i64) -> Result<FundamentalDiscriminant, Failure> {
    Ok(FundamentalDiscriminant::field(d)?)
}

fn class_set(path: Option<&std::path::Path>) -> Result<SpinorClassSet, Failure> {
    match path {
        Some(p) => SpinorClassSet::load(p).map_err(|e| with_path(p, e)),
        None => Ok(fixtures::q1_q2()),
    }
}

fn character(literal: &str) -> Result<DirichletCharacter, Failure> {
    Ok(CharacterLiteral::parse(literal)?.build()?)
}

fn branch_primes(disc: FundamentalDiscriminant, eps: i8, bound: u64) -> Result<Vec<u64>, Failure> {
    if bound < 2 {
        return Ok(Vec::new());
    }
    Ok(split_inert_primes(disc, eps, bound)?.primes().to_vec())
}

fn csv_series(src: &SeriesSource) -> Result<Option<CoefficientSeries>, Failure> {
    let Some(path) = &src.series else { return Ok(None) };
    let psi = match &src.psi {
        Some(lit) => character(lit)?,
        None => DirichletCharacter::principal(src.level)?,
    };
    let text = fs::read_to_string(path).map_err(|e| with_path(path, e.into()))?;
    CoefficientSeries::from_csv(&text, src.t, src.k, src.level, psi)
        .map(Some)
        .map_err(|e| with_path(path, e))
}

/// Series values at the given primes, from a CSV table or the class set.
fn prime_indexed(src: &SeriesSource, primes: &[u64]) -> Result<Box<dyn SquareClassSeries>, Failure> {
    if let Some(series) = csv_series(src)? {
        return Ok(Box::new(series));
    }
    let set = class_set(src.classes.as_deref())?;
    Ok(Box::new(set.cusp_prime_series(src.t, primes)?))
}

fn encode_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational::encode).collect()
}

pub fn theta(args: &ThetaArgs) -> Outcome {
    let form = TernaryForm::load(&args.form).map_err(|e| with_path(&args.form, e))?;
    let theta = form.theta_coefficients(args.n_max);
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("n,r\n");
            for (n, r) in theta.iter().enumerate() {
                let _ = writeln!(out, "{n},{r}");
            }
            out
        }
        Format::Json => to_json(&json!({ "form": form.name(), "n_max": args.n_max, "r": theta })),
    };
    emit(&args.output, &text)
}

#[derive(Serialize)]
struct InertRow {
    p: u64,
    counts: Vec<u64>,
    r_spn: String,
    a_f: String,
    stable: bool,
    /// `p` divides the level and is left out of the constancy check.
    excluded: bool,
}

pub fn counterexample(args: &CounterexampleArgs) -> Outcome {
    let set = class_set(args.classes.as_deref())?;
    let disc = field(args.disc)?;
    let t = args.t;
    let level = set.level();
    let a_t = set.cusp_coefficient(t)?;
    let scan = set.spinor_exception_scan(t, args.prime_bound, |p| disc.chi(p as i64) == -1)?;

    let rows: Vec<InertRow> = scan
        .rows
        .iter()
        .map(|r| InertRow {
            p: r.p,
            counts: r.counts.clone(),
            r_spn: rational::encode(&r.r_spn),
            a_f: rational::encode(&r.a_f),
            stable: r.stable,
            excluded: level % r.p == 0,
        })
        .collect();
    let kept: Vec<Rational> =
        scan.rows.iter().filter(|r| level % r.p != 0).map(|r| r.a_f.clone()).collect();
    let nonzero = a_t != from_int(0);
    let constant = kept.iter().all(|a| *a == a_t);
    let inert_changes = detect_sign_changes(&kept).count();

    let split = branch_primes(disc, 1, args.prime_bound)?
        .into_iter()
        .filter(|p| level % p != 0)
        .collect::<Vec<_>>();
    let split_series = set.cusp_prime_series(t, &split)?;
    let split_values: Vec<Rational> = split.iter().map(|p| split_series.values()[p].clone()).collect();
    let split_report = detect_sign_changes(&split_values);
    let split_first = split_report.change_indices.first().map(|&i| split[i - 1]);
    let passed = nonzero && constant && inert_changes == 0;

    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "form": set.distinguished().name(),
            "t": t,
            "disc": args.disc,
            "level": level,
            "prime_bound": args.prime_bound,
            "a_f_t": rational::encode(&a_t),
            "inert": rows,
            "inert_checked": kept.len(),
            "inert_sign_changes": inert_changes,
            "split_primes": split.len(),
            "split_sign_changes": split_report.count(),
            "split_first_change_prime": split_first,
            "checks": {
                "nonzero": nonzero,
                "constant": constant,
                "no_inert_sign_changes": inert_changes == 0,
            },
            "passed": passed,
        })),
        Format::Csv => scan.to_csv(),
    };
    emit(&args.output, &text)?;
    eprintln!(
        "a_f({t}, {}) = {}; {} inert primes checked, {} inert and {} split sign changes",
        set.distinguished().name(),
        a_t,
        kept.len(),
        inert_changes,
        split_report.count()
    );
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion(format!(
            "counterexample checks failed: nonzero = {nonzero}, constant = {constant}, inert sign changes = {inert_changes}"
        )))
    }
}

pub fn scan(args: &ScanArgs) -> Outcome {
    let disc = field(args.disc)?;
    let primes = branch_primes(disc, args.eps, args.prime_bound)?;
    let series = prime_indexed(&args.source, &primes)?;
    let report = scan_square_class(series.as_ref(), disc, args.eps, args.prime_bound, args.exclude_level)?;
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => {
            let mut out = String::from("index,p,numerator,denominator,change\n");
            for (i, (p, v)) in report.primes.iter().zip(&report.values).enumerate() {
                let change = report.change_indices.binary_search(&(i + 1)).is_ok();
                let _ = writeln!(out, "{},{p},{},{},{change}", i + 1, v.numer(), v.denom());
            }
            out
        }
    };
    emit(&args.output, &text)
}

pub fn lift(args: &LiftArgs) -> Outcome {
    let series = match csv_series(&args.source)? {
        Some(s) => match args.n_max {
            Some(n) if n > s.n_max() => {
                return Err(Failure::Input(format!(
                    "series has {} coefficients, {n} requested",
                    s.n_max()
                )))
            }
            Some(n) => CoefficientSeries::new(
                s.t(),
                s.k(),
                s.level(),
                s.psi().clone(),
                s.values()[..n as usize].to_vec(),
            )?,
            None => s,
        },
        None => {
            let n_max = args
                .n_max
                .ok_or_else(|| Failure::Input("--n-max is required with a class set".into()))?;
            let set = class_set(args.source.classes.as_deref())?;
            let psi = args.source.psi.as_deref().map(character).transpose()?;
            set.cusp_series(args.source.t, psi.as_ref(), n_max)?
        }
    };
    let lift = shimura_lift(&series)?;
    let cm = match args.disc {
        Some(d) => Some(cm_vanishing_check(&lift, field(d)?, lift.len(), None)?),
        None => None,
    };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => lift.to_csv(),
        Format::Json => {
            let mut doc = json!({
                "t": series.t(),
                "weight": lift.weight(),
                "level": lift.level(),
                "values": encode_all(lift.values()),
            });
            if let Some(cm) = &cm {
                doc["cm"] = json!({
                    "disc": cm.disc,
                    "checked": cm.checked,
                    "violations": cm.violations.iter()
                        .map(|(p, a)| json!({ "p": p, "value": rational::encode(a) }))
                        .collect::<Vec<Value>>(),
                    "compatible": cm.is_cm_compatible(),
                });
            }
            to_json(&doc)
        }
    };
    emit(&args.output, &text)?;
    if let Some(cm) = cm {
        eprintln!(
            "A(p) = 0 at {} of {} inert primes",
            cm.checked.len() - cm.violations.len(),
            cm.checked.len()
        );
    }
    Ok(())
}

pub fn diag(args: &DiagArgs) -> Outcome {
    let disc = field(args.disc)?;
    if args.mertens {
        return mertens(args, disc);
    }
    let top = args.thresholds.iter().copied().max().unwrap_or(0);
    let primes = branch_primes(disc, args.eps, top)?
        .into_iter()
        .filter(|p| args.exclude_level.is_none_or(|m| m % p != 0))
        .collect::<Vec<_>>();
    let series = prime_indexed(&args.source, &primes)?;
    let series = series.as_ref();
    let linear = partial_sum_linear(series, disc, args.eps, &args.thresholds, args.exclude_level)?;
    let square = partial_sum_square(series, disc, args.eps, &args.thresholds, args.exclude_level)?;
    let fitted = if args.no_fit { None } else { Some(square.fitted_constant()?) };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("curve,x,value\n");
            for (x, v) in &linear {
                let _ = writeln!(out, "linear,{x},{v}");
            }
            for (x, v) in &square.sums {
                let _ = writeln!(out, "square,{x},{v}");
            }
            if let Some(c) = fitted {
                let _ = writeln!(out, "fitted_c,,{c}");
            }
            out
        }
        Format::Json => {
            let curve = |pts: &[(u64, f64)]| -> Vec<Value> {
                pts.iter().map(|(x, v)| json!({ "x": x, "sum": v })).collect()
            };
            to_json(&json!({
                "disc": args.disc,
                "eps": args.eps,
                "linear": curve(&linear),
                "square": curve(&square.sums),
                "fitted_c": fitted,
            }))
        }
    };
    emit(&args.output, &text)?;
    if let Some(c) = fitted {
        eprintln!("fitted C = {c}");
    }
    Ok(())
}

fn mertens(args: &DiagArgs, disc: FundamentalDiscriminant) -> Outcome {
    let psi = args
        .source
        .psi
        .as_deref()
        .map(character)
        .transpose()?
        .ok_or_else(|| Failure::Input("--mertens needs --psi".into()))?;
    let rows = args
        .thresholds
        .iter()
        .map(|&x| {
            let s = mertens_quarter_sum(&psi, disc, args.eps, args.sign, x)?;
            let ratio = if x >= 2 { s / (x as f64).ln() } else { 0.0 };
            Ok((x, s, ratio))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("x,sum,ratio\n");
            for (x, s, r) in &rows {
                let _ = writeln!(out, "{x},{s},{r}");
            }
            out
        }
        Format::Json => to_json(
            &rows
                .iter()
                .map(|(x, s, r)| json!({ "x": x, "sum": s, "ratio": r }))
                .collect::<Vec<_>>(),
        ),
    };
    emit(&args.output, &text)?;
    for (x, _, r) in &rows {
        eprintln!("x = {x}: sum / log x = {r:.4} (prediction 0.25)");
    }
    Ok(())
}
