use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bmcert::certifier::{
    binary_search_bound, certify_at, certify_dichotomy, sweep_policies, CaseOutcome,
    CertificateFile, CertifiedBound, CertifyError,
};
use bmcert::closed_form::{check_h_decreasing, check_s_increasing, BoundQuery};
use bmcert::lp::{check_feasibility, verify_certificate, FeasibilityResult, LinearSystem};
use bmcert::rational::{format_rational, to_f64, Rational};
use bmcert::real::Real;
use bmcert::systems::{parse_system_file, CPolicy, SystemDocument, Variant};
use bmcert::upper::{
    build_matrices, cubic_formula_value, default_tolerance, optimize_distortion, scan_distortion,
    CubicReport, NormReport,
};
use serde_json::{json, Value};

use crate::args::{
    BoundsArgs, CertifyArgs, DichotomyArgs, Format, OutputArgs, SearchArgs, SweepArgs, UpperArgs,
    VerifyArgs,
};

/// How a successfully executed command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Certified,
    NotCertified,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Certified
        } else {
            Outcome::NotCertified
        }
    }
}

fn emit(output: &OutputArgs, text: String) -> Result<()> {
    let text = if text.ends_with('\n') {
        text
    } else {
        text + "\n"
    };
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json serializes")
}

fn pq(q: &Rational) -> String {
    format_rational(q)
}

fn pq_list(values: &[Rational]) -> Vec<String> {
    values.iter().map(pq).collect()
}

fn describe_result(system: &LinearSystem, result: &FeasibilityResult) -> String {
    match (&result.witness, &result.farkas) {
        (Some(w), _) => {
            let point: Vec<String> = system
                .variables
                .iter()
                .zip(w)
                .map(|(v, x)| format!("{v}={}", pq(x)))
                .collect();
            format!("witness {}", point.join(" "))
        }
        (_, Some(y)) => {
            let used = y.iter().filter(|m| **m != Rational::default()).count();
            format!("farkas combination of {used} rows")
        }
        _ => String::new(),
    }
}

fn case_lines(out: &mut String, cases: &[CaseOutcome]) {
    for o in cases {
        let _ = writeln!(
            out,
            "  {:<9} {:<10} {}",
            o.case.tag(),
            o.result.status,
            describe_result(&o.system, &o.result)
        );
    }
}

pub fn certify(args: CertifyArgs) -> Result<Outcome> {
    if let Some(path) = &args.system {
        return certify_file(path, &args.output);
    }
    let t = args.t.as_ref().context("--t is required")?;
    let mut report = certify_at(t, args.c_policy, args.variant.into())?;
    report.cases.retain(|o| args.case.admits(o.case));
    let certified = report.cases.iter().all(|o| !o.result.is_feasible());

    let text = match args.output.format {
        Format::Structured => CertificateFile::from_report(&report).to_json(),
        Format::Csv => {
            let mut s = String::from("case,status\n");
            for o in &report.cases {
                let _ = writeln!(s, "{},{}", o.case.tag(), o.result.status);
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "t = {} ({:.6}), c = {}, policy c(t) = {}, variant {}\n",
                pq(&report.t),
                to_f64(&report.t),
                pq(&report.c),
                report.policy,
                report.variant.name()
            );
            case_lines(&mut s, &report.cases);
            if certified {
                s.push_str("verdict: certified, every selected case is infeasible\n");
            } else {
                let feasible: Vec<&str> = report
                    .cases
                    .iter()
                    .filter(|o| o.result.is_feasible())
                    .map(|o| o.case.tag())
                    .collect();
                let _ = writeln!(
                    s,
                    "verdict: not certified, feasible in {}",
                    feasible.join(", ")
                );
            }
            s
        }
    };
    emit(&args.output, text)?;
    Ok(Outcome::from_bool(certified))
}

fn certify_file(path: &Path, output: &OutputArgs) -> Result<Outcome> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let system = parse_system_file(&text).with_context(|| format!("parsing {}", path.display()))?;
    let result = check_feasibility(&system)?;
    if !verify_certificate(&system, &result)? {
        bail!(
            "internal error: certificate for {} failed re-verification",
            path.display()
        );
    }
    let infeasible = !result.is_feasible();
    let body = match output.format {
        Format::Structured => {
            let mut v = json!({
                "status": result.status,
                "system": SystemDocument::from(&system),
            });
            if let Some(w) = &result.witness {
                v["witness"] = json!(pq_list(w));
            }
            if let Some(y) = &result.farkas {
                v["farkas"] = json!(pq_list(y));
            }
            pretty(&v)
        }
        Format::Csv => format!("status\n{}", result.status),
        Format::Text => format!(
            "{}: {} inequalities, {}\n{}",
            path.display(),
            system.inequalities.len(),
            result.status,
            describe_result(&system, &result)
        ),
    };
    emit(output, body)?;
    Ok(Outcome::from_bool(infeasible))
}

enum SearchRun {
    Done(Box<CertifiedBound>),
    Failed(Variant, String),
}

fn search_one(args: &SearchArgs, variant: Variant) -> Result<SearchRun> {
    match binary_search_bound(&args.lo, &args.hi, args.iters, args.c_policy, variant) {
        Ok(bound) => {
            if !bound.verify() {
                bail!("internal error: search certificates failed re-verification");
            }
            Ok(SearchRun::Done(Box::new(bound)))
        }
        Err(e @ (CertifyError::LoNotCertified(_) | CertifyError::HiCertified(_))) => {
            Ok(SearchRun::Failed(variant, e.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

fn trace_json(bound: &CertifiedBound) -> Value {
    Value::Array(
        bound
            .trace
            .iter()
            .map(|p| json!({ "t": pq(&p.t), "certified": p.certified }))
            .collect(),
    )
}

pub fn search(args: SearchArgs) -> Result<Outcome> {
    let runs = args
        .variant
        .variants()
        .into_iter()
        .map(|v| search_one(&args, v))
        .collect::<Result<Vec<_>>>()?;
    let ok = runs.iter().all(|r| matches!(r, SearchRun::Done(_)));

    let text = match args.output.format {
        Format::Structured => {
            let mut reports = Vec::new();
            let mut certificates = Vec::new();
            for run in &runs {
                match run {
                    SearchRun::Done(b) => {
                        reports.push(json!({
                            "variant": b.variant,
                            "policy": b.policy.to_file_form(),
                            "lo": pq(&args.lo),
                            "hi": pq(&args.hi),
                            "iters": args.iters,
                            "t_lo": pq(&b.t_lo),
                            "t_hi": pq(&b.t_hi),
                            "trace": trace_json(b),
                        }));
                        certificates.push(CertificateFile::from_report(&b.lo_report).to_value());
                        certificates.push(CertificateFile::from_report(&b.hi_report).to_value());
                    }
                    SearchRun::Failed(v, reason) => reports.push(json!({
                        "variant": v,
                        "policy": args.c_policy.to_file_form(),
                        "error": reason,
                    })),
                }
            }
            pretty(&json!({ "runs": reports, "certificates": certificates }))
        }
        Format::Csv => {
            let mut s = String::from("variant,step,t,certified\n");
            for run in &runs {
                if let SearchRun::Done(b) = run {
                    for (i, p) in b.trace.iter().enumerate() {
                        let _ =
                            writeln!(s, "{},{},{},{}", b.variant.name(), i, pq(&p.t), p.certified);
                    }
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for run in &runs {
                match run {
                    SearchRun::Done(b) => {
                        let _ = writeln!(
                            s,
                            "variant {}, policy c(t) = {}, bracket [{}, {}], {} iterations",
                            b.variant.name(),
                            b.policy,
                            pq(&args.lo),
                            pq(&args.hi),
                            args.iters
                        );
                        for p in &b.trace {
                            let verdict = if p.certified {
                                "certified"
                            } else {
                                "not certified"
                            };
                            let _ = writeln!(s, "  probe {:<10} {verdict}", pq(&p.t));
                        }
                        let _ = writeln!(
                            s,
                            "  t_lo = {} ({}), t_hi = {}",
                            pq(&b.t_lo),
                            to_f64(&b.t_lo),
                            pq(&b.t_hi)
                        );
                    }
                    SearchRun::Failed(v, reason) => {
                        let _ = writeln!(s, "variant {}: {reason}", v.name());
                    }
                }
            }
            s
        }
    };
    emit(&args.output, text)?;
    Ok(Outcome::from_bool(ok))
}

fn parse_policies(list: &str) -> Result<Vec<CPolicy>> {
    let policies = list
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<CPolicy>()
                .with_context(|| format!("policy `{s}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    if policies.is_empty() {
        bail!("no policies given");
    }
    Ok(policies)
}

pub fn sweep(args: SweepArgs) -> Result<Outcome> {
    let policies = parse_policies(&args.policies)?;
    if args.lo >= args.hi {
        bail!(
            "bracket lo = {} is not below hi = {}",
            pq(&args.lo),
            pq(&args.hi)
        );
    }
    let reports: Vec<_> = args
        .variant
        .variants()
        .into_iter()
        .map(|v| {
            (
                v,
                sweep_policies(&policies, &args.lo, &args.hi, args.iters, v),
            )
        })
        .collect();
    let any = reports.iter().any(|(_, r)| !r.ranked.is_empty());

    let text = match args.output.format {
        Format::Structured => {
            let runs: Vec<Value> = reports
                .iter()
                .map(|(v, r)| {
                    json!({
                        "variant": v,
                        "ranked": r.ranked.iter().map(|b| json!({
                            "policy": b.policy.to_file_form(),
                            "t_lo": pq(&b.t_lo),
                            "t_hi": pq(&b.t_hi),
                        })).collect::<Vec<_>>(),
                        "skipped": r.skipped.iter().map(|(p, why)| json!({
                            "policy": p.to_file_form(),
                            "reason": why,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(
                &json!({ "lo": pq(&args.lo), "hi": pq(&args.hi), "iters": args.iters, "runs": runs }),
            )
        }
        Format::Csv => {
            let mut s = String::from("variant,rank,policy,t_lo,t_hi,t_lo_decimal\n");
            for (v, r) in &reports {
                for (i, b) in r.ranked.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{},{},\"{}\",{},{},{}",
                        v.name(),
                        i + 1,
                        b.policy.to_file_form(),
                        pq(&b.t_lo),
                        pq(&b.t_hi),
                        to_f64(&b.t_lo)
                    );
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (v, r) in &reports {
                let _ = writeln!(s, "variant {}", v.name());
                for (i, b) in r.ranked.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "  {:>2}. c(t) = {:<14} t_lo = {:<10} ({:.6})  t_hi = {}",
                        i + 1,
                        b.policy.to_string(),
                        pq(&b.t_lo),
                        to_f64(&b.t_lo),
                        pq(&b.t_hi)
                    );
                }
                for (p, why) in &r.skipped {
                    let _ = writeln!(s, "  skipped c(t) = {p}: {why}");
                }
            }
            s
        }
    };
    emit(&args.output, text)?;
    Ok(Outcome::from_bool(any))
}

pub fn dichotomy(args: DichotomyArgs) -> Result<Outcome> {
    let report = certify_dichotomy(&args.t, args.c_policy, args.variant.into(), &args.functions)?;
    if !report.verify() {
        bail!("internal error: dichotomy certificates failed re-verification");
    }
    let certified = report.certified();

    let text = match args.output.format {
        Format::Structured => {
            let certificates: Vec<Value> = report
                .branches
                .iter()
                .map(|b| CertificateFile::from_branch(&report, b).to_value())
                .collect();
            pretty(&json!({
                "t": pq(&report.t),
                "c": pq(&report.c),
                "policy": report.policy.to_file_form(),
                "variant": report.variant,
                "functions": report.config.to_string(),
                "certified": certified,
                "certificates": certificates,
            }))
        }
        Format::Csv => {
            let mut s = String::from("branches,case,status\n");
            for b in &report.branches {
                for o in &b.cases {
                    let _ = writeln!(s, "{},{},{}", b.branches, o.case.tag(), o.result.status);
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "t = {}, c = {}, policy c(t) = {}, variant {}, functions {}\n",
                pq(&report.t),
                pq(&report.c),
                report.policy,
                report.variant.name(),
                report.config
            );
            for b in &report.branches {
                let verdict = if b.all_infeasible() {
                    "infeasible"
                } else {
                    "FEASIBLE"
                };
                let _ = writeln!(s, "branches {}: {verdict}", b.branches);
                case_lines(&mut s, &b.cases);
            }
            let _ = writeln!(
                s,
                "verdict: {}",
                if certified {
                    "certified under every branch assignment"
                } else {
                    "not certified"
                }
            );
            s
        }
    };
    emit(&args.output, text)?;
    Ok(Outcome::from_bool(certified))
}

struct BoundRow {
    kind: &'static str,
    param: String,
    value: String,
}

pub fn bounds(args: BoundsArgs) -> Result<Outcome> {
    let (m, k) = match (&args.m, &args.k) {
        (None, None) => (Some(2..=5), Some(2..=5)),
        (m, k) => (m.clone(), k.clone()),
    };
    let mut rows = Vec::new();
    let mut checks_ok = true;
    for q in m
        .clone()
        .into_iter()
        .flatten()
        .map(BoundQuery::Height)
        .chain(k.into_iter().flatten().map(BoundQuery::Gp))
    {
        let param = match &q {
            BoundQuery::Height(v) | BoundQuery::Gp(v) => v.to_string(),
            BoundQuery::Threshold(..) => unreachable!(),
        };
        rows.push(BoundRow {
            kind: q.kind(),
            param,
            value: q.evaluate()?.to_digits(args.digits),
        });
    }
    if args.checks {
        for m in m.into_iter().flatten() {
            let h = check_h_decreasing(m)?;
            checks_ok &= h.passed;
            rows.push(BoundRow {
                kind: "check-h-decreasing",
                param: m.to_string(),
                value: format!("{} (max h' = {})", pass(h.passed), h.extreme.to_digits(6)),
            });
            let s = check_s_increasing(m, &Real::from_i64(3))?;
            checks_ok &= s.passed;
            rows.push(BoundRow {
                kind: "check-s-increasing",
                param: m.to_string(),
                value: format!("{} (min s' = {})", pass(s.passed), s.extreme.to_digits(6)),
            });
        }
    }

    let text = match args.output.format {
        Format::Structured => pretty(&Value::Array(
            rows.iter()
                .map(|r| json!({ "kind": r.kind, "param": r.param, "value": r.value }))
                .collect(),
        )),
        Format::Csv => {
            let mut s = String::from("kind,param,value\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{}", r.kind, r.param, r.value);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                let _ = writeln!(s, "{:<20} {:>6}  {}", r.kind, r.param, r.value);
            }
            s
        }
    };
    emit(&args.output, text)?;
    Ok(Outcome::from_bool(checks_ok))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn norm_report_json(r: &NormReport, digits: usize) -> Value {
    json!({
        "t": r.t.to_digits(digits),
        "norm_t": r.norm_t.to_digits(digits),
        "norm_s": r.norm_s.to_digits(digits),
        "distortion": r.distortion.to_digits(digits),
        "argmax_t": r.argmax_t,
        "argmax_s": r.argmax_s,
    })
}

fn cubic_json(c: &CubicReport, digits: usize) -> Value {
    json!({
        "printed": c.printed.to_digits(digits),
        "corrected": c.corrected.to_digits(digits),
        "optimizer": c.optimizer.to_digits(digits),
        "printed_matches": c.printed_matches,
        "corrected_matches": c.corrected_matches,
    })
}

pub fn upper(args: UpperArgs) -> Result<Outcome> {
    let digits = args.digits;
    if let Some(t) = &args.t {
        let mats = build_matrices(t)?;
        let (nt, ns) = (mats.norm_t(), mats.norm_s());
        let d = &nt.value * &ns.value;
        let text = match args.output.format {
            Format::Structured => pretty(&json!({
                "t": pq(t),
                "norm_t": pq(&nt.value),
                "norm_s": pq(&ns.value),
                "distortion": pq(&d),
                "argmax_t": nt.row,
                "argmax_s": ns.row,
            })),
            Format::Csv => format!(
                "t,normT,normS,distortion\n{},{},{},{}",
                pq(t),
                pq(&nt.value),
                pq(&ns.value),
                pq(&d)
            ),
            Format::Text => format!(
                "t          = {}\n|T|        = {} ({:.12}), row {}\n|T^-1|     = {} ({:.12}), row {}\ndistortion = {} ({:.12})",
                pq(t),
                pq(&nt.value),
                to_f64(&nt.value),
                nt.row,
                pq(&ns.value),
                to_f64(&ns.value),
                ns.row,
                pq(&d),
                to_f64(&d)
            ),
        };
        emit(&args.output, text)?;
        return Ok(Outcome::Certified);
    }

    if let Some((lo, hi, step)) = &args.scan {
        let rows = scan_distortion(lo, hi, step)?;
        let text = match args.output.format {
            Format::Structured => pretty(&Value::Array(
                rows.iter()
                    .map(|r| {
                        json!({
                            "t": pq(&r.t),
                            "norm_t": pq(&r.norm_t),
                            "norm_s": pq(&r.norm_s),
                            "distortion": pq(&r.distortion),
                        })
                    })
                    .collect(),
            )),
            Format::Csv | Format::Text => {
                let mut s = String::from("t,normT,normS,distortion\n");
                for r in &rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        pq(&r.t),
                        pq(&r.norm_t),
                        pq(&r.norm_s),
                        pq(&r.distortion)
                    );
                }
                s
            }
        };
        emit(&args.output, text)?;
        return Ok(Outcome::Certified);
    }

    let tol = match &args.tol {
        Some(s) => s.parse::<Real>().map_err(anyhow::Error::msg)?,
        None => default_tolerance(),
    };
    if tol <= Real::zero() {
        bail!("--tol must be positive");
    }
    let (_, report) = optimize_distortion(&Real::from_i64(3), &Real::from_i64(4), &tol)?;
    let cubic = if args.cubic {
        Some(cubic_formula_value()?)
    } else {
        None
    };

    let text = match args.output.format {
        Format::Structured => {
            let mut v = norm_report_json(&report, digits);
            if let Some(c) = &cubic {
                v["cubic"] = cubic_json(c, digits);
            }
            pretty(&v)
        }
        Format::Csv => {
            let mut s = format!(
                "t,normT,normS,distortion\n{},{},{},{}\n",
                report.t.to_digits(digits),
                report.norm_t.to_digits(digits),
                report.norm_s.to_digits(digits),
                report.distortion.to_digits(digits)
            );
            if let Some(c) = &cubic {
                let _ = write!(
                    s,
                    "\nformula,value,matches\nprinted,{},{}\ncorrected,{},{}\n",
                    c.printed.to_digits(digits),
                    c.printed_matches,
                    c.corrected.to_digits(digits),
                    c.corrected_matches
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "t*         = {}\n|T|        = {} (row {})\n|T^-1|     = {} (row {})\ndistortion = {}\n",
                report.t.to_digits(digits),
                report.norm_t.to_digits(digits),
                report.argmax_t,
                report.norm_s.to_digits(digits),
                report.argmax_s,
                report.distortion.to_digits(digits)
            );
            if let Some(c) = &cubic {
                let _ = write!(
                    s,
                    "cubic, printed   = {} ({})\ncubic, corrected = {} ({})\n",
                    c.printed.to_digits(digits),
                    if c.printed_matches {
                        "matches t*"
                    } else {
                        "does not match t*"
                    },
                    c.corrected.to_digits(digits),
                    if c.corrected_matches {
                        "matches t*"
                    } else {
                        "does not match t*"
                    }
                );
            }
            s
        }
    };
    emit(&args.output, text)?;
    Ok(Outcome::Certified)
}

pub fn verify_cert(args: VerifyArgs) -> Result<Outcome> {
    let text = fs::read_to_string(&args.path)
        .with_context(|| format!("reading {}", args.path.display()))?;
    let files = CertificateFile::parse_all(&text)
        .with_context(|| format!("parsing {}", args.path.display()))?;
    let outcomes: Vec<_> = files.iter().map(|f| (f, f.verify())).collect();
    let all_valid = outcomes.iter().all(|(_, o)| o.valid());

    let text = match args.output.format {
        Format::Structured => pretty(&Value::Array(
            outcomes
                .iter()
                .map(|(f, o)| {
                    json!({
                        "t": pq(&f.t),
                        "variant": f.variant,
                        "policy": f.policy,
                        "branches": f.cases.first().and_then(|c| c.branches.clone()),
                        "valid": o.valid(),
                        "certifies_t": o.valid() && o.complete && o.all_infeasible,
                        "problems": o.problems,
                    })
                })
                .collect(),
        )),
        Format::Csv => {
            let mut s = String::from("t,variant,branches,valid,certifies_t\n");
            for (f, o) in &outcomes {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    pq(&f.t),
                    f.variant.name(),
                    f.cases
                        .first()
                        .and_then(|c| c.branches.clone())
                        .unwrap_or_default(),
                    o.valid(),
                    o.valid() && o.complete && o.all_infeasible
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (f, o) in &outcomes {
                let scope = match f.cases.first().and_then(|c| c.branches.as_deref()) {
                    Some(b) => format!(" branches {b}"),
                    None => String::new(),
                };
                let claim = if o.complete && o.all_infeasible {
                    "certifies t"
                } else if o.all_infeasible {
                    "selected cases infeasible"
                } else {
                    "some case feasible"
                };
                if o.valid() {
                    let _ = writeln!(
                        s,
                        "t = {} {}{scope}: valid, {claim}",
                        pq(&f.t),
                        f.variant.name()
                    );
                } else {
                    let _ = writeln!(s, "t = {} {}{scope}: INVALID", pq(&f.t), f.variant.name());
                    for p in &o.problems {
                        let _ = writeln!(s, "  {p}");
                    }
                }
            }
            s
        }
    };
    emit(&args.output, text)?;
    Ok(Outcome::from_bool(all_valid))
}
