//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::array;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bmcert::certifier::{
    binary_search_bound, certify_at, certify_dichotomy, sweep_policies, CertificateFile,
    CertifiedBound,
};
use bmcert::closed_form::{
    check_h_decreasing, check_s_increasing, gp_lower_bound, h_theta, lower_bound_height,
};
use bmcert::rational::{frac, int, Rational, PQ};
use bmcert::real::Real;
use bmcert::systems::{CPolicy, DichotomyConfig, JCase, Variant};
use bmcert::upper::{
    apply_s, apply_t, build_matrices, closed_form_minv, default_tolerance, optimize_distortion,
    scan_distortion, TruncatedFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CRITERION_1_BUDGET: Duration = Duration::from_secs(5);
const CRITERION_7_BUDGET: Duration = Duration::from_secs(1);
const CLOSED_FORM_TOL: &str = "1e-12";
const T_STAR_TOL: &str = "1e-4";
const NORM_TOL: &str = "1e-9";
const MONOTONE_PAIRS: usize = 100;
const INVERSE_SAMPLES: usize = 50;

fn real(s: &str) -> Real {
    s.parse().expect("literal")
}

fn target() -> Rational {
    frac(113, 32)
}

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

/// Certificates from a bound, serialised, parsed back and audited.
fn offline_audit(bound: &CertifiedBound) -> bool {
    [&bound.lo_report, &bound.hi_report]
        .into_iter()
        .all(|report| {
            let text = CertificateFile::from_report(report).to_json();
            match CertificateFile::parse_all(&text) {
                Ok(files) => files.iter().all(|f| f.verify().valid()),
                Err(_) => false,
            }
        })
}

fn criterion_1(best_lo: &mut Option<Rational>) -> Verdict {
    let mut parts = Vec::new();
    let mut hit = false;
    let mut all_ok = true;
    for variant in Variant::BOTH {
        let start = Instant::now();
        let bound = match binary_search_bound(&int(3), &int(5), 6, CPolicy::DEFAULT, variant) {
            Ok(b) => b,
            Err(e) => return Verdict::new(false, format!("{}: {e}", variant.name())),
        };
        let elapsed = start.elapsed();
        let audited = bound.verify() && offline_audit(&bound);
        let fast = elapsed < CRITERION_1_BUDGET;
        all_ok &= audited && fast;
        hit |= bound.t_lo == target();
        if best_lo.as_ref().is_none_or(|b| bound.t_lo > *b) {
            *best_lo = Some(bound.t_lo.clone());
        }
        parts.push(format!(
            "{}: t_lo = {} (certificates {}, {:.2?})",
            variant.name(),
            PQ(&bound.t_lo),
            if audited {
                "re-verify"
            } else {
                "DO NOT re-verify"
            },
            elapsed
        ));
    }
    Verdict::new(
        hit && all_ok,
        format!("expected t_lo = 113/32; {}", parts.join("; ")),
    )
}

fn criterion_2() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for variant in Variant::BOTH {
        let at3 = certify_at(&int(3), CPolicy::DEFAULT, variant).expect("t = 3 is admissible");
        let at5 = certify_at(&int(5), CPolicy::DEFAULT, variant).expect("t = 5 is admissible");
        let good = at3.all_infeasible() && !at5.all_infeasible() && at3.verify() && at5.verify();
        ok &= good;
        let feasible: Vec<&str> = at5.feasible_cases().into_iter().map(JCase::tag).collect();
        parts.push(format!(
            "{}: t=3 all infeasible = {}, t=5 feasible in [{}]",
            variant.name(),
            at3.all_infeasible(),
            feasible.join(",")
        ));
    }
    Verdict::new(ok, parts.join("; "))
}

fn criterion_3() -> Verdict {
    let policies = [CPolicy::HALF_T, CPolicy::HALF_T_PLUS_ONE, CPolicy::DEFAULT];
    let mut parts = Vec::new();
    let mut printed_ok = false;
    for variant in Variant::BOTH {
        let report = sweep_policies(&policies, &int(3), &int(5), 8, variant);
        let ranking: Vec<String> = report
            .ranked
            .iter()
            .map(|b| format!("{} -> {}", b.policy, PQ(&b.t_lo)))
            .collect();
        let strict_winner = match report.ranked.as_slice() {
            [first, second, ..] => first.policy == CPolicy::DEFAULT && first.t_lo > second.t_lo,
            [only] => only.policy == CPolicy::DEFAULT,
            [] => false,
        };
        if variant == Variant::Printed {
            printed_ok = strict_winner && report.skipped.is_empty();
        }
        parts.push(format!(
            "{}{}: {}",
            variant.name(),
            if strict_winner {
                " (2t+1)/4 best"
            } else {
                " (2t+1)/4 not best"
            },
            ranking.join(", ")
        ));
    }
    Verdict::new(
        printed_ok,
        format!("judged on printed; {}", parts.join("; ")),
    )
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut checked = 0;
    for variant in Variant::BOTH {
        for _ in 0..MONOTONE_PAIRS {
            let (a, b) = loop {
                let den = rng.gen_range(2..=512);
                let a = frac(rng.gen_range(3 * den + 1..5 * den), den);
                let b = frac(rng.gen_range(3 * den + 1..5 * den), den);
                if a != b {
                    break if a < b { (a, b) } else { (b, a) };
                }
            };
            let lo = certify_at(&a, CPolicy::DEFAULT, variant).expect("admissible");
            let hi = certify_at(&b, CPolicy::DEFAULT, variant).expect("admissible");
            for (x, y) in lo.cases.iter().zip(&hi.cases) {
                checked += 1;
                if x.result.is_feasible() && !y.result.is_feasible() {
                    violations += 1;
                }
            }
        }
    }
    Verdict::new(
        violations == 0,
        format!("{violations} violations in {checked} case pairs"),
    )
}

fn criterion_5() -> Verdict {
    let tol = real(CLOSED_FORM_TOL);
    let sqrt = |v: i64| Real::from_i64(v).sqrt().expect("positive");
    let checks = [
        (
            "height(2)",
            lower_bound_height(2).unwrap(),
            Real::from_i64(2) + sqrt(5),
        ),
        ("gp(2)", gp_lower_bound(2).unwrap(), Real::from_i64(3)),
        (
            "gp(3)",
            gp_lower_bound(3).unwrap(),
            (Real::from_i64(5) + sqrt(22)) / Real::from_i64(3),
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, got, want) in checks {
        ok &= (&got - &want).abs() <= tol;
        parts.push(format!("{name} = {}", got.to_digits(15)));
    }
    Verdict::new(ok, parts.join(", "))
}

fn criterion_6() -> Verdict {
    let tol = real(CLOSED_FORM_TOL);
    let mut failures = Vec::new();
    for m in 2..=10 {
        if !check_h_decreasing(m).map(|r| r.passed).unwrap_or(false) {
            failures.push(format!("h' at m={m}"));
        }
        let h1 = h_theta(m, &Real::one()).unwrap();
        if (h1 - lower_bound_height(m).unwrap()).abs() > tol {
            failures.push(format!("h(1) at m={m}"));
        }
    }
    for m in 3..=8 {
        for t in [3, 5, 10] {
            if !check_s_increasing(m, &Real::from_i64(t))
                .map(|r| r.passed)
                .unwrap_or(false)
            {
                failures.push(format!("s' at m={m}, t={t}"));
            }
        }
    }
    let detail = if failures.is_empty() {
        "h decreasing for m=2..10, h(1) matches, s increasing on m=3..8 x t={3,5,10}".to_string()
    } else {
        failures.join(", ")
    };
    Verdict::new(failures.is_empty(), detail)
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let result = optimize_distortion(&Real::from_i64(3), &Real::from_i64(4), &default_tolerance());
    let elapsed = start.elapsed();
    let (t_star, report) = match result {
        Ok(r) => r,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let near = (&t_star - &real("3.87512")).abs() < real(T_STAR_TOL);
    let norm_t = (&report.norm_t - &t_star).abs() <= real(NORM_TOL);
    let norm_s = (&report.norm_s - &Real::one()).abs() <= real(NORM_TOL);
    Verdict::new(
        near && norm_t && norm_s && elapsed < CRITERION_7_BUDGET,
        format!(
            "t* = {}, normT = {}, normS = {}, {:.2?}",
            t_star.to_digits(20),
            report.norm_t.to_digits(20),
            report.norm_s.to_digits(20),
            elapsed
        ),
    )
}

fn criterion_8() -> Verdict {
    let t = frac(7, 2);
    let mats = build_matrices(&t).expect("t in [3, 4]");
    let minv = closed_form_minv(&t).expect("non-singular");
    let identity = (0..3).all(|i| {
        (0..3).all(|j| {
            let v: Rational = (0..3).map(|k| &mats.m[i][k] * &minv[k][j]).sum();
            v == if i == j { int(1) } else { int(0) }
        })
    });
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut random = || frac(rng.gen_range(-1000..=1000), rng.gen_range(1..=97));
    let round_trips = (0..INVERSE_SAMPLES)
        .filter(|_| {
            let f = TruncatedFunction::new(
                (0..10).map(|_| array::from_fn(|_| random())).collect(),
                array::from_fn(|_| random()),
            )
            .expect("non-empty");
            apply_s(&apply_t(&f, &mats), &mats) == f
        })
        .count();
    Verdict::new(
        identity && round_trips == INVERSE_SAMPLES,
        format!("M*Minv = I: {identity}; S(T f) = f for {round_trips}/{INVERSE_SAMPLES}"),
    )
}

fn criterion_9(certified: &Option<Rational>) -> Verdict {
    let rows = match scan_distortion(&int(3), &int(4), &frac(1, 1000)) {
        Ok(r) => r,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let floor = certified.clone().unwrap_or_else(target).max(target());
    let min = rows
        .iter()
        .min_by(|a, b| a.distortion.cmp(&b.distortion))
        .expect("non-empty");
    Verdict::new(
        rows.len() == 1001 && rows.iter().all(|r| r.distortion >= floor),
        format!(
            "{} grid points, min distortion {:.9} at t = {}, floor {}",
            rows.len(),
            bmcert::rational::to_f64(&min.distortion),
            PQ(&min.t),
            PQ(&floor)
        ),
    )
}

fn criterion_10() -> Verdict {
    let config = DichotomyConfig::default();
    let mut parts = Vec::new();
    let mut certified_default = false;
    for variant in Variant::BOTH {
        let report =
            certify_dichotomy(&target(), CPolicy::DEFAULT, variant, &config).expect("admissible");
        let failing: Vec<String> = report
            .branches
            .iter()
            .filter(|b| !b.all_infeasible())
            .map(|b| {
                let cases: Vec<&str> = b
                    .cases
                    .iter()
                    .filter(|o| o.result.is_feasible())
                    .map(|o| o.case.tag())
                    .collect();
                format!("{} feasible in {}", b.branches, cases.join("+"))
            })
            .collect();
        if variant == Variant::default() {
            certified_default = report.certified() && report.verify();
        }
        parts.push(format!(
            "{} at 113/32: {}",
            variant.name(),
            if failing.is_empty() {
                "all branches infeasible".to_string()
            } else {
                failing.join(", ")
            }
        ));
    }
    let explore = certify_dichotomy(&frac(18, 5), CPolicy::DEFAULT, Variant::default(), &config)
        .expect("admissible");
    let audited = explore.verify()
        && explore
            .branches
            .iter()
            .all(|b| CertificateFile::from_branch(&explore, b).verify().valid());
    let infeasible = explore
        .branches
        .iter()
        .filter(|b| b.all_infeasible())
        .count();
    parts.push(format!(
        "18/5 report: {infeasible}/{} branches infeasible, certificates {}",
        explore.branches.len(),
        if audited { "verify" } else { "DO NOT verify" }
    ));
    Verdict::new(certified_default && audited, parts.join("; "))
}

fn main() -> ExitCode {
    let mut best_lo = None;
    let verdicts = [
        ("1 lower-bound reproduction", criterion_1(&mut best_lo)),
        ("2 endpoint checks", criterion_2()),
        ("3 policy sweep", criterion_3()),
        ("4 monotonicity", criterion_4()),
        ("5 closed forms", criterion_5()),
        ("6 monotonicity of h and s", criterion_6()),
        ("7 upper bound optimiser", criterion_7()),
        ("8 inverse structure", criterion_8()),
        ("9 cross-consistency", criterion_9(&best_lo)),
        ("10 dichotomy mode", criterion_10()),
    ];
    let mut failed = 0;
    for (name, v) in &verdicts {
        println!(
            "{} criterion {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += usize::from(!v.passed);
    }
    println!(
        "{} of {} criteria passed",
        verdicts.len() - failed,
        verdicts.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
