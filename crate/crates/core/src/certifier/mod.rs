//! Certified lower bounds: a value `t` is certified when all four case
//! systems are infeasible at `t`, each with a Farkas certificate that has
//! been re-checked by substitution.

use rayon::prelude::*;

use crate::lp::{check_feasibility, verify_certificate, FeasibilityResult, LinearSystem, LpError};
use crate::rational::{int, Rational, PQ};
use crate::systems::{
    build_case_system, build_dichotomy_systems, BranchChoice, CPolicy, DichotomyConfig, JCase,
    SystemError, Variant,
};

mod certificate;

pub use certificate::{CaseCertificate, CertificateFile, CertificateParseError, VerifyOutcome};

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("certificate for case {case} failed re-verification")]
    Rejected { case: JCase },
    #[error("bracket lo = {lo} is not below hi = {hi}")]
    InvertedBracket { lo: String, hi: String },
    #[error("bracket precondition fails at lo = {0}: some case is feasible there")]
    LoNotCertified(String),
    #[error("bracket precondition fails at hi = {0}: every case is infeasible there")]
    HiCertified(String),
}

/// Verdict and certificate for one J-case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
    pub case: JCase,
    pub system: LinearSystem,
    pub result: FeasibilityResult,
}

/// The four case verdicts at one probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub t: Rational,
    pub c: Rational,
    pub policy: CPolicy,
    pub variant: Variant,
    pub cases: Vec<CaseOutcome>,
}

impl CaseReport {
    pub fn all_infeasible(&self) -> bool {
        self.cases.iter().all(|o| !o.result.is_feasible())
    }

    pub fn feasible_cases(&self) -> Vec<JCase> {
        self.cases
            .iter()
            .filter(|o| o.result.is_feasible())
            .map(|o| o.case)
            .collect()
    }

    /// Offline audit: substitution checks only, no solver.
    pub fn verify(&self) -> bool {
        self.cases
            .iter()
            .all(|o| verify_certificate(&o.system, &o.result).unwrap_or(false))
    }
}

fn decide(case: JCase, system: LinearSystem) -> Result<CaseOutcome, CertifyError> {
    let result = check_feasibility(&system)?;
    if !verify_certificate(&system, &result)? {
        return Err(CertifyError::Rejected { case });
    }
    Ok(CaseOutcome {
        case,
        system,
        result,
    })
}

fn decide_all(systems: Vec<(JCase, LinearSystem)>) -> Result<Vec<CaseOutcome>, CertifyError> {
    systems
        .into_par_iter()
        .map(|(case, system)| decide(case, system))
        .collect()
}

pub fn certify_at(
    t: &Rational,
    policy: CPolicy,
    variant: Variant,
) -> Result<CaseReport, CertifyError> {
    let c = policy.checked_c(t)?;
    let systems = JCase::ALL_CASES
        .into_iter()
        .map(|case| build_case_system(case, t, policy, variant).map(|s| (case, s)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CaseReport {
        t: t.clone(),
        c,
        policy,
        variant,
        cases: decide_all(systems)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub t: Rational,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedBound {
    pub t_lo: Rational,
    pub t_hi: Rational,
    /// Endpoint checks followed by the bisection probes, in order.
    pub trace: Vec<Probe>,
    pub policy: CPolicy,
    pub variant: Variant,
    pub lo_report: CaseReport,
    pub hi_report: CaseReport,
}

impl CertifiedBound {
    pub fn verify(&self) -> bool {
        self.t_lo < self.t_hi
            && self.lo_report.all_infeasible()
            && !self.hi_report.all_infeasible()
            && self.lo_report.verify()
            && self.hi_report.verify()
    }
}

/// Bisection on `[lo, hi]`, relying on feasibility being monotone in `t`.
pub fn binary_search_bound(
    lo: &Rational,
    hi: &Rational,
    iters: u32,
    policy: CPolicy,
    variant: Variant,
) -> Result<CertifiedBound, CertifyError> {
    if lo >= hi {
        return Err(CertifyError::InvertedBracket {
            lo: PQ(lo).to_string(),
            hi: PQ(hi).to_string(),
        });
    }
    let mut lo_report = certify_at(lo, policy, variant)?;
    if !lo_report.all_infeasible() {
        return Err(CertifyError::LoNotCertified(PQ(lo).to_string()));
    }
    let mut hi_report = certify_at(hi, policy, variant)?;
    if hi_report.all_infeasible() {
        return Err(CertifyError::HiCertified(PQ(hi).to_string()));
    }
    let mut trace = vec![
        Probe {
            t: lo.clone(),
            certified: true,
        },
        Probe {
            t: hi.clone(),
            certified: false,
        },
    ];
    for _ in 0..iters {
        let mid = (&lo_report.t + &hi_report.t) / int(2);
        let report = certify_at(&mid, policy, variant)?;
        let certified = report.all_infeasible();
        trace.push(Probe { t: mid, certified });
        if certified {
            lo_report = report;
        } else {
            hi_report = report;
        }
    }
    Ok(CertifiedBound {
        t_lo: lo_report.t.clone(),
        t_hi: hi_report.t.clone(),
        trace,
        policy,
        variant,
        lo_report,
        hi_report,
    })
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    /// Sorted by `t_lo` descending, ties by policy.
    pub ranked: Vec<CertifiedBound>,
    pub skipped: Vec<(CPolicy, String)>,
}

impl SweepReport {
    pub fn best(&self) -> Option<&CertifiedBound> {
        self.ranked.first()
    }
}

pub fn sweep_policies(
    policies: &[CPolicy],
    lo: &Rational,
    hi: &Rational,
    iters: u32,
    variant: Variant,
) -> SweepReport {
    let results: Vec<(CPolicy, Result<CertifiedBound, CertifyError>)> = policies
        .par_iter()
        .map(|&policy| (policy, binary_search_bound(lo, hi, iters, policy, variant)))
        .collect();
    let mut ranked = Vec::new();
    let mut skipped = Vec::new();
    for (policy, result) in results {
        match result {
            Ok(bound) => ranked.push(bound),
            Err(e) => skipped.push((policy, e.to_string())),
        }
    }
    ranked.sort_by(|a, b| b.t_lo.cmp(&a.t_lo).then(a.policy.cmp(&b.policy)));
    SweepReport { ranked, skipped }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchReport {
    pub branches: BranchChoice,
    pub cases: Vec<CaseOutcome>,
}

impl BranchReport {
    pub fn all_infeasible(&self) -> bool {
        self.cases.iter().all(|o| !o.result.is_feasible())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DichotomyReport {
    pub t: Rational,
    pub c: Rational,
    pub policy: CPolicy,
    pub variant: Variant,
    pub config: DichotomyConfig,
    pub branches: Vec<BranchReport>,
}

impl DichotomyReport {
    /// Certified iff every branch assignment is infeasible in every case.
    pub fn certified(&self) -> bool {
        self.branches.iter().all(BranchReport::all_infeasible)
    }

    pub fn verify(&self) -> bool {
        self.branches
            .iter()
            .flat_map(|b| &b.cases)
            .all(|o| verify_certificate(&o.system, &o.result).unwrap_or(false))
    }
}

pub fn certify_dichotomy(
    t: &Rational,
    policy: CPolicy,
    variant: Variant,
    config: &DichotomyConfig,
) -> Result<DichotomyReport, CertifyError> {
    let c = policy.checked_c(t)?;
    config.validate()?;
    let assignments = BranchChoice::all(config.functions.len());
    let branches = assignments
        .into_par_iter()
        .map(|branches| {
            let systems = build_dichotomy_systems(t, policy, variant, config, &branches)?;
            let cases = decide_all(JCase::ALL_CASES.into_iter().zip(systems).collect())?;
            Ok(BranchReport { branches, cases })
        })
        .collect::<Result<Vec<_>, CertifyError>>()?;
    Ok(DichotomyReport {
        t: t.clone(),
        c,
        policy,
        variant,
        config: config.clone(),
        branches,
    })
}

/// `(hi − lo)/2^iters`, the width every successful bisection ends with.
pub fn bisection_resolution(lo: &Rational, hi: &Rational, iters: u32) -> Rational {
    let mut w = hi - lo;
    for _ in 0..iters {
        w /= int(2);
    }
    w
}
