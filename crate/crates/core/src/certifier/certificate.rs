use serde::{Deserialize, Serialize};

use super::{BranchReport, CaseReport, DichotomyReport};
use crate::lp::{verify_certificate, FeasibilityResult, LinearSystem, Status};
use crate::rational::{serde_pq, Rational, PQ};
use crate::systems::{
    build_case_system, build_dichotomy_systems, BranchChoice, CPolicy, DichotomyConfig, JCase,
    SystemDocument, Variant,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CertificateParseError {
    #[error("certificate file is not valid JSON (line {line}, column {column}): {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed certificate: {0}")]
    Shape(String),
}

/// One probe's certificates, self-contained: each case echoes the system it
/// was decided on, so it can be audited without rebuilding anything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub tool_version: String,
    pub variant: Variant,
    /// `p/1,q/1,r`.
    pub policy: String,
    #[serde(with = "serde_pq")]
    pub t: Rational,
    #[serde(with = "serde_pq")]
    pub c: Rational,
    /// Dichotomy function indices, present only for dichotomy runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<String>,
    pub cases: Vec<CaseCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseCertificate {
    pub case: JCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_pq_vec")]
    pub witness: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_pq_vec")]
    pub farkas: Option<Vec<Rational>>,
    pub system: SystemDocument,
}

mod opt_pq_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{serde_pq_vec, Rational};

    pub fn serialize<S: Serializer>(
        values: &Option<Vec<Rational>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match values {
            Some(v) => serde_pq_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "serde_pq_vec")] Vec<Rational>);
        Option::<Wrapped>::deserialize(d).map(|o| o.map(|w| w.0))
    }
}

/// Result of auditing a certificate file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub problems: Vec<String>,
    pub all_infeasible: bool,
    /// Every case appears exactly once, so the file can certify `t`.
    pub complete: bool,
}

impl VerifyOutcome {
    pub fn valid(&self) -> bool {
        self.problems.is_empty()
    }
}

impl CaseCertificate {
    fn new(
        case: JCase,
        branches: Option<String>,
        system: &LinearSystem,
        result: &FeasibilityResult,
    ) -> Self {
        Self {
            case,
            branches,
            status: result.status,
            witness: result.witness.clone(),
            farkas: result.farkas.clone(),
            system: SystemDocument::from(system),
        }
    }

    pub fn result(&self) -> FeasibilityResult {
        FeasibilityResult {
            status: self.status,
            witness: self.witness.clone(),
            farkas: self.farkas.clone(),
        }
    }
}

impl CertificateFile {
    pub fn from_report(report: &CaseReport) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            variant: report.variant,
            policy: report.policy.to_file_form(),
            t: report.t.clone(),
            c: report.c.clone(),
            functions: None,
            cases: report
                .cases
                .iter()
                .map(|o| CaseCertificate::new(o.case, None, &o.system, &o.result))
                .collect(),
        }
    }

    pub fn from_branch(report: &DichotomyReport, branch: &BranchReport) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            variant: report.variant,
            policy: report.policy.to_file_form(),
            t: report.t.clone(),
            c: report.c.clone(),
            functions: Some(report.config.to_string()),
            cases: branch
                .cases
                .iter()
                .map(|o| {
                    CaseCertificate::new(
                        o.case,
                        Some(branch.branches.to_string()),
                        &o.system,
                        &o.result,
                    )
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }

    /// Accepts a single certificate or any report object carrying a
    /// `certificates` array of them.
    pub fn parse_all(text: &str) -> Result<Vec<CertificateFile>, CertificateParseError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CertificateParseError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        let shape = |e: serde_json::Error| CertificateParseError::Shape(e.to_string());
        if value.get("cases").is_some() {
            return Ok(vec![serde_json::from_value(value).map_err(shape)?]);
        }
        match value.get("certificates") {
            Some(serde_json::Value::Array(items)) if !items.is_empty() => items
                .iter()
                .map(|v| serde_json::from_value(v.clone()).map_err(shape))
                .collect(),
            _ => Err(CertificateParseError::Shape(
                "expected a certificate object or a non-empty `certificates` array".into(),
            )),
        }
    }

    /// Substitution-only audit, plus a check that each echoed system is the
    /// one the builder produces for the recorded parameters.
    pub fn verify(&self) -> VerifyOutcome {
        let mut problems = Vec::new();
        let expected = self.expected_systems().unwrap_or_else(|e| {
            problems.push(e);
            Vec::new()
        });
        for entry in &self.cases {
            let tag = match &entry.branches {
                Some(b) => format!("{} [{b}]", entry.case),
                None => entry.case.to_string(),
            };
            let system = entry.system.clone().into_system();
            match verify_certificate(&system, &entry.result()) {
                Ok(true) => {}
                Ok(false) => problems.push(format!(
                    "{tag}: {} certificate does not verify",
                    entry.status
                )),
                Err(e) => problems.push(format!("{tag}: {e}")),
            }
            if let Some((_, rebuilt)) = expected.iter().find(|(case, _)| *case == entry.case) {
                if *rebuilt != system {
                    problems.push(format!("{tag}: echoed system differs from the rebuilt one"));
                }
            }
        }
        let mut seen: Vec<JCase> = self.cases.iter().map(|c| c.case).collect();
        seen.sort();
        let before = seen.len();
        seen.dedup();
        if seen.len() != before {
            problems.push("a case appears more than once".into());
        }
        if self.cases.is_empty() {
            problems.push("no cases".into());
        }
        VerifyOutcome {
            all_infeasible: self.cases.iter().all(|c| c.status == Status::Infeasible),
            complete: seen.len() == JCase::ALL_CASES.len() && before == seen.len(),
            problems,
        }
    }

    fn expected_systems(&self) -> Result<Vec<(JCase, LinearSystem)>, String> {
        let policy: CPolicy = self.policy.parse().map_err(|e| format!("policy: {e}"))?;
        let c = policy.checked_c(&self.t).map_err(|e| e.to_string())?;
        if c != self.c {
            return Err(format!(
                "recorded c = {} but c(t) = {}",
                PQ(&self.c),
                PQ(&c)
            ));
        }
        match &self.functions {
            None => JCase::ALL_CASES
                .into_iter()
                .map(|case| {
                    build_case_system(case, &self.t, policy, self.variant)
                        .map(|s| (case, s))
                        .map_err(|e| e.to_string())
                })
                .collect(),
            Some(functions) => {
                let config: DichotomyConfig =
                    functions.parse().map_err(|e| format!("functions: {e}"))?;
                let branches: BranchChoice = self
                    .cases
                    .first()
                    .and_then(|c| c.branches.as_deref())
                    .ok_or("dichotomy certificate without branches")?
                    .parse()
                    .map_err(|e| format!("branches: {e}"))?;
                if self
                    .cases
                    .iter()
                    .any(|c| c.branches.as_deref() != Some(&branches.to_string()))
                {
                    return Err("cases disagree on the branch assignment".into());
                }
                let systems =
                    build_dichotomy_systems(&self.t, policy, self.variant, &config, &branches)
                        .map_err(|e| e.to_string())?;
                Ok(JCase::ALL_CASES.into_iter().zip(systems).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::{certify_at, certify_dichotomy};
    use crate::rational::{frac, int};

    #[test]
    fn round_trip_and_audit() {
        let report = certify_at(&int(3), CPolicy::DEFAULT, Variant::Symmetrized).unwrap();
        let file = CertificateFile::from_report(&report);
        let text = file.to_json();
        let parsed = CertificateFile::parse_all(&text).unwrap();
        assert_eq!(parsed, vec![file]);
        let outcome = parsed[0].verify();
        assert!(outcome.valid(), "{:?}", outcome.problems);
        assert!(outcome.all_infeasible);
        assert!(outcome.complete);
    }

    #[test]
    fn single_case_files_audit_but_are_incomplete() {
        let report = certify_at(&int(3), CPolicy::DEFAULT, Variant::Symmetrized).unwrap();
        let mut file = CertificateFile::from_report(&report);
        file.cases.retain(|c| c.case == JCase::In0Not1);
        let outcome = file.verify();
        assert!(outcome.valid(), "{:?}", outcome.problems);
        assert!(!outcome.complete);

        let mut file = CertificateFile::from_report(&report);
        file.cases.push(file.cases[0].clone());
        assert!(!file.verify().valid());
    }

    #[test]
    fn tampering_is_detected() {
        let report = certify_at(&int(3), CPolicy::DEFAULT, Variant::Printed).unwrap();
        let mut file = CertificateFile::from_report(&report);
        let farkas = file.cases[0].farkas.as_mut().unwrap();
        let k = farkas.iter().position(|m| *m > int(0)).unwrap();
        farkas[k] += frac(1, 7);
        assert!(!file.verify().valid());

        let mut file = CertificateFile::from_report(&report);
        file.cases[1].system.inequalities.pop();
        assert!(!file.verify().valid());
    }

    #[test]
    fn dichotomy_certificates_audit() {
        let report = certify_dichotomy(
            &frac(7, 2),
            CPolicy::DEFAULT,
            Variant::Symmetrized,
            &DichotomyConfig { functions: vec![1] },
        )
        .unwrap();
        for branch in &report.branches {
            let file = CertificateFile::from_branch(&report, branch);
            assert!(file.verify().valid());
        }
    }

    #[test]
    fn truncated_text_is_a_syntax_error() {
        let report = certify_at(&int(3), CPolicy::DEFAULT, Variant::Printed).unwrap();
        let text = CertificateFile::from_report(&report).to_json();
        let cut = &text[..text.len() / 2];
        assert!(matches!(
            CertificateFile::parse_all(cut),
            Err(CertificateParseError::Syntax { .. })
        ));
    }
}
