//! JSON system-definition files.
//!
//! ```json
//! {
//!   "variables": ["x", "y"],
//!   "nonneg": ["x", "y"],
//!   "meta": {"case": "J012"},
//!   "inequalities": [
//!     {"label": "r0", "coeffs": {"x": "1/1"}, "rel": "<=", "rhs": "1/1"}
//!   ]
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lp::{LinearInequality, LinearSystem, LpError, Relation};
use crate::rational::{serde_pq, Rational};

#[derive(Debug, thiserror::Error)]
pub enum SystemFileError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: inequality `{label}` uses undeclared variable `{variable}`")]
    UndeclaredVariable {
        line: usize,
        label: String,
        variable: String,
    },
    #[error("invalid system: {0}")]
    Invalid(#[from] LpError),
}

/// Serde mirror of a [`LinearSystem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub variables: Vec<String>,
    #[serde(default)]
    pub nonneg: Vec<String>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
    pub inequalities: Vec<InequalityDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityDocument {
    pub label: String,
    #[serde(with = "serde_pq_map")]
    pub coeffs: BTreeMap<String, Rational>,
    pub rel: Relation,
    #[serde(with = "serde_pq")]
    pub rhs: Rational,
}

mod serde_pq_map {
    use std::collections::BTreeMap;

    use serde::{de, ser::SerializeMap, Deserialize, Deserializer, Serializer};

    use crate::rational::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<String, Rational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let mut out = s.serialize_map(Some(map.len()))?;
        for (k, v) in map {
            out.serialize_entry(k, &format_rational(v))?;
        }
        out.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, Rational>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                parse_rational(&v)
                    .map(|r| (k.clone(), r))
                    .map_err(|e| de::Error::custom(format!("coefficient of `{k}`: {e}")))
            })
            .collect()
    }
}

impl From<&LinearSystem> for SystemDocument {
    fn from(system: &LinearSystem) -> Self {
        Self {
            variables: system.variables.clone(),
            nonneg: system.nonneg.clone(),
            meta: system.meta.clone(),
            inequalities: system
                .inequalities
                .iter()
                .map(|ineq| InequalityDocument {
                    label: ineq.label.clone(),
                    coeffs: ineq.coeffs.clone(),
                    rel: ineq.relation,
                    rhs: ineq.rhs.clone(),
                })
                .collect(),
        }
    }
}

impl SystemDocument {
    pub fn into_system(self) -> LinearSystem {
        let mut system = LinearSystem::new(self.variables, self.nonneg);
        system.meta = self.meta;
        for entry in self.inequalities {
            system.push(LinearInequality::new(
                entry.label,
                entry.coeffs,
                entry.rel,
                entry.rhs,
            ));
        }
        system
    }
}

pub fn serialize_system(system: &LinearSystem) -> String {
    serde_json::to_string_pretty(&SystemDocument::from(system)).expect("system serializes")
}

pub fn parse_system_file(text: &str) -> Result<LinearSystem, SystemFileError> {
    let doc: SystemDocument = serde_json::from_str(text).map_err(|e| SystemFileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let system = doc.into_system();
    match system.validate() {
        Ok(()) => Ok(system),
        Err(LpError::UndeclaredVariable { label, variable }) => {
            Err(SystemFileError::UndeclaredVariable {
                line: locate(text, &label, &variable),
                label,
                variable,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// 1-based line of the first quoted `variable` after the inequality whose
/// label is `label`; falls back to line 1.
fn locate(text: &str, label: &str, variable: &str) -> usize {
    let label_json = serde_json::to_string(label).unwrap_or_default();
    let var_json = serde_json::to_string(variable).unwrap_or_default();
    let start = text
        .match_indices(&label_json)
        .map(|(i, _)| i)
        .find(|&i| text[..i].trim_end().ends_with(':'))
        .unwrap_or(0);
    let offset = text[start..].find(&var_json).map_or(start, |i| start + i);
    text[..offset].matches('\n').count() + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn unit_square() -> LinearSystem {
        let vars = vec!["x".to_string(), "y".to_string()];
        let mut s = LinearSystem::new(vars.clone(), vars);
        s.push(LinearInequality::new(
            "x",
            [("x", int(1))],
            Relation::Le,
            int(1),
        ));
        s.push(LinearInequality::new(
            "y",
            [("y", int(1))],
            Relation::Le,
            int(1),
        ));
        s
    }

    #[test]
    fn unit_square_round_trip() {
        let text = serialize_system(&unit_square());
        let back = parse_system_file(&text).unwrap();
        assert_eq!(back, unit_square());
        assert_eq!(serialize_system(&back), text);
    }

    #[test]
    fn zero_denominator_is_rejected_with_line() {
        let text = "{\n \"variables\": [\"x\"],\n \"inequalities\": [\n  {\"label\": \"r\", \"coeffs\": {\"x\": \"1/1\"}, \"rel\": \"<=\", \"rhs\": \"1/0\"}\n ]\n}";
        let err = parse_system_file(text).unwrap_err();
        assert!(
            matches!(err, SystemFileError::Syntax { line: 4, .. }),
            "{err}"
        );
    }

    #[test]
    fn decimal_and_relation_errors() {
        let decimal = r#"{"variables":["x"],"inequalities":[{"label":"r","coeffs":{"x":"1.5"},"rel":"<=","rhs":"1"}]}"#;
        assert!(parse_system_file(decimal)
            .unwrap_err()
            .to_string()
            .contains("decimal"));
        let rel = r#"{"variables":["x"],"inequalities":[{"label":"r","coeffs":{"x":"1"},"rel":"<","rhs":"1"}]}"#;
        assert!(matches!(
            parse_system_file(rel),
            Err(SystemFileError::Syntax { .. })
        ));
    }

    #[test]
    fn undeclared_variable_reports_its_line() {
        let text = "{\n \"variables\": [\"x\"],\n \"inequalities\": [\n  {\"label\": \"ok\", \"coeffs\": {\"x\": \"1\"}, \"rel\": \"<=\", \"rhs\": \"1\"},\n  {\"label\": \"bad\",\n   \"coeffs\": {\"z\": \"1\"}, \"rel\": \"<=\", \"rhs\": \"1\"}\n ]\n}";
        match parse_system_file(text).unwrap_err() {
            SystemFileError::UndeclaredVariable {
                line,
                label,
                variable,
            } => {
                assert_eq!((line, label.as_str(), variable.as_str()), (6, "bad", "z"));
            }
            other => panic!("unexpected {other}"),
        }
    }
}
