//! Exact feasibility for systems of linear inequalities over the rationals.
//!
//! Every decision comes with a certificate that can be re-checked by plain
//! substitution: a rational witness point when the system is feasible, or a
//! vector of nonnegative Farkas multipliers when it is not. The multipliers
//! are indexed by the *normalized rows* of the system: first every
//! inequality rewritten in `≤` form (a `≥` row is negated), then one row
//! `-x ≤ 0` per nonnegativity constraint, in the order of [`LinearSystem::nonneg`].
//!
//! Two independent decision procedures are provided. [`check_feasibility`]
//! runs Fourier–Motzkin elimination and recovers the multipliers from the
//! elimination trace; [`simplex::phase_one`] runs an exact phase-1 simplex
//! with Bland's rule and reads the multipliers off the final reduced costs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{Rational, PQ};

mod certificate;
mod fourier_motzkin;
pub mod simplex;
mod vertices;

pub use certificate::verify_certificate;
pub use fourier_motzkin::check_feasibility;
pub use vertices::enumerate_vertices;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("inequality `{label}` references undeclared variable `{variable}`")]
    UndeclaredVariable { label: String, variable: String },
    #[error("variable `{0}` declared more than once")]
    DuplicateVariable(String),
    #[error("nonnegativity constraint on undeclared variable `{0}`")]
    UnknownNonneg(String),
    #[error("inequality #{0} has an empty label")]
    EmptyLabel(usize),
    #[error("feasible result carries no witness")]
    MissingWitness,
    #[error("infeasible result carries no Farkas certificate")]
    MissingFarkas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `Σ coeffs[v]·v  relation  rhs`, tagged with the name of the display it
/// came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearInequality {
    pub label: String,
    pub coeffs: BTreeMap<String, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearInequality {
    /// Builds an inequality, dropping zero coefficients.
    pub fn new<I, S>(label: impl Into<String>, coeffs: I, relation: Relation, rhs: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, value) in coeffs {
            let name = name.into();
            let entry = map.entry(name).or_insert_with(Rational::zero);
            *entry += value;
        }
        map.retain(|_, v: &mut Rational| !v.is_zero());
        Self {
            label: label.into(),
            coeffs: map,
            relation,
            rhs,
        }
    }

    pub fn coeff(&self, variable: &str) -> Rational {
        self.coeffs
            .get(variable)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Multiplies both sides by a positive rational.
    pub fn scaled(&self, factor: &Rational) -> Self {
        assert!(factor.is_positive(), "scaling factor must be positive");
        Self {
            label: self.label.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            relation: self.relation,
            rhs: &self.rhs * factor,
        }
    }

    /// Exact check at a point given in the owning system's variable order.
    pub fn holds_at(&self, variables: &[String], point: &[Rational]) -> bool {
        let lhs = variables
            .iter()
            .zip(point)
            .fold(Rational::zero(), |acc, (name, x)| {
                acc + self.coeff(name) * x
            });
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    pub fn display_with(&self, variables: &[String]) -> String {
        let mut terms = Vec::new();
        for name in variables {
            if let Some(c) = self.coeffs.get(name) {
                terms.push(format!("{}*{}", PQ(c), name));
            }
        }
        let lhs = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        format!(
            "[{}] {} {} {}",
            self.label,
            lhs,
            self.relation,
            PQ(&self.rhs)
        )
    }
}

/// A finite system of closed linear inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    pub variables: Vec<String>,
    pub inequalities: Vec<LinearInequality>,
    /// Variables constrained to be `≥ 0`.
    pub nonneg: Vec<String>,
    /// Free-form provenance (case tag, parameter values, variant, ...).
    pub meta: BTreeMap<String, String>,
}

/// One row `coeffs·x ≤ rhs` in dense form, aligned with the system's
/// variable order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseRow {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl LinearSystem {
    pub fn new(variables: Vec<String>, nonneg: Vec<String>) -> Self {
        Self {
            variables,
            inequalities: Vec::new(),
            nonneg,
            meta: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, inequality: LinearInequality) {
        self.inequalities.push(inequality);
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v.as_str()) {
                return Err(LpError::DuplicateVariable(v.clone()));
            }
        }
        for v in &self.nonneg {
            if !seen.contains(v.as_str()) {
                return Err(LpError::UnknownNonneg(v.clone()));
            }
        }
        for (i, ineq) in self.inequalities.iter().enumerate() {
            if ineq.label.trim().is_empty() {
                return Err(LpError::EmptyLabel(i));
            }
            if let Some(bad) = ineq.coeffs.keys().find(|k| !seen.contains(k.as_str())) {
                return Err(LpError::UndeclaredVariable {
                    label: ineq.label.clone(),
                    variable: bad.clone(),
                });
            }
        }
        Ok(())
    }

    /// Number of normalized rows, i.e. the expected Farkas vector length.
    pub fn normalized_len(&self) -> usize {
        self.inequalities.len() + self.nonneg.len()
    }

    /// All constraints as dense `≤` rows: inequalities first, then one
    /// `-x ≤ 0` row per nonnegativity constraint.
    pub fn normalized_rows(&self) -> Result<Vec<DenseRow>, LpError> {
        self.validate()?;
        let n = self.variables.len();
        let mut rows = Vec::with_capacity(self.normalized_len());
        for ineq in &self.inequalities {
            let mut coeffs = vec![Rational::zero(); n];
            for (name, value) in &ineq.coeffs {
                let j = self.variable_index(name).expect("validated");
                coeffs[j] = value.clone();
            }
            let mut rhs = ineq.rhs.clone();
            if ineq.relation == Relation::Ge {
                coeffs.iter_mut().for_each(|c| *c = -c.clone());
                rhs = -rhs;
            }
            rows.push(DenseRow { coeffs, rhs });
        }
        for name in &self.nonneg {
            let j = self.variable_index(name).expect("validated");
            let mut coeffs = vec![Rational::zero(); n];
            coeffs[j] = -num_traits::one::<Rational>();
            rows.push(DenseRow {
                coeffs,
                rhs: Rational::zero(),
            });
        }
        Ok(rows)
    }

    /// Label of normalized row `i` (nonnegativity rows are `nonneg:<var>`).
    pub fn row_label(&self, i: usize) -> String {
        if i < self.inequalities.len() {
            self.inequalities[i].label.clone()
        } else {
            format!("nonneg:{}", self.nonneg[i - self.inequalities.len()])
        }
    }

    /// Exact membership test for a point in variable order.
    pub fn contains(&self, point: &[Rational]) -> bool {
        if point.len() != self.variables.len() {
            return false;
        }
        let nonneg_ok = self.nonneg.iter().all(|name| {
            self.variable_index(name)
                .map(|j| !point[j].is_negative())
                .unwrap_or(false)
        });
        nonneg_ok
            && self
                .inequalities
                .iter()
                .all(|ineq| ineq.holds_at(&self.variables, point))
    }

    /// Human-readable dump, one labelled inequality per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&format!("variables: {}\n", self.variables.join(", ")));
        out.push_str(&format!("nonneg: {}\n", self.nonneg.join(", ")));
        for ineq in &self.inequalities {
            out.push_str(&ineq.display_with(&self.variables));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
        })
    }
}

/// Verdict plus the certificate that backs it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub status: Status,
    /// Witness point in the system's variable order.
    pub witness: Option<Vec<Rational>>,
    /// Nonnegative multipliers over the normalized rows.
    pub farkas: Option<Vec<Rational>>,
}

impl FeasibilityResult {
    pub fn feasible(witness: Vec<Rational>) -> Self {
        Self {
            status: Status::Feasible,
            witness: Some(witness),
            farkas: None,
        }
    }

    pub fn infeasible(farkas: Vec<Rational>) -> Self {
        Self {
            status: Status::Infeasible,
            witness: None,
            farkas: Some(farkas),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}
