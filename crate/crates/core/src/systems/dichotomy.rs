//! Experimental strengthening of the `s = t` indicator inequalities.
//!
//! For `f = χ_{A_m}` put `x = |ν(f)| = θ_m` and `R = |ν|(K∖C) = a + Σ_{j≠m} θ_j`.
//! Either `t ≥ 2(t − x + R)/(t−1) − x + R` (branch a) or
//! `t ≥ 2(t + x − R)/(t−1) + x + R` (branch b). A branch vector picks one
//! alternative per configured function; the base inequality for the same
//! `f` with `s = t` is replaced by the chosen one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{build_case_system, variables, CPolicy, JCase, SystemError, Variant};
use crate::lp::{LinearInequality, LinearSystem, Relation};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    A,
    B,
}

impl Branch {
    pub fn letter(self) -> char {
        match self {
            Branch::A => 'a',
            Branch::B => 'b',
        }
    }
}

/// One branch per configured function, written as a string like `"aab"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BranchChoice(pub Vec<Branch>);

impl BranchChoice {
    /// All `2^b` assignments in lexicographic order (`a` before `b`).
    pub fn all(b: usize) -> Vec<BranchChoice> {
        (0..1usize << b)
            .map(|mask| {
                BranchChoice(
                    (0..b)
                        .map(|i| {
                            if mask >> (b - 1 - i) & 1 == 0 {
                                Branch::A
                            } else {
                                Branch::B
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BranchChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        self.0.iter().try_for_each(|b| write!(f, "{}", b.letter()))
    }
}

impl FromStr for BranchChoice {
    type Err = SystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" {
            return Ok(BranchChoice::default());
        }
        s.chars()
            .map(|ch| match ch.to_ascii_lowercase() {
                'a' => Ok(Branch::A),
                'b' => Ok(Branch::B),
                other => Err(SystemError::InvalidConfig(format!(
                    "branch `{other}` is neither a nor b"
                ))),
            })
            .collect::<Result<_, _>>()
            .map(BranchChoice)
    }
}

/// Indices `m` of the indicator functions `χ_{A_m}` that generate a
/// dichotomy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DichotomyConfig {
    pub functions: Vec<usize>,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        Self {
            functions: vec![0, 1, 2],
        }
    }
}

impl DichotomyConfig {
    pub fn empty() -> Self {
        Self {
            functions: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        let mut seen = [false; 3];
        for &m in &self.functions {
            if m > 2 {
                return Err(SystemError::InvalidConfig(format!(
                    "function index {m} is not in 0..3"
                )));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(SystemError::InvalidConfig(format!(
                    "function index {m} listed twice"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for DichotomyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.functions.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DichotomyConfig {
    type Err = SystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Self::empty());
        }
        let functions = s
            .split(',')
            .map(|x| {
                x.trim().parse::<usize>().map_err(|_| {
                    SystemError::InvalidConfig(format!("`{x}` is not a function index"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let config = Self { functions };
        config.validate()?;
        Ok(config)
    }
}

/// Base labels of the `s = t` inequality for `χ_{A_m}` in each case.
fn replaced_label(case: JCase, m: usize) -> Option<&'static str> {
    match (case, m) {
        (JCase::All, 0) => Some("7b"),
        (JCase::In0Not1, 0) => Some("8b"),
        (JCase::In01Not2, 0) => Some("9b"),
        _ => None,
    }
}

pub fn dichotomy_row(t: &Rational, m: usize, branch: Branch) -> LinearInequality {
    let d = t - int(1);
    let w = int(2) / &d;
    // coefficient of x and of each R-variable after moving everything left
    let (cx, cr) = match branch {
        Branch::A => (-&w - int(1), &w + int(1)),
        Branch::B => (&w + int(1), -&w + int(1)),
    };
    let mut coeffs: Vec<(String, Rational)> = Vec::new();
    for (j, name) in variables().into_iter().enumerate() {
        let k = if j == m { cx.clone() } else { cr.clone() };
        coeffs.push((name, k));
    }
    LinearInequality::new(
        format!("B1{}[m={m}]", branch.letter()),
        coeffs,
        Relation::Le,
        t - int(2) * t / &d,
    )
}

/// One system per J-case (in [`JCase::ALL_CASES`] order).
pub fn build_dichotomy_systems(
    t: &Rational,
    policy: CPolicy,
    variant: Variant,
    config: &DichotomyConfig,
    branches: &BranchChoice,
) -> Result<Vec<LinearSystem>, SystemError> {
    config.validate()?;
    if branches.len() != config.functions.len() {
        return Err(SystemError::BranchLength {
            expected: config.functions.len(),
            got: branches.len(),
        });
    }
    JCase::ALL_CASES
        .into_iter()
        .map(|case| {
            let mut system = build_case_system(case, t, policy, variant)?;
            let dropped: Vec<&str> = config
                .functions
                .iter()
                .filter_map(|&m| replaced_label(case, m))
                .collect();
            system
                .inequalities
                .retain(|r| !dropped.contains(&r.label.as_str()));
            for (&m, &branch) in config.functions.iter().zip(&branches.0) {
                system.push(dichotomy_row(t, m, branch));
            }
            Ok(system
                .with_meta("functions", config.to_string())
                .with_meta("branches", branches.to_string()))
        })
        .collect()
}
