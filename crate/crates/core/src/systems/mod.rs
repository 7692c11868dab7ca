//! The four case systems in the variables `(θ₀, θ₁, θ₂, a)` for three
//! convergent sequences, instantiated at an exact `t` and threshold
//! constant `c = c(t)`.
//!
//! Here `θ_m ≥ 0` is the atom of the limit measure at the `m`-th limit
//! point and `a` is the total variation of the remaining part. Every
//! generated inequality keeps the label of the display it encodes (`7a`,
//! `6b2`, `8d`, ...); the ordering constraints `θ₀ ≤ θ₁ ≤ θ₂` carry the
//! label of the bound display with suffixes `.1` and `.2`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::lp::{LinearInequality, LinearSystem, Relation};
use crate::rational::{int, Rational, PQ};

mod dichotomy;
mod file;

pub use dichotomy::{build_dichotomy_systems, Branch, BranchChoice, DichotomyConfig};
pub use file::{
    parse_system_file, serialize_system, InequalityDocument, SystemDocument, SystemFileError,
};

pub const THETA: [&str; 3] = ["theta0", "theta1", "theta2"];
pub const A: &str = "a";

pub fn variables() -> Vec<String> {
    THETA.iter().copied().chain([A]).map(String::from).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("guard t - 1 > 0 violated at t = {0}")]
    TNotAboveOne(String),
    #[error("guard c - 1 > 0 violated: c({t}) = {c}")]
    CNotAboveOne { t: String, c: String },
    #[error("guard t/2 <= c <= t violated: c({t}) = {c}")]
    CPolicyOutOfRange { t: String, c: String },
    #[error("invalid c-policy: {0}")]
    InvalidPolicy(String),
    #[error("branch vector has length {got}, configuration expects {expected}")]
    BranchLength { expected: usize, got: usize },
    #[error("invalid dichotomy configuration: {0}")]
    InvalidConfig(String),
}

/// Affine choice `c(t) = (p·t + q)/r` of the threshold constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CPolicy {
    pub p: i64,
    pub q: i64,
    pub r: i64,
}

impl CPolicy {
    /// `c(t) = (2t + 1)/4`.
    pub const DEFAULT: CPolicy = CPolicy { p: 2, q: 1, r: 4 };
    pub const HALF_T: CPolicy = CPolicy { p: 1, q: 0, r: 2 };
    pub const HALF_T_PLUS_ONE: CPolicy = CPolicy { p: 1, q: 1, r: 2 };

    pub fn new(p: i64, q: i64, r: i64) -> Result<Self, SystemError> {
        if r <= 0 {
            return Err(SystemError::InvalidPolicy(format!(
                "denominator r = {r} must be positive"
            )));
        }
        Ok(Self { p, q, r })
    }

    pub fn c_at(&self, t: &Rational) -> Rational {
        (int(self.p) * t + int(self.q)) / int(self.r)
    }

    /// Evaluates `c(t)` and checks every guard the case systems need.
    pub fn checked_c(&self, t: &Rational) -> Result<Rational, SystemError> {
        if self.r <= 0 {
            return Err(SystemError::InvalidPolicy(format!(
                "denominator r = {} must be positive",
                self.r
            )));
        }
        if *t <= Rational::one() {
            return Err(SystemError::TNotAboveOne(PQ(t).to_string()));
        }
        let c = self.c_at(t);
        if c <= Rational::one() {
            return Err(SystemError::CNotAboveOne {
                t: PQ(t).to_string(),
                c: PQ(&c).to_string(),
            });
        }
        if c < t / int(2) || c > *t {
            return Err(SystemError::CPolicyOutOfRange {
                t: PQ(t).to_string(),
                c: PQ(&c).to_string(),
            });
        }
        Ok(c)
    }

    /// Certificate-file form `p/1,q/1,r`.
    pub fn to_file_form(&self) -> String {
        format!("{}/1,{}/1,{}", self.p, self.q, self.r)
    }
}

impl fmt::Display for CPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}*t{:+})/{}", self.p, self.q, self.r)
    }
}

impl FromStr for CPolicy {
    type Err = SystemError;

    /// Accepts `p,q,r` with integer entries; `p/1` style entries are
    /// accepted when the denominator is 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(SystemError::InvalidPolicy(format!(
                "expected p,q,r, got `{s}`"
            )));
        }
        let parse = |x: &str| -> Result<i64, SystemError> {
            let x = x.strip_suffix("/1").unwrap_or(x);
            x.parse::<i64>()
                .map_err(|_| SystemError::InvalidPolicy(format!("`{x}` is not an integer")))
        };
        CPolicy::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    }
}

/// Structure of the set `J` of limit points admitting a large point
/// evaluation; one linear system per case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JCase {
    /// `J = {0, 1, 2}`
    #[serde(rename = "J012")]
    All,
    /// `0 ∉ J`
    #[serde(rename = "not0")]
    Not0,
    /// `0 ∈ J`, `1 ∉ J`
    #[serde(rename = "in0not1")]
    In0Not1,
    /// `0, 1 ∈ J`, `2 ∉ J`
    #[serde(rename = "in01not2")]
    In01Not2,
}

impl JCase {
    pub const ALL_CASES: [JCase; 4] = [JCase::All, JCase::Not0, JCase::In0Not1, JCase::In01Not2];

    pub fn tag(self) -> &'static str {
        match self {
            JCase::All => "J012",
            JCase::Not0 => "not0",
            JCase::In0Not1 => "in0not1",
            JCase::In01Not2 => "in01not2",
        }
    }

    /// Display-number prefix used in the labels.
    fn prefix(self) -> &'static str {
        match self {
            JCase::All => "7",
            JCase::Not0 => "6",
            JCase::In0Not1 => "8",
            JCase::In01Not2 => "9",
        }
    }
}

impl fmt::Display for JCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for JCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        JCase::ALL_CASES
            .into_iter()
            .find(|c| c.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown case `{s}` (expected J012, not0, in0not1, in01not2)"))
    }
}

/// Reading of display (8d), whose printed tail `−θ₁+θ₁+θ₂+a` cancels.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Tail taken literally: `θ₂ + a`.
    Printed,
    /// Tail `−θ₁+θ₀+θ₂+a`, mirroring (9d).
    #[default]
    Symmetrized,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Variant::Printed, Variant::Symmetrized];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Printed => "printed",
            Variant::Symmetrized => "symmetrized",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "printed" => Ok(Variant::Printed),
            "symmetrized" => Ok(Variant::Symmetrized),
            other => Err(format!(
                "unknown variant `{other}` (expected printed or symmetrized)"
            )),
        }
    }
}

/// Exact parameters shared by all rows of one instantiation.
#[derive(Debug, Clone)]
pub(crate) struct Params {
    pub t: Rational,
    pub c: Rational,
}

impl Params {
    /// `s = t/2 + c/2`, the norm bound used for the balanced test functions.
    pub fn s_mid(&self) -> Rational {
        (&self.t + &self.c) / int(2)
    }

    /// Weight `(t − c − 1)/c`.
    pub fn j_weight(&self) -> Rational {
        (&self.t - &self.c - Rational::one()) / &self.c
    }
}

type Coeffs = [Rational; 4];

fn zeros() -> Coeffs {
    [
        Rational::zero(),
        Rational::zero(),
        Rational::zero(),
        Rational::zero(),
    ]
}

fn row(label: String, coeffs: Coeffs, relation: Relation, rhs: Rational) -> LinearInequality {
    let names = variables();
    LinearInequality::new(label, names.into_iter().zip(coeffs), relation, rhs)
}

/// `t ≥ 2t/(t−1) + θ₂ + a`.
fn doubleton_row(label: String, p: &Params) -> LinearInequality {
    let t = &p.t;
    let mut k = zeros();
    k[2] = Rational::one();
    k[3] = Rational::one();
    row(label, k, Relation::Le, t - int(2) * t / (t - int(1)))
}

/// `t ≥ 2(s − θ_m)/(s − 1) − θ_m + Σ_{j≠m} θ_j + a` for `f = χ_{A_m}` with
/// `‖Tf‖ ≤ s`.
pub(crate) fn indicator_row(label: String, p: &Params, m: usize, s: &Rational) -> LinearInequality {
    let d = s - int(1);
    let mut k = zeros();
    for (j, slot) in k.iter_mut().enumerate() {
        *slot = if j == m {
            -(int(2) / &d) - int(1)
        } else {
            Rational::one()
        };
    }
    row(label, k, Relation::Le, &p.t - int(2) * s / &d)
}

/// `t ≥ 2(s − (θ_m − (θ_o + θ_o')/2))/(s − 1) + tail + a` for the balanced
/// function `χ_{A_m} − ½χ_{A_o} − ½χ_{A_o'}`, `s = t/2 + c/2`. The tail
/// coefficients on `θ` are passed explicitly.
fn balanced_row(label: String, p: &Params, m: usize, tail: [i64; 3]) -> LinearInequality {
    let s = p.s_mid();
    let d = &s - int(1);
    let mut k = zeros();
    for j in 0..3 {
        let frac_part = if j == m { -(int(2) / &d) } else { int(1) / &d };
        k[j] = frac_part + int(tail[j]);
    }
    k[3] = Rational::one();
    row(label, k, Relation::Le, &p.t - int(2) * &s / &d)
}

/// `(t−c−1)/c · Σ_{j∈J} θ_j + Σ_{j∉J} θ_j + a ≥ 1`.
fn mass_row(label: String, p: &Params, in_j: [bool; 3]) -> LinearInequality {
    let w = p.j_weight();
    let mut k = zeros();
    for j in 0..3 {
        k[j] = if in_j[j] { w.clone() } else { Rational::one() };
    }
    k[3] = Rational::one();
    row(label, k, Relation::Ge, Rational::one())
}

fn ordering_rows(prefix: &str) -> [LinearInequality; 2] {
    let mut first = zeros();
    first[0] = int(1);
    first[1] = int(-1);
    let mut second = zeros();
    second[1] = int(1);
    second[2] = int(-1);
    [
        row(format!("{prefix}.1"), first, Relation::Le, Rational::zero()),
        row(
            format!("{prefix}.2"),
            second,
            Relation::Le,
            Rational::zero(),
        ),
    ]
}

/// Builds one case system at `t` with `c = policy(t)`.
pub fn build_case_system(
    case: JCase,
    t: &Rational,
    policy: CPolicy,
    variant: Variant,
) -> Result<LinearSystem, SystemError> {
    let c = policy.checked_c(t)?;
    let p = Params { t: t.clone(), c };
    let mut system = LinearSystem::new(variables(), variables())
        .with_meta("case", case.tag())
        .with_meta("t", crate::rational::format_rational(t))
        .with_meta("c", crate::rational::format_rational(&p.c))
        .with_meta("policy", policy.to_file_form())
        .with_meta("variant", variant.name());
    let pre = case.prefix();
    let l = |suffix: &str| format!("{pre}{suffix}");
    let rows: Vec<LinearInequality> = match case {
        JCase::All => vec![
            doubleton_row(l("a"), &p),
            indicator_row(l("b"), &p, 0, &p.t),
            mass_row(l("c"), &p, [true, true, true]),
        ],
        JCase::Not0 => vec![
            doubleton_row(l("a"), &p),
            indicator_row(l("b"), &p, 0, &p.c),
            balanced_row(l("b2"), &p, 0, [-1, 1, 1]),
            mass_row(l("c"), &p, [false, false, false]),
        ],
        JCase::In0Not1 => {
            let tail = match variant {
                Variant::Printed => [0, 0, 1],
                Variant::Symmetrized => [1, -1, 1],
            };
            vec![
                doubleton_row(l("a"), &p),
                indicator_row(l("b"), &p, 0, &p.t),
                indicator_row(l("c"), &p, 1, &p.c),
                balanced_row(l("d"), &p, 1, tail),
                mass_row(l("e"), &p, [true, false, false]),
            ]
        }
        JCase::In01Not2 => vec![
            doubleton_row(l("a"), &p),
            indicator_row(l("b"), &p, 0, &p.t),
            indicator_row(l("c"), &p, 2, &p.c),
            balanced_row(l("d"), &p, 2, [1, 1, -1]),
            mass_row(l("e"), &p, [true, true, false]),
        ],
    };
    let bound_label = match case {
        JCase::All => l("d"),
        JCase::Not0 => l("d"),
        JCase::In0Not1 | JCase::In01Not2 => l("f"),
    };
    for r in rows.into_iter().chain(ordering_rows(&bound_label)) {
        system.push(r);
    }
    Ok(system)
}

/// Display labels each case must produce; the bound display appears as
/// the `.1`/`.2` ordering rows together with the nonnegativity set.
pub fn expected_labels(case: JCase) -> &'static [&'static str] {
    match case {
        JCase::All => &["7a", "7b", "7c", "7d"],
        JCase::Not0 => &["6a", "6b", "6b2", "6c", "6d"],
        JCase::In0Not1 => &["8a", "8b", "8c", "8d", "8e", "8f"],
        JCase::In01Not2 => &["9a", "9b", "9c", "9d", "9e", "9f"],
    }
}

/// Positive quantity the display with this label divides by: `t − 1` for
/// the `s = t` rows, `c − 1` for the `s = c` rows, `t/2 + c/2 − 1` for the
/// balanced rows, `c` for the mass rows and 1 otherwise.
pub fn display_denominator(label: &str, t: &Rational, c: &Rational) -> Rational {
    let p = Params {
        t: t.clone(),
        c: c.clone(),
    };
    match label {
        "7a" | "6a" | "8a" | "9a" | "7b" | "8b" | "9b" => t - int(1),
        "6b" | "8c" | "9c" => c - int(1),
        "6b2" | "8d" | "9d" => p.s_mid() - int(1),
        "7c" | "8e" | "9e" => c.clone(),
        _ => Rational::one(),
    }
}
