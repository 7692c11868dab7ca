//! Closed-form lower bounds and numerical checks of the monotonicity claims
//! used in their proofs. All evaluations run at [`crate::real::DIGITS`]
//! significant digits.

use std::fmt;
use std::str::FromStr;

use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("height bound needs m >= 1, got {0}")]
    HeightOutOfRange(i64),
    #[error("Gergont-Piasecki bound needs k >= 2, got {0}")]
    GpOutOfRange(i64),
    #[error("h(theta) needs m >= 2, got {0}")]
    HOutOfRange(i64),
    #[error("negative radicand in {0}")]
    NegativeRadicand(&'static str),
    #[error("non-positive denominator in s(theta) at m = {m}, t = {t}, theta = {theta}")]
    NonPositiveDenominator { m: i64, t: String, theta: String },
    #[error("s(theta) needs m >= 2 and t >= 3")]
    SOutOfRange,
    #[error("unknown threshold family `{0}` (expected quad-4-1, quad-sqrt3, theta-branch)")]
    UnknownFamily(String),
    #[error("theta-branch needs a parameter theta >= 0")]
    MissingTheta,
}

fn r(v: i64) -> Real {
    Real::from_i64(v)
}

fn sqrt_checked(x: Real, what: &'static str) -> Result<Real, BoundError> {
    x.sqrt().ok_or(BoundError::NegativeRadicand(what))
}

/// `m + √((m−1)(m+3))`, the bound for compacta of height `m`.
pub fn lower_bound_height(m: i64) -> Result<Real, BoundError> {
    if m < 1 {
        return Err(BoundError::HeightOutOfRange(m));
    }
    Ok(r(m) + sqrt_checked(r((m - 1) * (m + 3)), "m + sqrt((m-1)(m+3))")?)
}

/// `(√(3k²−2k+1) + 2k − 1)/k`.
pub fn gp_lower_bound(k: i64) -> Result<Real, BoundError> {
    if k < 2 {
        return Err(BoundError::GpOutOfRange(k));
    }
    let root = sqrt_checked(r(3 * k * k - 2 * k + 1), "sqrt(3k^2-2k+1)")?;
    Ok((root + r(2 * k - 1)) / r(k))
}

/// `½(√(4m² + 4m(θ+1) + θ² − 6θ − 7) + 2m − θ + 1)`.
pub fn h_theta(m: i64, theta: &Real) -> Result<Real, BoundError> {
    if m < 2 {
        return Err(BoundError::HOutOfRange(m));
    }
    let mr = r(m);
    let radicand =
        r(4 * m * m) + r(4) * &mr * &(theta + &r(1)) + theta * theta - r(6) * theta.clone() - r(7);
    let root = sqrt_checked(radicand, "h(theta)")?;
    Ok((root + r(2 * m) - theta.clone() + r(1)) / r(2))
}

/// `(t−1)/((t+θ)(m−2) + t − 1) · (t+θ)/2`.
pub fn s_theta(m: i64, t: &Real, theta: &Real) -> Result<Real, BoundError> {
    if m < 2 || *t < r(3) {
        return Err(BoundError::SOutOfRange);
    }
    let tt = t + theta;
    let den = &tt * &r(m - 2) + t.clone() - r(1);
    if den <= Real::zero() {
        return Err(BoundError::NonPositiveDenominator {
            m,
            t: t.to_digits(12),
            theta: theta.to_digits(12),
        });
    }
    Ok((t - &r(1)) / den * tt / r(2))
}

/// Grid spacing, finite-difference step and tolerance of the derivative
/// checks.
#[derive(Debug, Clone)]
pub struct DerivativeCheck {
    pub grid: Real,
    pub step: Real,
    pub tolerance: Real,
}

impl Default for DerivativeCheck {
    fn default() -> Self {
        Self {
            grid: Real::from_str("1e-3").expect("literal"),
            step: Real::from_str("1e-6").expect("literal"),
            tolerance: Real::from_str("1e-9").expect("literal"),
        }
    }
}

/// Result of a derivative sign check: the extreme central difference seen
/// and where it occurred.
#[derive(Debug, Clone)]
pub struct DerivativeReport {
    pub passed: bool,
    pub extreme: Real,
    pub at: Real,
    pub samples: usize,
}

fn scan_derivative<F>(
    lo: i64,
    hi: i64,
    check: &DerivativeCheck,
    f: F,
    want_nonpositive: bool,
) -> Result<DerivativeReport, BoundError>
where
    F: Fn(&Real) -> Result<Real, BoundError>,
{
    let mut theta = r(lo);
    let end = r(hi);
    let two_step = &check.step * &r(2);
    let mut extreme: Option<(Real, Real)> = None;
    let mut samples = 0;
    while theta <= end {
        let d = (f(&(&theta + &check.step))? - f(&(&theta - &check.step))?) / two_step.clone();
        let worse = match &extreme {
            None => true,
            Some((e, _)) => {
                if want_nonpositive {
                    d > *e
                } else {
                    d < *e
                }
            }
        };
        if worse {
            extreme = Some((d, theta.clone()));
        }
        samples += 1;
        theta = theta + &check.grid;
    }
    let (extreme, at) = extreme.expect("non-empty grid");
    let passed = if want_nonpositive {
        extreme <= check.tolerance
    } else {
        extreme >= -check.tolerance.clone()
    };
    Ok(DerivativeReport {
        passed,
        extreme,
        at,
        samples,
    })
}

/// `h′(θ) ≤ tol` on the grid over `[0, 1]`.
pub fn check_h_decreasing(m: i64) -> Result<DerivativeReport, BoundError> {
    check_h_decreasing_with(m, &DerivativeCheck::default())
}

pub fn check_h_decreasing_with(
    m: i64,
    check: &DerivativeCheck,
) -> Result<DerivativeReport, BoundError> {
    scan_derivative(0, 1, check, |th| h_theta(m, th), true)
}

/// `s′(θ) ≥ −tol` on the grid over `[1, 10]`.
pub fn check_s_increasing(m: i64, t: &Real) -> Result<DerivativeReport, BoundError> {
    check_s_increasing_with(m, t, &DerivativeCheck::default())
}

pub fn check_s_increasing_with(
    m: i64,
    t: &Real,
    check: &DerivativeCheck,
) -> Result<DerivativeReport, BoundError> {
    scan_derivative(1, 10, check, |th| s_theta(m, t, th), false)
}

/// Scalar threshold inequalities solved in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdFamily {
    /// `t² − 4t − 1 ≥ 0`.
    Quad41,
    /// `t ≥ 2t/(t−1) + 1`, i.e. `t² − 4t + 1 ≥ 0`.
    QuadSqrt3,
    /// `t² − 4t − θ² ≥ 0`, i.e. `t ≥ 2 + √(θ² + 4)`.
    ThetaBranch,
}

impl ThresholdFamily {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdFamily::Quad41 => "quad-4-1",
            ThresholdFamily::QuadSqrt3 => "quad-sqrt3",
            ThresholdFamily::ThetaBranch => "theta-branch",
        }
    }
}

impl fmt::Display for ThresholdFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThresholdFamily {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quad-4-1" => Ok(ThresholdFamily::Quad41),
            "quad-sqrt3" => Ok(ThresholdFamily::QuadSqrt3),
            "theta-branch" => Ok(ThresholdFamily::ThetaBranch),
            other => Err(BoundError::UnknownFamily(other.to_string())),
        }
    }
}

/// Larger root of `t² + b·t + c`.
fn larger_root(b: Real, c: Real) -> Result<Real, BoundError> {
    let disc = &b * &b - r(4) * c;
    Ok((sqrt_checked(disc, "quadratic discriminant")? - b) / r(2))
}

/// Smallest `t > 1` satisfying the family's inequality.
pub fn solve_threshold(family: ThresholdFamily, theta: Option<&Real>) -> Result<Real, BoundError> {
    match family {
        ThresholdFamily::Quad41 => larger_root(r(-4), r(-1)),
        ThresholdFamily::QuadSqrt3 => larger_root(r(-4), r(1)),
        ThresholdFamily::ThetaBranch => {
            let theta = theta.ok_or(BoundError::MissingTheta)?;
            if theta.is_negative() {
                return Err(BoundError::MissingTheta);
            }
            larger_root(r(-4), -(theta * theta))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundQuery {
    Height(i64),
    Gp(i64),
    Threshold(ThresholdFamily, Option<Real>),
}

impl BoundQuery {
    pub fn evaluate(&self) -> Result<Real, BoundError> {
        match self {
            BoundQuery::Height(m) => lower_bound_height(*m),
            BoundQuery::Gp(k) => gp_lower_bound(*k),
            BoundQuery::Threshold(family, theta) => solve_threshold(*family, theta.as_ref()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BoundQuery::Height(_) => "height-m",
            BoundQuery::Gp(_) => "gp-k",
            BoundQuery::Threshold(..) => "quadratic-family",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Real, b: &Real, tol: &str) -> bool {
        (a - b).abs() <= Real::from_str(tol).unwrap()
    }

    fn sqrt(v: i64) -> Real {
        Real::from_i64(v).sqrt().unwrap()
    }

    #[test]
    fn height_examples() {
        assert_eq!(lower_bound_height(1).unwrap(), r(1));
        assert!(close(
            &lower_bound_height(2).unwrap(),
            &(r(2) + sqrt(5)),
            "1e-40"
        ));
        assert!(close(
            &lower_bound_height(3).unwrap(),
            &(r(3) + r(2) * sqrt(3)),
            "1e-40"
        ));
        assert_eq!(lower_bound_height(0), Err(BoundError::HeightOutOfRange(0)));
    }

    #[test]
    fn gp_examples() {
        assert!(close(&gp_lower_bound(2).unwrap(), &r(3), "1e-40"));
        assert!(close(
            &gp_lower_bound(3).unwrap(),
            &((r(5) + sqrt(22)) / r(3)),
            "1e-40"
        ));
        assert!(gp_lower_bound(1).is_err());
    }

    #[test]
    fn h_at_the_ends() {
        let one = r(1);
        assert!(close(
            &h_theta(2, &one).unwrap(),
            &lower_bound_height(2).unwrap(),
            "1e-40"
        ));
        assert!(close(
            &h_theta(2, &r(0)).unwrap(),
            &((r(5) + sqrt(17)) / r(2)),
            "1e-40"
        ));
    }

    #[test]
    fn s_examples() {
        let t = Real::from_str("3.7").unwrap();
        let th = Real::from_str("2.25").unwrap();
        assert!(close(
            &s_theta(2, &t, &th).unwrap(),
            &((&t + &th) / r(2)),
            "1e-50"
        ));
        assert!(close(
            &s_theta(3, &r(3), &r(1)).unwrap(),
            &(r(2) / r(3)),
            "1e-50"
        ));
        assert!(s_theta(3, &r(2), &r(1)).is_err());
    }

    #[test]
    fn threshold_families() {
        let a = solve_threshold(ThresholdFamily::Quad41, None).unwrap();
        assert!(close(&a, &(r(2) + sqrt(5)), "1e-40"));
        let b = solve_threshold(ThresholdFamily::QuadSqrt3, None).unwrap();
        assert!(close(&b, &(r(2) + sqrt(3)), "1e-40"));
        let c = solve_threshold(ThresholdFamily::ThetaBranch, Some(&r(1))).unwrap();
        assert!(close(&c, &a, "1e-40"));
        assert!(solve_threshold(ThresholdFamily::ThetaBranch, None).is_err());
        assert!("quad-9".parse::<ThresholdFamily>().is_err());
    }

    #[test]
    fn derivative_checks() {
        let report = check_h_decreasing(2).unwrap();
        assert!(report.passed);
        assert_eq!(report.samples, 1001);
        assert!(check_s_increasing(3, &r(3)).unwrap().passed);
    }
}
