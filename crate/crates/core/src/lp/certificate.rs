use num_traits::{Signed, Zero};

use super::{FeasibilityResult, LinearSystem, LpError, Relation, Status};
use crate::rational::Rational;

/// Re-checks a result against the system by substitution only.
///
/// This deliberately rebuilds the `≤`-normalized rows from the inequality
/// records itself instead of calling into either solver, so a bug on the
/// decision path cannot hide behind a matching bug here.
pub fn verify_certificate(
    system: &LinearSystem,
    result: &FeasibilityResult,
) -> Result<bool, LpError> {
    system.validate()?;
    match result.status {
        Status::Feasible => {
            let witness = result.witness.as_ref().ok_or(LpError::MissingWitness)?;
            Ok(system.contains(witness))
        }
        Status::Infeasible => {
            let farkas = result.farkas.as_ref().ok_or(LpError::MissingFarkas)?;
            Ok(farkas_is_valid(system, farkas))
        }
    }
}

fn farkas_is_valid(system: &LinearSystem, farkas: &[Rational]) -> bool {
    if farkas.len() != system.inequalities.len() + system.nonneg.len() {
        return false;
    }
    if farkas.iter().any(|m| m.is_negative()) {
        return false;
    }
    let mut combined: Vec<Rational> = vec![Rational::zero(); system.variables.len()];
    let mut rhs = Rational::zero();
    for (ineq, m) in system.inequalities.iter().zip(farkas) {
        if m.is_zero() {
            continue;
        }
        let sign = match ineq.relation {
            Relation::Le => Rational::from_integer(1.into()),
            Relation::Ge => Rational::from_integer((-1).into()),
        };
        for (j, name) in system.variables.iter().enumerate() {
            if let Some(c) = ineq.coeffs.get(name) {
                combined[j] += m * &sign * c;
            }
        }
        rhs += m * &sign * &ineq.rhs;
    }
    for (name, m) in system
        .nonneg
        .iter()
        .zip(&farkas[system.inequalities.len()..])
    {
        match system.variables.iter().position(|v| v == name) {
            Some(j) => combined[j] -= m,
            None => return false,
        }
    }
    combined.iter().all(Zero::is_zero) && rhs.is_negative()
}
