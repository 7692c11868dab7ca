use itertools::Itertools;

use super::{LinearSystem, LpError};
use crate::linalg;
use crate::rational::Rational;

/// All basic feasible points of the system, deduplicated and sorted
/// lexicographically.
///
/// Every choice of `n` normalized rows with an invertible coefficient matrix
/// is solved as equalities and kept when the solution satisfies the whole
/// system. Only meaningful for pointed polyhedra; for those the list is
/// empty exactly when the system is infeasible.
pub fn enumerate_vertices(system: &LinearSystem) -> Result<Vec<Vec<Rational>>, LpError> {
    let rows = system.normalized_rows()?;
    let n = system.variables.len();
    let mut points: Vec<Vec<Rational>> = Vec::new();
    if n == 0 {
        return Ok(points);
    }
    for subset in (0..rows.len()).combinations(n) {
        let a: Vec<Vec<Rational>> = subset.iter().map(|&i| rows[i].coeffs.clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&i| rows[i].rhs.clone()).collect();
        let Some(x) = linalg::solve(&a, &b) else {
            continue;
        };
        let feasible = rows.iter().all(|row| {
            let lhs = row
                .coeffs
                .iter()
                .zip(&x)
                .fold(Rational::from_integer(0.into()), |acc, (c, v)| acc + c * v);
            lhs <= row.rhs
        });
        if feasible {
            points.push(x);
        }
    }
    points.sort();
    points.dedup();
    Ok(points)
}
