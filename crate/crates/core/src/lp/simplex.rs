//! Exact phase-1 simplex with Bland's anti-cycling rule.
//!
//! Used as the independent cross-check for Fourier–Motzkin. The tableau is
//! built over `x` (free variables split as `x⁺ - x⁻`), one slack per
//! inequality and one artificial per row; phase 1 minimizes the sum of the
//! artificials. At an optimum with positive value the reduced costs of the
//! slack columns are Farkas multipliers for the inequalities and those of
//! the nonnegative structural columns are the multipliers for the bounds.

use num_traits::{One, Signed, Zero};

use super::{FeasibilityResult, LinearSystem, LpError};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy)]
enum Column {
    /// Structural column for variable `j` with sign `+1` or `-1`.
    Var(usize, bool),
    Slack(usize),
    Artificial,
}

pub fn phase_one(system: &LinearSystem) -> Result<FeasibilityResult, LpError> {
    system.validate()?;
    let all = system.normalized_rows()?;
    let m = system.inequalities.len();
    let rows = &all[..m];
    let n = system.variables.len();
    let nonneg: Vec<bool> = system
        .variables
        .iter()
        .map(|v| system.nonneg.contains(v))
        .collect();

    let mut columns = Vec::new();
    for (j, &nn) in nonneg.iter().enumerate() {
        columns.push(Column::Var(j, true));
        if !nn {
            columns.push(Column::Var(j, false));
        }
    }
    for i in 0..m {
        columns.push(Column::Slack(i));
    }
    let first_artificial = columns.len();
    columns.extend((0..m).map(|_| Column::Artificial));
    let width = columns.len();

    // tableau[i] = [entries..., rhs]
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let flip = row.rhs.is_negative();
        let sign = |v: Rational| if flip { -v } else { v };
        let mut line = vec![Rational::zero(); width + 1];
        for (c, col) in columns.iter().enumerate() {
            line[c] = match *col {
                Column::Var(j, true) => sign(row.coeffs[j].clone()),
                Column::Var(j, false) => sign(-row.coeffs[j].clone()),
                Column::Slack(s) if s == i => sign(Rational::one()),
                Column::Slack(_) => Rational::zero(),
                Column::Artificial => Rational::zero(),
            };
        }
        line[first_artificial + i] = Rational::one();
        line[width] = sign(row.rhs.clone());
        tableau.push(line);
    }
    let mut basis: Vec<usize> = (0..m).map(|i| first_artificial + i).collect();

    // reduced costs d_j = c_j - Σ_i row_i[j]; last entry holds -w
    let mut cost = vec![Rational::zero(); width + 1];
    for c in first_artificial..width {
        cost[c] = Rational::one();
    }
    for line in &tableau {
        for (c, v) in line.iter().enumerate() {
            cost[c] -= v;
        }
    }

    loop {
        let Some(enter) = (0..width).find(|&c| cost[c].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, line) in tableau.iter().enumerate() {
            if !line[enter].is_positive() {
                continue;
            }
            let ratio = &line[width] / &line[enter];
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (pivot_row, _) = leave.expect("phase 1 objective is bounded below");
        pivot(&mut tableau, &mut cost, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let objective = -cost[width].clone();
    if objective.is_positive() {
        let mut farkas = vec![Rational::zero(); system.normalized_len()];
        for (c, col) in columns.iter().enumerate() {
            match *col {
                Column::Slack(i) => farkas[i] = cost[c].clone(),
                Column::Var(j, true) if nonneg[j] => {
                    let k = system
                        .nonneg
                        .iter()
                        .position(|v| *v == system.variables[j])
                        .expect("nonneg variable");
                    farkas[m + k] = cost[c].clone();
                }
                _ => {}
            }
        }
        return Ok(FeasibilityResult::infeasible(farkas));
    }

    let mut values = vec![Rational::zero(); width];
    for (i, &b) in basis.iter().enumerate() {
        values[b] = tableau[i][width].clone();
    }
    let mut point = vec![Rational::zero(); n];
    for (c, col) in columns.iter().enumerate() {
        if let Column::Var(j, positive) = *col {
            if positive {
                point[j] += &values[c];
            } else {
                point[j] -= &values[c];
            }
        }
    }
    Ok(FeasibilityResult::feasible(point))
}

fn pivot(tableau: &mut [Vec<Rational>], cost: &mut [Rational], row: usize, col: usize) {
    let p = tableau[row][col].clone();
    for v in tableau[row].iter_mut() {
        *v /= &p;
    }
    let pivot_line = tableau[row].clone();
    for (i, line) in tableau.iter_mut().enumerate() {
        if i == row || line[col].is_zero() {
            continue;
        }
        let factor = line[col].clone();
        for (v, pv) in line.iter_mut().zip(&pivot_line) {
            *v -= &factor * pv;
        }
    }
    if !cost[col].is_zero() {
        let factor = cost[col].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_line) {
            *v -= &factor * pv;
        }
    }
}
