use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::{DenseRow, FeasibilityResult, LinearSystem, LpError};
use crate::rational::Rational;

/// A derived row together with the nonnegative combination of original
/// normalized rows that produced it.
#[derive(Debug, Clone)]
struct TracedRow {
    coeffs: Vec<Rational>,
    rhs: Rational,
    combo: Vec<Rational>,
}

impl TracedRow {
    fn support(&self) -> usize {
        self.combo.iter().filter(|m| !m.is_zero()).count()
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Positive rescaling so the first nonzero coefficient has magnitude 1.
    fn normalize(&mut self) {
        let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) else {
            return;
        };
        for c in self.coeffs.iter_mut() {
            *c /= &lead;
        }
        self.rhs /= &lead;
        for m in self.combo.iter_mut() {
            *m /= &lead;
        }
    }
}

enum Stage {
    Rows(Vec<TracedRow>),
    Contradiction(Vec<Rational>),
}

/// Decides feasibility by Fourier–Motzkin elimination.
///
/// Variables are eliminated in declaration order. Each round drops
/// duplicate directions (keeping the tightest rhs) and applies Chernikov's
/// rule: after `k` eliminations a derived row built from more than `k + 1`
/// original rows is redundant. A derived `0 ≤ b` with `b < 0` yields the
/// Farkas multipliers directly from its trace; otherwise a witness is
/// obtained by back-substitution through the stored projections.
pub fn check_feasibility(system: &LinearSystem) -> Result<FeasibilityResult, LpError> {
    let rows = system.normalized_rows()?;
    let n = system.variables.len();
    let total = rows.len();
    let mut current: Vec<TracedRow> = rows
        .into_iter()
        .enumerate()
        .map(|(i, DenseRow { coeffs, rhs })| {
            let mut combo = vec![Rational::zero(); total];
            combo[i] = Rational::from_integer(1.into());
            TracedRow { coeffs, rhs, combo }
        })
        .collect();

    // projections[k] lives in variables k..n (earlier ones eliminated)
    let mut projections: Vec<Vec<TracedRow>> = Vec::with_capacity(n);
    for k in 0..n {
        current = match prune(current, k) {
            Stage::Rows(rows) => rows,
            Stage::Contradiction(farkas) => return Ok(FeasibilityResult::infeasible(farkas)),
        };
        projections.push(current.clone());
        current = eliminate(&current, k);
    }
    if let Stage::Contradiction(farkas) = prune(current, n) {
        return Ok(FeasibilityResult::infeasible(farkas));
    }

    let mut point = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        point[k] = choose_value(&projections[k], k, &point);
    }
    Ok(FeasibilityResult::feasible(point))
}

fn prune(rows: Vec<TracedRow>, eliminated: usize) -> Stage {
    let mut kept: Vec<TracedRow> = Vec::with_capacity(rows.len());
    let mut by_direction: HashMap<Vec<Rational>, usize> = HashMap::new();
    for mut row in rows {
        if row.is_trivial() {
            if row.rhs.is_negative() {
                return Stage::Contradiction(row.combo);
            }
            continue;
        }
        if eliminated > 0 && row.support() > eliminated + 1 {
            continue;
        }
        row.normalize();
        match by_direction.get(&row.coeffs) {
            Some(&at) => {
                let existing = &kept[at];
                if row.rhs < existing.rhs
                    || (row.rhs == existing.rhs && row.support() < existing.support())
                {
                    kept[at] = row;
                }
            }
            None => {
                by_direction.insert(row.coeffs.clone(), kept.len());
                kept.push(row);
            }
        }
    }
    Stage::Rows(kept)
}

fn eliminate(rows: &[TracedRow], k: usize) -> Vec<TracedRow> {
    let mut out = Vec::new();
    let (mut upper, mut lower) = (Vec::new(), Vec::new());
    for row in rows {
        let c = &row.coeffs[k];
        if c.is_positive() {
            upper.push(row);
        } else if c.is_negative() {
            lower.push(row);
        } else {
            out.push(row.clone());
        }
    }
    for p in &upper {
        for q in &lower {
            let wp = p.coeffs[k].recip();
            let wq = -q.coeffs[k].recip();
            let coeffs = p
                .coeffs
                .iter()
                .zip(&q.coeffs)
                .map(|(a, b)| a * &wp + b * &wq)
                .collect();
            let rhs = &p.rhs * &wp + &q.rhs * &wq;
            let combo = p
                .combo
                .iter()
                .zip(&q.combo)
                .map(|(a, b)| a * &wp + b * &wq)
                .collect();
            out.push(TracedRow { coeffs, rhs, combo });
        }
    }
    out
}

/// Picks a value for variable `k` inside the interval its projection allows,
/// given the later coordinates already fixed: 0 clamped into the interval.
fn choose_value(rows: &[TracedRow], k: usize, point: &[Rational]) -> Rational {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for row in rows {
        let a = &row.coeffs[k];
        if a.is_zero() {
            continue;
        }
        let rest = row.coeffs[k + 1..]
            .iter()
            .zip(&point[k + 1..])
            .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
        let bound = (&row.rhs - rest) / a;
        if a.is_positive() {
            if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        } else if lo.as_ref().is_none_or(|l| bound > *l) {
            lo = Some(bound);
        }
    }
    let mut value = Rational::zero();
    if let Some(l) = lo {
        if value < l {
            value = l;
        }
    }
    if let Some(h) = hi {
        if value > h {
            value = h;
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::test_support::system;
    use crate::lp::{verify_certificate, Relation, Status};
    use crate::rational::int;

    #[test]
    fn contradictory_pair_gives_unit_multipliers() {
        let s = system(
            &["x"],
            &[],
            &[(&[1], Relation::Ge, 0), (&[1], Relation::Le, -1)],
        );
        let r = check_feasibility(&s).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert_eq!(r.farkas, Some(vec![int(1), int(1)]));
        assert!(verify_certificate(&s, &r).unwrap());
    }

    #[test]
    fn unit_interval_witness_is_zero() {
        let s = system(
            &["x"],
            &[],
            &[(&[1], Relation::Ge, 0), (&[1], Relation::Le, 1)],
        );
        let r = check_feasibility(&s).unwrap();
        assert_eq!(r.witness, Some(vec![int(0)]));
    }

    #[test]
    fn witness_respects_positive_lower_bound() {
        let s = system(
            &["x", "y"],
            &["x", "y"],
            &[(&[1, 1], Relation::Ge, 3), (&[1, -1], Relation::Le, 0)],
        );
        let r = check_feasibility(&s).unwrap();
        assert!(r.is_feasible());
        assert!(verify_certificate(&s, &r).unwrap());
    }

    #[test]
    fn empty_system_is_feasible_at_origin() {
        let s = system(&["x", "y"], &[], &[]);
        let r = check_feasibility(&s).unwrap();
        assert_eq!(r.witness, Some(vec![int(0), int(0)]));
    }

    #[test]
    fn constant_contradiction_without_variables() {
        let s = system(&["x"], &[], &[(&[0], Relation::Ge, 1)]);
        let r = check_feasibility(&s).unwrap();
        assert_eq!(r.farkas, Some(vec![int(1)]));
    }

    #[test]
    fn three_variable_infeasible_chain() {
        // x <= y, y <= z, z <= x - 1
        let s = system(
            &["x", "y", "z"],
            &[],
            &[
                (&[1, -1, 0], Relation::Le, 0),
                (&[0, 1, -1], Relation::Le, 0),
                (&[-1, 0, 1], Relation::Le, -1),
            ],
        );
        let r = check_feasibility(&s).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert!(verify_certificate(&s, &r).unwrap());
    }
}
