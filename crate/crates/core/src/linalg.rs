//! Small dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(Rational::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Gauss–Jordan reduction of `[a | rhs]`; returns `None` when `a` is singular.
fn reduce(mut a: Matrix, mut rhs: Matrix) -> Option<Matrix> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &p;
        }
        for v in rhs[col].iter_mut() {
            *v /= &p;
        }
        let (prow, prhs) = (a[col].clone(), rhs[col].clone());
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for (v, pv) in a[r].iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
            for (v, pv) in rhs[r].iter_mut().zip(&prhs) {
                *v -= &f * pv;
            }
        }
    }
    Some(rhs)
}

/// Unique solution of the square system `a·x = b`, if `a` is invertible.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rhs = b.iter().map(|v| vec![v.clone()]).collect();
    reduce(a.to_vec(), rhs).map(|x| x.into_iter().map(|mut r| r.remove(0)).collect())
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    reduce(a.clone(), identity(a.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn inverse_of_two_by_two() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
        assert_eq!(mat_mul(&a, &inv), identity(2));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(inverse(&a).is_none());
        assert!(solve(&a, &[int(1), int(1)]).is_none());
    }

    #[test]
    fn solve_needs_row_swap() {
        let a = vec![vec![int(0), int(3)], vec![int(2), int(0)]];
        assert_eq!(
            solve(&a, &[int(1), int(1)]),
            Some(vec![frac(1, 2), frac(1, 3)])
        );
    }
}
