//! The block isomorphism `T : C([1,ω]×3) → C([1,ω])` with inverse `S`,
//! its operator norms, and the minimisation of `‖T‖·‖S‖` over `t ∈ [3, 4]`.
//!
//! A function on `[1,ω]×3` is stored as `N` blocks `f(m,·)`, `m = 1..=N`,
//! plus the limit block `f(ω,·)`; it is taken to equal `f(ω,·)` for `m > N`.
//! The image lives on `{1, 2, 3, …, 3N+2, ω}` with `Tf(3m..3m+2)` in block
//! `m` and `(Tf(1), Tf(2), Tf(ω))` in the head.

use std::array;

use rayon::prelude::*;

use crate::rational::{Rational, PQ};
use crate::real::{Real, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UpperError {
    #[error("t = {0} lies outside [3, 4]")]
    OutOfRange(String),
    #[error("denominator {0} vanishes at t = {1}")]
    Singular(&'static str, String),
    #[error("truncation mismatch: {0} blocks vs {1}")]
    LengthMismatch(usize, usize),
    #[error("truncation length must be at least 1")]
    EmptyTruncation,
    #[error("bracket lo = {0} exceeds hi = {1}")]
    InvertedBracket(String, String),
    #[error("scan step must be positive")]
    BadStep,
}

pub type Mat3<S> = [[S; 3]; 3];
pub type Row6<S> = [S; 6];

#[derive(Debug, Clone, PartialEq)]
pub struct IsoMatrices<S> {
    pub t: S,
    pub m: Mat3<S>,
    /// Diagonal of `C`.
    pub c: [S; 3],
    pub m3: [S; 3],
    pub minv: Mat3<S>,
    /// Diagonal of `C⁻¹`.
    pub cinv: [S; 3],
    /// Rows `[C | M′ − C]` acting on `(f(m,·), f(ω,·))`.
    pub tail_block: [Row6<S>; 3],
    /// Rows `[C⁻¹ | −C⁻¹(M′ − C)M⁻¹]` acting on `(g(3m..3m+2), g(1), g(2), g(ω))`.
    pub s_tail_block: [Row6<S>; 3],
}

fn k<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}

fn describe<S: Scalar>(t: &S) -> String {
    t.to_real().to_digits(20)
}

/// The closed-form `M⁻¹`.
pub fn closed_form_minv<S: Scalar>(t: &S) -> Result<Mat3<S>, UpperError> {
    let t2 = t.clone() * t.clone();
    let t3 = t2.clone() * t.clone();
    let t4 = t3.clone() * t.clone();
    let quartic =
        t4 - k::<S>(7) * t3.clone() + k::<S>(12) * t2.clone() - k::<S>(8) * t.clone() + k(8);
    let cubic = t3 - k::<S>(5) * t2.clone() + k::<S>(2) * t.clone() - k(4);
    if quartic.is_zero_value() {
        return Err(UpperError::Singular("t^4-7t^3+12t^2-8t+8", describe(t)));
    }
    if cubic.is_zero_value() {
        return Err(UpperError::Singular("t^3-5t^2+2t-4", describe(t)));
    }
    if t.is_zero_value() {
        return Err(UpperError::Singular("t", describe(t)));
    }
    let q = t2 - k::<S>(5) * t.clone() + k(2);
    let zero = k::<S>(0);
    Ok([
        [
            t.clone() * q / quartic.clone(),
            zero,
            -(k::<S>(4) * t.clone()) / quartic,
        ],
        [
            k::<S>(2) / cubic.clone(),
            k::<S>(1) / t.clone(),
            -(k::<S>(2) * t.clone()) / cubic.clone(),
        ],
        [
            k::<S>(2) / cubic.clone(),
            -(k::<S>(1) / t.clone()),
            -(k::<S>(2) * t.clone()) / cubic,
        ],
    ])
}

pub fn build_matrices<S: Scalar>(t: &S) -> Result<IsoMatrices<S>, UpperError> {
    if *t < k(3) || *t > k(4) {
        return Err(UpperError::OutOfRange(describe(t)));
    }
    let two = k::<S>(2);
    let q = t.clone() * t.clone() - k::<S>(5) * t.clone() + two.clone();
    let m: Mat3<S> = [
        [t.clone() - two.clone(), k(-1), k(-1)],
        [k(0), t.clone() / two.clone(), -(t.clone() / two.clone())],
        [
            (t.clone() - two.clone()) / t.clone(),
            -(q.clone() / k(4)),
            -(q / k(4)),
        ],
    ];
    let c_side = (t.clone() * t.clone() - t.clone() + two.clone()) / (two.clone() * t.clone());
    let c = [
        two.clone() * t.clone() / (t.clone() + k(1)),
        c_side.clone(),
        c_side,
    ];
    if c.iter().any(Scalar::is_zero_value) {
        return Err(UpperError::Singular("C", describe(t)));
    }
    let cinv: [S; 3] = array::from_fn(|i| k::<S>(1) / c[i].clone());
    let m3 = m[2].clone();
    let minv = closed_form_minv(t)?;

    // (M′ − C)
    let mp_c: Mat3<S> = array::from_fn(|i| {
        array::from_fn(|j| {
            if i == j {
                m3[j].clone() - c[i].clone()
            } else {
                m3[j].clone()
            }
        })
    });
    let tail_block: [Row6<S>; 3] = array::from_fn(|i| {
        array::from_fn(|j| {
            if j < 3 {
                if i == j {
                    c[i].clone()
                } else {
                    k(0)
                }
            } else {
                mp_c[i][j - 3].clone()
            }
        })
    });
    // −C⁻¹(M′ − C)M⁻¹
    let coupling: Mat3<S> = array::from_fn(|i| {
        array::from_fn(|j| {
            let s = (0..3).fold(k::<S>(0), |acc, l| {
                acc + mp_c[i][l].clone() * minv[l][j].clone()
            });
            -(cinv[i].clone() * s)
        })
    });
    let s_tail_block: [Row6<S>; 3] = array::from_fn(|i| {
        array::from_fn(|j| {
            if j < 3 {
                if i == j {
                    cinv[i].clone()
                } else {
                    k(0)
                }
            } else {
                coupling[i][j - 3].clone()
            }
        })
    });
    Ok(IsoMatrices {
        t: t.clone(),
        m,
        c,
        m3,
        minv,
        cinv,
        tail_block,
        s_tail_block,
    })
}

fn mat_vec<S: Scalar>(a: &Mat3<S>, x: &[S; 3]) -> [S; 3] {
    array::from_fn(|i| (0..3).fold(k::<S>(0), |acc, j| acc + a[i][j].clone() * x[j].clone()))
}

fn row6<S: Scalar>(row: &Row6<S>, first: &[S; 3], second: &[S; 3]) -> S {
    (0..3).fold(k::<S>(0), |acc, j| {
        acc + row[j].clone() * first[j].clone() + row[j + 3].clone() * second[j].clone()
    })
}

/// Element of `C([1,ω]×3)`, eventually constant.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFunction<S> {
    /// `values[i] = f(i+1, ·)`.
    pub values: Vec<[S; 3]>,
    /// `f(ω, ·)`.
    pub limit: [S; 3],
}

/// Element of `C([1,ω])`, eventually constant.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFunction<S> {
    /// `(g(1), g(2), g(ω))`.
    pub head: [S; 3],
    /// `blocks[i] = (g(3m), g(3m+1), g(3m+2))` with `m = i+1`.
    pub blocks: Vec<[S; 3]>,
}

fn sup<'a, S: Scalar + 'a>(values: impl Iterator<Item = &'a S>) -> S {
    values.fold(k::<S>(0), |acc, v| acc.max_of(v.abs_value()))
}

impl<S: Scalar> TruncatedFunction<S> {
    pub fn new(values: Vec<[S; 3]>, limit: [S; 3]) -> Result<Self, UpperError> {
        if values.is_empty() {
            return Err(UpperError::EmptyTruncation);
        }
        Ok(Self { values, limit })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            values: vec![array::from_fn(|_| k(0)); n],
            limit: array::from_fn(|_| k(0)),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn sup_norm(&self) -> S {
        sup(self.values.iter().flatten().chain(self.limit.iter()))
    }
}

impl<S: Scalar> SequenceFunction<S> {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn sup_norm(&self) -> S {
        sup(self.blocks.iter().flatten().chain(self.head.iter()))
    }

    /// Values in the order `g(1), g(2), g(3), …, g(3N+2), g(ω)`.
    pub fn ordered_values(&self) -> Vec<S> {
        let mut out = vec![self.head[0].clone(), self.head[1].clone()];
        out.extend(self.blocks.iter().flatten().cloned());
        out.push(self.head[2].clone());
        out
    }
}

pub fn apply_t<S: Scalar>(f: &TruncatedFunction<S>, mats: &IsoMatrices<S>) -> SequenceFunction<S> {
    SequenceFunction {
        head: mat_vec(&mats.m, &f.limit),
        blocks: f
            .values
            .iter()
            .map(|block| array::from_fn(|i| row6(&mats.tail_block[i], block, &f.limit)))
            .collect(),
    }
}

pub fn apply_s<S: Scalar>(g: &SequenceFunction<S>, mats: &IsoMatrices<S>) -> TruncatedFunction<S> {
    TruncatedFunction {
        values: g
            .blocks
            .iter()
            .map(|block| array::from_fn(|i| row6(&mats.s_tail_block[i], block, &g.head)))
            .collect(),
        limit: mat_vec(&mats.minv, &g.head),
    }
}

/// `apply_t` with an explicit truncation check against an expected `N`.
pub fn apply_t_checked<S: Scalar>(
    f: &TruncatedFunction<S>,
    mats: &IsoMatrices<S>,
    n: usize,
) -> Result<SequenceFunction<S>, UpperError> {
    if f.n() != n {
        return Err(UpperError::LengthMismatch(f.n(), n));
    }
    Ok(apply_t(f, mats))
}

pub fn apply_s_checked<S: Scalar>(
    g: &SequenceFunction<S>,
    mats: &IsoMatrices<S>,
    n: usize,
) -> Result<TruncatedFunction<S>, UpperError> {
    if g.n() != n {
        return Err(UpperError::LengthMismatch(g.n(), n));
    }
    Ok(apply_s(g, mats))
}

/// Maximum row ℓ1 norm with the identifier of the maximising row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowNorm<S> {
    pub value: S,
    pub row: &'static str,
}

const T_ROWS: [&str; 6] = ["Tf(1)", "Tf(2)", "Tf(w)", "Tf(3m)", "Tf(3m+1)", "Tf(3m+2)"];
const S_ROWS: [&str; 6] = [
    "Sg(w,0)", "Sg(w,1)", "Sg(w,2)", "Sg(m,0)", "Sg(m,1)", "Sg(m,2)",
];

fn max_row<S: Scalar>(rows: Vec<Vec<S>>, names: [&'static str; 6]) -> RowNorm<S> {
    let mut best: Option<RowNorm<S>> = None;
    for (row, name) in rows.into_iter().zip(names) {
        let l1 = row.iter().fold(k::<S>(0), |acc, v| acc + v.abs_value());
        if best.as_ref().is_none_or(|b| l1 > b.value) {
            best = Some(RowNorm {
                value: l1,
                row: name,
            });
        }
    }
    best.expect("six rows")
}

impl<S: Scalar> IsoMatrices<S> {
    /// Coefficient rows of `T` over its at most six inputs.
    pub fn t_rows(&self) -> Vec<Vec<S>> {
        self.m
            .iter()
            .map(|r| r.to_vec())
            .chain(self.tail_block.iter().map(|r| r.to_vec()))
            .collect()
    }

    pub fn s_rows(&self) -> Vec<Vec<S>> {
        self.minv
            .iter()
            .map(|r| r.to_vec())
            .chain(self.s_tail_block.iter().map(|r| r.to_vec()))
            .collect()
    }

    pub fn norm_t(&self) -> RowNorm<S> {
        max_row(self.t_rows(), T_ROWS)
    }

    pub fn norm_s(&self) -> RowNorm<S> {
        max_row(self.s_rows(), S_ROWS)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub t: Real,
    pub norm_t: Real,
    pub norm_s: Real,
    pub distortion: Real,
    pub argmax_t: &'static str,
    pub argmax_s: &'static str,
}

pub fn norm_report<S: Scalar>(t: &S) -> Result<NormReport, UpperError> {
    let mats = build_matrices(t)?;
    let nt = mats.norm_t();
    let ns = mats.norm_s();
    let distortion = nt.value.clone() * ns.value.clone();
    Ok(NormReport {
        t: t.to_real(),
        norm_t: nt.value.to_real(),
        norm_s: ns.value.to_real(),
        distortion: distortion.to_real(),
        argmax_t: nt.row,
        argmax_s: ns.row,
    })
}

pub fn operator_norm_t<S: Scalar>(t: &S) -> Result<S, UpperError> {
    Ok(build_matrices(t)?.norm_t().value)
}

pub fn operator_norm_s<S: Scalar>(t: &S) -> Result<S, UpperError> {
    Ok(build_matrices(t)?.norm_s().value)
}

/// Exact scan row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub t: Rational,
    pub norm_t: Rational,
    pub norm_s: Rational,
    pub distortion: Rational,
}

/// Exact norms on `lo, lo+step, …` up to and including `hi` when hit.
pub fn scan_distortion(
    lo: &Rational,
    hi: &Rational,
    step: &Rational,
) -> Result<Vec<ScanRow>, UpperError> {
    if *step <= crate::rational::int(0) {
        return Err(UpperError::BadStep);
    }
    if lo > hi {
        return Err(UpperError::InvertedBracket(
            PQ(lo).to_string(),
            PQ(hi).to_string(),
        ));
    }
    let mut grid = Vec::new();
    let mut t = lo.clone();
    while t <= *hi {
        grid.push(t.clone());
        t += step;
    }
    grid.into_par_iter()
        .map(|t| {
            let mats = build_matrices(&t)?;
            let norm_t = mats.norm_t().value;
            let norm_s = mats.norm_s().value;
            Ok(ScanRow {
                distortion: &norm_t * &norm_s,
                t,
                norm_t,
                norm_s,
            })
        })
        .collect()
}

fn distortion_at(t: &Real) -> Result<Real, UpperError> {
    let mats = build_matrices(t)?;
    Ok(mats.norm_t().value * mats.norm_s().value)
}

/// Default tolerance on `t` for [`optimize_distortion`].
pub fn default_tolerance() -> Real {
    "1e-30".parse().expect("literal")
}

/// Minimises `‖T‖·‖S‖` on `[lo, hi]`: a 200-cell grid locates the basin,
/// golden-section search narrows it to width `tol`.
pub fn optimize_distortion(
    lo: &Real,
    hi: &Real,
    tol: &Real,
) -> Result<(Real, NormReport), UpperError> {
    if lo > hi {
        return Err(UpperError::InvertedBracket(
            lo.to_digits(20),
            hi.to_digits(20),
        ));
    }
    if lo == hi {
        return Ok((lo.clone(), norm_report(lo)?));
    }
    const CELLS: i64 = 200;
    let width = (hi - lo) / Real::from_i64(CELLS);
    let grid: Vec<Real> = (0..=CELLS)
        .map(|i| lo + &(&width * &Real::from_i64(i)))
        .collect();
    let values = grid
        .par_iter()
        .map(distortion_at)
        .collect::<Result<Vec<_>, _>>()?;
    let best = (0..grid.len())
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"))
        .expect("non-empty grid");
    let mut a = grid[best.saturating_sub(1)].clone();
    let mut b = grid[(best + 1).min(grid.len() - 1)].clone();

    let inv_phi = (Real::from_i64(5).sqrt().expect("positive") - Real::one()) / Real::from_i64(2);
    let mut x1 = &b - &(&inv_phi * &(&b - &a));
    let mut x2 = &a + &(&inv_phi * &(&b - &a));
    let mut f1 = distortion_at(&x1)?;
    let mut f2 = distortion_at(&x2)?;
    while &b - &a > *tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = &b - &(&inv_phi * &(&b - &a));
            f1 = distortion_at(&x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = &a + &(&inv_phi * &(&b - &a));
            f2 = distortion_at(&x2)?;
        }
    }
    let t_star = (a + b) / Real::from_i64(2);
    let report = norm_report(&t_star)?;
    Ok((t_star, report))
}

/// The closed form `(4 + ∛(73 − 6√87) + ∛(73 ± 6√87))/3` as printed (both
/// radicands `73 − 6√87`) and with the second sign flipped.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicReport {
    pub printed: Real,
    pub corrected: Real,
    pub optimizer: Real,
    pub printed_matches: bool,
    pub corrected_matches: bool,
}

pub fn cubic_formula_value() -> Result<CubicReport, UpperError> {
    let six_root = Real::from_i64(6) * Real::from_i64(87).sqrt().expect("positive");
    let minus = (Real::from_i64(73) - six_root.clone()).cbrt();
    let plus = (Real::from_i64(73) + six_root).cbrt();
    let three = Real::from_i64(3);
    let printed = (Real::from_i64(4) + minus.clone() + minus.clone()) / three.clone();
    let corrected = (Real::from_i64(4) + minus + plus) / three;
    let (optimizer, _) =
        optimize_distortion(&Real::from_i64(3), &Real::from_i64(4), &default_tolerance())?;
    let window: Real = "1e-4".parse().expect("literal");
    Ok(CubicReport {
        printed_matches: (&printed - &optimizer).abs() <= window,
        corrected_matches: (&corrected - &optimizer).abs() <= window,
        printed,
        corrected,
        optimizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::rational::{frac, int};

    fn to_matrix(a: &Mat3<Rational>) -> linalg::Matrix {
        a.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn matrices_at_three() {
        let mats = build_matrices(&int(3)).unwrap();
        let expected = [
            [int(1), int(-1), int(-1)],
            [int(0), frac(3, 2), frac(-3, 2)],
            [frac(1, 3), int(1), int(1)],
        ];
        assert_eq!(mats.m, expected);
        assert_eq!(mats.c, [frac(3, 2), frac(4, 3), frac(4, 3)]);
    }

    #[test]
    fn closed_form_inverse_matches_gauss_jordan() {
        for t in [frac(7, 2), int(3), int(4), frac(113, 32)] {
            let mats = build_matrices(&t).unwrap();
            let m = to_matrix(&mats.m);
            assert_eq!(linalg::inverse(&m).unwrap(), to_matrix(&mats.minv));
            assert_eq!(
                linalg::mat_mul(&m, &to_matrix(&mats.minv)),
                linalg::identity(3)
            );
        }
    }

    #[test]
    fn constant_one_at_three() {
        let mats = build_matrices(&int(3)).unwrap();
        let f = TruncatedFunction::new(vec![[int(1), int(1), int(1)]; 4], [int(1), int(1), int(1)])
            .unwrap();
        let g = apply_t(&f, &mats);
        assert_eq!(g.head[0], int(-1));
        assert_eq!(g.head[1], int(0));
        assert_eq!(
            apply_t(&TruncatedFunction::zero(3), &mats).sup_norm(),
            int(0)
        );
    }

    #[test]
    fn norms_at_three() {
        let mats = build_matrices(&int(3)).unwrap();
        let nt = mats.norm_t();
        assert_eq!(nt.value, frac(14, 3));
        assert_eq!(nt.row, "Tf(3m)");
    }

    #[test]
    fn guards() {
        assert!(matches!(
            build_matrices(&frac(5, 2)),
            Err(UpperError::OutOfRange(_))
        ));
        let f = TruncatedFunction::<Rational>::zero(2);
        let mats = build_matrices(&int(3)).unwrap();
        assert_eq!(
            apply_t_checked(&f, &mats, 3),
            Err(UpperError::LengthMismatch(2, 3))
        );
        assert!(TruncatedFunction::<Rational>::new(vec![], [int(0), int(0), int(0)]).is_err());
    }

    #[test]
    fn degenerate_bracket() {
        let t = Real::from_rational(&frac(7, 2));
        let (ts, report) = optimize_distortion(&t, &t, &default_tolerance()).unwrap();
        assert_eq!(ts, t);
        assert_eq!(report, norm_report(&t).unwrap());
    }
}
