//! Matrix-valued coefficients and vector-valued solutions: the same level
//! sweep with a dense `d x d` linear solve per level.
//!
//! The scalar pivot becomes `I + q^(-alpha) q^(alpha n) a(q^n)`; the spectral
//! condition becomes "the spectrum of `a` avoids `{-q^(alpha m)}`", checked
//! through the minimum singular value of each level pivot. `I^alpha` acts
//! componentwise, so `u = u0 + I^alpha v` reuses the scalar operator.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::Float;

use crate::cauchy::{SpectralReport, PIVOT_SINGULAR_TOL, PIVOT_WARN_TOL};
use crate::cauchy::InnerKernel;
use crate::error::{Error, Result};
use crate::local_field::FieldParams;
use crate::radial::{
    BlockTailModel, Level, LevelGrid, MatrixRadialFunction, RadialFunction, VectorRadialFunction,
};
use crate::riesz::{apply_d, apply_i, AlphaOrder};
use crate::scalar::{Scalar, C};

/// Cauchy problem with a matrix coefficient and vector data.
#[derive(Debug, Clone)]
pub struct MatrixCauchyProblem<T: Scalar> {
    pub fp: FieldParams,
    pub order: AlphaOrder<T>,
    pub a: MatrixRadialFunction<T>,
    pub f: VectorRadialFunction<T>,
    pub u0: Vec<C<T>>,
}

impl<T: Scalar> MatrixCauchyProblem<T> {
    pub fn new(
        fp: FieldParams,
        order: AlphaOrder<T>,
        a: MatrixRadialFunction<T>,
        f: VectorRadialFunction<T>,
        u0: Vec<C<T>>,
    ) -> Result<Self> {
        if a.grid() != f.grid() {
            return Err(Error::GridMismatch {
                context: "matrix coefficient and right-hand side must share one grid".into(),
            });
        }
        let d = a.dim();
        if f.dim() != d || u0.len() != d {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "dimensions disagree: a is {d}x{d}, f has {}, u0 has {}",
                    f.dim(),
                    u0.len()
                ),
            });
        }
        Ok(Self { fp, order, a, f, u0 })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn grid(&self) -> LevelGrid {
        self.a.grid()
    }

    /// Wrap a scalar problem as a dimension-1 matrix problem.
    pub fn from_scalar(problem: &crate::cauchy::CauchyProblem<T>) -> Self {
        let a = MatrixRadialFunction::from_scalar(&problem.a);
        let f = VectorRadialFunction::from_components(std::slice::from_ref(&problem.f))
            .expect("single component assembles");
        Self {
            fp: problem.fp,
            order: problem.order,
            a,
            f,
            u0: vec![problem.u0],
        }
    }
}

/// Solver output for the vector-valued problem.
#[derive(Debug, Clone)]
pub struct MatrixSolveReport<T: Scalar> {
    pub v: VectorRadialFunction<T>,
    pub u: VectorRadialFunction<T>,
    /// Smallest pivot singular value over the scanned levels.
    pub min_pivot: T,
    /// Maximum componentwise residual magnitude over trusted interior levels.
    pub residual_max: T,
    pub warnings: Vec<String>,
}

fn matrix_at<T: Scalar + RealField>(vals: &[C<T>], d: usize) -> DMatrix<C<T>> {
    DMatrix::from_row_slice(d, d, vals)
}

fn is_zero_matrix<T: Scalar>(vals: &[C<T>]) -> bool {
    vals.iter().all(|z| z.re == T::zero() && z.im == T::zero())
}

fn pivot_matrix<T: Scalar + RealField>(
    fp: FieldParams,
    alpha: T,
    n: Level,
    a_vals: &[C<T>],
    d: usize,
) -> DMatrix<C<T>> {
    let eye = DMatrix::<C<T>>::identity(d, d);
    if is_zero_matrix(a_vals) {
        return eye;
    }
    let scale = fp.q_pow(alpha * (T::from_level(n) - T::one()));
    eye + matrix_at(a_vals, d) * Complex::new(scale, T::zero())
}

fn min_singular<T: Scalar + RealField>(m: &DMatrix<C<T>>) -> T {
    m.clone()
        .singular_values()
        .iter()
        .fold(T::infinity(), |acc, s| if *s < acc { *s } else { acc })
}

/// Spectral condition for the matrix problem: minimum singular value of the
/// level pivots over the grid, the near-edge levels, and the resonance
/// windows of the head and tail constants.
pub fn check_spectral_condition_matrix<T: Scalar + RealField>(
    problem: &MatrixCauchyProblem<T>,
) -> SpectralReport<T> {
    let fp = problem.fp;
    let alpha = problem.order.alpha();
    let grid = problem.grid();
    let d = problem.dim();

    let mut candidates: Vec<Level> = grid.iter().collect();
    for k in 1..=4 {
        candidates.push(grid.n_min() - k);
        candidates.push(grid.n_max() + k);
    }
    let qf = fp.qt::<f64>();
    let af = alpha.to_f64().unwrap_or(1.0);
    let mut push_window = |vals: &[C<T>], below: bool| {
        if is_zero_matrix(vals) {
            return;
        }
        let m = matrix_at(vals, d);
        let sv = m.singular_values();
        let smax = sv.iter().fold(0.0f64, |acc, s| acc.max(s.to_f64().unwrap_or(0.0)));
        let smin_raw = sv
            .iter()
            .fold(f64::INFINITY, |acc, s| acc.min(s.to_f64().unwrap_or(0.0)));
        if smax == 0.0 || !smax.is_finite() {
            return;
        }
        let smin = smin_raw.max(smax * 1e-12);
        let lnq = qf.ln();
        let lo = 1.0 - (smax.ln() + 4.0f64.ln()) / (af * lnq) - 1.0;
        let hi = 1.0 - (smin.ln() - 4.0f64.ln()) / (af * lnq) + 1.0;
        let lo = lo.clamp(-20_000.0, 20_000.0) as Level;
        let hi = hi.clamp(-20_000.0, 20_000.0).min(lo as f64 + 400.0) as Level;
        for k in lo..=hi {
            let inside = k >= grid.n_min() && k <= grid.n_max();
            if !inside && ((below && k < grid.n_min()) || (!below && k > grid.n_max())) {
                candidates.push(k);
            }
        }
    };
    push_window(problem.a.value_at_zero(), true);
    match problem.a.tail() {
        BlockTailModel::Zero => {}
        BlockTailModel::Constant(c) => push_window(c, false),
    }
    candidates.sort_unstable();
    candidates.dedup();

    let singular = T::cst(PIVOT_SINGULAR_TOL);
    let mut min_pivot = T::infinity();
    let mut min_level = grid.n_min();
    let mut offending = Vec::new();
    for &n in &candidates {
        let pivot = pivot_matrix(fp, alpha, n, &problem.a.eval_at_level(n), d);
        let sigma = min_singular(&pivot);
        if sigma < min_pivot {
            min_pivot = sigma;
            min_level = n;
        }
        if sigma < singular {
            offending.push(n);
        }
    }

    SpectralReport {
        ok: offending.is_empty(),
        min_pivot,
        min_level,
        offending_levels: offending,
    }
}

/// Level sweep with dense `d x d` solves; `u = u0 + I^alpha v` componentwise.
pub fn solve_matrix<T: Scalar + RealField>(
    problem: &MatrixCauchyProblem<T>,
) -> Result<MatrixSolveReport<T>> {
    let spectral = check_spectral_condition_matrix(problem);
    if !spectral.ok {
        return Err(Error::SingularPivot {
            level: spectral.min_level,
            magnitude: spectral.min_pivot.to_f64().unwrap_or(0.0),
        });
    }
    let mut warnings = Vec::new();
    if spectral.min_pivot < T::cst(PIVOT_WARN_TOL) {
        warnings.push(format!(
            "ill-conditioned pivot at level {}: sigma_min = {:e}",
            spectral.min_level,
            spectral.min_pivot.to_f64().unwrap_or(0.0)
        ));
    }

    let fp = problem.fp;
    let order = problem.order;
    let grid = problem.grid();
    let d = problem.dim();
    let alpha = order.alpha();
    let u0 = DVector::from_row_slice(&problem.u0);

    // v(0) = f(0) - a(0) u0
    let a0 = matrix_at(problem.a.value_at_zero(), d);
    let f0 = DVector::from_row_slice(problem.f.value_at_zero());
    let v0 = &f0 - &a0 * &u0;

    let mut kernels: Vec<InnerKernel<T>> = (0..d).map(|_| InnerKernel::new(fp, order)).collect();
    let mut values: Vec<Vec<C<T>>> = Vec::with_capacity(grid.len());
    for (i, n) in grid.iter().enumerate() {
        let a_vals = &problem.a.values()[i];
        let f_n = DVector::from_row_slice(&problem.f.values()[i]);
        // each component carries its own head constant v0[j]
        let inner = DVector::from_iterator(
            d,
            (0..d).map(|j| kernels[j].integral_term(fp, n, v0[j])),
        );
        let rhs = if is_zero_matrix(a_vals) {
            f_n
        } else {
            let a_n = matrix_at(a_vals, d);
            f_n - &a_n * &u0 - &a_n * &inner
        };
        let pivot = pivot_matrix(fp, alpha, n, a_vals, d);
        let v_n = pivot.lu().solve(&rhs).ok_or(Error::SingularPivot {
            level: n,
            magnitude: 0.0,
        })?;
        for (j, kernel) in kernels.iter_mut().enumerate() {
            kernel.push(n, v_n[j] - v0[j]);
        }
        values.push(v_n.iter().copied().collect());
    }

    let v = VectorRadialFunction::new(
        grid,
        d,
        values,
        v0.iter().copied().collect(),
        BlockTailModel::Zero,
    )?;

    let mut u_components = Vec::with_capacity(d);
    for j in 0..d {
        let vj = v.component(j)?;
        u_components.push(apply_i(fp, order, &vj).add_constant(problem.u0[j]));
    }
    let u = VectorRadialFunction::from_components(&u_components)?;

    let residual_max = matrix_residual_max(problem, &u)?;

    Ok(MatrixSolveReport {
        v,
        u,
        min_pivot: spectral.min_pivot,
        residual_max,
        warnings,
    })
}

/// Maximum componentwise magnitude of `D^alpha u + a u - f` over the trusted
/// interior (same trust margin as the scalar residual).
pub fn matrix_residual_max<T: Scalar + RealField>(
    problem: &MatrixCauchyProblem<T>,
    u: &VectorRadialFunction<T>,
) -> Result<T> {
    let grid = problem.grid();
    if u.grid() != grid {
        return Err(Error::GridMismatch {
            context: "residual candidate must live on the problem grid".into(),
        });
    }
    let d = problem.dim();
    let du: Vec<RadialFunction<T>> = (0..d)
        .map(|j| Ok(apply_d(problem.fp, problem.order, &u.component(j)?)))
        .collect::<Result<_>>()?;

    let alpha_f = problem.order.alpha().to_f64().unwrap_or(1.0);
    let margin = (20.0 / alpha_f).ceil() as Level;
    let mut max_trusted = T::zero();
    let mut max_all = T::zero();
    let mut any_trusted = false;
    for (i, n) in grid.iter().enumerate() {
        let a_n = matrix_at(&problem.a.values()[i], d);
        let u_n = DVector::from_row_slice(&u.values()[i]);
        let f_n = DVector::from_row_slice(&problem.f.values()[i]);
        let r = DVector::from_iterator(d, (0..d).map(|j| du[j].values()[i])) + &a_n * &u_n - f_n;
        let mag = r
            .iter()
            .fold(T::zero(), |acc, z| Float::max(acc, z.norm()));
        max_all = Float::max(max_all, mag);
        if n >= grid.n_min() + margin && n <= grid.n_max() - margin {
            any_trusted = true;
            max_trusted = Float::max(max_trusted, mag);
        }
    }
    Ok(if any_trusted { max_trusted } else { max_all })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::{solve_direct, CauchyProblem};
    use crate::radial::TailModel;

    type C64 = Complex<f64>;

    fn fp(q: u32) -> FieldParams {
        FieldParams::new(q).unwrap()
    }

    fn ord(alpha: f64) -> AlphaOrder<f64> {
        AlphaOrder::new(alpha).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn small_scalar_problem() -> CauchyProblem<f64> {
        let grid = LevelGrid::new(-12, 12).unwrap();
        let a_vals = grid
            .iter()
            .map(|n| {
                if (-4..=1).contains(&n) {
                    c(0.4 * (n as f64 * 0.9).cos(), 0.2 * (n as f64 * 0.5).sin())
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect();
        let f_vals = grid
            .iter()
            .map(|n| {
                if (-4..=4).contains(&n) {
                    c((n as f64 * 0.7).sin() + 0.8, 0.3)
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect();
        let a = RadialFunction::new(grid, a_vals, c(0.0, 0.0), TailModel::Zero).unwrap();
        let f = RadialFunction::new(grid, f_vals, c(0.0, 0.0), TailModel::Zero).unwrap();
        CauchyProblem::new(fp(2), ord(1.5), a, f, c(0.25, -0.5)).unwrap()
    }

    #[test]
    fn dimension_one_reduces_to_scalar() {
        let scalar = small_scalar_problem();
        let scalar_report = solve_direct(&scalar).unwrap();
        let matrix = MatrixCauchyProblem::from_scalar(&scalar);
        let matrix_report = solve_matrix(&matrix).unwrap();
        for i in 0..scalar.grid().len() {
            let dv = (matrix_report.v.values()[i][0] - scalar_report.v.values()[i]).norm();
            let du = (matrix_report.u.values()[i][0] - scalar_report.u.values()[i]).norm();
            assert!(dv <= 1e-12, "v differs by {dv}");
            assert!(du <= 1e-12, "u differs by {du}");
        }
        assert!((matrix_report.min_pivot - scalar_report.min_pivot).abs() <= 1e-12);
    }

    #[test]
    fn eigenvalue_resonance_is_rejected() {
        // a carries the resonant eigenvalue -q^(alpha(1-n0)) at grid level
        // n0, which makes the pivot I + q^(alpha(n0-1)) a singular there
        let grid = LevelGrid::new(-3, 3).unwrap();
        let q = 2u32;
        let alpha = 1.0;
        let n0: Level = 1;
        let lam = -fp(q).q_pow::<f64>(alpha * (1.0 - n0 as f64));
        let mk = |l: f64| vec![c(l, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)];
        let values: Vec<Vec<C64>> = grid
            .iter()
            .map(|n| if n == n0 { mk(lam) } else { mk(0.1) })
            .collect();
        let a = MatrixRadialFunction::new(grid, 2, values, vec![c(0.0, 0.0); 4], BlockTailModel::Zero)
            .unwrap();
        let f = VectorRadialFunction::new(
            grid,
            2,
            vec![vec![c(1.0, 0.0), c(0.0, 0.0)]; grid.len()],
            vec![c(0.0, 0.0); 2],
            BlockTailModel::Zero,
        )
        .unwrap();
        let p = MatrixCauchyProblem::new(fp(q), ord(alpha), a, f, vec![c(0.0, 0.0); 2]).unwrap();
        match solve_matrix(&p) {
            Err(Error::SingularPivot { level, .. }) => assert_eq!(level, n0),
            other => panic!("expected singular pivot, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_coefficient_decouples() {
        let grid = LevelGrid::new(-10, 10).unwrap();
        let comp = |phase: f64| -> (RadialFunction<f64>, RadialFunction<f64>) {
            let a_vals = grid
                .iter()
                .map(|n| {
                    if (-3..=1).contains(&n) {
                        c(0.5 * (n as f64 + phase).cos(), 0.1)
                    } else {
                        c(0.0, 0.0)
                    }
                })
                .collect();
            let f_vals = grid
                .iter()
                .map(|n| {
                    if (-3..=3).contains(&n) {
                        c((n as f64 * phase).sin() + 0.5, -0.2)
                    } else {
                        c(0.0, 0.0)
                    }
                })
                .collect();
            (
                RadialFunction::new(grid, a_vals, c(0.0, 0.0), TailModel::Zero).unwrap(),
                RadialFunction::new(grid, f_vals, c(0.0, 0.0), TailModel::Zero).unwrap(),
            )
        };
        let (a1, f1) = comp(0.7);
        let (a2, f2) = comp(1.3);

        // block-diagonal matrix problem
        let values: Vec<Vec<C64>> = (0..grid.len())
            .map(|i| {
                vec![
                    a1.values()[i],
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    a2.values()[i],
                ]
            })
            .collect();
        let a = MatrixRadialFunction::new(grid, 2, values, vec![c(0.0, 0.0); 4], BlockTailModel::Zero)
            .unwrap();
        let f = VectorRadialFunction::from_components(&[f1.clone(), f2.clone()]).unwrap();
        let p = MatrixCauchyProblem::new(fp(3), ord(0.5), a, f, vec![c(0.0, 0.0); 2]).unwrap();
        let rep = solve_matrix(&p).unwrap();

        // against two independent scalar solves
        let s1 = solve_direct(&CauchyProblem::new(fp(3), ord(0.5), a1, f1, c(0.0, 0.0)).unwrap())
            .unwrap();
        let s2 = solve_direct(&CauchyProblem::new(fp(3), ord(0.5), a2, f2, c(0.0, 0.0)).unwrap())
            .unwrap();
        for i in 0..grid.len() {
            assert!((rep.v.values()[i][0] - s1.v.values()[i]).norm() <= 1e-12);
            assert!((rep.v.values()[i][1] - s2.v.values()[i]).norm() <= 1e-12);
            assert!((rep.u.values()[i][0] - s1.u.values()[i]).norm() <= 1e-12);
            assert!((rep.u.values()[i][1] - s2.u.values()[i]).norm() <= 1e-12);
        }
    }
}
