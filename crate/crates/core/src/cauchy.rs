//! The Cauchy problem `D^alpha u + a(|x|) u = f(|x|)`, `u(0) = u0`, reduced to
//! the integral equation in `v` with `u = u0 + I^alpha v`.
//!
//! The kernel couples level `n` only to levels `k < n`, so on a grid the
//! system is strictly lower triangular and a single forward sweep solves it
//! exactly; Picard iteration over the same discrete operator is kept as an
//! independent cross-check (it terminates in finitely many steps because each
//! application of the kernel raises the lowest nonzero level).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::local_field::FieldParams;
use crate::radial::{Level, RadialFunction, TailModel};
use crate::riesz::{apply_d, apply_i, constants, moment_integral_closed, AlphaOrder};
use crate::scalar::{Scalar, C};

/// Pivots below this magnitude are singular (the spectral condition fails).
pub const PIVOT_SINGULAR_TOL: f64 = 1e-9;
/// Pivots below this magnitude (but above the singular tolerance) warn.
pub const PIVOT_WARN_TOL: f64 = 1e-6;
/// Decay exponent used for the automatic hypothesis check inside solves.
pub const DEFAULT_DECAY_EPS: f64 = 0.5;

/// Warning text attached when the data fail the decay hypothesis: the
/// computed `u` then solves the equation only in the distributional sense.
pub const NON_DECAYING_WARNING: &str =
    "non-decaying data: Φ′-sense solution only (pointwise residual need not vanish)";

fn czero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Product that treats an exactly-zero left factor as annihilating, so a zero
/// coefficient never turns an overflowed scale into NaN.
fn cmul<T: Scalar>(a: C<T>, b: C<T>) -> C<T> {
    if a.re == T::zero() && a.im == T::zero() {
        czero()
    } else {
        a * b
    }
}

fn rscale<T: Scalar>(z: C<T>, s: T) -> C<T> {
    if z.re == T::zero() && z.im == T::zero() {
        czero()
    } else {
        z * s
    }
}

/// Scalar Cauchy problem on a level grid.
///
/// `a` and `f` share one grid; their head models (constant `value_at_zero`)
/// are the continuity-at-zero assumption made of the data.
#[derive(Debug, Clone)]
pub struct CauchyProblem<T: Scalar> {
    pub fp: FieldParams,
    pub order: AlphaOrder<T>,
    pub a: RadialFunction<T>,
    pub f: RadialFunction<T>,
    pub u0: C<T>,
}

impl<T: Scalar> CauchyProblem<T> {
    pub fn new(
        fp: FieldParams,
        order: AlphaOrder<T>,
        a: RadialFunction<T>,
        f: RadialFunction<T>,
        u0: C<T>,
    ) -> Result<Self> {
        if a.grid() != f.grid() {
            return Err(Error::GridMismatch {
                context: "coefficient and right-hand side must share one grid".into(),
            });
        }
        Ok(Self { fp, order, a, f, u0 })
    }

    pub fn grid(&self) -> crate::radial::LevelGrid {
        self.a.grid()
    }

    /// `F(0) = f(0) - a(0) u0`, the value the solution `v` takes at zero.
    pub fn v_at_zero(&self) -> C<T> {
        self.f.value_at_zero() - cmul(self.a.value_at_zero(), self.u0)
    }
}

/// Running state of the separable inner integral
/// `∫_{|y| < q^n} kernel(n, y) v(y) dy` along a forward level sweep.
///
/// Values are pushed as deviations from `v(0)`; the constant part is folded
/// in analytically (the kernel integrates constants in closed form), so the
/// head below the grid contributes exactly zero to the running sums.
#[derive(Debug, Clone)]
pub(crate) struct InnerKernel<T: Scalar> {
    log_branch: bool,
    q: T,
    alpha: T,
    coeff: T,
    q_alpha_m1: T,
    q_neg_alpha: T,
    log_coeff: T,
    p: C<T>,
    w: C<T>,
    r: C<T>,
}

impl<T: Scalar> InnerKernel<T> {
    pub(crate) fn new(fp: FieldParams, order: AlphaOrder<T>) -> Self {
        let q = fp.qt::<T>();
        let alpha = order.alpha();
        let (coeff, q_alpha_m1, q_neg_alpha) = if order.is_log_branch() {
            (T::zero(), T::zero(), T::zero())
        } else {
            let c_alpha =
                (T::one() - fp.q_pow(-alpha)) / (T::one() - fp.q_pow(alpha - T::one()));
            (
                c_alpha * (T::one() - q.recip()),
                fp.q_pow(alpha - T::one()),
                fp.q_pow(-alpha),
            )
        };
        let log_coeff = {
            let r = (q - T::one()) / q;
            r * r
        };
        Self {
            log_branch: order.is_log_branch(),
            q,
            alpha,
            coeff,
            q_alpha_m1,
            q_neg_alpha,
            log_coeff,
            p: czero(),
            w: czero(),
            r: czero(),
        }
    }

    /// Inner integral at level `n` for the sequence pushed so far, with
    /// constant head `v0`.
    pub(crate) fn integral_term(&self, fp: FieldParams, n: Level, v0: C<T>) -> C<T> {
        let nt = T::from_level(n);
        if !self.log_branch {
            let bracket = (self.p * self.q_alpha_m1 - self.w) * self.coeff - v0;
            rscale(bracket, fp.q_pow(self.alpha * (nt - T::one())))
        } else {
            let bracket = -((self.p * nt - self.r) * self.log_coeff) - v0;
            rscale(bracket, fp.q_powi::<T>(n - 1))
        }
    }

    /// Advance the sweep past level `n` whose deviation from `v0` is `dev`.
    pub(crate) fn push(&mut self, n: Level, dev: C<T>) {
        let nt = T::from_level(n);
        self.p = self.p / self.q + dev;
        if self.log_branch {
            self.r = self.r / self.q + dev * nt;
        } else {
            self.w = self.w * self.q_neg_alpha + dev;
        }
    }
}

/// Outcome of the spectral-condition scan.
#[derive(Debug, Clone)]
pub struct SpectralReport<T: Scalar> {
    /// True when no scanned pivot falls below the singular tolerance.
    pub ok: bool,
    /// Smallest pivot magnitude seen.
    pub min_pivot: T,
    /// Level attaining the minimum.
    pub min_level: Level,
    /// Levels whose pivot magnitude is below the singular tolerance.
    pub offending_levels: Vec<Level>,
}

/// Levels outside the grid where `|a| q^(alpha(k-1))` can sit near 1, i.e.
/// where a resonance `a = -q^(alpha m)` could hide. Outside this window the
/// pivot magnitude is bounded below by 1/2 and needs no scan.
fn resonance_window(q: f64, alpha: f64, coeff_norm: f64) -> Option<(Level, Level)> {
    if coeff_norm == 0.0 || !coeff_norm.is_finite() {
        return None;
    }
    let lnq = q.ln();
    let center = 1.0 - coeff_norm.ln() / (alpha * lnq);
    let half = 4.0f64.ln() / (alpha * lnq) + 1.0;
    let lo = (center - half).floor().clamp(-20_000.0, 20_000.0) as Level;
    let hi = (center + half).ceil().clamp(-20_000.0, 20_000.0) as Level;
    Some((lo, hi))
}

/// Check condition `a(|x|) != -q^(alpha m)` through the pivots
/// `1 + q^(-alpha) a(q^n) q^(alpha n)`, at every grid level and over the
/// head/tail extension regions (where the coefficient is its model constant
/// and only a finite resonance window can produce a small pivot).
pub fn check_spectral_condition<T: Scalar>(problem: &CauchyProblem<T>) -> SpectralReport<T> {
    let fp = problem.fp;
    let alpha = problem.order.alpha();
    let grid = problem.grid();

    let mut candidates: Vec<Level> = grid.iter().collect();
    // a few levels straddling each edge, plus the resonance windows of the
    // head and tail constants
    for k in 1..=4 {
        candidates.push(grid.n_min() - k);
        candidates.push(grid.n_max() + k);
    }
    let qf = fp.qt::<f64>();
    let af = alpha.to_f64().unwrap_or(1.0);
    let head_norm = problem.a.value_at_zero().norm().to_f64().unwrap_or(0.0);
    if let Some((lo, hi)) = resonance_window(qf, af, head_norm) {
        for k in lo..=hi {
            if k < grid.n_min() {
                candidates.push(k);
            }
        }
    }
    let tail_norm = problem.a.tail().value().norm().to_f64().unwrap_or(0.0);
    if let Some((lo, hi)) = resonance_window(qf, af, tail_norm) {
        for k in lo..=hi {
            if k > grid.n_max() {
                candidates.push(k);
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    let singular = T::cst(PIVOT_SINGULAR_TOL);
    let mut min_pivot = T::infinity();
    let mut min_level = grid.n_min();
    let mut offending = Vec::new();
    for &n in &candidates {
        let a_n = problem.a.eval_at_level(n);
        let scale = fp.q_pow(alpha * (T::from_level(n) - T::one()));
        let pivot = Complex::new(T::one(), T::zero()) + rscale(a_n, scale);
        let mag = pivot.norm();
        if mag < min_pivot {
            min_pivot = mag;
            min_level = n;
        }
        if mag < singular {
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

/// Per-iteration record of a Picard run.
#[derive(Debug, Clone)]
pub struct PicardStats<T: Scalar> {
    /// Number of iterations performed.
    pub iterations: usize,
    /// Successive sup-norm differences `‖v^(m) - v^(m-1)‖`, one per iteration.
    pub diff_norms: Vec<T>,
}

/// Everything a solve produces.
#[derive(Debug, Clone)]
pub struct SolveReport<T: Scalar> {
    /// Solution of the integral equation.
    pub v: RadialFunction<T>,
    /// Solution of the Cauchy problem, `u = u0 + I^alpha v`.
    pub u: RadialFunction<T>,
    /// Smallest pivot magnitude over the scanned levels.
    pub min_pivot: T,
    /// Maximum residual `|D^alpha u + a u - f|` over trusted interior levels.
    pub residual_max: T,
    /// Order-of-magnitude bound for the error committed by closing the head
    /// of the inner integral with `v(0)`: kernel weight at the lowest level
    /// times the observed variation of `v` next to it.
    pub head_truncation_estimate: T,
    pub warnings: Vec<String>,
    /// Present for Picard solves.
    pub picard: Option<PicardStats<T>>,
}

fn precheck<T: Scalar>(problem: &CauchyProblem<T>) -> Result<(SpectralReport<T>, Vec<String>)> {
    let spectral = check_spectral_condition(problem);
    if !spectral.ok {
        return Err(Error::SingularPivot {
            level: spectral.min_level,
            magnitude: spectral.min_pivot.to_f64().unwrap_or(0.0),
        });
    }
    let mut warnings = Vec::new();
    if spectral.min_pivot < T::cst(PIVOT_WARN_TOL) {
        warnings.push(format!(
            "ill-conditioned pivot at level {}: |pivot| = {:e}",
            spectral.min_level,
            spectral.min_pivot.to_f64().unwrap_or(0.0)
        ));
    }
    let k = constants(problem.fp, problem.order);
    if k.c_alpha_near_pole() {
        warnings.push(
            "alpha sits near the logarithmic branch: c_alpha is large and the power kernel \
             is close to degenerate"
                .into(),
        );
    }
    Ok((spectral, warnings))
}

fn finish_report<T: Scalar>(
    problem: &CauchyProblem<T>,
    values: Vec<C<T>>,
    v0: C<T>,
    spectral: SpectralReport<T>,
    mut warnings: Vec<String>,
    picard: Option<PicardStats<T>>,
) -> Result<SolveReport<T>> {
    let grid = problem.grid();
    let v = RadialFunction::new(grid, values, v0, TailModel::Zero)?;
    let u = apply_i(problem.fp, problem.order, &v).add_constant(problem.u0);

    let res = residual(problem, &u)?;
    warnings.extend(res.warnings.iter().cloned());
    warnings.dedup();

    // head-closure error estimate: sup |a/pivot| * kernel weight of the head
    // ball * variation of v near zero
    let fp = problem.fp;
    let mut sup_coeff = T::zero();
    for n in grid.iter() {
        let a_n = problem.a.eval_at_level(n);
        let scale = fp.q_pow(problem.order.alpha() * (T::from_level(n) - T::one()));
        let pivot = Complex::new(T::one(), T::zero()) + rscale(a_n, scale);
        sup_coeff = sup_coeff.max(a_n.norm() / pivot.norm());
    }
    let front = if problem.order.is_log_branch() {
        let q = fp.qt::<T>();
        (q - T::one()) / (q * fp.log_q::<T>())
    } else {
        constants(fp, problem.order).c_alpha().unwrap_or(T::zero()).abs()
    };
    let head_moment = moment_integral_closed(fp, problem.order, 0, grid.n_min());
    let mut variation = T::zero();
    for i in 0..grid.len().min(3) {
        variation = variation.max((v.values()[i] - v0).norm());
    }
    let head_truncation_estimate = sup_coeff * front * head_moment * variation;

    Ok(SolveReport {
        v,
        u,
        min_pivot: spectral.min_pivot,
        residual_max: res.residual_max,
        head_truncation_estimate,
        warnings,
        picard,
    })
}

/// Solve the integral equation by one forward level sweep and set
/// `u = u0 + I^alpha v`.
///
/// At each level, `v(q^n) = [f(q^n) - a(q^n) u0 - a(q^n) * inner] / pivot(n)`
/// with the inner integral accumulated by the separable running sums and the
/// head closed with `v(0) = f(0) - a(0) u0`. Levels above `n` never enter,
/// so the sweep is exactly causal.
pub fn solve_direct<T: Scalar>(problem: &CauchyProblem<T>) -> Result<SolveReport<T>> {
    let (spectral, warnings) = precheck(problem)?;
    let fp = problem.fp;
    let order = problem.order;
    let grid = problem.grid();
    let alpha = order.alpha();
    let v0 = problem.v_at_zero();

    let mut kernel = InnerKernel::new(fp, order);
    let mut values = Vec::with_capacity(grid.len());
    for (i, n) in grid.iter().enumerate() {
        let a_n = problem.a.values()[i];
        let f_n = problem.f.values()[i];
        let inner = kernel.integral_term(fp, n, v0);
        let scale = fp.q_pow(alpha * (T::from_level(n) - T::one()));
        let pivot = Complex::new(T::one(), T::zero()) + rscale(a_n, scale);
        let v_n = (f_n - cmul(a_n, problem.u0) - cmul(a_n, inner)) / pivot;
        kernel.push(n, v_n - v0);
        values.push(v_n);
    }

    finish_report(problem, values, v0, spectral, warnings, None)
}

/// Solve by Picard iteration `v <- F - K v` from `v = F`, recording the
/// successive sup-norm differences.
///
/// The discrete kernel is the one the direct sweep uses, so the fixed point
/// agrees with [`solve_direct`] to rounding; on a grid the iteration even
/// terminates exactly, because each application of `K` raises the lowest
/// level carrying a nonzero difference.
pub fn solve_picard<T: Scalar>(
    problem: &CauchyProblem<T>,
    max_iter: usize,
    tol: T,
) -> Result<SolveReport<T>> {
    let (spectral, warnings) = precheck(problem)?;
    let fp = problem.fp;
    let order = problem.order;
    let grid = problem.grid();
    let alpha = order.alpha();
    let len = grid.len();
    let v0 = problem.v_at_zero();

    // F and the per-level pivots
    let mut pivots = Vec::with_capacity(len);
    let mut big_f = Vec::with_capacity(len);
    for (i, n) in grid.iter().enumerate() {
        let a_n = problem.a.values()[i];
        let scale = fp.q_pow(alpha * (T::from_level(n) - T::one()));
        let pivot = Complex::new(T::one(), T::zero()) + rscale(a_n, scale);
        big_f.push((problem.f.values()[i] - cmul(a_n, problem.u0)) / pivot);
        pivots.push(pivot);
    }

    let mut current = big_f.clone();
    let mut diff_norms = Vec::new();
    for _ in 0..max_iter {
        let mut kernel = InnerKernel::new(fp, order);
        let mut next = Vec::with_capacity(len);
        let mut diff = T::zero();
        for (i, n) in grid.iter().enumerate() {
            let inner = kernel.integral_term(fp, n, v0);
            let a_n = problem.a.values()[i];
            let v_n = big_f[i] - cmul(a_n, inner) / pivots[i];
            kernel.push(n, current[i] - v0);
            diff = diff.max((v_n - current[i]).norm());
            next.push(v_n);
        }
        current = next;
        diff_norms.push(diff);
        if diff <= tol {
            let stats = PicardStats {
                iterations: diff_norms.len(),
                diff_norms,
            };
            return finish_report(problem, current, v0, spectral, warnings, Some(stats));
        }
    }

    Err(Error::NoConvergence {
        iterations: max_iter,
        last_diff: diff_norms.last().and_then(|d| d.to_f64()).unwrap_or(f64::NAN),
    })
}

/// Per-level residual `D^alpha u + a u - f`.
#[derive(Debug, Clone)]
pub struct ResidualReport<T: Scalar> {
    pub levels: Vec<Level>,
    pub values: Vec<C<T>>,
    /// Flag per level: far enough from both grid edges (`>= ceil(20/alpha)`
    /// levels) that extension-model truncation cannot reach it.
    pub trusted: Vec<bool>,
    /// Maximum residual magnitude over trusted levels (over all levels, with
    /// a warning, when the grid is too small to trust any).
    pub residual_max: T,
    pub warnings: Vec<String>,
}

/// Evaluate the residual of a candidate solution on the problem grid.
pub fn residual<T: Scalar>(
    problem: &CauchyProblem<T>,
    u: &RadialFunction<T>,
) -> Result<ResidualReport<T>> {
    let grid = problem.grid();
    if u.grid() != grid {
        return Err(Error::GridMismatch {
            context: "residual candidate must live on the problem grid".into(),
        });
    }
    let du = apply_d(problem.fp, problem.order, u);

    let alpha_f = problem.order.alpha().to_f64().unwrap_or(1.0);
    let margin = (20.0 / alpha_f).ceil() as Level;

    let mut warnings = Vec::new();
    let decay = check_decay_hypothesis(problem, T::cst(DEFAULT_DECAY_EPS));
    if !decay.satisfied {
        warnings.push(NON_DECAYING_WARNING.to_string());
    }

    let mut levels = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    let mut trusted = Vec::with_capacity(grid.len());
    let mut max_trusted = T::zero();
    let mut max_all = T::zero();
    let mut any_trusted = false;
    for (i, n) in grid.iter().enumerate() {
        let r = du.values()[i] + cmul(problem.a.values()[i], u.values()[i])
            - problem.f.values()[i];
        let is_trusted = n >= grid.n_min() + margin && n <= grid.n_max() - margin;
        let mag = r.norm();
        max_all = max_all.max(mag);
        if is_trusted {
            any_trusted = true;
            max_trusted = max_trusted.max(mag);
        }
        levels.push(n);
        values.push(r);
        trusted.push(is_trusted);
    }
    let residual_max = if any_trusted {
        max_trusted
    } else {
        warnings.push(format!(
            "grid narrower than 2*ceil(20/alpha) = {} levels: no trusted interior, \
             residual_max covers all levels",
            2 * margin
        ));
        max_all
    };

    Ok(ResidualReport {
        levels,
        values,
        trusted,
        residual_max,
        warnings,
    })
}

/// Fitted constants for the decay hypothesis
/// `|a(q^n)| <= C q^(-n(alpha+eps))`, `|f(q^n)| <= C q^(-n eps)` on positive
/// levels.
#[derive(Debug, Clone)]
pub struct DecayReport<T: Scalar> {
    pub eps: T,
    /// Minimal constant for the coefficient bound over positive grid levels.
    pub c_a: T,
    /// Minimal constant for the right-hand side bound.
    pub c_f: T,
    pub a_satisfied: bool,
    pub f_satisfied: bool,
    pub satisfied: bool,
}

/// Empirical decay check: fit the minimal constants on positive levels and
/// flag data whose weighted envelope is still growing at the top of the grid
/// (or whose tail model is a nonzero constant, which can never decay).
pub fn check_decay_hypothesis<T: Scalar>(problem: &CauchyProblem<T>, eps: T) -> DecayReport<T> {
    let fp = problem.fp;
    let alpha = problem.order.alpha();
    let grid = problem.grid();

    let envelope = |g: &RadialFunction<T>, weight_exp: T| -> (T, bool) {
        let mut c = T::zero();
        let mut top_env = T::zero();
        let mut has_positive = false;
        for (i, n) in grid.iter().enumerate() {
            if n <= 0 {
                continue;
            }
            has_positive = true;
            let env = g.values()[i].norm() * fp.q_pow(weight_exp * T::from_level(n));
            c = c.max(env);
            if n == grid.n_max() {
                top_env = env;
            }
        }
        let tail_ok = g.tail().is_effectively_zero();
        let growing_at_top = has_positive
            && top_env > T::zero()
            && top_env >= c * (T::one() - T::cst(1e-12));
        (c, tail_ok && !growing_at_top)
    };

    let (c_a, a_satisfied) = envelope(&problem.a, alpha + eps);
    let (c_f, f_satisfied) = envelope(&problem.f, eps);
    DecayReport {
        eps,
        c_a,
        c_f,
        a_satisfied,
        f_satisfied,
        satisfied: a_satisfied && f_satisfied,
    }
}
