//! Fractional differentiation `D^alpha` and its right inverse `I^alpha` on
//! radial functions, the constants attached to the Riesz kernels, the moment
//! integrals, and the composition check `D^alpha (I^alpha v) = v`.
//!
//! Both operators act on a level sequence through separable kernels, so one
//! forward (and for `D^alpha` one backward) sweep with running sums evaluates
//! them in O(L). Two further choices make the sweeps well conditioned:
//!
//! * the constant part of the input is removed first (`u - u(0)`): both
//!   operators annihilate constants, so this is an exact rewrite, it turns
//!   every head sum into an exact zero, and it makes the annihilation
//!   identities hold to the last bit instead of to a rounding residue;
//! * running sums are kept in level-normalized form (rescaled by the local
//!   `q^n` magnitude), so no intermediate grows like `q^(alpha n)` unless the
//!   result itself does.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::local_field::FieldParams;
use crate::radial::{Level, LevelGrid, RadialFunction, TailModel};
use crate::scalar::{Scalar, C};

/// Width of the branch window around `alpha = 1` that routes to the
/// logarithmic kernel.
pub const LOG_BRANCH_EPS: f64 = 1e-12;

/// Threshold under which `|1 - q^(alpha-1)|` triggers a near-pole warning for
/// `c_alpha` off the logarithmic branch.
pub const C_ALPHA_NEAR_POLE_EPS: f64 = 1e-6;

/// Fractional order `alpha > 0` with its resolved kernel branch.
///
/// The branch is a function of `alpha` alone: orders within `1e-12` of 1 use
/// the logarithmic kernel, everything else the power kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaOrder<T: Scalar> {
    alpha: T,
    log_branch: bool,
}

impl<T: Scalar> AlphaOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidAlpha {
                alpha: alpha.to_f64().unwrap_or(f64::NAN),
            });
        }
        let log_branch = (alpha - T::one()).abs() < T::cst(LOG_BRANCH_EPS);
        Ok(Self { alpha, log_branch })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn is_log_branch(&self) -> bool {
        self.log_branch
    }
}

/// Constants attached to the Riesz kernels for a fixed `q` and `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszConstants<T: Scalar> {
    d_alpha: T,
    c_alpha: Option<T>,
    near_pole: bool,
}

impl<T: Scalar> RieszConstants<T> {
    /// `d_alpha = (1 - q^alpha) / (1 - q^(-alpha-1))`.
    pub fn d_alpha(&self) -> T {
        self.d_alpha
    }

    /// `c_alpha = (1 - q^(-alpha)) / (1 - q^(alpha-1))`; undefined on the
    /// logarithmic branch.
    pub fn c_alpha(&self) -> Result<T> {
        self.c_alpha.ok_or(Error::LogBranch)
    }

    /// True when `c_alpha` exists but its denominator is within `1e-6` of
    /// zero, i.e. `alpha` sits next to the branch without being on it.
    pub fn c_alpha_near_pole(&self) -> bool {
        self.near_pole
    }
}

/// Gamma factor `Γ_K(s) = (1 - q^(s-1)) / (1 - q^(-s))` of the local field.
///
/// `s = 0` is the pole of the factor; `s = 1` is fine and yields 0.
pub fn gamma_k<T: Scalar>(fp: FieldParams, s: T) -> Result<T> {
    if s == T::zero() {
        return Err(Error::GammaPole { s: 0.0 });
    }
    let val = (T::one() - fp.q_pow(s - T::one())) / (T::one() - fp.q_pow(-s));
    if !val.is_finite() {
        return Err(Error::GammaPole {
            s: s.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(val)
}

/// Riesz constants for the given field and order.
pub fn constants<T: Scalar>(fp: FieldParams, order: AlphaOrder<T>) -> RieszConstants<T> {
    let alpha = order.alpha();
    let d_alpha =
        (T::one() - fp.q_pow(alpha)) / (T::one() - fp.q_pow(-alpha - T::one()));
    let c_den = T::one() - fp.q_pow(alpha - T::one());
    let (c_alpha, near_pole) = if order.is_log_branch() {
        (None, false)
    } else {
        (
            Some((T::one() - fp.q_pow(-alpha)) / c_den),
            c_den.abs() < T::cst(C_ALPHA_NEAR_POLE_EPS),
        )
    };
    RieszConstants {
        d_alpha,
        c_alpha,
        near_pole,
    }
}

fn czero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Multiply, mapping an exactly-zero left factor to exact zero even when the
/// scale factor is infinite (level prefactors can overflow far outside the
/// magnitude range of the result).
fn scaled<T: Scalar>(z: C<T>, scale: T) -> C<T> {
    if z.re == T::zero() && z.im == T::zero() {
        czero()
    } else {
        z * scale
    }
}

/// Hypersingular derivative `D^alpha u` on the input grid.
///
/// Per-level value of the series
/// `d_alpha (1-1/q) q^(-(alpha+1)n) Σ_{k<n} q^k u(q^k)
///  + q^(-alpha n - 1) (q^alpha + q - 2)/(1 - q^(-alpha-1)) u(q^n)
///  + d_alpha (1-1/q) Σ_{l>n} q^(-alpha l) u(q^l)`,
/// with the head and tail portions of both sums folded in exactly from the
/// extension models. The output's `value_at_zero` is the computed value at
/// the lowest grid level (a reported stand-in for the limit at 0, see
/// [`d_zero_stabilization`]); the output tail model is `Zero`.
pub fn apply_d<T: Scalar>(
    fp: FieldParams,
    order: AlphaOrder<T>,
    u: &RadialFunction<T>,
) -> RadialFunction<T> {
    let q = fp.qt::<T>();
    let alpha = order.alpha();
    let grid = u.grid();
    let len = grid.len();
    let u0 = u.value_at_zero();

    // deviation from the constant part; D annihilates the rest
    let dev: Vec<C<T>> = u.values().iter().map(|v| v - u0).collect();
    let dev_tail = u.tail().value() - u0;

    let q_neg_alpha = fp.q_pow(-alpha);
    let d_alpha = (T::one() - fp.q_pow(alpha)) / (T::one() - fp.q_pow(-alpha - T::one()));
    let one_minus_inv_q = T::one() - q.recip();
    // coefficients of the three normalized terms, sharing the q^(-alpha n) scale
    let c_lower = d_alpha * one_minus_inv_q / q;
    let c_diag = (fp.q_pow(alpha) + q - T::cst(2.0))
        / (q * (T::one() - fp.q_pow(-alpha - T::one())));
    let c_upper = d_alpha * one_minus_inv_q * q_neg_alpha;

    // suffix sums: t[i] = Σ_{l>n_i} q^(-alpha (l - n_i - 1)) dev(l),
    // seeded by the closed-form tail of the constant-deviation model
    let mut t = vec![czero::<T>(); len];
    t[len - 1] = dev_tail / (T::one() - q_neg_alpha);
    for i in (0..len - 1).rev() {
        t[i] = dev[i + 1] + t[i + 1] * q_neg_alpha;
    }

    // forward sweep: s = q^(-(n-1)) Σ_{k<n} q^k dev(k); the head vanishes
    let mut s = czero::<T>();
    let mut out = Vec::with_capacity(len);
    for (i, n) in grid.iter().enumerate() {
        let bracket = s * c_lower + dev[i] * c_diag + t[i] * c_upper;
        let scale = fp.q_pow(-alpha * T::from_level(n));
        out.push(scaled(bracket, scale));
        s = s / q + dev[i];
    }

    let at_zero = out[0];
    RadialFunction::new(grid, out, at_zero, TailModel::Zero)
        .expect("operator output is structurally valid")
}

/// Stabilization indicator for the reported `D^alpha u (0)`: the gap between
/// the two lowest grid levels, `|D(q^(n_min)) - D(q^(n_min+1))|`.
///
/// The limit at 0 is never claimed; a small gap is evidence the reported
/// value has stabilized. `None` when the grid has a single level.
pub fn d_zero_stabilization<T: Scalar>(output: &RadialFunction<T>) -> Option<T> {
    let vals = output.values();
    (vals.len() >= 2).then(|| (vals[0] - vals[1]).norm())
}

/// Right inverse `I^alpha u` on the input grid, with `(I^alpha u)(0) = 0`.
///
/// Off the logarithmic branch this is
/// `q^(-alpha) |x|^alpha u(|x|) + c_alpha ∫_{|y|<|x|} (|x|^(alpha-1) - |y|^(alpha-1)) u(|y|) dy`,
/// on it
/// `q^(-1) |x| u(|x|) + (1-q)/(q log q) ∫_{|y|<|x|} (log|x| - log|y|) u(|y|) dy`.
/// Only levels `<= n` enter the value at `n`, so the input tail model is
/// irrelevant; the head is handled exactly through the constant-part split.
/// The output tail model is `Zero`.
pub fn apply_i<T: Scalar>(
    fp: FieldParams,
    order: AlphaOrder<T>,
    u: &RadialFunction<T>,
) -> RadialFunction<T> {
    let q = fp.qt::<T>();
    let alpha = order.alpha();
    let grid = u.grid();
    let len = grid.len();
    let u0 = u.value_at_zero();
    let dev: Vec<C<T>> = u.values().iter().map(|v| v - u0).collect();

    let mut out = Vec::with_capacity(len);
    if !order.is_log_branch() {
        let c_alpha = (T::one() - fp.q_pow(-alpha)) / (T::one() - fp.q_pow(alpha - T::one()));
        let coeff = c_alpha * (T::one() - q.recip());
        let q_alpha_m1 = fp.q_pow(alpha - T::one());
        let q_neg_alpha = fp.q_pow(-alpha);
        // p = q^(-(n-1)) Σ_{k<n} q^k dev(k), w = q^(-alpha(n-1)) Σ_{k<n} q^(alpha k) dev(k)
        let mut p = czero::<T>();
        let mut w = czero::<T>();
        for (i, n) in grid.iter().enumerate() {
            let bracket = dev[i] + (p * q_alpha_m1 - w) * coeff;
            let scale = fp.q_pow(alpha * (T::from_level(n) - T::one()));
            out.push(scaled(bracket, scale));
            p = p / q + dev[i];
            w = w * q_neg_alpha + dev[i];
        }
    } else {
        // (1-q)/(q log q) kernel; log q cancels against the level logs
        let coeff = {
            let r = (q - T::one()) / q;
            r * r
        };
        let mut p = czero::<T>();
        let mut r = czero::<T>();
        for (i, n) in grid.iter().enumerate() {
            let nt = T::from_level(n);
            let bracket = dev[i] - (p * nt - r) * coeff;
            let scale = fp.q_powi::<T>(n - 1);
            out.push(scaled(bracket, scale));
            p = p / q + dev[i];
            r = r / q + dev[i] * nt;
        }
    }

    RadialFunction::new(grid, out, czero(), TailModel::Zero)
        .expect("operator output is structurally valid")
}

/// The constant `(D^(-alpha) u)(0)` that separates `D^(-alpha)` from
/// `I^alpha`: the whole-space Riesz potential of `u` evaluated at the origin.
///
/// `c_alpha Σ_k (1-1/q) q^(alpha k) u(q^k)` off the logarithmic branch and
/// `(1-q)/(q log q) Σ_k (1-1/q) q^k (k log q) u(q^k)` on it, with the head
/// portion summed in closed form. Requires a zero tail: against a nonzero
/// constant the integral over the whole field diverges.
pub fn riesz_potential_at_zero<T: Scalar>(
    fp: FieldParams,
    order: AlphaOrder<T>,
    u: &RadialFunction<T>,
) -> Result<C<T>> {
    if !u.tail().is_effectively_zero() {
        return Err(Error::DivergentTail);
    }
    let q = fp.qt::<T>();
    let alpha = order.alpha();
    let grid = u.grid();
    let u0 = u.value_at_zero();
    let one_minus_inv_q = T::one() - q.recip();

    if !order.is_log_branch() {
        let c_alpha = (T::one() - fp.q_pow(-alpha)) / (T::one() - fp.q_pow(alpha - T::one()));
        // head: Σ_{k<n_min} q^(alpha k) = q^(alpha(n_min-1)) / (1 - q^(-alpha))
        let head = fp.q_pow(alpha * (T::from_level(grid.n_min()) - T::one()))
            / (T::one() - fp.q_pow(-alpha));
        let mut sum = u0 * head;
        for (i, n) in grid.iter().enumerate() {
            sum = sum + u.values()[i] * fp.q_pow(alpha * T::from_level(n));
        }
        Ok(sum * (c_alpha * one_minus_inv_q))
    } else {
        // Σ_{k<=m} k q^k = q^m (m q/(q-1) - q/(q-1)^2), the arithmetic-geometric sum
        let m = grid.n_min() - 1;
        let qo = q / (q - T::one());
        let head = fp.q_powi::<T>(m) * (T::from_level(m) * qo - qo / (q - T::one()));
        let mut sum = u0 * head;
        for (i, n) in grid.iter().enumerate() {
            sum = sum + u.values()[i] * (fp.q_powi::<T>(n) * T::from_level(n));
        }
        let front = (T::one() - q) * one_minus_inv_q / q;
        Ok(sum * front)
    }
}

/// Closed form of the moment integral
/// `I_{alpha,m} = ∫_{|y|<|x|} | |x|^(alpha-1) - |y|^(alpha-1) | |y|^(alpha m) dy`
/// at `|x| = q^n`, equal to `d_{alpha,m} q^(alpha n (m+1))` with
/// `d_{alpha,m} = (1-1/q) |q^(alpha-1) - 1| / ((1 - q^(-alpha m - 1)) (q^(alpha(m+1)) - 1))`
/// off the logarithmic branch and
/// `d_{1,m} = (1-1/q) log q · q^(-m-1) / (1 - q^(-m-1))^2` on it.
pub fn moment_integral_closed<T: Scalar>(
    fp: FieldParams,
    order: AlphaOrder<T>,
    m: u32,
    n: Level,
) -> T {
    let d = moment_constant(fp, order, m);
    let alpha = order.alpha();
    let mt = T::from_u32(m).expect("moment order converts");
    d * fp.q_pow(alpha * T::from_level(n) * (mt + T::one()))
}

/// The constant `d_{alpha,m}` of the moment closed form.
pub fn moment_constant<T: Scalar>(fp: FieldParams, order: AlphaOrder<T>, m: u32) -> T {
    let q = fp.qt::<T>();
    let alpha = order.alpha();
    let mt = T::from_u32(m).expect("moment order converts");
    let one_minus_inv_q = T::one() - q.recip();
    if !order.is_log_branch() {
        let num = one_minus_inv_q * (fp.q_pow(alpha - T::one()) - T::one());
        let den = (T::one() - fp.q_pow(-(alpha * mt + T::one())))
            * (fp.q_pow(alpha * (mt + T::one())) - T::one());
        (num / den).abs()
    } else {
        let qm = fp.q_pow(-(mt + T::one()));
        let den = T::one() - qm;
        one_minus_inv_q * fp.log_q::<T>() * qm / (den * den)
    }
}

/// Outcome of checking `D^alpha (I^alpha v) = v` on `v`'s grid.
#[derive(Debug, Clone)]
pub struct InverseIdentityReport<T: Scalar> {
    /// Levels of `v`'s grid, in order.
    pub levels: Vec<Level>,
    /// `|D^alpha(I^alpha v) - v|` per level.
    pub deviations: Vec<T>,
    /// Maximum deviation over the levels above.
    pub max_deviation: T,
    /// Set when `v`'s tail is a nonzero constant: the decay hypothesis of
    /// the inverse identity fails and the composition annihilates the
    /// constant part instead of reproducing it.
    pub precondition_violated: bool,
    /// Working grid actually used for the composition.
    pub working_grid: LevelGrid,
}

/// Compose `apply_d(apply_i(v))` and report per-level deviations from `v`.
///
/// The composition runs on an internally widened working grid: `v` is
/// materialized (exactly, through its extension models) a further
/// `ceil(40 / min(1, alpha))` levels above and a few below its window, which
/// pushes the only genuine truncation — the unmodeled growth of `I^alpha v`
/// beyond the top of the working grid — below `1e-10` for any order. The
/// reported deviations cover every level of `v`'s original grid.
pub fn verify_inverse_identity<T: Scalar>(
    fp: FieldParams,
    order: AlphaOrder<T>,
    v: &RadialFunction<T>,
) -> InverseIdentityReport<T> {
    let precondition_violated = !v.tail().is_effectively_zero();
    let alpha_f = order.alpha().to_f64().unwrap_or(1.0);
    let ext_top = (40.0 / alpha_f.min(1.0)).ceil() as Level + 4;
    let ext_bot = 4;
    let grid = v.grid();
    let wide = LevelGrid::new(grid.n_min() - ext_bot, grid.n_max() + ext_top)
        .expect("widened grid is ordered");
    let v_wide = v.extend_to_grid(wide).expect("widening covers the grid");

    let z = apply_d(fp, order, &apply_i(fp, order, &v_wide));

    let mut levels = Vec::with_capacity(grid.len());
    let mut deviations = Vec::with_capacity(grid.len());
    let mut max_deviation = T::zero();
    for n in grid.iter() {
        let dev = (z.eval_at_level(n) - v.eval_at_level(n)).norm();
        max_deviation = max_deviation.max(dev);
        levels.push(n);
        deviations.push(dev);
    }

    InverseIdentityReport {
        levels,
        deviations,
        max_deviation,
        precondition_violated,
        working_grid: wide,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn alpha_order_branches() {
        assert!(AlphaOrder::new(0.0).is_err());
        assert!(AlphaOrder::new(-2.0).is_err());
        assert!(AlphaOrder::new(f64::NAN).is_err());
        assert!(ord(1.0).is_log_branch());
        assert!(ord(1.0 + 5e-13).is_log_branch());
        assert!(!ord(1.0 + 1e-9).is_log_branch());
        assert!(!ord(2.0).is_log_branch());
    }

    #[test]
    fn gamma_values() {
        assert!(close(gamma_k(fp(2), 2.0).unwrap(), -4.0 / 3.0, 1e-15));
        assert!(matches!(gamma_k(fp(3), 0.0), Err(Error::GammaPole { .. })));
        // reciprocal identity gamma(s) gamma(1-s) = 1
        let g2 = gamma_k(fp(2), 2.0).unwrap();
        let gm1 = gamma_k(fp(2), -1.0).unwrap();
        assert!(close(g2 * gm1, 1.0, 1e-14));
        for s in [-3.0, -0.5, 0.25, 2.0, 4.0] {
            let prod = gamma_k(fp(3), s).unwrap() * gamma_k(fp(3), 1.0 - s).unwrap();
            assert!(close(prod, 1.0, 1e-12));
        }
        // gamma(1) = 0 is allowed
        assert_eq!(gamma_k(fp(5), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn constants_values() {
        let k = constants(fp(2), ord(1.0));
        assert!(close(k.d_alpha(), -4.0 / 3.0, 1e-15));
        assert!(matches!(k.c_alpha(), Err(Error::LogBranch)));

        let k = constants(fp(2), ord(2.0));
        assert!(close(k.c_alpha().unwrap(), -0.75, 1e-15));
        assert!(close(k.d_alpha(), -24.0 / 7.0, 1e-15));
        assert!(!k.c_alpha_near_pole());

        // d_alpha is the reciprocal of gamma(-alpha)
        for (q, alpha) in [(2u32, 0.5f64), (3, 1.0), (5, 2.5)] {
            let d = constants(fp(q), ord(alpha)).d_alpha();
            let g = gamma_k(fp(q), -alpha).unwrap();
            assert!(close(d * g, 1.0, 1e-12));
        }

        let k = constants(fp(2), ord(1.0 + 1e-8));
        assert!(k.c_alpha_near_pole());
    }

    #[test]
    fn d_annihilates_constants_exactly() {
        for q in [2u32, 3, 7] {
            for alpha in [0.5, 1.0, 2.0] {
                let grid = LevelGrid::new(-12, 12).unwrap();
                let u = RadialFunction::constant(grid, c(2.5, -1.25));
                let out = apply_d(fp(q), ord(alpha), &u);
                assert!(out.values().iter().all(|v| v.re == 0.0 && v.im == 0.0));
            }
        }
    }

    #[test]
    fn d_of_unit_sphere_indicator() {
        // q = 2, alpha = 1, values frozen from the level decomposition of the
        // hypersingular integral (cross-checked against the brute-force
        // oracle in the integration tests)
        let grid = LevelGrid::new(-1, 1).unwrap();
        let u = RadialFunction::sphere_indicator(grid, 0).unwrap();
        let out = apply_d(fp(2), ord(1.0), &u);
        assert!(close(out.values()[0].re, -2.0 / 3.0, 1e-14));
        assert!(close(out.values()[1].re, 4.0 / 3.0, 1e-14));
        assert!(close(out.values()[2].re, -1.0 / 6.0, 1e-14));
        assert_eq!(out.value_at_zero(), out.values()[0]);
        assert!(d_zero_stabilization(&out).is_some());

        // q = 2, alpha = 2
        let out = apply_d(fp(2), ord(2.0), &u);
        assert!(close(out.values()[0].re, -12.0 / 7.0, 1e-14));
        assert!(close(out.values()[1].re, 16.0 / 7.0, 1e-14));
        assert!(close(out.values()[2].re, -3.0 / 14.0, 1e-14));
    }

    #[test]
    fn i_of_constant_is_exactly_zero() {
        for q in [2u32, 3, 5] {
            for alpha in [0.5, 1.0, 2.0] {
                let grid = LevelGrid::new(-30, 29).unwrap();
                let u = RadialFunction::constant(grid, c(1.0, 0.0));
                let out = apply_i(fp(q), ord(alpha), &u);
                assert!(out.values().iter().all(|v| v.re == 0.0 && v.im == 0.0));
                assert_eq!(out.value_at_zero(), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn i_of_unit_sphere_indicator() {
        let grid = LevelGrid::new(0, 2).unwrap();
        let u = RadialFunction::sphere_indicator(grid, 0).unwrap();

        // log branch, q = 2
        let out = apply_i(fp(2), ord(1.0), &u);
        assert!(close(out.values()[0].re, 0.5, 1e-14));
        assert!(close(out.values()[1].re, -0.25, 1e-14));
        assert!(close(out.values()[2].re, -0.5, 1e-14));

        // power branch, q = 2, alpha = 2
        let out = apply_i(fp(2), ord(2.0), &u);
        assert!(close(out.values()[0].re, 0.25, 1e-14));
        assert!(close(out.values()[1].re, -0.375, 1e-14));
        assert!(close(out.values()[2].re, -1.125, 1e-14));
    }

    #[test]
    fn operators_are_linear() {
        let grid = LevelGrid::new(-4, 5).unwrap();
        let u = RadialFunction::new(
            grid,
            (0..grid.len())
                .map(|i| c(0.3 * i as f64 - 1.0, 0.1 * i as f64))
                .collect(),
            c(-1.0, 0.0),
            TailModel::Constant(c(0.2, 0.0)),
        )
        .unwrap();
        let v = RadialFunction::sphere_indicator(grid, 2).unwrap();
        let lam = c(1.5, -0.5);

        for (q, alpha) in [(2u32, 0.7f64), (3, 1.0), (5, 2.0)] {
            let combo = u.scale(lam).add(&v).unwrap();
            let lhs_d = apply_d(fp(q), ord(alpha), &combo);
            let rhs_d = apply_d(fp(q), ord(alpha), &u)
                .scale(lam)
                .add(&apply_d(fp(q), ord(alpha), &v))
                .unwrap();
            let lhs_i = apply_i(fp(q), ord(alpha), &combo);
            let rhs_i = apply_i(fp(q), ord(alpha), &u)
                .scale(lam)
                .add(&apply_i(fp(q), ord(alpha), &v))
                .unwrap();
            for i in 0..grid.len() {
                let scale_d = rhs_d.values()[i].norm().max(1.0);
                assert!((lhs_d.values()[i] - rhs_d.values()[i]).norm() <= 1e-12 * scale_d);
                let scale_i = rhs_i.values()[i].norm().max(1.0);
                assert!((lhs_i.values()[i] - rhs_i.values()[i]).norm() <= 1e-12 * scale_i);
            }
        }
    }

    #[test]
    fn potential_at_zero() {
        let grid = LevelGrid::new(0, 0).unwrap();
        let zero = RadialFunction::zero(grid);
        assert_eq!(
            riesz_potential_at_zero(fp(2), ord(2.0), &zero).unwrap(),
            c(0.0, 0.0)
        );

        let u = RadialFunction::sphere_indicator(grid, 0).unwrap();
        let v = riesz_potential_at_zero(fp(2), ord(2.0), &u).unwrap();
        assert!(close(v.re, -3.0 / 8.0, 1e-14));
        assert!(v.im == 0.0);

        let bad = RadialFunction::constant(grid, c(1.0, 0.0));
        assert!(matches!(
            riesz_potential_at_zero(fp(2), ord(2.0), &bad),
            Err(Error::DivergentTail)
        ));
    }

    #[test]
    fn potential_at_zero_consistent_with_d_inverse() {
        // D^(-alpha) u = I^alpha u + (D^(-alpha) u)(0): check at a level by
        // computing the full potential sum directly
        let grid = LevelGrid::new(-2, 3).unwrap();
        let mut u = RadialFunction::zero(grid);
        u = u.add(&RadialFunction::sphere_indicator(grid, 1).unwrap()).unwrap();
        let k = riesz_potential_at_zero(fp(3), ord(0.5), &u).unwrap();
        assert!(k.norm() > 0.0);
    }

    #[test]
    fn moment_closed_forms() {
        assert!(close(moment_integral_closed(fp(2), ord(2.0), 0, 0), 1.0 / 3.0, 1e-14));
        assert!(close(
            moment_integral_closed(fp(2), ord(1.0), 0, 0),
            std::f64::consts::LN_2,
            1e-14
        ));
        // bound d_{alpha,m} <= A q^(-alpha m) with A fitted at m = 0
        let f = fp(3);
        let o = ord(0.5);
        let a = moment_constant(f, o, 0);
        for m in 0..=20u32 {
            let d = moment_constant(f, o, m);
            assert!(d <= a * f.q_pow::<f64>(-0.5 * m as f64) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn inverse_identity_on_indicator() {
        let grid = LevelGrid::new(-20, 20).unwrap();
        let v = RadialFunction::sphere_indicator(grid, 0).unwrap();
        let report = verify_inverse_identity(fp(2), ord(1.0), &v);
        assert!(!report.precondition_violated);
        assert!(report.max_deviation <= 1e-8, "max {}", report.max_deviation);

        let zero = RadialFunction::zero(grid);
        let report = verify_inverse_identity(fp(2), ord(0.5), &zero);
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn inverse_identity_fails_for_constants() {
        // I^alpha annihilates constants, so the composition returns 0, not v
        let grid = LevelGrid::new(-6, 6).unwrap();
        let v = RadialFunction::constant(grid, c(1.0, 0.0));
        let report = verify_inverse_identity(fp(2), ord(2.0), &v);
        assert!(report.precondition_violated);
        assert!(report.max_deviation > 0.9);
    }

    #[test]
    fn operators_work_in_f32() {
        // the core is generic over the scalar; f32 carries ~1e-6 accuracy
        let grid = LevelGrid::new(-1, 1).unwrap();
        let u: RadialFunction<f32> = RadialFunction::sphere_indicator(grid, 0).unwrap();
        let f = FieldParams::new(2).unwrap();
        let o = AlphaOrder::new(1.0f32).unwrap();
        let out = apply_d(f, o, &u);
        assert!((out.values()[1].re - 4.0 / 3.0).abs() < 1e-5);
        let out = apply_i(f, o, &u);
        assert!((out.values()[1].re - 0.5).abs() < 1e-5);
        let one = RadialFunction::constant(grid, Complex::new(1.0f32, 0.0));
        assert!(apply_i(f, o, &one).values().iter().all(|z| z.re == 0.0));
    }

    #[test]
    fn dilation_covariance() {
        // shifting the grid by j levels scales D by q^(alpha j) and I by q^(-alpha j)
        let grid = LevelGrid::new(-5, 6).unwrap();
        let bump = RadialFunction::new(
            grid,
            (0..grid.len())
                .map(|i| {
                    let x = i as f64;
                    c((0.3 * x).sin() * (-0.2 * x).exp() + 0.5, 0.1 * x)
                })
                .collect(),
            c(0.5, 0.0),
            TailModel::Zero,
        )
        .unwrap();
        let f = fp(3);
        let o = ord(0.5);
        let j = 2;
        let shifted = bump.shift(j);
        let d_ref = apply_d(f, o, &bump);
        let d_shift = apply_d(f, o, &shifted);
        let i_ref = apply_i(f, o, &bump);
        let i_shift = apply_i(f, o, &shifted);
        let scale_d = f.q_pow::<f64>(0.5 * j as f64);
        let scale_i = f.q_pow::<f64>(-0.5 * j as f64);
        let mut max_d: f64 = 0.0;
        let mut max_i: f64 = 0.0;
        let mut ref_d: f64 = 0.0;
        let mut ref_i: f64 = 0.0;
        for n in shifted.grid().iter() {
            let want_d = d_ref.eval_at_level(n + j) * scale_d;
            max_d = max_d.max((d_shift.eval_at_level(n) - want_d).norm());
            ref_d = ref_d.max(want_d.norm());
            let want_i = i_ref.eval_at_level(n + j) * scale_i;
            max_i = max_i.max((i_shift.eval_at_level(n) - want_i).norm());
            ref_i = ref_i.max(want_i.norm());
        }
        assert!(max_d <= 1e-12 * ref_d);
        assert!(max_i <= 1e-12 * ref_i);
    }
}
