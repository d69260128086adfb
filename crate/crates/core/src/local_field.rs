//! Field parameters and closed-form integrals over balls, spheres and digit
//! sectors, together with the sphere-decomposition quadrature that serves as
//! the independent reference for every closed form.
//!
//! The underlying field never appears as a data structure: all integrals of
//! radial integrands reduce to weighted geometric sums over the levels
//! `|x| = q^n`, and `q` is the only parameter that survives.

use crate::error::{Error, Result};
use crate::radial::Level;
use crate::scalar::{Scalar, C};

/// Relative cutoff for adaptively truncated level sums.
const ORACLE_RELATIVE_CUTOFF: f64 = 1e-16;
/// Minimum number of terms an adaptive level sum always takes.
const ORACLE_MIN_TERMS: usize = 200;
/// Safety cap on adaptive level sums.
const ORACLE_MAX_TERMS: usize = 200_000;

/// Parameters of the local field: the residue-field cardinality `q`.
///
/// The normalized absolute value takes the values `q^n`, `n` an integer, and
/// every formula below depends on the field through `q` alone. Any integer
/// `q >= 2` is accepted; nothing here requires a prime power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldParams {
    q: u32,
}

impl FieldParams {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidQ { q });
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `q` as a scalar.
    pub fn qt<T: Scalar>(&self) -> T {
        T::from_u32(self.q).expect("q converts to scalar")
    }

    /// `q^n` for an integer level.
    pub fn q_powi<T: Scalar>(&self, n: Level) -> T {
        self.qt::<T>().powi(n)
    }

    /// `q^e` for a real exponent.
    pub fn q_pow<T: Scalar>(&self, e: T) -> T {
        self.qt::<T>().powf(e)
    }

    /// Natural logarithm of `q`.
    pub fn log_q<T: Scalar>(&self) -> T {
        self.qt::<T>().ln()
    }

    /// Measure of the ball `|x| <= q^n`, equal to `q^n`.
    pub fn ball_volume<T: Scalar>(&self, n: Level) -> T {
        self.q_powi(n)
    }

    /// Measure of the sphere `|x| = q^n`, equal to `(1 - 1/q) q^n`.
    pub fn sphere_volume<T: Scalar>(&self, n: Level) -> T {
        (T::one() - self.qt::<T>().recip()) * self.q_powi::<T>(n)
    }

    /// Measure of the sector `{|x| = q^n, x_0 = k_0}` for a fixed nonzero
    /// leading digit, equal to `q^(n-1)`.
    pub fn sector_volume_fixed_digit<T: Scalar>(&self, n: Level) -> T {
        self.q_powi(n - 1)
    }

    /// Measure of `{|x| = q^n, x_0 != k_0}`, equal to `(1 - 2/q) q^n`.
    pub fn sector_volume_excluded_digit<T: Scalar>(&self, n: Level) -> T {
        let q = self.qt::<T>();
        (T::one() - T::cst(2.0) / q) * self.q_powi::<T>(n)
    }

    /// `∫_{|x| <= q^n} |x|^(alpha-1) dx = (1 - q^-1)/(1 - q^-alpha) · q^(alpha n)`.
    pub fn ball_integral_power<T: Scalar>(&self, alpha: T, n: Level) -> Result<T> {
        self.require_positive_alpha(alpha)?;
        let q = self.qt::<T>();
        let num = T::one() - q.recip();
        let den = T::one() - self.q_pow(-alpha);
        Ok(num / den * self.q_pow(alpha * T::from_level(n)))
    }

    /// `∫_{|x| = q^n} |x - a|^(alpha-1) dx` for a shift point on the same
    /// sphere (`|a| = q^n`): `(q - 2 + q^-alpha) / (q (1 - q^-alpha)) · q^(alpha n)`.
    pub fn sphere_integral_shifted_power<T: Scalar>(&self, alpha: T, n: Level) -> Result<T> {
        self.require_positive_alpha(alpha)?;
        let q = self.qt::<T>();
        let num = q - T::cst(2.0) + self.q_pow(-alpha);
        let den = q * (T::one() - self.q_pow(-alpha));
        Ok(num / den * self.q_pow(alpha * T::from_level(n)))
    }

    /// `∫_{|x| <= q^n} log|x| dx = (n - 1/(q-1)) q^n log q` (natural log).
    pub fn ball_integral_log<T: Scalar>(&self, n: Level) -> T {
        let q = self.qt::<T>();
        (T::from_level(n) - (q - T::one()).recip()) * self.q_powi::<T>(n) * self.log_q::<T>()
    }

    /// `∫_{|x| = q^n} log|x - a| dx` for `|a| = q^n`:
    /// `[(1 - 1/q) n log q - log q/(q-1)] q^n`.
    pub fn sphere_integral_shifted_log<T: Scalar>(&self, n: Level) -> T {
        let q = self.qt::<T>();
        let log_q = self.log_q::<T>();
        let bracket =
            (T::one() - q.recip()) * T::from_level(n) * log_q - log_q / (q - T::one());
        bracket * self.q_powi::<T>(n)
    }

    fn require_positive_alpha<T: Scalar>(&self, alpha: T) -> Result<()> {
        if alpha <= T::zero() || !alpha.is_finite() {
            return Err(Error::InvalidAlpha {
                alpha: alpha.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Sphere-decomposition quadrature over a shell of levels:
/// `Σ_{k=n_low}^{n_high} (1 - 1/q) q^k · weights(k)`.
///
/// This is the reference against which every closed form in this module is
/// checked; it never uses any of the closed forms itself.
pub fn oracle_radial_sum<T, F>(fp: FieldParams, mut weights: F, n_low: Level, n_high: Level) -> C<T>
where
    T: Scalar,
    F: FnMut(Level) -> C<T>,
{
    let mut sum = C::new(T::zero(), T::zero());
    for k in n_low..=n_high {
        sum = sum + weights(k) * fp.sphere_volume::<T>(k);
    }
    sum
}

/// Adaptive ball quadrature `Σ_{k <= n_high} (1 - 1/q) q^k · weights(k)`,
/// truncated downward once the next term falls below `1e-16` of the running
/// sum, after a hard floor of 200 terms.
pub fn oracle_ball_sum_adaptive<T, F>(fp: FieldParams, mut weights: F, n_high: Level) -> C<T>
where
    T: Scalar,
    F: FnMut(Level) -> C<T>,
{
    let cutoff = T::cst(ORACLE_RELATIVE_CUTOFF);
    let mut sum = C::new(T::zero(), T::zero());
    let mut k = n_high;
    for taken in 0..ORACLE_MAX_TERMS {
        let term = weights(k) * fp.sphere_volume::<T>(k);
        let next = sum + term;
        if taken >= ORACLE_MIN_TERMS && term.norm() < cutoff * next.norm() {
            return next;
        }
        sum = next;
        k -= 1;
    }
    sum
}

/// Adaptive upper-tail quadrature `Σ_{l >= n_low} weights(l)` with the plain
/// (unweighted) terms supplied by the caller; same truncation rule as
/// [`oracle_ball_sum_adaptive`]. Used for the hypersingular upper sums whose
/// weights already include the `q^(-alpha l)` decay.
pub fn oracle_tail_sum_adaptive<T, F>(mut terms: F, n_low: Level) -> C<T>
where
    T: Scalar,
    F: FnMut(Level) -> C<T>,
{
    let cutoff = T::cst(ORACLE_RELATIVE_CUTOFF);
    let mut sum = C::new(T::zero(), T::zero());
    for (taken, l) in (n_low..).enumerate().take(ORACLE_MAX_TERMS) {
        let term = terms(l);
        let next = sum + term;
        if taken >= ORACLE_MIN_TERMS && term.norm() < cutoff * next.norm() {
            return next;
        }
        sum = next;
    }
    sum
}
