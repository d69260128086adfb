//! Brute-force reference implementations of the operators, independent of
//! the prefix-sum evaluation path: plain truncated summation of the sphere
//! decomposition, term by term, through `eval_at_level`.
#![allow(dead_code)] // each test target uses a subset

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ultrafrac::radial::{Level, LevelGrid, RadialFunction, TailModel};
use ultrafrac::riesz::AlphaOrder;
use ultrafrac::FieldParams;

pub type C64 = Complex<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Summation depth giving a relative truncation error below ~1e-13 for the
/// geometric level sums of order `alpha` over residue cardinality `q`.
pub fn oracle_depth(q: u32, alpha: f64) -> Level {
    let rate = alpha.min(1.0) * (q as f64).log2();
    (60.0 / rate).ceil() as Level + 8
}

/// `D^alpha u` at one level by truncated summation of
/// `d_alpha (1-1/q) [ q^(-(alpha+1)n) Σ_{k<n} q^k (u(q^k) - u(q^n))
///                  + Σ_{l>n} q^(-alpha l) (u(q^l) - u(q^n)) ]`.
pub fn oracle_apply_d(
    fp: FieldParams,
    order: AlphaOrder<f64>,
    u: &RadialFunction<f64>,
    n: Level,
) -> C64 {
    let q = fp.qt::<f64>();
    let alpha = order.alpha();
    let d_alpha = (1.0 - fp.q_pow::<f64>(alpha)) / (1.0 - fp.q_pow::<f64>(-alpha - 1.0));
    let depth = oracle_depth(fp.q(), alpha);
    let u_n = u.eval_at_level(n);

    let mut lower = c(0.0, 0.0);
    for k in (n - depth)..n {
        lower += (u.eval_at_level(k) - u_n) * fp.q_powi::<f64>(k);
    }
    let mut upper = c(0.0, 0.0);
    for l in (n + 1)..=(n + depth) {
        upper += (u.eval_at_level(l) - u_n) * fp.q_pow::<f64>(-alpha * l as f64);
    }
    (lower * fp.q_pow::<f64>(-(alpha + 1.0) * n as f64) + upper) * (d_alpha * (1.0 - 1.0 / q))
}

/// `I^alpha u` at one level by truncated summation of the kernel integral
/// over the spheres below `n`.
pub fn oracle_apply_i(
    fp: FieldParams,
    order: AlphaOrder<f64>,
    u: &RadialFunction<f64>,
    n: Level,
) -> C64 {
    let q = fp.qt::<f64>();
    let alpha = order.alpha();
    let depth = oracle_depth(fp.q(), alpha);
    let u_n = u.eval_at_level(n);

    if !order.is_log_branch() {
        let c_alpha =
            (1.0 - fp.q_pow::<f64>(-alpha)) / (1.0 - fp.q_pow::<f64>(alpha - 1.0));
        let mut inner = c(0.0, 0.0);
        for k in (n - depth)..n {
            let weight = (1.0 - 1.0 / q)
                * fp.q_powi::<f64>(k)
                * (fp.q_pow::<f64>((alpha - 1.0) * n as f64)
                    - fp.q_pow::<f64>((alpha - 1.0) * k as f64));
            inner += u.eval_at_level(k) * weight;
        }
        u_n * fp.q_pow::<f64>(alpha * (n as f64 - 1.0)) + inner * c_alpha
    } else {
        let lnq = fp.log_q::<f64>();
        let front = (1.0 - q) / (q * lnq);
        let mut inner = c(0.0, 0.0);
        for k in (n - depth)..n {
            let weight = (1.0 - 1.0 / q) * fp.q_powi::<f64>(k) * ((n - k) as f64 * lnq);
            inner += u.eval_at_level(k) * weight;
        }
        u_n * fp.q_powi::<f64>(n - 1) + inner * front
    }
}

/// Whole-space Riesz potential at the origin by truncated summation.
pub fn oracle_potential_at_zero(
    fp: FieldParams,
    order: AlphaOrder<f64>,
    u: &RadialFunction<f64>,
) -> C64 {
    let q = fp.qt::<f64>();
    let alpha = order.alpha();
    let depth = oracle_depth(fp.q(), alpha);
    let lo = u.grid().n_min() - depth;
    let hi = u.grid().n_max(); // zero tail assumed
    if !order.is_log_branch() {
        let c_alpha =
            (1.0 - fp.q_pow::<f64>(-alpha)) / (1.0 - fp.q_pow::<f64>(alpha - 1.0));
        let mut sum = c(0.0, 0.0);
        for k in lo..=hi {
            sum += u.eval_at_level(k)
                * ((1.0 - 1.0 / q) * fp.q_pow::<f64>(alpha * k as f64));
        }
        sum * c_alpha
    } else {
        let lnq = fp.log_q::<f64>();
        let front = (1.0 - q) / (q * lnq);
        let mut sum = c(0.0, 0.0);
        for k in lo..=hi {
            sum += u.eval_at_level(k)
                * ((1.0 - 1.0 / q) * fp.q_powi::<f64>(k) * (k as f64 * lnq));
        }
        sum * front
    }
}

/// Random radial function with a nonzero head constant and the given tail.
pub fn random_function(
    rng: &mut ChaCha8Rng,
    grid: LevelGrid,
    tail: TailModel<f64>,
) -> RadialFunction<f64> {
    let head = c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
    let mut values: Vec<C64> = (0..grid.len())
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    // keep the model story consistent: approach the head value at the bottom
    // and the tail value at the top of the window
    let len = values.len();
    values[0] = head;
    if let TailModel::Constant(t) = tail {
        values[len - 1] = t;
    }
    RadialFunction::new(grid, values, head, tail).unwrap()
}
