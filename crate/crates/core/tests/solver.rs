//! Solver-level behavior: linearity, boundedness, inhomogeneous initial
//! values, and error paths not covered by the acceptance criteria.

mod common;

use common::c;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrafrac::cauchy::{solve_direct, solve_picard, CauchyProblem};
use ultrafrac::radial::{Level, LevelGrid, RadialFunction, TailModel};
use ultrafrac::riesz::AlphaOrder;
use ultrafrac::{Error, FieldParams};

fn fp(q: u32) -> FieldParams {
    FieldParams::new(q).unwrap()
}

fn ord(alpha: f64) -> AlphaOrder<f64> {
    AlphaOrder::new(alpha).unwrap()
}

fn supported(
    rng: &mut ChaCha8Rng,
    grid: LevelGrid,
    lo: Level,
    hi: Level,
    decay: f64,
    q: u32,
) -> RadialFunction<f64> {
    let f = fp(q);
    let vals = grid
        .iter()
        .map(|n| {
            if n >= lo && n <= hi {
                let mag = rng.gen_range(0.2..1.0) * f.q_pow::<f64>(-(n as f64) * decay).min(1.0);
                c(mag * rng.gen_range(-1.0f64..1.0).signum(), rng.gen_range(-0.3..0.3))
            } else {
                c(0.0, 0.0)
            }
        })
        .collect();
    RadialFunction::new(grid, vals, c(0.0, 0.0), TailModel::Zero).unwrap()
}

fn problem(q: u32, alpha: f64, seed: u64, u0: common::C64) -> CauchyProblem<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = (44.0 / alpha.min(1.0)).ceil() as Level + 6;
    let grid = LevelGrid::new(-6 - margin, 6 + margin).unwrap();
    let a = supported(&mut rng, grid, -6, 1, alpha + 0.5, q);
    let f = supported(&mut rng, grid, -6, 6, 0.5, q);
    CauchyProblem::new(fp(q), ord(alpha), a, f, u0).unwrap()
}

#[test]
fn solution_is_linear_in_f() {
    let p1 = problem(2, 1.0, 71, c(0.0, 0.0));
    let p2 = problem(2, 1.0, 72, c(0.0, 0.0));
    let summed = CauchyProblem::new(
        p1.fp,
        p1.order,
        p1.a.clone(),
        p1.f.add(&p2.f).unwrap(),
        c(0.0, 0.0),
    )
    .unwrap();
    let r1 = solve_direct(&CauchyProblem::new(p1.fp, p1.order, p1.a.clone(), p1.f.clone(), c(0.0, 0.0)).unwrap()).unwrap();
    let r2 = solve_direct(&CauchyProblem::new(p1.fp, p1.order, p1.a.clone(), p2.f.clone(), c(0.0, 0.0)).unwrap()).unwrap();
    let rs = solve_direct(&summed).unwrap();
    let scale = rs
        .v
        .values()
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    for i in 0..summed.grid().len() {
        let want = r1.v.values()[i] + r2.v.values()[i];
        assert!((rs.v.values()[i] - want).norm() <= 1e-12 * scale);
        let want_u = r1.u.values()[i] + r2.u.values()[i];
        assert!((rs.u.values()[i] - want_u).norm() <= 1e-12 * scale);
    }
}

#[test]
fn running_sup_of_v_stabilizes() {
    // mirrors the V_m argument: under the decay hypothesis the running sup
    // of |v| over levels becomes constant from some level on
    for (q, alpha, seed) in [(2u32, 1.0f64, 81u64), (3, 0.5, 82), (2, 2.0, 83)] {
        let p = problem(q, alpha, seed, c(0.0, 0.0));
        let rep = solve_direct(&p).unwrap();
        let mut running = 0.0f64;
        let sups: Vec<f64> = rep
            .v
            .values()
            .iter()
            .map(|z| {
                running = running.max(z.norm());
                running
            })
            .collect();
        let last = *sups.last().unwrap();
        let tail_len = 20.min(sups.len() / 2);
        for s in &sups[sups.len() - tail_len..] {
            assert_eq!(*s, last, "running sup still moving near the top");
        }
        assert!(last > 0.0);
    }
}

#[test]
fn inhomogeneous_initial_value_strong_solution() {
    let u0 = c(0.5, -0.25);
    for (q, alpha, seed) in [(2u32, 1.0f64, 91u64), (3, 2.0, 92), (2, 0.5, 93)] {
        let p = problem(q, alpha, seed, u0);
        let rep = solve_direct(&p).unwrap();
        assert_eq!(rep.u.value_at_zero(), u0);
        assert_eq!(rep.v.value_at_zero(), p.v_at_zero());
        assert!(
            rep.residual_max <= 1e-8,
            "q={q} alpha={alpha}: residual {}",
            rep.residual_max
        );
        // Picard agrees here too
        let pic = solve_picard(&p, p.grid().len() + 16, 0.0).unwrap();
        let gap = rep
            .v
            .values()
            .iter()
            .zip(pic.v.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(gap <= 1e-10);
    }
}

#[test]
fn picard_diff_norms_shrink() {
    let p = problem(2, 2.0, 101, c(0.0, 0.0));
    let rep = solve_picard(&p, p.grid().len() + 16, 0.0).unwrap();
    let norms = rep.picard.unwrap().diff_norms;
    assert!(norms.len() >= 3);
    // strictly decreasing once past the first step, down to exact zero
    let peak = norms.iter().copied().fold(0.0f64, f64::max);
    for w in norms.windows(2) {
        if w[0] > peak * 1e-14 && w[1] > 0.0 {
            assert!(w[1] < w[0], "norms not shrinking: {w:?}");
        }
    }
    assert_eq!(*norms.last().unwrap(), 0.0);
}

#[test]
fn picard_reports_no_convergence_when_budget_exhausted() {
    let p = problem(2, 1.0, 111, c(0.0, 0.0));
    // unreachable tolerance and a tiny budget
    match solve_picard(&p, 2, -1.0) {
        Err(Error::NoConvergence { iterations: 2, .. }) => {}
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}

#[test]
fn head_truncation_estimate_reported() {
    let p = problem(3, 1.0, 121, c(0.0, 0.0));
    let rep = solve_direct(&p).unwrap();
    // v is exactly v0 = 0 near the bottom of this compactly supported
    // problem, so the committed head error is zero
    assert_eq!(rep.head_truncation_estimate, 0.0);

    // a problem whose data reach the bottom edge commits a nonzero estimate
    let grid = LevelGrid::new(-8, 30).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(122);
    let a = supported(&mut rng, grid, -8, 0, 1.5, 2);
    let f_vals = grid
        .iter()
        .map(|n| c(1.0 / (1.0 + (n as f64 + 8.0).powi(2)), 0.2))
        .collect();
    let f = RadialFunction::new(grid, f_vals, c(1.0 / (1.0 + 0.0), 0.2), TailModel::Zero).unwrap();
    let p = CauchyProblem::new(fp(2), ord(1.0), a, f, c(0.0, 0.0)).unwrap();
    let rep = solve_direct(&p).unwrap();
    assert!(rep.head_truncation_estimate > 0.0);
}
