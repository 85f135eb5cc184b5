//! Named verification checks, one per acceptance-level claim, aggregating
//! every closed-form-vs-oracle comparison the library supports.
//!
//! Each check is self-contained and deterministic; the CLI `verify`
//! subcommand runs all of them and reports one line per check.

use crate::dynamics::{
    evolve, inversion_excited, inversion_ground, propagator, rabi_frequency, JointState,
    ModelParams,
};
use crate::husimi::{grid, integrate, q_field, Window};
use crate::lineshape::{
    avg_inversion_excited, avg_inversion_ground, optimize_r, time_average_numeric, OptimizeFlag,
    OptimizeOutcome, Prep,
};
use crate::oracle::{build_state_matrix, husimi_numeric, ode_evolve};
use crate::states::{
    amplitudes, auto_truncation, mandel_q, mandel_q_crossing, photon_dist, FieldKind, FieldSpec,
    DEFAULT_TOL,
};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// Outcome of one named verification check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn run_check(name: &'static str, body: impl FnOnce() -> (bool, String)) -> CheckReport {
    let start = Instant::now();
    let (passed, detail) = body();
    CheckReport {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

/// Guard modes above auto_truncation for oracle state construction; the
/// truncated unitaries fold interior error back at roughly 2.4x per ten
/// modes, and this margin pushes it below 1e−8.
const ORACLE_MARGIN: usize = 80;

fn single(alpha: f64, r: f64) -> FieldSpec {
    FieldSpec::new(C64::new(alpha, 0.0), r, FieldKind::Single).unwrap()
}

fn optimize_single() -> crate::Result<OptimizeOutcome> {
    let p = ModelParams::new(0.0, 0.5, 1.0)?;
    optimize_r(
        C64::new(3.5, 0.0),
        FieldKind::Single,
        Prep::Excited,
        &p,
        0.2,
        1.3,
    )
}

fn optimize_plus() -> crate::Result<OptimizeOutcome> {
    let p = ModelParams::new(0.0, 0.5, 1.0)?;
    optimize_r(
        C64::new(3.5, 0.0),
        FieldKind::SuperpositionPlus,
        Prep::Excited,
        &p,
        0.05,
        0.8,
    )
}

fn check_optimal_r_single(outcome: &crate::Result<OptimizeOutcome>) -> (bool, String) {
    match outcome {
        Ok(o) => {
            let ok = (o.r_star - 0.758).abs() <= 0.01 && matches!(o.flag, OptimizeFlag::Converged);
            (
                ok,
                format!(
                    "r* = {:.6} (target 0.758 +- 0.01), delta* = {:.3}, flag {:?}",
                    o.r_star, o.delta_star, o.flag
                ),
            )
        }
        Err(e) => (false, format!("optimizer failed: {e}")),
    }
}

fn check_optimal_r_plus(outcome: &crate::Result<OptimizeOutcome>) -> (bool, String) {
    match outcome {
        Ok(o) => {
            let ok = (o.r_star - 0.308).abs() <= 0.01 && matches!(o.flag, OptimizeFlag::Converged);
            (
                ok,
                format!(
                    "r* = {:.6} (target 0.308 +- 0.01), delta* = {:.3}, flag {:?}",
                    o.r_star, o.delta_star, o.flag
                ),
            )
        }
        Err(e) => (false, format!("optimizer failed: {e}")),
    }
}

fn check_depths(
    single_outcome: &crate::Result<OptimizeOutcome>,
    plus_outcome: &crate::Result<OptimizeOutcome>,
) -> (bool, String) {
    match (single_outcome, plus_outcome) {
        (Ok(s), Ok(p)) => {
            let ok = (s.depth - 0.9304).abs() <= 0.02 && (p.depth - 0.8478).abs() <= 0.02;
            (
                ok,
                format!(
                    "depth(single) = {:.6} (target 0.9304), depth(plus) = {:.6} (target 0.8478), \
                     definition: 1 - min over detuning of the excited average",
                    s.depth, p.depth
                ),
            )
        }
        _ => (false, "optimizer failed upstream".into()),
    }
}

fn check_mandel_transition() -> (bool, String) {
    let q_at = |r: f64| mandel_q(&photon_dist(&single(3.5, r), DEFAULT_TOL).unwrap()).unwrap();
    let q_lo = q_at(1.0);
    let q_hi = q_at(1.5);
    match mandel_q_crossing(C64::new(3.5, 0.0), 1.0, 1.5, 1e-3) {
        Ok(crossing) => {
            let ok = q_lo < 0.0 && q_hi > 0.0;
            (
                ok,
                format!(
                    "Q(1.0) = {q_lo:.4} < 0 < Q(1.5) = {q_hi:.4}; sign change at r = {crossing:.4} \
                     (measured location for alpha = 3.5)"
                ),
            )
        }
        Err(e) => (false, format!("no sub-to-super transition found: {e}")),
    }
}

fn check_dynamics_vs_ode() -> (bool, String) {
    let spec = single(3.5, 1.5);
    let dist = photon_dist(&spec, DEFAULT_TOL).unwrap();
    let amps = amplitudes(spec.alpha, spec.r, dist.truncation).unwrap();
    let t_grid: Vec<f64> = (0..=25).map(|k| k as f64).collect();
    let mut worst = 0.0f64;

    for chi in [0.0, 0.5] {
        let p = ModelParams::new(1.0, chi, 1.0).unwrap();
        let zeros = vec![C64::new(0.0, 0.0); amps.len()];
        let traj = match ode_evolve(&amps, &zeros, &p, &t_grid) {
            Ok(t) => t,
            Err(e) => return (false, format!("ode failed: {e}")),
        };
        for (j, &t) in t_grid.iter().enumerate() {
            let w_ode: f64 = traj.c[j].iter().map(|z| z.norm_sqr()).sum::<f64>()
                - traj.d[j].iter().map(|z| z.norm_sqr()).sum::<f64>();
            worst = worst.max((inversion_excited(&dist, t, &p) - w_ode).abs());
        }

        let d0: Vec<C64> = amps[1..].to_vec();
        let zeros = vec![C64::new(0.0, 0.0); d0.len()];
        let traj = match ode_evolve(&zeros, &d0, &p, &t_grid) {
            Ok(t) => t,
            Err(e) => return (false, format!("ode failed: {e}")),
        };
        for (j, &t) in t_grid.iter().enumerate() {
            let w_ode: f64 = traj.c[j].iter().map(|z| z.norm_sqr()).sum::<f64>()
                - traj.d[j].iter().map(|z| z.norm_sqr()).sum::<f64>();
            worst = worst.max((inversion_ground(&dist, t, &p) - w_ode).abs());
        }
    }
    (
        worst <= 1e-6,
        format!("max |closed - ode| = {worst:.3e} over t in [0, 25], chi in {{0, 0.5}}, both preparations"),
    )
}

fn check_lineshape_vs_riemann() -> (bool, String) {
    let spec = single(3.5, 1.5);
    let dist = photon_dist(&spec, DEFAULT_TOL).unwrap();
    let mut worst = 0.0f64;
    for k in 0..17 {
        let delta = -30.0 + 2.5 * k as f64;
        let p = ModelParams::new(delta, 0.5, 1.0).unwrap();
        let closed = avg_inversion_excited(&dist, &p);
        let beta_max = rabi_frequency(0, &p).max(rabi_frequency(dist.truncation, &p));
        let dt = 0.99 * std::f64::consts::PI / (10.0 * beta_max);
        let numeric = match time_average_numeric(&spec, Prep::Excited, &p, 2000.0, dt) {
            Ok(v) => v,
            Err(e) => return (false, format!("riemann average failed at delta = {delta}: {e}")),
        };
        worst = worst.max((closed - numeric).abs());
    }
    (
        worst <= 2e-3,
        format!("max |closed - riemann| = {worst:.3e} over 17 detunings in [-30, 10], T = 2000"),
    )
}

fn check_amplitude_oracle_grid() -> (bool, String) {
    let mut worst = 0.0f64;
    for &a in &[0.0, 1.0, 3.5] {
        let n_plus = auto_truncation(&single(a, 1.5), DEFAULT_TOL).unwrap();
        let n_minus = auto_truncation(&single(a, -1.5), DEFAULT_TOL).unwrap();
        let dim_15 = n_plus.max(n_minus) + ORACLE_MARGIN;
        for &r in &[-1.5, -0.5, 0.3, 1.5] {
            let n_max = auto_truncation(&single(a, r), DEFAULT_TOL).unwrap();
            let dim = if r.abs() == 1.5 {
                dim_15
            } else {
                n_max + ORACLE_MARGIN
            };
            let closed = amplitudes(C64::new(a, 0.0), r, n_max).unwrap();
            let numeric = match build_state_matrix(C64::new(a, 0.0), r, dim) {
                Ok(v) => v,
                Err(e) => return (false, format!("oracle failed at ({a}, {r}): {e}")),
            };
            for n in 0..=n_max {
                worst = worst.max((closed[n] - numeric[n]).norm());
            }
        }
    }
    (
        worst <= 1e-8,
        format!("max |closed - matrix| = {worst:.3e} over the 12-point (alpha, r) grid"),
    )
}

fn check_husimi_vs_numeric() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a51_0001);
    let n_plus = auto_truncation(&single(3.5, 1.5), DEFAULT_TOL).unwrap();
    let n_minus = auto_truncation(&single(3.5, -1.5), DEFAULT_TOL).unwrap();
    let dim = n_plus.max(n_minus) + ORACLE_MARGIN;

    let panels = [
        FieldSpec::new(C64::new(3.5, 0.0), 1.5, FieldKind::Single).unwrap(),
        FieldSpec::new(C64::new(3.5, 0.0), -1.5, FieldKind::Single).unwrap(),
        FieldSpec::new(C64::new(3.5, 0.0), 1.5, FieldKind::SuperpositionPlus).unwrap(),
        FieldSpec::new(C64::new(3.5, 0.0), 1.5, FieldKind::SuperpositionMinus).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut worst_integral = 0.0f64;
    for s in &panels {
        let state = match s.kind {
            FieldKind::Single => build_state_matrix(s.alpha, s.r, dim).unwrap(),
            _ => {
                let v_pos = build_state_matrix(s.alpha, s.r, dim).unwrap();
                let v_neg = build_state_matrix(s.alpha, -s.r, dim).unwrap();
                let sign = if s.kind == FieldKind::SuperpositionPlus {
                    1.0
                } else {
                    -1.0
                };
                let w: Vec<C64> = v_pos
                    .iter()
                    .zip(&v_neg)
                    .map(|(p, m)| p + sign * m)
                    .collect();
                let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                w.into_iter().map(|z| z / norm).collect()
            }
        };
        let w = Window::default_for(s);
        for _ in 0..100 {
            let beta = C64::new(
                rng.gen_range(w.re_lo..w.re_hi),
                rng.gen_range(w.im_lo..w.im_hi),
            );
            let closed = q_field(beta, s).unwrap();
            let numeric = husimi_numeric(&state, beta).unwrap();
            worst = worst.max((closed - numeric).abs());
        }
        let g = grid(s, None, 256, 256).unwrap();
        worst_integral = worst_integral.max((integrate(&g) - 1.0).abs());
    }
    (
        worst <= 1e-8 && worst_integral <= 1e-3,
        format!(
            "max |closed - overlap| = {worst:.3e} at 100 random beta per panel; \
             max |integral - 1| = {worst_integral:.3e} over four panels"
        ),
    )
}

fn check_property_suite() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e01_0001);
    let mut failures: Vec<String> = Vec::new();

    // Propagator unitarity and determinant, random manifolds and times.
    for _ in 0..200 {
        let p = ModelParams::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.2..3.0),
        )
        .unwrap();
        let n = rng.gen_range(0..=200);
        let t = rng.gen_range(0.0..40.0);
        let u = propagator(n, t, &p).unwrap();
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        let phase_sq = C64::from_polar(1.0, p.chi * t);
        if (det / phase_sq - C64::new(1.0, 0.0)).norm() > 1e-12 {
            failures.push(format!("det drift at n = {n}"));
            break;
        }
        let row = u[0][0].norm_sqr() + u[0][1].norm_sqr();
        if (row - 1.0).abs() > 1e-12 {
            failures.push(format!("row norm drift at n = {n}"));
            break;
        }
    }

    // Per-manifold norm conservation and semigroup composition.
    for _ in 0..50 {
        let p = ModelParams::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-0.8..0.8),
            rng.gen_range(0.3..2.0),
        )
        .unwrap();
        let n = 12;
        let c0: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let d0: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let state0 = JointState::new(c0, d0).unwrap();
        let (t1, t2) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        let one = evolve(&state0, t1, &p).unwrap();
        let two = evolve(&one, t2, &p).unwrap();
        let direct = evolve(&state0, t1 + t2, &p).unwrap();
        for k in 0..n {
            let before = state0.c[k].norm_sqr() + state0.d[k].norm_sqr();
            let after = one.c[k].norm_sqr() + one.d[k].norm_sqr();
            if (before - after).abs() > 1e-12 {
                failures.push(format!("norm conservation broke at manifold {k}"));
                break;
            }
            if (two.c[k] - direct.c[k]).norm() > 1e-10 || (two.d[k] - direct.d[k]).norm() > 1e-10 {
                failures.push(format!("semigroup composition broke at manifold {k}"));
                break;
            }
        }
    }

    // Distribution normalization across all field kinds.
    for kind in [
        FieldKind::Single,
        FieldKind::SuperpositionPlus,
        FieldKind::SuperpositionMinus,
    ] {
        for r in [-1.5, 0.3, 1.5] {
            let spec = FieldSpec::new(C64::new(3.5, 0.0), r, kind).unwrap();
            let total = photon_dist(&spec, DEFAULT_TOL).unwrap().total();
            if !(1.0 - DEFAULT_TOL..=1.0 + 1e-12).contains(&total) {
                failures.push(format!("normalization {total} for {kind:?}, r = {r}"));
            }
        }
    }

    // Time-averaged inversion bounds for random parameters.
    let dist = photon_dist(&single(3.5, 1.5), DEFAULT_TOL).unwrap();
    for _ in 0..100 {
        let p = ModelParams::new(
            rng.gen_range(-30.0..10.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.2..3.0),
        )
        .unwrap();
        let we = avg_inversion_excited(&dist, &p);
        let wg = avg_inversion_ground(&dist, &p);
        if !(0.0..=1.0 + 1e-12).contains(&we) {
            failures.push(format!("excited average {we} out of [0, 1]"));
            break;
        }
        if !(-1.0 - 1e-12..=0.0).contains(&wg) {
            failures.push(format!("ground average {wg} out of [-1, 0]"));
            break;
        }
    }

    // Stark shift breaks the excited/ground mirror; chi = 0 restores
    // detuning symmetry exactly.
    let p_chi = ModelParams::new(0.0, 0.5, 1.0).unwrap();
    let mut witness = 0.0f64;
    for k in 0..=800 {
        let delta = -30.0 + 40.0 * k as f64 / 800.0;
        let p = ModelParams::new(delta, p_chi.chi, p_chi.g).unwrap();
        witness = witness.max((avg_inversion_excited(&dist, &p) + avg_inversion_ground(&dist, &p)).abs());
    }
    if witness <= 0.05 {
        failures.push(format!("mirror-asymmetry witness too small: {witness}"));
    }
    for k in 0..40 {
        let delta = 0.5 + k as f64;
        let fwd = ModelParams::new(delta, 0.0, 1.0).unwrap();
        let bwd = ModelParams::new(-delta, 0.0, 1.0).unwrap();
        let diff = (avg_inversion_excited(&dist, &fwd) - avg_inversion_excited(&dist, &bwd)).abs();
        if diff > 1e-12 {
            failures.push(format!("chi = 0 detuning symmetry broke at |delta| = {delta}"));
            break;
        }
    }

    if failures.is_empty() {
        (
            true,
            format!("unitarity, norm, semigroup, normalization, bounds, mirror witness {witness:.3} > 0.05, chi = 0 symmetry"),
        )
    } else {
        (false, failures.join("; "))
    }
}

/// Runs every verification check in acceptance order.
pub fn run_all() -> Vec<CheckReport> {
    let mut reports = Vec::new();

    let start = Instant::now();
    let single_outcome = optimize_single();
    let single_elapsed = start.elapsed();
    let start = Instant::now();
    let plus_outcome = optimize_plus();
    let plus_elapsed = start.elapsed();

    let (passed, detail) = check_optimal_r_single(&single_outcome);
    reports.push(CheckReport {
        name: "optimal_squeezing_single",
        passed,
        detail,
        elapsed: single_elapsed,
    });
    let (passed, detail) = check_optimal_r_plus(&plus_outcome);
    reports.push(CheckReport {
        name: "optimal_squeezing_plus",
        passed,
        detail,
        elapsed: plus_elapsed,
    });
    reports.push(run_check("lineshape_depths", || {
        check_depths(&single_outcome, &plus_outcome)
    }));
    reports.push(run_check("mandel_transition", check_mandel_transition));
    reports.push(run_check("dynamics_vs_ode_oracle", check_dynamics_vs_ode));
    reports.push(run_check("lineshape_vs_riemann", check_lineshape_vs_riemann));
    reports.push(run_check("amplitudes_vs_matrix_oracle", check_amplitude_oracle_grid));
    reports.push(run_check("husimi_vs_overlap_oracle", check_husimi_vs_numeric));
    reports.push(run_check("property_suite", check_property_suite));
    reports
}
