//! Closed-form amplitudes and photon distributions against the
//! matrix-exponential state oracle.

use maserline::oracle::build_state_matrix;
use maserline::states::{
    amplitudes, auto_truncation, mandel_q, mandel_q_crossing, photon_dist, superposition_norm,
    FieldKind, FieldSpec, Sign, DEFAULT_TOL,
};
use maserline::C64;

/// Guard modes above the physical occupancy so fold-back error from the
/// truncated unitaries stays below 1e−8 on the compared head.
const ORACLE_MARGIN: usize = 80;

fn single(alpha: f64, r: f64) -> FieldSpec {
    FieldSpec::new(C64::new(alpha, 0.0), r, FieldKind::Single).unwrap()
}

/// Common oracle dimension for the two squeeze signs at |r| = 1.5 so the
/// superposition tests can combine cached state vectors elementwise.
fn shared_dim(alpha: f64) -> usize {
    let n_plus = auto_truncation(&single(alpha, 1.5), DEFAULT_TOL).unwrap();
    let n_minus = auto_truncation(&single(alpha, -1.5), DEFAULT_TOL).unwrap();
    n_plus.max(n_minus) + ORACLE_MARGIN
}

#[test]
fn amplitude_grid_matches_matrix_oracle() {
    let alphas = [0.0, 1.0, 3.5];
    let rs = [-1.5, -0.5, 0.3, 1.5];
    for &a in &alphas {
        let dim_15 = shared_dim(a);
        for &r in &rs {
            let spec = single(a, r);
            let n_max = auto_truncation(&spec, DEFAULT_TOL).unwrap();
            let dim = if r.abs() == 1.5 {
                dim_15
            } else {
                n_max + ORACLE_MARGIN
            };
            let closed = amplitudes(spec.alpha, r, n_max).unwrap();
            let numeric = build_state_matrix(spec.alpha, r, dim).unwrap();
            let mut worst = 0.0f64;
            for n in 0..=n_max {
                worst = worst.max((closed[n] - numeric[n]).norm());
                if a == 0.0 && n % 2 == 1 {
                    // Squeezed vacuum has no odd components, exactly.
                    assert_eq!(closed[n], C64::new(0.0, 0.0), "odd n = {n}, r = {r}");
                }
            }
            assert!(
                worst < 1e-8,
                "alpha = {a}, r = {r}: worst deviation {worst:e} over n <= {n_max}"
            );
        }
    }
}

#[test]
fn superposition_probabilities_match_combined_oracle() {
    let dim = shared_dim(3.5);
    let v_plus_r = build_state_matrix(C64::new(3.5, 0.0), 1.5, dim).unwrap();
    let v_minus_r = build_state_matrix(C64::new(3.5, 0.0), -1.5, dim).unwrap();

    for (kind, sign) in [
        (FieldKind::SuperpositionPlus, Sign::Plus),
        (FieldKind::SuperpositionMinus, Sign::Minus),
    ] {
        let spec = FieldSpec::new(C64::new(3.5, 0.0), 1.5, kind).unwrap();
        let dist = photon_dist(&spec, DEFAULT_TOL).unwrap();
        let norm = superposition_norm(1.5, sign);
        let head = dist.probs.len().min(dim - ORACLE_MARGIN);
        let mut worst = 0.0f64;
        for n in 0..head {
            let w = match sign {
                Sign::Plus => v_plus_r[n] + v_minus_r[n],
                Sign::Minus => v_plus_r[n] - v_minus_r[n],
            };
            let p_oracle = w.norm_sqr() / (norm * norm);
            worst = worst.max((dist.probs[n] - p_oracle).abs());
        }
        assert!(worst < 1e-8, "{kind:?}: worst deviation {worst:e}");
    }
}

#[test]
fn superposition_norms_match_overlap_oracle() {
    let dim = shared_dim(3.5);
    let v_plus_r = build_state_matrix(C64::new(3.5, 0.0), 1.5, dim).unwrap();
    let v_minus_r = build_state_matrix(C64::new(3.5, 0.0), -1.5, dim).unwrap();

    let norm_of = |sign: Sign| -> f64 {
        let sq: f64 = v_plus_r
            .iter()
            .zip(&v_minus_r)
            .map(|(p, m)| match sign {
                Sign::Plus => (p + m).norm_sqr(),
                Sign::Minus => (p - m).norm_sqr(),
            })
            .sum();
        sq.sqrt()
    };

    let plus = superposition_norm(1.5, Sign::Plus);
    let minus = superposition_norm(1.5, Sign::Minus);
    assert!((norm_of(Sign::Plus) - plus).abs() < 1e-8, "N+ = {plus}");
    assert!((norm_of(Sign::Minus) - minus).abs() < 1e-8, "N- = {minus}");
    // Closed forms themselves, frozen from the overlap <alpha,-r|alpha,r> = 1/sqrt(cosh 2r).
    assert!((plus - 1.6218281872688944).abs() < 1e-12);
    assert!((minus - 1.1703304366631212).abs() < 1e-12);
}

#[test]
fn plus_distribution_shows_interference_side_maxima() {
    let spec = FieldSpec::new(C64::new(3.5, 0.0), 1.5, FieldKind::SuperpositionPlus).unwrap();
    let dist = photon_dist(&spec, DEFAULT_TOL).unwrap();
    let p = &dist.probs;

    let mut maxima = Vec::new();
    for n in 1..60.min(p.len() - 1) {
        if p[n] > p[n - 1] && p[n] > p[n + 1] {
            maxima.push(n);
        }
    }
    // Interference between the two squeeze signs carves the single-peak
    // envelope into a main peak flanked by side maxima.
    assert!(
        maxima.len() >= 3,
        "expected side maxima around the main peak, found {maxima:?}"
    );
    let global = (0..p.len())
        .max_by(|&a, &b| p[a].total_cmp(&p[b]))
        .unwrap();
    assert!(global > 0, "main peak must sit away from the vacuum");
    assert!(
        maxima.iter().any(|&n| n < global) && maxima.iter().any(|&n| n > global),
        "side maxima should flank the main peak at n = {global}: {maxima:?}"
    );
}

#[test]
fn parallelogram_identity_links_four_distributions() {
    // N+^2 P+_n + N-^2 P-_n = 2 (P_n(r) + P_n(-r)) elementwise.
    let alpha = C64::new(3.5, 0.0);
    let plus = photon_dist(
        &FieldSpec::new(alpha, 1.5, FieldKind::SuperpositionPlus).unwrap(),
        DEFAULT_TOL,
    )
    .unwrap();
    let minus = photon_dist(
        &FieldSpec::new(alpha, 1.5, FieldKind::SuperpositionMinus).unwrap(),
        DEFAULT_TOL,
    )
    .unwrap();
    let pos_r = photon_dist(&single(3.5, 1.5), DEFAULT_TOL).unwrap();
    let neg_r = photon_dist(&single(3.5, -1.5), DEFAULT_TOL).unwrap();

    let n_plus = superposition_norm(1.5, Sign::Plus);
    let n_minus = superposition_norm(1.5, Sign::Minus);
    let head = plus
        .probs
        .len()
        .min(minus.probs.len())
        .min(pos_r.probs.len())
        .min(neg_r.probs.len());
    assert!(head > 100);
    for n in 0..head {
        let lhs = n_plus * n_plus * plus.probs[n] + n_minus * n_minus * minus.probs[n];
        let rhs = 2.0 * (pos_r.probs[n] + neg_r.probs[n]);
        assert!(
            (lhs - rhs).abs() < 1e-10,
            "n = {n}: lhs = {lhs}, rhs = {rhs}"
        );
    }
}

#[test]
fn auto_truncation_mass_certified_at_double_range() {
    let spec = single(3.5, -1.5);
    let n = auto_truncation(&spec, DEFAULT_TOL).unwrap();
    let amps = amplitudes(spec.alpha, spec.r, 2 * n).unwrap();
    let head: f64 = amps[..=n].iter().map(|a| a.norm_sqr()).sum();
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    assert!(
        total - head <= DEFAULT_TOL,
        "mass between N and 2N is {:e}",
        total - head
    );
    assert!(head >= 1.0 - DEFAULT_TOL, "head mass {head}");
    assert!((total - 1.0).abs() < 1e-12, "doubled range must saturate");
}

#[test]
fn mandel_q_changes_sign_between_r_1_and_r_1_5() {
    let q_at = |r: f64| {
        mandel_q(&photon_dist(&single(3.5, r), DEFAULT_TOL).unwrap()).unwrap()
    };
    assert!(q_at(1.0) < 0.0, "sub-Poissonian at r = 1.0: {}", q_at(1.0));
    assert!(q_at(1.5) > 0.0, "super-Poissonian at r = 1.5: {}", q_at(1.5));

    // Transition point for alpha = 3.5, frozen from the bisection itself and
    // cross-checked against a direct moment computation at 60 digits.
    let crossing = mandel_q_crossing(C64::new(3.5, 0.0), 1.0, 1.5, 1e-6).unwrap();
    assert!(
        (crossing - 1.1692864096562516).abs() < 2e-3,
        "crossing at {crossing}"
    );
}
