//! Time-averaged inversion W̄(Δ): closed forms, detuning scans, Riemann-sum
//! numeric verification, minimum finding, and squeeze-parameter optimization.
//!
//! The time average of each manifold's oscillation vanishes (β_n > 0), leaving
//! the detuning-dependent plateau Σ weight·([Δ+(2n+1)χ]/β_n)². Scanning Δ maps
//! the micromaser lineshape; the dip structure encodes the photon statistics.

use crate::dynamics::{rabi_frequency, ModelParams};
use crate::error::{Error, Result};
use crate::numeric::{golden_min, pairwise_sum};
use crate::states::{photon_dist, FieldSpec, PhotonDistribution, DEFAULT_TOL};
use crate::C64;
use rayon::prelude::*;

/// Initial atomic preparation for lineshape scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prep {
    Excited,
    Ground,
}

/// W̄ sampled over a uniform detuning grid. `params.delta` is ignored (Δ is
/// the swept variable). Invariants: `deltas` strictly increasing;
/// values ∈ [0, 1] for Excited and [−1, 0] for Ground.
#[derive(Debug, Clone)]
pub struct LineshapeScan {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub prep: Prep,
    pub field: FieldSpec,
    pub params: ModelParams,
}

/// Detuning of manifold n: Δ + (2n+1)χ.
fn manifold_shift(n: usize, delta: f64, chi: f64) -> f64 {
    delta + chi * (2 * n + 1) as f64
}

/// W̄_e(Δ) = Σ_n P_n·([Δ+(2n+1)χ]/β_n)² for an atom prepared excited.
/// Each ratio is < 1, so the result lies in [0, Σ P_n] ⊆ [0, 1].
pub fn avg_inversion_excited(dist: &PhotonDistribution, p: &ModelParams) -> f64 {
    let terms: Vec<f64> = dist
        .probs
        .iter()
        .enumerate()
        .map(|(n, pn)| {
            let ratio = manifold_shift(n, p.delta, p.chi) / rabi_frequency(n, p);
            pn * ratio * ratio
        })
        .collect();
    pairwise_sum(&terms)
}

/// W̄_g(Δ) = −Σ_n P_{n+1}·([Δ+(2n+1)χ]/β_n)² for an atom prepared in the
/// ground state; lies in [−1, 0]. P_0 never enters: |g⟩|0⟩ is dark.
pub fn avg_inversion_ground(dist: &PhotonDistribution, p: &ModelParams) -> f64 {
    let terms: Vec<f64> = dist
        .probs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(np1, pn1)| {
            let n = np1 - 1;
            let ratio = manifold_shift(n, p.delta, p.chi) / rabi_frequency(n, p);
            -pn1 * ratio * ratio
        })
        .collect();
    pairwise_sum(&terms)
}

/// Relative imaginary part above which an amplitude product is not "real".
const REAL_PRODUCT_TOL: f64 = 1e-9;

/// W̄ for arbitrary real-product initial amplitudes c0[n] on |e⟩|n⟩ and d0[n]
/// on |g⟩|n+1⟩:
///
///   W̄ = Σ_n ([Δ+(2n+1)χ]/β_n)²(|c_n|² − |d_n|²)
///        + 4g√(n+1)·[Δ+(2n+1)χ]/β_n² · c_n d_n
///
/// The cross term assumes every product c_n·d_n is real (the canonical case:
/// real amplitudes); inputs with complex-phase products are rejected because
/// this closed form does not hold for them. Use
/// [`time_average_numeric`] for such states.
pub fn avg_inversion_general(c0: &[C64], d0: &[C64], p: &ModelParams) -> Result<f64> {
    if c0.len() != d0.len() {
        return Err(Error::Validation(format!(
            "amplitude ladders must have equal length, got {} and {}",
            c0.len(),
            d0.len()
        )));
    }
    if c0.is_empty() {
        return Err(Error::Validation("empty amplitude ladders".into()));
    }
    let mut terms = Vec::with_capacity(c0.len());
    for (n, (cn, dn)) in c0.iter().zip(d0).enumerate() {
        if !(cn.re.is_finite() && cn.im.is_finite() && dn.re.is_finite() && dn.im.is_finite()) {
            return Err(Error::Validation(format!("non-finite amplitude at n = {n}")));
        }
        let prod = cn * dn;
        if prod.im.abs() > REAL_PRODUCT_TOL * prod.norm().max(1.0) {
            return Err(Error::Validation(format!(
                "product c[{n}]·d[{n}] = {prod} has a complex phase; this closed form \
                 requires real products, use time_average_numeric instead"
            )));
        }
        let beta = rabi_frequency(n, p);
        let shift = manifold_shift(n, p.delta, p.chi);
        let ratio = shift / beta;
        terms.push(
            ratio * ratio * (cn.norm_sqr() - dn.norm_sqr())
                + 4.0 * p.g * ((n + 1) as f64).sqrt() * shift / (beta * beta) * prod.re,
        );
    }
    Ok(pairwise_sum(&terms))
}

/// Samples W̄(Δ) on a uniform grid of `steps` points over
/// [delta_min, delta_max]. The photon distribution is computed once and
/// reused across the whole grid.
pub fn scan(
    spec: &FieldSpec,
    prep: Prep,
    p: &ModelParams,
    delta_min: f64,
    delta_max: f64,
    steps: usize,
) -> Result<LineshapeScan> {
    p.validate()?;
    if !(delta_min.is_finite() && delta_max.is_finite()) || delta_min >= delta_max {
        return Err(Error::Validation(format!(
            "detuning window must satisfy delta_min < delta_max, got [{delta_min}, {delta_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Validation(format!(
            "scan needs at least 2 grid points, got {steps}"
        )));
    }
    let dist = photon_dist(spec, DEFAULT_TOL)?;
    let h = (delta_max - delta_min) / (steps - 1) as f64;
    let deltas: Vec<f64> = (0..steps).map(|i| delta_min + h * i as f64).collect();
    let values: Vec<f64> = deltas
        .iter()
        .map(|&delta| {
            let pd = ModelParams { delta, ..*p };
            match prep {
                Prep::Excited => avg_inversion_excited(&dist, &pd),
                Prep::Ground => avg_inversion_ground(&dist, &pd),
            }
        })
        .collect();
    Ok(LineshapeScan {
        deltas,
        values,
        prep,
        field: *spec,
        params: *p,
    })
}

/// Manifolds whose combined trailing weight is below this mass are skipped in
/// the Riemann sum; the omitted inversion contribution is bounded by the same
/// mass, far below the 2e−3 verification tolerance this routine serves.
const RIEMANN_TAIL_MASS: f64 = 1e-9;

/// Renormalize each manifold's unit rotor after this many multiplications;
/// keeps the accumulated drift of |z| (and so of the cosine sum) below ~1e−7
/// over the ~2e6 steps a T = 2000/g average needs.
const ROTOR_RENORM_PERIOD: u64 = 1 << 16;

/// Hard ceiling on (manifolds × steps) so a mistyped T or dt fails fast
/// instead of spinning for hours.
const RIEMANN_WORK_LIMIT: u128 = 4_000_000_000;

/// Midpoint-rule time average (1/T)∫₀ᵀ W(t) dt of the closed-form inversion,
/// the independent check on [`avg_inversion_excited`] / [`avg_inversion_ground`].
///
/// Converges to the closed-form W̄ as O(1/T). `dt` must resolve the fastest
/// retained oscillation: dt ≤ π/(10·β_max) with β_max over the full
/// truncation, else a precondition error. Each manifold's cos(β_n t) sequence
/// advances by one complex rotor multiplication per step, renormalized
/// periodically; per-manifold averages are combined pairwise, so the result
/// is deterministic and thread-schedule independent.
pub fn time_average_numeric(
    spec: &FieldSpec,
    prep: Prep,
    p: &ModelParams,
    t_total: f64,
    dt: f64,
) -> Result<f64> {
    p.validate()?;
    if !t_total.is_finite() || t_total <= 0.0 {
        return Err(Error::Validation(format!(
            "averaging window T must be positive, got {t_total}"
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Validation(format!("dt must be positive, got {dt}")));
    }
    let dist = photon_dist(spec, DEFAULT_TOL)?;

    // β² is convex in n (quadratic plus increasing linear), so its maximum
    // over the retained manifolds sits at an end.
    let beta_max = rabi_frequency(0, p).max(rabi_frequency(dist.truncation, p));
    let dt_limit = std::f64::consts::PI / (10.0 * beta_max);
    if dt > dt_limit {
        return Err(Error::Validation(format!(
            "dt = {dt} is too coarse for the fastest retained oscillation; \
             need dt <= pi/(10*beta_max) = {dt_limit:.6e}"
        )));
    }

    // Weight of manifold n: P_n for Excited, P_{n+1} for Ground (with sign
    // applied at the end); trim the suffix of negligible total weight.
    let weights: Vec<f64> = match prep {
        Prep::Excited => dist.probs.clone(),
        Prep::Ground => dist.probs[1..].to_vec(),
    };
    let mut keep = weights.len();
    let mut tail = 0.0;
    while keep > 0 && tail + weights[keep - 1] <= RIEMANN_TAIL_MASS {
        tail += weights[keep - 1];
        keep -= 1;
    }
    let weights = &weights[..keep];
    if weights.is_empty() {
        return Ok(0.0);
    }

    let steps = (t_total / dt).ceil() as u64;
    if steps as u128 * weights.len() as u128 > RIEMANN_WORK_LIMIT {
        return Err(Error::Resource(format!(
            "Riemann average needs {steps} steps x {} manifolds; reduce T or coarsen dt",
            weights.len()
        )));
    }
    let h = t_total / steps as f64;

    let sign = match prep {
        Prep::Excited => 1.0,
        Prep::Ground => -1.0,
    };
    let per_manifold: Vec<f64> = (0..weights.len())
        .into_par_iter()
        .map(|n| {
            let w = weights[n];
            if w == 0.0 {
                return 0.0;
            }
            let beta = rabi_frequency(n, p);
            let shift = manifold_shift(n, p.delta, p.chi);
            // Midpoint samples t_j = (j + 1/2)h; z tracks e^{iβ t_j}.
            let (mut zi, mut zr) = (beta * h / 2.0).sin_cos();
            let (wi, wr) = (beta * h).sin_cos();
            let mut cos_sum = 0.0;
            for j in 0..steps {
                cos_sum += zr;
                let next_r = zr * wr - zi * wi;
                zi = zr * wi + zi * wr;
                zr = next_r;
                if j % ROTOR_RENORM_PERIOD == ROTOR_RENORM_PERIOD - 1 {
                    let scale = 1.0 / (zr * zr + zi * zi).sqrt();
                    zr *= scale;
                    zi *= scale;
                }
            }
            sign * w / (beta * beta)
                * (shift * shift
                    + 4.0 * p.g * p.g * (n + 1) as f64 * (cos_sum / steps as f64))
        })
        .collect();
    Ok(pairwise_sum(&per_manifold))
}

/// Grid argmin with an interiority check, then golden-section refinement of
/// the continuous closed form inside the bracketing grid cells. Returns
/// (Δ*, W̄(Δ*)) with Δ* within 1e−4·g of the continuous minimizer.
pub fn find_minimum(scan: &LineshapeScan) -> Result<(f64, f64)> {
    let n = scan.values.len();
    if n < 3 {
        return Err(Error::NoInteriorMinimum(
            "scan has fewer than 3 points".into(),
        ));
    }
    let (i_min, &v_min) = scan
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("scan is nonempty");
    if i_min == 0 || i_min == n - 1 || scan.values[0] <= v_min || scan.values[n - 1] <= v_min {
        return Err(Error::NoInteriorMinimum(format!(
            "grid minimum {v_min:.6} sits at the window edge; widen [{}, {}]",
            scan.deltas[0],
            scan.deltas[n - 1]
        )));
    }
    let dist = photon_dist(&scan.field, DEFAULT_TOL)?;
    let f = |delta: f64| {
        let pd = ModelParams { delta, ..scan.params };
        match scan.prep {
            Prep::Excited => avg_inversion_excited(&dist, &pd),
            Prep::Ground => avg_inversion_ground(&dist, &pd),
        }
    };
    let (mut d_star, mut v_star) =
        golden_min(f, scan.deltas[i_min - 1], scan.deltas[i_min + 1], 1e-5);
    // Refinement never loses to its own grid seed.
    if v_min < v_star {
        d_star = scan.deltas[i_min];
        v_star = v_min;
    }
    Ok((d_star, v_star))
}

/// Number of strict interior local minima in the sampled scan; superposition
/// minus states display several, single squeezed states one.
pub fn count_local_minima(scan: &LineshapeScan) -> usize {
    scan.values
        .windows(3)
        .filter(|w| w[1] < w[0] && w[1] < w[2])
        .count()
}

/// How an [`optimize_r`] run terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeFlag {
    Converged,
    /// Coarse grid saw several local optima; result is the best grid point.
    NonUnimodal,
    /// Bracket narrower than the resolution target; result is its midpoint.
    DegenerateBracket,
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOutcome {
    pub r_star: f64,
    /// 1 − min_Δ W̄_e for Excited, 1 + max_Δ W̄_g for Ground: the lineshape
    /// feature depth on a 0..1 scale.
    pub depth: f64,
    /// Detuning of the extremal feature at r_star.
    pub delta_star: f64,
    pub flag: OptimizeFlag,
}

const OPTIMIZE_COARSE_POINTS: usize = 25;
const OPTIMIZE_SCAN_POINTS: usize = 801;
const OPTIMIZE_R_TOL: f64 = 1e-4;
const DEGENERATE_BRACKET_WIDTH: f64 = 1e-5;

/// Detuning window guaranteed to contain every dip: manifold n dips near
/// Δ = −(2n+1)χ, and the occupied manifolds reach ~mean + 4·sd.
fn dip_window(alpha: C64, r_lo: f64, r_hi: f64, p: &ModelParams) -> (f64, f64) {
    let occupancy = |r: f64| {
        let mean = alpha.norm_sqr() + r.sinh().powi(2);
        let var = alpha.norm_sqr() * (-2.0 * r).exp() + 0.5 * (2.0 * r).sinh().powi(2);
        mean + 4.0 * var.max(mean).sqrt()
    };
    let n_hi = occupancy(r_lo).max(occupancy(r_hi)).ceil() + 10.0;
    let span = (2.0 * n_hi + 1.0) * p.chi.abs();
    let pad = 8.0 * p.g + p.chi.abs();
    if p.chi >= 0.0 {
        (-span - pad, pad)
    } else {
        (-pad, span + pad)
    }
}

/// Depth objective at one r: the extremal W̄ over Δ, refined past the grid.
/// Returns (objective, Δ*) where objective = min W̄_e (Excited) or
/// −max W̄_g (Ground), so that depth = 1 − objective in both cases.
fn depth_objective(
    alpha: C64,
    kind: crate::states::FieldKind,
    prep: Prep,
    p: &ModelParams,
    window: (f64, f64),
    r: f64,
) -> Result<(f64, f64)> {
    let spec = FieldSpec::new(alpha, r, kind)?;
    let dist = photon_dist(&spec, DEFAULT_TOL)?;
    let f = |delta: f64| {
        let pd = ModelParams { delta, ..*p };
        match prep {
            Prep::Excited => avg_inversion_excited(&dist, &pd),
            Prep::Ground => -avg_inversion_ground(&dist, &pd),
        }
    };
    let (lo, hi) = window;
    let h = (hi - lo) / (OPTIMIZE_SCAN_POINTS - 1) as f64;
    let mut best = (f(lo), lo);
    for i in 1..OPTIMIZE_SCAN_POINTS {
        let d = lo + h * i as f64;
        let v = f(d);
        if v < best.0 {
            best = (v, d);
        }
    }
    let (d_star, v_star) = golden_min(
        f,
        (best.1 - h).max(lo),
        (best.1 + h).min(hi),
        1e-5,
    );
    if v_star < best.0 {
        Ok((v_star, d_star))
    } else {
        Ok((best.0, best.1))
    }
}

/// Finds the squeeze parameter in [r_lo, r_hi] whose lineshape feature is
/// deepest: coarse grid over r, unimodality check, then golden-section
/// refinement of r ↦ extremal W̄(Δ; r).
pub fn optimize_r(
    alpha: C64,
    kind: crate::states::FieldKind,
    prep: Prep,
    p: &ModelParams,
    r_lo: f64,
    r_hi: f64,
) -> Result<OptimizeOutcome> {
    p.validate()?;
    if !(r_lo.is_finite() && r_hi.is_finite()) || r_lo > r_hi {
        return Err(Error::Validation(format!(
            "need r_lo <= r_hi, got [{r_lo}, {r_hi}]"
        )));
    }
    FieldSpec::new(alpha, r_lo, kind)?.validate()?;
    FieldSpec::new(alpha, r_hi, kind)?.validate()?;
    let window = dip_window(alpha, r_lo, r_hi, p);

    if r_hi - r_lo < DEGENERATE_BRACKET_WIDTH {
        let r = 0.5 * (r_lo + r_hi);
        let (obj, d_star) = depth_objective(alpha, kind, prep, p, window, r)?;
        return Ok(OptimizeOutcome {
            r_star: r,
            depth: 1.0 - obj,
            delta_star: d_star,
            flag: OptimizeFlag::DegenerateBracket,
        });
    }

    let hr = (r_hi - r_lo) / (OPTIMIZE_COARSE_POINTS - 1) as f64;
    let mut coarse = Vec::with_capacity(OPTIMIZE_COARSE_POINTS);
    for i in 0..OPTIMIZE_COARSE_POINTS {
        let r = r_lo + hr * i as f64;
        coarse.push((r, depth_objective(alpha, kind, prep, p, window, r)?));
    }
    let i_best = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1 .0.total_cmp(&b.1 .1 .0))
        .expect("coarse grid is nonempty")
        .0;
    let interior_minima = coarse
        .windows(3)
        .filter(|w| w[1].1 .0 < w[0].1 .0 && w[1].1 .0 < w[2].1 .0)
        .count();
    let multimodal = interior_minima > 1
        || (interior_minima == 1 && (i_best == 0 || i_best == OPTIMIZE_COARSE_POINTS - 1));
    if multimodal {
        let (r, (obj, d_star)) = coarse[i_best];
        return Ok(OptimizeOutcome {
            r_star: r,
            depth: 1.0 - obj,
            delta_star: d_star,
            flag: OptimizeFlag::NonUnimodal,
        });
    }

    let lo = if i_best == 0 { r_lo } else { coarse[i_best - 1].0 };
    let hi = if i_best == OPTIMIZE_COARSE_POINTS - 1 {
        r_hi
    } else {
        coarse[i_best + 1].0
    };
    let (r_star, _) = golden_min(
        |r| match depth_objective(alpha, kind, prep, p, window, r) {
            Ok((obj, _)) => obj,
            // Inside a validated bracket only resource-class failures can
            // surface; send golden away from the offending r.
            Err(_) => f64::INFINITY,
        },
        lo,
        hi,
        OPTIMIZE_R_TOL,
    );
    let (obj, d_star) = depth_objective(alpha, kind, prep, p, window, r_star)?;
    Ok(OptimizeOutcome {
        r_star,
        depth: 1.0 - obj,
        delta_star: d_star,
        flag: OptimizeFlag::Converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::FieldKind;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn params(delta: f64, chi: f64, g: f64) -> ModelParams {
        ModelParams::new(delta, chi, g).unwrap()
    }

    fn single_dist(alpha: f64, r: f64) -> PhotonDistribution {
        let spec = FieldSpec::new(c(alpha, 0.0), r, FieldKind::Single).unwrap();
        photon_dist(&spec, 1e-10).unwrap()
    }

    #[test]
    fn excited_average_vanishes_on_resonance_without_stark_shift() {
        let dist = single_dist(2.0, 0.7);
        assert_eq!(avg_inversion_excited(&dist, &params(0.0, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn excited_average_saturates_far_off_resonance() {
        let dist = single_dist(2.0, 0.7);
        let w = avg_inversion_excited(&dist, &params(1e9, 0.5, 1.0));
        assert!(w > 0.999 && w <= 1.0 + 1e-12);
    }

    #[test]
    fn excited_average_frozen_anchor() {
        // α = 3.5, r = 1.5, χ = 0.5, g = 1, Δ = −13, summed in 50-digit
        // arithmetic over the full distribution.
        let dist = single_dist(3.5, 1.5);
        let w = avg_inversion_excited(&dist, &params(-13.0, 0.5, 1.0));
        assert_abs_diff_eq!(w, 0.19162841637827925, epsilon = 1e-11);
    }

    #[test]
    fn ground_average_frozen_anchor() {
        let dist = single_dist(3.5, 1.5);
        let w = avg_inversion_ground(&dist, &params(-13.0, 0.5, 1.0));
        assert_abs_diff_eq!(w, -0.17759859898662527, epsilon = 1e-11);
    }

    #[test]
    fn ground_average_is_zero_for_vacuum() {
        let dist = single_dist(0.0, 0.0);
        for delta in [-3.0, 0.0, 5.0] {
            assert_eq!(avg_inversion_ground(&dist, &params(delta, 0.5, 1.0)), 0.0);
        }
    }

    #[test]
    fn averages_respect_sign_bounds() {
        let dist = single_dist(3.5, -1.2);
        for delta in [-25.0, -8.0, 0.0, 4.0] {
            let p = params(delta, 0.5, 1.0);
            let we = avg_inversion_excited(&dist, &p);
            let wg = avg_inversion_ground(&dist, &p);
            assert!((0.0..=1.0 + 1e-12).contains(&we), "we = {we}");
            assert!((-1.0 - 1e-12..=0.0).contains(&wg), "wg = {wg}");
        }
    }

    #[test]
    fn general_reduces_to_excited_when_ground_is_empty() {
        let dist = single_dist(2.0, 0.8);
        let amps = crate::states::amplitudes(c(2.0, 0.0), 0.8, dist.truncation).unwrap();
        let zeros = vec![c(0.0, 0.0); amps.len()];
        let p = params(-3.0, 0.5, 1.0);
        let general = avg_inversion_general(&amps, &zeros, &p).unwrap();
        assert_abs_diff_eq!(general, avg_inversion_excited(&dist, &p), epsilon = 1e-12);
    }

    #[test]
    fn general_reduces_to_ground_when_excited_is_empty() {
        let dist = single_dist(2.0, 0.8);
        let amps = crate::states::amplitudes(c(2.0, 0.0), 0.8, dist.truncation).unwrap();
        let d0: Vec<C64> = amps[1..].to_vec();
        let c0 = vec![c(0.0, 0.0); d0.len()];
        let p = params(-3.0, 0.5, 1.0);
        let general = avg_inversion_general(&c0, &d0, &p).unwrap();
        assert_abs_diff_eq!(general, avg_inversion_ground(&dist, &p), epsilon = 1e-12);
    }

    #[test]
    fn general_rejects_complex_phase_products() {
        let c0 = vec![c(0.5, 0.5); 2];
        let d0 = vec![c(0.5, 0.0); 2];
        let err = avg_inversion_general(&c0, &d0, &params(1.0, 0.5, 1.0)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("time_average_numeric"), "message: {msg}");
    }

    #[test]
    fn general_accepts_real_amplitudes() {
        let c0 = vec![c(0.6, 0.0), c(0.3, 0.0)];
        let d0 = vec![c(0.5, 0.0), c(-0.55, 0.0)];
        let p = params(2.0, 0.5, 1.0);
        let w = avg_inversion_general(&c0, &d0, &p).unwrap();
        assert!(w.is_finite());
        assert!((-1.0..=1.0).contains(&w));
    }

    #[test]
    fn scan_grid_is_uniform_and_increasing() {
        let spec = FieldSpec::new(c(1.5, 0.0), 0.4, FieldKind::Single).unwrap();
        let s = scan(&spec, Prep::Excited, &params(0.0, 0.5, 1.0), -10.0, 5.0, 31).unwrap();
        assert_eq!(s.deltas.len(), 31);
        assert_eq!(s.values.len(), 31);
        assert_eq!(s.deltas[0], -10.0);
        assert_eq!(*s.deltas.last().unwrap(), 5.0);
        assert!(s.deltas.windows(2).all(|w| w[1] > w[0]));
        assert!(s.values.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
    }

    #[test]
    fn scan_vacuum_ground_is_identically_zero() {
        let spec = FieldSpec::new(c(0.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let s = scan(&spec, Prep::Ground, &params(0.0, 0.5, 1.0), -5.0, 5.0, 11).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scan_rejects_bad_windows() {
        let spec = FieldSpec::new(c(1.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let p = params(0.0, 0.5, 1.0);
        assert!(scan(&spec, Prep::Excited, &p, 5.0, -5.0, 11).is_err());
        assert!(scan(&spec, Prep::Excited, &p, -5.0, 5.0, 1).is_err());
    }

    #[test]
    fn find_minimum_hits_exact_single_term_dip() {
        // P_0 = 1: W̄_e = (Δ+χ)²/β_0², zero exactly at Δ = −χ.
        let spec = FieldSpec::new(c(0.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let s = scan(&spec, Prep::Excited, &params(0.0, 0.5, 1.0), -4.0, 3.0, 141).unwrap();
        let (d_star, v_star) = find_minimum(&s).unwrap();
        assert_abs_diff_eq!(d_star, -0.5, epsilon = 1e-4);
        assert!(v_star < 1e-8);
    }

    #[test]
    fn find_minimum_rejects_monotone_scans() {
        // Window right of the dip at −χ: strictly increasing values.
        let spec = FieldSpec::new(c(0.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let s = scan(&spec, Prep::Excited, &params(0.0, 0.5, 1.0), 1.0, 8.0, 41).unwrap();
        assert!(matches!(
            find_minimum(&s),
            Err(Error::NoInteriorMinimum(_))
        ));
    }

    #[test]
    fn local_minima_counter_sees_plain_dip_once() {
        let spec = FieldSpec::new(c(0.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let s = scan(&spec, Prep::Excited, &params(0.0, 0.5, 1.0), -4.0, 3.0, 141).unwrap();
        assert_eq!(count_local_minima(&s), 1);
    }

    #[test]
    fn riemann_average_of_vacuum_rabi_is_zero() {
        // W(t) = cos 2t; the midpoint average over [0, 1000π] collapses.
        let spec = FieldSpec::new(c(0.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let p = params(0.0, 0.0, 1.0);
        let w = time_average_numeric(&spec, Prep::Excited, &p, 1000.0 * std::f64::consts::PI, 0.02)
            .unwrap();
        assert_abs_diff_eq!(w, 0.0, epsilon = 1e-3);
    }

    #[test]
    fn riemann_average_matches_single_term_closed_form() {
        // P_0 = 1, Δ = 2, χ = 0: W̄ = Δ²/β_0² = 4/8.
        let spec = FieldSpec::new(c(0.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let p = params(2.0, 0.0, 1.0);
        let w = time_average_numeric(&spec, Prep::Excited, &p, 1000.0, 0.02).unwrap();
        assert_abs_diff_eq!(w, 0.5, epsilon = 2e-3);
    }

    #[test]
    fn riemann_rejects_coarse_dt() {
        let spec = FieldSpec::new(c(0.0, 0.0), 0.0, FieldKind::Single).unwrap();
        let p = params(0.0, 0.0, 1.0);
        let err = time_average_numeric(&spec, Prep::Excited, &p, 100.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("too coarse"));
    }

    #[test]
    fn optimize_flags_degenerate_bracket() {
        let out = optimize_r(
            c(1.5, 0.0),
            FieldKind::Single,
            Prep::Excited,
            &params(0.0, 0.5, 1.0),
            0.4,
            0.4 + 1e-6,
        )
        .unwrap();
        assert_eq!(out.flag, OptimizeFlag::DegenerateBracket);
        assert_abs_diff_eq!(out.r_star, 0.4 + 5e-7, epsilon = 1e-9);
        assert!(out.depth > 0.0 && out.depth <= 1.0);
    }

    #[test]
    fn dip_window_covers_known_minimum() {
        // r* scan for α = 3.5 dips at Δ ≈ −13.2; window must contain it.
        let (lo, hi) = dip_window(c(3.5, 0.0), 0.2, 1.3, &params(0.0, 0.5, 1.0));
        assert!(lo < -20.0 && hi > 2.0);
    }
}
