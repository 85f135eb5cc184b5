//! Closed-form time evolution under the interaction Hamiltonian
//! (Δ/2 + χn̂)σ_z + g(σ₊a + σ₋a†), written in the basis that pairs
//! |e⟩|n⟩ with |g⟩|n+1⟩. Each excitation manifold evolves independently with
//! generalized Rabi frequency β_n = √([Δ + χ(2n+1)]² + 4g²(n+1)).
//!
//! Times are in units of 1/g; the paper-scale defaults set g = 1.

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::states::PhotonDistribution;
use crate::C64;

/// Model frequencies: detuning Δ = ω_eg − ω_c, Stark strength χ, coupling g.
///
/// ω_eg and ω_c individually are eliminated by the rotating frame and have no
/// runtime representation; only Δ survives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub delta: f64,
    pub chi: f64,
    pub g: f64,
}

impl ModelParams {
    pub fn new(delta: f64, chi: f64, g: f64) -> Result<ModelParams> {
        let p = ModelParams { delta, chi, g };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.chi.is_finite() && self.g.is_finite()) {
            return Err(Error::Validation("model parameters must be finite".into()));
        }
        if self.g <= 0.0 {
            return Err(Error::Validation(format!(
                "coupling g must be positive, got {}",
                self.g
            )));
        }
        Ok(())
    }

    /// The underlying level scheme does not support |χ| above g; advisory
    /// only, callers may warn but proceed.
    pub fn chi_exceeds_physical_range(&self) -> bool {
        self.chi.abs() > self.g
    }
}

/// Joint atom–field amplitudes: c[n] multiplies |e⟩|n⟩, d[n] multiplies
/// |g⟩|n+1⟩. Σ(|c_n|² + |d_n|²) stays constant under evolution (1 ± 1e−9 for
/// a normalized state; the |g⟩|0⟩ component is dark and lives outside this
/// ladder).
#[derive(Debug, Clone)]
pub struct JointState {
    pub c: Vec<C64>,
    pub d: Vec<C64>,
    pub truncation: usize,
}

impl JointState {
    pub fn new(c: Vec<C64>, d: Vec<C64>) -> Result<JointState> {
        if c.len() != d.len() {
            return Err(Error::Validation(format!(
                "amplitude ladders must have equal length, got {} and {}",
                c.len(),
                d.len()
            )));
        }
        if c.is_empty() {
            return Err(Error::Validation("empty joint state".into()));
        }
        let truncation = c.len() - 1;
        Ok(JointState { c, d, truncation })
    }

    pub fn norm_sqr(&self) -> f64 {
        let parts: Vec<f64> = self
            .c
            .iter()
            .zip(&self.d)
            .map(|(cn, dn)| cn.norm_sqr() + dn.norm_sqr())
            .collect();
        pairwise_sum(&parts)
    }
}

/// β_n = √([Δ + χ(2n+1)]² + 4g²(n+1)) > 0.
pub fn rabi_frequency(n: usize, p: &ModelParams) -> f64 {
    let shift = p.delta + p.chi * (2 * n + 1) as f64;
    (shift * shift + 4.0 * p.g * p.g * (n + 1) as f64).sqrt()
}

/// Manifold propagator e^{iχt/2}·[[M11, M12], [M12, M11*]] with
/// M11 = cos(β_n t/2) − i[Δ+χ(2n+1)]/β_n·sin(β_n t/2) and
/// M12 = −i·2g√(n+1)/β_n·sin(β_n t/2). Identity at t = 0; |det| = 1.
///
/// The global phase e^{iχt/2} cancels in every probability but is retained
/// in case amplitudes are ever exposed directly.
pub fn propagator(n: usize, t: f64, p: &ModelParams) -> Result<[[C64; 2]; 2]> {
    if !t.is_finite() {
        return Err(Error::Domain("propagation time must be finite".into()));
    }
    let beta = rabi_frequency(n, p);
    let shift = p.delta + p.chi * (2 * n + 1) as f64;
    let (sin, cos) = (beta * t / 2.0).sin_cos();
    let phase = C64::from_polar(1.0, p.chi * t / 2.0);
    let m11 = C64::new(cos, -shift / beta * sin);
    let m12 = C64::new(0.0, -2.0 * p.g * ((n + 1) as f64).sqrt() / beta * sin);
    Ok([
        [phase * m11, phase * m12],
        [phase * m12, phase * m11.conj()],
    ])
}

/// Applies the per-manifold propagator to every (c_n, d_n) pair.
pub fn evolve(state0: &JointState, t: f64, p: &ModelParams) -> Result<JointState> {
    let mut c = Vec::with_capacity(state0.c.len());
    let mut d = Vec::with_capacity(state0.d.len());
    for (n, (c0, d0)) in state0.c.iter().zip(&state0.d).enumerate() {
        let m = propagator(n, t, p)?;
        c.push(m[0][0] * c0 + m[0][1] * d0);
        d.push(m[1][0] * c0 + m[1][1] * d0);
    }
    JointState::new(c, d)
}

/// W = Σ(|c_n|² − |d_n|²), the excited-minus-ground population difference.
pub fn inversion(state: &JointState) -> f64 {
    let parts: Vec<f64> = state
        .c
        .iter()
        .zip(&state.d)
        .map(|(cn, dn)| cn.norm_sqr() - dn.norm_sqr())
        .collect();
    pairwise_sum(&parts)
}

/// W_e(t) for an atom prepared excited with field distribution P_n:
/// Σ_n (P_n/β_n²)·{[Δ+(2n+1)χ]² + 4g²(n+1)·cos(β_n t)}.
pub fn inversion_excited(dist: &PhotonDistribution, t: f64, p: &ModelParams) -> f64 {
    let terms: Vec<f64> = dist
        .probs
        .iter()
        .enumerate()
        .map(|(n, pn)| {
            let beta = rabi_frequency(n, p);
            let shift = p.delta + p.chi * (2 * n + 1) as f64;
            pn / (beta * beta)
                * (shift * shift + 4.0 * p.g * p.g * (n + 1) as f64 * (beta * t).cos())
        })
        .collect();
    pairwise_sum(&terms)
}

/// W_g(t) for an atom prepared in the ground state: the n-th manifold couples
/// |g⟩|n+1⟩, so the weight is P_{n+1} and the field's P_0 never enters (the
/// |g⟩|0⟩ component is dark).
pub fn inversion_ground(dist: &PhotonDistribution, t: f64, p: &ModelParams) -> f64 {
    let terms: Vec<f64> = dist
        .probs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(np1, pn1)| {
            let n = np1 - 1;
            let beta = rabi_frequency(n, p);
            let shift = p.delta + p.chi * (2 * n + 1) as f64;
            -pn1 / (beta * beta)
                * (shift * shift + 4.0 * p.g * p.g * (n + 1) as f64 * (beta * t).cos())
        })
        .collect();
    pairwise_sum(&terms)
}

/// W(t) for arbitrary (complex) initial amplitudes, computed by evolving and
/// measuring. The textbook closed form for this quantity assumes real
/// products c_n(0)d_n(0); evolve-then-measure is exact without that
/// restriction, and the real-coefficient identity is kept as a test.
pub fn inversion_general(c0: &[C64], d0: &[C64], t: f64, p: &ModelParams) -> Result<f64> {
    let state = JointState::new(c0.to_vec(), d0.to_vec())?;
    Ok(inversion(&evolve(&state, t, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{photon_dist, FieldKind, FieldSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn params(delta: f64, chi: f64, g: f64) -> ModelParams {
        ModelParams::new(delta, chi, g).unwrap()
    }

    #[test]
    fn bare_vacuum_rabi_frequency() {
        assert_eq!(rabi_frequency(0, &params(0.0, 0.0, 1.0)), 2.0);
    }

    #[test]
    fn rabi_direct_substitution() {
        assert_relative_eq!(
            rabi_frequency(1, &params(1.0, 0.5, 1.0)),
            14.25f64.sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            rabi_frequency(24, &params(0.0, 0.5, 1.0)),
            (24.5f64 * 24.5 + 100.0).sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn propagator_at_zero_time_is_identity() {
        for n in [0usize, 3, 17] {
            let m = propagator(n, 0.0, &params(0.7, 0.3, 1.2)).unwrap();
            assert_eq!(m[0][0], c(1.0, 0.0));
            assert_eq!(m[0][1], c(0.0, 0.0));
            assert_eq!(m[1][0], c(0.0, 0.0));
            assert_eq!(m[1][1], c(1.0, 0.0));
        }
    }

    #[test]
    fn full_excitation_swap_at_half_vacuum_period() {
        // β_0 = 2, so t = π/2 swaps the pair up to the −i phase.
        let m = propagator(0, std::f64::consts::FRAC_PI_2, &params(0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(m[0][0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m[0][1] - c(0.0, -1.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((m[1][0] - c(0.0, -1.0)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn propagator_is_unitary_and_special() {
        let p = params(1.3, 0.4, 0.9);
        for n in [0usize, 5, 50, 200] {
            for t in [0.17, 2.9, 14.2] {
                let m = propagator(n, t, &p).unwrap();
                let phase = C64::from_polar(1.0, p.chi * t / 2.0);
                let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / (phase * phase);
                assert_abs_diff_eq!((det - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
                let row = m[0][0].norm_sqr() + m[0][1].norm_sqr();
                assert_abs_diff_eq!(row, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn evolve_at_zero_time_is_identity() {
        let state = JointState::new(vec![c(0.6, 0.0), c(0.0, 0.48)], vec![c(0.0, 0.0), c(0.64, 0.0)])
            .unwrap();
        let out = evolve(&state, 0.0, &params(1.0, 0.5, 1.0)).unwrap();
        assert_eq!(out.c, state.c);
        assert_eq!(out.d, state.d);
    }

    #[test]
    fn vacuum_rabi_oscillation() {
        let state = JointState::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]).unwrap();
        let p = params(0.0, 0.0, 1.0);
        for t in [0.0, 0.3, 1.1, 2.7] {
            let out = evolve(&state, t, &p).unwrap();
            assert_abs_diff_eq!(out.c[0].norm_sqr(), t.cos().powi(2), epsilon = 1e-14);
        }
    }

    #[test]
    fn norm_is_preserved_per_manifold() {
        let state = JointState::new(
            vec![c(0.3, 0.2), c(-0.4, 0.1), c(0.05, -0.6)],
            vec![c(0.0, 0.35), c(0.25, -0.15), c(-0.2, 0.1)],
        )
        .unwrap();
        let p = params(0.8, 0.45, 1.1);
        let out = evolve(&state, 3.7, &p).unwrap();
        for n in 0..3 {
            let before = state.c[n].norm_sqr() + state.d[n].norm_sqr();
            let after = out.c[n].norm_sqr() + out.d[n].norm_sqr();
            assert_abs_diff_eq!(before, after, epsilon = 1e-14);
        }
    }

    #[test]
    fn inversion_extremes_and_balance() {
        let all_up = JointState::new(vec![c(0.8, 0.0), c(0.6, 0.0)], vec![c(0.0, 0.0); 2]).unwrap();
        assert_relative_eq!(inversion(&all_up), 1.0, max_relative = 1e-15);
        let all_down = JointState::new(vec![c(0.0, 0.0); 2], vec![c(0.0, 0.8), c(0.6, 0.0)]).unwrap();
        assert_relative_eq!(inversion(&all_down), -1.0, max_relative = 1e-15);
        let balanced = JointState::new(
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.0, 0.5), c(-0.5, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(inversion(&balanced), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn excited_inversion_vacuum_field_is_cos_2gt() {
        let dist = PhotonDistribution {
            probs: vec![1.0],
            truncation: 0,
            tail_mass_bound: 0.0,
        };
        let p = params(0.0, 0.0, 1.0);
        for t in [0.0, 0.4, 1.3, 6.0] {
            assert_abs_diff_eq!(inversion_excited(&dist, t, &p), (2.0 * t).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn excited_inversion_starts_at_total_mass() {
        let spec = FieldSpec::new(c(3.5, 0.0), 1.5, FieldKind::Single).unwrap();
        let dist = photon_dist(&spec, 1e-10).unwrap();
        let w0 = inversion_excited(&dist, 0.0, &params(1.0, 0.5, 1.0));
        assert_abs_diff_eq!(w0, dist.total(), epsilon = 1e-13);
        assert!((w0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ground_inversion_vacuum_field_is_flat_zero() {
        let dist = PhotonDistribution {
            probs: vec![1.0],
            truncation: 0,
            tail_mass_bound: 0.0,
        };
        let p = params(0.3, 0.2, 1.0);
        for t in [0.0, 0.9, 4.2] {
            assert_eq!(inversion_ground(&dist, t, &p), 0.0);
        }
    }

    #[test]
    fn ground_inversion_single_photon_is_minus_cos_2gt() {
        // P_1 = 1: one photon drives the n = 0 manifold from below.
        let dist = PhotonDistribution {
            probs: vec![0.0, 1.0],
            truncation: 1,
            tail_mass_bound: 0.0,
        };
        let p = params(0.0, 0.0, 1.0);
        for t in [0.0, 0.4, 2.2] {
            assert_abs_diff_eq!(inversion_ground(&dist, t, &p), -(2.0 * t).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn general_reduces_to_excited_and_ground() {
        let spec = FieldSpec::new(c(2.0, 0.0), 0.8, FieldKind::Single).unwrap();
        let dist = photon_dist(&spec, 1e-10).unwrap();
        let amps = crate::states::amplitudes(c(2.0, 0.0), 0.8, dist.truncation).unwrap();
        let p = params(1.0, 0.5, 1.0);
        let zeros = vec![c(0.0, 0.0); amps.len()];

        let t = 7.3;
        let we = inversion_general(&amps, &zeros, t, &p).unwrap();
        assert_abs_diff_eq!(we, inversion_excited(&dist, t, &p), epsilon = 1e-12);

        // Ground preparation: d_n = ⟨n+1|ψ⟩; the dark ⟨0|ψ⟩ piece is outside
        // the ladder and both routes exclude it, so W_g(0) = −(1 − P_0).
        let d0: Vec<C64> = amps[1..].to_vec();
        let c0 = vec![c(0.0, 0.0); d0.len()];
        let wg = inversion_general(&c0, &d0, t, &p).unwrap();
        assert_abs_diff_eq!(wg, inversion_ground(&dist, t, &p), epsilon = 1e-12);
        let wg0 = inversion_general(&c0, &d0, 0.0, &p).unwrap();
        assert_abs_diff_eq!(wg0, -(dist.total() - dist.probs[0]), epsilon = 1e-12);
    }

    #[test]
    fn real_coefficient_closed_form_matches_evolve_path() {
        // For real c_n(0), d_n(0) the textbook form
        //   W(t) = Σ (1/β_n²)·{ [Δ_n² + 4g²(n+1)cos β_n t]·(c_n² − d_n²)
        //          − 4g√(n+1)·Δ_n·[cos β_n t − 1]·c_n d_n }, Δ_n = Δ+(2n+1)χ,
        // must agree with evolve-then-measure.
        let c0 = [0.5f64, -0.3, 0.2, 0.4, 0.1, -0.25, 0.33, 0.15, 0.05];
        let d0 = [0.2f64, 0.1, -0.35, 0.15, 0.3, 0.2, -0.1, 0.25, 0.2];
        let nrm = (c0.iter().chain(&d0).map(|x| x * x).sum::<f64>()).sqrt();
        let cc: Vec<C64> = c0.iter().map(|x| c(x / nrm, 0.0)).collect();
        let dd: Vec<C64> = d0.iter().map(|x| c(x / nrm, 0.0)).collect();
        let p = params(1.0, 0.5, 1.0);
        for t in [0.6, 3.1, 11.4] {
            let via_evolve = inversion_general(&cc, &dd, t, &p).unwrap();
            let mut direct = 0.0;
            for n in 0..cc.len() {
                let beta = rabi_frequency(n, &p);
                let shift = p.delta + p.chi * (2 * n + 1) as f64;
                let cosb = (beta * t).cos();
                let cn = cc[n].re;
                let dn = dd[n].re;
                direct += (shift * shift + 4.0 * p.g * p.g * (n as f64 + 1.0) * cosb)
                    / (beta * beta)
                    * (cn * cn - dn * dn);
                direct -= 4.0 * p.g * ((n + 1) as f64).sqrt() * shift * (cosb - 1.0)
                    / (beta * beta)
                    * cn
                    * dn;
            }
            assert_abs_diff_eq!(via_evolve, direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn excited_inversion_frozen_anchor() {
        // α = 3.5, r = 1.5, Δ = 1, χ = 0.5, g = 1 at t = 10, summed in
        // 50-digit arithmetic over the full distribution.
        let spec = FieldSpec::new(c(3.5, 0.0), 1.5, FieldKind::Single).unwrap();
        let dist = photon_dist(&spec, 1e-10).unwrap();
        let w = inversion_excited(&dist, 10.0, &params(1.0, 0.5, 1.0));
        assert_abs_diff_eq!(w, 0.8130862443810463, epsilon = 1e-9);
    }

    #[test]
    fn semigroup_composition() {
        let p = params(0.9, 0.35, 1.0);
        for n in [0usize, 4, 70] {
            let (t1, t2) = (1.3, 2.45);
            let m12 = propagator(n, t1 + t2, &p).unwrap();
            let m1 = propagator(n, t1, &p).unwrap();
            let m2 = propagator(n, t2, &p).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let composed = m1[i][0] * m2[0][j] + m1[i][1] * m2[1][j];
                    assert_abs_diff_eq!((composed - m12[i][j]).norm(), 0.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn chi_warning_flag() {
        assert!(params(0.0, 1.5, 1.0).chi_exceeds_physical_range());
        assert!(!params(0.0, 0.5, 1.0).chi_exceeds_physical_range());
    }

    #[test]
    fn rejects_nonpositive_coupling() {
        assert!(ModelParams::new(0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, -1.0).is_err());
    }
}
