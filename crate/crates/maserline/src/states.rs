//! Photon-number amplitudes and probability distributions for squeezed
//! coherent states |α,r⟩ = D(α)S(r)|0⟩ (squeezing phase fixed to θ = 0, r
//! real) and for their normalized superpositions (|α,r⟩ ± |α,−r⟩)/N_±.
//!
//! Branch policy: tanh^{1/2}(r) is taken on the principal complex branch, and
//! the same root appears in both the prefactor power s^n and the Hermite
//! argument, so relative phases between amplitudes stay consistent for r < 0.
//! That consistency is not derivable from probabilities alone (they only see
//! |·|²); it is validated against the matrix-exponential oracle, which knows
//! nothing about Hermite polynomials.
//!
//! For complex α the Hermite argument is (α + α*·tanh r)/(√2·√tanh r), which
//! reduces to the familiar α(1 + tanh r)/√(2 tanh r) when α is real.

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::specfun::{hermite_batch, ScaledComplex};
use crate::C64;

/// Default normalization tolerance for distributions; keeps lineshape sums
/// accurate to plotting precision with margin.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Below this |r| the state is treated as exactly coherent: the Hermite
/// argument diverges as r → 0, while the coherent closed form is exact there.
pub const COHERENT_R_THRESHOLD: f64 = 1e-12;

/// Hard cap on Fock-space truncation.
pub const MAX_TRUNCATION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Single,
    SuperpositionPlus,
    SuperpositionMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl FieldKind {
    pub fn superposition_sign(&self) -> Option<Sign> {
        match self {
            FieldKind::Single => None,
            FieldKind::SuperpositionPlus => Some(Sign::Plus),
            FieldKind::SuperpositionMinus => Some(Sign::Minus),
        }
    }
}

/// Initial field description: coherent amplitude α, squeeze parameter r, and
/// whether the state is |α,r⟩ itself or a ± superposition with |α,−r⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub alpha: C64,
    pub r: f64,
    pub kind: FieldKind,
}

impl FieldSpec {
    pub fn new(alpha: C64, r: f64, kind: FieldKind) -> Result<FieldSpec> {
        let spec = FieldSpec { alpha, r, kind };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::Validation(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        if !self.r.is_finite() {
            return Err(Error::Validation("squeeze parameter r must be finite".into()));
        }
        // Beyond |r| = 5 truncations become impractical; a bound, not physics.
        if self.r.abs() > 5.0 {
            return Err(Error::Validation(format!(
                "|r| = {} exceeds the supported maximum 5",
                self.r.abs()
            )));
        }
        if self.kind == FieldKind::SuperpositionMinus && self.r.abs() < COHERENT_R_THRESHOLD {
            return Err(Error::Degenerate(
                "minus superposition at r = 0 is the zero vector (N_- = 0)".into(),
            ));
        }
        Ok(())
    }
}

/// Photon-number probabilities P_0..P_N with truncation metadata.
///
/// Invariants: every P_n ≥ 0 and Σ P_n ∈ [1 − tail_mass_bound, 1] with
/// tail_mass_bound ≤ the tolerance the distribution was built with.
#[derive(Debug, Clone)]
pub struct PhotonDistribution {
    pub probs: Vec<f64>,
    pub truncation: usize,
    pub tail_mass_bound: f64,
}

impl PhotonDistribution {
    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probs)
    }

    pub fn mean(&self) -> f64 {
        let weighted: Vec<f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .collect();
        pairwise_sum(&weighted)
    }

    fn second_moment(&self) -> f64 {
        let weighted: Vec<f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(n, p)| (n as f64) * (n as f64) * p)
            .collect();
        pairwise_sum(&weighted)
    }
}

/// ⟨n|α,r⟩ including phase.
pub fn amplitude(n: usize, alpha: C64, r: f64) -> Result<C64> {
    Ok(amplitudes(alpha, r, n)?[n])
}

/// ⟨n|α,r⟩ for n = 0..=n_max in one recurrence pass.
///
/// The weight tanh^{n/2}(r)·H_n(arg)/(2^{n/2}·√n!) overflows and underflows
/// f64 separately for n in the hundreds, so the three factors are fused in
/// scaled base-2 arithmetic and collapsed only at the end (each amplitude has
/// magnitude ≤ 1).
pub fn amplitudes(alpha: C64, r: f64, n_max: usize) -> Result<Vec<C64>> {
    if !(alpha.re.is_finite() && alpha.im.is_finite() && r.is_finite()) {
        return Err(Error::Domain("amplitude arguments must be finite".into()));
    }
    if r.abs() < COHERENT_R_THRESHOLD {
        // Coherent branch: ⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n!.
        let mut out = Vec::with_capacity(n_max + 1);
        let mut c = ScaledComplex::from_exp(C64::new(-alpha.norm_sqr() / 2.0, 0.0));
        out.push(c.to_c64());
        for n in 1..=n_max {
            c = c.mul_scalar(alpha / (n as f64).sqrt());
            out.push(c.to_c64());
        }
        return Ok(out);
    }

    let t = r.tanh();
    // Principal square root; for r < 0 this is i√|tanh r|, used identically
    // in the power s^n and in the Hermite argument.
    let s = C64::new(t, 0.0).sqrt();
    let arg = (alpha + alpha.conj() * t) / (std::f64::consts::SQRT_2 * s);
    // exp(−|α|²/2 − (tanh r/2)·α*²)/√cosh r, kept in scaled form.
    let w = C64::new(-alpha.norm_sqr() / 2.0 - 0.5 * r.cosh().ln(), 0.0)
        - (t / 2.0) * alpha.conj() * alpha.conj();
    let pref = ScaledComplex::from_exp(w);

    let hs = hermite_batch(n_max, arg)?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut f = ScaledComplex::ONE; // s^n / (2^{n/2} √n!)
    for (n, h) in hs.iter().enumerate() {
        if n > 0 {
            f = f.mul_scalar(s / (2.0 * n as f64).sqrt());
        }
        out.push(pref.mul(&f).mul(h).to_c64());
    }
    Ok(out)
}

/// N_± = √(2[1 ± 1/√cosh 2r]).
///
/// Returns 0 for the minus sign at r = 0; the construction-time guard against
/// that degeneracy lives in [`FieldSpec::validate`].
pub fn superposition_norm(r: f64, sign: Sign) -> f64 {
    let inv = 1.0 / (2.0 * r).cosh().sqrt();
    match sign {
        Sign::Plus => (2.0 * (1.0 + inv)).sqrt(),
        Sign::Minus => (2.0 * (1.0 - inv)).max(0.0).sqrt(),
    }
}

/// P_0..P_{n_max} for the given field, superposition amplitudes combined
/// before squaring: P_n^(±) = |⟨n|α,r⟩ ± ⟨n|α,−r⟩|²/N_±².
fn probabilities(spec: &FieldSpec, n_max: usize) -> Result<Vec<f64>> {
    match spec.kind.superposition_sign() {
        None => Ok(amplitudes(spec.alpha, spec.r, n_max)?
            .iter()
            .map(|a| a.norm_sqr())
            .collect()),
        Some(sign) => {
            let u = amplitudes(spec.alpha, spec.r, n_max)?;
            let v = amplitudes(spec.alpha, -spec.r, n_max)?;
            let norm_sq = superposition_norm(spec.r, sign).powi(2);
            let s = match sign {
                Sign::Plus => 1.0,
                Sign::Minus => -1.0,
            };
            Ok(u.iter()
                .zip(&v)
                .map(|(un, vn)| (un + vn.scale(s)).norm_sqr() / norm_sq)
                .collect())
        }
    }
}

fn validate_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-3 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "tolerance must lie in (0, 1e-3], got {tol}"
        )))
    }
}

const TRUNCATION_BLOCK: usize = 32;

/// Smallest truncation N (up to block granularity) with certified tail mass
/// ≤ tol: extends in blocks until the trailing block's mass is < tol/10 and
/// the captured total is ≥ 1 − tol, starting from the safety floor
/// ⌈|α|² + 8|α|cosh|r| + 10e^{2|r|}⌉.
pub fn auto_truncation(spec: &FieldSpec, tol: f64) -> Result<usize> {
    spec.validate()?;
    validate_tol(tol)?;
    let a = spec.alpha.norm();
    let floor = (a * a + 8.0 * a * spec.r.abs().cosh() + 10.0 * (2.0 * spec.r.abs()).exp()).ceil();
    if floor > MAX_TRUNCATION as f64 {
        return Err(Error::Resource(format!(
            "truncation floor {floor} exceeds the maximum {MAX_TRUNCATION}"
        )));
    }
    let mut n = floor as usize;
    loop {
        let probs = probabilities(spec, n)?;
        let total = pairwise_sum(&probs);
        let block_start = probs.len().saturating_sub(TRUNCATION_BLOCK);
        let trailing = pairwise_sum(&probs[block_start..]);
        if total >= 1.0 - tol && trailing < tol / 10.0 {
            return Ok(n);
        }
        n += TRUNCATION_BLOCK;
        if n > MAX_TRUNCATION {
            return Err(Error::Resource(format!(
                "truncation exceeded the maximum {MAX_TRUNCATION} without certifying tail mass {tol}"
            )));
        }
    }
}

/// Photon distribution of the field with certified truncation.
pub fn photon_dist(spec: &FieldSpec, tol: f64) -> Result<PhotonDistribution> {
    let truncation = auto_truncation(spec, tol)?;
    let probs = probabilities(spec, truncation)?;
    let total = pairwise_sum(&probs);
    Ok(PhotonDistribution {
        probs,
        truncation,
        tail_mass_bound: (1.0 - total).max(0.0),
    })
}

/// Mandel Q = (⟨n²⟩ − ⟨n⟩² − ⟨n⟩)/⟨n⟩; negative iff sub-Poissonian.
pub fn mandel_q(dist: &PhotonDistribution) -> Result<f64> {
    if dist.total() <= 0.0 {
        return Err(Error::Domain("distribution has no mass".into()));
    }
    let mean = dist.mean();
    if mean <= 0.0 {
        return Err(Error::Domain(
            "Mandel Q is undefined for a zero-mean photon distribution".into(),
        ));
    }
    Ok((dist.second_moment() - mean * mean - mean) / mean)
}

/// Bisects the sign change of r ↦ mandel_q(Single, α, r) inside [r_lo, r_hi].
///
/// Supports the sub-/super-Poissonian transition checks; tolerance is on r.
pub fn mandel_q_crossing(alpha: C64, r_lo: f64, r_hi: f64, tol_r: f64) -> Result<f64> {
    let q_at = |r: f64| -> Result<f64> {
        let spec = FieldSpec::new(alpha, r, FieldKind::Single)?;
        mandel_q(&photon_dist(&spec, DEFAULT_TOL)?)
    };
    let (mut lo, mut hi) = (r_lo, r_hi);
    let (q_lo, q_hi) = (q_at(lo)?, q_at(hi)?);
    if q_lo.signum() == q_hi.signum() {
        return Err(Error::Domain(format!(
            "no sign change in [{r_lo}, {r_hi}]: Q({r_lo}) = {q_lo}, Q({r_hi}) = {q_hi}"
        )));
    }
    while hi - lo > tol_r {
        let mid = 0.5 * (lo + hi);
        if q_at(mid)?.signum() == q_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
