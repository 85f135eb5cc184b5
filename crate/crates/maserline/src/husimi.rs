//! Closed-form Husimi Q-function Q(β) = |⟨β|ψ⟩|²/π for squeezed coherent
//! states and their ± superpositions, plus phase-space grid sampling and the
//! normalization integral ∫Q d²β = 1.
//!
//! All forms are written in γ = α − β with x = Re γ, y = Im γ, t = tanh r:
//! only γ enters because the displacement phase e^{−i·Im(βα*)} is common to
//! the r and −r branches and cancels in every modulus. Exponents are fused so
//! that each exponential argument is ≤ 0: the naive split
//! e^{−|γ|²}·e^{−(t/2)(γ²+γ*²)} overflows one factor and underflows the
//! other for large |Im γ|, producing 0·∞.

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::states::{superposition_norm, FieldSpec, Sign, COHERENT_R_THRESHOLD};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;

fn check_finite(beta: C64, alpha: C64, r: f64) -> Result<()> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::Domain(format!("beta must be finite, got {beta}")));
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
    }
    if !r.is_finite() {
        return Err(Error::Domain("squeeze parameter r must be finite".into()));
    }
    Ok(())
}

/// Q(β) of |α, r⟩: exp[−(1+t)x² − (1−t)y²]/(π cosh r), the fused form of
/// exp[−|γ|² − (t/2)(γ² + γ*²)]. Strictly positive; 1/π at β = α, r = 0.
pub fn q_squeezed(beta: C64, alpha: C64, r: f64) -> Result<f64> {
    check_finite(beta, alpha, r)?;
    let gamma = alpha - beta;
    let (x, y) = (gamma.re, gamma.im);
    let t = r.tanh();
    Ok((-(1.0 + t) * x * x - (1.0 - t) * y * y).exp() / (PI * r.cosh()))
}

/// Q(β) of N_±⁻¹(|α, r⟩ ± |α, −r⟩):
///
///   [e^{−(1−t)x²−(1+t)y²} + e^{−(1+t)x²−(1−t)y²} ± 2e^{−x²−y²}cos(2txy)]
///   / (π N_±² cosh r)
///
/// The two Gaussians dominate the cross term by the AM-GM inequality, so the
/// bracket is ≥ 0 structurally; rounding can leave a residual at −1e−16
/// scale near the zeros of the minus state, clamped away. Q_−(α) = 0 exactly.
pub fn q_superposition(beta: C64, alpha: C64, r: f64, sign: Sign) -> Result<f64> {
    check_finite(beta, alpha, r)?;
    if sign == Sign::Minus && r.abs() < COHERENT_R_THRESHOLD {
        return Err(Error::Degenerate(
            "minus superposition at r = 0 is the zero vector (N_- = 0)".into(),
        ));
    }
    let gamma = alpha - beta;
    let (x, y) = (gamma.re, gamma.im);
    let t = r.tanh();
    let wide = (-(1.0 - t) * x * x - (1.0 + t) * y * y).exp();
    let narrow = (-(1.0 + t) * x * x - (1.0 - t) * y * y).exp();
    let cross = 2.0 * (-x * x - y * y).exp() * (2.0 * t * x * y).cos();
    let bracket = match sign {
        Sign::Plus => wide + narrow + cross,
        Sign::Minus => wide + narrow - cross,
    };
    let norm_sq = superposition_norm(r, sign).powi(2);
    Ok((bracket / (PI * norm_sq * r.cosh())).max(0.0))
}

/// Q(β) for any [`FieldSpec`], dispatching on the state kind.
pub fn q_field(beta: C64, spec: &FieldSpec) -> Result<f64> {
    match spec.kind.superposition_sign() {
        None => q_squeezed(beta, spec.alpha, spec.r),
        Some(sign) => q_superposition(beta, spec.alpha, spec.r, sign),
    }
}

/// Rectangular phase-space window for grid sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Window {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Window> {
        let w = Window {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        };
        if !(re_lo.is_finite() && re_hi.is_finite() && im_lo.is_finite() && im_hi.is_finite())
            || re_lo >= re_hi
            || im_lo >= im_hi
        {
            return Err(Error::Validation(format!(
                "window must satisfy lo < hi per axis, got re [{re_lo}, {re_hi}], im [{im_lo}, {im_hi}]"
            )));
        }
        Ok(w)
    }

    /// Default window: centered on α with half-width 4·e^{|r|} per axis,
    /// covering the stretched quadrature out to where Q < e^{−16·e^{|r|}}.
    pub fn default_for(spec: &FieldSpec) -> Window {
        let half = 4.0 * spec.r.abs().exp();
        Window {
            re_lo: spec.alpha.re - half,
            re_hi: spec.alpha.re + half,
            im_lo: spec.alpha.im - half,
            im_hi: spec.alpha.im + half,
        }
    }
}

/// Q sampled at cell centers of a uniform re × im lattice.
///
/// `values` is row-major with the imaginary axis as the row index:
/// `values[i_im * n_re + i_re]`. Every value ≥ 0 and
/// Σ values·cell_area ≤ 1 + 1e−3.
#[derive(Debug, Clone)]
pub struct HusimiGrid {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
    pub values: Vec<f64>,
    pub cell_area: f64,
}

impl HusimiGrid {
    /// Center coordinate of cell (i_re, i_im).
    pub fn cell_center(&self, i_re: usize, i_im: usize) -> C64 {
        let dre = (self.re_range.1 - self.re_range.0) / self.n_re as f64;
        let dim = (self.im_range.1 - self.im_range.0) / self.n_im as f64;
        C64::new(
            self.re_range.0 + dre * (i_re as f64 + 0.5),
            self.im_range.0 + dim * (i_im as f64 + 0.5),
        )
    }

    /// Largest boundary-cell value relative to the grid maximum; the
    /// normalization integral is only trustworthy when this is < 1e−8.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.values.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let mut edge: f64 = 0.0;
        for i_im in 0..self.n_im {
            for i_re in 0..self.n_re {
                if i_im == 0 || i_im == self.n_im - 1 || i_re == 0 || i_re == self.n_re - 1 {
                    edge = edge.max(self.values[i_im * self.n_re + i_re]);
                }
            }
        }
        edge / max
    }
}

/// Samples the field's Q-function at cell centers; `window = None` uses
/// [`Window::default_for`]. Cells are evaluated in parallel per row and
/// assembled in index order, so the result is schedule-independent.
pub fn grid(
    spec: &FieldSpec,
    window: Option<Window>,
    n_re: usize,
    n_im: usize,
) -> Result<HusimiGrid> {
    spec.validate()?;
    if n_re < 16 || n_im < 16 {
        return Err(Error::Validation(format!(
            "grid resolution must be at least 16 per axis, got {n_re} x {n_im}"
        )));
    }
    let w = window.unwrap_or_else(|| Window::default_for(spec));
    let dre = (w.re_hi - w.re_lo) / n_re as f64;
    let dim = (w.im_hi - w.im_lo) / n_im as f64;
    // Probe one cell up front so closed-form errors surface as Err instead
    // of poisoning the parallel map.
    q_field(C64::new(w.re_lo + 0.5 * dre, w.im_lo + 0.5 * dim), spec)?;
    let values: Vec<f64> = (0..n_im)
        .into_par_iter()
        .flat_map_iter(|i_im| {
            let im = w.im_lo + dim * (i_im as f64 + 0.5);
            (0..n_re).map(move |i_re| {
                let re = w.re_lo + dre * (i_re as f64 + 0.5);
                q_field(C64::new(re, im), spec).expect("inputs validated above")
            })
        })
        .collect();
    Ok(HusimiGrid {
        re_range: (w.re_lo, w.re_hi),
        im_range: (w.im_lo, w.im_hi),
        n_re,
        n_im,
        values,
        cell_area: dre * dim,
    })
}

/// Midpoint-rule normalization integral Σ values·cell_area ≈ ∫Q d²β = 1.
///
/// Trustworthy only when the window captures the full mass: callers should
/// require [`HusimiGrid::boundary_ratio`] < 1e−8 (the CLI warns when it is
/// exceeded).
pub fn integrate(grid: &HusimiGrid) -> f64 {
    pairwise_sum(&grid.values) * grid.cell_area
}
