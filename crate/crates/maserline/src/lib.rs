//! Dynamics and time-averaged lineshapes of a two-level atom coupled to a
//! single-mode field with an AC Stark shift term.
//!
//! The field starts in a squeezed coherent state |α,r⟩ = D(α)S(r)|0⟩ or in a
//! normalized ± superposition of |α,r⟩ and |α,−r⟩. Everything downstream is
//! built from the photon-number amplitudes of that initial field:
//!
//! * [`states`] — amplitudes, photon distributions, Mandel Q, truncation
//! * [`dynamics`] — closed-form propagator per excitation manifold, atomic
//!   inversion W(t)
//! * [`lineshape`] — time-averaged inversion W̄(Δ), detuning scans, numeric
//!   Riemann averaging, minimum finding, squeeze-parameter optimization
//! * [`husimi`] — closed-form Husimi Q functions and phase-space grids
//! * [`specfun`] — overflow-safe Hermite evaluation used by [`states`]
//! * [`oracle`] — independent numerical ground truth (direct ODE integration,
//!   matrix-exponential state construction); shares no code with the closed
//!   forms above
//! * [`verify`] — named end-to-end checks pairing each closed form with its
//!   oracle
//!
//! Times are in units of 1/g and all frequencies (Δ, χ, g) in units of g
//! unless a caller chooses otherwise; the defaults set g = 1.

pub mod dynamics;
pub mod error;
pub mod husimi;
pub mod lineshape;
pub mod numeric;
pub mod oracle;
pub mod specfun;
pub mod states;
pub mod verify;

pub use error::{Error, Result};

/// Complex double, the scalar type of every amplitude in this crate.
pub type C64 = num_complex::Complex64;
