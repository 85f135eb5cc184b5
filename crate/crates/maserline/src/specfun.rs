//! Numerically stable Hermite polynomials with complex argument.
//!
//! Physicists' convention throughout: H_{k+1}(z) = 2z·H_k(z) − 2k·H_{k−1}(z)
//! with H_0 = 1, H_1 = 2z. The probabilists' convention would silently corrupt
//! every photon probability downstream, so the convention is fixed here and
//! asserted by the polynomial test cases below.
//!
//! Raw H_n overflows f64 near n ≈ 150 for the arguments this crate needs, so
//! values are carried as [`ScaledComplex`]: an ordinary complex mantissa and a
//! base-2 integer exponent. Power-of-two rescaling is exact in binary floating
//! point, which keeps signs and phases intact (a log-space representation
//! would not).

use crate::error::{Error, Result};
use crate::C64;

/// A complex value `mantissa × 2^exponent`.
///
/// Canonical form keeps the dominant mantissa component in [1, 2), so
/// |mantissa| lies in [1, 2√2); arithmetic lets it drift in [0.5, 4) before
/// renormalizing to bound rounding-error growth. The exact zero is
/// mantissa = 0, exponent = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: C64,
    pub exponent: i64,
}

/// v · 2^k, exact while both components stay in range. Split into two half
/// shifts so the scale factor itself never overflows for |k| > 1023.
fn scale_pow2(v: C64, k: i64) -> C64 {
    let k1 = k / 2;
    let k2 = k - k1;
    v * (k1 as f64).exp2() * (k2 as f64).exp2()
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: C64::new(0.0, 0.0),
        exponent: 0,
    };

    pub const ONE: ScaledComplex = ScaledComplex {
        mantissa: C64::new(1.0, 0.0),
        exponent: 0,
    };

    /// Wraps an ordinary complex, normalizing the mantissa into [1, 2).
    pub fn from_c64(v: C64) -> ScaledComplex {
        ScaledComplex {
            mantissa: v,
            exponent: 0,
        }
        .normalized()
    }

    /// e^w without intermediate overflow or underflow: the real part of `w`
    /// becomes the exponent, the imaginary part the phase of the mantissa.
    pub fn from_exp(w: C64) -> ScaledComplex {
        let e2 = w.re / std::f64::consts::LN_2;
        let k = e2.floor();
        let mag = (e2 - k).exp2(); // in [1, 2)
        ScaledComplex {
            mantissa: C64::from_polar(mag, w.im),
            exponent: k as i64,
        }
    }

    /// Collapses to an ordinary complex; saturates to ∞/0 outside f64 range.
    pub fn to_c64(&self) -> C64 {
        if self.mantissa == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        if self.exponent > 1020 {
            return C64::new(
                f64::INFINITY.copysign(self.mantissa.re),
                f64::INFINITY.copysign(self.mantissa.im),
            );
        }
        if self.exponent < -1100 {
            return C64::new(0.0, 0.0);
        }
        scale_pow2(self.mantissa, self.exponent)
    }

    /// Renormalizes only when |mantissa| has left [0.5, 4).
    fn settled(self) -> ScaledComplex {
        let n2 = self.mantissa.norm_sqr();
        if (0.25..16.0).contains(&n2) || n2 == 0.0 {
            self
        } else {
            self.normalized()
        }
    }

    /// Forces the canonical form: dominant mantissa component in [1, 2).
    ///
    /// Scales by the dominant component's own exponent rather than by
    /// |mantissa|, so components near the f64 range edges cannot overflow an
    /// intermediate; a component more than ~1074 binary orders below the
    /// dominant one flushes to zero, which is inherent to sharing one
    /// exponent and far below every tolerance in this crate.
    pub fn normalized(self) -> ScaledComplex {
        let a = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if a == 0.0 {
            return ScaledComplex::ZERO;
        }
        let k = a.log2().floor() as i64;
        ScaledComplex {
            mantissa: scale_pow2(self.mantissa, -k),
            exponent: self.exponent + k,
        }
    }

    pub fn mul_scalar(&self, w: C64) -> ScaledComplex {
        ScaledComplex {
            mantissa: self.mantissa * w,
            exponent: self.exponent,
        }
        .settled()
    }

    pub fn mul(&self, other: &ScaledComplex) -> ScaledComplex {
        ScaledComplex {
            mantissa: self.mantissa * other.mantissa,
            exponent: self.exponent + other.exponent,
        }
        .settled()
    }

    /// Sum with exponent alignment; a term more than ~1100 binary orders below
    /// the other underflows to zero, far under every tolerance in this crate.
    pub fn add(&self, other: &ScaledComplex) -> ScaledComplex {
        if self.mantissa == C64::new(0.0, 0.0) {
            return *other;
        }
        if other.mantissa == C64::new(0.0, 0.0) {
            return *self;
        }
        let e = self.exponent.max(other.exponent);
        let scale = |v: &ScaledComplex| {
            let d = v.exponent - e;
            if d < -1100 {
                C64::new(0.0, 0.0)
            } else {
                v.mantissa * (d as f64).exp2()
            }
        };
        ScaledComplex {
            mantissa: scale(self) + scale(other),
            exponent: e,
        }
        .settled()
    }

    /// self / other as an ordinary complex; used for relative comparisons.
    pub fn ratio_to(&self, other: &ScaledComplex) -> C64 {
        let d = self.exponent - other.exponent;
        (self.mantissa / other.mantissa) * (d as f64).exp2()
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite()
    }
}

fn check_finite(z: C64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("hermite argument must be finite, got {z}")))
    }
}

/// H_n(z), physicists' convention, via the scaled three-term recurrence.
pub fn hermite(n: usize, z: C64) -> Result<ScaledComplex> {
    check_finite(z)?;
    let mut below = ScaledComplex::ONE; // H_{k−1}
    let mut at = ScaledComplex::from_c64(2.0 * z); // H_k
    match n {
        0 => Ok(below),
        1 => Ok(at),
        _ => {
            for k in 1..n {
                let next = at.mul_scalar(2.0 * z).add(&below.mul_scalar(C64::new(-2.0 * k as f64, 0.0)));
                below = at;
                at = next;
            }
            Ok(at)
        }
    }
}

/// H_0(z)..H_{n_max}(z) in one pass of the recurrence.
///
/// Element k equals `hermite(k, z)` to within one unit in the last place (it
/// is in fact the same arithmetic, so elements agree exactly).
pub fn hermite_batch(n_max: usize, z: C64) -> Result<Vec<ScaledComplex>> {
    check_finite(z)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ScaledComplex::ONE);
    if n_max == 0 {
        return Ok(out);
    }
    out.push(ScaledComplex::from_c64(2.0 * z));
    for k in 1..n_max {
        let next = out[k]
            .mul_scalar(2.0 * z)
            .add(&out[k - 1].mul_scalar(C64::new(-2.0 * k as f64, 0.0)));
        out.push(next);
    }
    Ok(out)
}
