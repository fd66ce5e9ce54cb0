//! Physical description of the coupled cavity, paraxial ray matrices and
//! the Horwitz scaling of the unstable sub-cavity.
//!
//! All lengths are SI meters. Two concave end mirrors of radius `R` face a
//! bi-convex central mirror of radius `r` and half-aperture `a`; each
//! half-cavity has length `l`, so the whole cavity is `L = 2l` long.

use std::f64::consts::PI;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};

/// Relative tolerance on `AD - BC = 1`.
pub const DETERMINANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    /// Concave end-mirror radius of curvature `R`.
    pub mirror_radius: f64,
    /// Central bi-convex mirror radius `r`.
    pub convex_radius: f64,
    /// Half-cavity length `l`.
    pub half_length: f64,
    /// Central mirror half-aperture `a`.
    pub half_aperture: f64,
    pub wavelength: f64,
}

impl CavityGeometry {
    pub fn new(
        mirror_radius: f64,
        convex_radius: f64,
        half_length: f64,
        half_aperture: f64,
        wavelength: f64,
    ) -> Result<Self> {
        let geom = Self {
            mirror_radius,
            convex_radius,
            half_length,
            half_aperture,
            wavelength,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Checks positivity; warns (but accepts) when the aperture is not small
    /// compared to the cavity length.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("R", self.mirror_radius),
            ("r", self.convex_radius),
            ("l", self.half_length),
            ("a", self.half_aperture),
            ("lambda", self.wavelength),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(CavityError::InvalidGeometry(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if !self.is_paraxial() {
            log::warn!(
                "aperture a = {} m is not small against l = {} m (a >= l/5); paraxial results are suspect",
                self.half_aperture,
                self.half_length
            );
        }
        Ok(())
    }

    pub fn is_paraxial(&self) -> bool {
        self.half_aperture < self.half_length / 5.0
    }

    /// Whole-cavity length `L = 2l`; the central mirror is treated as a plane.
    pub fn cavity_length(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn with_wavelength(&self, wavelength: f64) -> Result<Self> {
        Self::new(
            self.mirror_radius,
            self.convex_radius,
            self.half_length,
            self.half_aperture,
            wavelength,
        )
    }

    /// Fresnel number `a^2 / (2 l lambda (1 - l/R))`; negative when `l > R`.
    pub fn fresnel_number(&self) -> f64 {
        let l = self.half_length;
        self.half_aperture * self.half_aperture
            / (2.0 * l * self.wavelength * (1.0 - l / self.mirror_radius))
    }

    /// Everything expressed in units of the half-aperture `a`.
    pub fn scaled(&self) -> ScaledUnits {
        let a = self.half_aperture;
        let half = AbcdMatrix::half_cavity(self.half_length, self.mirror_radius);
        ScaledUnits {
            wavelength: self.wavelength / a,
            convex_radius: self.convex_radius / a,
            half_cavity: AbcdMatrix {
                a: half.a,
                b: half.b / a,
                c: half.c * a,
                d: half.d,
            },
        }
    }
}

/// Geometry in units of the half-aperture; the aperture edge sits at `|y| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledUnits {
    pub wavelength: f64,
    pub convex_radius: f64,
    pub half_cavity: AbcdMatrix,
}

/// Paraxial ray matrix acting on `(y, y')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcdMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl AbcdMatrix {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Free flight over `l`, reflection off the concave mirror `R`, and back.
    /// Formula only; see [`abcd_half_cavity`] for the checked constructor.
    pub fn half_cavity(half_length: f64, mirror_radius: f64) -> Self {
        let g = 1.0 - 2.0 * half_length / mirror_radius;
        Self {
            a: g,
            b: 2.0 * half_length * (1.0 - half_length / mirror_radius),
            c: -2.0 / mirror_radius,
            d: g,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn half_trace(&self) -> f64 {
        0.5 * (self.a + self.d)
    }

    /// `|det - 1|` relative to the magnitude of the two products.
    pub fn determinant_defect(&self) -> f64 {
        let scale = (self.a * self.d).abs().max((self.b * self.c).abs()).max(1.0);
        (self.determinant() - 1.0).abs() / scale
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant_defect() <= DETERMINANT_TOLERANCE
    }

    /// `B = 0` makes the Fresnel kernel singular.
    pub fn is_degenerate(&self) -> bool {
        self.b == 0.0
    }
}

impl Mul for AbcdMatrix {
    type Output = AbcdMatrix;

    fn mul(self, rhs: AbcdMatrix) -> AbcdMatrix {
        AbcdMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Half-cavity ray matrix `A = D = 1 - 2l/R`, `B = 2l(1 - l/R)`, `C = -2/R`.
pub fn abcd_half_cavity(half_length: f64, mirror_radius: f64) -> Result<AbcdMatrix> {
    if !(mirror_radius > 0.0) || !(half_length >= 0.0) {
        return Err(CavityError::InvalidGeometry(format!(
            "half-cavity needs l >= 0 and R > 0, got l = {half_length}, R = {mirror_radius}"
        )));
    }
    let m = AbcdMatrix::half_cavity(half_length, mirror_radius);
    if m.is_degenerate() {
        return Err(CavityError::DegenerateKernel(m));
    }
    Ok(m)
}

/// Thin defocusing mirror of radius `r`: `C = +2/r`.
pub fn abcd_convex_reflection(convex_radius: f64) -> AbcdMatrix {
    AbcdMatrix {
        a: 1.0,
        b: 0.0,
        c: 2.0 / convex_radius,
        d: 1.0,
    }
}

/// Round trip of one sub-cavity referred to the central mirror plane.
pub fn subcavity_roundtrip(geom: &CavityGeometry) -> Result<AbcdMatrix> {
    let half = abcd_half_cavity(geom.half_length, geom.mirror_radius)?;
    Ok(abcd_convex_reflection(geom.convex_radius) * half)
}

/// `M = m + sqrt(m^2 - 1)`; only defined off the stable band `|m| < 1`.
pub fn magnification_from_trace(half_trace: f64) -> Result<f64> {
    if !(half_trace.abs() >= 1.0) {
        return Err(CavityError::Domain(format!(
            "half-trace m = {half_trace} lies in the stable band |m| < 1; no real magnification"
        )));
    }
    Ok(half_trace + (half_trace * half_trace - 1.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorwitzParams {
    pub magnification: f64,
    pub fresnel_number: f64,
    /// `t = pi M F`.
    pub chirp: f64,
}

impl HorwitzParams {
    pub fn new(magnification: f64, fresnel_number: f64) -> Result<Self> {
        if !(magnification >= 1.0) || !magnification.is_finite() {
            return Err(CavityError::Domain(format!(
                "magnification must be >= 1, got {magnification}"
            )));
        }
        if !(fresnel_number > 0.0) || !fresnel_number.is_finite() {
            return Err(CavityError::Domain(format!(
                "Fresnel number must be > 0, got {fresnel_number}"
            )));
        }
        Ok(Self {
            magnification,
            fresnel_number,
            chirp: PI * magnification * fresnel_number,
        })
    }

    /// Quadratic-phase coefficient `alpha` of the gauge `g(y) = exp(i alpha y^2) v(y)`
    /// taking the round-trip kernel `xi(y) K(y, y')` onto `exp(-i t (y' - y/M)^2)`.
    ///
    /// `half_cavity_a` is the `A` element of the half-cavity matrix. For a
    /// round trip with `A = D` this is `pi F (M - 1/M) / 2`.
    pub fn gauge_chirp(&self, half_cavity_a: f64) -> f64 {
        PI * self.fresnel_number * (self.magnification - half_cavity_a)
    }

    /// Scaled-operator eigenvalues are `sqrt(M)` times the physical ones.
    pub fn eigenvalue_scale(&self) -> f64 {
        self.magnification.sqrt()
    }
}

/// Closed-form Horwitz parameters of the unstable sub-cavity.
pub fn horwitz_params(geom: &CavityGeometry) -> Result<HorwitzParams> {
    let (big_r, r, l) = (geom.mirror_radius, geom.convex_radius, geom.half_length);
    if l >= big_r {
        return Err(CavityError::Domain(format!(
            "l = {l} >= R = {big_r}: Fresnel number is not positive"
        )));
    }
    let outer = (l + r) * (big_r - l);
    let inner = l * (big_r - r - l);
    // Rounding at the marginal point l = R - r.
    let slack = 1e-12 * l * big_r;
    if outer < -slack || inner < -slack {
        return Err(CavityError::Domain(format!(
            "negative radicand in the magnification formula (l = {l}, R - r = {})",
            big_r - r
        )));
    }
    let root_sum = outer.max(0.0).sqrt() + inner.max(0.0).sqrt();
    let mut magnification = root_sum * root_sum / (r * big_r);
    if magnification < 1.0 && magnification > 1.0 - 1e-12 {
        magnification = 1.0;
    }
    HorwitzParams::new(magnification, geom.fresnel_number())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `L < 2R`.
    pub whole_cavity_stable: bool,
    /// `l < R - r`.
    pub subcavity_unstable: bool,
    /// `R - r < l < R`.
    pub subcavity_stable: bool,
    pub half_trace_m: f64,
}

pub fn classify_stability(geom: &CavityGeometry) -> StabilityReport {
    let (big_r, r, l) = (geom.mirror_radius, geom.convex_radius, geom.half_length);
    let roundtrip =
        abcd_convex_reflection(r) * AbcdMatrix::half_cavity(geom.half_length, geom.mirror_radius);
    StabilityReport {
        whole_cavity_stable: geom.cavity_length() < 2.0 * big_r,
        subcavity_unstable: l < big_r - r,
        subcavity_stable: big_r - r < l && l < big_r,
        half_trace_m: roundtrip.half_trace(),
    }
}
