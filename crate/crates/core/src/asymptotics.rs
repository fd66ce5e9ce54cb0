//! Partial Fresnel integrals of the scaled kernel and their leading-order
//! stationary-phase approximation.
//!
//! For the scaled round trip the action on a profile `g` splits at the
//! aperture edges `x = +-1` into
//!
//! ```text
//! I1 = int_1^inf   exp(-i t (x - y/M)^2) g(x) dx
//! I2 = int_-1^1    exp(-i t (x - y/M)^2) g(x) dx
//! I3 = int_-inf^-1 exp(-i t (x - y/M)^2) g(x) dx
//! ```
//!
//! The phase is stationary at `x = y/M`; which integral contains that point
//! depends only on where `y` sits relative to `+-1` and `+-M`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};

/// Distance from `|y| = 1` or `|y| = M` below which `y` counts as a boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;
/// `g` is treated as zero once it falls below this fraction of its peak.
pub const DECAY_THRESHOLD: f64 = 1e-8;
/// Leading-order evaluation needs a large chirp.
pub const MIN_LEADING_ORDER_CHIRP: f64 = 10.0;

const SCAN_STEP: f64 = 0.01;
const SCAN_LIMIT: f64 = 1000.0;
const MAX_CELLS: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `y < -M`
    BelowMinusM,
    /// `-M < y < -1`
    MinusMToMinusOne,
    /// `-1 < y < 1`
    Inner,
    /// `1 < y < M`
    OneToM,
    /// `y > M`
    AboveM,
}

impl Region {
    pub const ALL: [Region; 5] = [
        Region::BelowMinusM,
        Region::MinusMToMinusOne,
        Region::Inner,
        Region::OneToM,
        Region::AboveM,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Region::BelowMinusM => "y<-M",
            Region::MinusMToMinusOne => "-M<y<-1",
            Region::Inner => "-1<y<1",
            Region::OneToM => "1<y<M",
            Region::AboveM => "y>M",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub y: f64,
    pub magnification: f64,
    pub region: Region,
    /// Whether `x = y/M` lies inside the domain of `(I1, I2, I3)`.
    pub contains_stationary: [bool; 3],
}

impl RegionClass {
    /// Index (0, 1, 2) of the integral holding the stationary point.
    pub fn stationary_integral(&self) -> usize {
        self.contains_stationary
            .iter()
            .position(|&b| b)
            .expect("exactly one integral contains the stationary point")
    }
}

pub fn classify_stationary(y: f64, magnification: f64) -> Result<RegionClass> {
    let m = magnification;
    if !(m > 1.0) || !m.is_finite() {
        return Err(CavityError::Domain(format!("need M > 1, got {m}")));
    }
    if !y.is_finite() {
        return Err(CavityError::Domain(format!("y must be finite, got {y}")));
    }
    let a = y.abs();
    if (a - 1.0).abs() < BOUNDARY_TOLERANCE || (a - m).abs() < BOUNDARY_TOLERANCE {
        return Err(CavityError::BoundaryValue { y, magnification: m });
    }
    let region = if y < -m {
        Region::BelowMinusM
    } else if y < -1.0 {
        Region::MinusMToMinusOne
    } else if y < 1.0 {
        Region::Inner
    } else if y < m {
        Region::OneToM
    } else {
        Region::AboveM
    };
    Ok(RegionClass {
        y,
        magnification: m,
        region,
        contains_stationary: [y > m, y > -m && y < m, y < -m],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    StationaryPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialIntegrals {
    pub i1: c64,
    pub i2: c64,
    pub i3: c64,
    pub method: Method,
    pub chirp: f64,
    pub magnification: f64,
    pub y: f64,
    /// Single-pass integral over the whole truncated line (quadrature only).
    pub full: Option<c64>,
}

impl PartialIntegrals {
    pub fn total(&self) -> c64 {
        self.i1 + self.i2 + self.i3
    }

    /// `|I1 + I2 + I3 - full|` relative to the largest of `|full|, |I1|, |I2|, |I3|`.
    ///
    /// The pieces carry endpoint contributions at `+-1` that cancel in the
    /// sum, so `|full|` alone can be far smaller than the numbers being added.
    pub fn additivity_residual(&self) -> f64 {
        let Some(full) = self.full else {
            return 0.0;
        };
        let scale = [full, self.i1, self.i2, self.i3]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let diff = (self.total() - full).norm();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }

    /// Scaled-kernel action `sqrt(i t / pi) (I1 + I2 + I3)`.
    pub fn kernel_action(&self) -> c64 {
        c64::new(0.0, self.chirp / PI).sqrt() * self.total()
    }
}

/// Gaussian test profile `exp(-(x - center)^2 / width^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub center: f64,
    pub width: f64,
}

impl Gaussian {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }

    pub fn eval(&self, x: f64) -> c64 {
        let u = (x - self.center) / self.width;
        c64::new((-u * u).exp(), 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Largest kernel phase change across one cell, in radians; must stay below `pi/2`.
    pub phase_step: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { phase_step: 0.1 }
    }
}

/// Smallest radius beyond which `|g| < 1e-8 max|g|`, by scanning outward.
pub fn decay_radius(g: &dyn Fn(f64) -> c64) -> Result<f64> {
    let steps = (SCAN_LIMIT / SCAN_STEP) as usize;
    let mut peak: f64 = 0.0;
    let samples: Vec<f64> = (0..=steps)
        .map(|k| {
            let x = k as f64 * SCAN_STEP;
            let v = g(x).norm().max(g(-x).norm());
            peak = peak.max(v);
            v
        })
        .collect();
    if peak == 0.0 {
        return Ok(SCAN_STEP);
    }
    let threshold = DECAY_THRESHOLD * peak;
    if samples[steps] >= threshold {
        return Err(CavityError::NonDecaying { radius: SCAN_LIMIT });
    }
    let last = samples.iter().rposition(|&v| v >= threshold).unwrap_or(0);
    Ok((last + 1) as f64 * SCAN_STEP)
}

#[derive(Default, Clone, Copy)]
struct Compensated {
    re: Neumaier,
    im: Neumaier,
}

#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }
}

impl Compensated {
    fn add(&mut self, v: c64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    fn value(&self) -> c64 {
        c64::new(self.re.sum + self.re.carry, self.im.sum + self.im.carry)
    }
}

/// Midpoint quadrature of the three partial integrals on one common cell
/// partition of `[-X, X]` whose cell edges include `+-1`, so the three pieces
/// add up to the single-pass integral up to rounding.
pub fn eval_partial_integrals_quadrature(
    y: f64,
    chirp: f64,
    magnification: f64,
    g: &dyn Fn(f64) -> c64,
    options: &QuadratureOptions,
) -> Result<PartialIntegrals> {
    if !(chirp > 0.0) || !(magnification > 1.0) {
        return Err(CavityError::Domain(format!(
            "need t > 0 and M > 1, got t = {chirp}, M = {magnification}"
        )));
    }
    if !(options.phase_step > 0.0 && options.phase_step < FRAC_PI_2) {
        return Err(CavityError::Undersampled {
            what: "partial-integral quadrature",
            phase_step: options.phase_step,
        });
    }
    // Doubled decay radius.
    let reach = (2.0 * decay_radius(g)?).max(1.0);
    let centre = y / magnification;
    let max_rate = 2.0 * chirp * (reach + centre.abs());
    let cells_per_unit = (max_rate / options.phase_step).ceil().max(1.0) as usize;
    let h = 1.0 / cells_per_unit as f64;
    let half_cells = (reach * cells_per_unit as f64).ceil() as usize;
    if 2 * half_cells > MAX_CELLS {
        return Err(CavityError::Domain(format!(
            "quadrature needs {} cells (limit {MAX_CELLS})",
            2 * half_cells
        )));
    }
    let edge = cells_per_unit;
    let (mut i1, mut i2, mut i3, mut full) = (
        Compensated::default(),
        Compensated::default(),
        Compensated::default(),
        Compensated::default(),
    );
    // Cell k covers [k h, (k + 1) h] for k in -half_cells..half_cells.
    for k in -(half_cells as i64)..half_cells as i64 {
        let x = (k as f64 + 0.5) * h;
        let d = x - centre;
        let term = c64::from_polar(h, -chirp * d * d) * g(x);
        full.add(term);
        if k >= edge as i64 {
            i1.add(term);
        } else if k >= -(edge as i64) {
            i2.add(term);
        } else {
            i3.add(term);
        }
    }
    Ok(PartialIntegrals {
        i1: i1.value(),
        i2: i2.value(),
        i3: i3.value(),
        method: Method::Quadrature,
        chirp,
        magnification,
        y,
        full: Some(full.value()),
    })
}

/// Leading interior stationary-phase term `sqrt(pi / (i t)) g(y/M)`, assigned
/// to the integral that contains `x = y/M`; the other two vanish at this order.
pub fn stationary_phase_leading(
    y: f64,
    chirp: f64,
    magnification: f64,
    g: &dyn Fn(f64) -> c64,
) -> Result<PartialIntegrals> {
    let class = classify_stationary(y, magnification)?;
    if !(chirp >= MIN_LEADING_ORDER_CHIRP) {
        return Err(CavityError::Domain(format!(
            "leading-order stationary phase needs t >= {MIN_LEADING_ORDER_CHIRP}, got {chirp}"
        )));
    }
    let value = c64::from_polar((PI / chirp).sqrt(), -FRAC_PI_4) * g(y / magnification);
    let mut parts = [c64::new(0.0, 0.0); 3];
    parts[class.stationary_integral()] = value;
    Ok(PartialIntegrals {
        i1: parts[0],
        i2: parts[1],
        i3: parts[2],
        method: Method::StationaryPhase,
        chirp,
        magnification,
        y,
        full: None,
    })
}

/// Relative error of the leading-order total against the quadrature total.
pub fn leading_order_error(quadrature: &PartialIntegrals, leading: &PartialIntegrals) -> f64 {
    (quadrature.total() - leading.total()).norm() / quadrature.total().norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(x: f64) -> c64 {
        c64::new((-x * x).exp(), 0.0)
    }

    #[test]
    fn table_examples() {
        let m = 3.0;
        assert_eq!(classify_stationary(2.0 * m, m).unwrap().contains_stationary, [true, false, false]);
        assert_eq!(classify_stationary(0.0, m).unwrap().contains_stationary, [false, true, false]);
        assert_eq!(classify_stationary(-2.0 * m, m).unwrap().contains_stationary, [false, false, true]);
        let c = classify_stationary((1.0 + m) / 2.0, m).unwrap();
        assert_eq!(c.contains_stationary, [false, true, false]);
        assert_eq!(c.region, Region::OneToM);
    }

    #[test]
    fn boundaries_are_rejected() {
        for y in [1.0, -1.0, 3.0, -3.0] {
            assert!(matches!(
                classify_stationary(y, 3.0),
                Err(CavityError::BoundaryValue { .. })
            ));
        }
        assert!(classify_stationary(0.0, 1.0).is_err());
    }

    #[test]
    fn decay_radius_of_gaussian() {
        // exp(-x^2) = 1e-8 at x = sqrt(8 ln 10) ~ 4.292
        let r = decay_radius(&gauss).unwrap();
        assert!((r - 4.30).abs() < 0.011, "{r}");
        assert!(matches!(
            decay_radius(&|_| c64::new(1.0, 0.0)),
            Err(CavityError::NonDecaying { .. })
        ));
    }

    #[test]
    fn even_profile_at_origin_has_equal_outer_integrals() {
        let p = eval_partial_integrals_quadrature(0.0, 50.0, 4.0, &gauss, &Default::default()).unwrap();
        assert!((p.i1 - p.i3).norm() <= 1e-14 * p.i1.norm().max(1e-300));
        assert!(p.additivity_residual() < 1e-12);
    }

    #[test]
    fn full_line_gaussian_matches_closed_form() {
        // int exp(-i t x^2) exp(-x^2) dx = sqrt(pi / (1 + i t))
        let t = 50.0;
        let p = eval_partial_integrals_quadrature(0.0, t, 4.0, &gauss, &Default::default()).unwrap();
        let exact = (c64::new(PI, 0.0) / c64::new(1.0, t)).sqrt();
        assert!((p.total() - exact).norm() / exact.norm() < 1e-9);
    }

    #[test]
    fn leading_order_at_origin() {
        let t = 50.0;
        let lead = stationary_phase_leading(0.0, t, 4.0, &gauss).unwrap();
        let expected = (c64::new(PI, 0.0) / c64::new(0.0, t)).sqrt();
        assert!((lead.i2 - expected).norm() < 1e-15);
        assert_eq!(lead.i1, c64::new(0.0, 0.0));
        let quad = eval_partial_integrals_quadrature(0.0, t, 4.0, &gauss, &Default::default()).unwrap();
        assert!(leading_order_error(&quad, &lead) < 0.05);
    }

    #[test]
    fn leading_order_needs_large_chirp() {
        assert!(stationary_phase_leading(0.0, 5.0, 4.0, &gauss).is_err());
        assert!(stationary_phase_leading(1.0, 50.0, 4.0, &gauss).is_err());
    }

    #[test]
    fn rejects_coarse_phase_step() {
        let opts = QuadratureOptions { phase_step: 2.0 };
        assert!(matches!(
            eval_partial_integrals_quadrature(0.0, 50.0, 4.0, &gauss, &opts),
            Err(CavityError::Undersampled { .. })
        ));
    }

    #[test]
    fn mirrored_observation_swaps_outer_integrals() {
        let (t, m) = (40.0, 2.5);
        let opts = QuadratureOptions::default();
        let a = eval_partial_integrals_quadrature(1.7, t, m, &gauss, &opts).unwrap();
        let b = eval_partial_integrals_quadrature(-1.7, t, m, &gauss, &opts).unwrap();
        let scale = a.total().norm();
        assert!((a.i1 - b.i3).norm() < 1e-12 * scale);
        assert!((a.i3 - b.i1).norm() < 1e-12 * scale);
        assert!((a.i2 - b.i2).norm() < 1e-12 * scale);
    }
}
