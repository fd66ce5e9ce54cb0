//! Discretized propagation and scattering operators on a midpoint grid.
//!
//! Coordinates are in units of the half-aperture `a`, so the central
//! mirror occupies `|y| < 1`. Integral kernels are sampled with the midpoint
//! rule and the weight `h` is folded into the matrix entries, which makes the
//! matrices directly composable and diagonalizable.

use std::f64::consts::{FRAC_PI_2, PI};

use faer::Mat;
use num_complex::Complex64 as c64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};
use crate::geometry::{classify_stability, AbcdMatrix, CavityGeometry, HorwitzParams};

/// Smallest accepted distance between a sample and the aperture edge.
const EDGE_CLEARANCE: f64 = 1e-14;
/// Fraction of the window covered by the optional cosine taper.
const TAPER_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    half_width: f64,
    step: f64,
    points: Vec<f64>,
    apodized: bool,
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Quadrature weight `h = 2W/n`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_apodized(&self) -> bool {
        self.apodized
    }

    /// Enables the cosine edge taper. Tapered kernels are not unitary, so the
    /// unitarity checks are expected to degrade.
    pub fn with_apodization(mut self, apodized: bool) -> Self {
        self.apodized = apodized;
        self
    }

    /// Taper weight at sample `i`; 1 everywhere unless apodized.
    pub fn taper(&self, i: usize) -> f64 {
        if !self.apodized {
            return 1.0;
        }
        let inner = (1.0 - TAPER_FRACTION) * self.half_width;
        let y = self.points[i].abs();
        if y <= inner {
            1.0
        } else {
            let s = (y - inner) / (TAPER_FRACTION * self.half_width);
            0.5 * (1.0 + (PI * s.min(1.0)).cos())
        }
    }

    pub fn inside_aperture(&self, i: usize) -> bool {
        self.points[i].abs() < 1.0
    }

    /// Discrete `L2` norm `sqrt(sum |v_i|^2 h)`.
    pub fn norm(&self, v: &[c64]) -> f64 {
        (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.step).sqrt()
    }
}

/// Midpoint grid `y_i = -W + (i + 1/2) h` on `[-W, W]`.
pub fn make_grid(n: usize, half_width: f64) -> Result<Grid> {
    if n < 4 || n % 2 != 0 {
        return Err(CavityError::InvalidGrid(format!(
            "n must be even and >= 4, got {n}"
        )));
    }
    if !(half_width > 1.0) || !half_width.is_finite() {
        return Err(CavityError::InvalidGrid(format!(
            "half-width must exceed the aperture (W > 1), got {half_width}"
        )));
    }
    let step = 2.0 * half_width / n as f64;
    let points: Vec<f64> = (0..n)
        .map(|i| -half_width + (i as f64 + 0.5) * step)
        .collect();
    if let Some(y) = points
        .iter()
        .find(|y| (y.abs() - 1.0).abs() < EDGE_CLEARANCE)
    {
        return Err(CavityError::InvalidGrid(format!(
            "sample y = {y} lies on the aperture edge; change n or W"
        )));
    }
    Ok(Grid {
        n,
        half_width,
        step,
        points,
        apodized: false,
    })
}

/// Default window `max(3, 1.5 M)` so the magnified aperture image fits.
pub fn default_half_width(magnification: Option<f64>) -> f64 {
    magnification.map_or(3.0, |m| (1.5 * m).max(3.0))
}

/// Largest adjacent-sample phase increment of `exp(-i t (x - y/M)^2)` over the window.
pub fn scaled_phase_step(grid: &Grid, chirp: f64, magnification: f64) -> f64 {
    grid.step * 2.0 * chirp * grid.half_width * (1.0 + 1.0 / magnification)
}

/// Nyquist guard for the scaled kernel: phase step below `pi/2`.
pub fn grid_adequacy(grid: &Grid, chirp: f64, magnification: f64) -> bool {
    scaled_phase_step(grid, chirp, magnification) < FRAC_PI_2
}

/// Largest adjacent-sample phase increment of the Fresnel kernel exponent
/// `pi/(B lambda) (A y'^2 - 2 y y' + D y^2)` in either coordinate.
pub fn propagator_phase_step(grid: &Grid, abcd: &AbcdMatrix, lambda_scaled: f64) -> f64 {
    let coef = PI / (abcd.b * lambda_scaled).abs();
    let slope = 2.0 * grid.half_width * (abcd.a.abs().max(abcd.d.abs()) + 1.0);
    coef * slope * grid.step
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// `v1 = v2`
    Even,
    /// `v1 = -v2`
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Dense kernel matrix on a grid.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: Mat<c64>,
    grid: Grid,
    quadrature_absorbed: bool,
}

impl OperatorMatrix {
    pub fn new(entries: Mat<c64>, grid: Grid, quadrature_absorbed: bool) -> Result<Self> {
        if entries.nrows() != grid.n || entries.ncols() != grid.n {
            return Err(CavityError::OperatorMismatch(format!(
                "{}x{} matrix on a grid of {} points",
                entries.nrows(),
                entries.ncols(),
                grid.n
            )));
        }
        Ok(Self {
            entries,
            grid,
            quadrature_absorbed,
        })
    }

    pub fn entries(&self) -> &Mat<c64> {
        &self.entries
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn quadrature_absorbed(&self) -> bool {
        self.quadrature_absorbed
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.entries[(i, j)]
    }

    /// Operator product `self * rhs`; both factors must carry their weights.
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if !(self.quadrature_absorbed && rhs.quadrature_absorbed) {
            return Err(CavityError::OperatorMismatch(
                "cannot compose kernels without folded quadrature weights".into(),
            ));
        }
        if self.grid != rhs.grid {
            return Err(CavityError::OperatorMismatch(
                "operators live on different grids".into(),
            ));
        }
        OperatorMatrix::new(&self.entries * &rhs.entries, self.grid.clone(), true)
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        mat_vec(&self.entries, v)
    }
}

pub(crate) fn mat_vec(m: &Mat<c64>, v: &[c64]) -> Vec<c64> {
    assert_eq!(m.ncols(), v.len());
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Block operator `[[rho, tau], [tau, rho]]` acting on the doublet `(v1, v2)`.
#[derive(Debug, Clone)]
pub struct CoupledOperator {
    entries: Mat<c64>,
    grid: Grid,
}

impl CoupledOperator {
    pub fn entries(&self) -> &Mat<c64> {
        &self.entries
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Exact (bitwise) block mirror symmetry.
    pub fn is_block_symmetric(&self) -> bool {
        let n = self.grid.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.entries[(i, j)] == self.entries[(i + n, j + n)]
                    && self.entries[(i, j + n)] == self.entries[(i + n, j)]
            })
        })
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        mat_vec(&self.entries, v)
    }
}

/// Diagonal operator stored as amplitude and phase, `m_i = A_i exp(i phi_i)`.
///
/// Scattering masks are exact indicators times pure phases, so the
/// amplitudes carry the unitarity algebra without rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskVector {
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    values: Vec<c64>,
    grid: Grid,
}

impl MaskVector {
    fn from_polar(amplitude: Vec<f64>, phase: Vec<f64>, grid: &Grid) -> Self {
        let values = amplitude
            .iter()
            .zip(&phase)
            .map(|(&r, &p)| if r == 0.0 { c64::new(0.0, 0.0) } else { c64::from_polar(r, p) })
            .collect();
        Self {
            amplitude,
            phase,
            values,
            grid: grid.clone(),
        }
    }

    pub fn from_values(values: Vec<c64>, grid: &Grid) -> Result<Self> {
        if values.len() != grid.n {
            return Err(CavityError::OperatorMismatch(format!(
                "mask of length {} on a grid of {} points",
                values.len(),
                grid.n
            )));
        }
        Ok(Self {
            amplitude: values.iter().map(|z| z.norm()).collect(),
            phase: values.iter().map(|z| z.arg()).collect(),
            values,
            grid: grid.clone(),
        })
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phases(&self) -> &[f64] {
        &self.phase
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `diag(self) * op`
    pub fn apply_left(&self, op: &OperatorMatrix) -> Result<OperatorMatrix> {
        if op.grid != self.grid {
            return Err(CavityError::OperatorMismatch(
                "mask and operator live on different grids".into(),
            ));
        }
        let m = Mat::from_fn(self.grid.n, self.grid.n, |i, j| {
            self.values[i] * op.entries[(i, j)]
        });
        OperatorMatrix::new(m, self.grid.clone(), op.quadrature_absorbed)
    }

    fn combine(&self, other: &MaskVector, f: impl Fn(c64, c64) -> c64) -> MaskVector {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(values, &self.grid).expect("masks share a grid")
    }
}

/// Fresnel propagator `sqrt(i/(B lambda)) exp[-i pi/(B lambda) (A y'^2 - 2 y y' + D y^2)] h`.
///
/// `abcd` and `lambda_scaled` must already be in units of the half-aperture.
/// The branch of `sqrt(i / (B lambda))` is the principal one.
pub fn propagator_kernel(
    grid: &Grid,
    abcd: &AbcdMatrix,
    lambda_scaled: f64,
) -> Result<OperatorMatrix> {
    if abcd.is_degenerate() {
        return Err(CavityError::DegenerateKernel(*abcd));
    }
    let phase_step = propagator_phase_step(grid, abcd, lambda_scaled);
    if !(phase_step < FRAC_PI_2) {
        return Err(CavityError::Undersampled {
            what: "propagator kernel",
            phase_step,
        });
    }
    let b_lambda = abcd.b * lambda_scaled;
    let prefactor = c64::new(0.0, 1.0 / b_lambda).sqrt() * grid.step;
    let coef = PI / b_lambda;
    let y = &grid.points;
    let taper: Vec<f64> = (0..grid.n).map(|i| grid.taper(i)).collect();
    let entries = Mat::from_fn(grid.n, grid.n, |i, j| {
        let phase = -coef * (abcd.a * y[j] * y[j] - 2.0 * y[i] * y[j] + abcd.d * y[i] * y[i]);
        prefactor * c64::from_polar(taper[i] * taper[j], phase)
    });
    OperatorMatrix::new(entries, grid.clone(), true)
}

/// Half-cavity propagator of `geom` on `grid`.
pub fn half_cavity_kernel(grid: &Grid, geom: &CavityGeometry) -> Result<OperatorMatrix> {
    let s = geom.scaled();
    propagator_kernel(grid, &s.half_cavity, s.wavelength)
}

fn mirror_phase(grid: &Grid, r_scaled: f64, lambda_scaled: f64) -> Vec<f64> {
    let coef = 2.0 * PI / (r_scaled * lambda_scaled);
    grid.points.iter().map(|y| -coef * y * y).collect()
}

/// Convex-mirror phase `xi(y) = exp(-2 pi i y^2 / (r lambda))`, unmasked.
pub fn reflection_phase(grid: &Grid, r_scaled: f64, lambda_scaled: f64) -> MaskVector {
    MaskVector::from_polar(vec![1.0; grid.n], mirror_phase(grid, r_scaled, lambda_scaled), grid)
}

fn indicator(grid: &Grid, inside: bool) -> Vec<f64> {
    (0..grid.n)
        .map(|i| if grid.inside_aperture(i) == inside { 1.0 } else { 0.0 })
        .collect()
}

/// Transmission past the central mirror: `Theta(|y| - 1)`.
pub fn build_transmission(grid: &Grid) -> MaskVector {
    MaskVector::from_polar(indicator(grid, false), vec![0.0; grid.n], grid)
}

/// Reflection off the central mirror: `Theta(1 - |y|) xi(y)`.
pub fn build_reflection(grid: &Grid, r_scaled: f64, lambda_scaled: f64) -> MaskVector {
    MaskVector::from_polar(
        indicator(grid, true),
        mirror_phase(grid, r_scaled, lambda_scaled),
        grid,
    )
}

/// Worst pointwise violations of `|T|^2 + |R|^2 = 1` and `T conj(R) + conj(T) R = 0`.
pub fn scattering_residuals(reflection: &MaskVector, transmission: &MaskVector) -> (f64, f64) {
    let mut sum: f64 = 0.0;
    let mut cross: f64 = 0.0;
    for i in 0..reflection.amplitude.len() {
        let (rt, tt) = (reflection.amplitude[i], transmission.amplitude[i]);
        sum = sum.max((tt * tt + rt * rt - 1.0).abs());
        // |T conj(R) + conj(T) R| = 2 |T| |R| |cos(phi_T - phi_R)|
        let dphi = transmission.phase[i] - reflection.phase[i];
        cross = cross.max((2.0 * tt * rt * dphi.cos()).abs());
    }
    (sum, cross)
}

fn scattering_masks(grid: &Grid, geom: &CavityGeometry) -> (MaskVector, MaskVector) {
    let s = geom.scaled();
    (
        build_reflection(grid, s.convex_radius, s.wavelength),
        build_transmission(grid),
    )
}

fn require_whole_cavity_stable(geom: &CavityGeometry) -> Result<()> {
    if !classify_stability(geom).whole_cavity_stable {
        return Err(CavityError::Stability(format!(
            "coupled spectra need a globally stable cavity (L = {} < 2R = {})",
            geom.cavity_length(),
            2.0 * geom.mirror_radius
        )));
    }
    Ok(())
}

/// Round trip of a single hard-edged sub-cavity, `rho = diag(R) K`.
pub fn assemble_decoupled(grid: &Grid, geom: &CavityGeometry) -> Result<OperatorMatrix> {
    let kernel = half_cavity_kernel(grid, geom)?;
    let (reflection, _) = scattering_masks(grid, geom);
    reflection.apply_left(&kernel)
}

/// Full doublet operator `[[diag(R) K, diag(T) K], [diag(T) K, diag(R) K]]`.
pub fn assemble_coupled(grid: &Grid, geom: &CavityGeometry) -> Result<CoupledOperator> {
    require_whole_cavity_stable(geom)?;
    let kernel = half_cavity_kernel(grid, geom)?;
    let (reflection, transmission) = scattering_masks(grid, geom);
    couple_with_masks(&kernel, &reflection, &transmission)
}

/// Block assembly from explicit scattering masks.
pub fn couple_with_masks(
    kernel: &OperatorMatrix,
    reflection: &MaskVector,
    transmission: &MaskVector,
) -> Result<CoupledOperator> {
    let rho = reflection.apply_left(kernel)?;
    let tau = transmission.apply_left(kernel)?;
    let n = kernel.grid.n;
    let mut entries = Mat::<c64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let r = rho.entries[(i, j)];
            let t = tau.entries[(i, j)];
            entries[(i, j)] = r;
            entries[(i + n, j + n)] = r;
            entries[(i, j + n)] = t;
            entries[(i + n, j)] = t;
        }
    }
    Ok(CoupledOperator {
        entries,
        grid: kernel.grid.clone(),
    })
}

/// Parity sector `(diag(R) + p diag(T)) K` of the coupled operator.
pub fn assemble_parity(grid: &Grid, geom: &CavityGeometry, parity: Parity) -> Result<OperatorMatrix> {
    require_whole_cavity_stable(geom)?;
    let kernel = half_cavity_kernel(grid, geom)?;
    let (reflection, transmission) = scattering_masks(grid, geom);
    parity_with_masks(&kernel, &reflection, &transmission, parity)
}

pub fn parity_with_masks(
    kernel: &OperatorMatrix,
    reflection: &MaskVector,
    transmission: &MaskVector,
    parity: Parity,
) -> Result<OperatorMatrix> {
    let p = parity.sign();
    reflection
        .combine(transmission, |r, t| r + t * p)
        .apply_left(kernel)
}

/// Horwitz-scaled round trip `sqrt(i t/pi) exp(-i t (x - y/M)^2) h`, left-masked by
/// `Theta(1 - |y|) + p Theta(|y| - 1) conj(xi(y))`.
///
/// Its eigenvalues are `sqrt(M)` times those of [`assemble_parity`] and its
/// eigenvectors are the parity modes after [`gauge_transform`].
pub fn assemble_scaled(
    grid: &Grid,
    horwitz: &HorwitzParams,
    r_scaled: f64,
    lambda_scaled: f64,
    parity: Parity,
) -> Result<OperatorMatrix> {
    let (t, m) = (horwitz.chirp, horwitz.magnification);
    if !grid_adequacy(grid, t, m) {
        return Err(CavityError::Undersampled {
            what: "scaled kernel",
            phase_step: scaled_phase_step(grid, t, m),
        });
    }
    let xi = reflection_phase(grid, r_scaled, lambda_scaled);
    let p = parity.sign();
    let mask: Vec<c64> = (0..grid.n)
        .map(|i| {
            if grid.inside_aperture(i) {
                c64::new(1.0, 0.0)
            } else {
                xi.values[i].conj() * p
            }
        })
        .collect();
    let prefactor = c64::new(0.0, t / PI).sqrt() * grid.step;
    let x = &grid.points;
    let taper: Vec<f64> = (0..grid.n).map(|i| grid.taper(i)).collect();
    let entries = Mat::from_fn(grid.n, grid.n, |i, j| {
        let d = x[j] - x[i] / m;
        mask[i] * prefactor * c64::from_polar(taper[i] * taper[j], -t * d * d)
    });
    OperatorMatrix::new(entries, grid.clone(), true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeDirection {
    /// physical `v` to scaled `g`
    ToScaled,
    /// scaled `g` to physical `v`
    ToPhysical,
}

/// Pointwise chirp `exp(+i alpha y^2)` (to scaled) or its conjugate (to physical).
///
/// `chirp` is `alpha`, see [`HorwitzParams::gauge_chirp`].
pub fn gauge_transform(
    v: &[c64],
    grid: &Grid,
    chirp: f64,
    direction: GaugeDirection,
) -> Result<Vec<c64>> {
    if v.len() != grid.n {
        return Err(CavityError::OperatorMismatch(format!(
            "vector of length {} on a grid of {} points",
            v.len(),
            grid.n
        )));
    }
    let sign = match direction {
        GaugeDirection::ToScaled => 1.0,
        GaugeDirection::ToPhysical => -1.0,
    };
    Ok(v.iter()
        .zip(&grid.points)
        .map(|(z, y)| z * c64::from_polar(1.0, sign * chirp * y * y))
        .collect())
}

/// Residuals of the scattering and propagation unitarity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitarityReport {
    /// `max |T|^2 + |R|^2 - 1`
    pub mask_sum: f64,
    /// `max |T conj(R) + conj(T) R|`
    pub mask_cross: f64,
    /// Power-iteration estimate of `||K^H K - I||_2`. The windowed kernel
    /// always has singular values near zero, so this stays close to 1.
    pub kernel_spectral: f64,
    /// Worst relative norm change of smooth probe fields confined to the
    /// aperture after one half-cavity propagation.
    pub kernel_probe: f64,
    /// Relative norm change of random doublets pushed through the scattering matrix.
    pub norm_conservation: f64,
}

pub fn check_unitarity(grid: &Grid, geom: &CavityGeometry) -> Result<UnitarityReport> {
    let (reflection, transmission) = scattering_masks(grid, geom);
    let (r, t) = (reflection.values(), transmission.values());

    let (mask_sum, mask_cross) = scattering_residuals(&reflection, &transmission);

    let kernel = half_cavity_kernel(grid, geom)?;
    let kernel_spectral = gram_defect_estimate(&kernel, 60);
    let kernel_probe = probe_norm_defect(&kernel);

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut norm_conservation: f64 = 0.0;
    for _ in 0..10 {
        let mut draw = || -> Vec<c64> {
            (0..grid.n)
                .map(|_| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let (u1, u2) = (draw(), draw());
        let v1: Vec<c64> = (0..grid.n).map(|i| t[i] * u1[i] + r[i] * u2[i]).collect();
        let v2: Vec<c64> = (0..grid.n).map(|i| r[i] * u1[i] + t[i] * u2[i]).collect();
        let before = grid.norm(&u1).powi(2) + grid.norm(&u2).powi(2);
        let after = grid.norm(&v1).powi(2) + grid.norm(&v2).powi(2);
        norm_conservation = norm_conservation.max((before - after).abs() / before);
    }

    Ok(UnitarityReport {
        mask_sum,
        mask_cross,
        kernel_spectral,
        kernel_probe,
        norm_conservation,
    })
}

/// Largest |eigenvalue| of the Hermitian `K^H K - I` by power iteration.
fn gram_defect_estimate(kernel: &OperatorMatrix, iterations: usize) -> f64 {
    let n = kernel.grid.n;
    let k = &kernel.entries;
    let kh = k.adjoint().to_owned();
    let mut v: Vec<c64> = (0..n)
        .map(|i| c64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05))
        .collect();
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        let kv = mat_vec(k, &v);
        let w: Vec<c64> = mat_vec(&kh, &kv)
            .into_iter()
            .zip(&v)
            .map(|(a, b)| a - b)
            .collect();
        estimate = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w;
    }
    estimate
}

/// Gaussian probes of width 1/3 centred at -0.5, 0, 0.5 (negligible at the edge).
fn probe_norm_defect(kernel: &OperatorMatrix) -> f64 {
    let grid = &kernel.grid;
    [-0.5, 0.0, 0.5]
        .iter()
        .map(|&c| {
            let v: Vec<c64> = grid
                .points
                .iter()
                .map(|y| c64::new((-(y - c) * (y - c) * 4.5).exp(), 0.0))
                .collect();
            let out = kernel.apply(&v);
            (grid.norm(&out) / grid.norm(&v) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{abcd_half_cavity, horwitz_params};

    /// Reference geometry with the wavelength chosen so that `t = 20`.
    fn g0_t20() -> CavityGeometry {
        let g = CavityGeometry::new(1.0, 0.2, 0.5, 1e-3, 500e-9).unwrap();
        let h = horwitz_params(&g).unwrap();
        g.with_wavelength(g.wavelength * h.chirp / 20.0).unwrap()
    }

    #[test]
    fn grid_small_example() {
        let g = make_grid(4, 2.0).unwrap();
        assert_eq!(g.points(), &[-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(g.step(), 1.0);
        assert_eq!(g.step() * g.n() as f64, 2.0 * g.half_width());
    }

    #[test]
    fn grid_is_symmetric_and_increasing() {
        let g = make_grid(16, 2.0).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 16);
        for i in 0..8 {
            assert_eq!(p[i] + p[15 - i], 0.0);
        }
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(make_grid(15, 2.0).is_err());
        assert!(make_grid(2, 2.0).is_err());
        assert!(make_grid(16, 1.0).is_err());
        // n = 4, W = 4/3 puts samples at +-1.
        assert!(matches!(make_grid(4, 4.0 / 3.0), Err(CavityError::InvalidGrid(_))));
    }

    #[test]
    fn adequacy_examples() {
        let fine = make_grid(2048, 3.0).unwrap();
        assert!((scaled_phase_step(&fine, 20.0, 5.0) - 0.421875).abs() < 1e-12);
        assert!(grid_adequacy(&fine, 20.0, 5.0));
        let coarse = make_grid(128, 3.0).unwrap();
        assert!((scaled_phase_step(&coarse, 20.0, 5.0) - 6.75).abs() < 1e-12);
        assert!(!grid_adequacy(&coarse, 20.0, 5.0));
        assert!(grid_adequacy(&coarse, 1e-9, 5.0));
    }

    #[test]
    fn kernel_has_constant_modulus_and_is_symmetric() {
        let grid = make_grid(512, 3.0).unwrap();
        let abcd = AbcdMatrix { a: 0.5, b: 375.0, c: -2e-3, d: 0.5 };
        let lambda = 1e-3;
        let k = propagator_kernel(&grid, &abcd, lambda).unwrap();
        let expected = grid.step() / (abcd.b * lambda).sqrt();
        for i in 0..grid.n() {
            for j in 0..grid.n() {
                let z = k.get(i, j);
                assert!((z.norm() - expected).abs() <= 1e-13 * expected);
                assert_eq!(z, k.get(j, i));
            }
        }
        assert!(k.quadrature_absorbed());
    }

    #[test]
    fn kernel_errors() {
        let grid = make_grid(64, 3.0).unwrap();
        let flat = AbcdMatrix { a: 1.0, b: 0.0, c: -2.0, d: 1.0 };
        assert!(matches!(
            propagator_kernel(&grid, &flat, 1e-3),
            Err(CavityError::DegenerateKernel(_))
        ));
        let g = g0_t20();
        assert!(matches!(
            half_cavity_kernel(&make_grid(32, 7.2).unwrap(), &g),
            Err(CavityError::Undersampled { .. })
        ));
    }

    #[test]
    fn kernel_branch_is_principal_sqrt_i() {
        let grid = make_grid(16, 2.0).unwrap();
        let abcd = abcd_half_cavity(0.25, 1.0).unwrap();
        let abcd = AbcdMatrix { b: abcd.b * 1e3, c: abcd.c * 1e-3, ..abcd };
        let k = propagator_kernel(&grid, &abcd, 1.0).unwrap();
        // Remove the exponent at (i, j) and compare the leftover phase with pi/4.
        let y = grid.points();
        let (i, j) = (3, 11);
        let coef = PI / abcd.b;
        let phase = -coef * (abcd.a * y[j] * y[j] - 2.0 * y[i] * y[j] + abcd.d * y[i] * y[i]);
        let residue = k.get(i, j) * c64::from_polar(1.0, -phase);
        assert!((residue.arg() - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_phase_properties() {
        let grid = make_grid(64, 2.5).unwrap();
        let xi = reflection_phase(&grid, 200.0, 1.5e-3);
        for (i, z) in xi.values().iter().enumerate() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
            assert_eq!(*z, xi.values()[grid.n() - 1 - i]);
        }
        // Closest samples to the axis carry almost no phase.
        let mid = grid.n() / 2;
        assert!((xi.values()[mid] - c64::new(1.0, 0.0)).norm() < 0.05);
    }

    #[test]
    fn scattering_masks_inside_and_outside() {
        let grid = make_grid(4, 2.0).unwrap();
        let t = build_transmission(&grid);
        let r = build_reflection(&grid, 200.0, 1.5e-3);
        let xi = reflection_phase(&grid, 200.0, 1.5e-3);
        // y = 0.5 is index 2, y = 1.5 is index 3.
        assert_eq!(t.values()[2], c64::new(0.0, 0.0));
        assert_eq!(r.values()[2], xi.values()[2]);
        assert_eq!(t.values()[3], c64::new(1.0, 0.0));
        assert_eq!(r.values()[3], c64::new(0.0, 0.0));
    }

    #[test]
    fn scattering_identities_hold_exactly() {
        let grid = make_grid(512, 7.2).unwrap();
        let r = build_reflection(&grid, 200.0, 1.5e-3);
        let t = build_transmission(&grid);
        assert_eq!(scattering_residuals(&r, &t), (0.0, 0.0));
        // The complex entries agree up to rounding of exp(i phi).
        for (r, t) in r.values().iter().zip(t.values()) {
            assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-15);
            assert_eq!(t * r.conj() + t.conj() * r, c64::new(0.0, 0.0));
        }
    }

    #[test]
    fn coupled_structure() {
        let g = g0_t20();
        let grid = make_grid(256, 3.0).unwrap();
        let coupled = assemble_coupled(&grid, &g).unwrap();
        assert!(coupled.is_block_symmetric());
        let n = grid.n();
        let rho = assemble_decoupled(&grid, &g).unwrap();
        let tau = build_transmission(&grid)
            .apply_left(&half_cavity_kernel(&grid, &g).unwrap())
            .unwrap();
        for j in 0..2 * n {
            let col: c64 = (0..2 * n).map(|i| coupled.entries()[(i, j)]).sum();
            let jj = j % n;
            let parts: c64 = (0..n).map(|i| rho.get(i, jj) + tau.get(i, jj)).sum();
            assert!((col - parts).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_transmission_decouples() {
        // Mirror covering the whole window: T = 0, R = xi everywhere.
        let g = g0_t20();
        let grid = make_grid(128, 3.0).unwrap();
        let s = g.scaled();
        let kernel = half_cavity_kernel(&grid, &g).unwrap();
        let mirror = reflection_phase(&grid, s.convex_radius, s.wavelength);
        let none = MaskVector::from_values(vec![c64::new(0.0, 0.0); 128], &grid).unwrap();
        let coupled = couple_with_masks(&kernel, &mirror, &none).unwrap();
        let n = grid.n();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(coupled.entries()[(i, j + n)], c64::new(0.0, 0.0));
                assert_eq!(coupled.entries()[(i + n, j)], c64::new(0.0, 0.0));
            }
        }
        let plus = parity_with_masks(&kernel, &mirror, &none, Parity::Even).unwrap();
        let minus = parity_with_masks(&kernel, &mirror, &none, Parity::Odd).unwrap();
        assert_eq!(plus.entries(), minus.entries());
    }

    #[test]
    fn parity_sum_is_twice_reflection() {
        let g = g0_t20();
        let grid = make_grid(128, 3.0).unwrap();
        let plus = assemble_parity(&grid, &g, Parity::Even).unwrap();
        let minus = assemble_parity(&grid, &g, Parity::Odd).unwrap();
        let rho = assemble_decoupled(&grid, &g).unwrap();
        for i in 0..grid.n() {
            for j in 0..grid.n() {
                let lhs = plus.get(i, j) + minus.get(i, j);
                assert!((lhs - rho.get(i, j) * 2.0).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn coupled_requires_stable_whole_cavity() {
        let g = CavityGeometry::new(1.0, 0.2, 1.1, 1e-3, 1.5e-6).unwrap();
        let grid = make_grid(64, 3.0).unwrap();
        assert!(matches!(assemble_coupled(&grid, &g), Err(CavityError::Stability(_))));
        assert!(matches!(
            assemble_parity(&grid, &g, Parity::Even),
            Err(CavityError::Stability(_))
        ));
    }

    #[test]
    fn scaled_kernel_modulus_and_toeplitz_limit() {
        let grid = make_grid(128, 3.0).unwrap();
        let h = HorwitzParams::new(1.0, 1.0 / PI).unwrap();
        let k = assemble_scaled(&grid, &h, 200.0, 1e-3, Parity::Even).unwrap();
        let expected = grid.step() * (h.chirp / PI).sqrt();
        for i in 0..grid.n() {
            for j in 0..grid.n() {
                if grid.inside_aperture(i) {
                    assert!((k.get(i, j).norm() - expected).abs() < 1e-13 * expected);
                }
            }
        }
        // M = 1: inside the aperture rows depend only on j - i.
        let inside: Vec<usize> = (0..grid.n()).filter(|&i| grid.inside_aperture(i)).collect();
        for w in inside.windows(2) {
            let (i, i1) = (w[0], w[1]);
            for j in 0..grid.n() - 1 {
                assert!((k.get(i, j) - k.get(i1, j + 1)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn scaled_kernel_rejects_undersampled_grid() {
        let grid = make_grid(128, 3.0).unwrap();
        let h = HorwitzParams::new(5.0, 20.0 / (5.0 * PI)).unwrap();
        assert!(matches!(
            assemble_scaled(&grid, &h, 200.0, 1e-3, Parity::Even),
            Err(CavityError::Undersampled { .. })
        ));
    }

    #[test]
    fn gauge_properties() {
        let grid = make_grid(64, 3.0).unwrap();
        let v: Vec<c64> = grid.points().iter().map(|y| c64::new(y.cos(), y * 0.3)).collect();
        let g = gauge_transform(&v, &grid, 7.5, GaugeDirection::ToScaled).unwrap();
        let back = gauge_transform(&g, &grid, 7.5, GaugeDirection::ToPhysical).unwrap();
        for ((a, b), c) in v.iter().zip(&back).zip(&g) {
            assert!((a - b).norm() < 1e-15);
            assert!((a.norm() - c.norm()).abs() < 1e-15);
        }
        let origin = make_grid(16, 2.0).unwrap();
        let ones = vec![c64::new(1.0, 0.0); 16];
        let g = gauge_transform(&ones, &origin, 3.0, GaugeDirection::ToScaled).unwrap();
        assert!(g.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert!(gauge_transform(&ones[..3], &origin, 3.0, GaugeDirection::ToScaled).is_err());
    }

    #[test]
    fn apodization_tapers_edges_only() {
        let grid = make_grid(100, 5.0).unwrap().with_apodization(true);
        assert_eq!(grid.taper(50), 1.0);
        assert!(grid.taper(0) < 0.05);
        assert!(!make_grid(100, 5.0).unwrap().is_apodized());
    }

    #[test]
    fn unitarity_report_on_reference_grid() {
        let g = g0_t20();
        let grid = make_grid(512, 3.0).unwrap();
        let rep = check_unitarity(&grid, &g).unwrap();
        assert_eq!(rep.mask_sum, 0.0);
        assert_eq!(rep.mask_cross, 0.0);
        assert!(rep.norm_conservation < 1e-14);
        assert!(rep.kernel_probe < 0.05, "{rep:?}");
        // Truncation to the window leaves singular values near zero.
        assert!(rep.kernel_spectral > 0.5);
    }
}
