//! Eigenvalues and eigenmodes of the assembled round-trip operators.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;

use faer::Mat;
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};
use crate::geometry::{classify_stability, horwitz_params, CavityGeometry};
use crate::operators::{
    assemble_coupled, assemble_decoupled, assemble_parity, assemble_scaled, gauge_transform,
    GaugeDirection, Grid, Parity,
};

/// Largest accepted relative residual `||A v - gamma v|| / (||A|| ||v||)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Eigenvalues closer than this are reported as one degenerate cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-10;
/// Doublet halves must agree to this relative level to carry a parity label.
pub const PARITY_LABEL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Coupled,
    ParityPlus,
    ParityMinus,
    #[serde(rename = "decoupled")]
    DecoupledSubcavity,
    Scaled(Parity),
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Coupled => "coupled",
            OperatorKind::ParityPlus => "parity_plus",
            OperatorKind::ParityMinus => "parity_minus",
            OperatorKind::DecoupledSubcavity => "decoupled",
            OperatorKind::Scaled(Parity::Even) => "scaled_plus",
            OperatorKind::Scaled(Parity::Odd) => "scaled_minus",
        }
    }

    /// Operators acting on `(v1, v2)` doublets have `2n` rows.
    pub fn is_doublet(&self) -> bool {
        matches!(self, OperatorKind::Coupled)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Assembles the matrix for `kind`, checking the stability preconditions it needs.
pub fn build_operator(kind: OperatorKind, grid: &Grid, geom: &CavityGeometry) -> Result<Mat<c64>> {
    Ok(match kind {
        OperatorKind::Coupled => assemble_coupled(grid, geom)?.entries().clone(),
        OperatorKind::ParityPlus => assemble_parity(grid, geom, Parity::Even)?.entries().clone(),
        OperatorKind::ParityMinus => assemble_parity(grid, geom, Parity::Odd)?.entries().clone(),
        OperatorKind::DecoupledSubcavity => {
            require_unstable_subcavity(geom)?;
            assemble_decoupled(grid, geom)?.entries().clone()
        }
        OperatorKind::Scaled(parity) => {
            require_unstable_subcavity(geom)?;
            let horwitz = horwitz_params(geom)?;
            let s = geom.scaled();
            assemble_scaled(grid, &horwitz, s.convex_radius, s.wavelength, parity)?
                .entries()
                .clone()
        }
    })
}

fn require_unstable_subcavity(geom: &CavityGeometry) -> Result<()> {
    if !classify_stability(geom).subcavity_unstable {
        return Err(CavityError::Stability(format!(
            "sub-cavity is not unstable (need l < R - r, got l = {}, R - r = {})",
            geom.half_length,
            geom.mirror_radius - geom.convex_radius
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeParity {
    Even,
    Odd,
    None,
}

impl ModeParity {
    pub fn label(&self) -> &'static str {
        match self {
            ModeParity::Even => "+1",
            ModeParity::Odd => "-1",
            ModeParity::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub gamma: c64,
    /// Normalized to `sum |v_i|^2 h = 1`, largest component real positive.
    pub mode: Vec<c64>,
    pub parity: ModeParity,
    pub residual: f64,
    /// Size of the cluster of eigenvalues within [`CLUSTER_TOLERANCE`] of this one.
    pub degeneracy: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Sorted by `|gamma|` descending, then `arg gamma` ascending.
    pub pairs: Vec<EigenPair>,
    pub kind: OperatorKind,
    pub grid: Grid,
    pub geometry: Option<CavityGeometry>,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> Vec<c64> {
        self.pairs.iter().map(|p| p.gamma).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

/// Dominant-first ordering with the phase as tie-break.
pub fn spectral_order(a: &c64, b: &c64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| a.arg().total_cmp(&b.arg()))
}

fn check_finite(matrix: &Mat<c64>) -> Result<()> {
    for j in 0..matrix.ncols() {
        for i in 0..matrix.nrows() {
            let z = matrix[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(CavityError::Domain(format!(
                    "non-finite operator entry at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Eigenvalues only, in spectral order.
pub fn solve_eigenvalues(matrix: &Mat<c64>, kind: OperatorKind) -> Result<Vec<c64>> {
    check_finite(matrix)?;
    let mut values = matrix.eigenvalues().map_err(|_| CavityError::Convergence {
        kind: kind.to_string(),
        n: matrix.nrows(),
    })?;
    values.sort_by(spectral_order);
    Ok(values)
}

/// Full dense eigendecomposition with normalized, phase-fixed modes.
///
/// `grid` supplies the quadrature weight used for normalization; doublet
/// operators have `2 * grid.n()` rows.
pub fn solve_spectrum(
    matrix: &Mat<c64>,
    kind: OperatorKind,
    grid: &Grid,
    geometry: Option<CavityGeometry>,
) -> Result<SpectrumResult> {
    check_finite(matrix)?;
    let dim = matrix.nrows();
    let expected = if kind.is_doublet() { 2 * grid.n() } else { grid.n() };
    if dim != expected || matrix.ncols() != dim {
        return Err(CavityError::OperatorMismatch(format!(
            "{kind} operator should be {expected}x{expected}, got {dim}x{}",
            matrix.ncols()
        )));
    }
    let convergence = || CavityError::Convergence {
        kind: kind.to_string(),
        n: dim,
    };
    let evd = matrix.eigen().map_err(|_| convergence())?;
    let values: Vec<c64> = (0..dim).map(|k| evd.S()[k]).collect();
    let vectors = evd.U();
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(convergence());
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| spectral_order(&values[a], &values[b]));
    let gammas: Vec<c64> = order.iter().map(|&k| values[k]).collect();
    let mut modes = Mat::from_fn(dim, dim, |i, k| vectors[(i, order[k])]);

    let clusters = cluster(&gammas);
    let mut degeneracy = vec![1; dim];
    for members in clusters.iter().filter(|c| c.len() > 1) {
        orthonormalize_columns(&mut modes, members);
        for &k in members {
            degeneracy[k] = members.len();
        }
    }

    let h = grid.step();
    for k in 0..dim {
        normalize_mode(&mut modes, k, h);
    }

    let residuals = residuals(matrix, &modes, &gammas);
    if let Some(worst) = residuals.iter().cloned().reduce(f64::max) {
        if worst > RESIDUAL_TOLERANCE {
            log::warn!("{kind}: worst eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOLERANCE:e}");
        }
    }

    let pairs = (0..dim)
        .map(|k| {
            let mode: Vec<c64> = (0..dim).map(|i| modes[(i, k)]).collect();
            let parity = match kind {
                OperatorKind::ParityPlus | OperatorKind::Scaled(Parity::Even) => ModeParity::Even,
                OperatorKind::ParityMinus | OperatorKind::Scaled(Parity::Odd) => ModeParity::Odd,
                OperatorKind::Coupled => doublet_parity(&mode),
                OperatorKind::DecoupledSubcavity => ModeParity::None,
            };
            EigenPair {
                gamma: gammas[k],
                mode,
                parity,
                residual: residuals[k],
                degeneracy: degeneracy[k],
            }
        })
        .collect();

    Ok(SpectrumResult {
        pairs,
        kind,
        grid: grid.clone(),
        geometry,
    })
}

/// Groups indices whose eigenvalues chain together within [`CLUSTER_TOLERANCE`].
fn cluster(gammas: &[c64]) -> Vec<Vec<usize>> {
    let n = gammas.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    // Sorted by modulus, so only a window of neighbours in |gamma| can be close.
    for a in 0..n {
        for b in a + 1..n {
            if gammas[a].norm() - gammas[b].norm() > CLUSTER_TOLERANCE {
                break;
            }
            if (gammas[a] - gammas[b]).norm() <= CLUSTER_TOLERANCE {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                if ra != rb {
                    parent[rb.max(ra)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Replaces the listed columns with an orthonormal basis of their span (Gram-Schmidt, twice).
fn orthonormalize_columns(modes: &mut Mat<c64>, members: &[usize]) {
    let dim = modes.nrows();
    let mut basis: Vec<Vec<c64>> = Vec::with_capacity(members.len());
    for &k in members {
        let mut v: Vec<c64> = (0..dim).map(|i| modes[(i, k)]).collect();
        for _ in 0..2 {
            for q in &basis {
                let overlap: c64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= overlap * qi);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            v.iter_mut().for_each(|z| *z /= norm);
            basis.push(v);
        } else {
            // Numerically dependent: keep the original vector.
            let orig: Vec<c64> = (0..dim).map(|i| modes[(i, k)]).collect();
            basis.push(orig);
        }
    }
    for (&k, v) in members.iter().zip(&basis) {
        for i in 0..dim {
            modes[(i, k)] = v[i];
        }
    }
}

fn normalize_mode(modes: &mut Mat<c64>, k: usize, h: f64) {
    let dim = modes.nrows();
    let norm = ((0..dim).map(|i| modes[(i, k)].norm_sqr()).sum::<f64>() * h).sqrt();
    let peak = (0..dim)
        .max_by(|&a, &b| modes[(a, k)].norm().total_cmp(&modes[(b, k)].norm()))
        .unwrap_or(0);
    let pivot = modes[(peak, k)];
    if norm == 0.0 || pivot.norm() == 0.0 {
        return;
    }
    let scale = pivot.conj() / (pivot.norm() * norm);
    for i in 0..dim {
        modes[(i, k)] *= scale;
    }
    modes[(peak, k)] = c64::new(pivot.norm() / norm, 0.0);
}

/// Cheap upper bound `sqrt(||A||_1 ||A||_inf)` on the spectral norm.
fn norm_estimate(matrix: &Mat<c64>) -> f64 {
    let (r, c) = (matrix.nrows(), matrix.ncols());
    let one = (0..c)
        .map(|j| (0..r).map(|i| matrix[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let inf = (0..r)
        .map(|i| (0..c).map(|j| matrix[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    (one * inf).sqrt()
}

fn residuals(matrix: &Mat<c64>, modes: &Mat<c64>, gammas: &[c64]) -> Vec<f64> {
    let scale = norm_estimate(matrix);
    let image = matrix * modes;
    (0..gammas.len())
        .map(|k| {
            let (mut r2, mut v2) = (0.0, 0.0);
            for i in 0..modes.nrows() {
                r2 += (image[(i, k)] - gammas[k] * modes[(i, k)]).norm_sqr();
                v2 += modes[(i, k)].norm_sqr();
            }
            if scale == 0.0 || v2 == 0.0 {
                r2.sqrt()
            } else {
                r2.sqrt() / (scale * v2.sqrt())
            }
        })
        .collect()
}

fn doublet_parity(mode: &[c64]) -> ModeParity {
    let n = mode.len() / 2;
    let (v1, v2) = mode.split_at(n);
    let total = mode.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let diff = |s: f64| {
        v1.iter()
            .zip(v2)
            .map(|(a, b)| (b - a * s).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / total
    };
    if diff(1.0) <= PARITY_LABEL_TOLERANCE {
        ModeParity::Even
    } else if diff(-1.0) <= PARITY_LABEL_TOLERANCE {
        ModeParity::Odd
    } else {
        ModeParity::None
    }
}

/// Spectrum of one hard-edged unstable sub-cavity; every `|gamma|` must be below 1.
pub fn decoupled_subcavity_spectrum(grid: &Grid, geom: &CavityGeometry) -> Result<SpectrumResult> {
    let matrix = build_operator(OperatorKind::DecoupledSubcavity, grid, geom)?;
    let result = solve_spectrum(&matrix, OperatorKind::DecoupledSubcavity, grid, Some(*geom))?;
    if let Some(top) = result.pairs.first() {
        if top.gamma.norm() >= 1.0 {
            return Err(CavityError::GainDetected {
                modulus: top.gamma.norm(),
            });
        }
    }
    Ok(result)
}

/// Builds and fully solves the operator of `kind`.
pub fn operator_spectrum(
    kind: OperatorKind,
    grid: &Grid,
    geom: &CavityGeometry,
) -> Result<SpectrumResult> {
    if kind == OperatorKind::DecoupledSubcavity {
        return decoupled_subcavity_spectrum(grid, geom);
    }
    let matrix = build_operator(kind, grid, geom)?;
    solve_spectrum(&matrix, kind, grid, Some(*geom))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub order: i64,
    pub wavelength: f64,
}

/// Wavelengths `4 pi l / (arg gamma + 2 pi q)` at which the longitudinal phase
/// `exp(i 4 pi l / lambda)` equals `gamma`. Orders with a non-positive
/// denominator are skipped.
pub fn resonance_wavelengths(
    gamma: c64,
    half_length: f64,
    orders: RangeInclusive<i64>,
) -> Result<Vec<Resonance>> {
    if gamma.norm() == 0.0 || !gamma.norm().is_finite() {
        return Err(CavityError::Domain("gamma must be finite and non-zero".into()));
    }
    if !(half_length > 0.0) {
        return Err(CavityError::Domain(format!(
            "half-length must be positive, got {half_length}"
        )));
    }
    let phase = gamma.arg();
    Ok(orders
        .filter_map(|q| {
            let denom = phase + 2.0 * PI * q as f64;
            (denom > 0.0).then(|| Resonance {
                order: q,
                wavelength: 4.0 * PI * half_length / denom,
            })
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRefinement {
    pub order: i64,
    pub initial: f64,
    pub refined: f64,
    /// `refined - initial`
    pub shift: f64,
}

/// One fixed-point pass: solve at the resonance wavelength of mode `index`
/// and recompute that resonance from the new eigenvalue of the same rank.
pub fn refine_resonance(
    kind: OperatorKind,
    grid: &Grid,
    geom: &CavityGeometry,
    index: usize,
    order: i64,
) -> Result<ResonanceRefinement> {
    let pick = |g: &CavityGeometry| -> Result<c64> {
        let values = solve_eigenvalues(&build_operator(kind, grid, g)?, kind)?;
        values.get(index).copied().ok_or_else(|| {
            CavityError::Domain(format!("mode index {index} out of range ({})", values.len()))
        })
    };
    let resonance_at = |gamma: c64| -> Result<f64> {
        resonance_wavelengths(gamma, geom.half_length, order..=order)?
            .first()
            .map(|r| r.wavelength)
            .ok_or_else(|| CavityError::Domain(format!("order {order} gives no positive wavelength")))
    };
    let initial = resonance_at(pick(geom)?)?;
    let refined = resonance_at(pick(&geom.with_wavelength(initial)?)?)?;
    Ok(ResonanceRefinement {
        order,
        initial,
        refined,
        shift: refined - initial,
    })
}

/// Greedy nearest-neighbour pairing of two eigenvalue lists (each value of
/// `a` takes the closest unused value of `b`); returns the worst pair distance.
pub fn match_eigenvalues(a: &[c64], b: &[c64]) -> Result<f64> {
    if a.len() > b.len() {
        return Err(CavityError::OperatorMismatch(format!(
            "cannot match {} eigenvalues against {}",
            a.len(),
            b.len()
        )));
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best: Option<(usize, f64)> = None;
        for (k, y) in b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (x - y).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        let (k, d) = best.expect("b has an unused entry");
        used[k] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Worst distance between the coupled spectrum and the union of the two parity spectra.
pub fn parity_union_defect(grid: &Grid, geom: &CavityGeometry) -> Result<f64> {
    let coupled = solve_eigenvalues(
        &build_operator(OperatorKind::Coupled, grid, geom)?,
        OperatorKind::Coupled,
    )?;
    let mut union = Vec::with_capacity(coupled.len());
    for kind in [OperatorKind::ParityPlus, OperatorKind::ParityMinus] {
        union.extend(solve_eigenvalues(&build_operator(kind, grid, geom)?, kind)?);
    }
    match_eigenvalues(&coupled, &union)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    /// Worst `|gamma_scaled / sqrt(M) - gamma| / |gamma|` over the compared modes.
    pub eigenvalue_error: f64,
    /// Smallest `|<gauge(v), g>| / (|v| |g|)` over the compared modes.
    pub min_cosine: f64,
}

/// Compares the `count` dominant modes of the parity operator with their
/// nearest counterparts in the scaled operator of the same sector.
pub fn scaled_correspondence(
    grid: &Grid,
    geom: &CavityGeometry,
    parity: Parity,
    count: usize,
) -> Result<Correspondence> {
    let horwitz = horwitz_params(geom)?;
    let kind = match parity {
        Parity::Even => OperatorKind::ParityPlus,
        Parity::Odd => OperatorKind::ParityMinus,
    };
    let physical = operator_spectrum(kind, grid, geom)?;
    let scaled = operator_spectrum(OperatorKind::Scaled(parity), grid, geom)?;
    let scale = horwitz.eigenvalue_scale();
    let alpha = horwitz.gauge_chirp(geom.scaled().half_cavity.a);
    let mut out = Correspondence {
        eigenvalue_error: 0.0,
        min_cosine: 1.0,
    };
    for p in physical.pairs.iter().take(count) {
        let q = scaled
            .pairs
            .iter()
            .min_by(|a, b| {
                let da = (a.gamma / scale - p.gamma).norm();
                let db = (b.gamma / scale - p.gamma).norm();
                da.total_cmp(&db)
            })
            .ok_or_else(|| CavityError::OperatorMismatch("empty scaled spectrum".into()))?;
        let err = (q.gamma / scale - p.gamma).norm() / p.gamma.norm();
        let g = gauge_transform(&p.mode, grid, alpha, GaugeDirection::ToScaled)?;
        let dot: c64 = g.iter().zip(&q.mode).map(|(a, b)| a.conj() * b).sum();
        let cosine = dot.norm() * grid.step() / (grid.norm(&g) * grid.norm(&q.mode));
        out.eigenvalue_error = out.eigenvalue_error.max(err);
        out.min_cosine = out.min_cosine.min(cosine);
    }
    Ok(out)
}
