//! Browser bindings: cavity summary, eigenvalue spectrum and mode profiles
//! on small grids. Lengths are in meters.

use cavity_core::geometry::{classify_stability, horwitz_params, CavityGeometry};
use cavity_core::operators::{default_half_width, make_grid, Grid, Parity};
use cavity_core::spectrum::{
    build_operator, operator_spectrum, solve_eigenvalues, OperatorKind,
};
use wasm_bindgen::prelude::*;

/// Dense solves above this size freeze the page for too long.
const MAX_N: usize = 512;

#[wasm_bindgen]
pub struct Cavity {
    geom: CavityGeometry,
}

#[wasm_bindgen]
#[derive(Clone, Copy)]
pub struct CavitySummary {
    pub fresnel_number: f64,
    /// NaN unless the sub-cavity is unstable
    pub magnification: f64,
    pub chirp: f64,
    pub half_trace: f64,
    pub whole_cavity_stable: bool,
    pub subcavity_unstable: bool,
    pub paraxial: bool,
    pub default_half_width: f64,
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn kind_from(name: &str) -> Result<OperatorKind, JsError> {
    Ok(match name {
        "coupled" => OperatorKind::Coupled,
        "parity_plus" => OperatorKind::ParityPlus,
        "parity_minus" => OperatorKind::ParityMinus,
        "decoupled" => OperatorKind::DecoupledSubcavity,
        "scaled" => OperatorKind::Scaled(Parity::Even),
        other => return Err(JsError::new(&format!("unknown operator kind {other:?}"))),
    })
}

#[wasm_bindgen]
impl Cavity {
    #[wasm_bindgen(constructor)]
    pub fn new(
        mirror_radius: f64,
        convex_radius: f64,
        half_length: f64,
        half_aperture: f64,
        wavelength: f64,
    ) -> Result<Cavity, JsError> {
        let geom = CavityGeometry::new(
            mirror_radius,
            convex_radius,
            half_length,
            half_aperture,
            wavelength,
        )
        .map_err(js_err)?;
        Ok(Cavity { geom })
    }

    pub fn summary(&self) -> CavitySummary {
        let stability = classify_stability(&self.geom);
        let horwitz = horwitz_params(&self.geom).ok();
        CavitySummary {
            fresnel_number: self.geom.fresnel_number(),
            magnification: horwitz.map_or(f64::NAN, |h| h.magnification),
            chirp: horwitz.map_or(f64::NAN, |h| h.chirp),
            half_trace: stability.half_trace_m,
            whole_cavity_stable: stability.whole_cavity_stable,
            subcavity_unstable: stability.subcavity_unstable,
            paraxial: self.geom.is_paraxial(),
            default_half_width: default_half_width(horwitz.map(|h| h.magnification)),
        }
    }

    fn grid(&self, n: usize, half_width: f64) -> Result<Grid, JsError> {
        if n > MAX_N {
            return Err(JsError::new(&format!("n = {n} is above the demo limit {MAX_N}")));
        }
        make_grid(n, half_width).map_err(js_err)
    }

    /// Eigenvalues in spectral order, interleaved `[re0, im0, re1, im1, ...]`.
    pub fn spectrum(&self, kind: &str, n: usize, half_width: f64) -> Result<Vec<f64>, JsError> {
        let kind = kind_from(kind)?;
        let grid = self.grid(n, half_width)?;
        let matrix = build_operator(kind, &grid, &self.geom).map_err(js_err)?;
        let values = solve_eigenvalues(&matrix, kind).map_err(js_err)?;
        Ok(values.iter().flat_map(|z| [z.re, z.im]).collect())
    }

    /// Mode `index` as `[y0, I0, y1, I1, ...]` with `I = |v|^2` (first
    /// component for the coupled doublet), `y` in units of `a`.
    pub fn mode(
        &self,
        kind: &str,
        n: usize,
        half_width: f64,
        index: usize,
    ) -> Result<Vec<f64>, JsError> {
        let kind = kind_from(kind)?;
        let grid = self.grid(n, half_width)?;
        let result = operator_spectrum(kind, &grid, &self.geom).map_err(js_err)?;
        let pair = result
            .pairs
            .get(index)
            .ok_or_else(|| JsError::new(&format!("mode {index} out of range")))?;
        Ok(grid
            .points()
            .iter()
            .zip(&pair.mode)
            .flat_map(|(y, v)| [*y, v.norm_sqr()])
            .collect())
    }
}
