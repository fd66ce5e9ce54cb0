#![allow(dead_code)]

use cavity_core::geometry::CavityGeometry;

/// Reference geometry at 500 nm (t = 60.21).
pub fn g0() -> CavityGeometry {
    CavityGeometry::new(1.0, 0.2, 0.5, 1e-3, 500e-9).unwrap()
}

/// Same geometry with the wavelength stretched to give t = 20.
pub fn g0_t20() -> CavityGeometry {
    let base = cavity_core::geometry::horwitz_params(&g0()).unwrap();
    g0().with_wavelength(500e-9 * base.chirp / 20.0).unwrap()
}
