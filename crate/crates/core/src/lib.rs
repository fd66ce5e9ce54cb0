//! Transverse eigenmodes of two unstable strip resonators coupled through a
//! hard-edged bi-convex central mirror.
//!
//! The pipeline is: [`geometry`] describes the cavity and its ray matrices,
//! [`operators`] samples the round-trip kernels and scattering masks on a
//! midpoint grid, [`spectrum`] diagonalizes them, and [`asymptotics`] holds
//! the partial-integral machinery of the scaled unstable-cavity kernel.

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod operators;
pub mod spectrum;

pub use error::{CavityError, Result};
pub use faer::Mat;
pub use num_complex::Complex64;

/// Thread count for the dense linear algebra; `1` runs sequentially and `0`
/// uses every core. Without the `parallel` feature this is a no-op.
pub fn set_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let par = if threads == 1 {
            faer::Par::Seq
        } else {
            faer::Par::rayon(threads)
        };
        faer::set_global_parallelism(par);
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}
