//! Gaussian periods at scale.
//!
//! For a modulus `n` and a unit `omega` mod `n` of multiplicative order `d`, the
//! Gaussian period of index `k` is
//!
//! ```text
//!   eta(n, omega, k) = sum_{j=0}^{d-1} exp(2 pi i omega^j k / n)
//! ```
//!
//! and the plotted set is `G(n, omega) = { eta(n, omega, k) : k in Z/nZ }`. This
//! crate enumerates the orbits of multiplication by `omega` on `Z/nZ` in linear
//! time, evaluates one compensated sum per orbit, assigns residue-class colors,
//! checks the structural laws the point sets obey (rescaled subplots, dihedral
//! symmetry, containment in the image of a Laurent polynomial on a torus) and
//! rasterizes the result into layered RGBA buffers.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, PNG encoding,
//! parallel drivers and the command line live in the `gperiods` crate.
//!
//! ```
//! use gperiods_core::{ColoringMode, PeriodSet};
//!
//! let set = PeriodSet::compute(12, 5, 3, ColoringMode::Standard).unwrap();
//! assert_eq!(set.orbits.len(), 8);
//! assert_eq!(set.class_count, 2);
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod fillout;
pub mod grid;
pub mod numtheory;
pub mod periods;
pub mod poly;
pub mod raster;
pub mod roots;
pub mod sum;

pub use error::{Error, Result};
pub use fillout::{
    applicability_check, coverage, laurent_eval, sample_image, Applicability, CoverageReport,
    LaurentMap, SampleStrategy,
};
pub use numtheory::{euler_totient, gcd, multiplicative_order};
pub use periods::{
    color_classes, compute_period_set, dihedral_order, period_value, rescale_identity_check,
    subplot_containment_check, verify_dihedral, ColorClassing, ColoringMode, DihedralReport,
    Orbit, OrbitRecord, OrbitTable, PeriodParams, PeriodSet, DEFAULT_MAX_N,
};
pub use poly::{cyclotomic, exponent_matrix, CyclotomicTable, ExponentMatrix, IntPolynomial};
pub use raster::{map_to_canvas, rasterize, Palette, RenderSpec, Rgba, RgbaImage};

pub use num_complex::Complex64;
