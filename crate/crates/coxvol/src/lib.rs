//! Volumes, section counts and boundary asymptotics for the universal
//! rank-(N+1) reflection lattice.
//!
//! The lattice carries the form `⟨x,y⟩ = (Σx)(Σy) − (N−1)Σx_i y_i` in the
//! basis `ω_0, …, ω_N`, and the group generated by the reflections
//! `σ_i: x_i ↦ −x_i, x_j ↦ x_j + 2x_i` is a free product of `N+1` copies of
//! `ℤ/2`. Classes are reduced into the nef chamber `{x_i ≥ 0}` where volumes
//! are elementary symmetric functions of the coordinates.
//!
//! ```
//! use coxvol::prelude::*;
//!
//! let v = LatticeVector::<Rational>::from_ints(&Exact, &[-1, 3, 3, 3])?;
//! let r = reduce_to_chamber(&v, 10)?;
//! assert_eq!(r.reduced, LatticeVector::u(&Exact, 3)?);
//! assert_eq!(volume(&v)?, Rational::from(48));
//! # Ok::<(), coxvol::Error>(())
//! ```

pub mod asymptotics;
pub mod boundary;
pub mod chamber;
pub mod cusp;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod scalar;
pub mod volume;
pub mod word;

pub use error::{Error, Result};

/// Common imports.
pub mod prelude {
    pub use crate::boundary::{materialize, BoundaryPointSpec, RecurrentProgram};
    pub use crate::chamber::{apply_word, reduce_to_chamber, reduce_with, reflect, ReductionConfig, ReductionResult};
    pub use crate::cusp::{CuspId, ExcursionSchedule};
    pub use crate::error::{Error, Result};
    pub use crate::lattice::{norm_sq, pair, LatticeVector};
    pub use crate::scalar::{BigFloat, Exact, Rational, Scalar};
    pub use crate::volume::{h0_nef_big, vol_k, volume};
    pub use crate::word::Word;
}

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(intro, "../../../book/src/intro.md");
    chapter!(lattice, "../../../book/src/lattice.md");
    chapter!(reduction, "../../../book/src/reduction.md");
    chapter!(volumes, "../../../book/src/volumes.md");
    chapter!(boundary, "../../../book/src/boundary.md");
    chapter!(scans, "../../../book/src/scans.md");
}
