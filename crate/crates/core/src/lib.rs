//! Exact invariants and diagram calculus for one-dimensional NCCW building
//! blocks (Elliott-Thomsen blocks with a single interval fiber), together
//! with a spectral model of homomorphisms between them.

pub mod blocks;
pub mod charts;
pub mod doc;
pub mod gen;
pub mod kkcalc;
pub mod ktheory;
pub mod lifting;
pub mod num;
pub mod spectra;

pub use blocks::{Algebra, Block, BlockError, BlockFlags, BlockKind};
pub use kkcalc::{Diagram, KkError, MWitness};
pub use ktheory::{K1Group, KTheoryData};
pub use num::{Int, IntMatrix, Rat};
pub use charts::{ChartError, DistributionWitness, PlPath, SpectralChart};
pub use lifting::{LiftError, LiftStatus, LiftVerdict};
pub use spectra::{SpectraError, Spectrum};
