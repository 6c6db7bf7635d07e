//! Curvature endomorphisms of the spinor bundle, global curvature
//! invariants, and curvature-dependent lower bounds for the squared
//! eigenvalues of the Dirac operator on compact Riemannian spin manifolds.

pub mod bounds;
pub mod clifford;
pub mod curvature;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod optimize;
pub mod pipeline;
pub mod spectra;
pub mod spincurv;
pub mod synthetic;
pub mod tensor;

pub use bounds::{BoundResult, Criterion, Family};
pub use clifford::{build_clifford_rep, CliffordRep};
pub use curvature::{catalog_samples, grid_differentiate, ricci_weyl_split, ManifoldSpec, PointSample};
pub use error::{Error, Result};
pub use invariants::{CurvatureInvariants, PairSearch};
pub use pipeline::{analyze, verify, AnalyzeOptions, Report, Verification};
pub use spectra::SpectrumOracle;
pub use spincurv::{SpinCurvature, SpinorEndo, Symmetry};
