pub mod duality;
pub mod error;
pub mod gen;
pub mod identities;
pub mod linalg;
pub mod model;
pub mod operators;
pub mod pairs;
pub mod rng;

pub use error::{Error, Result};
pub use identities::{CheckSuiteResult, IdentityReport, SuiteConfig, Tolerances};
pub use linalg::{CMatrix, CVector, HermitianOperator, ScalarKind};
pub use model::{CoefficientVector, FrameAtom, GFusionFrame, MeasureAtom, SubsetMask, Subspace};
pub use num_complex::Complex64;
pub use operators::{AWeights, FrameBounds};
