//! Curvature operators of the second kind on (Kähler) algebraic curvature
//! tensors: the matrix of `R̊` on traceless symmetric two-tensors, fractional
//! α-positivity, adapted bases, model spaces and the identity chains that
//! produce the threshold constants.
//!
//! Conventions: `R(X,Y,X,Y)` is the sectional curvature, so the unit sphere
//! has `R_{ijij} = 1`; the complex structure is `J e_i = e_{m+i}`,
//! `J e_{m+i} = -e_i`. Indices are 0-based in memory and 1-based in labels
//! and files.

pub mod basis;
pub mod error;
pub mod io;
pub mod kahler;
pub mod lab;
pub mod models;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod tensor;

pub use basis::{BasisLabel, Partition, TracelessBasis};
pub use error::{Error, Result};
pub use kahler::{ComplexStructure, CurvatureFunctionalReport, Functional, KahlerOperator, UnitaryFrame};
pub use models::{FactorSpec, ModelSpec};
pub use report::{CheckRecord, VerificationReport};
pub use spectral::{AlphaStatus, AlphaVerdict, SpectralReport, Spectrum, Threshold};
pub use tensor::{CurvatureOperator, SpaceDim, SymTwoTensor, CONVENTION};
