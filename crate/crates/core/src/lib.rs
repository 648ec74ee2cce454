//! Exact Cartan coframe calculus for certifying local flatness of
//! isotrivial cone structures.
//!
//! The crate is organised bottom-up:
//!
//! * [`funcfield`]: rational numbers, polynomials and rational functions.
//! * [`linalg`]: elimination over exact fields and singular values over floats.
//! * [`coframe`]: coframes, dual frames, structure functions, the induced
//!   coframe on the tangent bundle and its geodesic flow.
//! * [`xi`]: the tensor subspaces `Xi_V` and `Xi_Z` of `Hom(Λ²V, V)`.
//! * [`cone`]: hypersurfaces, adapted cone structures and the dynamical
//!   checks on them.
//! * [`flatten`]: the conformal-closedness test and the flattening
//!   certificate.
//! * [`models`] and [`io`]: reference models and the JSON problem formats.

pub mod coframe;
pub mod cone;
pub mod error;
pub mod flatten;
pub mod funcfield;
pub mod io;
pub mod linalg;
pub mod models;
pub mod xi;

pub use coframe::{Chart, Coframe, FrameField, StructureFunction, VValuedForm2};
pub use cone::{adapted_cone, ConeStructure, Hypersurface};
pub use error::{Error, Result};
pub use flatten::{certify, conformal_closedness_test, CertifyConfig, ClosednessVerdict, FlattenCertificate, Stage, Status};
pub use funcfield::{parse_poly, parse_ratfunc, BigRational, MultiPoly, RatFunc};
pub use xi::{xi_z, HomTensor, TensorSubspace, XiConfig, XiZ};
