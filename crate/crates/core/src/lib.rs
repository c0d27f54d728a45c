//! Exact-arithmetic engine for semicosimplicial differential graded Lie
//! algebras: Thom-Whitney totalization, the Dupont contraction, homotopy
//! transfer of the L-infinity structure, and order-by-order deformation
//! solvers over Artin local coefficient rings.
//!
//! Everything is computed over the rationals; there is no floating point
//! anywhere in the kernel. The crate is organized bottom-up:
//!
//! * [`rational`], [`artin`]: scalars and Artin local coefficient rings.
//! * [`linalg`]: exact Gaussian elimination (ranks, solves, cohomology).
//! * [`glie`]: finite-dimensional DGLAs given by structure constants.
//! * [`forms`]: polynomial differential forms on standard simplices and the
//!   Dupont operators.
//! * [`scs`]: semicosimplicial DGLAs, total complex, Thom-Whitney complex,
//!   and the contraction (E, I, h).
//! * [`transfer`]: tree-summed transferred brackets and the generalized
//!   Jacobi checker.
//! * [`deform`]: BCH, gauge actions, Maurer-Cartan and cocycle residuals,
//!   order-by-order solvers, and the descent equivalence battery.
//! * [`cech`]: Cech semicosimplicial objects from covers, tangent and
//!   obstruction spaces, obstruction naturality.
//! * [`workspace`], [`jobs`], [`report`]: the textual workspace schema and
//!   the deterministic job runner behind the CLI.
//! * [`oracle`]: independent reference implementations (free associative
//!   BCH, numeric quadrature, planar tree counting) used only to cross-check
//!   the main code paths in tests.

pub mod artin;
pub mod cech;
pub mod corpus;
pub mod deform;
pub mod error;
pub mod forms;
pub mod glie;
pub mod jobs;
pub mod linalg;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod rng;
pub mod scs;
pub mod transfer;
pub mod workspace;

pub use artin::{ArtinLocalAlgebra, IdealElement};
pub use error::Error;
pub use forms::{MultiIndex, PolyForm};
pub use glie::{CoeffKey, CoeffRing, Dgla, GElement, GLinMap};
pub use rational::Rat;
pub use report::{Report, Violation};
pub use scs::{ScsDgla, ScsMorphism, TotElement, TwElement};
pub use transfer::TransferEngine;
