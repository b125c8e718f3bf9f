//! Exact Poincaré series for filtrations on rational surface singularities
//! and on their universal abelian covers, computed from the resolution
//! dual graph.
//!
//! The pipeline is: [`graph`] validates the dual graph, [`linalg`] produces
//! `d = det(−I)`, `m = (−I)^{−1}` and the Smith form of `I`, [`character`]
//! turns these into the group `G = coker I` with its characters `α_σ`,
//! [`series`] provides the truncated fractional power series, and
//! [`poincare`] assembles `Q`, `P`, `P^G` and runs the consistency checks.
//! [`oracle`] validates `P` against a direct monomial count on cyclic
//! quotients.
//!
//! ```
//! use equipoincare::{FiltrationSpec, Mode, PoincareEngine, ResolutionGraph};
//!
//! let graph = ResolutionGraph::chain(&[-2, -2, -2]).with_marked(vec![1]);
//! let engine = PoincareEngine::new(FiltrationSpec::new(&graph, Mode::Divisorial, 4)?)?;
//! assert_eq!(engine.p_series()?.render(), "1 + t1 + 3 t1^2 + 3 t1^3 + 5 t1^4");
//! # Ok::<(), equipoincare::poincare::EngineError>(())
//! ```

pub mod character;
pub mod format;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod poincare;
pub mod series;

pub use character::{AbelianGroup, Character, GroupRingElement};
pub use graph::{Mode, ResolutionGraph, ValidatedGraph, ValidationOptions};
pub use poincare::{EquivariantSeries, FiltrationSpec, GraphInvariants, IntSeries, PoincareEngine};
pub use series::TruncatedSeries;
