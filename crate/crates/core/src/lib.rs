//! Calculus of linear relations on finite-dimensional complex Hilbert spaces.
//!
//! A linear relation from `C^h` to `C^k` is a subspace of `C^h ⊕ C^k` (its
//! graph). On top of the relation algebra the crate builds maximal sectorial
//! relations of the form `T*(I+iB)T`, their sectorial forms and both
//! representation theorems, and the Friedrichs, Kreĭn, extremal and form-sum
//! extensions of a sum of two maximal sectorial relations.
//!
//! Inner products are linear in the first argument and conjugate-linear in the
//! second: `(x, y) = Σ xᵢ·conj(yᵢ) = yᴴx`.

pub mod error;
pub mod forms;
pub mod linalg;
pub mod relation;
pub mod subspace;
pub mod sums;
pub mod tbt;

pub use error::{Error, Result};
pub use forms::{SecondRepresentation, SectorialityVerdict, SesquilinearForm};
pub use linalg::{Matrix, Vector};
pub use relation::{LinearRelation, OperatorOnSubspace, RelationParts};
pub use subspace::{Subspace, ToleranceConfig};

pub use sums::{ExtensionRegistry, ExtensionStrategy, SumExtensionWorkspace, SummandData};
pub use tbt::SectorialDecomposition;
