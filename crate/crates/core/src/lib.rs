//! Ordinal notation systems below ε₀ and below ε_{Ω+1}, the fast-growing
//! functions `A_k`, maximal normal forms, base change and fast Goodstein walks.

pub mod base_change;
pub mod error;
pub mod fgh;
pub mod normal_forms;
pub mod ord_bachmann;
pub mod ord_epsilon0;
pub mod suites;
pub mod terms_walks;

pub use error::{OrdError, ParseError};
pub use ord_bachmann::{BAtom, OrdBH};
pub use ord_epsilon0::{Nat, OrdE0};
