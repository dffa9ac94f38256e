//! Finite-scale model theory workbench.
//!
//! Everything here is executable and exhaustively checkable at small
//! sizes: finite first-order structures with a verified satisfaction
//! relation, hereditarily finite entities with bounded-formula evaluation,
//! filters and ultrafilters over finite index sets, ultraproducts with the
//! product/quotient equivalence checked formula by formula, the ultrapower
//! transfer map with standard/internal/external classification, hyperfinite
//! and enlargement checkers, order-reversal combinatorics, and the
//! collapse of extensional epsilon graphs onto transitive sets.

pub mod closure;
pub mod encode;
pub mod entity;
pub mod filters;
pub mod fol;
pub mod eval;
pub mod logic;
pub mod report;
pub mod ultraproduct;

pub use entity::{BaseSet, Entity};
pub use logic::{Formula, Language, Term};
pub use report::{CheckReport, Verdict};
