//! Typed source and target functional languages with closure conversion,
//! code hoisting and CPS, plus bounded logical relations and a
//! differential testing kit for checking the transformations.

pub mod cc;
pub mod cps;
pub mod dynamics;
pub mod equivalence;
pub mod frontend;
pub mod hoist;
pub mod name;
pub mod syntax;
pub mod testkit;
pub mod typing;

pub use name::Name;
pub use syntax::{SrcTerm, SrcType, Syntax, TgtTerm, TgtType};
