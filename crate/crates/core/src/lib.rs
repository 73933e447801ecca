//! GUBS: parsing, hybrid-logic semantics, trace consistency and functional
//! synthesis for a behavioural specification language.

pub mod logic;
pub mod semantics;
pub mod synthesis;
pub mod syntax;
pub mod traces;
