//! Globally simple integer Heffter arrays `H(n;k)` for `k = 1 (mod 4)` and
//! `n = 0, 3 (mod 4)`: diagonal constructions, independent verification,
//! the induced cycle decompositions of `K_{2nk+1}`, and a brute-force oracle.

pub mod construct;
pub mod decompose;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod verify;

pub use construct::{construct, construct_forced, Class, ConstructError};
pub use grid::{Axis, Cell, Dims, PartialArray};
pub use verify::{is_globally_simple, VerifyReport};
