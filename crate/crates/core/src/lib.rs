//! Degrees of real central projections and their wall crossings.
//!
//! A compact submanifold `X ⊂ P(V)` of dimension `m` and a linear map
//! `f : V → W` with `dim W = m + 1` give a map `[f]_X : X → P(W)` away from
//! `P(ker f)`. The modules here compute its integer degree by signed fibre
//! counts, locate the maps where `P(ker f)` meets `X`, and sign the jump of
//! the degree across them.

pub mod cli;
pub mod degree;
pub mod error;
pub mod manifold;
pub mod numeric;
pub mod path;
pub mod poly;
pub mod projection;
pub mod rational;
pub mod report;
pub mod schubert;
pub mod wall;

pub use error::{Error, Result};
