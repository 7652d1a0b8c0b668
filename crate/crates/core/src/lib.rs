//! Exact computation in Kauffman bracket skein modules at `A^4 = 1`.
//!
//! The crate covers coefficient arithmetic ([`ring`]), group backends and
//! `~`-classes ([`groups`]), linking forms of rational homology spheres
//! ([`linking`]), framed link diagrams on surfaces ([`diagrams`]), the
//! deformed skein algebra ([`algebra`]), and the maps between links and the
//! algebra ([`maps`]).

pub mod algebra;
pub mod cli;
pub mod diagrams;
pub mod groups;
pub mod json;
pub mod linking;
pub mod maps;
pub mod random;
pub mod ring;
pub mod verify;
