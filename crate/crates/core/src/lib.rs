//! Z-colorings of link diagrams.
//!
//! A Z-coloring assigns an integer to every arc so that at each crossing
//! twice the over-arc color equals the sum of the two under-arc colors.
//! This crate parses diagrams, computes the coloring lattice exactly, and
//! rewrites diagrams with Reidemeister moves to shrink the set of colors used.

pub mod coloring;
pub mod diagram;
pub mod fixtures;
pub mod linalg;
pub mod moves;
pub mod palette;
pub mod par;
pub mod reduction;
pub mod selftest;
pub mod trace;

pub use coloring::{Coloring, ColorImage, ColoringError, ColoringSpace, Simplicity};
pub use diagram::{parse_pd, pretzel, ArcPartition, Dart, Diagram, DiagramError, EdgeId};
pub use linalg::{integer_kernel_basis, minor_determinant, smith_normal_form, IntMatrix, SnfResult};
pub use moves::{apply_move, Move, MoveError};
pub use palette::{classify_five, palette_graph, FiveClass, PaletteGraph, FIVE_CATALOG};
pub use reduction::{minimize, reduce_five, reduce_simple, ReductionError, ReductionReport};
pub use trace::{verify_trace, MoveTrace, TraceStep};
