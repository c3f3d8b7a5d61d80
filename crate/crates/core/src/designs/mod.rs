//! Combinatorial building blocks: Latin squares, H-cycles, double Latin
//! squares and matchings / 2-factors of bipartite graphs.

mod bipartite;
mod double_latin;
mod hcycle;
mod latin;
pub mod perm;

pub use bipartite::{
    extract_two_factor, perfect_matching, random_path, random_regular_bipartite,
    two_factor_containing_path,
    BipartiteGraph, Vertex,
};
pub(crate) use bipartite::{extract_two_factor_with, two_factor_containing_path_with};
pub use double_latin::{double_latin_from, is_single_alternating_cycle, DoubleLatinSquare};
pub use hcycle::{count_h_cycles, enumerate_h_cycles, HCycle};
pub use latin::{count_latin, random_latin, LatinSquare};
