//! Width decompositions and the balanced separators they provide.

mod cache;
mod rank;
mod tree;

pub use cache::{graph_hash, DecompositionCache};
pub use rank::{
    anneal_focused_decomposition, anneal_rank_decomposition, anneal_rank_decomposition_within,
    exhaustive_rank_width, focused_partition, star_focused, three_thirds, AnnealConfig, CutScorer,
    FocusedPartition, Nested, Objective, RankDecomposition, RankDecompositionFile,
};
pub use tree::{tree_decomposition_heuristic, TreeDecomposition};
