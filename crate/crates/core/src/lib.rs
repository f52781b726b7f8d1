//! Edge-colorings of complete graphs without rainbow triangles (Gallai
//! colorings): detection of rainbow triangles and monochromatic cycles,
//! Gallai-partition extraction and substitution, extremal constructions,
//! constructive structural lemmas, and exact search for small Ramsey and
//! Gallai-Ramsey values.

mod bitset;
pub mod constructions;
pub mod detect;
pub mod gallai;
pub mod lemmas;
pub mod model;
pub mod search;

pub use detect::{
    find_mono_cycle, find_mono_cycle_with, find_rainbow_triangle, is_bad, is_bad_with, CycleOutcome, CycleSearch,
    CycleWitness, DetectConfig, Verdict, VerdictKind, WitnessKind,
};
pub use model::{Color, ColorClassView, ColoredCompleteGraph};
pub use search::{
    search_bad_gallai, search_bad_gallai_with, search_bad_two_coloring, search_bad_two_coloring_with, threshold_scan,
    SearchConfig, SearchMode, SearchOutcome, SearchStatus,
};
