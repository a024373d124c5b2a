//! Instance generators.

pub mod grid;
pub mod instances;
pub mod sat;

pub use grid::{
    ascii_map, candidate_meetings, corridor, default_budget, grand_tour, k_splitour, loop_tours, single_hop_tours,
    Cell, CellLoop, GrandTour, GridScenario, SingleHopPlan,
};
pub use instances::{chain_arms, random_graph, random_tree, sample_chain, sample_graph, sample_tree};
pub use sat::{gen_3sat_mdt, Formula, Literal, SatLayout};
