//! The concrete minions ST and WP and the constructions refuting choice
//! conditions on them.

pub mod refutation;
pub mod st;
pub mod wp;

pub use refutation::{
    build_layered_refutation, build_multichoice_refutation, MultichoiceRefutation,
};
pub use st::{st_generator, st_membership, StMethod, StWitness};
pub use wp::{heavy_coordinate_bound, symmetric_minor_search, wp_generator, DEFAULT_SEARCH_CAP};
