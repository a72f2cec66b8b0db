//! Linear threshold presentations and the structure theory built on them.

pub mod canonical;
pub mod fixing;
pub mod preorder;
pub mod presentation;
pub mod tuple;

pub use canonical::canonical_presentation;
pub use fixing::{find_fixing_pairs, fixing_pair_bound_holds};
pub use preorder::{compute_preorder, monotonicity, CoordinatePreorder, Monotonicity};
pub use presentation::{Form, LtfPresentation};
pub use tuple::{
    approximate_generator, domination_propagates, grouping, minor_map_properties, ApproxTarget,
    Approximation, MapProperties,
};
