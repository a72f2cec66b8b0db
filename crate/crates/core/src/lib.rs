//! Boolean promise-CSP tooling: relations and polymorphisms, exact linear
//! threshold presentations, the ST and WP minions, choice-function hardness
//! conditions, layered label cover and the BLP rounding solver.

pub mod blp;
pub mod boolean;
pub mod choice;
pub mod error;
pub mod label_cover;
pub mod minion;
pub mod minor;
pub mod rational;
pub mod threshold;

pub use blp::{round_search, solve_lp, LPSolution, RationalLP};
pub use boolean::{
    BooleanFunction, BooleanRelation, BooleanStructure, Constraint, Instance, RelationKind,
};
pub use choice::{ChainMember, ChoiceFunction, MinorChain, Variant, Verdict};
pub use error::{Error, Result};
pub use label_cover::{BipartiteLC, LayeredLC, MinorCondition};
pub use minor::MinorMap;
pub use rational::Rational;
pub use threshold::{Form, LtfPresentation};
