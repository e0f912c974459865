//! Exact computations with square-class groups of fields.
//!
//! A field is presented by a [`FieldModel`]: a labelled F_2 basis of its
//! square-class group together with a Hilbert-symbol oracle. On top of that
//! the crate computes the additive structure of subgroups `T` of the
//! square-class group and classifies them ([`ordering`]), builds the finite
//! W-group of the field in the category of 2-groups of exponent 4 with
//! central squares ([`cgroup`]), presents the rings `W_T(F)` ([`witt`]),
//! lifts orderings along valuations ([`valuation`]) and runs local-global
//! checks for diagonal forms over Q ([`local_global`]).

pub mod arith;
pub mod cgroup;
pub mod f2;
pub mod field;
pub mod local_global;
pub mod ordering;
pub mod selftest;
pub mod snf;
pub mod valuation;
pub mod witt;

pub use cgroup::{CElem, CGroup, CSubgroup, WGroup};
pub use f2::{F2Matrix, F2Subspace};
pub use field::{Element, FieldModel, Level, ModelKind, Place, SquareClass};
pub use ordering::{OrderingClass, OrderingTag, SubgroupT};
pub use snf::{smith_normal_form, IntLattice, IntMatrix};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{cols} columns exceed the 64-bit row packing")]
    TooWide { cols: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("the zero element has no square class")]
    ZeroElement,
    #[error("{0} has prime support outside the model's prime set")]
    OutsideSupport(String),
    #[error("objects belong to different field models")]
    ModelMismatch,
    #[error("square class {0:#x} is out of range for this model")]
    ClassOutOfRange(u64),
    #[error("size bound exceeded: {0}")]
    TooLarge(String),
    #[error("subgroup is the whole square-class group")]
    NotProper,
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
