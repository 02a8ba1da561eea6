//! Ranked, unlabeled multifurcating tree shapes.

pub mod chains;
pub mod coalescent;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod fmatrix;
pub mod lattice;
pub mod shape;
pub mod stats;

pub use error::{Constraint, Error, Result};
pub use fmatrix::{collapse_edge_f, fmatrix_to_string, string_to_fmatrix, validate_fmatrix, DMatrix, FMatrix};
pub use shape::{collapse_edge_s, validate_string, validate_string_tips, StringRepr, TreeShape};
