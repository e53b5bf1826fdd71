//! Lie-bracket controllability analysis.

pub mod bracket;
pub mod fd;
pub mod zvec;

pub use bracket::{bracket, lie_rank, lie_singular_values, word_values, words, FieldFamily, Graded};
pub use fd::{jacobian_fd, lie_bracket, FdSpec};
pub use zvec::{det_columns, det_columns7, det_int_from, det_noise_floor, Fields4, GeneralFields3, TotalFields3, ZSet, Z_WORDS};
