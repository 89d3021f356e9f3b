//! Data generators (nested logistic, nested Clayton, Student-t) and the
//! block-maxima extraction pipeline with occurrence partitions.

mod blocks;
mod clayton;
mod frechet;
mod logistic;
mod stable;
mod student;

pub use blocks::{block_maxima, BlockSpec};
pub use clayton::{sample_nested_clayton, ClaytonConfig};
pub use frechet::{frechet_transform, to_unit_frechet};
pub use logistic::sample_nested_logistic;
pub use stable::sample_positive_stable;
pub use student::{sample_student_t, StudentTConfig};
