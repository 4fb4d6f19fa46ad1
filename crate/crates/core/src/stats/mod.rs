//! Special functions, the noncentral chi-squared law and input laws.

mod input;
mod ncx2;
pub mod quad;
pub mod special;

pub use input::{input_sample, InputLaw, LawKind};
pub use ncx2::{cdf_l2_distance, Ncx2};
