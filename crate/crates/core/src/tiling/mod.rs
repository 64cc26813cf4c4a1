//! Irregular array configurations: generation, enumeration and counting.

mod config;
mod count;
mod dictionary;
pub mod dlx;
mod shapes;
mod thinned;

pub use config::{connection_matrix, fill_factor, ArrayConfig, ArrayKind, ConnectionMatrix};
pub use count::{count_domino, count_thinned, count_thinned_four_term, scientific_truncated};
pub use dictionary::{build_dictionary, enumerate_exact_covers, random_tiling, DictionaryMatrix, Placement};
pub use shapes::{Shape, ShapeFamily, ShapeSet};
pub use thinned::{sample_thinned, spans_full_aperture};
