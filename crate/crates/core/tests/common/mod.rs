pub mod dense;
pub mod stats;
