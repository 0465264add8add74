pub mod chart;
pub mod sections;

pub use chart::*;
pub use sections::*;
