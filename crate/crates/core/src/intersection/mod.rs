pub mod engine;
pub mod relations;
pub mod symbols;

pub use engine::*;
pub use relations::*;
pub use symbols::*;
