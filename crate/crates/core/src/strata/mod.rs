pub mod exceptional;
pub mod partition;
pub mod principal;
pub mod signature;
pub mod tree;

pub use exceptional::*;
pub use partition::*;
pub use principal::*;
pub use signature::*;
pub use tree::*;
