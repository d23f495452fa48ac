pub mod error;
pub mod field;
pub mod graph;
pub mod hyperoval;
pub mod io;
pub mod linalg;
pub mod lineset;
pub mod projgeom;
pub mod quadric;
pub mod search;
pub mod spread;

pub use error::{Error, Result};
