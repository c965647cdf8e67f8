pub mod analysis;
pub mod bezout;
pub mod error;
pub mod field;
pub mod geometry;
pub mod instance;
pub mod par;
pub mod poly;
pub mod polysys;
pub mod reference;
pub mod ratfunc;
pub mod tracker;

pub use error::{Error, Result};
