pub mod cli;
pub mod ddouble;
pub mod error;
pub mod grid;
pub mod interpolation;
pub mod jets;
pub mod luzin;
pub mod maximal;
pub mod meanquotient;
pub mod mms;
pub mod pairs;
pub mod report;
mod stencil;

pub use error::{Error, Result};
