//! Controllable puzzle environments and the evaluation pipeline around them.

pub mod config;
pub mod env;
pub mod error;
pub mod eval;
pub mod extract;
pub mod model;
pub mod par;
pub mod prompt;
pub mod report;
pub mod store;
pub mod tokenizer;

pub use error::{Error, Result};
