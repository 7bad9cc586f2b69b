//! Learned cooperative transceiver: semantic encoders, JSC codecs, the
//! task performer and the staged training procedure.

pub mod backbone;
pub mod codec;
pub mod data;
mod error;
pub mod eval;
pub mod layers;
pub mod link;
pub mod model;
pub mod params;
pub mod pipeline;
pub mod task;
pub mod train;

pub use error::{NnError, Result};
