//! Rate–distortion tradeoffs for joint communication and state sensing over
//! multiple-access channels with generalized feedback and two-way channels.

pub mod channel;
pub mod d2d;
pub mod error;
pub mod estimation;
pub mod files;
pub mod lp;
pub mod mac;
pub mod presets;
pub mod prob;
pub mod search;

pub use error::{Error, Result};
