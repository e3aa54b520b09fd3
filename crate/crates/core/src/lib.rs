pub mod decompose;
pub mod error;
pub mod fir;
pub mod fixtures;
pub mod lp;
pub mod magsharpen;
pub mod minimax;
pub mod poly;
pub mod remez;
pub mod sharpen;
