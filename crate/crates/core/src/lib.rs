pub mod calibration;
pub mod catalog;
pub mod frontend;
pub mod generalize;
pub mod io;
pub mod mining;
pub mod pipeline;
pub mod server;
pub mod triage;
pub mod vocab;
