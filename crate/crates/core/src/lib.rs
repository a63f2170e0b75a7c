pub mod config;
pub mod cplx;
pub mod error;
pub mod forms;
pub mod jones;
pub mod knots;
pub mod lobachevsky;
pub mod pipeline;
pub mod poly;
pub mod symbols;
pub mod tracker;
