pub mod config;
pub mod field;
pub mod freealg;
pub mod freelie;
pub mod geometry;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod representation;
pub mod term;
pub mod verbal;
