pub mod coefficient;
pub mod dimension;
pub mod motion;
pub mod runner;
pub mod scenario;
pub mod sets;
pub mod variation;
