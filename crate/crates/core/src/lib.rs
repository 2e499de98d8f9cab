pub mod cli;
pub mod handlecalc;
pub mod lattice;
pub mod numbers;
pub mod plumbing;
pub mod scriptdsl;
