pub mod act;
pub mod cli;
pub mod deciders;
pub mod formula;
pub mod monoid;
pub mod report;
pub mod testkit;
