pub mod args;
pub mod proof;
pub mod run;
