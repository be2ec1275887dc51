pub mod certify;
pub mod domain;
pub mod enumeration;
pub mod evaluator;
pub mod linter;
pub mod syntax;
pub mod typing;
