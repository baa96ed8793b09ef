#![allow(clippy::result_large_err)]

pub mod checker;
pub mod defs;
pub mod engine;
pub mod frontend;
pub mod speclog;
pub mod syntax;
pub mod tactics;
pub mod unify;
