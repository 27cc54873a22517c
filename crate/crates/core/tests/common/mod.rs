#![allow(dead_code)]

pub mod checks;
pub mod frames;
pub mod replay;
pub mod statevec;
