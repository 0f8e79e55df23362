#![allow(dead_code)]

pub mod brute;
pub mod fixtures;
pub mod gen;
pub mod inference;
pub mod naive;
pub mod oracle;
