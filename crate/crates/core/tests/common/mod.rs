#![allow(dead_code)]

pub mod fuzz;
pub mod golden;
pub mod micro;
pub mod programs;
pub mod tptp_syntax;
