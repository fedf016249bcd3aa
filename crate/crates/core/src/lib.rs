pub mod arith;
pub mod flags;
pub mod bloch;
pub mod cli;
pub mod complex3;
pub mod gluing;
pub mod holonomy;
pub mod nzsymp;

#[cfg(test)]
pub(crate) mod testdata;
