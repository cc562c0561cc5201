//! Categorical quantum theory toolkit: string diagrams with duals, Frobenius
//! observables, strong complementarity, the CPM construction and GHZ nonlocality.

pub mod algebra;
pub mod cpm;
pub mod diagram;
pub mod models;
pub mod nonlocality;
pub mod rewrite;
pub mod signatures;

pub use num_complex::Complex64 as C64;
