//! Fenchel-Nielsen coordinates, distances and elementary-move transforms on
//! hyperbolic surfaces of finite and infinite type, cross-checked against an
//! independent SL(2,R) holonomy oracle.

pub mod asymptotics;
pub mod cli;
pub mod holonomy_oracle;
pub mod hyperbolic_core;
pub mod okai_transforms;
pub mod pants_complex;
