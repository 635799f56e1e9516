//! Cylindrical KLRW algebras of type A: exact normal forms, gradings,
//! Coulomb branch generators and the vector bundle checks built on them.

pub mod bundles;
pub mod coulomb;
pub mod diagram;
pub mod golden;
pub mod gradings;
pub mod normal;
pub mod operator;
pub mod par;
pub mod plucker;
pub mod poly;
pub mod props;
pub mod ratfun;
pub mod rewrite;
pub mod sample;
pub mod tableau;
