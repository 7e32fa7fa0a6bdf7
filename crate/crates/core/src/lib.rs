//! Multi-source hyperedge network coding problems: enumeration up to
//! relabeling, minimal forms, exact polyhedral bounds on rate regions, and
//! operators that transfer rate regions between networks.

pub mod bounds;
pub mod cli_db;
pub mod enumerate;
pub mod minimality;
pub mod model;
pub mod operators;
pub mod polyhedra;
pub mod raw;
pub mod symmetry;
