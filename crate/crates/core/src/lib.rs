//! Exact solvers for multicut and generalized multiway cut on trees.

pub mod auxgraph;
pub mod branch;
pub mod gadgets;
pub mod gmwct;
pub mod io;
pub mod model;
pub mod oracle;
pub mod reduce;
