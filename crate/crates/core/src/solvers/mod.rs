//! Exact LP, exact vertex enumeration and a small floating-point SDP kernel.

pub mod lp;
pub mod polytope;
pub mod sdp;

pub use lp::{lp_feasible_point, lp_solve, LpSolution, RationalLP, Sense};
pub use polytope::{enumerate_vertices, HRepPolytope, VERTEX_ENUM_LIMIT};
pub use sdp::{sdp_solve, DenseSdp, SdpSolution};
