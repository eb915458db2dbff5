//! Stabilizer-free weak Galerkin finite elements for the Poisson problem on
//! polygonal meshes.
//!
//! The weak gradient of a weak function `{v_0, v_b}` lives in `Lambda_k(T)`,
//! a space of piecewise Raviart-Thomas fields on a fan sub-triangulation of
//! each cell with continuous normal flux across the internal sub-edges and a
//! single-polynomial divergence. With this choice the plain form
//! `(grad_w u, grad_w v) = (f, v_0)` needs no stabilizer and converges one
//! order above the optimal rate in both the energy and the L2 norm.

pub mod analysis;
pub mod cli;
pub mod localspaces;
pub mod polymesh;
pub mod quadrature;
pub mod wgsolve;
