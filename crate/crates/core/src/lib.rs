//! Identify and bound Galois/monodromy groups of parameterized polynomial-system
//! families.
//!
//! The library has three layers:
//!
//! * exact combinatorics and algebra: permutation groups ([`permgroup`]),
//!   integer lattices ([`intlattice`]), lattice polytopes and mixed volumes
//!   ([`polytope`]), support classification and decomposition trees
//!   ([`sparse`]), Fano-problem degrees ([`fano`]);
//! * exact arithmetic over `Z` and `F_p`: Frobenius splitting-type sampling
//!   and Chebotarev comparisons ([`frobenius`]);
//! * floating-point numerics: parameter-homotopy path tracking, fiber
//!   population and monodromy permutations ([`homotopy`]).
//!
//! All exact layers use arbitrary-precision integers and rationals; nothing
//! in them rounds. The numerical layer is seeded and deterministic for a
//! fixed seed on one platform.

pub mod fano;
pub mod frobenius;
pub mod homotopy;
pub mod intlattice;
pub mod permgroup;
pub mod polytope;
pub mod sparse;
