//! Exact computations on rank-3 vector bundle classes over the projective line.
//!
//! The crate models projective bundle classes on P^1 over a finite field as
//! normalized splitting types, builds the weighted neighbor graphs of the two
//! spherical operators at a rational point, cross-validates the closed-form
//! neighbor rules against a brute-force count over small prime fields, solves
//! the simultaneous eigenfunction recursion in exact rational arithmetic, and
//! decides cusp-vanishing and toroidal-sum questions through finite linear
//! systems. Everything is exact: graph weights live in Z[q], tables in Q, and
//! the oracle in F_p.

pub mod bundles;
pub mod eigenform;
pub mod error;
pub mod exact;
pub mod extensions;
pub mod hecke;
pub mod linalg_fq;
pub mod oracle;
pub mod qpoly;
pub mod toroidal;

pub use bundles::{canonical_projective, enumerate_pbun, splitting_from_h0_profile, ProjectiveType, SplittingType};
pub use eigenform::{solve_by_elimination, solve_eigenform, verify_hecke_relations, EigenPair, FormTable};
pub use error::{Error, Result};
pub use extensions::{cusp_space_dimension, cusp_vanishing_certificate, cuspidal_sum, ext_dim, middle_splitting, middle_term, ExtClass, TransitionBundle};
pub use hecke::{apply_hecke, build_graph, phi3_neighbors, phi_neighbors, HeckeEdge, HeckeGraph};
pub use linalg_fq::{enumerate_subspaces, FqMatrix, Subspace};
pub use oracle::{neighbor_oracle, verify_rules, NeighborCount, VerifyReport};
pub use qpoly::QPoly;
pub use toroidal::{picard_coset_count, pushforward_line, toroidal_eigen_intersection, toroidal_sum, IntersectionVerdict, ToroidalReport};
