//! Linear normalization of convex bodies in R³ for the reverse isodiametric
//! inequality `Vol(TK) >= (sqrt(2)/12) Diam(TK)^3`, together with numerical
//! certificates for the determinant-constrained optimization problem behind
//! it and the lattice-width corollary `Vol(K) >= omega(K)^3 / 12`.

pub mod admissible;
pub mod bounds;
pub mod certifier;
pub mod geom;
pub mod john;
pub mod lattice;
pub mod mvee;

pub use geom::{convex_hull, diameter, difference_body, volume, Coord, GeomError, Mat3, Mode, Point, Polytope, Vec3};
