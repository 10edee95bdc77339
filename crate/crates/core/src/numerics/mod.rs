//! Numerical building blocks: jets, polynomials, root isolation, eigenvalues, contours.

pub mod contour;
pub mod eigen;
pub mod jet;
pub mod poly;
pub mod rank_one;
pub mod roots;

pub use contour::{marching_squares, BBox, Grid, Polyline};
pub use eigen::eigen4;
pub use jet::{Cx, Jet, Scalar};
pub use poly::Poly;
pub use rank_one::{degeneracy_poly, rank_one_poly};
pub use roots::{companion_roots, real_roots, Root};
