//! Exact rational geometry: scalars, vectors and axis-aligned affine cubes.

pub mod cube;
pub mod scalar;

pub use cube::{
    cube_apply, cube_compose, cube_inverse, cube_project, cubes_disjoint, AffineF64, AffineInc,
    AxisAffine, CAutElement, LittleCube,
};
pub use scalar::{Scalar, VecN};
