//! Bessel functions, the complex-frequency 2D kernel, and Green kernels.

mod bessel;
mod kernel;
mod sector;

pub use bessel::{cylinder_bessel, hankel1, hankel1_derivative, MAX_ORDER};
pub use kernel::{green_kernel, green_kernel_gradient, green_kernel_radial_derivative};
pub use sector::{hankel0_sector, sector_constant, SectorPoint, SECTOR_CONSTANT_CLOSED_FORM};
