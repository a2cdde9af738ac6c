//! Shape categories, integrators and strict Dold–Kan correspondences over ℤ.

pub mod chains;
pub mod cli;
pub mod doldkan;
pub mod homology;
pub mod integrators;
pub mod intlinalg;
pub mod presheaf;
pub mod shapecat;
pub mod wreath;
