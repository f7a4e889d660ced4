//! Symplectic, optical and Fresnel tomograms of one- and few-mode
//! wavefunctions, and their inversion back to the wavefunction, the density
//! matrix and the Wigner function.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod format;
pub mod grid;
pub mod reconstruct;
pub mod source;
pub mod tomography;
pub mod validate;

pub use analytic::GcfParams;
pub use error::{Result, TomoError};
pub use grid::{ComplexField1D, ComplexField2D, RealField2D, SampledWavefunction, UniformGrid1D};
pub use reconstruct::{DensityMatrix, InversionConfig, PsiAutocorrelation, WignerFunction};
pub use tomography::{FresnelTomogram, NdWavefunction, OpticalTomogram, SymplecticPoint, TomogramPlane};
