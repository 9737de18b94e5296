pub mod admissibility;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod hyperbolic;
pub mod kernel_verifier;
mod modes;
pub mod quad;
pub mod semilinear;
pub mod spectral_grid;
pub mod specfun;
