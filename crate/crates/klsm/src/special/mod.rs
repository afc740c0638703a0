//! Special functions and the Bessel transforms of the cutoff weight.

pub mod bessel;
pub mod decay;
pub mod gamma;
pub mod quad;
pub mod testfn;
pub mod transforms;

pub use bessel::{
    bessel_i, bessel_j, bessel_j_imaginary_order, bessel_k_imaginary_order, bessel_k_real, bessel_y0,
};
pub use gamma::{gamma_complex, gamma_real, ln_gamma_complex};
pub use testfn::{phi_eval, ForcedWeight, Shape, TestFunctionParams, Weight};
pub use transforms::{
    holomorphic_weight_sum, transform_check, transform_hat, transform_hat_with, transform_phi, HatForm,
    SpectralParam, TransformValue,
};
