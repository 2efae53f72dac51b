//! Two-dimensional local fields, their residue maps, and the canonical characters into R/Z.

pub mod circle;
pub mod elem;
pub mod mixed;

pub use circle::{lambda_fp, lambda_inf, lambda_inf_rational, lambda_p, lambda_p_rational, CircleValue};
pub use elem::{
    complete_tensor_real, res_eqchar, res_flag, res_mixed, substitute_form, substitute_parameter, Coefficient,
    DifferentialForm, EqCharSeries, TwoDimLocalElem,
};
pub use mixed::MixedSeries;
