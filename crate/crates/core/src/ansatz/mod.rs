//! Exact tanh-method verification.

pub mod poly;
pub mod verifier;

pub use poly::{derivative_product, int, rat, tanh_derivative, Rational, TanhPoly};
pub use verifier::{
    balance_degree, balance_degree_of, compare_constants, default_grid, derive_constants, fourier_symbol,
    fourier_symbol_exact, fourier_symbol_positivity, ode3_residual, reference_constants, rescaled_ode_check,
    rescaled_ode_residual, verify_family, verify_family_with, AnsatzInstance, ConstantsComparison, FamilyReport,
    RescaledOdeReport, SampleResult, SymbolReport, TermShape, RESCALED_SPEED,
};
