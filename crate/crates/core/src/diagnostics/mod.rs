//! Conserved integrals, conservation-law and symmetry residuals, charges and
//! the stability integral.

pub mod charges;
pub mod claws;
pub mod galilean;
pub mod integrals;
pub mod stability;
pub mod symmetry;

pub use charges::{topological_charge, topological_charge_state, IndexRectangle, Rectangle};
pub use claws::{claw_divergence_residual, convergence_table, law_densities, law_uses_f, ConvergenceTable, LAW_COUNT};
pub use galilean::{galilean_relations, linear_fit, GalileanReport};
pub use integrals::{
    conserved_integrals, conserved_integrals_with, dx_inv, dx_inv_hat, generalized_momenta, relative_drift,
    DiagnosticsRecord, DriftScales, FTriple,
};
pub use stability::{stability_integral, StabilityReport};
pub use symmetry::{
    symmetry_action_check, transformed_field, transformed_residual, x3_frame_velocity, Generator, SymmetryReport,
};
