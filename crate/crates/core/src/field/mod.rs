//! Grid calculus for divergence-form operators.

mod counterexample;
mod dissipativity;
mod grid;
mod heatflow;
mod operator;

pub use counterexample::{
    counterexample_section7, gamma_scan, linspace_step, section7_function, CounterexampleReport, PolarTerms,
};
pub use dissipativity::{
    dissipativity_functional, duality_power, identity_checks, integrate_form, refinement_study, DissipativityValue,
    IdentityResiduals, RefinementStudy, SmoothInputs, RESIDUAL_FLOOR,
};
pub use grid::{Boundary, Grid, GridFunction, MatrixField, VectorGridFunction};
pub use heatflow::{heat_flow_experiment, HeatFlowReport, TimeSchedule};
pub use operator::{
    bilinear_gradient_product, contractivity_probe, discretize_operator, form_pairing, l2_pairing, semigroup_apply,
    OperatorMatrix, ProbeResult, MAX_UNKNOWNS,
};
