//! Closed-form dynamics of a single level coupled to an infinite,
//! equally spaced ladder of levels, with an independent integrator to
//! check it and the temporal-correlation and coherence observables built
//! on top.
//!
//! Time is the rescaled `T = Δt/(2π)` throughout.

pub mod analytic;
pub mod dd;
pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod real;
pub mod special;
pub mod sum;

pub use analytic::{
    b_general, b_special_zero_detuning, c_general, evolve_state, first_window_b, first_window_c,
    lorentzian_profile, AnalyticSolver, KappaTable, LaguerreConvention, Propagator, Solver,
};
pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use model::{
    derive_params, survival_probability, DerivedParams, InitialState, LevelWindow, ModelParams,
    StateVector,
};
pub use real::{Precision, Real};
