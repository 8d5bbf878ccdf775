//! Numerical checks of the resolvent representation, virial and Morawetz
//! machinery, coercivity and dispersive decay.

mod identities;
mod quadrature;
mod report;
mod scans;
mod virial;
mod weights;

pub use identities::{balakrishnan_apply_check, plancherel_identity_check, plancherel_mode_check};
pub use quadrature::{beta_test_integral, LambdaQuadrature};
pub use report::DiagnosticRecord;
pub use scans::{
    coercivity_functional, commutator_decay_scan, dispersive_decay_fit, log_log_slope,
    mass_concentration, morawetz_time_average, CommutatorScan, DecayFit,
};
pub use virial::{
    classical_linear_term, nonlinear_virial_term, virial_bracket, virial_consistency,
    virial_rate_direct, virial_rhs, VirialConsistency,
};
pub use weights::{
    build_morawetz_weight, regularized_distance_weight, MorawetzWeight, VirialWeight, WeightKind,
};
