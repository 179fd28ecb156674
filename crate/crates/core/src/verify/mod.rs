//! Independent oracles and the identity registry, with one residual
//! engine shared by every check.

mod oracles;
mod registry;
mod residual;
mod suite;

pub use oracles::{
    eigen_oracle, kernel_suite, quadrature_partners, scattering_far_field, scattering_oracle, OracleError, PartnerImage, Scattering,
    KERNEL_TOL,
};
pub use registry::{
    evaluate_canonical, evaluate_identity, evaluate_record, identity_registry, identity_suite, lookup, trig_pairs, trig_residual,
    Canonical, IdentityInput, IdentityRecord, IdentityTerm, VerifyError, TRIG_THRESHOLD,
};

pub use residual::{
    evaluate_samples, op_residual, FunctionResidual, ResidualReport, Sample, SkippedPoint,
    RESIDUAL_FLOOR,
};
pub use suite::{
    chebyshev_grid, default_suite, packet_suite, pair_suite, standard_grid, Family, Grid, JetFn, Labeled, TestFunction,
    TestPair, DEFAULT_SEED,
    GRID_POINTS, POLE_EXCLUSION,
};
