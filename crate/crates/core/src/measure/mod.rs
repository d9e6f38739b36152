//! The measures nu, Haar and m, exact samplers, closed-form identities and the
//! statistical verifiers.

pub mod exact;
pub mod rng;
pub mod sample;
pub mod stats;
pub mod verify;

pub use exact::{
    entropy_closed_form, entropy_series, mean_sojourn, nu_mass_partial, verify_calcintegral,
    EntropySeries,
};
pub use rng::RngStream;
pub use sample::{sample_ball, sample_gamma, sample_haar, sample_m, sample_nu};
pub use verify::{
    check_section, random_beta_seq, sequence_identities_hold, verify_calcintegral_report,
    verify_cocycle, verify_coding, verify_entropy, verify_haar_invariance, verify_iid_quotients,
    verify_sojourn, verify_tree, Bias, ExperimentConfig, Report, SectionChecks,
};
