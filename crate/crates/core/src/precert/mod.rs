//! Vanishing-derivatives pre-certificate for radial simple functions under
//! Gaussian deconvolution, and the checks that decide whether it certifies
//! the non-degenerate source condition.

mod certificate;
mod gram;
mod report;
mod spec;

pub use certificate::{solve_precert, Precertificate};
pub use gram::{assemble_gram, condition_number, smallest_eigenvalue, GramSystem, MAX_CONDITION};
pub use report::{
    certify, certify_with_profile, scan_grid, sweep_sigma, CertificateReport, CertifyTolerances, SweepRow, Verdict,
    MAX_PEAK_SECOND_DIFFERENCE, SECOND_DERIVATIVE_AGREEMENT,
};
pub use spec::SimpleRadialSpec;
