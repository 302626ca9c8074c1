//! Envelope fitting, lemma checks, certification and campaigns.

pub mod campaign;
pub mod certify;
pub mod checks;
pub mod envelope;
pub mod lemmas;

pub use campaign::{run_campaign, CampaignReport, RegimeRegression};
pub use certify::{certify_point, resolve_alpha, BoundCertificate, Lab, Tag};
pub use checks::{check_dav2_chain, check_interpolation, greens_by_laplace, Dav2Check, InterpolationCheck};
pub use envelope::{fit_envelope, EnvelopeFit, EnvelopeSample, FitOptions};
pub use lemmas::{random_interpolation_trials, sweep_about_lemma, sweep_gamma_lemma, CheckSummary, LemmaSweep};
