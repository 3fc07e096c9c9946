//! Generalized cross-wavelet transform (GXWT) for synchrony between two
//! multichannel time series.
//!
//! Pipeline: [`series`] ingestion, [`cwt::analytic_cwt`] per channel,
//! [`gxwt::gxwt`] over all channel pairs, then [`contrib`] and [`analysis`]
//! summaries. [`simgen`] produces synthetic dyads with known answers.

pub mod analysis;
pub mod contrib;
pub mod cwt;
pub mod error;
pub mod gxwt;
pub mod selector;
pub mod series;
pub mod simgen;

pub use num_complex::Complex64;

pub use analysis::{
    interaction_spectrum, leader_sign_map, phase_band_summary, spearman, CoiPolicy, InteractionSpectrum,
    PhaseBandSummary, SignMap,
};
pub use contrib::{
    channel_contributions, projection_matrix, ContributionOptions, ContributionTensor, Contributions, Side,
};
pub use cwt::{analytic_cwt, cone_of_influence, make_grid, CoiMask, FrequencyGrid, WaveletTensor};
pub use error::{Error, Result};
pub use gxwt::{
    cross_spectrum, distribution_shape, gxwt, pairwise_gxwt, principal_sqrt, pseudo_variance, CrossSpectrumMatrix,
    DistributionShape, GxwtGrid, Variant,
};
pub use selector::{ChannelSelector, SelectorEntry, SelectorFile};
pub use series::{
    load_csv, parse_csv, save_csv, select_channels, write_csv, ChannelTriple, MultiChannelSeries, RateSpec,
};
pub use simgen::{expected_modulus, expected_phase, mc_oracle_tau, simulate_dyad, Dyad, SimConfig};
