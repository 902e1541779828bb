//! Simulation of serially dependent panels and responses, and the Monte
//! Carlo experiments built on them.

mod arma;
mod designs;
mod innovations;
mod mc;
mod response;
mod rng;
mod summary;

pub use arma::{
    gen_arma_panel, simulate_panel, stationary_ar1, ArmaDgpSpec, ArmaProcess, DEFAULT_BURN_IN,
};
pub use designs::{gaussian_arma_pair, laplace_arma_pair, scenario_design, sparse_design, RegressionDesign};
pub use innovations::{gen_innovations, InnovationFamily, InnovationSpec};
pub use mc::{
    ks_distance, mc_b_distribution, mc_corr_density, mc_eigen_stats, mc_estimator_table,
    mc_estimator_table_with, mc_lasso_ratios, mc_lasso_ratios_with, mc_product_normal,
    mc_tstat_rates, mc_tstat_rates_with, run_replications, LassoRatioOptions, McConfig, CORR_BINS,
    TABLE_METHODS, TSTAT_METHODS,
};
pub use response::{gen_response, ResponseDgpSpec, ResponseSample};
pub use rng::{ReplicationSeed, RESPONSE_LANE};
pub use summary::{Histogram, McCell, McSummary, MeanSd};
