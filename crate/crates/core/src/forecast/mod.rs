//! Rolling-window inflation forecasting: transformation codes, target
//! construction, rolling re-estimation, forecast accuracy and the
//! Diebold-Mariano comparison.

mod dm;
mod rolling;
mod tcode;

pub use dm::{dm_test, DmResult};
pub use rolling::{
    rmsfe, rolling_forecast, rolling_forecast_target, selection_stats, ForecastMethod,
    ForecastResult, RollingConfig, SelectionStats,
};
pub use tcode::{apply_tcode, target_transform, TargetSeries, Tcode};
