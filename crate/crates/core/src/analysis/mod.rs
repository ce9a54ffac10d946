//! Extraction of `T_u` and `Γ` from `W_a(t)` and the scaling studies built
//! on it.

pub mod fit;
pub mod period;
pub mod scaling;
pub mod sweep;

pub use fit::{fit_damped_cosine, fit_series, jackknife_gamma, FitOptions, FitResult};
pub use period::{measure_period, period_scan, PeriodOptions, PeriodRow, PeriodScan};
pub use scaling::{fit_scaling, ScalingResult};
pub use sweep::{gamma_sweep, measure_decay, DecayMeasurement, SweepCell, SweepOptions, SweepRecord};
