//! An exact-arithmetic engine for betting games on binary outcome sequences
//! under interval forecasts.
//!
//! The crate evaluates and validates capital processes — supermartingales
//! indexed by outcome situations, and superfarthingales indexed by
//! forecast/outcome records — entirely in arbitrary-precision rational
//! arithmetic. On top of the two process kinds it provides conversions
//! between them, calibration betting strategies with certified capital lower
//! bounds, mixtures, rationalization of approximately-given forecasting
//! systems, and greedy generation of forecast-consistent outcome paths.
//!
//! Everything is finite-horizon and exact: validation reports, capital
//! trajectories and audits are reproducible byte for byte.

pub mod bridge;
pub mod calibration;
pub mod error;
pub mod files;
pub mod forecast;
pub mod generator;
pub mod logbound;
pub mod martingale;
pub mod preq;
pub mod rational;
pub mod sampling;
pub mod seq;
pub mod system;

pub use bridge::{equivalence_probe, lift_to_farthingale, restrict_to_martingale, ProbeReport};
pub use calibration::{
    audit, bound_certificate, lower_calibration_farthingale, upper_calibration_farthingale,
    AuditReport, BoundCertificate, SelectionFunction,
};
pub use error::Error;
pub use forecast::{
    classify_gamble, eval_linear, lower_expectation, upper_expectation, Gamble, GambleClass,
    IntervalForecast,
};
pub use generator::{greedy_random_path, spite_system, GreedyRun};
pub use logbound::ln_bounds;
pub use martingale::{
    inflation_smooth, run_capital, strategy_to_process, validate_supermartingale,
    CapitalTrajectory, GambleStrategy, MartingaleReport, NodeProcess,
};
pub use preq::{
    bound_ceiling, doubler, mixture, run_capital_preq, validate_superfarthingale,
    FarthingaleReport, MixtureSpec, PreqProcess, PreqTrajectory,
};
pub use rational::Rational;
pub use seq::{Outcome, PrequentialSituation, Situation};
pub use system::{ApproximableSystem, ForecastingSystem};
