use std::time::Duration;

use critex_core::bubble::{EQUALITY_TOL, ENERGY_TOL, VALIDATION_GRID};
use critex_core::constants::{DimensionConstants, CONSTANT_QUAD_TOL};
use critex_core::green::GEOMETRY_TOL;
use critex_core::pohozaev::{
    BOUNDARY_WARNING, DEFAULT_DEGREE, IDENTITY_TOL, SCAN_POINTS, SEED_SCAN_DEPTH,
};
use critex_core::shoot::ShootOptions;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;

pub const TOOL: &str = "critex";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a subcommand hands back before timing is attached.
pub struct Outcome {
    pub parameters: Value,
    pub config: Option<Config>,
    pub problem: Option<Value>,
    pub constants: DimensionConstants,
    pub result: Value,
}

#[derive(Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

/// Everything except `timing` is a deterministic function of the inputs.
#[derive(Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: Value,
    pub defaults: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<Config>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<Value>,
    pub constants: DimensionConstants,
    pub result: Value,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: &'static str, outcome: Outcome, elapsed: Duration) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            parameters: outcome.parameters,
            defaults: defaults(),
            config: outcome.config,
            problem: outcome.problem,
            constants: outcome.constants,
            result: outcome.result,
            timing: Timing { wall_seconds: elapsed.as_secs_f64() },
        }
    }
}

/// Tolerances and grid sizes fixed inside the library.
pub fn defaults() -> Value {
    let shoot = ShootOptions::default();
    json!({
        "constant_quadrature_tol": CONSTANT_QUAD_TOL,
        "geometry_quadrature_tol": GEOMETRY_TOL,
        "energy_quadrature_tol": ENERGY_TOL,
        "identity_quadrature_tol": IDENTITY_TOL,
        "equality_tol": EQUALITY_TOL,
        "profile_validation_grid": VALIDATION_GRID,
        "series_degree": DEFAULT_DEGREE,
        "sign_scan_points": SCAN_POINTS,
        "seed_scan_depth": SEED_SCAN_DEPTH,
        "boundary_warning": BOUNDARY_WARNING,
        "shoot": shoot,
    })
}
