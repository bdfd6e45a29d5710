use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use critex_core::bubble::{
    evaluate_criteria, example_11_check, example_11_spec, CriterionReport, LimitValue,
    ProblemSpec, Verdict,
};
use critex_core::constants::{ball_first_eigenvalue, dimension_constants};
use critex_core::green::{geometry_constants, BallGeometry};
use critex_core::pohozaev::{
    build_psibar, certify_nonexistence, intermediate_identities,
    ode_residual, pohozaev_sides, CertificateVerdict, Identity, Multiplier, PohozaevSides,
    PsiBar, Stage,
};
use critex_core::shoot::{find_ground_state, GroundState, RadialSolution, ShootOptions};
use critex_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Config, ConfigError};
use crate::report::Outcome;

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Compute(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Compute(format!("serialization failed: {e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

pub type Run<T> = Result<T, Failure>;

fn to_value<T: Serialize>(v: &T) -> Run<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn load_config(path: &Path) -> Run<(Config, ProblemSpec)> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError { path: String::new(), message: format!("{}: {e}", path.display()) })?;
    let cfg = Config::parse(&text)?;
    let spec = cfg.problem()?;
    Ok((cfg, spec))
}

fn dimension(n: u32) -> Run<critex_core::constants::DimensionConstants> {
    dimension_constants(n).map_err(|e| Failure::Config(ConfigError { path: "--n".into(), message: e.to_string() }))
}

pub fn constants(n: u32) -> Run<Outcome> {
    let consts = dimension(n)?;
    let quad_ratio = consts.c2.quadrature / consts.c3.quadrature;
    let predicted = consts.ratio_identity();
    let result = json!({
        "ratio_identity": {
            "quadrature": quad_ratio,
            "predicted": predicted,
            "relative_residual": ((quad_ratio - predicted) / predicted).abs(),
        },
        "max_relative_residual": consts.max_relative_residual(),
        "critical_power": consts.critical_power(),
        "energy_power": consts.energy_power(),
        "first_eigenvalue": ball_first_eigenvalue(n)?,
    });
    Ok(Outcome { parameters: json!({ "n": n }), config: None, problem: None, constants: consts, result })
}

/// `0` means the center; one number r means (r, 0, …, 0); otherwise n coordinates.
pub fn parse_point(n: u32, raw: &[f64]) -> Run<Vec<f64>> {
    let bad = |m: String| Failure::Config(ConfigError { path: "--y0".into(), message: m });
    match raw.len() {
        1 => {
            let mut y = vec![0.0; n as usize];
            y[0] = raw[0];
            Ok(y)
        }
        len if len == n as usize => Ok(raw.to_vec()),
        len => Err(bad(format!("expected 1 or {n} coordinates, got {len}"))),
    }
}

pub fn geometry(n: u32, y0: &[f64], mu: f64) -> Run<Outcome> {
    let consts = dimension(n)?;
    let y0 = parse_point(n, y0)?;
    let geom = BallGeometry::new(n, y0.clone())
        .map_err(|e| ConfigError { path: "--y0".into(), message: e.to_string() })?;
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(ConfigError { path: "--mu".into(), message: format!("must be >= 0, got {mu}") }.into());
    }
    let g = geometry_constants(&geom, mu, &consts)?;
    let result = json!({ "geometry": geom, "constants": g });
    Ok(Outcome {
        parameters: json!({ "n": n, "y0": y0, "mu": mu }),
        config: None,
        problem: None,
        constants: consts,
        result,
    })
}

fn criterion_verdict(r: &CriterionReport) -> &'static str {
    match (r.condition_i.verdict, r.sufficient_condition_holds) {
        (Verdict::Strict, _) => "strict",
        (Verdict::Equality, true) => "equality_second_condition_holds",
        (Verdict::Equality, false) => "equality_second_condition_fails",
        (Verdict::Violated, _) => "violated",
    }
}

pub fn criterion(path: &Path, lambdas: &[f64]) -> Run<Outcome> {
    let (cfg, spec) = load_config(path)?;
    let report = evaluate_criteria(&spec, lambdas)?;
    let mut result = to_value(&report)?;
    result["verdict"] = json!(criterion_verdict(&report));
    Ok(Outcome {
        parameters: json!({ "config": path, "lambdas": lambdas }),
        config: Some(cfg),
        problem: Some(to_value(&spec)?),
        constants: spec.consts.clone(),
        result,
    })
}

#[derive(Serialize)]
struct SolutionSummary {
    alpha: f64,
    eps: f64,
    residual: f64,
    boundary_defect: f64,
    interior_min: f64,
    u_prime_at_one: f64,
}

impl SolutionSummary {
    fn of(u: &RadialSolution) -> Self {
        Self {
            alpha: u.alpha,
            eps: u.eps,
            residual: u.residual,
            boundary_defect: u.boundary_defect,
            interior_min: u.interior_min,
            u_prime_at_one: u.u_prime_at_one(),
        }
    }
}

/// Reference problem for the intermediate identities when the configured one
/// has no ground state in range: same K, μ = μ₁/2.
fn intermediate_check(spec: &ProblemSpec, psi: &PsiBar, range: (f64, f64)) -> Run<Value> {
    let opts = ShootOptions::default();
    let own = find_ground_state(spec, range.0, range.1, &opts)?;
    let (source, state) = match own {
        GroundState::Found { .. } => ("configured", own),
        GroundState::NotFound { .. } => {
            let reference = spec.with_mu(0.5 * spec.mu1)?;
            ("same_k_half_first_eigenvalue", find_ground_state(&reference, range.0, range.1, &opts)?)
        }
    };
    let Some(u) = state.solution() else {
        return Ok(json!({ "status": "no_solution_in_range", "alpha_range": [range.0, range.1] }));
    };
    let identities = intermediate_identities(u, psi)?;
    let sides = pohozaev_sides(u, psi)?;
    Ok(json!({
        "status": "evaluated",
        "solution_source": source,
        "mu": u.spec().mu,
        "alpha_range": [range.0, range.1],
        "solution": SolutionSummary::of(u),
        "identities": identities,
        "combined": sides,
    }))
}

pub fn certify(path: &Path, check: bool, alpha_range: (f64, f64)) -> Run<Outcome> {
    let (cfg, spec) = load_config(path)?;
    let cert = certify_nonexistence(&spec)?;
    let mut result = to_value(&cert)?;
    if check {
        let psi = match &cert.psibar {
            Some(p) => p.psibar.clone(),
            None => PsiBar::from_seeds(spec.n(), spec.mu, 1.0, -1.0)?,
        };
        result["intermediate"] = intermediate_check(&spec, &psi, alpha_range)?;
    }
    Ok(Outcome {
        parameters: json!({
            "config": path,
            "check_intermediate": check,
            "alpha_min": alpha_range.0,
            "alpha_max": alpha_range.1,
        }),
        config: Some(cfg),
        problem: Some(to_value(&spec)?),
        constants: spec.consts.clone(),
        result,
    })
}

pub struct ShootArgs<'a> {
    pub config: &'a Path,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub opts: ShootOptions,
    pub csv: Option<&'a Path>,
}

fn profile_csv(state: &GroundState) -> String {
    let mut out = String::new();
    match state {
        GroundState::Found { solution, .. } => {
            out.push_str("t,u,du\n");
            for s in &solution.samples {
                let _ = writeln!(out, "{:e},{:e},{:e}", s.t, s.u, s.du);
            }
        }
        GroundState::NotFound { sweep } => {
            out.push_str("alpha,first_zero,u_at_one\n");
            for p in &sweep.points {
                let z = p.first_zero.map(|z| format!("{z:e}")).unwrap_or_default();
                let _ = writeln!(out, "{:e},{z},{:e}", p.alpha, p.u_at_one);
            }
        }
    }
    out
}

pub fn shoot(args: &ShootArgs) -> Run<Outcome> {
    let (cfg, spec) = load_config(args.config)?;
    let state = find_ground_state(&spec, args.alpha_min, args.alpha_max, &args.opts)?;
    let mut result = to_value(&state)?;
    if let Some(u) = state.solution() {
        result["pohozaev"] = to_value(&pohozaev_sides(u, &Identity)?)?;
    }
    if let Some(p) = args.csv {
        fs::write(p, profile_csv(&state))?;
    }
    Ok(Outcome {
        parameters: json!({
            "config": args.config,
            "alpha_min": args.alpha_min,
            "alpha_max": args.alpha_max,
            "options": args.opts,
            "csv": args.csv,
        }),
        config: Some(cfg),
        problem: Some(to_value(&spec)?),
        constants: spec.consts.clone(),
        result,
    })
}

pub fn psibar_csv(psi: &PsiBar, points: usize) -> String {
    let mut out = String::from("t,psibar,psi1,psi2,ode_residual\n");
    let (n, mu) = (psi.n(), psi.mu());
    for i in 0..=points {
        let t = i as f64 / points as f64;
        let _ = writeln!(
            out,
            "{t:e},{:e},{:e},{:e},{:e}",
            psi.jet(t).value,
            psi.psi1.jet(t).value,
            psi.psi2.jet(t).value,
            ode_residual(psi, n, mu, t)
        );
    }
    out
}

pub enum PsibarOutput {
    Report(Outcome),
    Csv(String),
}

pub fn psibar(n: u32, mu: f64, points: usize, csv: bool) -> Run<PsibarOutput> {
    let consts = dimension(n)?;
    if points == 0 {
        return Err(ConfigError { path: "--points".into(), message: "must be positive".into() }.into());
    }
    let built = build_psibar(n, mu);
    if csv {
        return Ok(PsibarOutput::Csv(psibar_csv(&built?.psibar, points)));
    }
    let result = match built {
        Ok(c) => json!({ "status": "constructed", "certificate": c }),
        Err(Error::PsiBarConstruction(msg)) => json!({ "status": "inconclusive", "detail": msg }),
        Err(e) => return Err(e.into()),
    };
    Ok(PsibarOutput::Report(Outcome {
        parameters: json!({ "n": n, "mu": mu, "points": points }),
        config: None,
        problem: None,
        constants: consts,
        result,
    }))
}

pub fn example11(a: Option<f64>, b: f64, mu: f64, f0: f64, lambdas: &[f64]) -> Run<Outcome> {
    let consts = dimension_constants(5)?;
    // Default a puts the first condition at equality.
    let a = a.unwrap_or(-mu * consts.c3.value() * f0 / (9.0 * consts.c2.value()));
    let check = example_11_check(a, b, mu, f0)?;
    let spec = example_11_spec(a, b, mu, f0)
        .map_err(|e| ConfigError { path: "--a/--b/--f0".into(), message: e.to_string() })?;
    let criteria = evaluate_criteria(&spec, lambdas)?;
    let comparison = match (&criteria.condition_ii, criteria.condition_i.verdict) {
        (Some(two), Verdict::Equality) => {
            let limit = match two.asymptotic {
                Some(LimitValue::Finite(q)) => Some(q),
                _ => None,
            };
            json!({
                "first": {
                    "example": [check.first_lhs / f0, check.first_rhs / f0],
                    "criterion": [criteria.condition_i.lhs, criteria.condition_i.rhs],
                },
                "second": {
                    "example": [check.second_lhs, check.second_rhs],
                    "criterion": [limit.map(|q| 3.0 * f0 * q), 3.0 * f0 * two.threshold],
                    "agree": check.second_holds == two.holds,
                },
            })
        }
        _ => json!({ "status": "first_condition_not_at_equality" }),
    };
    Ok(Outcome {
        parameters: json!({ "a": a, "b": b, "mu": mu, "f0": f0, "lambdas": lambdas }),
        config: None,
        problem: Some(to_value(&spec)?),
        constants: consts,
        result: json!({ "check": check, "criteria": criteria, "comparison": comparison }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyRow {
    pub mu: f64,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_i: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_i_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sufficient_condition_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_failed_stage: Option<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shooting: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shooting_agrees: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionRow {
    pub alpha: f64,
    pub residual: f64,
    pub boundary_defect: f64,
    pub pohozaev: PohozaevSides,
}

pub const OUT_OF_RANGE: &str = "out of admissible range";

impl DichotomyRow {
    fn out_of_range(mu: f64) -> Self {
        Self {
            mu,
            verdict: OUT_OF_RANGE.into(),
            condition_i: None,
            condition_i_margin: None,
            sufficient_condition_holds: None,
            certificate: None,
            certificate_failed_stage: None,
            certificate_detail: None,
            positivity_margin: None,
            shooting: None,
            solution: None,
            shooting_agrees: None,
        }
    }
}

pub struct DichotomyArgs<'a> {
    pub config: &'a Path,
    pub mus: &'a [f64],
    pub lambdas: &'a [f64],
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub opts: ShootOptions,
}

fn dichotomy_row(spec: &ProblemSpec, args: &DichotomyArgs) -> Run<DichotomyRow> {
    let mu = spec.mu;
    if !spec.admissible() {
        return Ok(DichotomyRow::out_of_range(mu));
    }
    let crit = evaluate_criteria(spec, args.lambdas)?;
    let mut row = DichotomyRow::out_of_range(mu);
    row.condition_i = Some(crit.condition_i.verdict);
    row.condition_i_margin = Some(crit.condition_i.margin);
    row.sufficient_condition_holds = Some(crit.sufficient_condition_holds);
    let certified = match certify_nonexistence(spec) {
        Ok(c) => {
            row.certificate = Some(c.verdict);
            row.certificate_failed_stage = c.failed_stage;
            row.certificate_detail = c.detail.clone();
            row.positivity_margin = c.positivity.map(|p| p.margin);
            c.verdict == CertificateVerdict::NonexistenceCertified
        }
        Err(e @ Error::DimensionOutOfScope { .. }) => {
            row.certificate_detail = Some(e.to_string());
            false
        }
        Err(e) => return Err(e.into()),
    };
    let state = find_ground_state(spec, args.alpha_min, args.alpha_max, &args.opts)?;
    let found = match state.solution() {
        Some(u) => {
            row.solution = Some(SolutionRow {
                alpha: u.alpha,
                residual: u.residual,
                boundary_defect: u.boundary_defect,
                pohozaev: pohozaev_sides(u, &Identity)?,
            });
            true
        }
        None => false,
    };
    row.shooting = Some(if found { "found" } else { "not_found" });
    row.verdict = if certified {
        "nonexistence_certified"
    } else if crit.sufficient_condition_holds {
        "existence"
    } else {
        "inconclusive"
    }
    .into();
    row.shooting_agrees = Some(match (certified, crit.sufficient_condition_holds) {
        (true, _) => !found,
        (false, true) => found,
        (false, false) => true,
    });
    Ok(row)
}

pub fn dichotomy(args: &DichotomyArgs) -> Run<(Outcome, Vec<DichotomyRow>)> {
    let (cfg, spec) = load_config(args.config)?;
    let mut rows = Vec::with_capacity(args.mus.len());
    for &mu in args.mus {
        if !mu.is_finite() {
            return Err(ConfigError { path: "--mus".into(), message: format!("{mu} is not finite") }.into());
        }
        // Negative μ is reported, not rejected or clipped.
        let row = if mu < 0.0 {
            DichotomyRow::out_of_range(mu)
        } else {
            dichotomy_row(&spec.with_mu(mu)?, args)?
        };
        rows.push(row);
    }
    let outcome = Outcome {
        parameters: json!({
            "config": args.config,
            "mus": args.mus,
            "lambdas": args.lambdas,
            "alpha_min": args.alpha_min,
            "alpha_max": args.alpha_max,
            "options": args.opts,
        }),
        config: Some(cfg),
        problem: Some(to_value(&spec)?),
        constants: spec.consts.clone(),
        result: json!({ "first_eigenvalue": spec.mu1, "rows": rows }),
    };
    Ok((outcome, rows))
}

pub fn dichotomy_table(rows: &[DichotomyRow]) -> String {
    let mut out = format!(
        "{:>12}  {:<24}  {:<10}  {:<24}  {:<10}\n",
        "mu", "verdict", "cond_i", "certificate", "shooting"
    );
    let show = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let name = |v: Value| v.as_str().unwrap_or("-").to_string();
    for r in rows {
        let _ = writeln!(
            out,
            "{:>12}  {:<24}  {:<10}  {:<24}  {:<10}",
            r.mu,
            r.verdict,
            show(r.condition_i.map(|v| name(json!(v)))),
            show(r.certificate.map(|v| name(json!(v)))),
            show(r.shooting.map(str::to_string)),
        );
    }
    out
}
