use gac_core::filters::{gaussian_normalized, gaussian_simple, stopping_function};
use gac_core::graph::{build_rgg, rgg_radius, sample_uniform_points};
use gac_core::validation::{
    curvature_convergence_experiment, error_exponent_fit, gradient_convergence_experiment, trial_seed, ExperimentPlan,
};
use gac_core::{AnalyticField, ErrorTable, GaussianParams, Point2, Rect, ScalarField};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::manifest::OutputDir;
use crate::{Suite, ValidateArgs};

pub const EXPONENT_MAX: f64 = -0.15;
pub const NORMALIZED_CONST_TOL: f64 = 1e-12;
pub const SIMPLE_DEFECT_MIN: f64 = 0.01;
const FILTER_SIGMA: f64 = 0.02;
const STOPPING_LAMBDA: f64 = 0.05;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub measurements: serde_json::Value,
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

fn fmt_series(s: &[(usize, f64)]) -> String {
    s.iter().map(|(n, e)| format!("{n}:{e:.3e}")).collect::<Vec<_>>().join(" ")
}

fn gaussian_field() -> AnalyticField {
    AnalyticField::gaussian(0.25, Point2::new(0.5, 0.5)).expect("valid Gaussian")
}

fn conic(x0: f64) -> AnalyticField {
    AnalyticField::conic(0.4, 0.3, Point2::new(x0, 0.5)).expect("valid cone")
}

fn write_table(out: &mut OutputDir, name: &str, table: &ErrorTable) -> Result<(), CliError> {
    out.write(name, |f| table.write_csv(f))
}

fn medians_json(table: &ErrorTable) -> serde_json::Value {
    table
        .series()
        .into_iter()
        .map(|(op, filter)| {
            let key = format!("{op}/{filter}");
            (key, json!(table.medians(&op, &filter)))
        })
        .collect::<serde_json::Map<_, _>>()
        .into()
}

pub fn run(a: &ValidateArgs, out: &mut OutputDir) -> Result<Report, CliError> {
    let plan = ExperimentPlan { sizes: a.sizes.clone(), trials: a.trials, radius_const: a.radius_const, seed: a.seed };
    let (checks, measurements) = match a.suite {
        Suite::Gradient => gradient(&plan, out)?,
        Suite::Exponent => exponent(&plan, out)?,
        Suite::Curvature => curvature(&plan, out)?,
        Suite::Filters => filters(&plan)?,
    };
    Ok(Report { suite: a.suite, passed: checks.iter().all(|c| c.passed), checks, measurements })
}

type SuiteOutput = (Vec<Check>, serde_json::Value);

fn gradient(plan: &ExperimentPlan, out: &mut OutputDir) -> Result<SuiteOutput, CliError> {
    let table = gradient_convergence_experiment(&gaussian_field(), plan)?;
    write_table(out, "errors.csv", &table)?;
    let raw = table.medians("geometric", "none");
    let mut checks = vec![check(
        "raw error strictly decreases",
        raw.windows(2).all(|w| w[1].1 < w[0].1),
        fmt_series(&raw),
    )];
    for filter in ["average", "median"] {
        let f = table.medians("geometric", filter);
        checks.push(check(
            format!("{filter} filtering beats raw at every size"),
            f.iter().zip(&raw).all(|(a, b)| a.1 < b.1),
            fmt_series(&f),
        ));
    }
    Ok((checks, medians_json(&table)))
}

fn exponent(plan: &ExperimentPlan, out: &mut OutputDir) -> Result<SuiteOutput, CliError> {
    let table = gradient_convergence_experiment(&gaussian_field(), plan)?;
    write_table(out, "errors.csv", &table)?;
    let slope = error_exponent_fit(&table, "geometric", "none")?;
    let checks = vec![check(
        "raw gradient error exponent",
        slope <= EXPONENT_MAX,
        format!("slope {slope:.3}, threshold {EXPONENT_MAX}"),
    )];
    Ok((checks, json!({ "slope": slope, "medians": medians_json(&table) })))
}

fn curvature(plan: &ExperimentPlan, out: &mut OutputDir) -> Result<SuiteOutput, CliError> {
    let smooth = curvature_convergence_experiment(&conic(-0.25), plan)?;
    let rough = curvature_convergence_experiment(&conic(0.5), plan)?;
    write_table(out, "errors_smooth.csv", &smooth)?;
    write_table(out, "errors_nonsmooth.csv", &rough)?;
    let mut checks = Vec::new();
    for op in ["geometric", "gradient-based"] {
        let s = smooth.medians(op, "median");
        let decreased = matches!((s.first(), s.last()), (Some(a), Some(b)) if s.len() > 1 && b.1 < a.1);
        checks.push(check(format!("smooth cone {op}/median decreases"), decreased, fmt_series(&s)));
    }
    for (op, filter) in smooth.series() {
        let s = smooth.medians(&op, &filter);
        let r = rough.medians(&op, &filter);
        checks.push(check(
            format!("non-smooth cone {op}/{filter} worse at every size"),
            r.iter().zip(&s).all(|(a, b)| a.1 > b.1),
            format!("{} vs {}", fmt_series(&r), fmt_series(&s)),
        ));
    }
    Ok((checks, json!({ "smooth": medians_json(&smooth), "non_smooth": medians_json(&rough) })))
}

fn filters(plan: &ExperimentPlan) -> Result<SuiteOutput, CliError> {
    if plan.trials == 0 || plan.sizes.is_empty() {
        return Err(CliError::Usage("filters suite needs at least one size and one trial".into()));
    }
    let params = GaussianParams::new(FILTER_SIGMA)?;
    let mut worst_normalized = 0.0f64;
    let mut least_defect = f64::INFINITY;
    let mut rows = Vec::new();
    for &n in &plan.sizes {
        for trial in 0..plan.trials {
            let pts = sample_uniform_points(n, Rect::UNIT, trial_seed(plan.seed, n, trial))?;
            let g = build_rgg(pts, rgg_radius(n, plan.radius_const))?;
            let ones = ScalarField::constant(&g, 1.0);
            let normalized = gaussian_normalized(&g, &ones, params)?;
            let dev = normalized.values().iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
            let simple = gaussian_simple(&g, &ones, params)?;
            let hi = simple.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = simple.values().iter().copied().fold(f64::INFINITY, f64::min);
            let defect = (hi - lo) / hi;
            worst_normalized = worst_normalized.max(dev);
            least_defect = least_defect.min(defect);
            rows.push(json!({ "n": n, "trial": trial, "normalized_deviation": dev, "simple_defect": defect }));
        }
    }
    let probe = ScalarField::new(
        &build_rgg(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], 0.1)?,
        vec![0.0, STOPPING_LAMBDA],
    )?;
    let g = stopping_function(&probe, STOPPING_LAMBDA)?;
    let checks = vec![
        check(
            "normalized Gaussian preserves constants",
            worst_normalized <= NORMALIZED_CONST_TOL,
            format!("max deviation {worst_normalized:.2e}, tolerance {NORMALIZED_CONST_TOL:e}"),
        ),
        check(
            "plain Gaussian distorts constants",
            least_defect > SIMPLE_DEFECT_MIN,
            format!("smallest relative spread {least_defect:.3}, threshold {SIMPLE_DEFECT_MIN}"),
        ),
        check(
            "stopping function anchors",
            g[0] == 1.0 && g[1] == 0.5,
            format!("g(0) = {}, g(lambda) = {}", g[0], g[1]),
        ),
    ];
    Ok((checks, json!(rows)))
}
