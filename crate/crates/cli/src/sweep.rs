use clap::Args;
use cvqudit::bell::{bell_curve, find_max_violation, violation_threshold, DEFAULT_MAX_BRACKET};
use cvqudit::BellCurve;
use serde_json::json;

use crate::output::{emit, to_json_string};
use crate::{CliError, CliResult, Format, OutputArgs};

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    rmin: f64,
    #[arg(long, default_value_t = 6.0)]
    rmax: f64,
    #[arg(long, default_value_t = 601)]
    steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads for the sweep (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// `r,B` header plus one `%.6f,%.6f` row per grid point.
pub fn to_csv(curve: &BellCurve) -> String {
    let mut s = String::from("r,B\n");
    for &(r, b) in &curve.points {
        s.push_str(&format!("{r:.6},{b:.6}\n"));
    }
    s
}

pub fn to_json(curve: &BellCurve) -> String {
    let points: Vec<_> = curve.points.iter().map(|&(r, b)| json!({ "r": r, "B": b })).collect();
    to_json_string(&json!({
        "metadata": {
            "formula": BellCurve::FORMULA,
            "r_min": curve.r_min,
            "r_max": curve.r_max,
            "steps": curve.steps(),
        },
        "points": points,
    }))
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    if !args.rmin.is_finite() || !args.rmax.is_finite() || args.rmin < 0.0 || args.rmax <= args.rmin {
        return Err(CliError::Usage(format!(
            "need 0 <= --rmin < --rmax, got [{}, {}]",
            args.rmin, args.rmax
        )));
    }
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Failure(format!("cannot start worker pool: {e}")))?;
    let curve = pool.install(|| bell_curve(args.rmin, args.rmax, args.steps))?;
    let body = match args.format {
        Format::Csv => to_csv(&curve),
        Format::Json => to_json(&curve),
    };
    emit(args.output.out.as_deref(), &body)?;

    let (r_star, b_star) = find_max_violation(DEFAULT_MAX_BRACKET.0, DEFAULT_MAX_BRACKET.1)?;
    let threshold = violation_threshold();
    let summary = format!("max violation: r* = {r_star:.6}, B* = {b_star:.6}; B = 2 threshold at r = {threshold:.6}");
    if args.output.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
