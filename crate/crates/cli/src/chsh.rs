use std::f64::consts::SQRT_2;

use clap::Args;
use cvqudit::bell::{chsh_cv_expectation, pseudospin_correlations, refine_planar_settings};
use cvqudit::cv::{block_mixture_w, geometric_weights, nopa, DEFAULT_TRUNCATION};
use cvqudit::{AmbientState, ChshSettings};

use crate::{CliError, CliResult};

const DEFAULT_MIXTURE_BLOCKS: usize = 16;

#[derive(Debug, Args)]
pub struct ChshArgs {
    /// Squeezing parameter of a two-mode squeezed vacuum.
    #[arg(long, conflicts_with = "mixture", required_unless_present = "mixture")]
    r: Option<f64>,
    /// Block mixture of two-level maximally entangled states: `geometric:<ratio>`
    /// or `weights:<p0>,<p1>,...`.
    #[arg(long)]
    mixture: Option<String>,
    /// Number of blocks for a geometric mixture.
    #[arg(long, default_value_t = DEFAULT_MIXTURE_BLOCKS)]
    blocks: usize,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    trunc: usize,
}

fn parse_mixture(spec: &str, blocks: usize) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("cannot parse mixture spec '{spec}'"));
    let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "geometric" => {
            let ratio: f64 = rest.parse().map_err(|_| bad())?;
            Ok(geometric_weights(ratio, blocks)?)
        }
        "weights" => rest.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect(),
        _ => Err(bad()),
    }
}

fn report(omega: &dyn AmbientState) -> CliResult<()> {
    let textbook = chsh_cv_expectation(omega, &ChshSettings::textbook())?;
    let correlations = pseudospin_correlations(omega)?;
    let (settings, refined) = refine_planar_settings(&correlations);
    let angle = |v: [f64; 3]| v[0].atan2(v[2]).to_degrees();
    println!("textbook settings: {textbook:.6}");
    println!(
        "refined planar settings: {refined:.6} (a={:.0}°, a'={:.0}°, b={:.0}°, b'={:.0}°)",
        angle(settings.a),
        angle(settings.a_prime),
        angle(settings.b),
        angle(settings.b_prime)
    );
    println!("quantum maximum 2*sqrt(2): {:.6}", 2.0 * SQRT_2);
    println!("local bound: 2.000000");
    Ok(())
}

pub fn run(args: &ChshArgs) -> CliResult<()> {
    if args.trunc < 2 {
        return Err(CliError::Usage("--trunc must be at least 2".into()));
    }
    match (&args.r, &args.mixture) {
        (Some(r), None) => {
            if !r.is_finite() || *r < 0.0 {
                return Err(CliError::Usage(format!("--r must be a finite value >= 0, got {r}")));
            }
            let ket = nopa(*r, args.trunc)?;
            println!(
                "state: squeezed vacuum r={r:.6}, trunc={}, tail mass {:.3e}",
                args.trunc,
                ket.tail_mass()
            );
            report(&ket)
        }
        (None, Some(spec)) => {
            let weights = parse_mixture(spec, args.blocks)?;
            let mixture = block_mixture_w(2, &weights, args.trunc)?;
            println!(
                "state: block mixture {spec}, {} blocks, trunc={}, renormalization deficit {:.3e}",
                weights.len(),
                args.trunc,
                mixture.deficit()
            );
            report(&mixture)
        }
        _ => Err(CliError::Usage("give exactly one of --r or --mixture".into())),
    }
}
