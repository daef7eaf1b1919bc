use clap::Args;
use cvqudit::bell::fu_bell_max;
use cvqudit::bloch::{induced_qudit_state, pure_fidelity};
use cvqudit::cv::{nopa, project_block, DEFAULT_TRUNCATION};
use cvqudit::SchmidtTriple;

use crate::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct MapNopaArgs {
    /// Squeezing parameter r >= 0.
    #[arg(long)]
    r: f64,
    /// Qudit dimension n >= 2.
    #[arg(long)]
    n: usize,
    /// Fock truncation per mode (>= n).
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    trunc: usize,
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
}

pub fn run(args: &MapNopaArgs) -> CliResult<()> {
    if !args.r.is_finite() || args.r < 0.0 {
        return Err(CliError::Usage(format!(
            "--r must be a finite value >= 0, got {}",
            args.r
        )));
    }
    if args.n < 2 || args.trunc < args.n {
        return Err(CliError::Usage(format!(
            "need n >= 2 and trunc >= n, got n={}, trunc={}",
            args.n, args.trunc
        )));
    }
    let ket = nopa(args.r, args.trunc)?;
    let induced = induced_qudit_state(&ket, args.n)?;
    let (projected, _) = project_block(&ket, args.n, 0, 0)?;
    let fidelity = pure_fidelity(&induced.density, &projected)?;
    let schmidt = induced.schmidt_coefficients()?;

    let t = args.r.tanh();
    let closed: Vec<f64> = (0..args.n).map(|k| t.powi(k as i32)).collect();
    let norm = closed.iter().map(|a| a * a).sum::<f64>().sqrt();
    let closed: Vec<f64> = closed.iter().map(|a| a / norm).collect();

    println!("r: {:.6}", args.r);
    println!("n: {}", args.n);
    println!("trunc: {}", args.trunc);
    println!("schmidt coefficients: {}", list(&schmidt));
    println!("closed form a(k): {}", list(&closed));
    println!("fidelity with block projection: {fidelity:.12}");
    println!("weight in block-covered levels: {:.12}", induced.used_weight);
    println!("tail mass: {:.6e}", ket.tail_mass());
    println!("min eigenvalue of induced state: {:.6e}", induced.min_eigenvalue);
    if args.n == 3 {
        let triple = SchmidtTriple::new([schmidt[0], schmidt[1], schmidt[2]])?;
        println!("B: {:.6}", fu_bell_max(&triple));
    }
    if let Some(w) = &induced.warning {
        eprintln!("warning: {w}");
    }
    Ok(())
}
