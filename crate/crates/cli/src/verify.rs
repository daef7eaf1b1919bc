use clap::Args;
use cvqudit::bloch::{block_copy_state, decompose, lift_observable, reconstruct, BlochTensor, TensorKind};
use cvqudit::embedding::{build_embedded, embedded_trace_residual, verify_embedded};
use cvqudit::su::{build_generators, trace_relation_residual, verify_algebra};
use cvqudit::tensor::expectation;
use cvqudit::{AmbientState, ComplexMatrix, GeneratorSet, ALGEBRA_TOL, C64, EXPECTATION_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CliError, CliResult};

const SEED: u64 = 0x5eed_c0de;
const RANDOM_TRIALS: usize = 10;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest qudit dimension n to check.
    #[arg(long = "max-n", default_value_t = 6)]
    max_n: usize,
    /// Largest ambient dimension N to check.
    #[arg(long = "max-N", default_value_t = 24)]
    max_ambient: usize,
    /// Scale one generator of every set before checking (exercises the failure path).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

struct Row {
    suite: &'static str,
    case: String,
    residual: f64,
    tolerance: f64,
}

impl Row {
    fn passed(&self) -> bool {
        self.residual < self.tolerance
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = random_matrix(rng, dim);
    (&g + &g.dagger()).scale_real(0.5)
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = random_matrix(rng, dim);
    let rho = &g * &g.dagger();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

fn random_weights(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|p| p / total).collect()
}

fn generator_set(n: usize, inject_fault: bool) -> CliResult<GeneratorSet> {
    let gens = build_generators(n)?;
    if !inject_fault {
        return Ok(gens);
    }
    let mut mats = gens.generators().to_vec();
    mats[0] = mats[0].scale_real(1.001);
    Ok(GeneratorSet::from_matrices(n, mats)?)
}

fn algebra_rows(max_n: usize, inject_fault: bool) -> CliResult<Vec<Row>> {
    let mut rows = Vec::new();
    for n in 2..=max_n {
        let gens = generator_set(n, inject_fault)?;
        rows.push(Row {
            suite: "su_algebra",
            case: format!("n={n} trace relations"),
            residual: trace_relation_residual(&gens),
            tolerance: ALGEBRA_TOL,
        });
        rows.push(Row {
            suite: "su_algebra",
            case: format!("n={n} commutators"),
            residual: verify_algebra(&gens),
            tolerance: ALGEBRA_TOL,
        });
        rows.push(Row {
            suite: "su_algebra",
            case: format!("n={n} antisymmetry of f"),
            residual: gens.structure_constants().antisymmetry_residual(),
            tolerance: ALGEBRA_TOL,
        });
    }
    Ok(rows)
}

fn embedding_rows(max_n: usize, max_ambient: usize) -> CliResult<Vec<Row>> {
    let mut rows = Vec::new();
    for n in 2..=max_n {
        let mut trace_worst = 0.0f64;
        let mut closure_worst = 0.0f64;
        let mut checked = 0;
        for ambient in n..=max_ambient {
            let eg = build_embedded(ambient, n)?;
            trace_worst = trace_worst.max(embedded_trace_residual(&eg));
            closure_worst = closure_worst.max(verify_embedded(&eg));
            checked += 1;
        }
        if checked == 0 {
            continue;
        }
        rows.push(Row {
            suite: "embedding",
            case: format!("n={n}, N={n}..{max_ambient} trace relations"),
            residual: trace_worst,
            tolerance: ALGEBRA_TOL,
        });
        rows.push(Row {
            suite: "embedding",
            case: format!("n={n}, N={n}..{max_ambient} commutators"),
            residual: closure_worst,
            tolerance: ALGEBRA_TOL,
        });
    }
    Ok(rows)
}

fn bloch_rows(max_n: usize, max_ambient: usize, rng: &mut ChaCha8Rng) -> CliResult<Vec<Row>> {
    let mut rows = Vec::new();
    for n in (2..=max_n.min(3)).filter(|&n| n <= max_ambient) {
        for parties in 1..=2 {
            let dim = n.pow(parties as u32);
            let mut round_trip = 0.0f64;
            for _ in 0..RANDOM_TRIALS {
                let op = random_hermitian(rng, dim);
                let t = decompose(&op, n, parties, TensorKind::Observable)?;
                round_trip = round_trip.max(reconstruct(&t).max_abs_diff(&op));
            }
            rows.push(Row {
                suite: "bloch_map",
                case: format!("n={n}, L={parties} round trip"),
                residual: round_trip,
                tolerance: ALGEBRA_TOL,
            });

            let mut correspondence = 0.0f64;
            for ambient in [n, 2 * n, 3 * n + 1].into_iter().filter(|&a| a <= max_ambient) {
                let eg = build_embedded(ambient, n)?;
                for _ in 0..RANDOM_TRIALS {
                    let rho = random_density(rng, dim);
                    let obs = BlochTensor::full_correlation_observable(n, parties, |_| rng.random_range(-1.0..1.0))?;
                    let qudit_value = expectation(&rho, &reconstruct(&obs))?;
                    let weights = random_weights(rng, eg.blocks().pow(parties as u32));
                    let omega = block_copy_state(&rho, n, parties, ambient, &weights)?;
                    let lifted = lift_observable(&obs, &eg)?;
                    let ambient_value = omega.expectation_of(&lifted)?.re;
                    correspondence = correspondence.max((qudit_value - ambient_value).abs());
                }
            }
            rows.push(Row {
                suite: "bloch_map",
                case: format!("n={n}, L={parties} Tr(rho a) = Tr(Omega A)"),
                residual: correspondence,
                tolerance: EXPECTATION_TOL,
            });
        }
    }
    Ok(rows)
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    if args.max_n < 2 || args.max_ambient < 2 {
        return Err(CliError::Usage("--max-n and --max-N must both be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut rows = algebra_rows(args.max_n, args.inject_fault)?;
    rows.extend(embedding_rows(args.max_n, args.max_ambient)?);
    rows.extend(bloch_rows(args.max_n, args.max_ambient, &mut rng)?);

    println!(
        "{:<12} {:<44} {:>12} {:>10}  status",
        "suite", "case", "residual", "tolerance"
    );
    for row in &rows {
        println!(
            "{:<12} {:<44} {:>12.3e} {:>10.0e}  {}",
            row.suite,
            row.case,
            row.residual,
            row.tolerance,
            if row.passed() { "ok" } else { "FAIL" }
        );
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    println!("{} checks, {} failed", rows.len(), failed);
    if failed > 0 {
        Err(CliError::Failure(format!("{failed} invariant checks failed")))
    } else {
        Ok(())
    }
}
