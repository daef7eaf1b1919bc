use clap::Args;
use cvqudit::embedding::build_embedded;
use cvqudit::su::build_generators;
use cvqudit::{GeneratorSet, StructureConstants};
use serde_json::{json, Value};

use crate::output::{complex, emit, to_json_string};
use crate::{CliError, CliResult, Format, OutputArgs};

const ORDERING: &str = "u_jk for j<k in lexicographic order, then v_jk in the same order, then w_1..w_{n-1}";

#[derive(Debug, Args)]
pub struct GensArgs {
    /// Qudit dimension n (>= 2).
    #[arg(long)]
    n: usize,
    /// Ambient dimension N (>= n); selects the block-embedded generators.
    #[arg(long = "N")]
    ambient: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

fn structure_json(f: &StructureConstants) -> Value {
    // 1-based (j, k, l), each unordered triple once
    let entries: Vec<Value> = f
        .nonzero(1e-12)
        .into_iter()
        .filter(|&(j, k, l, _)| j < k && k < l)
        .map(|(j, k, l, v)| json!([j + 1, k + 1, l + 1, v]))
        .collect();
    Value::Array(entries)
}

fn labels(gens: &GeneratorSet) -> Vec<String> {
    gens.labels().iter().map(ToString::to_string).collect()
}

pub fn document(n: usize, ambient: Option<usize>) -> CliResult<Value> {
    if n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
    }
    match ambient {
        None => {
            let gens = build_generators(n)?;
            let matrices: Vec<Value> = gens
                .generators()
                .iter()
                .zip(labels(&gens))
                .map(|(m, label)| {
                    let rows: Vec<Value> = m
                        .rows()
                        .map(|r| Value::Array(r.iter().map(|&z| complex(z)).collect()))
                        .collect();
                    json!({ "label": label, "matrix": rows })
                })
                .collect();
            Ok(json!({
                "metadata": {
                    "n": n,
                    "N": Value::Null,
                    "blocks": Value::Null,
                    "ordering": ORDERING,
                    "labels": labels(&gens),
                    "structure_constant_index_base": 1,
                },
                "generators": matrices,
                "structure_constants": structure_json(gens.structure_constants()),
            }))
        }
        Some(big_n) => {
            if big_n < n {
                return Err(CliError::Usage(format!("--N must be at least n = {n}, got {big_n}")));
            }
            let eg = build_embedded(big_n, n)?;
            let matrices: Vec<Value> = eg
                .generators()
                .iter()
                .zip(labels(eg.base()))
                .map(|(s, label)| {
                    let entries: Vec<Value> = s.triplets().map(|(r, c, z)| json!([r, c, complex(z)])).collect();
                    json!({ "label": label, "dim": s.dim(), "entries": entries })
                })
                .collect();
            Ok(json!({
                "metadata": {
                    "n": n,
                    "N": big_n,
                    "blocks": eg.blocks(),
                    "unused_tail": eg.unused_tail(),
                    "ordering": ORDERING,
                    "labels": labels(eg.base()),
                    "structure_constant_index_base": 1,
                },
                "generators": matrices,
                "structure_constants": structure_json(eg.structure_constants()),
            }))
        }
    }
}

pub fn run(args: &GensArgs) -> CliResult<()> {
    if args.format != Format::Json {
        return Err(CliError::Usage("generator dumps are only available as JSON".into()));
    }
    let doc = document(args.n, args.ambient)?;
    emit(args.output.out.as_deref(), &to_json_string(&doc))
}
