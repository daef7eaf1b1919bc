use std::fs;
use std::io::{self, Write};
use std::path::Path;

use cvqudit::C64;
use serde_json::{json, Value};

use crate::{CliError, CliResult};

/// Writes `contents` to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn to_json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
