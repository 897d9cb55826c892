use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use ktensor_core::report::to_pretty;
use ktensor_core::{Error, Result};
use serde_json::Value;

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Pretty JSON to `out`, or stdout.
pub fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = to_pretty(value);
    match out {
        Some(path) => write_file(path, &text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Named wall-clock timings in milliseconds.
#[derive(Default)]
pub struct Timer {
    pub entries: BTreeMap<String, f64>,
}

impl Timer {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.entries.insert(name.to_string(), t.elapsed().as_secs_f64() * 1e3);
        out
    }

    /// `Some` only when the user asked for timings.
    pub fn report(&self, wanted: bool) -> Option<&BTreeMap<String, f64>> {
        wanted.then_some(&self.entries)
    }
}
