use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use ttc_core::scenario::{bundled, parse, ScenarioFile};

/// Reads a scenario from disk, or a bundled one written as `bundled:NAME`.
pub fn load(path: &str) -> Result<ScenarioFile<f64>> {
    let bytes = match path.strip_prefix("bundled:") {
        Some(name) => bundled(name)
            .ok_or_else(|| anyhow!("no bundled scenario named {name}"))?
            .as_bytes()
            .to_vec(),
        None => fs::read(path).with_context(|| format!("reading {path}"))?,
    };
    parse(&bytes).with_context(|| format!("parsing {path}"))
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
