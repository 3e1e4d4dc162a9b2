use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::svg::Plot;
use crate::{CliError, Context};

/// Shortest representation that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_csv<R: Display>(path: &Path, header: &str, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_string());
        text.push('\n');
    }
    write_text(path, &text)
}

pub fn write_svg(ctx: &Context, name: &str, mut plot: Plot) -> Result<(), CliError> {
    if !ctx.reproducible {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        plot.stamp = Some(format!("generated at unix time {secs}"));
    }
    write_text(&ctx.out.join(name), &plot.render())
}
