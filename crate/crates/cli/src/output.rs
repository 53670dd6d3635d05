//! Writers for JSON and CSV results plus the run manifest.
//!
//! Floats are always written as `{:.11e}` (12 significant digits) so reruns
//! diff byte for byte.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        v.to_string()
    }
}

/// Pretty JSON with fixed-format floats. Non-finite values become `null`.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.11e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// CSV text with a header row; every cell is preformatted.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    output: String,
    config: &'a RunConfig,
    versions: Versions,
    wall_time_seconds: f64,
}

#[derive(Serialize)]
struct Versions {
    cli: &'static str,
    core: &'static str,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Writes `body` to the configured output (stdout when none) and, for file
/// outputs, a manifest beside it. Returns the path written, if any.
pub fn emit(command: &str, config: &RunConfig, body: &str, elapsed: Duration) -> Result<Option<PathBuf>, CliError> {
    let Some(path) = config.resolved_output() else {
        io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        return Ok(None);
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    let manifest = Manifest {
        command,
        output: path.display().to_string(),
        config,
        versions: Versions { cli: env!("CARGO_PKG_VERSION"), core: kitaev_core::VERSION },
        wall_time_seconds: elapsed.as_secs_f64(),
    };
    let mpath = manifest_path(&path);
    fs::write(&mpath, to_json(&manifest)).map_err(|e| CliError::io(&mpath, e))?;
    Ok(Some(path))
}
