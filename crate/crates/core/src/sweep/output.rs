//! CSV tables, JSON metadata sidecars and SVG files.
//!
//! CSV layout: one `#` line listing the convention flags, a header row of
//! `name [unit]` cells, then data rows. Reals are written with 17
//! significant digits so re-parsing is bit-exact; flags as 0/1.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::{Conventions, RunConfig};
use super::svg::render_heatmap;
use super::{Column, ColumnKind, RunOutput, SweepResult};
use crate::error::Error;

pub const METADATA_SCHEMA: &str = "anyon-dynamics/output-metadata/1";

/// JSON sidecar written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub schema: String,
    pub version: String,
    pub timestamp: String,
    pub task: String,
    pub config_sha256: String,
    pub config: Value,
    pub conventions: Conventions,
    pub columns: Vec<Column>,
    pub rows: usize,
    pub data_file: String,
    pub notes: BTreeMap<String, Value>,
}

/// Tool version in `git describe` style.
pub fn version_string() -> String {
    match option_env!("ANYON_GIT_DESCRIBE") {
        Some(v) => v.to_string(),
        None => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

/// ISO-8601 UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible
/// builds of the outputs.
pub fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    now.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Config echo with the thread count removed; it never changes the data.
pub fn config_echo(config: &RunConfig) -> Value {
    let mut cfg = config.clone();
    cfg.compute.threads = 0;
    cfg.output.dir = None;
    let mut v = serde_json::to_value(&cfg).unwrap_or(Value::Null);
    if let Some(compute) = v.get_mut("compute").and_then(Value::as_object_mut) {
        compute.remove("threads");
    }
    v
}

pub fn config_hash(config: &RunConfig) -> String {
    let text = config_echo(config).to_string();
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn conventions_line(c: &Conventions) -> String {
    format!(
        "# frequency={} conjugation={} jump_basis={} stat_dephasing={} absorption={}\n",
        c.frequency.as_str(),
        c.conjugation.as_str(),
        c.jump_basis.as_str(),
        if c.stat_dephasing { "on" } else { "off" },
        match c.absorption {
            crate::fock::AbsorptionOperator::Lowering => "lowering",
            crate::fock::AbsorptionOperator::Raising => "raising",
        }
    )
}

fn format_cell(kind: ColumnKind, v: f64) -> String {
    match kind {
        ColumnKind::Real => format!("{v:.16e}"),
        ColumnKind::Flag => if v != 0.0 { "1" } else { "0" }.to_string(),
    }
}

/// Serialise a table as CSV bytes.
pub fn to_csv(table: &SweepResult, conventions: &Conventions) -> Result<Vec<u8>, csv::Error> {
    let mut buf = conventions_line(conventions).into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        w.write_record(table.columns.iter().map(Column::header))?;
        for row in &table.rows {
            w.write_record(
                table.columns.iter().zip(row).map(|(c, v)| format_cell(c.kind, *v)),
            )?;
        }
        w.flush()?;
    }
    Ok(buf)
}

/// A CSV file read back: header cells and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_csv(path: &Path) -> Result<CsvTable, Error> {
    let err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(err)?;
    let headers = r.headers().map_err(err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(err)?;
        let row = rec
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{}: bad number `{cell}`", path.display())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(CsvTable { headers, rows })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Build the sidecar for one table.
pub fn metadata(table: &SweepResult, config: &RunConfig, data_file: &str) -> Metadata {
    Metadata {
        schema: METADATA_SCHEMA.into(),
        version: version_string(),
        timestamp: timestamp(),
        task: config.task.as_str().into(),
        config_sha256: config_hash(config),
        config: config_echo(config),
        conventions: config.conventions,
        columns: table.columns.clone(),
        rows: table.rows.len(),
        data_file: data_file.into(),
        notes: table.notes.clone(),
    }
}

/// Write every artifact into `dir`: `<stem><suffix>.csv` with its JSON
/// sidecar, plus `.svg` heatmaps when enabled. Returns the written paths.
pub fn write_outputs(output: &RunOutput, config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let stem = config.stem();
    let mut written = Vec::new();
    for artifact in &output.artifacts {
        let base = format!("{stem}{}", artifact.suffix);
        if !artifact.table.columns.is_empty() {
            artifact.table.validate()?;
            let csv_name = format!("{base}.csv");
            let csv_path = dir.join(&csv_name);
            let bytes = to_csv(&artifact.table, &config.conventions)
                .map_err(|source| Error::Csv { path: csv_path.clone(), source })?;
            write_file(&csv_path, &bytes)?;
            written.push(csv_path);

            let json_path = dir.join(format!("{base}.json"));
            let meta = metadata(&artifact.table, config, &csv_name);
            let mut text = serde_json::to_string_pretty(&meta)
                .map_err(|e| Error::Config(format!("metadata: {e}")))?;
            text.push('\n');
            write_file(&json_path, text.as_bytes())?;
            written.push(json_path);
        }
        if config.output.svg {
            if let Some(map) = &artifact.heatmap {
                let svg_path = dir.join(format!("{base}.svg"));
                let mut text = render_heatmap(map, &config.conventions);
                text.push('\n');
                write_file(&svg_path, text.as_bytes())?;
                written.push(svg_path);
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run, Task};

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mut t = SweepResult::new(vec![Column::real("x", "rad"), Column::flag("f")]);
        let vals = [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, std::f64::consts::PI];
        for (k, v) in vals.iter().enumerate() {
            t.rows.push(vec![*v, (k % 2) as f64]);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        fs::write(&path, to_csv(&t, &Conventions::default()).unwrap()).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.headers, vec!["x [rad]", "f [1]"]);
        for (a, b) in back.rows.iter().zip(&t.rows) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1], b[1]);
        }
        let text = fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("# frequency=appendix conjugation=modulus jump_basis=deformed"));
    }

    #[test]
    fn headers_with_commas_are_quoted() {
        let t = SweepResult::new(vec![Column::real("a,b", "1")]);
        let bytes = to_csv(&t, &Conventions::default()).unwrap();
        assert!(String::from_utf8(bytes).unwrap().contains("\"a,b [1]\""));
    }

    #[test]
    fn sidecar_validates_and_hash_ignores_threads() {
        let cfg = RunConfig { task: Task::Fig1, ..Default::default() };
        let out = run(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(&out, &cfg, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let text = fs::read_to_string(&files[1]).unwrap();
        let meta: Metadata = serde_json::from_str(&text).unwrap();
        assert_eq!(meta.schema, METADATA_SCHEMA);
        assert_eq!(meta.rows, 200);
        assert_eq!(meta.config_sha256.len(), 64);
        assert_eq!(meta.conventions, cfg.conventions);

        let mut threaded = cfg.clone();
        threaded.compute.threads = 8;
        assert_eq!(config_hash(&cfg), config_hash(&threaded));
        let mut other = cfg.clone();
        other.params.gamma = 0.2;
        assert_ne!(config_hash(&cfg), config_hash(&other));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let cfg = RunConfig { task: Task::SingleRates, ..Default::default() };
        let out = run(&cfg).unwrap();
        let err = write_outputs(&out, &cfg, &blocker.join("sub")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("file"));
    }
}
