//! CSV tables with a reproducibility header, and the matching header parser.
//!
//! Layout:
//!
//! ```text
//! # latosc 0.1.0
//! # command: spectrum --gamma-d 500 --rep site --n-eigs 12
//! #! k_points = 2048
//! #! seed = 42
//! # note: free text
//! s,N_tilde,rep,gamma_d,resolution
//! 0,6.6613381477509392e-14,site,500,1432
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, RunConfig};

/// First bytes of every output file.
pub const BANNER: &str = "# latosc ";

const COMMAND_PREFIX: &str = "# command: ";
const NOTE_PREFIX: &str = "# note: ";

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // 17 significant digits, enough to round-trip any double.
            Cell::Float(v) => write!(f, "{v:.16e}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// A CSV table plus the header metadata that reproduces it.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: String,
    pub config: Vec<(&'static str, String)>,
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, config: &RunConfig, columns: &[&'static str]) -> Self {
        Self {
            command: command.to_string(),
            config: config.entries(),
            notes: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{BANNER}{}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "{COMMAND_PREFIX}{}", self.command);
        for (k, v) in &self.config {
            let _ = writeln!(out, "#! {k} = {v}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "{NOTE_PREFIX}{n}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.render())
    }
}

/// A gnuplot script that plots `y` against `x` from a written table, one
/// curve per distinct value of `group` when given.
pub fn plot_script(csv: &Path, table: &Table, x: &str, y: &str, group: Option<&str>) -> String {
    let col = |name: &str| table.columns.iter().position(|c| *c == name).map_or(0, |i| i + 1);
    let file = csv
        .file_name()
        .map_or_else(String::new, |f| f.to_string_lossy().into_owned());
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{x}'");
    let _ = writeln!(s, "set ylabel '{y}'");
    match group {
        None => {
            let _ = writeln!(s, "plot '{file}' using {}:{} with lines", col(x), col(y));
        }
        Some(g) => {
            let gi = table.columns.iter().position(|c| *c == g).unwrap_or(0);
            let mut values: Vec<String> = Vec::new();
            for r in &table.rows {
                let v = r[gi].to_string();
                if !values.contains(&v) {
                    values.push(v);
                }
            }
            let curves: Vec<String> = values
                .iter()
                .map(|v| {
                    format!(
                        "'{file}' using (${} == {v} ? ${} : 1/0):{} with lines title '{g} = {v}'",
                        gi + 1,
                        col(x),
                        col(y)
                    )
                })
                .collect();
            let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
        }
    }
    s
}

/// Writes `table` to `path` and, when asked, a plot script next to it.
pub fn emit(table: &Table, path: &Path, plot: Option<(&str, &str, Option<&str>)>) -> std::io::Result<Vec<PathBuf>> {
    table.write(path)?;
    let mut written = vec![path.to_path_buf()];
    if let Some((x, y, group)) = plot {
        let gp = path.with_extension("gp");
        std::fs::write(&gp, plot_script(path, table, x, y, group))?;
        written.push(gp);
    }
    Ok(written)
}

#[derive(Debug, Error)]
pub enum HeaderError {
    #[error("missing `# latosc <version>` banner on line 1")]
    MissingBanner,

    #[error("missing `# command:` line")]
    MissingCommand,

    #[error("missing column line")]
    MissingColumns,

    #[error("line {line}: unrecognized header comment")]
    UnknownComment { line: usize },

    #[error("column {index} is empty or repeated")]
    BadColumn { index: usize },

    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Metadata read back from an output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
}

/// Parses the comment header and column line of an output file.
pub fn parse_header(text: &str) -> Result<Header, HeaderError> {
    let mut lines = text.lines().enumerate();
    let version = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix(BANNER))
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .ok_or(HeaderError::MissingBanner)?
        .to_string();
    let command = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix(COMMAND_PREFIX))
        .ok_or(HeaderError::MissingCommand)?
        .to_string();

    let mut notes = Vec::new();
    let mut columns = None;
    for (i, l) in lines {
        if l.starts_with("#!") {
            continue;
        }
        if let Some(n) = l.strip_prefix(NOTE_PREFIX) {
            notes.push(n.to_string());
        } else if l.starts_with('#') {
            return Err(HeaderError::UnknownComment { line: i + 1 });
        } else {
            columns = Some(l);
            break;
        }
    }
    let columns: Vec<String> = columns
        .ok_or(HeaderError::MissingColumns)?
        .split(',')
        .map(str::to_string)
        .collect();
    for (index, c) in columns.iter().enumerate() {
        if c.is_empty() || columns[..index].contains(c) {
            return Err(HeaderError::BadColumn { index });
        }
    }
    Ok(Header {
        version,
        command,
        config: RunConfig::from_header(text)?,
        notes,
        columns,
    })
}
