//! Result documents: a `# `-prefixed header block followed by a CSV table.
//!
//! ```text
//! # qframe 0.1.0
//! # command: estimate
//! # seed: 7
//! # wall-clock: started_unix_s=1760000000 elapsed_s=0.412
//! # config-begin
//! # trials = 500
//! # ...
//! # config-end
//! solid,m,shots,...
//! tetrahedron,4,5,...
//! # <footer lines>
//! ```
//!
//! The wall-clock line is the only content that differs between identical runs.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crate::CliError;

pub const WALL_CLOCK_PREFIX: &str = "# wall-clock:";
const CONFIG_BEGIN: &str = "# config-begin";
const CONFIG_END: &str = "# config-end";

/// Twelve significant digits in scientific notation; `inf`, `-inf` and `nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

/// Start time of a run.
#[derive(Debug, Clone, Copy)]
pub struct Clock {
    unix_s: u64,
    started: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Self {
            unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            started: Instant::now(),
        }
    }
}

#[derive(Debug)]
pub struct ResultDoc {
    command: &'static str,
    seed: Option<u64>,
    config: String,
    clock: Clock,
    columns: Vec<&'static str>,
    rows: Vec<String>,
    footer: Vec<String>,
}

impl ResultDoc {
    pub fn new(
        command: &'static str,
        seed: Option<u64>,
        config_toml: String,
        columns: Vec<&'static str>,
    ) -> Self {
        Self {
            command,
            seed,
            config: config_toml,
            clock: Clock::start(),
            columns,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells.join(","));
    }

    pub fn push_footer(&mut self, line: impl Into<String>) {
        self.footer.push(line.into());
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# qframe {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# command: {}", self.command);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed: {seed}");
        }
        let _ = writeln!(
            s,
            "{WALL_CLOCK_PREFIX} started_unix_s={} elapsed_s={:.3}",
            self.clock.unix_s,
            self.clock.started.elapsed().as_secs_f64()
        );
        let _ = writeln!(s, "{CONFIG_BEGIN}");
        for line in self.config.lines() {
            if line.is_empty() {
                s.push_str("#\n");
            } else {
                let _ = writeln!(s, "# {line}");
            }
        }
        let _ = writeln!(s, "{CONFIG_END}");
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{r}");
        }
        for f in &self.footer {
            let _ = writeln!(s, "# {f}");
        }
        s
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        write_text(path, &self.render())
    }
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// The config block of a rendered document, with the comment prefix removed.
pub fn extract_config(doc: &str) -> Option<String> {
    let mut lines = doc.lines().skip_while(|l| *l != CONFIG_BEGIN);
    lines.next()?;
    let mut out = String::new();
    for l in lines {
        if l == CONFIG_END {
            return Some(out);
        }
        out.push_str(l.strip_prefix("# ").or_else(|| l.strip_prefix('#'))?);
        out.push('\n');
    }
    None
}

/// The document without its wall-clock line.
pub fn strip_wall_clock(doc: &str) -> String {
    doc.lines()
        .filter(|l| !l.starts_with(WALL_CLOCK_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// The CSV part: column line and data rows.
pub fn table_lines(doc: &str) -> Vec<&str> {
    doc.lines().filter(|l| !l.starts_with('#')).collect()
}
