//! Deterministic run reports: structured text for reading, CSV for plotting,
//! and a payload hash for regression pinning. Reports never embed
//! timestamps, so identical runs render byte-identical payloads.

use sha2::{Digest, Sha256};

/// A column-oriented table of preformatted cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

/// One run's full output: provenance metadata, result tables, and
/// pass/fail verdicts.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub metadata: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub verdicts: Vec<(String, bool)>,
}

/// Canonical cell formatting for floats: shortest representation that
/// round-trips, so payloads are stable across runs and platforms.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn verdict(&mut self, name: &str, passed: bool) {
        self.verdicts.push((name.to_string(), passed));
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }

    /// First failed verdict name, if any.
    pub fn first_failure(&self) -> Option<&str> {
        self.verdicts
            .iter()
            .find(|(_, ok)| !ok)
            .map(|(name, _)| name.as_str())
    }

    /// Machine-readable payload: versioned header, `# key=value` metadata,
    /// then each table introduced by `# table=<title>` with a CSV header row.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("#schema=1\n");
        out.push_str(&format!("# command={}\n", self.command));
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key}={value}\n"));
        }
        for table in &self.tables {
            out.push_str(&format!("# table={}\n", table.title));
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        if !self.verdicts.is_empty() {
            out.push_str("# table=verdicts\ncheck,passed\n");
            for (name, ok) in &self.verdicts {
                out.push_str(&format!("{name},{ok}\n"));
            }
        }
        out
    }

    /// Human-readable rendering with aligned table columns.
    pub fn render_text(&self) -> String {
        let mut out = format!("hyperlab {}\n", self.command);
        for (key, value) in &self.metadata {
            out.push_str(&format!("  {key} = {value}\n"));
        }
        for table in &self.tables {
            out.push_str(&format!("\n{}\n", table.title));
            let mut widths: Vec<usize> = table.columns.iter().map(|c| c.len()).collect();
            for row in &table.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let header: Vec<String> = table
                .columns
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            out.push_str(&format!("  {}\n", header.join("  ")));
            for row in &table.rows {
                let cells: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                out.push_str(&format!("  {}\n", cells.join("  ")));
            }
        }
        if !self.verdicts.is_empty() {
            out.push('\n');
            for (name, ok) in &self.verdicts {
                out.push_str(&format!("[{}] {name}\n", if *ok { "PASS" } else { "FAIL" }));
            }
        }
        out
    }

    /// SHA-256 of the CSV payload, hex-encoded; the determinism fingerprint.
    pub fn payload_hash(&self) -> String {
        let digest = Sha256::digest(self.render_csv().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}
