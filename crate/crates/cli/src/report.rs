use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sicnum::Matrix;

use crate::options::{Format, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:?}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<i8> for Cell {
    fn from(x: i8) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub name: String,
    pub value: Cell,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Row-major `i, j, re, im` listing of a complex matrix.
    pub fn matrix(name: impl Into<String>, m: &Matrix) -> Self {
        let mut t = Self::new(name, &["i", "j", "re", "im"]);
        let d = m.dim();
        for i in 0..d {
            for j in 0..d {
                let z = m[(i, j)];
                t.push(vec![i.into(), j.into(), z.re.into(), z.im.into()]);
            }
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|observed − target| ≤ tolerance`
    Within,
    /// `observed ≤ target`
    AtMost,
    /// `observed > target`
    Above,
    /// `observed == target`
    Equals,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Within => "within",
            Relation::AtMost => "at_most",
            Relation::Above => "above",
            Relation::Equals => "equals",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub observed: f64,
    pub target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn make(name: impl Into<String>, relation: Relation, observed: f64, target: f64, tolerance: Option<f64>) -> Self {
        let pass = match relation {
            Relation::Within => (observed - target).abs() <= tolerance.unwrap_or(0.0),
            Relation::AtMost => observed <= target,
            Relation::Above => observed > target,
            Relation::Equals => observed == target,
        };
        Self {
            name: name.into(),
            relation,
            observed: finite(observed),
            target,
            tolerance,
            pass,
            note: None,
        }
    }

    pub fn within(name: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        Self::make(name, Relation::Within, observed, target, Some(tolerance))
    }

    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::make(name, Relation::AtMost, observed, bound, None)
    }

    pub fn above(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::make(name, Relation::Above, observed, bound, None)
    }

    pub fn equals(name: impl Into<String>, observed: usize, target: usize) -> Self {
        Self::make(name, Relation::Equals, observed as f64, target as f64, None)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::make(name, Relation::Equals, f64::from(u8::from(ok)), 1.0, None)
    }

    pub fn failed(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Equals,
            observed: 0.0,
            target: 1.0,
            tolerance: None,
            pass: false,
            note: Some(note.into()),
        }
    }
}

/// Non-finite values would serialize as `null`; reports keep them numeric.
fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x.is_nan() {
        f64::MAX
    } else {
        x.signum() * f64::MAX
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub config: RunConfig,
    pub scalars: Vec<Scalar>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Accumulates the named results of one subcommand.
#[derive(Default)]
pub struct Section {
    pub scalars: Vec<Scalar>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Section {
    pub fn scalar(&mut self, name: impl Into<String>, value: impl Into<Cell>) {
        self.scalars.push(Scalar {
            name: name.into(),
            value: value.into(),
        });
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Appends `other` with every name prefixed by `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: Section) {
        let p = |n: String| format!("{prefix}.{n}");
        self.scalars.extend(other.scalars.into_iter().map(|mut s| {
            s.name = p(s.name);
            s
        }));
        self.tables.extend(other.tables.into_iter().map(|mut t| {
            t.name = p(t.name);
            t
        }));
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            c.name = p(c.name);
            c
        }));
    }

    pub fn into_report(self, command: &str, config: RunConfig, timestamp: Option<u64>) -> Report {
        let pass = self.checks.iter().all(|c| c.pass);
        Report {
            tool: "sicnum".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            timestamp,
            config,
            scalars: self.scalars,
            tables: self.tables,
            checks: self.checks,
            pass,
        }
    }
}

impl Report {
    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => self.to_csv(),
            Format::Pretty => Ok(self.to_pretty()),
        }
    }

    /// Every table in turn, each preceded by a `# name` line. Scalars form a
    /// one-row table and checks a table of their own.
    fn to_csv(&self) -> anyhow::Result<String> {
        let mut scalars = Table {
            name: "scalars".into(),
            columns: self.scalars.iter().map(|s| s.name.clone()).collect(),
            rows: vec![self.scalars.iter().map(|s| s.value.clone()).collect()],
        };
        if scalars.columns.is_empty() {
            scalars.rows.clear();
        }
        let mut checks = Table::new(
            "checks",
            &["name", "relation", "observed", "target", "tolerance", "pass"],
        );
        for c in &self.checks {
            checks.push(vec![
                c.name.clone().into(),
                c.relation.name().into(),
                c.observed.into(),
                c.target.into(),
                c.tolerance.map_or(Cell::Text(String::new()), Cell::Num),
                c.pass.into(),
            ]);
        }
        let mut out = String::new();
        for t in std::iter::once(&scalars)
            .chain(&self.tables)
            .chain(std::iter::once(&checks))
        {
            if t.columns.is_empty() {
                continue;
            }
            writeln!(out, "# {}", t.name)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(Cell::render))?;
            }
            out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        }
        Ok(out)
    }

    fn to_pretty(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sicnum {} {}", self.version, self.command);
        if !self.scalars.is_empty() {
            let width = self.scalars.iter().map(|s| s.name.len()).max().unwrap_or(0);
            let _ = writeln!(out);
            for s in &self.scalars {
                let _ = writeln!(out, "  {:width$}  {}", s.name, s.value.render());
            }
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n  [{}]", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|k| {
                    cells
                        .iter()
                        .map(|r| r[k].len())
                        .chain(std::iter::once(t.columns[k].len()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |row: &[String]| {
                row.iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(out, "  {}", line(&t.columns));
            for r in &cells {
                let _ = writeln!(out, "  {}", line(r));
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out);
            for c in &self.checks {
                let _ = write!(
                    out,
                    "  [{}] {}: {:e} {} {:e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.observed,
                    match c.relation {
                        Relation::Within => "≈",
                        Relation::AtMost => "≤",
                        Relation::Above => ">",
                        Relation::Equals => "=",
                    },
                    c.target
                );
                if let Some(t) = c.tolerance {
                    let _ = write!(out, " ± {t:e}");
                }
                if let Some(n) = &c.note {
                    let _ = write!(out, " ({n})");
                }
                let _ = writeln!(out);
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(
            out,
            "\n  {} ({passed}/{} checks passed)",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len()
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_relations() {
        assert!(Check::within("a", 1.0 + 1e-12, 1.0, 1e-10).pass);
        assert!(!Check::within("a", 1.1, 1.0, 1e-10).pass);
        assert!(Check::at_most("b", 1e-12, 1e-10).pass);
        assert!(!Check::above("c", 1.0, 1.0).pass);
        assert!(Check::equals("d", 24, 24).pass);
        assert!(!Check::holds("e", false).pass);
        assert!(!Check::failed("f", "boom").pass);
        assert_eq!(Check::at_most("g", f64::NAN, 1.0).observed, f64::MAX);
    }

    #[test]
    fn cells_round_trip_untagged() {
        let cells = vec![Cell::Int(3), Cell::Num(0.5), Cell::Num(2.0), Cell::Text("x".into())];
        let s = serde_json::to_string(&cells).unwrap();
        let back: Vec<Cell> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cells);
    }

    #[test]
    fn matrix_table_layout() {
        let t = Table::matrix("id", &Matrix::identity(2));
        assert_eq!(t.columns, vec!["i", "j", "re", "im"]);
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[3][2], Cell::Num(1.0));
    }

    #[test]
    fn absorb_prefixes_names() {
        let mut inner = Section::default();
        inner.scalar("x", 1.0);
        inner.check(Check::holds("ok", true));
        let mut outer = Section::default();
        outer.absorb("sub", inner);
        assert_eq!(outer.scalars[0].name, "sub.x");
        assert_eq!(outer.checks[0].name, "sub.ok");
    }
}
