//! Point files and JSON reports.
//!
//! CSV layout (UTF-8, one header row):
//!
//! ```text
//! rep,size,re,im,color_class
//! 0,1,18.0,0.0,0
//! ```
//!
//! `re`/`im` are shortest round-trip decimals. The JSON export carries the
//! same per-orbit fields plus the parameters and class count.

use std::io::{self, BufRead, Write};

use gperiods_core::fillout::{Applicability, CoverageReport};
use gperiods_core::periods::DihedralReport;
use gperiods_core::{ColoringMode, Complex64, PeriodSet};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "rep,size,re,im,color_class";

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

pub fn write_csv<W: Write>(set: &PeriodSet, mut out: W) -> io::Result<()> {
    let mut re = ryu::Buffer::new();
    let mut im = ryu::Buffer::new();
    writeln!(out, "{CSV_HEADER}")?;
    for o in &set.orbits {
        writeln!(
            out,
            "{},{},{},{},{}",
            o.rep,
            o.size,
            re.format(o.value.re),
            im.format(o.value.im),
            o.color_class
        )?;
    }
    out.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub rep: u64,
    pub size: u64,
    pub re: f64,
    pub im: f64,
    pub color_class: u32,
}

/// Parses a point CSV written by [`write_csv`].
pub fn read_csv<R: BufRead>(input: R) -> io::Result<Vec<CsvRow>> {
    let bad = |line: usize, why: &str| {
        io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {why}"))
    };
    let mut lines = input.lines();
    match lines.next().transpose()? {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        _ => return Err(bad(1, "missing header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        let [rep, size, re, im, class] = fields.as_slice() else {
            return Err(bad(i + 2, "expected 5 fields"));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 2, "bad number"));
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad(i + 2, "bad integer"));
        rows.push(CsvRow {
            rep: int(rep)?,
            size: int(size)?,
            re: num(re)?,
            im: num(im)?,
            color_class: int(class)? as u32,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub n: u64,
    pub omega: u64,
    pub d: u64,
}

impl From<&gperiods_core::PeriodParams> for ParamsJson {
    fn from(p: &gperiods_core::PeriodParams) -> Self {
        Self {
            n: p.n(),
            omega: p.omega(),
            d: p.d(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetJson {
    pub params: ParamsJson,
    pub c: u64,
    pub mode: ColoringMode,
    pub class_count: usize,
    pub orbits: Vec<CsvRow>,
}

impl From<&PeriodSet> for PointSetJson {
    fn from(set: &PeriodSet) -> Self {
        Self {
            params: (&set.params).into(),
            c: set.c,
            mode: set.mode,
            class_count: set.class_count,
            orbits: set
                .orbits
                .iter()
                .map(|o| CsvRow {
                    rep: o.rep,
                    size: o.size,
                    re: o.value.re,
                    im: o.value.im,
                    color_class: o.color_class,
                })
                .collect(),
        }
    }
}

pub fn write_json<W: Write>(set: &PeriodSet, mut out: W) -> io::Result<()> {
    serde_json::to_writer(&mut out, &PointSetJson::from(set))?;
    writeln!(out)?;
    out.flush()
}

/// One definitional-sum spot check of an orbit value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub rep: u64,
    pub orbit_value: [f64; 2],
    pub definitional: [f64; 2],
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ParamsJson,
    pub c: u64,
    pub dihedral_order: u64,
    pub dihedral: DihedralReport,
    pub subplot_containment: bool,
    /// `(k, multiplier, holds)` for sampled indices.
    pub rescale_checks: Vec<(u64, u64, bool)>,
    pub oracle_checks: Vec<OracleCheck>,
    pub oracle_tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilloutJson {
    pub applicability: Applicability,
    pub applicable: bool,
    pub arity: usize,
    pub coverage: CoverageReport,
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}
