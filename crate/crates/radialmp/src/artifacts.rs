//! Report envelopes, exact exponent tables and file writers.
//!
//! Every artifact carries the SHA-256 of the canonical config and the seed.
//! JSON is pretty-printed from structs with a fixed field order, so identical
//! inputs give byte-identical reports. CSV floats use 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use radialmp_core::exponents::{ExponentReport, Interval, ProblemParams, Rational};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config_sha256: &'a str,
    pub seed: u64,
    pub report: &'a T,
}

pub fn envelope_json<T: Serialize>(command: &str, hash: &str, seed: u64, report: &T) -> String {
    let env = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: hash,
        seed,
        report,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// CSV text with `# key=value` provenance lines ahead of the header.
pub fn csv_text(hash: &str, seed: u64, header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_sha256={hash}");
    let _ = writeln!(out, "# seed={seed}");
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8(bytes).expect("csv is utf-8"));
    Ok(out)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Where a command's CSV and JSON go.
///
/// `--out` naming a `.csv` file is the CSV itself; any other `--out` is a
/// directory receiving `<stem>.csv` and `<stem>.json`. `--report` always wins
/// for the JSON.
#[derive(Debug, Clone, Default)]
pub struct Targets {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl Targets {
    pub fn resolve(out: Option<&Path>, report: Option<&Path>, stem: &str) -> Self {
        let mut t = Targets::default();
        if let Some(out) = out {
            if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                t.csv = Some(out.to_path_buf());
            } else {
                t.csv = Some(out.join(format!("{stem}.csv")));
                t.json = Some(out.join(format!("{stem}.json")));
            }
        }
        if let Some(r) = report {
            t.json = Some(r.to_path_buf());
        }
        t
    }
}

pub fn rational_str(r: &Rational) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn interval_str(i: &Interval<Rational>) -> Interval<String> {
    Interval {
        lo: rational_str(&i.lo),
        hi: i.hi.as_ref().map(rational_str),
    }
}

pub fn exact_strings(r: &ExponentReport<Rational>) -> ExponentReport<String> {
    let s = rational_str;
    ExponentReport {
        n: r.n,
        p0: s(&r.p0),
        pinf: s(&r.pinf),
        pstar: s(&r.pstar),
        a: s(&r.a),
        sigma: s(&r.sigma),
        s: s(&r.s),
        qtilde: s(&r.qtilde),
        alphastar0: s(&r.alphastar0),
        alphastarinf: s(&r.alphastarinf),
        qstar0: s(&r.qstar0),
        qstarinf: s(&r.qstarinf),
        i1: interval_str(&r.i1),
        i2: interval_str(&r.i2),
        overlap: interval_str(&r.overlap),
        i1_empty: r.i1_empty,
        nu0: s(&r.nu0),
        nuinf: s(&r.nuinf),
    }
}

/// Exponent report in both arithmetics.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentSummary {
    /// `"rational"` when every input was rational, otherwise `"float"`.
    pub mode: &'static str,
    pub params: ProblemParams<f64>,
    pub inferred: Vec<String>,
    pub exact: Option<ExponentReport<String>>,
    pub float: ExponentReport<f64>,
    pub overlap_empty: bool,
    pub message: Option<String>,
}

impl ExponentSummary {
    pub fn compute(
        float_params: &ProblemParams<f64>,
        exact_params: Option<&ProblemParams<Rational>>,
        inferred: Vec<String>,
    ) -> Result<Self, CliError> {
        let exact = match exact_params {
            Some(p) => Some(ExponentReport::compute(p)?),
            None => None,
        };
        let float = match &exact {
            Some(e) => e.to_f64(),
            None => ExponentReport::compute(float_params)?,
        };
        let overlap_empty = match &exact {
            Some(e) => e.overlap.is_empty(),
            None => float.overlap.is_empty(),
        };
        let message = overlap_empty.then(|| "I1 ∩ I2 empty".to_string());
        Ok(Self {
            mode: if exact.is_some() { "rational" } else { "float" },
            params: float_params.clone(),
            inferred,
            exact: exact.as_ref().map(exact_strings),
            float,
            overlap_empty,
            message,
        })
    }

    pub fn table(&self) -> String {
        let f = &self.float;
        let e = self.exact.as_ref();
        let num = |exact: Option<&String>, x: f64| match exact {
            Some(s) => format!("{s} ({x:.12})"),
            None => format!("{x:.12}"),
        };
        let iv = |exact: Option<&Interval<String>>, x: &Interval<f64>| {
            let hi = |h: Option<&String>, x: Option<f64>| match (h, x) {
                (Some(h), _) => h.clone(),
                (None, Some(x)) => format!("{x:.12}"),
                (None, None) => "inf".into(),
            };
            match exact {
                Some(i) => format!("({}, {})", i.lo, hi(i.hi.as_ref(), None)),
                None => format!("({:.12}, {})", x.lo, hi(None, x.hi)),
            }
        };
        let rows: Vec<(&str, String)> = vec![
            ("N", f.n.to_string()),
            ("mode", self.mode.to_string()),
            ("p0", num(e.map(|e| &e.p0), f.p0)),
            ("p_inf", num(e.map(|e| &e.pinf), f.pinf)),
            ("p*", num(e.map(|e| &e.pstar), f.pstar)),
            ("sigma", num(e.map(|e| &e.sigma), f.sigma)),
            ("s", num(e.map(|e| &e.s), f.s)),
            ("q~", num(e.map(|e| &e.qtilde), f.qtilde)),
            ("alpha*_0", num(e.map(|e| &e.alphastar0), f.alphastar0)),
            ("alpha*_inf", num(e.map(|e| &e.alphastarinf), f.alphastarinf)),
            ("q*_0", num(e.map(|e| &e.qstar0), f.qstar0)),
            ("q*_inf", num(e.map(|e| &e.qstarinf), f.qstarinf)),
            ("I1", iv(e.map(|e| &e.i1), &f.i1)),
            ("I2", iv(e.map(|e| &e.i2), &f.i2)),
            (
                "I1 ∩ I2",
                if self.overlap_empty {
                    "empty".into()
                } else {
                    iv(e.map(|e| &e.overlap), &f.overlap)
                },
            ),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<12} {v}");
        }
        if f.i1_empty {
            let _ = writeln!(out, "I1 is empty: alpha0 <= alpha*_0");
        }
        if let Some(m) = &self.message {
            let _ = writeln!(out, "{m}");
        }
        out
    }
}
