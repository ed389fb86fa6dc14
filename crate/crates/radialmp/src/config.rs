//! Experiment configuration: the JSON schema, exact exponent values and the
//! canonical form used for hashing.

use std::path::Path;

use num_rational::Rational64;
use radialmp_core::exponents::{ProblemParams, Rational};
use radialmp_core::functional::Nonlinearity;
use radialmp_core::grid::{Grading, RadialGrid};
use radialmp_core::potentials::{fit_asymptotics, End, PotentialSpec, Role};
use radialmp_core::probes::ProbeSettings;
use radialmp_core::solver::{Problem, SolveConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::Arc;

use crate::CliError;

/// A number or an exact fraction such as `"3/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactValue {
    Number(f64),
    Text(String),
}

impl ExactValue {
    pub fn to_f64(&self) -> Result<f64, CliError> {
        match self {
            ExactValue::Number(x) => Ok(*x),
            ExactValue::Text(s) => {
                let r = parse_rational(s)
                    .ok_or_else(|| CliError::Validation(format!("cannot read {s:?} as a number or fraction")))?;
                Ok(*r.numer() as f64 / *r.denom() as f64)
            }
        }
    }

    /// Exact value; numbers go through their shortest decimal representation.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            ExactValue::Number(x) if x.is_finite() => parse_rational(&format!("{x}")),
            ExactValue::Number(_) => None,
            ExactValue::Text(s) => parse_rational(s),
        }
    }
}

impl From<f64> for ExactValue {
    fn from(x: f64) -> Self {
        ExactValue::Number(x)
    }
}

impl From<&str> for ExactValue {
    fn from(s: &str) -> Self {
        ExactValue::Text(s.into())
    }
}

/// Parses `"p/q"`, integers and plain decimals exactly; `None` on overflow.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if *q.numer() == 0 {
            return None;
        }
        let num = p.numer().checked_mul(*q.denom())?;
        let den = p.denom().checked_mul(*q.numer())?;
        return Some(Rational64::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let r = Rational64::new(num, den);
    Some(if neg { -r } else { r })
}

/// Asymptotic parameters of the problem; omitted fields are inferred from the potentials.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ainf: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphainf: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betainf: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<ExactValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potentials {
    #[serde(rename = "A")]
    pub a: PotentialSpec,
    #[serde(rename = "V")]
    pub v: PotentialSpec,
    #[serde(rename = "K")]
    pub k: PotentialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
    pub grading: Grading,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            r_min: 1e-6,
            r_max: 1e3,
            nodes: 2000,
            grading: Grading::Geometric,
        }
    }
}

/// Radii as an explicit list or a `"lo:hi:n"` log-spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Radii {
    List(Vec<f64>),
    Range(String),
}

impl Radii {
    pub fn expand(&self) -> Result<Vec<f64>, CliError> {
        match self {
            Radii::List(v) => Ok(v.clone()),
            Radii::Range(s) => parse_radii(s),
        }
    }
}

/// `"lo:hi:n"` → `n` log-spaced radii from `lo` to `hi`.
pub fn parse_radii(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("radii {s:?} is not of the form lo:hi:n"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(CliError::Validation(format!("radii {s:?} needs 0 < lo < hi and n >= 2")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeBlock {
    pub end: End,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub radii: Radii,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ProbeBlock {
    fn default() -> Self {
        let s = ProbeSettings::default();
        Self {
            end: End::Zero,
            q: None,
            radii: Radii::Range("1e-3:1e-1:8".into()),
            restarts: s.restarts,
            max_iter: s.max_iter,
            tol: s.tol,
        }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(rename = "N")]
    pub n: u32,
    pub potentials: Potentials,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentsBlock>,
    pub f: Nonlinearity,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub solver: SolveConfig,
    #[serde(default)]
    pub probe: ProbeBlock,
    #[serde(default)]
    pub seed: u64,
}

/// Parameters in floating point and, when every input is rational, exactly.
#[derive(Debug, Clone)]
pub struct ResolvedParams {
    pub float: ProblemParams<f64>,
    pub exact: Option<ProblemParams<Rational>>,
    /// Fields filled in from fitted potentials rather than the config.
    pub inferred: Vec<String>,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Compact serialization; the hashed form.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    /// Checks every block with its owning module before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 3 {
            return Err(CliError::Validation(format!("N = {} must be >= 3", self.n)));
        }
        let p = &self.potentials;
        for (spec, role, name) in [(&p.a, Role::A, "A"), (&p.v, Role::V, "V"), (&p.k, Role::K, "K")] {
            spec.validate(role)
                .map_err(|e| CliError::Validation(format!("potential {name}: {e}")))?;
        }
        if !self.f.is_zero() {
            self.f.validate().map_err(|e| CliError::Validation(format!("f: {e}")))?;
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Validation(format!("solver: {e}")))?;
        let g = &self.grid;
        if !(g.r_min > 0.0 && g.r_max > g.r_min && g.nodes >= 3) {
            return Err(CliError::Validation(format!(
                "grid needs 0 < r_min < r_max and at least 3 nodes; got [{}, {}] with {}",
                g.r_min, g.r_max, g.nodes
            )));
        }
        if self.probe.restarts == 0 || !(self.probe.tol > 0.0) {
            return Err(CliError::Validation("probe needs restarts >= 1 and tol > 0".into()));
        }
        self.probe.radii.expand()?;
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Arc<RadialGrid>, CliError> {
        let g = &self.grid;
        RadialGrid::build(self.n, g.r_min, g.r_max, g.nodes, g.grading)
            .map(Arc::new)
            .map_err(|e| CliError::Validation(format!("grid: {e}")))
    }

    /// Exponent parameters; missing `a` values come from fits of `A`, missing
    /// `alpha` from fits of `K` with `beta = 0`.
    pub fn resolve_params(&self) -> Result<ResolvedParams, CliError> {
        let block = self.exponents.clone().unwrap_or_default();
        let mut inferred = Vec::new();
        let mut fitted = |spec: &PotentialSpec, end: End, name: &str| -> Result<ExactValue, CliError> {
            let fit = fit_asymptotics(spec, end)
                .map_err(|e| CliError::Validation(format!("{name} is not declared and cannot be fitted: {e}")))?;
            inferred.push(name.to_string());
            // snap fits that agree with a short decimal to it, so rational mode survives
            let rounded = (fit.exponent * 1e6).round() / 1e6;
            let x = if (rounded - fit.exponent).abs() < 1e-9 { rounded } else { fit.exponent };
            Ok(ExactValue::Number(x))
        };
        let pot = &self.potentials;
        let a0 = match block.a0 {
            Some(v) => v,
            None => fitted(&pot.a, End::Zero, "a0")?,
        };
        let ainf = match block.ainf {
            Some(v) => v,
            None => fitted(&pot.a, End::Infinity, "ainf")?,
        };
        let beta0 = block.beta0.unwrap_or(ExactValue::Number(0.0));
        let betainf = block.betainf.unwrap_or(ExactValue::Number(0.0));
        let alpha0 = match block.alpha0 {
            Some(v) => v,
            None => fitted(&pot.k, End::Zero, "alpha0")?,
        };
        let alphainf = match block.alphainf {
            Some(v) => v,
            None => fitted(&pot.k, End::Infinity, "alphainf")?,
        };
        let values = [&a0, &ainf, &alpha0, &alphainf, &beta0, &betainf];
        let float = ProblemParams {
            n: self.n,
            a0: a0.to_f64()?,
            ainf: ainf.to_f64()?,
            alpha0: alpha0.to_f64()?,
            alphainf: alphainf.to_f64()?,
            beta0: beta0.to_f64()?,
            betainf: betainf.to_f64()?,
            s: block.s.as_ref().map(ExactValue::to_f64).transpose()?,
        };
        float
            .validate()
            .map_err(|e| CliError::Validation(format!("exponents: {e}")))?;
        let exact = (|| {
            let r: Vec<Rational> = values.iter().map(|v| v.to_rational()).collect::<Option<_>>()?;
            let s = match &block.s {
                Some(v) => Some(v.to_rational()?),
                None => None,
            };
            Some(ProblemParams {
                n: self.n,
                a0: r[0],
                ainf: r[1],
                alpha0: r[2],
                alphainf: r[3],
                beta0: r[4],
                betainf: r[5],
                s,
            })
        })();
        Ok(ResolvedParams { float, exact, inferred })
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let params = self.resolve_params().ok().map(|r| r.float);
        Ok(Problem {
            grid: self.build_grid()?,
            a: self.potentials.a.clone(),
            v: self.potentials.v.clone(),
            k: self.potentials.k.clone(),
            nl: self.f.clone(),
            params,
        })
    }

    pub fn probe_settings(&self) -> ProbeSettings {
        ProbeSettings {
            restarts: self.probe.restarts,
            max_iter: self.probe.max_iter,
            tol: self.probe.tol,
            seed: self.seed,
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            seed: self.seed,
            ..self.solver.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_from_text_and_numbers() {
        assert_eq!(parse_rational("3/2"), Some(Rational64::new(3, 2)));
        assert_eq!(parse_rational("-0.25"), Some(Rational64::new(-1, 4)));
        assert_eq!(parse_rational("7"), Some(Rational64::from_integer(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1e3"), None);
        assert_eq!(ExactValue::Number(1.5).to_rational(), Some(Rational64::new(3, 2)));
        assert_eq!(ExactValue::Number(0.1).to_rational(), Some(Rational64::new(1, 10)));
        assert_eq!(ExactValue::Number(f64::MIN_POSITIVE).to_rational(), None);
    }

    #[test]
    fn radii_ranges() {
        let r = parse_radii("1e-3:1e-1:3").unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0] - 1e-3).abs() < 1e-18 && (r[1] - 1e-2).abs() < 1e-15 && r[2] == 1e-1);
        assert!(parse_radii("1:2").is_err());
        assert!(parse_radii("2:1:4").is_err());
    }
}
