use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use invforge::invcat::{EquationParams, Reading};
use invforge::jetspace::FieldKind;
use invforge::liealg::coef::{u, Coef};
use invforge::liealg::{AlgebraName, AlgebraSpec, ApInfConfig, ApInfFunctions, Chart};
use invforge::verify::{DEFAULT_SAMPLES, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every setting of a run, after merging defaults, config file, environment
/// and command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub target: Option<String>,
    pub algebra: Option<String>,
    pub equation: Option<String>,
    pub expr: Option<String>,
    pub n: usize,
    pub m: usize,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub mass: Option<f64>,
    pub field: Option<FieldKind>,
    pub chart: Option<Chart>,
    pub reading: Reading,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub k: usize,
    pub coupling: f64,
    pub truncate: Option<usize>,
    pub dilation: bool,
    pub apinf_b: Option<Vec<f64>>,
    pub apinf_a: Option<Vec<f64>>,
    pub apinf_eta: Option<Vec<f64>>,
    pub apinf_d: Option<Vec<f64>>,
    pub point: Option<Vec<f64>>,
    pub from_u: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const KEYS: &[&str] = &[
    "target", "algebra", "equation", "expr", "n", "m", "lambda", "mu", "mass", "field", "chart", "reading", "seed",
    "samples", "tol", "k", "coupling", "truncate", "dilation", "apinf_b", "apinf_a", "apinf_eta", "apinf_d", "point",
    "from_u", "out",
];

/// Raw `key = value` settings; later layers override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Layer(pub BTreeMap<String, String>);

impl Layer {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown setting `{key}`")));
        }
        self.0.insert(key, value.into().trim().to_string());
        Ok(())
    }

    pub fn merge(&mut self, other: &Layer) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    /// Flat text: one `key = value` per line, `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Layer, CliError> {
        let mut layer = Layer::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{origin}:{}: expected `key = value`", no + 1)))?;
            layer
                .set(k, v)
                .map_err(|e| CliError::Config(format!("{origin}:{}: {e}", no + 1)))?;
        }
        Ok(layer)
    }

    pub fn read(path: &Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Layer::parse(&text, &path.display().to_string())
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| CliError::Config(format!("invalid value `{v}` for `{key}`: {e}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|s| parse_value(key, s.trim())).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("invalid value `{v}` for `{key}`: expected true or false"))),
    }
}

impl RunConfig {
    /// Resolves `layer` on top of the defaults; `env_seed` is used when no
    /// layer sets `seed`.
    pub fn resolve(command: &str, layer: &Layer, env_seed: Option<&str>) -> Result<RunConfig, CliError> {
        let mut c = RunConfig {
            command: command.to_string(),
            target: None,
            algebra: None,
            equation: None,
            expr: None,
            n: 3,
            m: 1,
            lambda: None,
            mu: None,
            mass: None,
            field: None,
            chart: None,
            reading: Reading::Printed,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            k: 1,
            coupling: 0.5,
            truncate: None,
            dilation: false,
            apinf_b: None,
            apinf_a: None,
            apinf_eta: None,
            apinf_d: None,
            point: None,
            from_u: false,
            out: None,
        };
        if let Some(s) = env_seed {
            c.seed = parse_value("INVFORGE_SEED", s)?;
        }
        for (key, v) in &layer.0 {
            let v = v.as_str();
            match key.as_str() {
                "target" => c.target = Some(v.to_string()),
                "algebra" => c.algebra = Some(v.to_string()),
                "equation" => c.equation = Some(v.to_string()),
                "expr" => c.expr = Some(v.to_string()),
                "n" => c.n = parse_value(key, v)?,
                "m" => c.m = parse_value(key, v)?,
                "lambda" => c.lambda = Some(parse_value(key, v)?),
                "mu" => c.mu = Some(parse_value(key, v)?),
                "mass" => c.mass = Some(parse_value(key, v)?),
                "field" => {
                    c.field = Some(match v {
                        "real" => FieldKind::Real,
                        "complex" => FieldKind::Complex,
                        _ => return Err(CliError::Config(format!("invalid field kind `{v}`: expected real or complex"))),
                    })
                }
                "chart" => {
                    c.chart = Some(match v {
                        "linear" => Chart::Linear,
                        "log" => Chart::Log,
                        _ => return Err(CliError::Config(format!("invalid chart `{v}`: expected linear or log"))),
                    })
                }
                "reading" => c.reading = parse_value(key, v)?,
                "seed" => c.seed = parse_value(key, v)?,
                "samples" => c.samples = parse_value(key, v)?,
                "tol" => c.tol = parse_value(key, v)?,
                "k" => c.k = parse_value(key, v)?,
                "coupling" => c.coupling = parse_value(key, v)?,
                "truncate" => c.truncate = Some(parse_value(key, v)?),
                "dilation" => c.dilation = parse_bool(key, v)?,
                "apinf_b" => c.apinf_b = Some(parse_list(key, v)?),
                "apinf_a" => c.apinf_a = Some(parse_list(key, v)?),
                "apinf_eta" => c.apinf_eta = Some(parse_list(key, v)?),
                "apinf_d" => c.apinf_d = Some(parse_list(key, v)?),
                "point" => c.point = Some(parse_list(key, v)?),
                "from_u" => c.from_u = parse_bool(key, v)?,
                "out" => c.out = Some(PathBuf::from(v)),
                _ => unreachable!("keys validated on insert"),
            }
        }
        if c.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        if !(c.tol > 0.0 && c.tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {}", c.tol)));
        }
        Ok(c)
    }

    fn apinf(&self) -> ApInfConfig {
        let poly = |c: &Option<Vec<f64>>| c.as_ref().map(|v| Coef::polynomial(v, u(0)));
        let user = [&self.apinf_b, &self.apinf_a, &self.apinf_eta].iter().any(|c| c.is_some()) || self.apinf_d.is_some();
        let functions = user.then(|| ApInfFunctions {
            b: poly(&self.apinf_b).unwrap_or_else(Coef::zero),
            a: poly(&self.apinf_a).unwrap_or_else(Coef::zero),
            eta: poly(&self.apinf_eta).unwrap_or_else(Coef::zero),
            d: poly(&self.apinf_d),
        });
        ApInfConfig {
            seed: self.seed,
            with_dilation: self.dilation || self.apinf_d.is_some(),
            functions,
            ..ApInfConfig::default()
        }
    }

    /// The algebra spec, validated.
    pub fn spec(&self) -> Result<AlgebraSpec, CliError> {
        let name: AlgebraName = self
            .algebra
            .as_deref()
            .ok_or_else(|| CliError::Config("no algebra given (use --algebra)".into()))?
            .parse()
            .map_err(|e: invforge::liealg::AlgebraError| CliError::Config(e.to_string()))?;
        let mut spec = AlgebraSpec::new(name, self.n).fields(self.m);
        if let Some(l) = self.lambda {
            spec = spec.lambda(l);
        }
        if let Some(mu) = self.mu {
            spec = spec.mu(mu);
        }
        if let Some(mass) = self.mass {
            spec = spec.mass(mass);
        }
        if let Some(chart) = self.chart {
            spec = spec.chart(chart);
        }
        if name == AlgebraName::ApInf {
            spec = spec.apinf(self.apinf());
        }
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(kind) = self.field {
            if kind != spec.field_kind() {
                return Err(CliError::Config(format!(
                    "{} acts on a {} field, but --field {} was given",
                    name,
                    kind_name(spec.field_kind()),
                    kind_name(kind)
                )));
            }
        }
        Ok(spec)
    }

    pub fn equation_params(&self) -> EquationParams {
        let d = EquationParams::default();
        EquationParams {
            n: self.n,
            k: self.k,
            mu: self.mu.unwrap_or(d.mu),
            mass: self.mass.unwrap_or(d.mass),
            coupling: self.coupling,
            reading: self.reading,
            apinf: self.apinf(),
        }
    }
}

pub fn kind_name(k: FieldKind) -> &'static str {
    match k {
        FieldKind::Real => "real",
        FieldKind::Complex => "complex",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_layer_with_comments() {
        let layer = Layer::parse("# run\nalgebra = AE\nn=4 # four\n\nseed = 7\n", "cfg").unwrap();
        let c = RunConfig::resolve("verify", &layer, None).unwrap();
        assert_eq!((c.algebra.as_deref(), c.n, c.seed), (Some("AE"), 4, 7));
    }

    #[test]
    fn unknown_key_and_bad_value() {
        assert!(matches!(Layer::parse("colour = red", "cfg"), Err(CliError::Config(_))));
        let layer = Layer::parse("n = three", "cfg").unwrap();
        assert!(matches!(RunConfig::resolve("verify", &layer, None), Err(CliError::Config(_))));
    }

    #[test]
    fn seed_precedence() {
        let empty = Layer::default();
        assert_eq!(RunConfig::resolve("x", &empty, Some("9")).unwrap().seed, 9);
        let layer = Layer::parse("seed = 3", "cfg").unwrap();
        assert_eq!(RunConfig::resolve("x", &layer, Some("9")).unwrap().seed, 3);
    }

    #[test]
    fn field_kind_must_match_algebra() {
        let layer = Layer::parse("algebra = AE\nfield = complex", "cfg").unwrap();
        let c = RunConfig::resolve("x", &layer, None).unwrap();
        assert!(matches!(c.spec(), Err(CliError::Config(_))));
    }
}
