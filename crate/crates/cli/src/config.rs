//! INI-style run configuration with command-line overrides.
//!
//! ```text
//! [scenario]      model, delta, a2, gamma, nu, init; raw: h_plus, gamma_op, rho0
//! [time]          t_max, stride
//! [propagation]   method, dt
//! [outputs]       averages, pairs, kind, delta_c, ratio, rtol, out
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nhq_core::evolution::{HamiltonianSplit, Method, StateMatrix};
use nhq_core::tls::{InitialFamily, Model, Pauli, TlsScenario};
use nhq_core::{Hamiltonian, Matrix, Propagation, Scenario, State};
use num_complex::Complex64;

const KEYS: &[(&str, &[&str])] = &[
    (
        "scenario",
        &[
            "model", "delta", "a2", "gamma", "nu", "init", "h_plus", "gamma_op", "rho0",
        ],
    ),
    ("time", &["t_max", "stride"]),
    ("propagation", &["method", "dt"]),
    (
        "outputs",
        &["averages", "pairs", "kind", "delta_c", "ratio", "rtol", "out"],
    ),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: Option<Origin>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(origin: Option<Origin>, key: &str, message: impl Into<String>) -> Self {
        Self {
            origin,
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.origin {
            Some(Origin::Line(n)) => write!(f, "config line {n}, key `{}`: {}", self.key, self.message),
            Some(Origin::Flag(flag)) => write!(f, "flag --{flag}: {}", self.message),
            None if self.key.is_empty() => write!(f, "{}", self.message),
            None => write!(f, "key `{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Raw key/value pairs with where each came from.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<(String, String), (String, Origin)>,
}

fn known(section: &str, key: &str) -> bool {
    KEYS.iter().any(|(s, keys)| *s == section && keys.contains(&key))
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut settings = Settings::default();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let origin = Some(Origin::Line(line_no));
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_ascii_lowercase();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::new(origin, &name, "unknown section"));
                }
                section = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(origin, line, "expected `key = value`"));
            };
            let key = key.trim().to_ascii_lowercase();
            let Some(sec) = section.as_deref() else {
                return Err(ConfigError::new(origin, &key, "key outside of any section"));
            };
            if !known(sec, &key) {
                return Err(ConfigError::new(origin, &key, format!("unknown key in [{sec}]")));
            }
            settings.values.insert(
                (sec.to_string(), key),
                (value.trim().to_string(), Origin::Line(line_no)),
            );
        }
        Ok(settings)
    }

    /// Overrides one key from a command-line flag.
    pub fn set_flag(&mut self, section: &str, key: &str, value: &str, flag: &str) {
        debug_assert!(known(section, key));
        self.values.insert(
            (section.to_string(), key.to_string()),
            (value.to_string(), Origin::Flag(flag.to_string())),
        );
    }

    fn get(&self, section: &str, key: &str) -> Option<(&str, &Origin)> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(|(v, o)| (v.as_str(), o))
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, origin)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::new(Some(origin.clone()), key, format!("invalid {what} `{v}`"))),
        }
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.parsed(section, key, "number")?;
        match v {
            Some(x) if !x.is_finite() => Err(self.error(section, key, "value must be finite")),
            other => Ok(other),
        }
    }

    fn flag(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, origin)) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(Some(true)),
                "false" | "no" | "0" | "off" => Ok(Some(false)),
                _ => Err(ConfigError::new(
                    Some(origin.clone()),
                    key,
                    format!("expected true/false, got `{v}`"),
                )),
            },
        }
    }

    fn error(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::new(self.get(section, key).map(|(_, o)| o.clone()), key, message)
    }

    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let scenario = self.scenario()?;

        let t_max = self.number("time", "t_max")?.unwrap_or(5.0);
        if t_max <= 0.0 {
            return Err(self.error("time", "t_max", "t_max must be positive"));
        }
        let stride: usize = self.parsed("time", "stride", "positive integer")?.unwrap_or(25);
        if stride == 0 {
            return Err(self.error("time", "stride", "stride must be at least 1"));
        }
        let method = match self.get("propagation", "method").map(|(v, _)| v.to_ascii_lowercase()) {
            None => Method::ExactExponential,
            Some(m) if m == "exact" => Method::ExactExponential,
            Some(m) if m == "rk4" => Method::Rk4,
            Some(m) => return Err(self.error("propagation", "method", format!("unknown method `{m}` (exact, rk4)"))),
        };
        let dt = self.number("propagation", "dt")?.unwrap_or(1e-3);
        if dt <= 0.0 {
            return Err(self.error("propagation", "dt", "dt must be positive"));
        }
        let spacing = dt * stride as f64;
        let steps = (t_max / spacing).round();
        if steps < 1.0 {
            return Err(self.error(
                "time",
                "t_max",
                format!("t_max is shorter than one output spacing ({spacing})"),
            ));
        }

        let default_pair = match &scenario {
            ScenarioSpec::Tls(sc) if sc.init == InitialFamily::X => (Pauli::X, Pauli::X),
            _ => (Pauli::Z, Pauli::Z),
        };
        let pairs = match self.get("outputs", "pairs") {
            None => vec![default_pair],
            Some((v, _)) => parse_pairs(v).map_err(|m| self.error("outputs", "pairs", m))?,
        };
        let kind = match self.get("outputs", "kind").map(|(v, _)| v.to_ascii_lowercase()) {
            None => KindSelection::Both,
            Some(k) => match k.as_str() {
                "nonlinear" => KindSelection::Nonlinear,
                "linear" => KindSelection::Linear,
                "both" => KindSelection::Both,
                _ => {
                    return Err(self.error(
                        "outputs",
                        "kind",
                        format!("unknown kind `{k}` (nonlinear, linear, both)"),
                    ))
                }
            },
        };
        let outputs = Outputs {
            averages: self
                .flag("outputs", "averages")?
                .unwrap_or(self.get("outputs", "pairs").is_none()),
            pairs,
            kind,
            delta_c: self.flag("outputs", "delta_c")?.unwrap_or(false),
            ratio: self.flag("outputs", "ratio")?.unwrap_or(false),
        };
        let rtol = self.number("outputs", "rtol")?.unwrap_or(1e-8);
        if rtol <= 0.0 {
            return Err(self.error("outputs", "rtol", "rtol must be positive"));
        }
        let out = self.get("outputs", "out").map(|(v, _)| PathBuf::from(v));

        Ok(RunConfig {
            scenario,
            t_max,
            stride,
            steps: steps as usize,
            propagation: Propagation {
                method,
                dt,
                record_stride: stride,
            },
            outputs,
            rtol,
            out,
        })
    }

    fn scenario(&self) -> Result<ScenarioSpec, ConfigError> {
        let model = self.get("scenario", "model").map(|(v, _)| v.to_ascii_lowercase());
        let model = model.as_deref().unwrap_or("ed");
        if model == "raw" {
            return self.raw_scenario();
        }
        let model: Model = model.parse().map_err(|_| {
            self.error(
                "scenario",
                "model",
                format!("unknown model `{model}` (ed, pd, dph, raw)"),
            )
        })?;
        let init = match self.get("scenario", "init") {
            None => InitialFamily::X,
            Some((v, _)) => v
                .parse()
                .map_err(|_| self.error("scenario", "init", format!("unknown family `{v}` (x, z)")))?,
        };
        let sc = TlsScenario {
            model,
            delta: self.number("scenario", "delta")?.unwrap_or(1.0),
            a2: self
                .number("scenario", "a2")?
                .unwrap_or(if model == Model::Ed { 1.0 } else { 0.0 }),
            gamma: self.number("scenario", "gamma")?.unwrap_or(0.0),
            nu: self.number("scenario", "nu")?.unwrap_or(0.0),
            init,
        };
        if sc.delta <= 0.0 {
            return Err(self.error("scenario", "delta", "delta must be positive"));
        }
        for key in ["h_plus", "gamma_op", "rho0"] {
            if self.get("scenario", key).is_some() {
                return Err(self.error("scenario", key, "only used with model = raw"));
            }
        }
        Ok(ScenarioSpec::Tls(sc))
    }

    fn raw_scenario(&self) -> Result<ScenarioSpec, ConfigError> {
        for key in ["delta", "a2", "gamma", "nu", "init"] {
            if self.get("scenario", key).is_some() {
                return Err(self.error("scenario", key, "not used with model = raw"));
            }
        }
        let matrix = |key: &str| -> Result<Matrix, ConfigError> {
            let (v, _) = self
                .get("scenario", key)
                .ok_or_else(|| ConfigError::new(None, key, "required for model = raw"))?;
            let entries = v
                .split(',')
                .map(|e| Complex64::from_str(&e.replace(' ', "")))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| self.error("scenario", key, format!("invalid complex entry list `{v}`")))?;
            Matrix::new(entries).map_err(|e| self.error("scenario", key, e.to_string()))
        };
        let (h_plus, gamma, rho0) = (matrix("h_plus")?, matrix("gamma_op")?, matrix("rho0")?);
        for (key, m) in [("h_plus", &h_plus), ("gamma_op", &gamma)] {
            if !m.is_hermitian(1e-12) {
                return Err(self.error("scenario", key, "matrix is not Hermitian"));
            }
        }
        if rho0.dim() != h_plus.dim() || gamma.dim() != h_plus.dim() {
            return Err(self.error(
                "scenario",
                "rho0",
                "h_plus, gamma_op and rho0 must have the same dimension",
            ));
        }
        if rho0.dim() != 2 {
            return Err(self.error(
                "scenario",
                "h_plus",
                "outputs use Pauli operators, so raw matrices must be 2×2",
            ));
        }
        let ham = HamiltonianSplit::from_parts(h_plus, gamma)
            .map_err(|e| self.error("scenario", "gamma_op", e.to_string()))?;
        let initial = StateMatrix::normalized(rho0).map_err(|e| self.error("scenario", "rho0", e.to_string()))?;
        Ok(ScenarioSpec::Raw { ham, initial })
    }
}

fn parse_pairs(v: &str) -> Result<Vec<(Pauli, Pauli)>, String> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let letters: Vec<char> = item.chars().collect();
        let pair = match letters.as_slice() {
            [a, b] => Pauli::from_letter(*a).zip(Pauli::from_letter(*b)),
            _ => None,
        };
        match pair {
            Some(p) if !out.contains(&p) => out.push(p),
            Some(_) => {}
            None => return Err(format!("invalid pair `{item}`: two letters from i, x, y, z")),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub enum ScenarioSpec {
    Tls(Scenario),
    Raw { ham: Hamiltonian, initial: State },
}

impl ScenarioSpec {
    pub fn build(&self) -> nhq_core::Result<(Hamiltonian, State)> {
        match self {
            ScenarioSpec::Tls(sc) => Ok((sc.hamiltonian()?, sc.initial_state())),
            ScenarioSpec::Raw { ham, initial } => Ok((ham.clone(), initial.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindSelection {
    Nonlinear,
    Linear,
    Both,
}

impl KindSelection {
    pub fn nonlinear(self) -> bool {
        self != KindSelection::Linear
    }

    pub fn linear(self) -> bool {
        self != KindSelection::Nonlinear
    }
}

#[derive(Debug, Clone)]
pub struct Outputs {
    pub averages: bool,
    /// (ξ, χ) pairs.
    pub pairs: Vec<(Pauli, Pauli)>,
    pub kind: KindSelection,
    pub delta_c: bool,
    pub ratio: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub t_max: f64,
    pub stride: usize,
    /// Number of output intervals; samples are `k·dt·stride` for `k = 0..=steps`.
    pub steps: usize,
    pub propagation: Propagation,
    pub outputs: Outputs,
    pub rtol: f64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn times(&self) -> Vec<f64> {
        let spacing = self.propagation.dt * self.stride as f64;
        (0..=self.steps).map(|k| k as f64 * spacing).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_defaults() {
        let text = "# demo\n[scenario]\nmodel = pd\ninit = z\nnu = 0.5 ; off-shell\n\n[time]\nt_max = 2\nstride = 10\n";
        let cfg = Settings::parse(text).unwrap().into_config().unwrap();
        let ScenarioSpec::Tls(sc) = &cfg.scenario else { panic!() };
        assert_eq!(sc.model, Model::Pd);
        assert_eq!(sc.nu, 0.5);
        assert_eq!(cfg.steps, 200);
        assert_eq!(cfg.outputs.pairs, vec![(Pauli::Z, Pauli::Z)]);
        assert_eq!(cfg.times().len(), 201);
    }

    #[test]
    fn reports_line_and_key() {
        let err = Settings::parse("[scenario]\nmodel = ed\nnu = abc\n")
            .unwrap()
            .into_config()
            .unwrap_err();
        assert_eq!(err.origin, Some(Origin::Line(3)));
        assert_eq!(err.key, "nu");
        assert_eq!(err.to_string(), "config line 3, key `nu`: invalid number `abc`");

        let err = Settings::parse("[scenario]\nbogus = 1\n").unwrap_err();
        assert_eq!(err.origin, Some(Origin::Line(2)));
        let err = Settings::parse("[nope]\n").unwrap_err();
        assert_eq!(err.key, "nope");
        assert!(Settings::parse("model = ed\n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut s = Settings::parse("[scenario]\nnu = 0.5\n").unwrap();
        s.set_flag("scenario", "nu", "-0.25", "nu");
        let cfg = s.into_config().unwrap();
        let ScenarioSpec::Tls(sc) = cfg.scenario else { panic!() };
        assert_eq!(sc.nu, -0.25);

        let mut s = Settings::default();
        s.set_flag("propagation", "dt", "-1", "dt");
        assert_eq!(s.into_config().unwrap_err().origin, Some(Origin::Flag("dt".into())));
    }

    #[test]
    fn raw_matrices() {
        let text = "[scenario]\nmodel = raw\nh_plus = 0, -1, -1, 0\ngamma_op = 1, 0, 0, -1\nrho0 = 1, 0, 0, 0\n";
        let cfg = Settings::parse(text).unwrap().into_config().unwrap();
        assert!(matches!(cfg.scenario, ScenarioSpec::Raw { .. }));

        let bad = "[scenario]\nmodel = raw\nh_plus = 0, 1i, 1i, 0\ngamma_op = 1, 0, 0, -1\nrho0 = 1, 0, 0, 0\n";
        let err = Settings::parse(bad).unwrap().into_config().unwrap_err();
        assert_eq!(err.key, "h_plus");
        assert_eq!(err.origin, Some(Origin::Line(3)));

        let trace2 = "[scenario]\nmodel = raw\nh_plus = 0, 1, 1, 0\ngamma_op = 1, 0, 0, -1\nrho0 = 1, 0, 0, 1\n";
        assert_eq!(Settings::parse(trace2).unwrap().into_config().unwrap_err().key, "rho0");
    }

    #[test]
    fn pairs_and_kinds() {
        assert_eq!(
            parse_pairs("xx, zy,ix").unwrap(),
            vec![(Pauli::X, Pauli::X), (Pauli::Z, Pauli::Y), (Pauli::I, Pauli::X)]
        );
        assert!(parse_pairs("xq").is_err());
        assert!(parse_pairs("xyz").is_err());
        let err = Settings::parse("[outputs]\nkind = sideways\n")
            .unwrap()
            .into_config()
            .unwrap_err();
        assert_eq!(err.key, "kind");
    }
}
