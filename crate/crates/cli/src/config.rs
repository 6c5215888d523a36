//! INI problem files.
//!
//! ```ini
//! [mass]
//! family = power_law
//! coeff = 1
//! exponent = 2
//!
//! [potential]
//! expr = r^4/4
//!
//! [problem]
//! d = 3
//! ell = 1
//!
//! [solver]
//! r_max = 5
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use ini::Ini;
use pdm_core::ordering::LaplacianMode;
use pdm_core::profiles::{Domain, MassProfile, PotentialProfile, Profile};
use pdm_core::radial::{Angular, Parity, DEFAULT_GRID_N, DEFAULT_R_MIN, DEFAULT_TOLERANCE};
use pdm_core::OrderingParameters;

use crate::error::CliError;

const SECTIONS: &[(&str, &[&str])] = &[
    ("mass", PROFILE_KEYS),
    ("potential", PROFILE_KEYS),
    ("problem", &["d", "ell", "parity", "ordering", "laplacian_mode"]),
    ("solver", &["r_min", "r_max", "grid_n", "n_max", "tolerance"]),
    ("operator", &["x_min", "x_max", "grid_n"]),
];

const PROFILE_KEYS: &[&str] =
    &["family", "value", "coeff", "exponent", "rate", "numer", "denom", "expr", "var", "domain"];

type Section = BTreeMap<String, String>;

#[derive(Debug, Clone)]
pub struct ProblemSettings {
    pub d: u32,
    pub angular: Angular,
    pub ordering: OrderingParameters,
    pub laplacian_mode: LaplacianMode,
}

#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub r_min: f64,
    /// `None` asks for an automatic choice.
    pub r_max: Option<f64>,
    pub grid_n: usize,
    pub n_max: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct OperatorSettings {
    pub x_min: f64,
    pub x_max: f64,
    pub grid_n: usize,
}

/// A parsed problem file. Only `[mass]` is required here; commands that need
/// a potential ask for it.
#[derive(Debug, Clone)]
pub struct ProblemConfig {
    mass: MassProfile,
    potential: Option<PotentialProfile>,
    pub problem: ProblemSettings,
    pub solver: SolverSettings,
    pub operator: OperatorSettings,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(CliError::Config(format!("key '{key}' appears before any [section]")));
                }
                continue;
            };
            let allowed = SECTIONS
                .iter()
                .find(|(s, _)| *s == name)
                .map(|(_, keys)| *keys)
                .ok_or_else(|| CliError::Config(format!("unknown section [{name}]")))?;
            let entry = sections.entry(name.to_string()).or_default();
            for (key, value) in props.iter() {
                if !allowed.contains(&key) {
                    return Err(CliError::Config(format!("unknown key '{key}' in [{name}]")));
                }
                entry.insert(key.to_string(), value.trim().to_string());
            }
        }
        let mass_section = sections
            .get("mass")
            .ok_or_else(|| CliError::Config("missing mandatory section [mass]".into()))?;
        let mass = MassProfile::new(parse_profile_section("mass", mass_section)?);
        let potential = match sections.get("potential") {
            Some(s) => Some(PotentialProfile::new(parse_profile_section("potential", s)?)),
            None => None,
        };
        let empty = Section::new();
        let problem = parse_problem(sections.get("problem").unwrap_or(&empty))?;
        let solver = parse_solver(sections.get("solver").unwrap_or(&empty))?;
        let operator = parse_operator(sections.get("operator").unwrap_or(&empty))?;
        Ok(Self { mass, potential, problem, solver, operator })
    }

    pub fn mass(&self) -> &MassProfile {
        &self.mass
    }

    pub fn potential(&self) -> Result<&PotentialProfile, CliError> {
        self.potential
            .as_ref()
            .ok_or_else(|| CliError::Config("missing mandatory section [potential]".into()))
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }
}

fn number(section: &str, key: &str, text: &str) -> Result<f64, CliError> {
    let value = match text.trim() {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        t => t.parse().map_err(|_| CliError::Config(format!("[{section}] {key}: '{text}' is not a number")))?,
    };
    if value.is_nan() {
        return Err(CliError::Config(format!("[{section}] {key}: NaN is not allowed")));
    }
    Ok(value)
}

fn finite(section: &str, key: &str, text: &str) -> Result<f64, CliError> {
    let value = number(section, key, text)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Config(format!("[{section}] {key} must be finite")))
    }
}

fn integer<T: std::str::FromStr>(section: &str, key: &str, text: &str) -> Result<T, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("[{section}] {key}: '{text}' is not a non-negative integer")))
}

fn required<'a>(section: &str, s: &'a Section, key: &str) -> Result<&'a str, CliError> {
    s.get(key)
        .map(String::as_str)
        .ok_or_else(|| CliError::Config(format!("missing mandatory key '{key}' in [{section}]")))
}

fn list(section: &str, key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(|t| finite(section, key, t)).collect()
}

fn parse_profile_section(name: &str, s: &Section) -> Result<Profile, CliError> {
    let family = match (s.get("family"), s.get("expr")) {
        (Some(f), _) => f.as_str(),
        (None, Some(_)) => "expression",
        (None, None) => {
            return Err(CliError::Config(format!("missing mandatory key 'family' or 'expr' in [{name}]")));
        }
    };
    let get = |key: &str| -> Result<f64, CliError> { finite(name, key, required(name, s, key)?) };
    let bad = |e: pdm_core::profiles::ProfileError| CliError::Config(format!("[{name}]: {e}"));
    let profile = match family {
        "constant" => Profile::constant(get("value")?),
        "power_law" => Profile::power_law(get("coeff")?, get("exponent")?),
        "exponential" => Profile::exponential(get("coeff")?, get("rate")?),
        "rational" => Profile::rational(
            list(name, "numer", required(name, s, "numer")?)?,
            list(name, "denom", required(name, s, "denom")?)?,
        )
        .map_err(bad)?,
        "expression" => {
            let var = s.get("var").map(String::as_str).unwrap_or("r");
            let source = required(name, s, "expr")?;
            // radial problems live on r > 0 unless told otherwise
            Profile::parse(source, var).map_err(bad)?.with_domain(Domain::POSITIVE)
        }
        other => {
            return Err(CliError::Config(format!(
                "[{name}] family '{other}' is not one of constant, power_law, exponential, rational, expression"
            )))
        }
    };
    let profile = match s.get("domain") {
        Some(text) => {
            let bounds = text.split(',').map(|t| number(name, "domain", t)).collect::<Result<Vec<_>, _>>()?;
            let [lo, hi] = bounds[..] else {
                return Err(CliError::Config(format!("[{name}] domain must be 'lo, hi'")));
            };
            profile.with_domain(Domain::new(lo, hi).map_err(bad)?)
        }
        None => profile,
    };
    if name == "mass" {
        if let Some((coeff, _)) = profile.power_law_params() {
            if !(coeff > 0.0) {
                return Err(CliError::Config("[mass] constant and power-law masses need a positive coefficient".into()));
            }
        }
    }
    Ok(profile)
}

fn parse_problem(s: &Section) -> Result<ProblemSettings, CliError> {
    let d: u32 = match s.get("d") {
        Some(t) => integer("problem", "d", t)?,
        None => 3,
    };
    if d == 0 {
        return Err(CliError::Config("[problem] d must be at least 1".into()));
    }
    let angular = match (d, s.get("ell"), s.get("parity")) {
        (_, Some(_), Some(_)) => return Err(CliError::Config("[problem] give either ell or parity, not both".into())),
        (1, Some(_), None) => return Err(CliError::Config("[problem] d = 1 takes parity = even|odd, not ell".into())),
        (1, None, p) => {
            let text = p.map(String::as_str).unwrap_or("even");
            Angular::Parity(
                Parity::parse(text)
                    .ok_or_else(|| CliError::Config(format!("[problem] parity '{text}' is not even or odd")))?,
            )
        }
        (_, _, Some(_)) => return Err(CliError::Config("[problem] parity only applies to d = 1".into())),
        (_, ell, None) => Angular::Ell(match ell {
            Some(t) => integer("problem", "ell", t)?,
            None => 0,
        }),
    };
    let ordering = match s.get("ordering") {
        Some(t) => OrderingParameters::from_spec(t).map_err(|e| CliError::Config(format!("[problem] ordering: {e}")))?,
        None => OrderingParameters::mm(),
    };
    let laplacian_mode = match s.get("laplacian_mode") {
        Some(t) => LaplacianMode::parse(t).ok_or_else(|| {
            CliError::Config(format!("[problem] laplacian_mode '{t}' is not literal_radial or full_laplacian"))
        })?,
        None => LaplacianMode::default(),
    };
    Ok(ProblemSettings { d, angular, ordering, laplacian_mode })
}

fn parse_solver(s: &Section) -> Result<SolverSettings, CliError> {
    let r_min = match s.get("r_min") {
        Some(t) => finite("solver", "r_min", t)?,
        None => DEFAULT_R_MIN,
    };
    let r_max = s.get("r_max").map(|t| finite("solver", "r_max", t)).transpose()?;
    let grid_n = match s.get("grid_n") {
        Some(t) => integer("solver", "grid_n", t)?,
        None => DEFAULT_GRID_N,
    };
    let n_max = match s.get("n_max") {
        Some(t) => integer("solver", "n_max", t)?,
        None => 4,
    };
    let tolerance = match s.get("tolerance") {
        Some(t) => finite("solver", "tolerance", t)?,
        None => DEFAULT_TOLERANCE,
    };
    if !(r_min > 0.0) {
        return Err(CliError::Config("[solver] r_min must be positive".into()));
    }
    if r_max.is_some_and(|r| r <= r_min) {
        return Err(CliError::Config("[solver] r_max must exceed r_min".into()));
    }
    if !(tolerance > 0.0) {
        return Err(CliError::Config("[solver] tolerance must be positive".into()));
    }
    Ok(SolverSettings { r_min, r_max, grid_n, n_max, tolerance })
}

fn parse_operator(s: &Section) -> Result<OperatorSettings, CliError> {
    let x_min = s.get("x_min").map(|t| finite("operator", "x_min", t)).transpose()?.unwrap_or(-8.0);
    let x_max = s.get("x_max").map(|t| finite("operator", "x_max", t)).transpose()?.unwrap_or(8.0);
    let grid_n = match s.get("grid_n") {
        Some(t) => integer("operator", "grid_n", t)?,
        None => 1000,
    };
    if x_max <= x_min {
        return Err(CliError::Config("[operator] x_max must exceed x_min".into()));
    }
    if grid_n < 5 {
        return Err(CliError::Config("[operator] grid_n must be at least 5".into()));
    }
    Ok(OperatorSettings { x_min, x_max, grid_n })
}
