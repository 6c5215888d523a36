//! von Roos ambiguity parameters `(α, β, γ)` with `α + β + γ = −1`.
//!
//! The von Roos kinetic operator recasts as `−∂(1/m)∂ + Ṽ` with
//!
//! ```text
//! Ṽ = c_lap · m''/m² − c_grad · m'²/m³ + V
//! c_lap  = (1 + β)/2
//! c_grad = α(α + β + 1) + β + 1
//! ```
//!
//! Triples built from rational inputs keep an exact copy so that coefficient
//! matching can be done without rounding.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::profiles::{Jet, MassProfile, PotentialProfile, ProfileError};
use crate::rational::{self, ratio, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrderingError {
    #[error("no real ordering: discriminant {discriminant} < 0")]
    NoRealOrdering { discriminant: f64 },
    #[error("unknown ordering '{0}' (expected gora_williams, ben_daniel_duke, zhu_kroemer, li_kuhn, mm or custom:<alpha>,<beta>)")]
    UnknownName(String),
    #[error("malformed custom ordering '{0}', expected custom:<alpha>,<beta>")]
    MalformedCustom(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactTriple {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingParameters {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub exact: Option<ExactTriple>,
    pub name: Option<String>,
}

/// `γ := −1 − α − β`.
pub fn make_ordering(alpha: f64, beta: f64) -> OrderingParameters {
    OrderingParameters { alpha, beta, gamma: -1.0 - alpha - beta, exact: None, name: None }
}

/// Exact counterpart of [`make_ordering`].
pub fn make_ordering_exact(alpha: Rational, beta: Rational) -> OrderingParameters {
    let gamma = -Rational::from_integer(1) - alpha - beta;
    OrderingParameters {
        alpha: rational::to_f64(&alpha),
        beta: rational::to_f64(&beta),
        gamma: rational::to_f64(&gamma),
        exact: Some(ExactTriple { alpha, beta, gamma }),
        name: None,
    }
}

fn named(alpha: Rational, beta: Rational, name: &str) -> OrderingParameters {
    make_ordering_exact(alpha, beta).with_name(name)
}

/// The named orderings: Gora–Williams, BenDaniel–Duke, Zhu–Kroemer, Li–Kuhn,
/// and the pseudo-momentum ordering `mm` (`β = −1/2, α = γ = −1/4`).
pub fn catalog() -> Vec<OrderingParameters> {
    vec![
        named(ratio(-1, 1), ratio(0, 1), "gora_williams"),
        named(ratio(0, 1), ratio(-1, 1), "ben_daniel_duke"),
        named(ratio(-1, 2), ratio(0, 1), "zhu_kroemer"),
        named(ratio(0, 1), ratio(-1, 2), "li_kuhn"),
        named(ratio(-1, 4), ratio(-1, 2), "mm"),
    ]
}

pub fn lookup(name: &str) -> Option<OrderingParameters> {
    catalog().into_iter().find(|o| o.name.as_deref() == Some(name))
}

impl OrderingParameters {
    pub fn mm() -> Self {
        named(ratio(-1, 4), ratio(-1, 2), "mm")
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// Catalog name or `custom:<alpha>,<beta>`. Decimal and `p/q` inputs are
    /// kept exact.
    pub fn from_spec(text: &str) -> Result<Self, OrderingError> {
        let text = text.trim();
        let Some(args) = text.strip_prefix("custom:") else {
            return lookup(text).ok_or_else(|| OrderingError::UnknownName(text.to_string()));
        };
        let malformed = || OrderingError::MalformedCustom(text.to_string());
        let (a, b) = args.split_once(',').ok_or_else(malformed)?;
        let ordering = match (rational::parse_exact(a), rational::parse_exact(b)) {
            (Some(alpha), Some(beta)) => make_ordering_exact(alpha, beta),
            _ => {
                let alpha: f64 = a.trim().parse().map_err(|_| malformed())?;
                let beta: f64 = b.trim().parse().map_err(|_| malformed())?;
                make_ordering(alpha, beta)
            }
        };
        Ok(ordering.with_name(&format!("custom:{},{}", a.trim(), b.trim())))
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("custom:{},{}", self.alpha, self.beta),
        }
    }

    /// `α + β + γ + 1`, zero up to rounding for float triples.
    pub fn constraint_residual(&self) -> f64 {
        self.alpha + self.beta + self.gamma + 1.0
    }

    /// Same triple: exact comparison when both sides are exact, otherwise
    /// within `1e-12`.
    pub fn same_triple(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => {
                (self.alpha - other.alpha).abs() <= 1e-12
                    && (self.beta - other.beta).abs() <= 1e-12
                    && (self.gamma - other.gamma).abs() <= 1e-12
            }
        }
    }

    /// `(γ, β, α)`; the effective potential is invariant under this swap.
    pub fn mirrored(&self) -> Self {
        let exact = self.exact.map(|t| ExactTriple { alpha: t.gamma, beta: t.beta, gamma: t.alpha });
        Self { alpha: self.gamma, beta: self.beta, gamma: self.alpha, exact, name: None }
    }

    pub fn kinetic_coefficients(&self) -> KineticCoefficients {
        kinetic_coefficients(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticCoefficients {
    /// Coefficient of `m''/m²`.
    pub c_lap: f64,
    /// Coefficient of `m'²/m³` (enters with a minus sign).
    pub c_grad: f64,
    pub exact: Option<(Rational, Rational)>,
}

impl KineticCoefficients {
    /// Mass-derivative part of `Ṽ`, i.e. `c_lap·m''/m² − c_grad·m'²/m³`.
    pub fn mass_term(&self, m: &Jet) -> f64 {
        mass_term(self.c_lap, self.c_grad, m)
    }
}

pub(crate) fn mass_term(c_lap: f64, c_grad: f64, m: &Jet) -> f64 {
    let m2 = m.value * m.value;
    c_lap * m.d2 / m2 - c_grad * m.d1 * m.d1 / (m2 * m.value)
}

pub fn kinetic_coefficients(o: &OrderingParameters) -> KineticCoefficients {
    if let Some(t) = &o.exact {
        let one = Rational::from_integer(1);
        let c_lap = (one + t.beta) / Rational::from_integer(2);
        let c_grad = t.alpha * (t.alpha + t.beta + one) + t.beta + one;
        return KineticCoefficients {
            c_lap: rational::to_f64(&c_lap),
            c_grad: rational::to_f64(&c_grad),
            exact: Some((c_lap, c_grad)),
        };
    }
    KineticCoefficients {
        c_lap: 0.5 * (1.0 + o.beta),
        c_grad: o.alpha * (o.alpha + o.beta + 1.0) + o.beta + 1.0,
        exact: None,
    }
}

/// Recovers the orderings that produce the given kinetic coefficients:
/// `β = 2c_lap − 1`, then `α² + (β+1)α + (β+1−c_grad) = 0`.
pub fn solve_parameters_from_coefficients(
    c_lap: f64,
    c_grad: f64,
) -> Result<Vec<OrderingParameters>, OrderingError> {
    let beta = 2.0 * c_lap - 1.0;
    let b = beta + 1.0;
    let c = beta + 1.0 - c_grad;
    let mut disc = b * b - 4.0 * c;
    let scale = (b * b).max(4.0 * c.abs()).max(1.0);
    if disc.abs() <= 8.0 * f64::EPSILON * scale {
        disc = 0.0;
    }
    if disc < 0.0 {
        return Err(OrderingError::NoRealOrdering { discriminant: disc });
    }
    if disc == 0.0 {
        return Ok(vec![make_ordering(-0.5 * b, beta)]);
    }
    let root = crate::math::sqrt(disc);
    Ok(vec![make_ordering(0.5 * (-b - root), beta), make_ordering(0.5 * (-b + root), beta)])
}

/// Exact coefficient matching. Roots stay rational when the discriminant is a
/// rational square; otherwise the two roots are returned as floats.
pub fn solve_parameters_exact(
    c_lap: Rational,
    c_grad: Rational,
) -> Result<Vec<OrderingParameters>, OrderingError> {
    let one = Rational::from_integer(1);
    let two = Rational::from_integer(2);
    let beta = two * c_lap - one;
    let b = beta + one;
    let c = beta + one - c_grad;
    let disc = b * b - Rational::from_integer(4) * c;
    if disc.is_negative() {
        return Err(OrderingError::NoRealOrdering { discriminant: rational::to_f64(&disc) });
    }
    if disc.is_zero() {
        return Ok(vec![make_ordering_exact(-b / two, beta)]);
    }
    match rational::exact_sqrt(&disc) {
        Some(root) => Ok(vec![
            make_ordering_exact((-b - root) / two, beta),
            make_ordering_exact((-b + root) / two, beta),
        ]),
        None => solve_parameters_from_coefficients(rational::to_f64(&c_lap), rational::to_f64(&c_grad)),
    }
}

/// How `∂²m` is read for radially symmetric masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaplacianMode {
    /// `m''(r)` as written for the radial Hamiltonian.
    #[default]
    LiteralRadial,
    /// Full d-dimensional Laplacian `m'' + (d−1)m'/r`.
    FullLaplacian,
}

impl LaplacianMode {
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim() {
            "literal_radial" => Some(Self::LiteralRadial),
            "full_laplacian" => Some(Self::FullLaplacian),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LiteralRadial => "literal_radial",
            Self::FullLaplacian => "full_laplacian",
        }
    }
}

/// `Ṽ(x)` for a one-dimensional problem.
pub fn effective_potential_1d(
    o: &OrderingParameters,
    m: &MassProfile,
    v: &PotentialProfile,
    x: f64,
) -> Result<f64, OrderingError> {
    let jet = m.jet(x)?;
    Ok(kinetic_coefficients(o).mass_term(&jet) + v.eval(x)?)
}

/// `Ṽ(r)` for a radially symmetric problem in `d` dimensions.
pub fn effective_potential_radial(
    o: &OrderingParameters,
    m: &MassProfile,
    v: &PotentialProfile,
    r: f64,
    d: u32,
    mode: LaplacianMode,
) -> Result<f64, OrderingError> {
    let mut jet = m.jet(r)?;
    if mode == LaplacianMode::FullLaplacian {
        jet.d2 += f64::from(d.saturating_sub(1)) * jet.d1 / r;
    }
    Ok(kinetic_coefficients(o).mass_term(&jet) + v.eval(r)?)
}

/// Effective potentials of several orderings on a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingTable {
    pub points: Vec<f64>,
    pub potential: Vec<f64>,
    pub labels: Vec<String>,
    /// `columns[k][i]` is `Ṽ` of ordering `k` at `points[i]`.
    pub columns: Vec<Vec<f64>>,
    /// `(a, b, Ṽ_b − Ṽ_a)` for every pair `a < b`.
    pub differences: Vec<(usize, usize, Vec<f64>)>,
}

pub fn compare_orderings(
    orderings: &[OrderingParameters],
    m: &MassProfile,
    v: &PotentialProfile,
    points: &[f64],
    d: u32,
    mode: LaplacianMode,
) -> Result<OrderingTable, OrderingError> {
    let potential = points.iter().map(|&r| v.eval(r)).collect::<Result<Vec<_>, _>>()?;
    let columns = orderings
        .iter()
        .map(|o| {
            points
                .iter()
                .map(|&r| effective_potential_radial(o, m, v, r, d, mode))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut differences = Vec::new();
    for a in 0..columns.len() {
        for b in a + 1..columns.len() {
            let diff = columns[b].iter().zip(&columns[a]).map(|(vb, va)| vb - va).collect();
            differences.push((a, b, diff));
        }
    }
    Ok(OrderingTable {
        points: points.to_vec(),
        potential,
        labels: orderings.iter().map(OrderingParameters::label).collect(),
        columns,
        differences,
    })
}
