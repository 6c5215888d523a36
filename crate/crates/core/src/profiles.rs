//! Mass and potential profiles with first and second derivatives.
//!
//! Built-in families carry analytic derivatives. Expression-backed profiles
//! use central differences with `h = max(1e-5, 1e-5·|r|)` and one level of
//! Richardson extrapolation, which is `O(h⁴)` for smooth expressions.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::{EvalError, Expr, ParseError};
use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("r = {x} lies outside the open domain ({lo}, {hi})")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("evaluation failed at r = {x}: {source}")]
    Eval { x: f64, source: EvalError },
    #[error("non-finite value at r = {x}")]
    NonFinite { x: f64 },
    #[error("mass must be positive, got m({x}) = {value}")]
    NonPositiveMass { x: f64, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Value with its first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Self { value, d1: 0.0, d2: 0.0 }
    }
}

/// Open interval `(lo, hi)`; either side may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const POSITIVE: Domain = Domain { lo: 0.0, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self, ProfileError> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(ProfileError::InvalidParameter("domain needs lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    fn check(&self, x: f64) -> Result<(), ProfileError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(ProfileError::OutsideDomain { x, lo: self.lo, hi: self.hi })
        }
    }
}

/// Inner coordinate for composed profiles, `outer(inner(r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordinateMap {
    /// `u = coeff · r^exponent`
    PowerLaw { coeff: f64, exponent: f64 },
    /// `u = coeff · ln r`
    Log { coeff: f64 },
    /// `u = exp(rate · r)`
    Exp { rate: f64 },
}

impl CoordinateMap {
    fn jet(&self, r: f64) -> Jet {
        match *self {
            CoordinateMap::PowerLaw { coeff, exponent } => power_law_jet(coeff, exponent, r),
            CoordinateMap::Log { coeff } => Jet {
                value: coeff * math::ln(r),
                d1: coeff / r,
                d2: -coeff / (r * r),
            },
            CoordinateMap::Exp { rate } => {
                let value = math::exp(rate * r);
                Jet { value, d1: rate * value, d2: rate * rate * value }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Constant { value: f64 },
    /// `coeff · r^exponent`
    PowerLaw { coeff: f64, exponent: f64 },
    /// `coeff · exp(rate · r)`
    Exponential { coeff: f64, rate: f64 },
    /// Ratio of polynomials, coefficients in ascending powers.
    Rational { numer: Vec<f64>, denom: Vec<f64> },
    Expression(Expr),
    Composed { outer: Box<Profile>, inner: CoordinateMap },
}

/// A scalar profile on an open interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    family: Family,
    domain: Domain,
}

fn power_law_jet(coeff: f64, exponent: f64, r: f64) -> Jet {
    if exponent == 0.0 {
        return Jet::constant(coeff);
    }
    let pow = |p: f64| {
        if math::is_whole(p) && p.abs() <= 64.0 {
            math::powi(r, p as i32)
        } else {
            math::powf(r, p)
        }
    };
    Jet {
        value: coeff * pow(exponent),
        d1: coeff * exponent * pow(exponent - 1.0),
        d2: coeff * exponent * (exponent - 1.0) * pow(exponent - 2.0),
    }
}

fn poly_jet(coeffs: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
    for &c in coeffs.iter().rev() {
        ddp = ddp * x + 2.0 * dp;
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp, ddp)
}

/// Step used for numeric derivatives of expression profiles.
pub fn derivative_step(r: f64) -> f64 {
    (1e-5 * r.abs()).max(1e-5)
}

impl Profile {
    pub fn new(family: Family, domain: Domain) -> Self {
        Self { family, domain }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(Family::Constant { value }, Domain::REAL_LINE)
    }

    pub fn power_law(coeff: f64, exponent: f64) -> Self {
        Self::new(Family::PowerLaw { coeff, exponent }, Domain::POSITIVE)
    }

    pub fn exponential(coeff: f64, rate: f64) -> Self {
        Self::new(Family::Exponential { coeff, rate }, Domain::REAL_LINE)
    }

    pub fn rational(numer: Vec<f64>, denom: Vec<f64>) -> Result<Self, ProfileError> {
        if numer.is_empty() || denom.is_empty() || denom.iter().all(|&c| c == 0.0) {
            return Err(ProfileError::InvalidParameter("rational profile needs a non-zero denominator"));
        }
        Ok(Self::new(Family::Rational { numer, denom }, Domain::REAL_LINE))
    }

    /// Parses an expression profile over the whole real line; narrow it with
    /// [`Profile::with_domain`].
    pub fn parse(expr: &str, var: &str) -> Result<Self, ProfileError> {
        Ok(Self::new(Family::Expression(Expr::parse(expr, var)?), Domain::REAL_LINE))
    }

    pub fn composed(outer: Profile, inner: CoordinateMap, domain: Domain) -> Self {
        Self::new(Family::Composed { outer: Box::new(outer), inner }, domain)
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Power-law parameters `(coeff, exponent)`, treating a constant as exponent 0.
    pub fn power_law_params(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::PowerLaw { coeff, exponent } => Some((coeff, exponent)),
            Family::Constant { value } => Some((value, 0.0)),
            _ => None,
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64, ProfileError> {
        self.domain.check(r)?;
        let value = self.raw_value(r)?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ProfileError::NonFinite { x: r })
        }
    }

    pub fn jet(&self, r: f64) -> Result<Jet, ProfileError> {
        self.domain.check(r)?;
        let jet = self.raw_jet(r)?;
        if jet.value.is_finite() && jet.d1.is_finite() && jet.d2.is_finite() {
            Ok(jet)
        } else {
            Err(ProfileError::NonFinite { x: r })
        }
    }

    fn raw_value(&self, r: f64) -> Result<f64, ProfileError> {
        match &self.family {
            Family::Expression(e) => e.eval(r).map_err(|source| ProfileError::Eval { x: r, source }),
            Family::Rational { numer, denom } => {
                let q = poly_jet(denom, r).0;
                if q == 0.0 {
                    return Err(ProfileError::Eval { x: r, source: EvalError::DivisionByZero });
                }
                Ok(poly_jet(numer, r).0 / q)
            }
            Family::Composed { outer, inner } => outer.eval(inner.jet(r).value),
            _ => Ok(self.raw_jet(r)?.value),
        }
    }

    fn raw_jet(&self, r: f64) -> Result<Jet, ProfileError> {
        Ok(match &self.family {
            Family::Constant { value } => Jet::constant(*value),
            Family::PowerLaw { coeff, exponent } => power_law_jet(*coeff, *exponent, r),
            Family::Exponential { coeff, rate } => {
                let value = coeff * math::exp(rate * r);
                Jet { value, d1: rate * value, d2: rate * rate * value }
            }
            Family::Rational { numer, denom } => {
                let (p, dp, ddp) = poly_jet(numer, r);
                let (q, dq, ddq) = poly_jet(denom, r);
                if q == 0.0 {
                    return Err(ProfileError::Eval { x: r, source: EvalError::DivisionByZero });
                }
                let value = p / q;
                let d1 = (dp - value * dq) / q;
                let d2 = (ddp - value * ddq - 2.0 * d1 * dq) / q;
                Jet { value, d1, d2 }
            }
            Family::Composed { outer, inner } => {
                let u = inner.jet(r);
                let g = outer.jet(u.value)?;
                Jet {
                    value: g.value,
                    d1: g.d1 * u.d1,
                    d2: g.d2 * u.d1 * u.d1 + g.d1 * u.d2,
                }
            }
            Family::Expression(_) => self.richardson_jet(r)?,
        })
    }

    fn richardson_jet(&self, r: f64) -> Result<Jet, ProfileError> {
        // Keep every stencil point strictly inside the open domain.
        let room = (r - self.domain.lo).min(self.domain.hi - r);
        let h = derivative_step(r).min(0.5 * room);
        let f = |x: f64| self.raw_value(x);
        let f0 = f(r)?;
        let (fp, fm) = (f(r + h)?, f(r - h)?);
        let (fp2, fm2) = (f(r + 0.5 * h)?, f(r - 0.5 * h)?);
        let d1_h = (fp - fm) / (2.0 * h);
        let d1_h2 = (fp2 - fm2) / h;
        let d2_h = (fp - 2.0 * f0 + fm) / (h * h);
        let d2_h2 = (fp2 - 2.0 * f0 + fm2) / (0.25 * h * h);
        Ok(Jet {
            value: f0,
            d1: (4.0 * d1_h2 - d1_h) / 3.0,
            d2: (4.0 * d2_h2 - d2_h) / 3.0,
        })
    }
}

/// Strictly positive mass profile `m(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassProfile(Profile);

impl MassProfile {
    /// Wraps a profile as a mass. Positivity is checked at evaluation time and
    /// by [`validate_profile`], not here.
    pub fn new(profile: Profile) -> Self {
        Self(profile)
    }

    pub fn constant(value: f64) -> Result<Self, ProfileError> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(ProfileError::InvalidParameter("constant mass must be positive"));
        }
        Ok(Self(Profile::constant(value)))
    }

    /// `m(r) = ς·r^υ` on `(0, ∞)`.
    pub fn power_law(coeff: f64, exponent: f64) -> Result<Self, ProfileError> {
        if !(coeff > 0.0) || !coeff.is_finite() {
            return Err(ProfileError::InvalidParameter("power-law mass needs ς > 0"));
        }
        if !exponent.is_finite() {
            return Err(ProfileError::InvalidParameter("power-law exponent must be finite"));
        }
        Ok(Self(Profile::power_law(coeff, exponent)))
    }

    pub fn profile(&self) -> &Profile {
        &self.0
    }

    pub fn domain(&self) -> Domain {
        self.0.domain()
    }

    pub fn power_law_params(&self) -> Option<(f64, f64)> {
        self.0.power_law_params()
    }

    pub fn eval(&self, r: f64) -> Result<f64, ProfileError> {
        let value = self.0.eval(r)?;
        if value > 0.0 {
            Ok(value)
        } else {
            Err(ProfileError::NonPositiveMass { x: r, value })
        }
    }

    pub fn jet(&self, r: f64) -> Result<Jet, ProfileError> {
        let jet = self.0.jet(r)?;
        if jet.value > 0.0 {
            Ok(jet)
        } else {
            Err(ProfileError::NonPositiveMass { x: r, value: jet.value })
        }
    }

    /// True when the mass has no r-dependence.
    pub fn is_constant(&self) -> bool {
        matches!(self.0.family(), Family::Constant { .. })
            || matches!(self.0.family(), Family::PowerLaw { exponent, .. } if *exponent == 0.0)
    }
}

/// Potential profile `V(r)`; no sign constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile(Profile);

impl PotentialProfile {
    pub fn new(profile: Profile) -> Self {
        Self(profile)
    }

    pub fn zero() -> Self {
        Self(Profile::constant(0.0))
    }

    pub fn profile(&self) -> &Profile {
        &self.0
    }

    pub fn eval(&self, r: f64) -> Result<f64, ProfileError> {
        self.0.eval(r)
    }
}

/// Parses an expression as a profile over the whole line.
pub fn parse_profile(expr: &str, var: &str) -> Result<Profile, ProfileError> {
    Profile::parse(expr, var)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    /// Sample points where `m(r) ≤ 0`.
    pub positivity_violations: Vec<f64>,
    /// Sample points where evaluation failed, with the message.
    pub evaluation_failures: Vec<(f64, String)>,
    /// `max |m'(r) − (m(r+h) − m(r−h))/(2h)|` over the sample, `h = 1e-4·max(1, |r|)`.
    pub max_derivative_residual: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.positivity_violations.is_empty() && self.evaluation_failures.is_empty()
    }
}

/// Samples a mass profile on `samples` evenly spaced interior points of the
/// open `window` and reports positivity and derivative consistency.
pub fn validate_profile(mass: &MassProfile, window: (f64, f64), samples: usize) -> ValidationReport {
    use alloc::string::ToString;

    let samples = samples.max(3);
    let (lo, hi) = window;
    let step = (hi - lo) / (samples + 1) as f64;
    let profile = mass.profile();
    let mut report = ValidationReport {
        samples,
        positivity_violations: Vec::new(),
        evaluation_failures: Vec::new(),
        max_derivative_residual: 0.0,
    };
    for i in 0..samples {
        let r = lo + (i + 1) as f64 * step;
        let jet = match profile.jet(r) {
            Ok(jet) => jet,
            Err(e) => {
                report.evaluation_failures.push((r, e.to_string()));
                continue;
            }
        };
        if jet.value <= 0.0 {
            report.positivity_violations.push(r);
        }
        let h = 1e-4 * r.abs().max(1.0);
        if let (Ok(up), Ok(down)) = (profile.eval(r + h), profile.eval(r - h)) {
            let fd = (up - down) / (2.0 * h);
            report.max_derivative_residual = report.max_derivative_residual.max((jet.d1 - fd).abs());
        }
    }
    report
}
