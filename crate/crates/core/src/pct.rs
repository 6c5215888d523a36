//! Point canonical transformation onto a constant-mass reference problem.
//!
//! With `Z' = √m` and `R = m^{1/4} φ(Z)` the radial PDM equation becomes
//! `−φ'' + W φ = E φ` (see [`crate::radial`]). For a power-law mass
//! `m = ς r^υ` the centrifugal part of `W` is an inverse square in `Z`, so a
//! constant-mass reference with angular index `λ` predicts the spectrum.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::grid::{GridError, GridFunction};
use crate::math;
use crate::profiles::{CoordinateMap, Domain, Family, MassProfile, PotentialProfile, Profile, ProfileError};
use crate::quadrature;
use crate::radial::{Angular, AngularIndex, RadialError, RadialProblem, ZGrid};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PctError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("υ = −2 has no λ; use the inverse-square special case")]
    InverseSquareMass,
    #[error("complex effective angular momentum: radicand {radicand} < 0, mapping inapplicable")]
    ComplexLambda { radicand: f64 },
    #[error("mass is not a power law ς·r^υ")]
    NotPowerLaw,
    #[error("mass is not ς·r^(-2)")]
    NotInverseSquare,
    #[error("{x} is outside the mapping domain [{lo}, {hi}]")]
    OutsideMapping { x: f64, lo: f64, hi: f64 },
    #[error("coordinate map is not strictly increasing near r = {at}")]
    NonMonotone { at: f64 },
    #[error("invalid reference model: {0}")]
    InvalidReference(String),
    #[error("prediction needs an s-state (ℓ_d = 0 or −1), got ℓ_d = {0}")]
    NotSState(f64),
    #[error("radial setup: {0}")]
    Radial(Box<RadialError>),
}

impl From<RadialError> for PctError {
    fn from(e: RadialError) -> Self {
        PctError::Radial(Box::new(e))
    }
}

const TABLE_PANELS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
enum MapKind {
    /// `Z = 2√ς r^{(υ+2)/2} / (υ+2)`, so `Z(0⁺) = 0` for `υ > −2`.
    PowerLaw { coeff: f64, exponent: f64 },
    /// `Z = √ς ln r`, so `Z(1) = 0`.
    Log { root: f64 },
    /// Cumulative `∫_{r_0} √m` at the table nodes, `Z(r_0) = 0`.
    Numeric { mass: MassProfile, r: Vec<f64>, z: Vec<f64> },
}

/// The coordinate map `Z(r)` with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct PctMapping {
    kind: MapKind,
    r_lo: f64,
    r_hi: f64,
}

impl PctMapping {
    /// Closed-form map for `m = ς r^υ`.
    pub fn power_law(coeff: f64, exponent: f64) -> Result<Self, PctError> {
        if !(coeff > 0.0) || !exponent.is_finite() {
            return Err(PctError::Profile(ProfileError::InvalidParameter("power-law mass needs ς > 0")));
        }
        let kind = if exponent == -2.0 {
            MapKind::Log { root: math::sqrt(coeff) }
        } else {
            MapKind::PowerLaw { coeff: 2.0 * math::sqrt(coeff) / (exponent + 2.0), exponent: 0.5 * (exponent + 2.0) }
        };
        Ok(Self { kind, r_lo: 0.0, r_hi: f64::INFINITY })
    }

    /// Tabulated map for an arbitrary positive mass on `[r_lo, r_hi]`.
    pub fn numeric(mass: &MassProfile, r_lo: f64, r_hi: f64) -> Result<Self, PctError> {
        if !(r_hi > r_lo) {
            return Err(PctError::OutsideMapping { x: r_hi, lo: r_lo, hi: r_hi });
        }
        let geometric = r_lo > 0.0 && r_hi / r_lo > 4.0;
        let r: Vec<f64> = (0..=TABLE_PANELS)
            .map(|i| {
                let t = i as f64 / TABLE_PANELS as f64;
                if i == TABLE_PANELS {
                    r_hi
                } else if geometric {
                    r_lo * math::exp(t * math::ln(r_hi / r_lo))
                } else {
                    r_lo + t * (r_hi - r_lo)
                }
            })
            .collect();
        let root_mass = |x: f64| mass.eval(x).map(math::sqrt);
        let mut z = Vec::with_capacity(r.len());
        z.push(0.0);
        for k in 0..TABLE_PANELS {
            let panel = quadrature::integrate(&root_mass, r[k], r[k + 1], 1e-15, 1e-13)?;
            if !(panel > 0.0) {
                return Err(PctError::NonMonotone { at: r[k] });
            }
            z.push(z[k] + panel);
        }
        Ok(Self { kind: MapKind::Numeric { mass: mass.clone(), r, z }, r_lo, r_hi })
    }

    pub fn closed_form(&self) -> bool {
        !matches!(self.kind, MapKind::Numeric { .. })
    }

    /// `[r_lo, r_hi]` on which the map is defined.
    pub fn r_domain(&self) -> (f64, f64) {
        (self.r_lo, self.r_hi)
    }

    pub fn z_domain(&self) -> (f64, f64) {
        match &self.kind {
            MapKind::PowerLaw { coeff, .. } if *coeff < 0.0 => (f64::NEG_INFINITY, 0.0),
            MapKind::PowerLaw { .. } => (0.0, f64::INFINITY),
            MapKind::Log { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            MapKind::Numeric { z, .. } => (0.0, z[z.len() - 1]),
        }
    }

    fn check_r(&self, r: f64) -> Result<(), PctError> {
        let slack = 1e-12 * self.r_hi.abs().min(1e300);
        if r > 0.0 && r >= self.r_lo - slack && r <= self.r_hi + slack {
            Ok(())
        } else {
            Err(PctError::OutsideMapping { x: r, lo: self.r_lo, hi: self.r_hi })
        }
    }

    pub fn forward(&self, r: f64) -> Result<f64, PctError> {
        self.check_r(r)?;
        Ok(match &self.kind {
            MapKind::PowerLaw { coeff, exponent } => coeff * math::powf(r, *exponent),
            MapKind::Log { root } => root * math::ln(r),
            MapKind::Numeric { mass, r: nodes, z } => {
                let r = r.clamp(self.r_lo, self.r_hi);
                let k = panel_index(nodes, r);
                let root_mass = |x: f64| mass.eval(x).map(math::sqrt);
                z[k] + quadrature::integrate(&root_mass, nodes[k], r, 1e-15, 1e-13)?
            }
        })
    }

    /// `dZ/dr = √m(r)`.
    pub fn jacobian(&self, r: f64) -> Result<f64, PctError> {
        self.check_r(r)?;
        Ok(match &self.kind {
            MapKind::PowerLaw { coeff, exponent } => coeff * exponent * math::powf(r, exponent - 1.0),
            MapKind::Log { root } => root / r,
            MapKind::Numeric { mass, .. } => math::sqrt(mass.eval(r)?),
        })
    }

    pub fn inverse(&self, z: f64) -> Result<f64, PctError> {
        let (z_lo, z_hi) = self.z_domain();
        let slack = 1e-12 * z_lo.abs().max(z_hi.abs()).clamp(1.0, 1e300);
        if !(z >= z_lo - slack && z <= z_hi + slack) || !z.is_finite() {
            return Err(PctError::OutsideMapping { x: z, lo: z_lo, hi: z_hi });
        }
        match &self.kind {
            MapKind::PowerLaw { coeff, exponent } => Ok(math::powf((z / coeff).max(0.0), 1.0 / exponent)),
            MapKind::Log { root } => Ok(math::exp(z / root)),
            MapKind::Numeric { r: nodes, z: table, .. } => {
                let z = z.clamp(z_lo, z_hi);
                let k = panel_index(table, z);
                let (mut a, mut b) = (nodes[k], nodes[k + 1]);
                let t = (z - table[k]) / (table[k + 1] - table[k]);
                let mut r = a + t * (b - a);
                for _ in 0..100 {
                    let residual = self.forward(r)? - z;
                    if residual > 0.0 {
                        b = r;
                    } else {
                        a = r;
                    }
                    let newton = r - residual / self.jacobian(r)?;
                    let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
                    let done = (next - r).abs() <= 1e-15 * r.abs() || b - a <= 1e-15 * b.abs();
                    r = next;
                    if done {
                        break;
                    }
                }
                Ok(r)
            }
        }
    }
}

fn panel_index(nodes: &[f64], x: f64) -> usize {
    nodes.partition_point(|&n| n <= x).clamp(1, nodes.len() - 1) - 1
}

/// Closed form for power-law masses, numeric table on `[r_min, r_max]` otherwise.
pub fn build_mapping(m: &MassProfile, r_min: f64, r_max: f64) -> Result<PctMapping, PctError> {
    match m.power_law_params() {
        Some((coeff, exponent)) => {
            let mut map = PctMapping::power_law(coeff, exponent)?;
            if map.z_domain().1 == 0.0 {
                // υ < −2: keep the finite window so the FD grid stays bounded.
                map.r_lo = r_min;
                map.r_hi = r_max;
            }
            Ok(map)
        }
        None => PctMapping::numeric(m, r_min, r_max),
    }
}

/// `U_d = (d−1) m' / (2 r m²)`
pub fn u_d(m: &MassProfile, r: f64, d: u32) -> Result<f64, PctError> {
    let jet = m.jet(r)?;
    Ok(f64::from(d.saturating_sub(1)) * jet.d1 / (2.0 * r * jet.value * jet.value))
}

/// `(υ/2+1)² + 4ℓ_d(ℓ_d+1) + 2υ(1−d)`
pub fn lambda_radicand(upsilon: f64, ell_d: f64, d: u32) -> f64 {
    let half = 0.5 * upsilon + 1.0;
    half * half + 4.0 * ell_d * (ell_d + 1.0) + 2.0 * upsilon * (1.0 - f64::from(d))
}

/// `λ = −1/2 + √radicand / |υ+2|`
pub fn lambda_eff(upsilon: f64, ell_d: f64, d: u32) -> Result<f64, PctError> {
    if upsilon == -2.0 {
        return Err(PctError::InverseSquareMass);
    }
    let radicand = lambda_radicand(upsilon, ell_d, d);
    if radicand < 0.0 {
        return Err(PctError::ComplexLambda { radicand });
    }
    Ok(-0.5 + math::sqrt(radicand) / (upsilon + 2.0).abs())
}

fn radicand_exact(upsilon: Rational, ell_d: Rational, d: u32) -> Rational {
    let one = Rational::from_integer(1);
    let two = Rational::from_integer(2);
    let half = upsilon / two + one;
    half * half + Rational::from_integer(4) * ell_d * (ell_d + one) + two * upsilon * (one - Rational::from(i128::from(d)))
}

/// `λ(λ+1)` in exact arithmetic: `radicand/(υ+2)² − 1/4`, defined even when
/// `λ` itself is irrational.
pub fn lambda_product_exact(upsilon: Rational, ell_d: Rational, d: u32) -> Result<Rational, PctError> {
    let shifted = upsilon + Rational::from_integer(2);
    if shifted == Rational::from_integer(0) {
        return Err(PctError::InverseSquareMass);
    }
    let radicand = radicand_exact(upsilon, ell_d, d);
    if radicand < Rational::from_integer(0) {
        return Err(PctError::ComplexLambda { radicand: rational::to_f64(&radicand) });
    }
    Ok(radicand / (shifted * shifted) - Rational::new(1, 4))
}

/// `λ` exactly when the radicand is a perfect rational square.
pub fn lambda_eff_exact(upsilon: Rational, ell_d: Rational, d: u32) -> Result<Option<Rational>, PctError> {
    lambda_product_exact(upsilon, ell_d, d)?;
    let root = rational::exact_sqrt(&radicand_exact(upsilon, ell_d, d));
    let shifted = upsilon + Rational::from_integer(2);
    let abs = if shifted < Rational::from_integer(0) { -shifted } else { shifted };
    Ok(root.map(|s| s / abs - Rational::new(1, 2)))
}

/// Constant-mass reference problems.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceModel {
    /// `V(Z) = k Z²`, `ε = √k (4n_r + 2L + 3)`
    Oscillator { k: f64 },
    /// `V(Z) = −e²/Z`, `ε = −e⁴ / (4(n_r + L + 1)²)`
    Coulomb { e2: f64 },
    /// Arbitrary `V(Z)` solved by finite differences on `(z_min, z_max)`.
    CustomNumeric { potential: Profile, z_min: f64, z_max: f64, grid_n: usize },
}

impl ReferenceModel {
    /// Parses `oscillator:k=1` or `coulomb:e2=2`.
    pub fn from_spec(text: &str) -> Result<Self, PctError> {
        let bad = || PctError::InvalidReference(format!("expected oscillator:k=<v> or coulomb:e2=<v>, got '{text}'"));
        let (family, args) = text.trim().split_once(':').ok_or_else(bad)?;
        let (key, value) = args.split_once('=').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        match (family.trim(), key.trim()) {
            ("oscillator", "k") if value > 0.0 => Ok(Self::Oscillator { k: value }),
            ("coulomb", "e2") if value > 0.0 => Ok(Self::Coulomb { e2: value }),
            _ => Err(bad()),
        }
    }

    /// Reference potential `V(Z)` for `Z > 0`.
    pub fn potential(&self, z: f64) -> Result<f64, PctError> {
        match self {
            Self::Oscillator { k } => Ok(k * z * z),
            Self::Coulomb { e2 } => Ok(-e2 / z),
            Self::CustomNumeric { potential, .. } => Ok(potential.eval(z)?),
        }
    }

    /// `ε(n_r, L)` on the half line with angular index `L`.
    pub fn eigenvalue(&self, n_r: usize, l: f64) -> Result<f64, PctError> {
        let n = n_r as f64;
        match self {
            Self::Oscillator { k } => Ok(math::sqrt(*k) * (4.0 * n + 2.0 * l + 3.0)),
            Self::Coulomb { e2 } => {
                let principal = n + l + 1.0;
                Ok(-e2 * e2 / (4.0 * principal * principal))
            }
            Self::CustomNumeric { potential, z_min, z_max, grid_n } => {
                let centrifugal = l * (l + 1.0);
                let w = |z: f64| -> Result<f64, PctError> { Ok(centrifugal / (z * z) + potential.eval(z)?) };
                let even = l == -1.0;
                let levels = fd_levels(&w, *z_min, *z_max, *grid_n, even, n_r)?;
                levels.get(n_r).copied().ok_or_else(|| {
                    PctError::InvalidReference(format!("reference has no level n_r = {n_r} in its window"))
                })
            }
        }
    }

    /// Levels of the same potential on the whole line (oscillator only).
    pub fn full_line_eigenvalue(&self, n: usize) -> Result<f64, PctError> {
        match self {
            Self::Oscillator { k } => Ok(math::sqrt(*k) * (2.0 * n as f64 + 1.0)),
            _ => Err(PctError::InvalidReference("only the oscillator has a closed full-line spectrum".into())),
        }
    }

    fn label(&self) -> String {
        match self {
            Self::Oscillator { k } => format!("oscillator:k={k}"),
            Self::Coulomb { e2 } => format!("coulomb:e2={e2}"),
            Self::CustomNumeric { .. } => "custom_numeric".into(),
        }
    }
}

/// Lowest `count + 1` eigenvalues of `−d²/dZ² + w` with Dirichlet ends (or a
/// zero-slope left end).
fn fd_levels<F>(w: &F, z_lo: f64, z_hi: f64, n: usize, zero_slope_left: bool, count: usize) -> Result<Vec<f64>, PctError>
where
    F: Fn(f64) -> Result<f64, PctError>,
{
    let grid = ZGrid::new(z_lo, z_hi, n, zero_slope_left);
    let values = grid.z.iter().map(|&z| w(z)).collect::<Result<Vec<_>, _>>()?;
    let matrix = grid.operator(&values);
    Ok(matrix.lowest((count + 1).min(matrix.len()), 1e-12))
}

/// A target problem built from a reference model.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPrediction {
    /// `V(r) = V_ref(|Z(r)|)`
    pub potential: PotentialProfile,
    pub lambda: f64,
    /// Angular index fed to the reference spectrum.
    pub reference_l: f64,
    pub predicted: Vec<f64>,
    pub mapping: PctMapping,
    pub reference: String,
}

/// Builds `V(r) = V_ref(Z(r))` for a power-law mass and predicts
/// `E(n_r) = ε(n_r, λ)`. The prediction holds for the `mm` ordering.
pub fn map_reference_to_target(
    reference: &ReferenceModel,
    m: &MassProfile,
    d: u32,
    angular: Angular,
    n_max: usize,
) -> Result<TargetPrediction, PctError> {
    let (coeff, upsilon) = m.power_law_params().ok_or(PctError::NotPowerLaw)?;
    let ell_d = angular_index(d, angular)?;
    let lambda = lambda_eff(upsilon, ell_d.value(), d)?;
    // Even parity in one dimension takes the other root of λ(λ+1).
    let reference_l = if d == 1 && angular == Angular::Parity(crate::radial::Parity::Even) { -1.0 - lambda } else { lambda };
    let shifted = upsilon + 2.0;
    let z_coeff = 2.0 * math::sqrt(coeff) / shifted.abs();
    let potential = match reference {
        ReferenceModel::Oscillator { k } => Profile::power_law(k * z_coeff * z_coeff, shifted),
        ReferenceModel::Coulomb { e2 } => Profile::power_law(-e2 / z_coeff, -0.5 * shifted),
        ReferenceModel::CustomNumeric { potential, .. } => Profile::composed(
            potential.clone(),
            CoordinateMap::PowerLaw { coeff: z_coeff, exponent: 0.5 * shifted },
            Domain::POSITIVE,
        ),
    };
    let predicted = (0..=n_max).map(|n| reference.eigenvalue(n, reference_l)).collect::<Result<Vec<_>, _>>()?;
    Ok(TargetPrediction {
        potential: PotentialProfile::new(potential),
        lambda,
        reference_l,
        predicted,
        mapping: PctMapping::power_law(coeff, upsilon)?,
        reference: reference.label(),
    })
}

fn angular_index(d: u32, angular: Angular) -> Result<AngularIndex, PctError> {
    let probe = RadialProblem::new(d, angular, MassProfile::constant(1.0)?, PotentialProfile::zero(), 1.0);
    Ok(probe.ell_d()?)
}

/// The `m = ς r^{−2}` case, where every mass term is a constant shift.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSquareCase {
    /// `Ũ_d = [ℓ_d(ℓ_d+1) + d − 1] / ς`
    pub shift: f64,
    pub shift_exact: Option<Rational>,
    pub ell_d: AngularIndex,
    /// Reference potential on the whole `Z` line, `V(exp(Z/√ς))`.
    pub reference_potential: Profile,
    pub mapping: PctMapping,
}

impl InverseSquareCase {
    pub fn is_s_state(&self) -> bool {
        matches!(self.ell_d.twice(), 0 | -2)
    }

    /// `E = ε + Ũ_d` with `ε` from `reference` on the whole line, or from a
    /// finite-difference solve of the reference potential on `window` in `Z`.
    pub fn predict(&self, reference: Option<&ReferenceModel>, n_max: usize, window: (f64, f64), grid_n: usize) -> Result<Vec<f64>, PctError> {
        if !self.is_s_state() {
            return Err(PctError::NotSState(self.ell_d.value()));
        }
        let epsilon = match reference {
            Some(model) => (0..=n_max).map(|n| model.full_line_eigenvalue(n)).collect::<Result<Vec<_>, _>>()?,
            None => {
                let w = |z: f64| -> Result<f64, PctError> { Ok(self.reference_potential.eval(z)?) };
                fd_levels(&w, window.0, window.1, grid_n, false, n_max)?
            }
        };
        Ok(epsilon.into_iter().map(|e| e + self.shift).collect())
    }
}

/// Splits off the constant shift for `m = ς r^{−2}`; the remaining problem is
/// one-dimensional in `Z = √ς ln r` with potential `V(r(Z))`.
pub fn special_case_inverse_square(
    m: &MassProfile,
    v: &PotentialProfile,
    d: u32,
    angular: Angular,
) -> Result<InverseSquareCase, PctError> {
    let coeff = match m.power_law_params() {
        Some((coeff, -2.0)) => coeff,
        _ => return Err(PctError::NotInverseSquare),
    };
    let ell_d = angular_index(d, angular)?;
    let shift = (ell_d.centrifugal() + f64::from(d - 1)) / coeff;
    let shift_exact = rational::parse_exact(&format!("{coeff}")).map(|c| {
        let l = ell_d.to_rational();
        (l * (l + Rational::from_integer(1)) + Rational::from(i128::from(d - 1))) / c
    });
    let reference_potential = match v.profile().family() {
        Family::Constant { value } => Profile::constant(*value).with_domain(Domain::REAL_LINE),
        _ => Profile::composed(v.profile().clone(), CoordinateMap::Exp { rate: 1.0 / math::sqrt(coeff) }, Domain::REAL_LINE),
    };
    Ok(InverseSquareCase { shift, shift_exact, ell_d, reference_potential, mapping: PctMapping::power_law(coeff, -2.0)? })
}

/// `R(r) = m(r)^{1/4} φ(Z(r))` on the pulled-back points `r_i = r(Z_i)`.
pub fn wavefunction_pullback(map: &PctMapping, m: &MassProfile, phi: &GridFunction) -> Result<GridFunction, PctError> {
    let mut points = Vec::with_capacity(phi.len());
    let mut values = Vec::with_capacity(phi.len());
    for (&z, &value) in phi.points().iter().zip(phi.values()) {
        let r = map.inverse(z)?;
        points.push(r);
        values.push(value * math::sqrt(math::sqrt(m.eval(r)?)));
    }
    Ok(GridFunction::new(points, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{self, Parity};
    use crate::rational::ratio;

    #[test]
    fn closed_form_maps() {
        let sq = PctMapping::power_law(1.0, 2.0).unwrap();
        assert!(sq.closed_form());
        assert!((sq.forward(2.0).unwrap() - 2.0).abs() < 1e-15);
        let log = PctMapping::power_law(1.0, -2.0).unwrap();
        assert!((log.forward(core::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(log.z_domain(), (f64::NEG_INFINITY, f64::INFINITY));
        let unit = PctMapping::power_law(1.0, 0.0).unwrap();
        assert!((unit.forward(3.25).unwrap() - 3.25).abs() < 1e-15);
        for map in [sq, log, unit, PctMapping::power_law(2.0, -3.0).unwrap()] {
            for &r in &[0.01, 0.5, 1.0, 3.0, 40.0] {
                let back = map.inverse(map.forward(r).unwrap()).unwrap();
                assert!((back - r).abs() <= 1e-10 * r, "{map:?} at {r}");
                let h = 1e-6 * r;
                let slope = (map.forward(r + h).unwrap() - map.forward(r - h).unwrap()) / (2.0 * h);
                assert!((slope - map.jacobian(r).unwrap()).abs() <= 1e-6 * slope.abs());
            }
        }
    }

    #[test]
    fn centrifugal_correspondence() {
        for &(coeff, upsilon) in &[(1.0, 2.0), (0.5, 1.0), (3.0, -1.5), (2.0, -3.0)] {
            let map = PctMapping::power_law(coeff, upsilon).unwrap();
            for &r in &[0.2, 1.0, 5.0] {
                let z = map.forward(r).unwrap();
                let lhs = r * r * coeff * math::powf(r, upsilon);
                let rhs = (upsilon + 2.0) * (upsilon + 2.0) * z * z / 4.0;
                assert!((lhs - rhs).abs() <= 1e-12 * lhs);
            }
        }
    }

    #[test]
    fn numeric_map_matches_closed_form() {
        let expr = MassProfile::new(Profile::parse("r^2", "r").unwrap().with_domain(Domain::POSITIVE));
        let map = build_mapping(&expr, 0.01, 10.0).unwrap();
        assert!(!map.closed_form());
        let offset = 0.01f64 * 0.01 / 2.0;
        for &r in &[0.01, 0.3, 1.0, 2.0, 7.5, 10.0] {
            let z = map.forward(r).unwrap();
            assert!((z - (r * r / 2.0 - offset)).abs() < 1e-10, "{r}");
            assert!((map.inverse(z).unwrap() - r).abs() <= 1e-10 * r);
        }
        assert!(map.forward(11.0).is_err());
        let unit = MassProfile::new(Profile::parse("1", "r").unwrap());
        let map = build_mapping(&unit, 0.5, 3.0).unwrap();
        assert!((map.forward(2.0).unwrap() - 1.5).abs() < 1e-13);
    }

    #[test]
    fn effective_shift() {
        let sq = MassProfile::power_law(1.0, 2.0).unwrap();
        assert!((u_d(&sq, 1.0, 3).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(u_d(&sq, 1.7, 1).unwrap(), 0.0);
        assert_eq!(u_d(&MassProfile::constant(2.0).unwrap(), 1.0, 4).unwrap(), 0.0);
        // υ(d−1)/(2 r² m) for power laws
        for &r in &[0.3, 2.0] {
            let expected = 2.0 * 2.0 / (2.0 * r * r * r * r);
            assert!((u_d(&sq, r, 3).unwrap() - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn lambda_values() {
        for twice in 0..=10 {
            let l = twice as f64 / 2.0;
            assert_eq!(lambda_eff(0.0, l, 3).unwrap(), l);
        }
        assert_eq!(lambda_eff(2.0, 1.0, 3).unwrap(), 0.0);
        assert!(matches!(lambda_eff(2.0, 0.0, 3), Err(PctError::ComplexLambda { .. })));
        assert!(matches!(lambda_eff(-2.0, 0.0, 3), Err(PctError::InverseSquareMass)));
        assert_eq!(lambda_eff(2.0, 0.0, 7).unwrap_err(), lambda_eff(2.0, 0.0, 7).unwrap_err());
        assert_eq!(lambda_eff(2.0, 2.0, 7).unwrap(), 0.0);
    }

    #[test]
    fn lambda_exact_identity() {
        for upsilon in [ratio(-7, 2), ratio(-1, 1), ratio(1, 3), ratio(2, 1), ratio(5, 2)] {
            for twice_l in -2..=8 {
                for d in 1..=6u32 {
                    let ell = ratio(twice_l, 2);
                    let Ok(product) = lambda_product_exact(upsilon, ell, d) else { continue };
                    let half = upsilon / ratio(2, 1) + ratio(1, 1);
                    let rhs = ell * (ell + ratio(1, 1)) - upsilon * ratio(i128::from(d) - 1, 2);
                    assert_eq!(product * half * half, rhs);
                }
            }
        }
        assert_eq!(lambda_eff_exact(ratio(2, 1), ratio(1, 1), 3).unwrap(), Some(ratio(0, 1)));
        assert_eq!(lambda_eff_exact(ratio(0, 1), ratio(5, 2), 4).unwrap(), Some(ratio(5, 2)));
    }

    #[test]
    fn reference_specs() {
        assert_eq!(ReferenceModel::from_spec("oscillator:k=1").unwrap(), ReferenceModel::Oscillator { k: 1.0 });
        assert_eq!(ReferenceModel::from_spec("coulomb:e2=2").unwrap(), ReferenceModel::Coulomb { e2: 2.0 });
        assert!(ReferenceModel::from_spec("morse:a=1").is_err());
        assert!(ReferenceModel::from_spec("oscillator:k=-1").is_err());
        let coulomb = ReferenceModel::Coulomb { e2: 2.0 };
        assert_eq!(coulomb.eigenvalue(0, 0.0).unwrap(), -1.0);
        assert_eq!(coulomb.eigenvalue(1, 0.0).unwrap(), -0.25);
    }

    #[test]
    fn custom_reference_reproduces_oscillator() {
        let custom = ReferenceModel::CustomNumeric {
            potential: Profile::parse("z^2", "z").unwrap(),
            z_min: 1e-6,
            z_max: 8.0,
            grid_n: 2000,
        };
        for n in 0..3 {
            let e = custom.eigenvalue(n, 1.0).unwrap();
            assert!((e - (4.0 * n as f64 + 5.0)).abs() < 2e-3, "{e}");
        }
    }

    #[test]
    fn target_potentials() {
        let sq = MassProfile::power_law(1.0, 2.0).unwrap();
        let osc = ReferenceModel::Oscillator { k: 1.0 };
        let target = map_reference_to_target(&osc, &sq, 3, Angular::Ell(1), 3).unwrap();
        assert_eq!(target.lambda, 0.0);
        assert_eq!(target.predicted, [3.0, 7.0, 11.0, 15.0]);
        for &r in &[0.5, 1.0, 2.0] {
            assert!((target.potential.eval(r).unwrap() - r.powi(4) / 4.0).abs() < 1e-12);
        }
        let unit = MassProfile::constant(1.0).unwrap();
        let flat = map_reference_to_target(&ReferenceModel::Oscillator { k: 4.0 }, &unit, 3, Angular::Ell(2), 1).unwrap();
        assert_eq!(flat.predicted, [2.0 * 7.0, 2.0 * 11.0]);
        assert!((flat.potential.eval(1.5).unwrap() - 4.0 * 2.25).abs() < 1e-12);
        let coulomb = map_reference_to_target(&ReferenceModel::Coulomb { e2: 2.0 }, &unit, 3, Angular::Ell(0), 0).unwrap();
        assert_eq!(coulomb.predicted, [-1.0]);
        assert!((coulomb.potential.eval(2.0).unwrap() + 1.0).abs() < 1e-15);
        let even = map_reference_to_target(&osc, &unit, 1, Angular::Parity(Parity::Even), 1).unwrap();
        assert_eq!(even.predicted, [1.0, 5.0]);
        assert!(map_reference_to_target(&osc, &sq, 3, Angular::Ell(0), 1).is_err());
        assert!(matches!(
            map_reference_to_target(&osc, &MassProfile::power_law(1.0, -2.0).unwrap(), 3, Angular::Ell(0), 1),
            Err(PctError::InverseSquareMass)
        ));
    }

    #[test]
    fn prediction_matches_solvers() {
        let sq = MassProfile::power_law(1.0, 2.0).unwrap();
        let target = map_reference_to_target(&ReferenceModel::Oscillator { k: 1.0 }, &sq, 3, Angular::Ell(1), 2).unwrap();
        let p = RadialProblem::new(3, Angular::Ell(1), sq, target.potential.clone(), 5.0);
        let fd = radial::solve_fd_z(&p, 2).unwrap();
        for (e, predicted) in fd.energies().iter().zip(&target.predicted) {
            assert!((e - predicted).abs() / predicted < 5e-3, "{e} vs {predicted}");
        }
    }

    #[test]
    fn inverse_square_shift() {
        let m = MassProfile::power_law(1.0, -2.0).unwrap();
        let v = PotentialProfile::new(Profile::parse("ln(r)^2", "r").unwrap());
        let case = special_case_inverse_square(&m, &v, 3, Angular::Ell(0)).unwrap();
        assert_eq!(case.shift, 2.0);
        assert_eq!(case.shift_exact, Some(ratio(2, 1)));
        assert!((case.reference_potential.eval(1.5).unwrap() - 2.25).abs() < 1e-12);
        let analytic = case.predict(Some(&ReferenceModel::Oscillator { k: 1.0 }), 2, (0.0, 0.0), 0).unwrap();
        assert_eq!(analytic, [3.0, 5.0, 7.0]);
        let numeric = case.predict(None, 2, (-8.0, 8.0), 2000).unwrap();
        for (a, b) in analytic.iter().zip(&numeric) {
            assert!((a - b).abs() < 1e-3);
        }
        for parity in [Parity::Even, Parity::Odd] {
            assert_eq!(special_case_inverse_square(&m, &v, 1, Angular::Parity(parity)).unwrap().shift, 0.0);
        }
        let excited = special_case_inverse_square(&m, &v, 3, Angular::Ell(2)).unwrap();
        assert_eq!(excited.shift, 8.0);
        assert!(matches!(excited.predict(None, 1, (-8.0, 8.0), 200), Err(PctError::NotSState(_))));
        assert!(special_case_inverse_square(&MassProfile::power_law(1.0, 2.0).unwrap(), &v, 3, Angular::Ell(0)).is_err());
    }

    #[test]
    fn pullback_preserves_norm_and_nodes() {
        let m = MassProfile::power_law(1.0, 2.0).unwrap();
        let map = build_mapping(&m, 1e-6, 10.0).unwrap();
        let mut phi = GridFunction::sample_real(1e-9, 12.0, 20001, |z| z * math::exp(-0.5 * (z - 3.0) * (z - 3.0)) * (z - 2.0)).unwrap();
        phi.scale(1.0 / math::sqrt(phi.norm_sq()));
        let radial = wavefunction_pullback(&map, &m, &phi).unwrap();
        assert!((radial.norm_sq() - 1.0).abs() < 1e-6, "{}", radial.norm_sq());
        assert_eq!(radial.sign_changes(), phi.sign_changes());
        let unit = MassProfile::constant(1.0).unwrap();
        let same = wavefunction_pullback(&PctMapping::power_law(1.0, 0.0).unwrap(), &unit, &phi).unwrap();
        assert_eq!(same, phi);
    }
}
