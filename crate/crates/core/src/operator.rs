//! Discrete PDM pseudo-momentum `Π = −i(F∂ + F'/2)`, `F = 1/√m`, and the
//! kinetic operators it is compared against.
//!
//! All derivatives of grid functions are second-order finite differences:
//! central in the interior, one-sided at the two end points. Derivatives of
//! the mass come from the profile.
//!
//! [`apply_pi`] uses the split form `Π = −i·√F·∂(√F·ψ)`, which equals
//! `−i(Fψ' + Gψ)` with `G = F'/2` in the continuum and is an exactly
//! Hermitian matrix on functions that vanish at the ends.
//! [`apply_pi_expanded`] is the literal `−i(Fψ' + Gψ)` stencil; its
//! Hermiticity defect is `O(h²)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::grid::{GridError, GridFunction};
use crate::math;
use crate::ordering::{kinetic_coefficients, mass_term, OrderingParameters};
use crate::profiles::{MassProfile, PotentialProfile, ProfileError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

const MIN_POINTS: usize = 5;
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn uniform_spacing(psi: &GridFunction) -> Result<f64, GridError> {
    if psi.len() < MIN_POINTS {
        return Err(GridError::TooFewPoints { min: MIN_POINTS, got: psi.len() });
    }
    psi.spacing().ok_or(GridError::NonUniform)
}

/// First derivative, central inside and second-order one-sided at the ends.
pub fn first_derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h));
    for i in 1..n - 1 {
        out.push((values[i + 1] - values[i - 1]) / (2.0 * h));
    }
    out.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h));
    out
}

/// Second derivative, central inside and second-order one-sided at the ends.
pub fn second_derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let h2 = h * h;
    let mut out = Vec::with_capacity(n);
    out.push((2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / h2);
    for i in 1..n - 1 {
        out.push((values[i + 1] - 2.0 * values[i] + values[i - 1]) / h2);
    }
    out.push((2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) / h2);
    out
}

/// `F = +1/√m` and `G = F'/2` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPair {
    pub points: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

pub fn scaling_pair(m: &MassProfile, points: &[f64]) -> Result<ScalingPair, OperatorError> {
    let mut f = Vec::with_capacity(points.len());
    let mut g = Vec::with_capacity(points.len());
    for &x in points {
        let jet = m.jet(x)?;
        let root = math::sqrt(jet.value);
        f.push(1.0 / root);
        // F' = −m'/(2 m^{3/2})
        g.push(-jet.d1 / (4.0 * jet.value * root));
    }
    Ok(ScalingPair { points: points.to_vec(), f, g })
}

impl ScalingPair {
    fn check(&self, psi: &GridFunction) -> Result<f64, GridError> {
        let h = uniform_spacing(psi)?;
        let matches = self.points.len() == psi.len()
            && self.points.iter().zip(psi.points()).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        if matches {
            Ok(h)
        } else {
            Err(GridError::Mismatch)
        }
    }
}

/// `Πψ = −i·√F·∂(√F·ψ)`.
pub fn apply_pi(sp: &ScalingPair, psi: &GridFunction) -> Result<GridFunction, OperatorError> {
    let h = sp.check(psi)?;
    let roots: Vec<f64> = sp.f.iter().map(|&f| math::sqrt(f)).collect();
    let scaled: Vec<Complex64> = psi.values().iter().zip(&roots).map(|(v, s)| v * s).collect();
    let d = first_derivative(&scaled, h);
    let out = d.iter().zip(&roots).map(|(dv, s)| -I * dv * s).collect();
    Ok(psi.with_values(out)?)
}

/// `Πψ = −i(Fψ' + Gψ)` with the literal expanded stencil.
pub fn apply_pi_expanded(sp: &ScalingPair, psi: &GridFunction) -> Result<GridFunction, OperatorError> {
    let h = sp.check(psi)?;
    let d = first_derivative(psi.values(), h);
    let out = (0..psi.len()).map(|i| -I * (sp.f[i] * d[i] + sp.g[i] * psi.values()[i])).collect();
    Ok(psi.with_values(out)?)
}

/// `−(1/m)ψ'' + (m'/m²)ψ' + [c_lap·m''/m² − c_grad·m'²/m³]ψ`.
fn kinetic(c_lap: f64, c_grad: f64, m: &MassProfile, psi: &GridFunction) -> Result<GridFunction, OperatorError> {
    let h = uniform_spacing(psi)?;
    let d1 = first_derivative(psi.values(), h);
    let d2 = second_derivative(psi.values(), h);
    let mut out = Vec::with_capacity(psi.len());
    for (i, &x) in psi.points().iter().enumerate() {
        let jet = m.jet(x)?;
        let inv = 1.0 / jet.value;
        let drift = jet.d1 * inv * inv;
        let q = mass_term(c_lap, c_grad, &jet);
        out.push(-inv * d2[i] + drift * d1[i] + q * psi.values()[i]);
    }
    Ok(psi.with_values(out)?)
}

/// Closed form of `Π²`: the von Roos kinetic operator with
/// `c_lap = 1/4`, `c_grad = 7/16`.
pub fn apply_pi_squared(m: &MassProfile, psi: &GridFunction) -> Result<GridFunction, OperatorError> {
    kinetic(0.25, 7.0 / 16.0, m, psi)
}

pub fn apply_von_roos_kinetic(
    o: &OrderingParameters,
    m: &MassProfile,
    psi: &GridFunction,
) -> Result<GridFunction, OperatorError> {
    let k = kinetic_coefficients(o);
    kinetic(k.c_lap, k.c_grad, m, psi)
}

/// `−m^{−1/4} ∂[ m^{−1/2} ∂( m^{−1/4} ψ ) ] + Vψ`, applied step by step.
pub fn apply_factorized(
    m: &MassProfile,
    v: &PotentialProfile,
    psi: &GridFunction,
) -> Result<GridFunction, OperatorError> {
    let h = uniform_spacing(psi)?;
    let quarter = psi
        .points()
        .iter()
        .map(|&x| m.eval(x).map(|mv| 1.0 / math::sqrt(math::sqrt(mv))))
        .collect::<Result<Vec<_>, _>>()?;
    let inner: Vec<Complex64> = psi.values().iter().zip(&quarter).map(|(p, q)| p * q).collect();
    let d_inner = first_derivative(&inner, h);
    let middle: Vec<Complex64> = d_inner.iter().zip(&quarter).map(|(d, q)| d * (q * q)).collect();
    let d_middle = first_derivative(&middle, h);
    let mut out = Vec::with_capacity(psi.len());
    for (i, &x) in psi.points().iter().enumerate() {
        out.push(-quarter[i] * d_middle[i] + v.eval(x)? * psi.values()[i]);
    }
    Ok(psi.with_values(out)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiticityReport {
    /// `|⟨Πφ, ψ⟩ − ⟨φ, Πψ⟩|`
    pub defect: f64,
    /// `defect / (‖φ‖‖ψ‖)`
    pub relative: f64,
    /// Set when either function exceeds `1e-8` of its peak at an end point,
    /// where the boundary term no longer vanishes.
    pub boundary_warning: bool,
}

fn boundary_ratio(f: &GridFunction) -> f64 {
    let v = f.values();
    let edge = v[0].norm().max(v[v.len() - 1].norm());
    let peak = f.max_abs();
    if peak == 0.0 {
        0.0
    } else {
        edge / peak
    }
}

fn defect_with<A>(apply: A, phi: &GridFunction, psi: &GridFunction) -> Result<HermiticityReport, OperatorError>
where
    A: Fn(&GridFunction) -> Result<GridFunction, OperatorError>,
{
    let left = apply(phi)?.inner(psi)?;
    let right = phi.inner(&apply(psi)?)?;
    let defect = (left - right).norm();
    let norms = math::sqrt(phi.norm_sq() * psi.norm_sq());
    let boundary_warning = boundary_ratio(phi) > 1e-8 || boundary_ratio(psi) > 1e-8;
    if boundary_warning {
        log::warn!("hermiticity check: grid functions do not vanish at the end points; boundary term included");
    }
    Ok(HermiticityReport { defect, relative: if norms > 0.0 { defect / norms } else { defect }, boundary_warning })
}

/// Hermiticity defect of [`apply_pi`].
pub fn hermiticity_defect(
    sp: &ScalingPair,
    phi: &GridFunction,
    psi: &GridFunction,
) -> Result<HermiticityReport, OperatorError> {
    defect_with(|f| apply_pi(sp, f), phi, psi)
}

/// Hermiticity defect of [`apply_pi_expanded`].
pub fn hermiticity_defect_expanded(
    sp: &ScalingPair,
    phi: &GridFunction,
    psi: &GridFunction,
) -> Result<HermiticityReport, OperatorError> {
    defect_with(|f| apply_pi_expanded(sp, f), phi, psi)
}

/// `max |a − b|` over the grid, optionally skipping `skip` points at each end.
pub fn max_difference(a: &GridFunction, b: &GridFunction, skip: usize) -> f64 {
    let n = a.len();
    a.values()[skip..n - skip]
        .iter()
        .zip(&b.values()[skip..n - skip])
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::lookup;
    use crate::profiles::Profile;
    use alloc::vec;
    use proptest::prelude::*;

    fn one_plus_x2() -> MassProfile {
        MassProfile::new(Profile::rational(vec![1.0, 0.0, 1.0], vec![1.0]).unwrap())
    }

    fn exp2x() -> MassProfile {
        MassProfile::new(Profile::exponential(1.0, 2.0))
    }

    fn gaussian(n: usize) -> GridFunction {
        GridFunction::sample_real(-8.0, 8.0, n, |x| math::exp(-x * x)).unwrap()
    }

    #[test]
    fn scaling_pair_values() {
        let flat = MassProfile::constant(1.0).unwrap();
        let sp = scaling_pair(&flat, &[-1.0, 0.0, 2.0]).unwrap();
        assert_eq!(sp.f, vec![1.0; 3]);
        assert_eq!(sp.g, vec![0.0; 3]);

        let sq = MassProfile::power_law(1.0, 2.0).unwrap();
        let sp = scaling_pair(&sq, &[4.0]).unwrap();
        assert_eq!(sp.f[0], 0.25);
        assert_eq!(sp.g[0], -1.0 / 32.0);

        let sp = scaling_pair(&exp2x(), &[0.0]).unwrap();
        assert_eq!((sp.f[0], sp.g[0]), (1.0, -0.5));
    }

    #[test]
    fn constant_mass_pi_is_discrete_momentum() {
        let psi = GridFunction::sample(0.0, 1.0, 11, |x| Complex64::new(x * x, x)).unwrap();
        let sp = scaling_pair(&MassProfile::constant(1.0).unwrap(), psi.points()).unwrap();
        let pi = apply_pi(&sp, &psi).unwrap();
        let d = first_derivative(psi.values(), 0.1);
        for (a, b) in pi.values().iter().zip(&d) {
            assert_eq!(*a, -I * b);
        }
    }

    #[test]
    fn plane_wave_eigenfunction() {
        let k = 3.0;
        let psi = GridFunction::sample(0.0, 2.0, 4001, |x| Complex64::new(0.0, k * x).exp()).unwrap();
        let sp = scaling_pair(&MassProfile::constant(1.0).unwrap(), psi.points()).unwrap();
        let pi = apply_pi(&sp, &psi).unwrap();
        for (p, v) in pi.values().iter().zip(psi.values()).skip(1).take(3998) {
            assert!((p - k * v).norm() < 1e-5);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let psi = GridFunction::sample_real(-1.0, 1.0, 21, |_| 0.0).unwrap();
        let sp = scaling_pair(&one_plus_x2(), psi.points()).unwrap();
        assert!(apply_pi(&sp, &psi).unwrap().values().iter().all(|v| v.norm() == 0.0));
        assert!(apply_pi_squared(&one_plus_x2(), &psi).unwrap().values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn pi_matches_hand_expansion() {
        // m = e^{2x}: F = e^{−x}, G = −e^{−x}/2; ψ = e^{−x²}, ψ' = −2xψ
        let mut errs = Vec::new();
        for n in [801, 1601] {
            let psi = gaussian(n);
            let sp = scaling_pair(&exp2x(), psi.points()).unwrap();
            for out in [apply_pi(&sp, &psi).unwrap(), apply_pi_expanded(&sp, &psi).unwrap()] {
                let expected = GridFunction::sample(-8.0, 8.0, n, |x| {
                    let f = math::exp(-x);
                    let p = math::exp(-x * x);
                    -I * (f * (-2.0 * x * p) - 0.5 * f * p)
                })
                .unwrap();
                errs.push(max_difference(&out, &expected, 0));
            }
        }
        let split_order = math::observed_order(errs[0], errs[2]);
        let expanded_order = math::observed_order(errs[1], errs[3]);
        assert!((split_order - 2.0).abs() < 0.1, "{split_order}");
        assert!((expanded_order - 2.0).abs() < 0.1, "{expanded_order}");
    }

    #[test]
    fn constant_mass_pi_squared_is_minus_laplacian() {
        let psi = GridFunction::sample_real(0.0, 6.0, 2001, math::sin).unwrap();
        let out = apply_pi_squared(&MassProfile::constant(1.0).unwrap(), &psi).unwrap();
        assert!(max_difference(&out, &psi, 1) < 1e-5);
    }

    #[test]
    fn pi_twice_converges_to_closed_form() {
        let mut errs = Vec::new();
        for n in [1001, 2001, 4001] {
            let psi = gaussian(n);
            let sp = scaling_pair(&one_plus_x2(), psi.points()).unwrap();
            let twice = apply_pi(&sp, &apply_pi(&sp, &psi).unwrap()).unwrap();
            let closed = apply_pi_squared(&one_plus_x2(), &psi).unwrap();
            errs.push(max_difference(&twice, &closed, 2));
        }
        for w in errs.windows(2) {
            let order = math::observed_order(w[0], w[1]);
            assert!((order - 2.0).abs() < 0.2, "order {order}");
        }
    }

    #[test]
    fn mm_kinetic_is_pi_squared() {
        for m in [one_plus_x2(), exp2x()] {
            let psi = gaussian(501);
            let a = apply_pi_squared(&m, &psi).unwrap();
            let b = apply_von_roos_kinetic(&OrderingParameters::mm(), &m, &psi).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn constant_mass_kinetic_ignores_ordering() {
        let psi = gaussian(201);
        let flat = MassProfile::constant(1.0).unwrap();
        let reference = apply_von_roos_kinetic(&OrderingParameters::mm(), &flat, &psi).unwrap();
        for o in crate::ordering::catalog() {
            assert_eq!(apply_von_roos_kinetic(&o, &flat, &psi).unwrap(), reference);
        }
    }

    #[test]
    fn zhu_kroemer_minus_mm() {
        let m = one_plus_x2();
        let psi = gaussian(401);
        let zk = apply_von_roos_kinetic(&lookup("zhu_kroemer").unwrap(), &m, &psi).unwrap();
        let mm = apply_von_roos_kinetic(&OrderingParameters::mm(), &m, &psi).unwrap();
        for (i, &x) in psi.points().iter().enumerate() {
            let j = m.jet(x).unwrap();
            let coef = 0.25 * j.d2 / (j.value * j.value) - 5.0 / 16.0 * j.d1 * j.d1 / (j.value * j.value * j.value);
            let diff = zk.values()[i] - mm.values()[i];
            assert!((diff - coef * psi.values()[i]).norm() <= 1e-13);
        }
    }

    #[test]
    fn factorized_constant_mass() {
        let v = PotentialProfile::new(Profile::parse("x^2", "x").unwrap());
        let psi = gaussian(4001);
        let flat = MassProfile::constant(1.0).unwrap();
        let fact = apply_factorized(&flat, &v, &psi).unwrap();
        let expected = GridFunction::sample_real(-8.0, 8.0, 4001, |x| {
            let p = math::exp(-x * x);
            -(4.0 * x * x - 2.0) * p + x * x * p
        })
        .unwrap();
        assert!(max_difference(&fact, &expected, 0) < 1e-4);
    }

    #[test]
    fn factorized_converges_to_pi_squared() {
        let v = PotentialProfile::new(Profile::parse("x^2", "x").unwrap());
        for m in [one_plus_x2(), exp2x()] {
            let mut errs = Vec::new();
            for n in [1001, 2001, 4001] {
                let psi = gaussian(n);
                let fact = apply_factorized(&m, &v, &psi).unwrap();
                let closed = apply_pi_squared(&m, &psi).unwrap();
                let vpsi: Vec<Complex64> =
                    psi.points().iter().zip(psi.values()).map(|(&x, p)| p * v.eval(x).unwrap()).collect();
                let target = psi.with_values(closed.values().iter().zip(&vpsi).map(|(a, b)| a + b).collect()).unwrap();
                errs.push(max_difference(&fact, &target, 0));
            }
            let order = math::observed_order(errs[1], errs[2]);
            assert!((order - 2.0).abs() < 0.2, "order {order}");
        }
    }

    #[test]
    fn hermiticity() {
        let m = one_plus_x2();
        let n = 2001;
        let phi = GridFunction::sample_real(-10.0, 10.0, n, |x| math::exp(-x * x)).unwrap();
        let psi = GridFunction::sample_real(-10.0, 10.0, n, |x| x * math::exp(-(x - 0.5) * (x - 0.5))).unwrap();
        let sp = scaling_pair(&m, phi.points()).unwrap();
        let split = hermiticity_defect(&sp, &phi, &psi).unwrap();
        assert!(split.relative < 1e-12);
        assert!(!split.boundary_warning);

        let flat = scaling_pair(&MassProfile::constant(1.0).unwrap(), phi.points()).unwrap();
        assert!(hermiticity_defect_expanded(&flat, &phi, &psi).unwrap().relative < 1e-10);

        // the expanded stencil's defect decays at second order
        let mut defects = Vec::new();
        for n in [1001, 2001, 4001] {
            let phi = GridFunction::sample_real(-10.0, 10.0, n, |x| math::exp(-x * x)).unwrap();
            let psi = GridFunction::sample_real(-10.0, 10.0, n, |x| x * math::exp(-(x - 0.5) * (x - 0.5))).unwrap();
            let sp = scaling_pair(&m, phi.points()).unwrap();
            defects.push(hermiticity_defect_expanded(&sp, &phi, &psi).unwrap().defect);
        }
        let order = math::observed_order(defects[1], defects[2]);
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn plane_wave_on_box_warns() {
        let phi = GridFunction::sample(0.0, 5.0, 501, |x| Complex64::new(0.0, 2.0 * x).exp()).unwrap();
        let sp = scaling_pair(&one_plus_x2(), phi.points()).unwrap();
        let rep = hermiticity_defect(&sp, &phi, &phi).unwrap();
        assert!(rep.boundary_warning);
    }

    #[test]
    fn operator_preconditions() {
        let short = GridFunction::sample_real(0.0, 1.0, 4, |x| x).unwrap();
        assert!(matches!(
            apply_pi_squared(&one_plus_x2(), &short),
            Err(OperatorError::Grid(GridError::TooFewPoints { .. }))
        ));
        let psi = GridFunction::sample_real(0.0, 1.0, 11, |x| x).unwrap();
        let sp = scaling_pair(&one_plus_x2(), &crate::grid::uniform_points(0.0, 2.0, 11)).unwrap();
        assert!(matches!(apply_pi(&sp, &psi), Err(OperatorError::Grid(GridError::Mismatch))));
        let uneven = GridFunction::from_real(vec![0.0, 0.1, 0.3, 0.4, 0.5], vec![0.0; 5]).unwrap();
        assert!(matches!(
            apply_pi_squared(&one_plus_x2(), &uneven),
            Err(OperatorError::Grid(GridError::NonUniform))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn operators_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s in 0.5f64..2.0) {
            let n = 101;
            let f = GridFunction::sample_real(-4.0, 4.0, n, |x| math::exp(-x * x)).unwrap();
            let g = GridFunction::sample_real(-4.0, 4.0, n, |x| math::sin(s * x) * math::exp(-0.5 * x * x)).unwrap();
            let combo = f.with_values(f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect()).unwrap();
            let m = one_plus_x2();
            let v = PotentialProfile::new(Profile::parse("x^2", "x").unwrap());
            let sp = scaling_pair(&m, f.points()).unwrap();
            type Op<'a> = Box<dyn Fn(&GridFunction) -> GridFunction + 'a>;
            let ops: Vec<Op> = vec![
                Box::new(|p| apply_pi(&sp, p).unwrap()),
                Box::new(|p| apply_pi_expanded(&sp, p).unwrap()),
                Box::new(|p| apply_pi_squared(&m, p).unwrap()),
                Box::new(|p| apply_factorized(&m, &v, p).unwrap()),
            ];
            for op in &ops {
                let lhs = op(&combo);
                let (of, og) = (op(&f), op(&g));
                for i in 0..n {
                    let rhs = a * of.values()[i] + b * og.values()[i];
                    prop_assert!((lhs.values()[i] - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
                }
            }
        }
    }
}
