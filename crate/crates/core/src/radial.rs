//! Bound states of the d-dimensional radial PDM equation
//!
//! ```text
//! R'' = [ℓ_d(ℓ_d+1)/r² + m(Ṽ − E)] R + (m'/m) [R' − (d−1)R/(2r)]
//! ```
//!
//! solved two independent ways: RK4 shooting in `r` with node counting, and a
//! symmetric finite-difference matrix in the canonical coordinate
//! `Z = ∫√m dr`, where the equation reads `−φ'' + W φ = E φ` with
//! `φ = m^{−1/4} R` and
//!
//! ```text
//! W = ℓ_d(ℓ_d+1)/(r² m) − U_d + Ṽ − (m''/(4m²) − 7m'²/(16m³)),   U_d = (d−1)m'/(2r m²)
//! ```
//!
//! For the `mm` ordering the bracket cancels the mass terms of `Ṽ` and
//! `W = ℓ_d(ℓ_d+1)/(r² m) + V − U_d`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::grid::{count_sign_changes, GridError, GridFunction};
use crate::math;
use crate::ordering::{effective_potential_radial, LaplacianMode, OrderingError, OrderingParameters};
use crate::pct::{self, PctError, PctMapping};
use crate::profiles::{MassProfile, PotentialProfile, ProfileError};
use crate::rational::Rational;
use crate::tridiag::SymTridiagonal;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadialError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Mapping(#[from] PctError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("level n_r = {n_r} not found: {reason}")]
    LevelNotFound { n_r: usize, reason: String },
}

fn invalid(msg: impl Into<String>) -> RadialError {
    RadialError::InvalidProblem(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim() {
            "even" => Some(Self::Even),
            "odd" => Some(Self::Odd),
            _ => None,
        }
    }
}

/// `ℓ_d = ℓ + (d−3)/2`, stored as `2ℓ_d` so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AngularIndex {
    twice: i64,
}

impl AngularIndex {
    pub const fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    pub fn twice(&self) -> i64 {
        self.twice
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(i128::from(self.twice), 2)
    }

    /// `ℓ_d(ℓ_d + 1)`
    pub fn centrifugal(&self) -> f64 {
        let t = self.twice as f64;
        t * (t + 2.0) / 4.0
    }
}

/// `ℓ_d` for `d ≥ 2`.
pub fn l_d(ell: u32, d: u32) -> Result<AngularIndex, RadialError> {
    match d {
        0 => Err(invalid("dimension must be at least 1")),
        1 => Err(invalid("d = 1 takes a parity, not an angular momentum")),
        _ => Ok(AngularIndex::from_twice(2 * i64::from(ell) + i64::from(d) - 3)),
    }
}

/// `ℓ_d` for `d = 1`: −1 for even parity, 0 for odd.
pub fn l_d_parity(parity: Parity) -> AngularIndex {
    match parity {
        Parity::Even => AngularIndex::from_twice(-2),
        Parity::Odd => AngularIndex::from_twice(0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Angular {
    Ell(u32),
    Parity(Parity),
}

pub const DEFAULT_R_MIN: f64 = 1e-6;
pub const DEFAULT_GRID_N: usize = 2000;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
const MIN_GRID_N: usize = 50;
/// Fewer points per local oscillation than this marks a level unreliable.
const MIN_POINTS_PER_OSCILLATION: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProblem {
    pub d: u32,
    pub angular: Angular,
    pub mass: MassProfile,
    pub potential: PotentialProfile,
    pub ordering: OrderingParameters,
    pub laplacian_mode: LaplacianMode,
    pub r_min: f64,
    pub r_max: f64,
    pub grid_n: usize,
    /// Bisection tolerance, relative to `max(1, |E|)`.
    pub tolerance: f64,
}

impl RadialProblem {
    /// Problem with the `mm` ordering, literal radial Laplacian,
    /// `r ∈ (1e-6, r_max)` and 2000 grid points.
    pub fn new(d: u32, angular: Angular, mass: MassProfile, potential: PotentialProfile, r_max: f64) -> Self {
        Self {
            d,
            angular,
            mass,
            potential,
            ordering: OrderingParameters::mm(),
            laplacian_mode: LaplacianMode::LiteralRadial,
            r_min: DEFAULT_R_MIN,
            r_max,
            grid_n: DEFAULT_GRID_N,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_domain(mut self, r_min: f64, r_max: f64) -> Self {
        self.r_min = r_min;
        self.r_max = r_max;
        self
    }

    pub fn with_grid(mut self, grid_n: usize) -> Self {
        self.grid_n = grid_n;
        self
    }

    pub fn with_ordering(mut self, ordering: OrderingParameters) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_laplacian_mode(mut self, mode: LaplacianMode) -> Self {
        self.laplacian_mode = mode;
        self
    }

    pub fn ell_d(&self) -> Result<AngularIndex, RadialError> {
        match (self.d, self.angular) {
            (0, _) => Err(invalid("dimension must be at least 1")),
            (1, Angular::Parity(p)) => Ok(l_d_parity(p)),
            (1, Angular::Ell(_)) => Err(invalid("d = 1 needs a parity (even or odd)")),
            (d, Angular::Ell(ell)) => l_d(ell, d),
            (_, Angular::Parity(_)) => Err(invalid("parity only applies to d = 1")),
        }
    }

    /// Even parity in one dimension starts with zero slope of `φ`; every other
    /// case starts from a node.
    fn zero_slope_start(&self) -> bool {
        self.d == 1 && self.angular == Angular::Parity(Parity::Even)
    }

    pub fn validate(&self) -> Result<(), RadialError> {
        self.ell_d()?;
        if !(self.r_min > 0.0) {
            return Err(invalid("r_min must be positive"));
        }
        if !(self.r_max > self.r_min) || !self.r_max.is_finite() {
            return Err(invalid("r_max must be finite and greater than r_min"));
        }
        if self.grid_n < MIN_GRID_N {
            return Err(invalid(format!("grid_n must be at least {MIN_GRID_N}")));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        self.mass.eval(self.r_min)?;
        self.mass.eval(self.r_max)?;
        self.potential.eval(self.r_min)?;
        self.potential.eval(self.r_max)?;
        Ok(())
    }

    /// `Ṽ(r)` for the problem's ordering and Laplacian mode.
    pub fn v_tilde(&self, r: f64) -> Result<f64, RadialError> {
        Ok(effective_potential_radial(&self.ordering, &self.mass, &self.potential, r, self.d, self.laplacian_mode)?)
    }

    /// Potential of the equivalent constant-mass equation in `Z`.
    pub fn z_potential(&self, r: f64) -> Result<f64, RadialError> {
        let centrifugal = self.ell_d()?.centrifugal();
        let m = self.mass.jet(r)?;
        let m2 = m.value * m.value;
        let transform_terms = 0.25 * m.d2 / m2 - 7.0 / 16.0 * m.d1 * m.d1 / (m2 * m.value);
        let u_d = f64::from(self.d - 1) * m.d1 / (2.0 * r * m2);
        Ok(centrifugal / (r * r * m.value) - u_d + self.v_tilde(r)? - transform_terms)
    }

    /// Energies must lie below this value to count as bound in the box.
    pub fn bound_cap(&self) -> Result<f64, RadialError> {
        self.z_potential(self.r_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Shooting,
    FdZ,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Shooting => "shoot",
            SolverKind::FdZ => "fd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub n_r: usize,
    pub energy: f64,
    pub node_count: usize,
    /// Richardson estimate from a half-resolution solve.
    pub est_error: f64,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissingLevel {
    pub n_r: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub solver: SolverKind,
    pub levels: Vec<Level>,
    pub missing: Vec<MissingLevel>,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn energy(&self, n_r: usize) -> Option<f64> {
        self.levels.iter().find(|l| l.n_r == n_r).map(|l| l.energy)
    }
}

// ---------------------------------------------------------------------------
// Shooting

struct ShootingTable {
    /// Step nodes `r_0 = r_min, …, r_K = r_max`.
    r: Vec<f64>,
    /// Coefficients at nodes (`2k`) and midpoints (`2k+1`).
    coeff: Vec<Coefficients>,
    start: (f64, f64),
    w_min: f64,
}

#[derive(Clone, Copy)]
struct Coefficients {
    /// `E`-independent part of the `R` coefficient.
    a0: f64,
    mass: f64,
    /// `m'/m`
    drift: f64,
    w: f64,
}

impl ShootingTable {
    fn build(p: &RadialProblem, grid_n: usize) -> Result<Self, RadialError> {
        let h_max = (p.r_max - p.r_min) / grid_n as f64;
        let ratio = 10.0 / grid_n as f64;
        let mut r = vec![p.r_min];
        let mut x = p.r_min;
        while x < p.r_max {
            let h = h_max.min(ratio * x);
            x = if x + h >= p.r_max * (1.0 - 1e-14) { p.r_max } else { x + h };
            r.push(x);
        }
        let c = p.ell_d()?.centrifugal();
        let d_minus_1 = f64::from(p.d - 1);
        let coefficients = |x: f64| -> Result<Coefficients, RadialError> {
            let m = p.mass.jet(x)?;
            let drift = m.d1 / m.value;
            let a0 = c / (x * x) + m.value * p.v_tilde(x)? - drift * d_minus_1 / (2.0 * x);
            Ok(Coefficients { a0, mass: m.value, drift, w: p.z_potential(x)? })
        };
        let mut coeff = Vec::with_capacity(2 * r.len());
        for k in 0..r.len() {
            coeff.push(coefficients(r[k])?);
            if k + 1 < r.len() {
                coeff.push(coefficients(0.5 * (r[k] + r[k + 1]))?);
            }
        }
        let start = if p.zero_slope_start() {
            let m = p.mass.jet(p.r_min)?;
            let value = math::sqrt(math::sqrt(m.value));
            (value, 0.25 * m.d1 / m.value * value)
        } else {
            (0.0, 1.0)
        };
        let w_min = coeff.iter().map(|c| c.w).fold(f64::INFINITY, f64::min);
        Ok(Self { r, coeff, start, w_min })
    }

    /// Integrates at energy `e`; returns the number of sign changes of `R`
    /// on `(r_min, r_max]`, and optionally records `R` at every node.
    fn shoot(&self, e: f64, mut record: Option<&mut Vec<f64>>) -> usize {
        let rhs = |c: &Coefficients, y: (f64, f64)| (y.1, (c.a0 - c.mass * e) * y.0 + c.drift * y.1);
        let (mut u, mut du) = self.start;
        let mut last_sign = if u != 0.0 { u.signum() } else { du.signum() };
        let mut nodes = 0;
        if let Some(out) = record.as_deref_mut() {
            out.push(u);
        }
        for k in 0..self.r.len() - 1 {
            let h = self.r[k + 1] - self.r[k];
            let (c0, cm, c1) = (&self.coeff[2 * k], &self.coeff[2 * k + 1], &self.coeff[2 * k + 2]);
            let k1 = rhs(c0, (u, du));
            let k2 = rhs(cm, (u + 0.5 * h * k1.0, du + 0.5 * h * k1.1));
            let k3 = rhs(cm, (u + 0.5 * h * k2.0, du + 0.5 * h * k2.1));
            let k4 = rhs(c1, (u + h * k3.0, du + h * k3.1));
            u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            du += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            if u != 0.0 && u.signum() != last_sign {
                nodes += 1;
                last_sign = u.signum();
            }
            let size = u.abs().max(du.abs());
            if size > 1e150 {
                u /= size;
                du /= size;
                if let Some(out) = record.as_deref_mut() {
                    for v in out.iter_mut() {
                        *v /= size;
                    }
                }
            }
            if let Some(out) = record.as_deref_mut() {
                out.push(u);
            }
        }
        nodes
    }

    /// Smallest points-per-oscillation over the allowed region at energy `e`.
    fn points_per_oscillation(&self, e: f64) -> f64 {
        let mut worst = f64::INFINITY;
        for k in 0..self.r.len() - 1 {
            let c = &self.coeff[2 * k];
            let excess = e - c.w;
            if excess > 0.0 {
                let dz = math::sqrt(c.mass) * (self.r[k + 1] - self.r[k]);
                worst = worst.min(2.0 * PI / (math::sqrt(excess) * dz));
            }
        }
        worst
    }
}

/// Bisection on a monotone eigenvalue count: the smallest `E` in `(lo, hi]`
/// where `count(E) > k`.
fn bisect_count<C: Fn(f64) -> usize>(count: C, k: usize, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    while hi - lo > rel_tol * lo.abs().max(hi.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn shooting_energies(p: &RadialProblem, grid_n: usize, n_max: usize) -> Result<(ShootingTable, Vec<Option<f64>>, f64), RadialError> {
    let table = ShootingTable::build(p, grid_n)?;
    let cap = p.bound_cap()?;
    let mut lo = table.w_min - 1.0;
    let available = if cap > lo { table.shoot(cap, None) } else { 0 };
    let mut energies = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        if k >= available {
            energies.push(None);
            continue;
        }
        let e = bisect_count(|e| table.shoot(e, None), k, lo, cap, p.tolerance);
        energies.push(Some(e));
        lo = e;
    }
    Ok((table, energies, cap))
}

fn missing_reason(solver: SolverKind, cap: f64) -> String {
    format!(
        "{}: no eigenvalue below the outer boundary value W(r_max) = {cap:.6e}; not bound in this box",
        solver.as_str()
    )
}

/// RK4 shooting from `r_min` with `R(r_min) = 0, R'(r_min) = 1` (even parity
/// in one dimension starts with `φ' = 0` instead), eigenvalues by bisection on
/// the node count.
pub fn solve_shooting(p: &RadialProblem, n_max: usize) -> Result<Spectrum, RadialError> {
    p.validate()?;
    let (table, energies, cap) = shooting_energies(p, p.grid_n, n_max)?;
    let (_, coarse, _) = shooting_energies(p, p.grid_n / 2, n_max)?;
    let mut spectrum = Spectrum { solver: SolverKind::Shooting, levels: Vec::new(), missing: Vec::new() };
    for (n_r, e) in energies.iter().enumerate() {
        match e {
            Some(e) => {
                let below = e - p.tolerance * e.abs().max(1.0);
                let est_error = coarse[n_r].map_or(f64::NAN, |c| (e - c).abs() / 15.0);
                spectrum.levels.push(Level {
                    n_r,
                    energy: *e,
                    node_count: table.shoot(below, None),
                    est_error,
                    reliable: table.points_per_oscillation(*e) >= MIN_POINTS_PER_OSCILLATION,
                });
            }
            None => {
                log::debug!("shooting: level {n_r} missing below cap {cap}");
                spectrum.missing.push(MissingLevel { n_r, reason: missing_reason(SolverKind::Shooting, cap) });
            }
        }
    }
    Ok(spectrum)
}

// ---------------------------------------------------------------------------
// Finite differences in Z

/// Uniform grid of unknowns on `[z_lo, z_hi]` with a Dirichlet right end.
/// The left end is Dirichlet, or zero-slope with cell-centred unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct ZGrid {
    pub z: Vec<f64>,
    pub h: f64,
    pub zero_slope_left: bool,
    pub z_lo: f64,
    pub z_hi: f64,
}

impl ZGrid {
    pub fn new(z_lo: f64, z_hi: f64, n: usize, zero_slope_left: bool) -> Self {
        let (h, offset) = if zero_slope_left {
            ((z_hi - z_lo) / (n as f64 + 0.5), 0.5)
        } else {
            ((z_hi - z_lo) / (n as f64 + 1.0), 1.0)
        };
        let z = (0..n).map(|i| z_lo + (i as f64 + offset) * h).collect();
        Self { z, h, zero_slope_left, z_lo, z_hi }
    }

    /// `−d²/dZ² + W` as a symmetric tridiagonal matrix.
    pub fn operator(&self, w: &[f64]) -> SymTridiagonal {
        let inv_h2 = 1.0 / (self.h * self.h);
        let mut diag: Vec<f64> = w.iter().map(|w| 2.0 * inv_h2 + w).collect();
        if self.zero_slope_left {
            diag[0] -= inv_h2;
        }
        SymTridiagonal::new(diag, vec![-inv_h2; w.len() - 1])
    }

    fn points_per_oscillation(&self, w: &[f64], e: f64) -> f64 {
        let excess = w.iter().map(|w| e - w).fold(0.0f64, f64::max);
        if excess <= 0.0 {
            f64::INFINITY
        } else {
            2.0 * PI / (math::sqrt(excess) * self.h)
        }
    }
}

struct FdSystem {
    grid: ZGrid,
    w: Vec<f64>,
    matrix: SymTridiagonal,
}

fn fd_system(p: &RadialProblem, mapping: &PctMapping, n: usize) -> Result<FdSystem, RadialError> {
    let grid = ZGrid::new(mapping.forward(p.r_min)?, mapping.forward(p.r_max)?, n, p.zero_slope_start());
    let r = grid.z.iter().map(|&z| mapping.inverse(z)).collect::<Result<Vec<_>, _>>()?;
    let w = r.iter().map(|&x| p.z_potential(x)).collect::<Result<Vec<_>, _>>()?;
    let matrix = grid.operator(&w);
    Ok(FdSystem { grid, w, matrix })
}

fn fd_energies(system: &FdSystem, n_max: usize, cap: f64, tol: f64) -> Vec<Option<f64>> {
    let available = system.matrix.count_below(cap);
    (0..=n_max)
        .map(|k| (k < available).then(|| system.matrix.eigenvalue(k, tol)))
        .collect()
}

/// Symmetric tridiagonal discretisation of `−d²/dZ² + W` on the canonical
/// grid, eigenvalues by Sturm bisection.
pub fn solve_fd_z(p: &RadialProblem, n_max: usize) -> Result<Spectrum, RadialError> {
    p.validate()?;
    let mapping = pct::build_mapping(&p.mass, p.r_min, p.r_max)?;
    let cap = p.bound_cap()?;
    let fine = fd_system(p, &mapping, p.grid_n)?;
    let coarse = fd_system(p, &mapping, p.grid_n / 2)?;
    let energies = fd_energies(&fine, n_max, cap, p.tolerance);
    let coarse_energies = fd_energies(&coarse, n_max, cap, p.tolerance);
    let mut spectrum = Spectrum { solver: SolverKind::FdZ, levels: Vec::new(), missing: Vec::new() };
    for (n_r, e) in energies.iter().enumerate() {
        match e {
            Some(e) => {
                let vector = fine.matrix.eigenvector(*e);
                spectrum.levels.push(Level {
                    n_r,
                    energy: *e,
                    node_count: count_sign_changes(&vector),
                    est_error: coarse_energies[n_r].map_or(f64::NAN, |c| (e - c).abs() / 3.0),
                    reliable: fine.grid.points_per_oscillation(&fine.w, *e) >= MIN_POINTS_PER_OSCILLATION,
                });
            }
            None => spectrum.missing.push(MissingLevel { n_r, reason: missing_reason(SolverKind::FdZ, cap) }),
        }
    }
    Ok(spectrum)
}

pub fn solve(p: &RadialProblem, n_max: usize, solver: SolverKind) -> Result<Spectrum, RadialError> {
    match solver {
        SolverKind::Shooting => solve_shooting(p, n_max),
        SolverKind::FdZ => solve_fd_z(p, n_max),
    }
}

/// Radial function `R_{n_r}(r)` on the pulled-back canonical grid, normalised
/// so that `∫|R|² dr = 1` by the trapezoid rule.
pub fn eigenfunction(p: &RadialProblem, n_r: usize) -> Result<GridFunction, RadialError> {
    p.validate()?;
    let mapping = pct::build_mapping(&p.mass, p.r_min, p.r_max)?;
    let cap = p.bound_cap()?;
    let system = fd_system(p, &mapping, p.grid_n)?;
    if system.matrix.count_below(cap) <= n_r {
        return Err(RadialError::LevelNotFound { n_r, reason: missing_reason(SolverKind::FdZ, cap) });
    }
    let e = system.matrix.eigenvalue(n_r, p.tolerance);
    let mut phi = system.matrix.eigenvector(e);
    let mut z = system.grid.z.clone();
    if !system.grid.zero_slope_left {
        z.insert(0, system.grid.z_lo);
        phi.insert(0, 0.0);
    }
    z.push(system.grid.z_hi);
    phi.push(0.0);
    // Fix the overall sign so the function starts positive.
    if let Some(first) = phi.iter().find(|v| v.abs() > 1e-8) {
        if *first < 0.0 {
            phi.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let mut phi = GridFunction::from_real(z, phi)?;
    phi.scale(1.0 / math::sqrt(phi.norm_sq()));
    let mut radial = pct::wavefunction_pullback(&mapping, &p.mass, &phi)?;
    radial.scale(1.0 / math::sqrt(radial.norm_sq()));
    Ok(radial)
}

/// Picks `r_max` so the `n_max`-th level's wavefunction has decayed by about
/// `e^{-18}` before the outer wall, starting from `start` and doubling.
pub fn suggest_r_max(p: &RadialProblem, n_max: usize, start: f64) -> Result<f64, RadialError> {
    const DECAY: f64 = 18.0;
    let mut r_max = start.max(2.0 * p.r_min);
    for _ in 0..24 {
        let trial = p.clone().with_domain(p.r_min, r_max).with_grid(p.grid_n.clamp(MIN_GRID_N, 800));
        trial.validate()?;
        let mapping = pct::build_mapping(&trial.mass, trial.r_min, trial.r_max)?;
        let system = fd_system(&trial, &mapping, trial.grid_n)?;
        if system.matrix.len() > n_max {
            let e = system.matrix.eigenvalue(n_max, 1e-8);
            // ∫ √(m (W − E)) dr over the forbidden tail, in the Z variable
            let mut decay = 0.0;
            let z = &system.grid.z;
            for i in 1..z.len() {
                let excess = 0.5 * ((system.w[i] - e).max(0.0) + (system.w[i - 1] - e).max(0.0));
                if system.w[i] > e {
                    decay += math::sqrt(excess) * (z[i] - z[i - 1]);
                } else {
                    decay = 0.0;
                }
            }
            if decay >= DECAY && trial.bound_cap()? > e {
                return Ok(r_max);
            }
        }
        r_max *= 2.0;
    }
    Err(invalid("could not find an outer radius that contains the requested levels"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Profile;

    fn potential(expr: &str) -> PotentialProfile {
        PotentialProfile::new(Profile::parse(expr, "r").unwrap().with_domain(crate::profiles::Domain::POSITIVE))
    }

    fn unit_mass() -> MassProfile {
        MassProfile::constant(1.0).unwrap()
    }

    #[test]
    fn angular_index() {
        assert_eq!(l_d(0, 3).unwrap().value(), 0.0);
        assert_eq!(l_d(0, 5).unwrap(), l_d(1, 3).unwrap());
        assert_eq!(l_d(1, 3).unwrap().value(), 1.0);
        assert_eq!(l_d(0, 2).unwrap().value(), -0.5);
        assert_eq!(l_d_parity(Parity::Odd).value(), 0.0);
        assert_eq!(l_d_parity(Parity::Even).value(), -1.0);
        assert_eq!(l_d_parity(Parity::Even).centrifugal(), 0.0);
        assert_eq!(l_d(2, 4).unwrap().centrifugal(), 2.5 * 3.5);
        assert!(l_d(0, 0).is_err());
        assert!(l_d(0, 1).is_err());
    }

    #[test]
    fn problem_validation() {
        let base = RadialProblem::new(3, Angular::Ell(0), unit_mass(), potential("r^2"), 8.0);
        assert!(base.validate().is_ok());
        assert!(base.clone().with_domain(0.0, 8.0).validate().is_err());
        assert!(base.clone().with_domain(2.0, 1.0).validate().is_err());
        assert!(base.clone().with_grid(10).validate().is_err());
        let mut wrong = base.clone();
        wrong.angular = Angular::Parity(Parity::Even);
        assert!(wrong.validate().is_err());
        let mut one_d = base;
        one_d.d = 1;
        assert!(one_d.validate().is_err());
    }

    #[test]
    fn oscillator_both_solvers() {
        let p = RadialProblem::new(3, Angular::Ell(0), unit_mass(), potential("r^2"), 8.0);
        for spectrum in [solve_shooting(&p, 3).unwrap(), solve_fd_z(&p, 3).unwrap()] {
            assert_eq!(spectrum.levels.len(), 4);
            for level in &spectrum.levels {
                let exact = 4.0 * level.n_r as f64 + 3.0;
                assert!((level.energy - exact).abs() / exact < 1e-3, "{:?} {}", spectrum.solver, level.energy);
                assert_eq!(level.node_count, level.n_r);
                assert!(level.reliable);
                assert!(level.est_error < 1e-2);
            }
        }
    }

    #[test]
    fn free_particle_has_no_bound_states() {
        let p = RadialProblem::new(3, Angular::Ell(0), unit_mass(), PotentialProfile::zero(), 20.0).with_grid(200);
        for spectrum in [solve_shooting(&p, 2).unwrap(), solve_fd_z(&p, 2).unwrap()] {
            assert!(spectrum.levels.is_empty());
            assert_eq!(spectrum.missing.len(), 3);
        }
    }

    #[test]
    fn one_dimensional_parities_interleave() {
        let base = RadialProblem::new(1, Angular::Parity(Parity::Even), unit_mass(), potential("r^2"), 7.0);
        let even = solve_fd_z(&base, 2).unwrap();
        let mut odd_problem = base.clone();
        odd_problem.angular = Angular::Parity(Parity::Odd);
        let odd = solve_fd_z(&odd_problem, 2).unwrap();
        let even_shoot = solve_shooting(&base, 2).unwrap();
        for k in 0..3 {
            let (e, o) = (even.energies()[k], odd.energies()[k]);
            assert!((e - (4 * k + 1) as f64).abs() < 2e-3, "{e}");
            assert!((o - (4 * k + 3) as f64).abs() < 2e-3, "{o}");
            assert!((even_shoot.energies()[k] - e).abs() / e < 1e-3);
            if k + 1 < 3 {
                assert!(e < o && o < even.energies()[k + 1]);
            }
        }
    }

    #[test]
    fn eigenfunction_shape_and_norm() {
        let p = RadialProblem::new(3, Angular::Ell(0), unit_mass(), potential("r^2"), 8.0);
        let ground = eigenfunction(&p, 0).unwrap();
        assert!((ground.norm_sq() - 1.0).abs() < 1e-8);
        assert_eq!(ground.sign_changes(), 0);
        // exp(−r²/2)·r normalised: ∫ r² e^{−r²} dr = √π/4
        let norm = math::sqrt(math::sqrt(PI) / 4.0);
        let peak = ground.max_abs();
        for (&r, v) in ground.points().iter().zip(ground.values()) {
            let expected = r * math::exp(-0.5 * r * r) / norm;
            assert!((v.re - expected).abs() <= 0.01 * peak, "r = {r}");
        }
        assert_eq!(eigenfunction(&p, 2).unwrap().sign_changes(), 2);
        let capped = RadialProblem::new(3, Angular::Ell(0), unit_mass(), potential("r^2"), 3.0);
        assert!(matches!(eigenfunction(&capped, 5), Err(RadialError::LevelNotFound { .. })));
    }

    #[test]
    fn suggested_radius_contains_levels() {
        let p = RadialProblem::new(3, Angular::Ell(0), unit_mass(), potential("r^2"), 1.0);
        let r_max = suggest_r_max(&p, 4, 1.0).unwrap();
        assert!((6.0..=16.0).contains(&r_max), "{r_max}");
    }
}
