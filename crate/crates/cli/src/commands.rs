use std::path::{Path, PathBuf};
use std::thread;

use pdm_core::grid::{uniform_points, GridFunction};
use pdm_core::math;
use pdm_core::operator::{
    apply_factorized, apply_pi, apply_pi_squared, apply_von_roos_kinetic, hermiticity_defect,
    hermiticity_defect_expanded, max_difference, scaling_pair,
};
use pdm_core::ordering::{catalog, compare_orderings, OrderingParameters};
use pdm_core::pct::{self, PctMapping, ReferenceModel};
use pdm_core::profiles::{validate_profile, CoordinateMap, Domain, MassProfile, PotentialProfile, Profile};
use pdm_core::radial::{self, RadialError, RadialProblem, SolverKind, Spectrum};

use crate::config::ProblemConfig;
use crate::error::CliError;
use crate::table::{fmt_float, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Fd,
    Shoot,
    Both,
}

impl SolverChoice {
    fn kinds(self) -> Vec<SolverKind> {
        match self {
            SolverChoice::Fd => vec![SolverKind::FdZ],
            SolverChoice::Shoot => vec![SolverKind::Shooting],
            SolverChoice::Both => vec![SolverKind::Shooting, SolverKind::FdZ],
        }
    }
}

fn radial_error(e: RadialError) -> CliError {
    match e {
        RadialError::InvalidProblem(msg) => CliError::Config(msg),
        other => CliError::solver(other),
    }
}

/// Builds the radial problem, picking `r_max` automatically when the config
/// leaves it out.
pub fn radial_problem(cfg: &ProblemConfig, potential: PotentialProfile) -> Result<RadialProblem, CliError> {
    let s = &cfg.solver;
    let mut p = RadialProblem::new(cfg.problem.d, cfg.problem.angular, cfg.mass().clone(), potential, 1.0)
        .with_ordering(cfg.problem.ordering.clone())
        .with_laplacian_mode(cfg.problem.laplacian_mode)
        .with_grid(s.grid_n);
    p.tolerance = s.tolerance;
    p.r_min = s.r_min;
    p.r_max = match s.r_max {
        Some(r) => r,
        None => {
            let r = radial::suggest_r_max(&p, s.n_max, (10.0 * s.r_min).max(1.0)).map_err(radial_error)?;
            log::info!("chose r_max = {r}");
            r
        }
    };
    p.validate().map_err(radial_error)?;
    Ok(p)
}

/// Runs the solvers, on separate threads when `jobs > 1`. Results keep the
/// order of `kinds`.
fn run_solvers(p: &RadialProblem, n_max: usize, kinds: &[SolverKind], jobs: usize) -> Result<Vec<Spectrum>, CliError> {
    let results: Vec<Result<Spectrum, RadialError>> = if jobs > 1 && kinds.len() > 1 {
        thread::scope(|scope| {
            let handles: Vec<_> = kinds.iter().map(|&k| scope.spawn(move || radial::solve(p, n_max, k))).collect();
            handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
        })
    } else {
        kinds.iter().map(|&k| radial::solve(p, n_max, k)).collect()
    };
    let spectra = results.into_iter().collect::<Result<Vec<_>, _>>().map_err(radial_error)?;
    for s in &spectra {
        for m in &s.missing {
            log::warn!("level n_r = {} missing: {}", m.n_r, m.reason);
        }
        for l in s.levels.iter().filter(|l| !l.reliable) {
            log::warn!("{}: level n_r = {} is under-resolved (fewer than 20 points per oscillation)", s.solver.as_str(), l.n_r);
        }
    }
    Ok(spectra)
}

pub fn solve(cfg: &ProblemConfig, choice: SolverChoice, jobs: usize) -> Result<Table, CliError> {
    let p = radial_problem(cfg, cfg.potential()?.clone())?;
    let spectra = run_solvers(&p, cfg.solver.n_max, &choice.kinds(), jobs)?;
    let mut table = Table::new(&["n_r", "E", "solver", "node_count", "est_error"]);
    for s in &spectra {
        for l in &s.levels {
            table.push(vec![
                l.n_r.to_string(),
                fmt_float(l.energy),
                s.solver.as_str().into(),
                l.node_count.to_string(),
                fmt_float(l.est_error),
            ]);
        }
    }
    Ok(table)
}

fn sample_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo > 0.0 && hi / lo > 100.0 {
        let (a, b) = (lo.ln(), hi.ln());
        uniform_points(a, b, n).into_iter().map(f64::exp).collect()
    } else {
        uniform_points(lo, hi, n)
    }
}

pub fn effpot(cfg: &ProblemConfig, orderings: &[String], points: usize) -> Result<Table, CliError> {
    if points < 2 {
        return Err(CliError::Config("--points must be at least 2".into()));
    }
    let list = if orderings.is_empty() {
        vec![cfg.problem.ordering.clone()]
    } else {
        orderings
            .iter()
            .map(|o| OrderingParameters::from_spec(o).map_err(|e| CliError::Config(format!("--ordering: {e}"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let r_max = cfg.solver.r_max.unwrap_or(10.0);
    let grid = uniform_points(cfg.solver.r_min, r_max, points);
    let v = cfg.potential()?;
    let t = compare_orderings(&list, cfg.mass(), v, &grid, cfg.problem.d, cfg.problem.laplacian_mode)
        .map_err(CliError::solver)?;
    let mut header = vec!["r".to_string(), "V".to_string()];
    if list.len() == 1 {
        header.push("Vtilde".into());
    } else {
        header.extend(t.labels.iter().map(|l| format!("Vtilde_{l}")));
        header.extend(t.differences.iter().map(|(a, b, _)| format!("{}_minus_{}", t.labels[*b], t.labels[*a])));
    }
    let mut table = Table::new(&header);
    for (i, r) in t.points.iter().enumerate() {
        let mut row = vec![fmt_float(*r), fmt_float(t.potential[i])];
        row.extend(t.columns.iter().map(|c| fmt_float(c[i])));
        if list.len() > 1 {
            row.extend(t.differences.iter().map(|(_, _, d)| fmt_float(d[i])));
        }
        table.push(row);
    }
    Ok(table)
}

/// Spectrum comparison plus the `(r, Z, U_d, V_eff)` mapping table.
pub struct PctOutput {
    pub spectrum: Table,
    pub mapping: Table,
    /// Lines for the error stream.
    pub notes: Vec<String>,
}

pub fn pct(cfg: &ProblemConfig, reference: Option<&str>, jobs: usize) -> Result<PctOutput, CliError> {
    let mass = cfg.mass();
    let (coeff, upsilon) = mass
        .power_law_params()
        .ok_or_else(|| CliError::Config("pct needs a power-law or constant mass in [mass]".into()))?;
    let reference = reference
        .map(|r| ReferenceModel::from_spec(r).map_err(|e| CliError::Config(e.to_string())))
        .transpose()?;
    let (d, angular, n_max) = (cfg.problem.d, cfg.problem.angular, cfg.solver.n_max);
    if cfg.problem.ordering.kinetic_coefficients() != OrderingParameters::mm().kinetic_coefficients() {
        log::warn!("predictions assume the mm ordering; numeric columns use {}", cfg.problem.ordering.label());
    }
    let mut notes = Vec::new();
    let (potential, predicted, mapping, problem) = if upsilon == -2.0 {
        let potential = match &reference {
            Some(ReferenceModel::Oscillator { k }) => PotentialProfile::new(Profile::composed(
                Profile::power_law(*k, 2.0).with_domain(Domain::REAL_LINE),
                CoordinateMap::Log { coeff: math::sqrt(coeff) },
                Domain::POSITIVE,
            )),
            Some(other) => {
                return Err(CliError::solver(format!(
                    "reference {other:?} has no whole-line spectrum for the inverse-square mass"
                )))
            }
            None => cfg.potential()?.clone(),
        };
        let case = pct::special_case_inverse_square(mass, &potential, d, angular).map_err(CliError::solver)?;
        let exact = case.shift_exact.map(|q| format!(" (exact {q})")).unwrap_or_default();
        notes.push(format!("inverse-square mass: constant shift U_tilde_d = {}{exact}", fmt_float(case.shift)));
        let problem = radial_problem(cfg, potential.clone())?;
        let window = (case.mapping.forward(problem.r_min).map_err(CliError::solver)?, case.mapping.forward(problem.r_max).map_err(CliError::solver)?);
        let predicted = case.predict(reference.as_ref(), n_max, window, problem.grid_n).map_err(CliError::solver)?;
        (potential, predicted, case.mapping, problem)
    } else {
        let reference = reference.unwrap_or(ReferenceModel::Oscillator { k: 1.0 });
        let target = pct::map_reference_to_target(&reference, mass, d, angular, n_max).map_err(CliError::solver)?;
        if cfg.has_potential() {
            log::warn!("[potential] is replaced by the potential built from {}", target.reference);
        }
        notes.push(format!("lambda = {}", fmt_float(target.lambda)));
        let problem = radial_problem(cfg, target.potential.clone())?;
        (target.potential, target.predicted, target.mapping, problem)
    };
    let spectra = run_solvers(&problem, n_max, &[SolverKind::Shooting, SolverKind::FdZ], jobs)?;
    let mut spectrum = Table::new(&["n_r", "E_predicted", "E_shooting", "E_fd", "rel_dev"]);
    for (n_r, &e) in predicted.iter().enumerate() {
        let shoot = spectra[0].energy(n_r).unwrap_or(f64::NAN);
        let fd = spectra[1].energy(n_r).unwrap_or(f64::NAN);
        let dev = ((shoot - e).abs().max((fd - e).abs())) / e.abs();
        spectrum.push(vec![n_r.to_string(), fmt_float(e), fmt_float(shoot), fmt_float(fd), fmt_float(dev)]);
    }
    let mapping = mapping_table(&mapping, mass, &potential, &problem)?;
    Ok(PctOutput { spectrum, mapping, notes })
}

fn mapping_table(
    map: &PctMapping,
    mass: &MassProfile,
    v: &PotentialProfile,
    p: &RadialProblem,
) -> Result<Table, CliError> {
    let mut table = Table::new(&["r", "Z", "U_d", "V_eff"]);
    for r in sample_points(p.r_min, p.r_max, 201) {
        let z = map.forward(r).map_err(CliError::solver)?;
        let u = pct::u_d(mass, r, p.d).map_err(CliError::solver)?;
        let value = v.eval(r).map_err(CliError::solver)?;
        table.push(vec![fmt_float(r), fmt_float(z), fmt_float(u), fmt_float(value - u)]);
    }
    Ok(table)
}

/// `<stem>_mapping.csv` next to `out`.
pub fn derived_mapping_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "pct".into());
    out.with_file_name(format!("{stem}_mapping.csv"))
}

struct Check {
    name: &'static str,
    rows: Vec<(usize, f64)>,
}

/// Operator self-checks on `[x_min, x_max]` at `N`, `2N`, `4N`. Returns the
/// report and, separately, any check that missed its target.
pub fn verify_operator(cfg: &ProblemConfig) -> Result<(Table, Vec<String>), CliError> {
    let o = &cfg.operator;
    let mass = cfg.mass();
    let zero = PotentialProfile::new(Profile::constant(0.0));
    let v = if cfg.has_potential() { cfg.potential()? } else { &zero };
    let report = validate_profile(mass, (o.x_min, o.x_max), o.grid_n.min(1000));
    if !report.passed() {
        return Err(CliError::Config(format!(
            "[mass] is not positive and finite on [{}, {}]: {} positivity violations, {} evaluation failures",
            o.x_min, o.x_max, report.positivity_violations.len(), report.evaluation_failures.len()
        )));
    }
    let centre = 0.5 * (o.x_min + o.x_max);
    let width = (o.x_max - o.x_min) / 16.0;
    let sizes = [o.grid_n, 2 * o.grid_n, 4 * o.grid_n];
    let mut checks = vec![
        Check { name: "pi_squared_vs_von_roos_mm", rows: Vec::new() },
        Check { name: "factorized_vs_pi_squared_plus_v", rows: Vec::new() },
        Check { name: "pi_twice_vs_closed_form", rows: Vec::new() },
        Check { name: "hermiticity_split", rows: Vec::new() },
        Check { name: "hermiticity_expanded", rows: Vec::new() },
    ];
    for &n in &sizes {
        let psi = GridFunction::sample_real(o.x_min, o.x_max, n, |x| {
            let s = (x - centre) / width;
            math::exp(-s * s)
        })
        .map_err(CliError::solver)?;
        let phi = GridFunction::sample_real(o.x_min, o.x_max, n, |x| {
            let s = (x - centre) / width - 0.5;
            s * math::exp(-s * s)
        })
        .map_err(CliError::solver)?;
        let squared = apply_pi_squared(mass, &psi).map_err(CliError::solver)?;
        let von_roos = apply_von_roos_kinetic(&OrderingParameters::mm(), mass, &psi).map_err(CliError::solver)?;
        checks[0].rows.push((n, max_difference(&squared, &von_roos, 0) / squared.max_abs()));

        let factorized = apply_factorized(mass, v, &psi).map_err(CliError::solver)?;
        let mut plus_v = Vec::with_capacity(n);
        for ((&x, k), p) in psi.points().iter().zip(squared.values()).zip(psi.values()) {
            plus_v.push(k + p * v.eval(x).map_err(CliError::solver)?);
        }
        let plus_v = psi.with_values(plus_v).map_err(CliError::solver)?;
        checks[1].rows.push((n, max_difference(&factorized, &plus_v, 0)));

        let sp = scaling_pair(mass, psi.points()).map_err(CliError::solver)?;
        let twice = apply_pi(&sp, &apply_pi(&sp, &psi).map_err(CliError::solver)?).map_err(CliError::solver)?;
        checks[2].rows.push((n, max_difference(&twice, &squared, 2)));

        checks[3].rows.push((n, hermiticity_defect(&sp, &phi, &psi).map_err(CliError::solver)?.relative));
        checks[4].rows.push((n, hermiticity_defect_expanded(&sp, &phi, &psi).map_err(CliError::solver)?.relative));
    }
    let mut table = Table::new(&["test_name", "grid_N", "residual_inf", "observed_order"]);
    let mut failures = Vec::new();
    for check in &checks {
        let mut finest_order = f64::NAN;
        for (i, &(n, residual)) in check.rows.iter().enumerate() {
            // no order once the residual is at rounding level
            let order = match i.checked_sub(1).map(|j| check.rows[j]) {
                Some((n0, r0)) if r0.min(residual) > 1e-13 => {
                    (r0 / residual).ln() / ((n as f64 - 1.0) / (n0 as f64 - 1.0)).ln()
                }
                _ => f64::NAN,
            };
            finest_order = order;
            table.push(vec![check.name.into(), n.to_string(), fmt_float(residual), fmt_float(order)]);
        }
        let finest = check.rows.last().map(|r| r.1).unwrap_or(f64::NAN);
        let ok = match check.name {
            "pi_squared_vs_von_roos_mm" => finest <= 1e-12,
            "hermiticity_split" => finest <= 1e-8,
            // at machine precision there is nothing left to converge
            _ => finest <= 1e-12 || (finest_order - 2.0).abs() <= 0.2,
        };
        if !ok {
            failures.push(format!("{}: residual {} order {}", check.name, fmt_float(finest), fmt_float(finest_order)));
        }
    }
    Ok((table, failures))
}

pub fn orderings() -> Table {
    let mut table = Table::new(&["name", "alpha", "beta", "gamma", "c_lap", "c_grad"]);
    for o in catalog() {
        let exact = o.exact.expect("catalog entries are exact");
        let k = o.kinetic_coefficients();
        let (c_lap, c_grad) = k.exact.expect("catalog entries are exact");
        table.push(vec![
            o.label(),
            exact.alpha.to_string(),
            exact.beta.to_string(),
            exact.gamma.to_string(),
            c_lap.to_string(),
            c_grad.to_string(),
        ]);
    }
    table
}
