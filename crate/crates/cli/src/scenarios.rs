//! One function per scenario: validate parameters, compute, tabulate, judge.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use cge_core::coarse_grain::{
    analytic_overlap, commutator_matrix, ladder_moments_from, reduced_cg_covariance, ModeFamily,
};
use cge_core::fock::{
    bound_check, dim_bounded, dim_exact, reduced_entropy, saturating_state, singlet_state,
    FockBasis, FockState,
};
use cge_core::lattice::LatticeModel;
use cge_core::newton_wigner::{convergence_metrics, one_particle_localization_fidelity, Wavepacket};
use cge_core::stats::least_squares;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, Scenario, ScenarioConfig};
use crate::report::{format_float, Cell, Verdict};
use crate::RunError;

/// Columns, rows and verdicts produced by a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub verdicts: Vec<Verdict>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
        }
    }
}

pub fn dispatch(config: &ScenarioConfig) -> Result<Table, RunError> {
    match config.scenario {
        Scenario::VacuumScaling => vacuum_scaling(config),
        Scenario::MassiveSaturation => massive_saturation(config),
        Scenario::Commutators => commutators(config),
        Scenario::CgPurity => cg_purity(config),
        Scenario::NwConvergence => nw_convergence(config),
        Scenario::LocalizationFidelity => localization_fidelity(config),
        Scenario::Singlet => singlet(config),
        Scenario::Bounds => bounds(config),
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> RunError {
    RunError::Config(ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    })
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Largest step `v[i+1] - v[i]`; negative iff the sequence strictly decreases.
fn largest_step(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn intervals(config: &ScenarioConfig, sites: usize) -> Result<Vec<usize>, RunError> {
    config
        .ints("intervals")
        .iter()
        .map(|&l| {
            if l < 1 || l as usize >= sites {
                Err(invalid("intervals", format!("interval {l} must lie in [1, {}]", sites - 1)))
            } else {
                Ok(l as usize)
            }
        })
        .collect()
}

fn log_chord(sites: usize, l: usize) -> f64 {
    let n = sites as f64;
    ((n / PI) * (PI * l as f64 / n).sin()).ln()
}

/// Entropies of the intervals `[0, L)` of the lattice vacuum, in sweep order.
fn interval_entropies(model: &LatticeModel, lengths: &[usize]) -> Result<Vec<f64>, RunError> {
    let cov = model.vacuum_covariance()?;
    Ok(lengths
        .par_iter()
        .map(|&l| {
            let region: Vec<usize> = (0..l).collect();
            cov.restrict(&region)?.entropy()
        })
        .collect::<Result<Vec<_>, _>>()?)
}

fn vacuum_scaling(config: &ScenarioConfig) -> Result<Table, RunError> {
    let sites = config.count("sites", 2, 8192)?;
    let mass = config.float("mass");
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(invalid("mass", "must be non-negative"));
    }
    let model = if mass > 0.0 {
        LatticeModel::new(sites, mass)?
    } else {
        LatticeModel::massless(sites)?.with_zero_mode_regulator(config.positive("zero_mode_regulator")?)
    };
    let lengths = intervals(config, sites)?;
    let entropies = interval_entropies(&model, &lengths)?;
    let chords: Vec<f64> = lengths.iter().map(|&l| log_chord(sites, l)).collect();

    let mut table = Table::new(&["interval", "log_chord", "entropy_nats"]);
    for ((&l, &c), &s) in lengths.iter().zip(&chords).zip(&entropies) {
        table.rows.push(vec![Cell::Int(l as i64), Cell::Float(c), Cell::Float(s)]);
    }
    let (lo, hi) = (config.float("slope_min"), config.float("slope_max"));
    let range = format!("in [{lo}, {hi}]");
    let rms_max = config.float("rms_max");
    if lengths.len() >= 2 {
        let fit = least_squares(&chords, &entropies);
        table.verdicts.push(Verdict::new("slope", fit.slope, range, (lo..=hi).contains(&fit.slope)));
        table.verdicts.push(Verdict::below("rms_residual", fit.rms_residual, rms_max));
    } else {
        table.verdicts.push(Verdict::missing("slope", range));
        table.verdicts.push(Verdict::missing("rms_residual", format!("< {rms_max}")));
    }
    Ok(table)
}

fn massive_saturation(config: &ScenarioConfig) -> Result<Table, RunError> {
    let sites = config.count("sites", 2, 8192)?;
    let model = LatticeModel::new(sites, config.positive("mass")?)?;
    let lengths = intervals(config, sites)?;
    let entropies = interval_entropies(&model, &lengths)?;

    let mut table = Table::new(&["interval", "log_chord", "entropy_nats"]);
    for (&l, &s) in lengths.iter().zip(&entropies) {
        table.rows.push(vec![
            Cell::Int(l as i64),
            Cell::Float(log_chord(sites, l)),
            Cell::Float(s),
        ]);
    }
    let tol = config.positive("tolerance")?;
    match entropies.len() {
        0 | 1 => table.verdicts.push(Verdict::missing("last_change", format!("< {tol}"))),
        n => {
            let change = (entropies[n - 1] - entropies[n - 2]).abs();
            table.verdicts.push(Verdict::below("last_change", change, tol));
        }
    }
    Ok(table)
}

/// Distance between two points on a ring of circumference `length`.
fn ring_distance(a: f64, b: f64, length: f64) -> f64 {
    let d = (a - b).rem_euclid(length);
    d.min(length - d)
}

fn commutators(config: &ScenarioConfig) -> Result<Table, RunError> {
    let sites = config.count("sites", 2, 1 << 16)?;
    let mass = config.positive("mass")?;
    let eps = config.positive("epsilon")?;
    let d = config.positive("spacing")?;
    let modes = config.count("modes", 1, 4096)?;
    let model = LatticeModel::new(sites, mass)?;
    let family = ModeFamily::new(&model, modes, d, eps, mass)?;
    let gram = commutator_matrix(&family);
    let centers = family.centers();
    let length = model.total_length();

    let mut table = Table::new(&["j", "k", "distance", "commutator", "analytic"]);
    let mut diagonal = 0.0f64;
    let mut offdiag = 0.0f64;
    for j in 0..modes {
        for k in j..modes {
            let dist = ring_distance(centers[j], centers[k], length);
            let g = gram[(j, k)];
            if j == k {
                diagonal = diagonal.max((g - 1.0).abs());
            } else {
                offdiag = offdiag.max(g.abs());
            }
            table.rows.push(vec![
                Cell::Int(j as i64),
                Cell::Int(k as i64),
                Cell::Float(dist),
                Cell::Float(g),
                Cell::Float(analytic_overlap(dist, eps)),
            ]);
        }
    }
    table.verdicts.push(Verdict::below("diagonal_deviation", diagonal, config.float("diagonal_tol")));
    if modes > 1 {
        let expected = analytic_overlap(d, eps);
        let rel = config.float("offdiag_rel_tol");
        let err = (offdiag - expected).abs() / expected;
        table.verdicts.push(Verdict::new(
            "max_offdiagonal",
            offdiag,
            format!("within {} of {}", format_float(rel), format_float(expected)),
            err <= rel,
        ));
        table.verdicts.push(Verdict::new(
            "neighbour_overlap",
            family.neighbour_overlap(),
            "< 1e-4 (approximately canonical)",
            family.is_approximately_canonical(),
        ));
    }
    Ok(table)
}

fn cg_purity(config: &ScenarioConfig) -> Result<Table, RunError> {
    let sites = config.count("sites", 2, 8192)?;
    let eps = config.positive("epsilon")?;
    let sweep = config.floats("mass_eps").to_vec();
    let check = config.positive("check_mass_eps")?;
    let tol = config.positive("purity_tol")?;

    let evaluate = |mu: f64| -> Result<[f64; 3], RunError> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(invalid("mass_eps", format!("entries must be positive, got {mu}")));
        }
        let mass = mu / eps;
        let model = LatticeModel::new(sites, mass)?;
        let family = ModeFamily::new(&model, 1, 1.0, eps, mass)?;
        let cov = reduced_cg_covariance(&family, &model, false)?;
        let spectrum = cov.symplectic_spectrum()?;
        let occupation = ladder_moments_from(&cov, mass)?.max_occupation();
        Ok([spectrum.max(), spectrum.entropy(), occupation])
    };
    let results = sweep.par_iter().map(|&mu| evaluate(mu)).collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&["mass_eps", "nu", "nu_minus_half", "entropy_nats", "occupation"]);
    for (&mu, [nu, s, n]) in sweep.iter().zip(&results) {
        table.rows.push(vec![
            Cell::Float(mu),
            Cell::Float(*nu),
            Cell::Float(nu - 0.5),
            Cell::Float(*s),
            Cell::Float(*n),
        ]);
    }
    let nus: Vec<f64> = results.iter().map(|r| r[0]).collect();
    if nus.len() >= 2 {
        table.verdicts.push(Verdict::new(
            "nu_decreasing",
            largest_step(&nus),
            "< 0 (strictly decreasing)",
            strictly_decreasing(&nus),
        ));
    } else {
        table.verdicts.push(Verdict::missing("nu_decreasing", "< 0 (strictly decreasing)"));
    }
    let nu_check = match sweep.iter().position(|&mu| mu == check) {
        Some(i) => nus[i],
        None => evaluate(check)?[0],
    };
    table.verdicts.push(Verdict::below("nu_minus_half_at_check", nu_check - 0.5, tol));
    Ok(table)
}

fn nw_convergence(config: &ScenarioConfig) -> Result<Table, RunError> {
    let eps = config.positive("epsilon")?;
    let sweep = config.floats("mass_eps").to_vec();
    let metrics = sweep
        .par_iter()
        .map(|&mu| -> Result<_, RunError> {
            let m = convergence_metrics(eps, mu / eps)?;
            let scaled = convergence_metrics(2.0 * eps, mu / eps / 2.0)?;
            let defect = (m.ratio - scaled.ratio)
                .abs()
                .max((m.gauss_distance - scaled.gauss_distance).abs());
            Ok((m, defect))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&[
        "mass_eps",
        "ratio",
        "gauss_distance",
        "minus_norm_sq",
        "plus_norm_sq",
        "quadrature_error",
        "scaling_defect",
    ]);
    for (&mu, (m, defect)) in sweep.iter().zip(&metrics) {
        table.rows.push(vec![
            Cell::Float(mu),
            Cell::Float(m.ratio),
            Cell::Float(m.gauss_distance),
            Cell::Float(m.minus_norm_squared.value),
            Cell::Float(m.plus_norm_squared.value),
            Cell::Float(m.minus_norm_squared.error.max(m.plus_norm_squared.error)),
            Cell::Float(*defect),
        ]);
    }

    let ratios: Vec<f64> = metrics.iter().map(|(m, _)| m.ratio).collect();
    if ratios.len() >= 2 {
        table.verdicts.push(Verdict::new(
            "ratio_decreasing",
            largest_step(&ratios),
            "< 0 (strictly decreasing)",
            strictly_decreasing(&ratios),
        ));
    } else {
        table.verdicts.push(Verdict::missing("ratio_decreasing", "< 0 (strictly decreasing)"));
    }
    match metrics.last() {
        Some((m, _)) => {
            table.verdicts.push(Verdict::below("ratio_at_end", m.ratio, config.float("ratio_tol")));
            table.verdicts.push(Verdict::below(
                "gauss_distance_at_end",
                m.gauss_distance,
                config.float("gauss_tol"),
            ));
            let worst = metrics.iter().map(|(_, d)| *d).fold(0.0, f64::max);
            table.verdicts.push(Verdict::below("scaling_defect", worst, config.float("scaling_tol")));
        }
        None => {
            table.verdicts.push(Verdict::missing("ratio_at_end", "nonempty sweep"));
        }
    }
    let (lo, hi) = (config.float("fit_min"), config.float("fit_max"));
    let (x, y): (Vec<f64>, Vec<f64>) = sweep
        .iter()
        .zip(&ratios)
        .filter(|(mu, _)| (lo..=hi).contains(*mu))
        .map(|(mu, r)| (mu.ln(), r.ln()))
        .unzip();
    let (p0, dp) = (config.float("exponent"), config.float("exponent_tol"));
    let criterion = format!("in [{}, {}]", p0 - dp, p0 + dp);
    if x.len() >= 2 {
        let p = -least_squares(&x, &y).slope;
        table.verdicts.push(Verdict::new("decay_exponent", p, criterion, (p - p0).abs() <= dp));
    } else {
        table.verdicts.push(Verdict::missing("decay_exponent", criterion));
    }
    Ok(table)
}

/// Localization fidelity of a centred Gaussian packet for one value of `m eps`.
pub fn fidelity_at(config: &ScenarioConfig, mu: f64) -> Result<f64, RunError> {
    let sites = config.count("sites", 2, 1 << 16)?;
    let eps = config.positive("epsilon")?;
    let d = config.positive("spacing")?;
    let modes = config.count("modes", 1, 4096)?;
    let width = config.positive("packet_width")?;
    if !(mu.is_finite() && mu > 0.0) {
        return Err(invalid("mass_eps", format!("entries must be positive, got {mu}")));
    }
    let mass = mu / eps;
    let model = LatticeModel::new(sites, mass)?;
    let family = ModeFamily::new(&model, modes, d, eps, mass)?;
    let center = (modes - 1) as f64 * d / 2.0;
    let packet = Wavepacket::gaussian(center, width)?;
    Ok(one_particle_localization_fidelity(&packet, &family, mass)?)
}

fn localization_fidelity(config: &ScenarioConfig) -> Result<Table, RunError> {
    let sweep = config.floats("mass_eps").to_vec();
    let fidelities = sweep
        .par_iter()
        .map(|&mu| fidelity_at(config, mu))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["mass_eps", "fidelity"]);
    for (&mu, &f) in sweep.iter().zip(&fidelities) {
        table.rows.push(vec![Cell::Float(mu), Cell::Float(f)]);
    }
    let lookup = |mu: f64| match sweep.iter().position(|&s| s == mu) {
        Some(i) => Ok(fidelities[i]),
        None => fidelity_at(config, mu),
    };
    let high = lookup(config.positive("high_mass_eps")?)?;
    let low = lookup(config.positive("low_mass_eps")?)?;
    let min = config.float("fidelity_min");
    table.verdicts.push(Verdict::new(
        "fidelity_at_high_mass",
        high,
        format!("> {min}"),
        high > min,
    ));
    table.verdicts.push(Verdict::new(
        "low_minus_high",
        low - high,
        "< 0 (lower fidelity at low mass)",
        low < high,
    ));
    Ok(table)
}

fn singlet(config: &ScenarioConfig) -> Result<Table, RunError> {
    let modes = config.count("modes", 2, 64)?;
    let max_total = config.count("max_total", 2, 64)?;
    let i = config.count("site_i", 0, modes as i64 - 1)?;
    let j = config.count("site_j", 0, modes as i64 - 1)?;
    let tol = config.positive("tolerance")?;
    let basis = Arc::new(FockBasis::new(modes, max_total, true)?);
    let state = singlet_state(i, j, &basis)?;

    let mut table = Table::new(&["site", "entropy_nats", "expected_nats", "bound_nats", "pass"]);
    let mut entropies = Vec::new();
    for site in [i, j] {
        let check = bound_check(&state, &[site])?;
        let pass = (check.entropy - LN_2).abs() < tol && check.satisfied;
        table.rows.push(vec![
            Cell::Int(site as i64),
            Cell::Float(check.entropy),
            Cell::Float(LN_2),
            Cell::Float(check.bound),
            Cell::Bool(pass),
        ]);
        entropies.push(check.entropy);
    }
    table.verdicts.push(Verdict::below("entropy_i_error", (entropies[0] - LN_2).abs(), tol));
    table.verdicts.push(Verdict::below("entropy_j_error", (entropies[1] - LN_2).abs(), tol));
    table.verdicts.push(Verdict::below("site_asymmetry", (entropies[0] - entropies[1]).abs(), 1e-12));
    Ok(table)
}

fn bounds(config: &ScenarioConfig) -> Result<Table, RunError> {
    let modes = config.count("modes", 2, 16)?;
    let max_total = config.count("max_total", 0, 16)?;
    let trials = config.count("trials", 0, 1_000_000)?;
    let dim_m = config.count("dim_max_modes", 1, 4096)?;
    let dim_n = config.count("dim_max_total", 0, 64)?;
    let sat_m = config.count("saturation_modes", 2, 16)?;
    let sat_n = config.count("saturation_total", 0, 16)?;
    let asym_m = config.count("asymptotic_modes", 2, 1 << 30)?;
    let asym_n = config.count("asymptotic_total", 1, 64)?;
    let asym_tol = config.positive("asymptotic_tol")?;

    // Draw every state and bipartition serially so the sample is independent of
    // the thread schedule.
    let basis = Arc::new(FockBasis::new(modes, max_total, false)?);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    let samples: Vec<(FockState, Vec<usize>)> = (0..trials)
        .map(|_| {
            let state = FockState::random(Arc::clone(&basis), &mut rng);
            let mask: u32 = rng.random_range(1..(1u32 << modes) - 1);
            let subset = (0..modes).filter(|k| mask & (1 << k) != 0).collect();
            (state, subset)
        })
        .collect();
    let checks = samples
        .par_iter()
        .map(|(state, subset)| -> Result<_, RunError> {
            let complement: Vec<usize> = (0..modes).filter(|k| !subset.contains(k)).collect();
            let check = bound_check(state, subset)?;
            let other = reduced_entropy(state, &complement)?.nats;
            Ok((check, other))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&[
        "trial",
        "subset",
        "entropy_nats",
        "complement_entropy_nats",
        "bound_nats",
        "satisfied",
    ]);
    let mut worst_margin = f64::NEG_INFINITY;
    let mut worst_asymmetry = 0.0f64;
    let mut all_satisfied = true;
    for (t, ((_, subset), (check, other))) in samples.iter().zip(&checks).enumerate() {
        let label = subset.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
        table.rows.push(vec![
            Cell::Int(t as i64),
            Cell::Text(label),
            Cell::Float(check.entropy),
            Cell::Float(*other),
            Cell::Float(check.bound),
            Cell::Bool(check.satisfied),
        ]);
        worst_margin = worst_margin.max(check.entropy - check.bound);
        worst_asymmetry = worst_asymmetry.max((check.entropy - other).abs());
        all_satisfied &= check.satisfied;
    }
    if trials > 0 {
        table.verdicts.push(Verdict::new(
            "bound_margin",
            worst_margin,
            "<= 1e-9 for every trial",
            all_satisfied,
        ));
        table.verdicts.push(Verdict::below("complement_asymmetry", worst_asymmetry, 1e-10));
    }

    let mut mismatches = 0u32;
    for m in 1..=dim_m {
        for n in 0..=dim_n {
            let sum: u128 = (0..=n).map(|k| dim_exact(m, k)).sum::<Result<u128, _>>()?;
            if sum != dim_bounded(m, n)? {
                mismatches += 1;
            }
        }
    }
    table.verdicts.push(Verdict::new(
        "dimension_identity_mismatches",
        f64::from(mismatches),
        "= 0",
        mismatches == 0,
    ));

    let sat_basis = Arc::new(FockBasis::new(sat_m, sat_n, false)?);
    let witness = bound_check(&saturating_state(&sat_basis, &[0])?, &[0])?;
    table.verdicts.push(Verdict::below(
        "saturation_gap",
        (witness.bound - witness.entropy).abs(),
        1e-9,
    ));

    let ln_d = (dim_bounded(asym_m, asym_n)? as f64).ln();
    let rel = (ln_d / (asym_n as f64 * (asym_m as f64).ln()) - 1.0).abs();
    table.verdicts.push(Verdict::below("asymptotic_relative_error", rel, asym_tol));
    Ok(table)
}
