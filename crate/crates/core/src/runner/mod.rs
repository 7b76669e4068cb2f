//! Experiment orchestration: config ingestion, scenario dispatch, seeded
//! reproducibility, and tabular output.
//!
//! A run is a pure function of (config, seed): the same inputs always render
//! the same bytes. Five scenarios are wired up:
//!
//! - `polarimeter_phase`: one simulated polarimeter fringe with the extracted
//!   mixed-state phase in the metadata,
//! - `non_additivity`: mixed-state phases of a geometric/dynamical split
//!   against beam purity,
//! - `interferogram`: fitted interferogram phases against the rf-flipper
//!   phase (or one raw fringe),
//! - `chsh_polar`: Bell-test S under the polar-angle compensation,
//! - `chsh_azimuthal`: Bell-test S under the azimuthal compensation, next to
//!   the uncorrected curve.

pub mod config;
pub mod table;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::path::PathBuf;
use thiserror::Error;

pub use config::{
    validate, Angle, ChshAzimuthalBlock, ChshPolarBlock, Diagnostic, ExperimentConfig, GridSpec,
    InterferogramBlock, InterferogramTable, NonAdditivityBlock, PolarimeterBlock,
    PolarizationChoice, ScalarGridSpec, Scenario, SCHEMA_VERSION,
};
pub use table::ResultTable;

use crate::bell::{
    azimuthal_adjust, numerical_polar_max, polar_adjust, s_from_counts, s_standard,
    simulate_counts, BellSetting,
};
use crate::interferometry::{flipper_phase_scan, fringe_phase, o_beam_intensity, InterferometerScan};
use crate::polarimetry::{
    non_additivity_report, simulate_fringe_scan, NoiseModel, PolarimeterConfig,
};
use crate::spin::{mixed_phase_theory, Su2Params};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("cannot write {path}: {source}")]
    IoFailure {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid(block: &str, err: impl std::fmt::Display) -> RunnerError {
    RunnerError::ConfigInvalid(format!("{block}: {err}"))
}

/// Validate, execute, and (when an output path is configured) write one run.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable, RunnerError> {
    let diags = validate(config);
    if !diags.is_empty() {
        let joined: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(RunnerError::ConfigInvalid(joined.join("; ")));
    }
    let table = match config.scenario {
        Scenario::PolarimeterPhase => run_polarimeter(config)?,
        Scenario::NonAdditivity => run_non_additivity(config)?,
        Scenario::Interferogram => run_interferogram(config)?,
        Scenario::ChshPolar => run_chsh_polar(config)?,
        Scenario::ChshAzimuthal => run_chsh_azimuthal(config)?,
    };
    if let Some(path) = &config.output {
        table.write(path)?;
    }
    Ok(table)
}

/// Table skeleton with the standard metadata header: library version, run
/// controls, and a canonical echo of the full config.
fn base_table(config: &ExperimentConfig, columns: &[&str]) -> ResultTable {
    let mut t = ResultTable::new(columns.to_vec());
    t.push_metadata(format!("geophase v{}", env!("CARGO_PKG_VERSION")));
    t.push_metadata(format!("scenario = {}", config.scenario.name()));
    t.push_metadata(format!("seed = {}", config.seed));
    t.push_metadata(format!("analytic = {}", config.analytic));
    t.push_metadata("config:");
    for line in config.canonical_toml().lines() {
        t.push_metadata(format!("  {line}"));
    }
    t
}

fn run_polarimeter(config: &ExperimentConfig) -> Result<ResultTable, RunnerError> {
    let b = config.polarimeter.as_ref().expect("validated block");
    let pcfg = PolarimeterConfig {
        params: Su2Params::new(b.xi.0, b.delta.0, b.zeta.0),
        purity: b.purity,
        eta: b.eta_grid.values(),
        counts_per_point: b.counts_per_point,
        seed: config.seed,
        analytic: config.analytic,
    };
    let noise = if b.jitter_sigma > 0.0 {
        NoiseModel::AngleJitter { sigma: b.jitter_sigma }
    } else {
        NoiseModel::None
    };
    let scan = simulate_fringe_scan(&pcfg, noise).map_err(|e| invalid("polarimeter", e))?;

    let mut t = base_table(config, &["eta_rad", "counts", "model"]);
    let estimate = scan.phase_estimate().map_err(|e| invalid("polarimeter", e))?;
    let theory = mixed_phase_theory(scan.effective_purity, b.delta.0)
        .map_err(|e| invalid("polarimeter", e))?;
    t.push_metadata(format!("extracted_phase = {}", table::format_value(estimate.phase)));
    t.push_metadata(format!("extracted_sigma = {}", table::format_value(estimate.sigma)));
    t.push_metadata(format!("theory_phase = {}", table::format_value(theory.abs())));
    t.push_metadata(format!(
        "effective_purity = {}",
        table::format_value(scan.effective_purity)
    ));
    for i in 0..scan.eta.len() {
        t.push_row(vec![scan.eta[i], scan.counts[i], scan.model[i]]);
    }
    Ok(t)
}

fn run_non_additivity(config: &ExperimentConfig) -> Result<ResultTable, RunnerError> {
    let b = config.non_additivity.as_ref().expect("validated block");
    let mut t = base_table(config, &["r", "Phi_g", "Phi_d", "Phi_tot", "sum", "gap"]);
    for r in b.purity_grid.values() {
        let rep = non_additivity_report(r, b.phi_g.0, b.phi_d.0)
            .map_err(|e| invalid("non_additivity", e))?;
        t.push_row(vec![
            r,
            rep.mixed_geometric,
            rep.mixed_dynamical,
            rep.mixed_total,
            rep.additive_sum,
            rep.gap(),
        ]);
    }
    Ok(t)
}

fn run_interferogram(config: &ExperimentConfig) -> Result<ResultTable, RunnerError> {
    let b = config.interferogram.as_ref().expect("validated block");
    let phi_i_values = b.phi_i_grid.values();
    let scan = InterferometerScan {
        chi: b.chi_values(),
        phi_i: phi_i_values[0],
        phi_ii: b.phi_ii.0,
        initial_polarization: b.initial_polarization.into(),
        analysis_delta: b.analysis_delta.0,
    };
    match b.table {
        InterferogramTable::Phase => {
            let sweep = flipper_phase_scan(&scan, &phi_i_values)
                .map_err(|e| invalid("interferogram", e))?;
            let mut t = base_table(config, &["phi_I", "fringe_phase", "slope_fit"]);
            t.push_metadata(format!("intercept = {}", table::format_value(sweep.intercept)));
            t.push_metadata(format!("contrast = {}", table::format_value(sweep.contrast)));
            for &(phi_i, phase) in &sweep.points {
                t.push_row(vec![phi_i, phase, sweep.slope]);
            }
            Ok(t)
        }
        InterferogramTable::Fringe => {
            let mut t = base_table(config, &["chi", "counts", "model"]);
            t.push_metadata(format!("phi_I = {}", table::format_value(scan.phi_i)));
            t.push_metadata(format!(
                "expected_shift = {}",
                table::format_value(scan.expected_shift())
            ));
            let fitted = fringe_phase(&scan).map_err(|e| invalid("interferogram", e))?;
            t.push_metadata(format!("fitted_phase = {}", table::format_value(fitted)));
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for &chi in &scan.chi {
                let model = b.counts_per_point * o_beam_intensity(&scan, chi);
                let counts = if config.analytic || model <= 0.0 {
                    model.max(0.0)
                } else {
                    Poisson::new(model)
                        .map_err(|e| invalid("interferogram", e))?
                        .sample(&mut rng)
                };
                t.push_row(vec![chi, counts, model]);
            }
            Ok(t)
        }
    }
}

/// How a CHSH table row turns a setting into an S value: exact closed form,
/// or seeded multinomial counts at the four measurement pairs.
struct CountsPlan<'a> {
    block: &'a str,
    analytic: bool,
    total: u64,
    seed: u64,
}

fn chsh_s(
    plan: &CountsPlan<'_>,
    setting: &BellSetting,
    gamma: f64,
    analytic_s: f64,
    row: u64,
) -> Result<f64, RunnerError> {
    if plan.analytic {
        return Ok(analytic_s);
    }
    let pairs = [
        (setting.alpha, setting.beta),
        (setting.alpha, setting.beta_p),
        (setting.alpha_p, setting.beta),
        (setting.alpha_p, setting.beta_p),
    ];
    let mut counts = Vec::with_capacity(4);
    for (j, &(a, bb)) in pairs.iter().enumerate() {
        counts.push(simulate_counts(a, bb, gamma, plan.total, mix_seed(plan.seed, row, j as u64)));
    }
    s_from_counts(&counts[0], &counts[1], &counts[2], &counts[3])
        .map_err(|e| invalid(plan.block, e))
}

/// Stable per-(row, setting) stream seed: splitmix-style finalizer over the
/// run seed and the two indices.
fn mix_seed(seed: u64, row: u64, slot: u64) -> u64 {
    let mut z = seed
        ^ row.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ slot.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_chsh_polar(config: &ExperimentConfig) -> Result<ResultTable, RunnerError> {
    let b = config.chsh_polar.as_ref().expect("validated block");
    let mut t = base_table(config, &["gamma", "S", "beta1", "beta1p"]);
    t.push_metadata(
        "alpha at polar 0 is realized by a beam block; computed as an ordinary projector",
    );
    t.push_metadata(format!("optimizer = {}", if b.numerical { "grid+simplex" } else { "closed form" }));
    let plan = CountsPlan {
        block: "chsh_polar",
        analytic: config.analytic,
        total: b.total_counts,
        seed: config.seed,
    };
    for (k, gamma) in b.gamma_grid.values().into_iter().enumerate() {
        let adjusted = if b.numerical {
            numerical_polar_max(gamma).map_err(|e| invalid("chsh_polar", e))?
        } else {
            polar_adjust(gamma)
        };
        let s = chsh_s(&plan, &adjusted.angles, gamma, adjusted.s_value, k as u64)?;
        t.push_row(vec![
            gamma,
            s,
            adjusted.angles.beta.polar,
            adjusted.angles.beta_p.polar,
        ]);
    }
    Ok(t)
}

fn run_chsh_azimuthal(config: &ExperimentConfig) -> Result<ResultTable, RunnerError> {
    let b = config.chsh_azimuthal.as_ref().expect("validated block");
    let mut t = base_table(config, &["gamma", "S", "alpha2p", "S_uncorrected"]);
    t.push_metadata(
        "alpha at polar 0 is realized by a beam block; computed as an ordinary projector",
    );
    let plan = CountsPlan {
        block: "chsh_azimuthal",
        analytic: config.analytic,
        total: b.total_counts,
        seed: config.seed,
    };
    for (k, gamma) in b.gamma_grid.values().into_iter().enumerate() {
        let adjusted = azimuthal_adjust(gamma);
        let s = chsh_s(&plan, &adjusted.angles, gamma, adjusted.s_value, k as u64)?;
        t.push_row(vec![gamma, s, adjusted.angles.alpha_p.azimuthal, s_standard(gamma)]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(text).expect("test config parses")
    }

    #[test]
    fn azimuthal_run_is_flat_at_the_quantum_maximum() {
        let cfg = config(
            "version = 1\nscenario = \"chsh_azimuthal\"\nanalytic = true\n\
             [chsh_azimuthal.gamma_grid]\nstart = 0.0\nstop = 3.141592653589793\npoints = 9\n",
        );
        let t = run(&cfg).unwrap();
        assert_eq!(t.columns, vec!["gamma", "S", "alpha2p", "S_uncorrected"]);
        for row in &t.rows {
            assert!((row[1] - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
            assert!((row[3] - s_standard(row[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn non_additivity_gap_shrinks_to_zero_at_unit_purity() {
        let cfg = config(
            "version = 1\nscenario = \"non_additivity\"\n\
             [non_additivity]\nphi_g = 0.7853981633974483\nphi_d = 0.7853981633974483\n\
             [non_additivity.purity_grid]\nstart = 0.1\nstop = 1.0\npoints = 10\n",
        );
        let t = run(&cfg).unwrap();
        let gaps: Vec<f64> = t.rows.iter().map(|r| r[5]).collect();
        for pair in gaps.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "gap must shrink with purity: {gaps:?}");
        }
        assert!(gaps.last().unwrap().abs() < 1e-12);
    }

    #[test]
    fn run_rejects_invalid_configs_with_the_key_path() {
        let cfg = config(
            "version = 1\nscenario = \"polarimeter_phase\"\n\
             [polarimeter]\nxi = 0.785\ndelta = 0.7\npurity = 1.5\n\
             [polarimeter.eta_grid]\nstart = 0.0\nstop = 3.2\npoints = 32\n",
        );
        let err = run(&cfg).unwrap_err();
        assert!(err.to_string().contains("polarimeter.purity"), "{err}");
    }

    #[test]
    fn analytic_polarimeter_run_extracts_the_theory_phase() {
        let cfg = config(
            "version = 1\nscenario = \"polarimeter_phase\"\nanalytic = true\n\
             [polarimeter]\nxi = 0.6\ndelta = 0.9\npurity = 0.75\n\
             [polarimeter.eta_grid]\nstart = 0.0\nstop = 3.141592653589793\npoints = 32\n",
        );
        let t = run(&cfg).unwrap();
        let grab = |key: &str| -> f64 {
            t.metadata
                .iter()
                .find_map(|l| l.strip_prefix(&format!("{key} = ")))
                .expect("metadata key present")
                .parse()
                .unwrap()
        };
        assert!((grab("extracted_phase") - grab("theory_phase")).abs() < 1e-9);
    }

    #[test]
    fn interferogram_slopes_match_polarization() {
        for (pol, want) in [("up", 1.0), ("down", -1.0)] {
            let cfg = config(&format!(
                "version = 1\nscenario = \"interferogram\"\nanalytic = true\n\
                 [interferogram]\ninitial_polarization = \"{pol}\"\nphi_ii = 0.4\n\
                 [interferogram.phi_i_grid]\nstart = 0.0\nstop = 6.283185307179586\npoints = 13\n"
            ));
            let t = run(&cfg).unwrap();
            for row in &t.rows {
                assert!((row[2] - want).abs() < 1e-9, "slope for {pol}");
            }
        }
    }

    #[test]
    fn sampled_runs_are_byte_identical_across_reruns() {
        let text = "version = 1\nscenario = \"chsh_polar\"\nseed = 11\n\
                    [chsh_polar]\ntotal_counts = 2000\nnumerical = false\n\
                    [chsh_polar.gamma_grid]\nstart = 0.0\nstop = 1.5\npoints = 4\n";
        let a = run(&config(text)).unwrap().render();
        let b = run(&config(text)).unwrap().render();
        assert_eq!(a, b);
        assert!(a.contains(&format!("seed = {}", 11)));
    }

    #[test]
    fn fringe_table_has_model_and_counts() {
        let cfg = config(
            "version = 1\nscenario = \"interferogram\"\nseed = 3\n\
             [interferogram]\ntable = \"fringe\"\nphi_ii = 0.0\ncounts_per_point = 5000\n\
             [interferogram.phi_i_grid]\nstart = 1.1\nstop = 1.1\npoints = 1\n",
        );
        let t = run(&cfg).unwrap();
        assert_eq!(t.columns, vec!["chi", "counts", "model"]);
        assert_eq!(t.rows.len(), 65);
        // the crest sits between grid points, so allow the discretization sag
        let max_model = t.rows.iter().map(|r| r[2]).fold(0.0f64, f64::max);
        assert!(max_model <= 2500.0 + 1e-9 && max_model > 2490.0, "max {max_model}");
        // sampled counts stay near the model at this exposure
        for row in &t.rows {
            assert!((row[1] - row[2]).abs() < 6.0 * row[2].max(25.0).sqrt());
        }
        let fitted: f64 = t
            .metadata
            .iter()
            .find_map(|l| l.strip_prefix("fitted_phase = "))
            .unwrap()
            .parse()
            .unwrap();
        assert!((fitted - 1.1).abs() < 1e-9);
    }

    #[test]
    fn chi_grid_must_cover_a_period() {
        let cfg = config(&format!(
            "version = 1\nscenario = \"interferogram\"\n\
             [interferogram]\nphi_ii = 0.0\n\
             [interferogram.phi_i_grid]\nstart = 0.0\nstop = {}\npoints = 5\n\
             [interferogram.chi_grid]\nstart = 0.0\nstop = 3.0\npoints = 16\n",
            2.0 * PI
        ));
        let err = run(&cfg).unwrap_err();
        assert!(err.to_string().contains("chi_grid"), "{err}");
    }
}
