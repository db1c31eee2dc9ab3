use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use ugame::discrimination::{best_projective_two_bucket_any, helstrom, DiscriminationProblem};
use ugame::game::{register_state, GameConfig};
use ugame::linalg::normalize;
use ugame::mesh::{clements_decompose, prep_state_d2, prep_state_d3, waveplates_to_guess_measurement};
use ugame::noise::{NoiseConfig, NoiseModel};
use ugame::optimizer::{optimizer, OptimizeOptions};
use ugame::pipeline::{self, published};
use ugame::{ComplexMatrix, DensityMatrix, Measurement, C64};

use crate::output::{complex6, f6, j6, j6_opt, matrix6, Report};
use crate::CliError;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<[f64; 2]>> = read_json(path)?;
    Ok(ComplexMatrix::from_pairs(&rows)?)
}

pub fn curve_d2(gammas: &[f64], paper_points: bool, v: f64) -> Result<Report, CliError> {
    let mut all = gammas.to_vec();
    if paper_points {
        all.extend(pipeline::published_gammas());
    }
    if all.is_empty() {
        return Err(CliError::validation("no gamma values (use --gamma or --paper-points)"));
    }
    let rows = pipeline::curve_d2(&all, v)?;
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "gamma": j6(r.gamma),
                "p_max_analytic": j6(r.p_max_analytic),
                "p_guess_model": j6(r.p_guess_model),
                "p_guess_paper": j6_opt(r.p_guess_paper),
            })
        })
        .collect();
    let mut report = Report::new(
        &["gamma", "p_max_analytic", "p_guess_model", "p_guess_paper"],
        json!({ "layer_v": j6(v), "rows": json_rows }),
    );
    for r in &rows {
        report.row(vec![
            f6(r.gamma),
            f6(r.p_max_analytic),
            f6(r.p_guess_model),
            r.p_guess_paper.map(f6).unwrap_or_default(),
        ]);
    }
    Ok(report)
}

pub fn table2() -> Result<Report, CliError> {
    let rows = pipeline::table_d3_strategies()?;
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "state": r.index,
                "h1_deg": j6(r.h1_deg),
                "h2_deg": j6(r.h2_deg),
                "q1_deg": j6(r.quarter_deg),
                "h12_deg": j6(r.half_deg),
                "amplitudes": r.state.iter().map(|&a| complex6(a)).collect::<Vec<_>>(),
                "p_guess_model": j6(r.p_guess_model),
                "p_guess_paper": j6(r.p_guess_paper),
                "p_exp_paper": j6(r.p_exp_paper),
            })
        })
        .collect();
    let mut report = Report::new(
        &[
            "state", "h1_deg", "h2_deg", "q1_deg", "h12_deg", "a0_re", "a0_im", "a1_re", "a1_im", "a2_re", "a2_im",
            "p_guess_model", "p_guess_paper", "p_exp_paper",
        ],
        json!({ "gamma": j6(published::MEASURED_GAMMA), "rows": json_rows }),
    );
    for r in &rows {
        let mut cells = vec![r.index.to_string(), f6(r.h1_deg), f6(r.h2_deg), f6(r.quarter_deg), f6(r.half_deg)];
        for a in &r.state {
            cells.push(f6(a.re));
            cells.push(f6(a.im));
        }
        cells.extend([f6(r.p_guess_model), f6(r.p_guess_paper), f6(r.p_exp_paper)]);
        report.row(cells);
    }
    Ok(report)
}

pub fn fourier(v: f64) -> Result<Report, CliError> {
    let p = pipeline::simulate_fourier_test(v)?;
    let mut report = Report::new(
        &["output_mode", "probe_0", "probe_1", "probe_2"],
        json!({
            "v": j6(v),
            "probs": p.iter().map(|r| r.iter().map(|&x| j6(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    );
    for (i, r) in p.iter().enumerate() {
        let mut cells = vec![i.to_string()];
        cells.extend(r.iter().map(|&x| f6(x)));
        report.row(cells);
    }
    Ok(report)
}

pub fn decompose(path: &Path) -> Result<Report, CliError> {
    let u = read_matrix(path)?;
    let plan = clements_decompose(&u)?;
    let export = plan.to_export()?;
    let json = serde_json::to_value(&export).map_err(CliError::internal)?;
    let mut report = Report::new(&["layer", "m", "n", "theta_rad", "phi_rad", "orientation", "waveplate", "deg"], json);
    for (k, (l, w)) in export.layers.iter().zip(&export.waveplates).enumerate() {
        report.row(vec![
            k.to_string(),
            l.m.to_string(),
            l.n.to_string(),
            l.theta_rad.to_string(),
            l.phi_rad.to_string(),
            serde_json::to_value(l.orientation)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            w.label.clone(),
            w.deg.to_string(),
        ]);
    }
    Ok(report)
}

pub fn optimize(d: usize, gamma: f64, method: &str, restarts: usize, seed: u64, threads: Option<usize>) -> Result<Report, CliError> {
    let config = GameConfig::new(d, gamma)?;
    let opts = OptimizeOptions {
        restarts,
        seed,
        threads,
        ..Default::default()
    };
    let r = optimizer(method)?.optimize(&config, &opts)?;
    let json = json!({
        "method": r.method,
        "d": r.d,
        "gamma": j6(r.gamma),
        "seed": r.seed,
        "restarts": r.restarts_used,
        "p_guess": j6(r.p_guess),
        "best_state": r.best_state.iter().map(|&a| complex6(a)).collect::<Vec<_>>(),
        "measurement": r.best_measurement.elements().iter().map(matrix6).collect::<Vec<_>>(),
    });
    let mut header: Vec<String> = ["method", "d", "gamma", "seed", "restarts", "p_guess"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut cells = vec![
        r.method.to_string(),
        r.d.to_string(),
        f6(r.gamma),
        r.seed.to_string(),
        r.restarts_used.to_string(),
        f6(r.p_guess),
    ];
    for (k, a) in r.best_state.iter().enumerate() {
        header.push(format!("a{k}_re"));
        header.push(format!("a{k}_im"));
        cells.push(f6(a.re));
        cells.push(f6(a.im));
    }
    let mut report = Report::new(&[], json);
    report.header = header;
    report.row(cells);
    Ok(report)
}

/// How the probe is given in a run description.
#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ProbeSpec {
    /// Amplitudes as `[re, im]` pairs (normalized on load).
    Amplitudes(Vec<[f64; 2]>),
    /// Preparation waveplate angles: one for d=2, two for d=3.
    WaveplatesDeg(Vec<f64>),
}

/// How the register measurement is given in a run description.
#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum MeasurementSpec {
    /// Quarter- and half-waveplate angles.
    WaveplatesDeg([f64; 2]),
    /// Explicit elements; accepted within 1e-3 of completeness/positivity.
    Elements(Vec<Vec<Vec<[f64; 2]>>>),
    /// Best measurement for the noisy states (Helstrom / best two-bucket).
    Optimal,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    d: usize,
    /// Ideal register coherence, used when `noise.rho_R_exp` is absent.
    #[serde(default)]
    gamma: Option<f64>,
    noise: NoiseConfig,
    probe: ProbeSpec,
    measurement: MeasurementSpec,
}

pub fn simulate(path: &Path) -> Result<Report, CliError> {
    let cfg: SimulateConfig = read_json(path)?;
    if !(2..=3).contains(&cfg.d) {
        return Err(CliError::validation(format!("simulate supports d=2 or d=3, got {}", cfg.d)));
    }
    let default_register = match cfg.gamma {
        Some(g) => register_state(g)?,
        None => published::measured_register(),
    };
    let noise = NoiseModel::from_config(&cfg.noise, &default_register)?;
    let amplitudes: Vec<C64> = match &cfg.probe {
        ProbeSpec::Amplitudes(a) => normalize(&a.iter().map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>()),
        ProbeSpec::WaveplatesDeg(angles) => match (cfg.d, angles.as_slice()) {
            (2, [t]) => prep_state_d2(*t)?,
            (3, [t1, t2]) => prep_state_d3(*t1, *t2)?,
            _ => return Err(CliError::validation("waveplates_deg needs 1 angle for d=2, 2 for d=3")),
        },
    };
    let probe = DensityMatrix::pure(&amplitudes)?;
    let states = match cfg.d {
        2 => pipeline::noisy_ensemble_d2(&noise, &probe)?,
        _ => pipeline::noisy_mesh_ensemble(&noise, &probe, &ugame::mesh::reference_fourier_plan())?,
    };
    let measurement = match &cfg.measurement {
        MeasurementSpec::WaveplatesDeg([q, h]) => waveplates_to_guess_measurement(*q, *h, cfg.d)?,
        MeasurementSpec::Elements(els) => {
            let elements = els
                .iter()
                .map(|e| ComplexMatrix::from_pairs(e))
                .collect::<Result<Vec<_>, _>>()?;
            Measurement::with_tolerance(elements, 1e-3)?
        }
        MeasurementSpec::Optimal => {
            let problem = DiscriminationProblem::new(states.clone())?;
            match cfg.d {
                2 => helstrom(&problem)?.measurement,
                _ => best_projective_two_bucket_any(&problem)?.1.measurement,
            }
        }
    };
    let table = ugame::DetectionTable::from_states(&states, &measurement)?;
    let json = json!({
        "d": cfg.d,
        "v": j6(noise.visibility),
        "layer_v": j6(noise.layer_visibility),
        "probs": table.probs.iter().map(|r| r.iter().map(|&x| j6(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "p_guess": j6(table.p_guess),
        "active_outcomes": table.active_outcomes,
    });
    let mut report = Report::new(&["guess", "outcome", "probability", "p_guess"], json);
    for (i, row) in table.probs.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            report.row(vec![i.to_string(), j.to_string(), f6(p), f6(table.p_guess)]);
        }
    }
    Ok(report)
}

pub fn estimate_gamma(path: &Path, step: f64) -> Result<Report, CliError> {
    let rho = DensityMatrix::new(read_matrix(path)?)?;
    let e = pipeline::estimate_gamma_with_step(&rho, step)?;
    let mut report = Report::new(&["gamma", "fidelity"], json!({ "gamma": j6(e.gamma), "fidelity": j6(e.fidelity) }));
    report.row(vec![f6(e.gamma), f6(e.fidelity)]);
    Ok(report)
}
