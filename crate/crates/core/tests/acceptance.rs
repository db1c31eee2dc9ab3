//! Acceptance criteria, run in order with wall-clock budgets.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ugame::discrimination::{brute_force_projective, helstrom, DiscriminationProblem};
use ugame::game::{
    entropic_sum, fourier_matrix, gap_ratio, maassen_uffink_bound, pguess_max_d2, GameConfig,
};
use ugame::linalg::{haar_state, haar_unitary, ComplexMatrix};
use ugame::mesh::{clements_decompose, hwp_angle_for, mesh_reconstruct, prep_state_d3, reference_fourier_plan};
use ugame::noise::{
    controlled_visibility_channel, layer_dephasing_channel, visibility_channel, NoiseModel, NoisyMesh,
};
use ugame::optimizer::{optimal_state_d2, optimize_numeric, optimizer, OptimizeOptions, DEFAULT_RESTARTS};
use ugame::pipeline::{
    estimate_gamma, published, simulate_d2, simulate_d3, simulate_fourier_test, table_d3_strategies,
};
use ugame::DensityMatrix;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(name: &str, got: f64, want: f64, tol: f64) -> Outcome {
    check(
        (got - want).abs() <= tol,
        format!("{name}: got {got:.6}, want {want} ± {tol:e}"),
    )
}

fn all(results: Vec<Outcome>) -> Outcome {
    let mut msgs = Vec::new();
    let mut failed = false;
    for r in results {
        match r {
            Ok(m) => msgs.push(m),
            Err(m) => {
                failed = true;
                msgs.push(format!("FAILED {m}"));
            }
        }
    }
    let joined = msgs.join("; ");
    if failed {
        Err(joined)
    } else {
        Ok(joined)
    }
}

fn err(e: ugame::Error) -> String {
    e.to_string()
}

fn qubit_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in published::QUBIT_SWEEP {
        let p = pguess_max_d2(q.gamma).map_err(err)?;
        worst = worst.max((p - q.p_max).abs());
    }
    check(worst <= 1e-4, format!("11 points, max |Δ| = {worst:.2e} (≤ 1e-4)"))
}

fn qubit_noisy_pipeline() -> Outcome {
    let noise = NoiseModel::uniform(0.99, published::measured_register()).map_err(err)?;
    let probe = DensityMatrix::pure(&optimal_state_d2()).map_err(err)?;
    let m = published::qubit_measurement().map_err(err)?;
    let t = simulate_d2(&noise, &probe, &m).map_err(err)?;
    let got = [t.probs[0][0], t.probs[0][1], t.probs[1][0], t.probs[1][1]];
    let mut checks: Vec<Outcome> = got
        .iter()
        .zip(published::QUBIT_DETECTION_V099)
        .enumerate()
        .map(|(k, (g, w))| within(&format!("P[{k}]"), *g, w, 1e-3))
        .collect();
    checks.push(within("p_guess", t.p_guess, published::QUBIT_P_GUESS_V099, 5e-4));
    all(checks)
}

fn qutrit_noisy_pipeline() -> Outcome {
    let noise = NoiseModel::uniform(0.98, published::measured_register()).map_err(err)?;
    let probe = DensityMatrix::pure(&prep_state_d3(26.6, 5.9).map_err(err)?).map_err(err)?;
    let m = published::best_known_d3_measurement().map_err(err)?;
    let t = simulate_d3(&noise, &probe, &m).map_err(err)?;
    let mut checks = vec![within("p_guess", t.p_guess, published::THREE_PATH_P_GUESS_V098, 1e-3)];
    let f = simulate_fourier_test(0.98).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (row, expected) in f.iter().zip(published::FOURIER_PREDICTED_V098) {
        for (x, e) in row.iter().zip(expected) {
            worst = worst.max((x - e).abs());
        }
    }
    checks.push(check(worst <= 1e-4, format!("Fourier table max |Δ| = {worst:.2e} (≤ 1e-4)")));
    all(checks)
}

fn mesh_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        for _ in 0..200 {
            let u = haar_unitary(d, &mut rng);
            let plan = clements_decompose(&u).map_err(err)?;
            worst = worst.max(mesh_reconstruct(&plan).map_err(err)?.max_abs_diff(&u));
        }
    }
    let f3 = fourier_matrix(3).map_err(err)?;
    let plan = reference_fourier_plan();
    let plan_err = mesh_reconstruct(&plan).map_err(err)?.max_abs_diff(&f3);
    let hwp: Vec<f64> = plan.layers.iter().map(|l| hwp_angle_for(l.theta)).collect::<Result<_, _>>().map_err(err)?;
    all(vec![
        check(worst <= 1e-9, format!("600 Haar round trips, max err {worst:.1e}")),
        check(plan_err <= 1e-6, format!("reference plan vs F3 err {plan_err:.1e}")),
        within("H7", hwp[0], 22.5, 0.05),
        within("H9", hwp[1], 17.6, 0.05),
        within("H10", hwp[2], 22.5, 0.05),
        within("θ=π/4 check", hwp_angle_for(FRAC_PI_4).map_err(err)?, 22.5, 0.05),
    ])
}

fn optimizer_targets() -> Outcome {
    let mut checks = Vec::new();
    for g in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let r = optimize_numeric(&GameConfig::new(2, g).map_err(err)?, DEFAULT_RESTARTS, 1).map_err(err)?;
        checks.push(within(&format!("d=2 γ={g}"), r.p_guess, pguess_max_d2(g).map_err(err)?, 1e-5));
    }
    let r = optimize_numeric(&GameConfig::new(3, 1.0).map_err(err)?, 64, 7).map_err(err)?;
    checks.push(check(r.p_guess >= 0.9788, format!("d=3 γ=1: {:.6} (≥ 0.9788)", r.p_guess)));
    checks.push(check(r.p_guess <= 0.99, format!("d=3 γ=1 stays below 0.99: {:.6}", r.p_guess)));
    let r = optimize_numeric(&GameConfig::new(3, 0.0).map_err(err)?, 64, 7).map_err(err)?;
    checks.push(within("d=3 γ=0", r.p_guess, 0.5 * (1.0 + 1.0 / 3f64.sqrt()), 1e-4));
    all(checks)
}

fn qutrit_strategies() -> Outcome {
    let rows = table_d3_strategies().map_err(err)?;
    all(rows
        .iter()
        .map(|r| within(&format!("state {}", r.index), r.p_guess_model, r.p_guess_paper, 5e-4))
        .collect())
}

fn gamma_and_gap() -> Outcome {
    let e = estimate_gamma(&published::measured_register()).map_err(err)?;
    let g = gap_ratio(published::BEST_KNOWN_D3_P, 0.9611).map_err(err)?;
    all(vec![
        within("γ", e.gamma, 0.9918, 2e-4),
        check(e.fidelity >= 0.9995, format!("fidelity {:.5} (≥ 0.9995)", e.fidelity)),
        within("gap ratio", g.ratio, 0.4679, 2e-4),
    ])
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);

    // Helstrom vs exhaustive projective search; angular grid error ε ≤ δ/√2
    // costs at most ‖Δr‖(1 − cos ε)/2 ≤ δ²/4.
    let grid = 180;
    let delta = std::f64::consts::PI / grid as f64;
    let bound = delta * delta / 4.0;
    let mut worst_gap: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..500 {
        use rand::Rng;
        let q: f64 = rng.gen();
        let mut mk = |w: f64| {
            let mix: f64 = rng.gen();
            let pure = ComplexMatrix::outer(&haar_state(2, &mut rng)).scale_re(mix);
            (&pure + &ComplexMatrix::identity(2).scale_re((1.0 - mix) / 2.0)).scale_re(w)
        };
        let p = DiscriminationProblem::new(vec![mk(q), mk(1.0 - q)]).map_err(err)?;
        let h = helstrom(&p).map_err(err)?.p_success;
        let o = brute_force_projective(&p, grid).map_err(err)?;
        worst_gap = worst_gap.max(h - o);
        if o > h + 1e-12 || h > o + bound {
            violations += 1;
        }
    }

    let mut kraus_worst: f64 = 0.0;
    for v in [0.0, 0.5, 0.9, 0.98, 0.99, 1.0] {
        for d in 2..=4 {
            for m in 0..d - 1 {
                kraus_worst = kraus_worst.max(visibility_channel(m, m + 1, v, d).map_err(err)?.completeness_deviation());
                kraus_worst = kraus_worst
                    .max(controlled_visibility_channel(m, m + 1, v, d).map_err(err)?.completeness_deviation());
            }
        }
        kraus_worst = kraus_worst.max(layer_dephasing_channel(v).map_err(err)?.completeness_deviation());
        let mesh = NoisyMesh::uniform(reference_fourier_plan(), v).map_err(err)?;
        kraus_worst = kraus_worst.max(mesh.channel().map_err(err)?.completeness_deviation());
    }

    let mut mu_violations = 0;
    for d in 2..=3 {
        let id = ComplexMatrix::identity(d);
        let f = fourier_matrix(d).map_err(err)?;
        let bound = maassen_uffink_bound(&id, &f).map_err(err)?;
        for _ in 0..500 {
            let rho = DensityMatrix::pure(&haar_state(d, &mut rng)).map_err(err)?;
            if entropic_sum(&rho, &id, &f).map_err(err)? < bound - 1e-9 {
                mu_violations += 1;
            }
        }
    }

    let mut runs = 0;
    let mut non_monotone = 0;
    for (d, gamma) in [(2, 0.3), (3, 0.0), (3, 0.6), (3, 1.0)] {
        for name in ["seesaw-nm", "seesaw-eigen"] {
            let opts = OptimizeOptions {
                restarts: 8,
                seed: 3,
                record_trace: true,
                ..Default::default()
            };
            let r = optimizer(name)
                .map_err(err)?
                .optimize(&GameConfig::new(d, gamma).map_err(err)?, &opts)
                .map_err(err)?;
            for t in &r.traces {
                runs += 1;
                if t.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                    non_monotone += 1;
                }
            }
        }
    }

    all(vec![
        check(
            violations == 0,
            format!("Helstrom vs grid oracle: {violations}/500 outside [oracle, oracle + {bound:.1e}], max gap {worst_gap:.1e}"),
        ),
        check(kraus_worst <= 1e-10, format!("Kraus completeness max dev {kraus_worst:.1e}")),
        check(mu_violations == 0, format!("entropic bound: {mu_violations}/1000 violations")),
        check(non_monotone == 0, format!("see-saw: {non_monotone}/{runs} logged runs non-monotone")),
    ])
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("qubit closed-form sweep", Duration::from_secs(1), qubit_closed_form),
        ("qubit noisy pipeline", Duration::from_secs(1), qubit_noisy_pipeline),
        ("qutrit noisy pipeline and Fourier test", Duration::from_secs(1), qutrit_noisy_pipeline),
        ("mesh correctness", Duration::from_secs(10), mesh_correctness),
        ("optimizer targets", Duration::from_secs(60), optimizer_targets),
        ("qutrit strategy predictions", Duration::from_secs(2), qutrit_strategies),
        ("coherence estimate and gap ratio", Duration::from_secs(5), gamma_and_gap),
        ("property suites", Duration::from_secs(120), property_suites),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > *budget;
        let (status, detail) = match (&outcome, over) {
            (Ok(m), false) => ("PASS", m.clone()),
            (Ok(m), true) => ("FAIL", format!("{m}; over budget {budget:?}")),
            (Err(m), _) => ("FAIL", m.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {}: {status} [{name}] ({:.2?}) {detail}", k + 1, elapsed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
