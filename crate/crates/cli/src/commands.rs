use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use num_complex::Complex64;
use qscalar::advection::{build_shear_advection, count_controlled_gates, count_two_qubit_gates};
use qscalar::hardware::{
    band_coverage, demo_ancilla_count, hardware_demo_circuit, reconstruct, run_demo, sample_reconstruction,
    DEMO_ALPHA, DEMO_BETA,
};
use qscalar::reference::{analytic_pulse_samples, error_norm};
use qscalar::splitting::{loglog_slope, pulse_convergence_point, run_scenario, run_scenario_with, RunOptions};
use qscalar::transforms::build_qft_circuit;
use qscalar::{Profile64, Splitting};
use rayon::prelude::*;

use crate::config::Scenario;
use crate::output::{num, reconstruction_table, Table};

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    let cfg = &scenario.config;
    let initial = scenario.initial_state()?;
    let result = run_scenario(cfg, &initial)?;
    let nx = cfg.points_x();
    let ny = cfg.points_y();
    let dy = if ny > 1 { cfg.length / (ny - 1) as f64 } else { 0.0 };
    for (k, cp) in result.checkpoint_states.iter().enumerate() {
        let mut t = Table::new(&["x", "y", "value"]);
        for (i, a) in cp.state.amplitudes().iter().enumerate() {
            let (ix, iy) = (i % nx, i / nx);
            t.push(vec![num(cfg.length * ix as f64 / nx as f64), num(dy * iy as f64), num(a.re)]);
        }
        t.save(&out_dir.join(format!("field_{k}.csv")))?;
    }

    let mut errors: Vec<(String, f64)> = result.error_norms.iter().map(|(k, v)| (k.clone(), *v)).collect();
    if scenario.has_analytic_solution() {
        let exact: Vec<Complex64> = analytic_pulse_samples(
            nx,
            cfg.t_final,
            cfg.velocity * cfg.profile.eval(0.0),
            cfg.diffusivity,
            cfg.length,
        )?
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
        errors.push(("analytic".into(), error_norm(&result.final_state, &exact)?));
    }
    let mut header = vec!["pe", "fo", "steps", "splitting", "success_prob", "oracle_success_prob"];
    let names: Vec<String> = errors.iter().map(|(k, _)| format!("error_{k}")).collect();
    header.extend(names.iter().map(String::as_str));
    let mut t = Table::new(&header);
    let mut row = vec![
        num(cfg.peclet()),
        num(cfg.fourier()),
        cfg.steps.to_string(),
        cfg.splitting.to_string(),
        num(result.success_prob()),
        result.oracle_success_prob.map(num).unwrap_or_default(),
    ];
    row.extend(errors.iter().map(|(_, v)| num(*v)));
    t.push(row);
    t.save(&out_dir.join("summary.csv"))?;

    println!(
        "Pe = {:.3}, Fo = {:.3}, success probability = {:.3}",
        cfg.peclet(),
        cfg.fourier(),
        result.success_prob()
    );
    for (k, v) in &errors {
        println!("error norm vs {k}: {v:.3e}");
    }
    println!("wrote {} field files to {}", result.checkpoint_states.len(), out_dir.display());
    Ok(())
}

#[derive(Debug, Clone)]
pub enum Sweep {
    GridSizes(Vec<usize>),
    StepCounts(Vec<usize>),
}

fn log2_exact(n: usize) -> Result<usize> {
    ensure!(n >= 2 && n.is_power_of_two(), "grid size {n} is not a power of two >= 2");
    Ok(n.trailing_zeros() as usize)
}

pub fn converge(scenario: &Scenario, sweep: &Sweep) -> Result<Table> {
    let base = &scenario.config;
    let opts = RunOptions {
        oracle: false,
        keep_checkpoints: false,
    };
    let (label, xs, rows): (&str, Vec<f64>, Vec<(usize, f64, f64)>) = match sweep {
        Sweep::GridSizes(sizes) => {
            ensure!(!sizes.is_empty(), "sweep list is empty");
            ensure!(scenario.has_analytic_solution(), "grid sweeps need the 1D uniform pulse scenario");
            let rows = sizes
                .par_iter()
                .map(|&n| -> Result<(usize, f64, f64)> {
                    let mut c = base.clone();
                    c.n_x = log2_exact(n)?;
                    c.splitting = Splitting::Trotter;
                    let t = pulse_convergence_point(&c)?.max_error;
                    c.splitting = Splitting::Strang;
                    let s = pulse_convergence_point(&c)?.max_error;
                    Ok((n, t, s))
                })
                .collect::<Result<Vec<_>>>()?;
            ("n", sizes.iter().map(|&n| n as f64).collect(), rows)
        }
        Sweep::StepCounts(steps) => {
            ensure!(!steps.is_empty(), "sweep list is empty");
            ensure!(steps.iter().all(|&s| s > 0), "step counts must be positive");
            let initial = scenario.initial_state()?;
            let max = *steps.iter().max().unwrap();
            let ref_steps = scenario.reference_steps.unwrap_or(16 * max);
            let mut rc = base.clone();
            rc.steps = ref_steps;
            rc.splitting = Splitting::Strang;
            let reference = run_scenario_with(&rc, &initial, opts)?.final_state;
            let rows = steps
                .par_iter()
                .map(|&s| -> Result<(usize, f64, f64)> {
                    let mut errs = [0.0; 2];
                    for (slot, split) in errs.iter_mut().zip([Splitting::Trotter, Splitting::Strang]) {
                        let mut c = base.clone();
                        c.steps = s;
                        c.splitting = split;
                        let r = run_scenario_with(&c, &initial, opts)?;
                        *slot = error_norm(&r.final_state, reference.amplitudes())?;
                    }
                    Ok((s, errs[0], errs[1]))
                })
                .collect::<Result<Vec<_>>>()?;
            ("n_t", steps.iter().map(|&s| base.t_final / s as f64).collect(), rows)
        }
    };
    let mut t = Table::new(&[label, "trotter_error", "strang_error"]);
    for (n, a, b) in &rows {
        t.push(vec![n.to_string(), num(*a), num(*b)]);
    }
    if rows.len() > 1 {
        let fit = |ys: Vec<f64>| loglog_slope(&xs, &ys).map(num).unwrap_or_default();
        let kt = fit(rows.iter().map(|r| r.1).collect());
        let ks = fit(rows.iter().map(|r| r.2).collect());
        let key = if label == "n" { "slope_vs_n" } else { "slope_vs_dt" };
        t.push(vec![key.to_string(), kt, ks]);
    }
    Ok(t)
}

pub fn gatecount(profile: &Profile64, n_min: usize, n_max: usize) -> Result<Table> {
    ensure!(n_min >= 1 && n_min <= n_max, "invalid qubit range {n_min}..={n_max}");
    let mut t = Table::new(&["n", "controlled_phases", "two_qubit_gates", "qft_two_qubit_gates"]);
    let mut ns = Vec::new();
    let mut cols: [Vec<f64>; 3] = Default::default();
    for n in n_min..=n_max {
        let c = build_shear_advection(profile, n, n, 1.0)?;
        let qft = build_qft_circuit::<f64>(n, false)?;
        let vals = [
            count_controlled_gates(&c),
            count_two_qubit_gates(&c),
            count_two_qubit_gates(&qft),
        ];
        t.push(vec![n.to_string(), vals[0].to_string(), vals[1].to_string(), vals[2].to_string()]);
        ns.push(n as f64);
        for (col, v) in cols.iter_mut().zip(vals) {
            col.push(v as f64);
        }
    }
    if ns.len() > 1 {
        let fit = |ys: &Vec<f64>| {
            if ys.iter().all(|&v| v > 0.0) {
                loglog_slope(&ns, ys).map(num).unwrap_or_default()
            } else {
                String::new()
            }
        };
        t.push(vec!["exponent".into(), fit(&cols[0]), fit(&cols[1]), fit(&cols[2])]);
    }
    Ok(t)
}

pub fn hardware_demo(n: usize, shots: u64, seed: u64, out_dir: &Path) -> Result<()> {
    if n < 2 {
        bail!("hardware demo needs n >= 2, got {n}");
    }
    ensure!(shots > 0, "shots must be positive");
    ensure_dir(out_dir)?;
    let circuit = hardware_demo_circuit::<f64>(n, DEMO_ALPHA, DEMO_BETA)?;
    std::fs::write(out_dir.join(format!("hardware_n{n}_circuit.txt")), circuit.to_listing())?;
    let outcome = run_demo::<f64>(n, DEMO_ALPHA, DEMO_BETA)?;
    let rows = sample_reconstruction(&outcome.probabilities, shots, seed)?;
    reconstruction_table(&rows).save(&out_dir.join(format!("hardware_n{n}.csv")))?;
    println!(
        "n = {n}, ancillas = {}, ideal success probability = {:.3}, bins inside 3 sigma = {:.3}",
        demo_ancilla_count(n)?,
        outcome.success_prob,
        band_coverage(&rows)
    );
    Ok(())
}

pub fn sample(scenario: &Scenario, shots: u64, seed: u64, out_dir: &Path) -> Result<()> {
    ensure!(shots > 0, "shots must be positive");
    ensure_dir(out_dir)?;
    let initial = scenario.initial_state()?;
    let opts = RunOptions {
        oracle: false,
        keep_checkpoints: false,
    };
    let result = run_scenario_with(&scenario.config, &initial, opts)?;
    let probs: Vec<f64> = result.final_state.probabilities();
    let counts = result.final_state.sample_counts(shots, seed)?;
    let rows = reconstruct(&probs, &counts, shots)?;
    reconstruction_table(&rows).save(&out_dir.join("sample.csv"))?;
    println!(
        "success probability = {:.3}, bins inside 3 sigma = {:.3}",
        result.success_prob(),
        band_coverage(&rows)
    );
    Ok(())
}
