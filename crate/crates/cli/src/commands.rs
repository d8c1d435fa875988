use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use hubbard_cd::cdsynth::gauge_basis;
use hubbard_cd::evolve::{
    energy_error, run_evolution, sweep, EvolutionPlan, MeasurementMode, Variant,
};
use hubbard_cd::fermion::build_hamiltonians;
use hubbard_cd::gatecount::{layer_count, trotter_step_count, LayerCount, StepCount, GATES_PER_TWO_BODY_STRING};
use hubbard_cd::lattice::{HoneycombLattice, Spin};
use hubbard_cd::oracle::{self, GoldenRegistry, Method, Sector};
use hubbard_cd::stateprep::{givens_angles, initial_circuit, prepare_initial, single_particle_orbitals};
use hubbard_cd::vqa::{self, build_ansatz, lattice_pool, AnsatzKind, CostMode, Problem, TrainConfig, TrainingTrace};

use crate::config::{Algorithm, ExperimentConfig, Mode};

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub struct Session {
    pub cfg: ExperimentConfig,
    pub lat: HoneycombLattice,
    started: Instant,
}

impl Session {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        let lat = HoneycombLattice::build(cfg.nx, cfg.ny)?;
        fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
        Ok(Session {
            cfg,
            lat,
            started: Instant::now(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    /// CSV with a versioned schema line and the config echo as `#` comments.
    fn write_csv(&self, name: &str, schema: &str, header: &str, rows: &str) -> Result<PathBuf> {
        let mut text = format!("# schema: {schema}.v{CSV_SCHEMA_VERSION}\n# config: {}\n{header}\n", self.cfg.echo_line());
        text.push_str(rows);
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn write_summary(&self, name: &str, command: &str, mut body: Value) -> Result<PathBuf> {
        let obj = body.as_object_mut().expect("summary is an object");
        obj.insert("command".into(), json!(command));
        obj.insert("config".into(), self.cfg.echo());
        obj.insert("seed".into(), json!(self.cfg.seed));
        obj.insert("out".into(), json!(self.cfg.out));
        obj.insert("wall_time_s".into(), json!(self.started.elapsed().as_secs_f64()));
        let path = self.path(name);
        fs::write(&path, serde_json::to_string_pretty(&body)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn measurement(&self) -> MeasurementMode {
        match self.cfg.mode {
            Mode::Exact => MeasurementMode::Exact,
            Mode::Shots { shots } => MeasurementMode::Shots {
                shots,
                seed: self.cfg.seed,
            },
        }
    }
}

/// Reference `E₀` from the golden registry, else from the oracle. Failure
/// is reported in the returned JSON rather than aborting the run.
fn reference_energy(ctx: &Session) -> (Option<f64>, Value) {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let sector = Sector::half_filling(lat);
    let sector_json = json!([sector.n_up, sector.n_down]);
    if let Some(g) = GoldenRegistry::builtin().lookup((cfg.nx, cfg.ny), cfg.tau, cfg.u, sector) {
        return (
            Some(g.energy),
            json!({"e0": g.energy, "source": "golden", "sector": sector_json, "tol": g.tol}),
        );
    }
    match oracle::ground_energy(lat, cfg.tau, cfg.u, sector) {
        Ok(g) => (
            Some(g.energy),
            json!({
                "e0": g.energy,
                "source": format!("{:?}", g.method).to_lowercase(),
                "sector": sector_json,
                "dim": g.dim,
                "residual": g.residual,
                "converged": true,
            }),
        ),
        Err(e) => (
            None,
            json!({"e0": null, "sector": sector_json, "converged": false, "error": e.to_string()}),
        ),
    }
}

fn step_json(s: &StepCount) -> Value {
    json!({
        "variant": s.variant.name(),
        "hopping": s.hopping,
        "coulomb": s.coulomb,
        "cd": s.cd,
        "cd_strings": s.cd_strings,
        "total": s.total,
        "reference": s.reference,
        "ratio": s.ratio(),
    })
}

fn layer_json(l: &LayerCount) -> Value {
    json!({
        "ansatz": l.kind.name(),
        "params": l.params,
        "coulomb_gates": l.coulomb_gates,
        "hopping_gates": l.hopping_gates,
        "fswaps": l.fswaps,
        "cd_generators": l.cd_generators,
        "cd_strings": l.cd_strings,
        "basic_total": l.tally.total,
        "basic_by_source": l.tally.by_source,
        "basic_by_kind": l.tally.by_basic,
    })
}

pub fn prepare(ctx: &Session) -> Result<Vec<PathBuf>> {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let hams = build_hamiltonians(lat, cfg.tau, cfg.u)?;
    let psi = prepare_initial(lat, cfg.tau)?;
    let sector = Sector::half_filling(lat);
    let mut rows = String::new();
    let mut occupied = 0.0;
    for spin in Spin::BOTH {
        let basis = single_particle_orbitals(lat, cfg.tau, spin)?;
        occupied += basis.occupied_energy();
        for (a, b, theta) in givens_angles(&basis.orbitals)? {
            let tag = if spin == Spin::Up { "up" } else { "down" };
            writeln!(rows, "{tag},{a},{b},{theta:.15}")?;
        }
    }
    let csv = ctx.write_csv("givens.csv", "givens", "spin,mode_a,mode_b,theta", &rows)?;
    let circuit = initial_circuit(lat, cfg.tau)?;
    let body = json!({
        "n_qubits": lat.n_qubits(),
        "sector": [sector.n_up, sector.n_down],
        "hopping_energy": oracle::expectation(&psi, &hams.h_hop)?,
        "occupied_orbital_sum": occupied,
        "fh_energy": oracle::expectation(&psi, &hams.h_fh)?,
        "leakage": psi.leakage(lat.spin_mask(Spin::Up), sector.n_up, lat.spin_mask(Spin::Down), sector.n_down),
        "gates": circuit.histogram().into_iter().collect::<std::collections::BTreeMap<_, _>>(),
    });
    Ok(vec![csv, ctx.write_summary("prepare_summary.json", "prepare", body)?])
}

pub fn evolve(ctx: &Session, variant: Variant) -> Result<Vec<PathBuf>> {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let plan = EvolutionPlan::new(variant, cfg.steps, cfg.dt)?.with_order(cfg.order)?;
    let run = run_evolution(&plan, lat, cfg.tau, cfg.u, ctx.measurement())?;
    let schedule = plan.schedule();
    let mut rows = String::new();
    for r in &run.records {
        let std_err = r.std_err.map_or(String::new(), |s| format!("{s:.12}"));
        writeln!(rows, "{},{:.12},{:.12},{:.12},{}", r.step, r.t, schedule.lambda(r.t)?, r.energy, std_err)?;
    }
    let name = format!("evolve_{}", variant.name());
    let csv = ctx.write_csv(&format!("{name}.csv"), "evolve", "step,t,lambda,energy,std_err", &rows)?;
    let (e0, oracle_json) = reference_energy(ctx);
    let delta = e0.and_then(|e| energy_error(run.final_energy(), e, run.initial_energy()).ok());
    let body = json!({
        "variant": variant.name(),
        "initial_energy": run.initial_energy(),
        "final_energy": run.final_energy(),
        "delta_e_pct": delta,
        "max_leakage": run.max_leakage,
        "oracle": oracle_json,
        "gate_counts": step_json(&trotter_step_count(lat, cfg.tau, cfg.u, variant)?),
    });
    Ok(vec![csv, ctx.write_summary(&format!("{name}_summary.json"), "evolve", body)?])
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn vqa(ctx: &Session, kind: AnsatzKind) -> Result<Vec<PathBuf>> {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let hams = build_hamiltonians(lat, cfg.tau, cfg.u)?;
    let problem = Problem::new(build_ansatz(kind, lat, cfg.tau, cfg.u, cfg.layers)?, lat, hams)?;
    let mode = match cfg.mode {
        Mode::Exact => CostMode::Exact,
        Mode::Shots { shots } => CostMode::Shots { shots },
    };
    let traces: Vec<TrainingTrace> = (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|k| {
            let tc = TrainConfig {
                eta: cfg.eta,
                max_iter: cfg.max_iter,
                seed: cfg.seed + k,
                mode,
                noise: cfg.noise_model(),
                trajectories: cfg.trajectories,
                ..TrainConfig::default()
            };
            vqa::train(&problem, &tc).map_err(anyhow::Error::from)
        })
        .collect::<Result<_>>()?;
    let mut paths = Vec::new();
    for t in &traces {
        let body = t.csv();
        let (header, rows) = body.split_once('\n').expect("trace has a header");
        paths.push(ctx.write_csv(
            &format!("trace_{}_seed{}.csv", kind.name(), t.config.seed),
            "trace",
            header,
            rows,
        )?);
    }
    let mut rows = String::new();
    for it in 0..=cfg.max_iter {
        let mut e: Vec<f64> = traces.iter().map(|t| t.records[it].energy).collect();
        e.sort_by(f64::total_cmp);
        writeln!(
            rows,
            "{it},{:.12},{:.12},{:.12},{:.12},{:.12}",
            quantile(&e, 0.5),
            quantile(&e, 0.25),
            quantile(&e, 0.75),
            e[0],
            e[e.len() - 1]
        )?;
    }
    paths.push(ctx.write_csv(
        &format!("median_{}.csv", kind.name()),
        "median",
        "iteration,median,q1,q3,min,max",
        &rows,
    )?);
    let finals: Vec<f64> = traces.iter().map(TrainingTrace::final_energy).collect();
    let median = vqa::median(&finals);
    let initial_state = oracle::expectation(&problem.initial, problem.h())?;
    let (e0, oracle_json) = reference_energy(ctx);
    let delta = e0.and_then(|e| energy_error(median, e, initial_state).ok());
    let body = json!({
        "ansatz": kind.name(),
        "n_params": problem.n_params(),
        "initial_state_energy": initial_state,
        "final_energies": finals,
        "final_energy": median,
        "delta_e_pct": delta,
        "oracle": oracle_json,
        "gate_counts": layer_json(&layer_count(lat, cfg.tau, cfg.u, kind)?),
    });
    paths.push(ctx.write_summary(&format!("vqa_{}_summary.json", kind.name()), "vqa", body)?);
    Ok(paths)
}

pub fn run_sweep(ctx: &Session) -> Result<Vec<PathBuf>> {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let (e0, oracle_json) = reference_energy(ctx);
    let Some(e0) = e0 else {
        bail!("sweep needs a reference energy: {oracle_json}");
    };
    let cells = sweep(
        lat,
        cfg.tau,
        cfg.u,
        &cfg.sweep_steps,
        &cfg.sweep_dts,
        &cfg.variants(),
        ctx.measurement(),
        e0,
    )?;
    let mut rows = String::new();
    for c in &cells {
        writeln!(
            rows,
            "{},{},{},{:.12},{:.12},{:.12},{:.12}",
            c.variant.name(),
            c.steps,
            c.dt,
            c.steps as f64 * c.dt,
            c.initial_energy,
            c.final_energy,
            c.delta_e_pct
        )?;
    }
    let csv = ctx.write_csv(
        "sweep.csv",
        "sweep",
        "variant,N,dt,T,initial_energy,final_energy,delta_e_pct",
        &rows,
    )?;
    let body = json!({"cells": cells.len(), "oracle": oracle_json});
    Ok(vec![csv, ctx.write_summary("sweep_summary.json", "sweep", body)?])
}

pub fn run_oracle(ctx: &Session) -> Result<Vec<PathBuf>> {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let sector = Sector::half_filling(lat);
    let mut results = Vec::new();
    for s in [sector, sector.flipped()] {
        let entry = match oracle::ground_energy_with(lat, cfg.tau, cfg.u, s, Method::Auto, &Default::default()) {
            Ok(g) => json!({
                "sector": [s.n_up, s.n_down],
                "e0": g.energy,
                "method": format!("{:?}", g.method).to_lowercase(),
                "dim": g.dim,
                "residual": g.residual,
                "converged": true,
            }),
            Err(e) => json!({"sector": [s.n_up, s.n_down], "converged": false, "error": e.to_string()}),
        };
        results.push(entry);
        if s == s.flipped() {
            break;
        }
    }
    let golden = GoldenRegistry::builtin()
        .lookup((cfg.nx, cfg.ny), cfg.tau, cfg.u, sector)
        .map(|g| json!({"e0": g.energy, "tol": g.tol}));
    let body = json!({"sectors": results, "golden": golden});
    Ok(vec![ctx.write_summary("oracle_summary.json", "oracle", body)?])
}

pub fn count_gates(ctx: &Session) -> Result<(Vec<PathBuf>, String)> {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let steps = Variant::ALL
        .iter()
        .map(|&v| trotter_step_count(lat, cfg.tau, cfg.u, v))
        .collect::<hubbard_cd::Result<Vec<_>>>()?;
    let layers = [AnsatzKind::Hv, AnsatzKind::CdInspired]
        .iter()
        .map(|&k| layer_count(lat, cfg.tau, cfg.u, k))
        .collect::<hubbard_cd::Result<Vec<_>>>()?;
    let n = lat.n_sites();
    let pool = lattice_pool(lat, cfg.tau, cfg.u)?;
    let hv = &layers[0];
    let checks = json!({
        "n_coulomb_equals_n_site": hv.coulomb_gates == n,
        "n_hopping_equals_2n_site": hv.hopping_gates == 2 * n,
        "pool_size": pool.len(),
        "pool_size_equals_2n_site_minus_4": pool.len() + 4 == 2 * n,
        "gates_per_two_body_string": GATES_PER_TWO_BODY_STRING,
    });
    let mut text = String::new();
    for s in &steps {
        writeln!(text, "{s}")?;
    }
    for l in &layers {
        writeln!(
            text,
            "{} layer: {} params, {} basic gates ({} coulomb, {} hopping, {} fswap, {} cd strings)",
            l.kind, l.params, l.tally.total, l.coulomb_gates, l.hopping_gates, l.fswaps, l.cd_strings
        )?;
    }
    writeln!(text, "checks: {checks}")?;
    let body = json!({
        "n_site": n,
        "trotter_steps": steps.iter().map(step_json).collect::<Vec<_>>(),
        "layers": layers.iter().map(layer_json).collect::<Vec<_>>(),
        "checks": checks,
    });
    let path = ctx.path("gates.txt");
    fs::write(&path, &text)?;
    Ok((vec![path, ctx.write_summary("gates_summary.json", "count-gates", body)?], text))
}

pub fn pool(ctx: &Session, full: bool) -> Result<(Vec<PathBuf>, String)> {
    let (cfg, lat) = (&ctx.cfg, &ctx.lat);
    let pool = lattice_pool(lat, cfg.tau, cfg.u)?;
    let mut text = format!(
        "# two-body pool, {} generators, {} strings\n{pool}",
        pool.len(),
        pool.string_count()
    );
    if full {
        let hams = build_hamiltonians(lat, cfg.tau, cfg.u)?;
        let o1 = &gauge_basis(&hams.h_hop, &hams.h_coul, 1)?[0];
        write!(text, "# first-order operator i[H_h, H_c], {} strings\n{o1}", o1.len())?;
    }
    let path = ctx.path("pool.txt");
    fs::write(&path, &text)?;
    Ok((vec![path], text))
}

pub fn run(ctx: &Session) -> Result<Vec<PathBuf>> {
    match ctx.cfg.algorithm {
        Algorithm::Evolve(v) => evolve(ctx, v),
        Algorithm::Vqa(k) => vqa(ctx, k),
    }
}

pub fn display(paths: &[PathBuf]) -> String {
    paths.iter().map(|p: &PathBuf| Path::display(p).to_string()).collect::<Vec<_>>().join("\n")
}
