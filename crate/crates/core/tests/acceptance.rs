//! Acceptance suite. One line per criterion; `--extended` also runs A11.
//!
//! ```text
//! cargo test --release -p hubbard-cd --test acceptance -- --extended
//! ```

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hubbard_cd::cdsynth::{gauge_potential, LinearSweep};
use hubbard_cd::evolve::{
    energy_error, run_evolution, EvolutionPlan, MeasurementMode, Variant,
};
use hubbard_cd::fermion::{build_hamiltonians, jw_ladder, Ladder};
use hubbard_cd::gatecount::{basic_count, layer_count, trotter_step_count, GATES_PER_TWO_BODY_STRING};
use hubbard_cd::lattice::{HoneycombLattice, Spin};
use hubbard_cd::measure::{build_groups, estimate_energy};
use hubbard_cd::oracle::{
    ground_energy_with, sector_minimum, GoldenRegistry, LanczosConfig, Method, Sector,
};
use hubbard_cd::pauli::{commutator, Letter, PauliSum, PauliWord};
use hubbard_cd::stateprep::prepare_initial;
use hubbard_cd::statevec::{rng_for, Angle, Gate, NoiseChannel, NoiseModel, StateVector};
use hubbard_cd::vqa::{build_ansatz, lattice_pool, median, train, AnsatzKind, Problem, TrainConfig};
use hubbard_cd::Complex64;
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

const TAU: f64 = 1.0;
const U: f64 = 1.5;
const DT: f64 = 0.02;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hexagon() -> HoneycombLattice {
    HoneycombLattice::build(1, 1).unwrap()
}

fn bond() -> HoneycombLattice {
    HoneycombLattice::from_rows(1, 1, vec![vec![0, 1]], &[]).unwrap()
}

fn frozen_e0() -> f64 {
    GoldenRegistry::builtin()
        .lookup((1, 1), TAU, U, Sector::new(3, 3))
        .expect("1x1 entry in the golden registry")
        .energy
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn a1() -> Outcome {
    let n = 4;
    let id = DMatrix::<Complex64>::identity(1 << n, 1 << n);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a = jw_ladder(i, n, Ladder::Annihilate).unwrap().to_dense().unwrap();
            let b = jw_ladder(j, n, Ladder::Create).unwrap().to_dense().unwrap();
            let anti = &a * &b + &b * &a;
            let expect = if i == j { id.clone() } else { id.scale(0.0) };
            worst = worst.max(max_abs(&(anti - expect)));
        }
    }
    let hams = build_hamiltonians(&bond(), TAU, U).unwrap();
    let (hc, hh) = (hams.h_coul.to_dense().unwrap(), hams.h_hop.to_dense().unwrap());
    let symbolic = commutator(&hams.h_coul, &hams.h_hop).unwrap();
    let comm_err = max_abs(&(symbolic.to_dense().unwrap() - (&hc * &hh - &hh * &hc)));
    ensure(
        worst < 1e-12 && comm_err < 1e-12 && !symbolic.is_empty(),
        format!(
            "anticommutator defect {worst:.1e}, two-site [H_c,H_h] ({} strings) defect {comm_err:.1e}",
            symbolic.len()
        ),
    )
}

fn a2() -> Outcome {
    let single = |l| PauliSum::from_terms(1, [(PauliWord::single(0, l), Complex64::new(1.0, 0.0))]);
    let sweep = LinearSweep::new(single(Letter::X), single(Letter::Z)).unwrap();
    let (mut alpha_err, mut op_err, mut cond_err) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..11 {
        let lambda = -2.5 + 0.5 * k as f64;
        let gp = gauge_potential(&sweep, 1, lambda).unwrap();
        let expect = -1.0 / (4.0 * (1.0 + lambda * lambda));
        alpha_err = alpha_err.max((gp.alpha[0] - expect).abs());
        // the exact potential of a two-level sweep is −Y/(2(1+λ²))
        let exact = single(Letter::Y).scale_real(-0.5 / (1.0 + lambda * lambda));
        let a = gp.operator();
        op_err = op_err.max(max_abs(&(a.to_dense().unwrap() - exact.to_dense().unwrap())));
        // and makes ∂H − i[H, A] commute with H
        let h = sweep.hamiltonian(lambda).to_dense().unwrap();
        let ad = a.to_dense().unwrap();
        let dh = sweep.derivative().to_dense().unwrap();
        let g = dh - (&h * &ad - &ad * &h) * Complex64::new(0.0, 1.0);
        cond_err = cond_err.max(max_abs(&(&h * &g - &g * &h)));
    }
    ensure(
        alpha_err < 1e-12 && op_err < 1e-12 && cond_err < 1e-12,
        format!("alpha defect {alpha_err:.1e}, operator defect {op_err:.1e}, [H,G] {cond_err:.1e} over 11 points"),
    )
}

fn a3() -> Outcome {
    let mut sizes = Vec::new();
    for (nx, ny) in [(1, 1), (1, 2), (2, 1)] {
        let lat = HoneycombLattice::build(nx, ny).unwrap();
        let pool = lattice_pool(&lat, TAU, U).unwrap();
        sizes.push((pool.len(), 2 * lat.n_sites() - 4));
    }
    ensure(
        sizes.iter().map(|s| s.0).eq([8, 16, 22]) && sizes.iter().all(|(a, b)| a == b),
        format!("pool sizes {:?}", sizes.iter().map(|s| s.0).collect::<Vec<_>>()),
    )
}

fn a4() -> Outcome {
    let lat = hexagon();
    let hams = build_hamiltonians(&lat, TAU, U).unwrap();
    let psi = prepare_initial(&lat, TAU).unwrap();
    let e = psi.expectation_complex(&hams.h_hop).unwrap().re;
    let sector = Sector::half_filling(&lat);
    let reference = sector_minimum(&hams.h_hop, &lat, sector, Method::Lanczos)
        .unwrap()
        .energy;
    let leak = psi.leakage(
        lat.spin_mask(Spin::Up),
        sector.n_up,
        lat.spin_mask(Spin::Down),
        sector.n_down,
    );
    ensure(
        (e - reference).abs() < 1e-8 && leak < 1e-12,
        format!("<H_h> = {e:.12}, sector minimum {reference:.12}, leakage {leak:.1e}"),
    )
}

fn evolve_delta(variant: Variant, total: f64) -> f64 {
    let steps = (total / DT).round() as usize;
    let plan = EvolutionPlan::new(variant, steps, DT).unwrap();
    let run = run_evolution(&plan, &hexagon(), TAU, U, MeasurementMode::Exact).unwrap();
    energy_error(run.final_energy(), frozen_e0(), run.initial_energy()).unwrap()
}

fn a5() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [0.5, 1.0, 1.5, 2.0] {
        let (cd, ad) = (evolve_delta(Variant::AdiabaticCd, t), evolve_delta(Variant::Adiabatic, t));
        ok &= cd < ad;
        parts.push(format!("T={t}: {cd:.2}% vs {ad:.2}%"));
    }
    let (cd, ad) = (evolve_delta(Variant::AdiabaticCd, 10.0), evolve_delta(Variant::Adiabatic, 10.0));
    ok &= cd < 2.0 && ad < 2.0;
    parts.push(format!("T=10: {cd:.3}% / {ad:.3}%"));
    ensure(ok, format!("dE with/without CD {}", parts.join(", ")))
}

fn a6() -> Outcome {
    let (only, both) = (evolve_delta(Variant::CdOnly, 5.0), evolve_delta(Variant::AdiabaticCd, 5.0));
    ensure(only > both, format!("T=5: cd_only {only:.2}% vs adiabatic_cd {both:.3}%"))
}

fn a7() -> Outcome {
    let lat = hexagon();
    let final_e = |n: usize| {
        let plan = EvolutionPlan::with_total(Variant::Adiabatic, n, 1.0).unwrap();
        run_evolution(&plan, &lat, TAU, U, MeasurementMode::Exact)
            .unwrap()
            .final_energy()
    };
    let reference = final_e(800);
    let ns = [25usize, 50, 100, 200];
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| ((n as f64).ln(), (final_e(n) - reference).abs().ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let slope = -pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    let errs: Vec<String> = pts.iter().map(|p| format!("{:.2e}", p.1.exp())).collect();
    ensure(
        (slope - 1.0).abs() <= 0.3,
        format!("errors {errs:?}, log-log slope {slope:.3}"),
    )
}

fn a8() -> Outcome {
    let lat = hexagon();
    let n = lat.n_sites();
    let hv = layer_count(&lat, TAU, U, AnsatzKind::Hv).unwrap();
    let cd = layer_count(&lat, TAU, U, AnsatzKind::CdInspired).unwrap();
    let xy = PauliWord::from_pairs(&[(0, Letter::X), (5, Letter::Y)]);
    let per_string = basic_count(&Gate::ExpPauli { word: xy, angle: Angle::Fixed(0.3) });
    let structural = hv.coulomb_gates == n
        && hv.hopping_gates == 2 * n
        && per_string == GATES_PER_TWO_BODY_STRING
        && per_string == 7
        && cd.cd_generators == 2 * n - 4
        && cd.tally.total == 7 * cd.cd_strings;
    let steps: Vec<_> = [Variant::Adiabatic, Variant::AdiabaticCd]
        .iter()
        .map(|&v| trotter_step_count(&lat, TAU, U, v).unwrap())
        .collect();
    let within = steps.iter().all(|s| (s.ratio() - 1.0).abs() <= 0.25);
    ensure(
        structural && within,
        format!(
            "coulomb {} hopping {} per-string {per_string}; step totals {}/{} vs 310/930 (ratios {:.3}, {:.3})",
            hv.coulomb_gates,
            hv.hopping_gates,
            steps[0].total,
            steps[1].total,
            steps[0].ratio(),
            steps[1].ratio()
        ),
    )
}

fn a9() -> Outcome {
    let lat = hexagon();
    let hams = build_hamiltonians(&lat, TAU, U).unwrap();
    let groups = build_groups(&lat).unwrap();
    let mut rng = rng_for(2024, 0);
    let amps = (0..1usize << lat.n_qubits())
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let mut psi = StateVector::from_amplitudes(amps).unwrap();
    psi.normalize();
    let exact = psi.expectation_complex(&hams.h_fh).unwrap().re;
    let inside = (0..100u64)
        .into_par_iter()
        .filter(|&s| {
            let est = estimate_energy(&psi, &groups, 30_000, s, TAU, U).unwrap();
            (est.energy - exact).abs() <= 3.0 * est.std_err
        })
        .count();
    ensure(inside >= 97, format!("{inside}/100 trials within 3 standard errors"))
}

fn train_medians(noise: Option<NoiseModel>) -> (f64, f64, f64) {
    let lat = hexagon();
    let run = |kind: AnsatzKind| {
        let problem = Problem::new(
            build_ansatz(kind, &lat, TAU, U, 1).unwrap(),
            &lat,
            build_hamiltonians(&lat, TAU, U).unwrap(),
        )
        .unwrap();
        let finals: Vec<f64> = (0..10u64)
            .into_par_iter()
            .map(|seed| {
                let cfg = TrainConfig {
                    seed,
                    max_iter: 300,
                    noise,
                    trajectories: 100,
                    ..TrainConfig::default()
                };
                train(&problem, &cfg).unwrap().final_energy()
            })
            .collect();
        median(&finals)
    };
    let initial = prepare_initial(&lat, TAU)
        .unwrap()
        .expectation_complex(&build_hamiltonians(&lat, TAU, U).unwrap().h_fh)
        .unwrap()
        .re;
    (run(AnsatzKind::Hv), run(AnsatzKind::CdInspired), initial)
}

fn a10() -> Outcome {
    let (hv, cd, initial) = train_medians(None);
    ensure(
        cd < hv && hv < initial && cd < initial,
        format!("median final energy cd {cd:.5} vs hv {hv:.5}; initial {initial:.5}"),
    )
}

fn a11() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for channel in NoiseChannel::ALL {
        let (hv, cd, _) = train_medians(Some(NoiseModel::new(channel, 0.01).unwrap()));
        ok &= cd < hv;
        parts.push(format!("{channel}: cd {cd:.4} vs hv {hv:.4}"));
    }
    ensure(ok, parts.join(", "))
}

fn a12() -> Outcome {
    let lat = hexagon();
    let cfg = LanczosConfig::default();
    let s = Sector::half_filling(&lat);
    let dense = ground_energy_with(&lat, TAU, U, s, Method::Dense, &cfg).unwrap().energy;
    let lanczos = ground_energy_with(&lat, TAU, U, s, Method::Lanczos, &cfg).unwrap().energy;
    let mut analytic_err = 0.0f64;
    for (tau, u) in [(1.0, 1.5), (1.0, 0.0), (0.7, 4.0), (2.0, 1.0)] {
        let e = ground_energy_with(&bond(), tau, u, Sector::new(1, 1), Method::Dense, &cfg)
            .unwrap()
            .energy;
        let closed = (u - (u * u + 16.0 * tau * tau).sqrt()) / 2.0;
        analytic_err = analytic_err.max((e - closed).abs());
    }
    ensure(
        (dense - lanczos).abs() < 1e-8 && analytic_err < 1e-10,
        format!("dense {dense:.12} lanczos {lanczos:.12}; two-site defect {analytic_err:.1e}"),
    )
}

struct Criterion {
    id: &'static str,
    budget: Duration,
    extended: bool,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let extended = std::env::args().any(|a| a == "--extended");
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: "A1", budget: secs(1), extended: false, check: a1 },
        Criterion { id: "A2", budget: secs(1), extended: false, check: a2 },
        Criterion { id: "A3", budget: secs(10), extended: false, check: a3 },
        Criterion { id: "A4", budget: secs(5), extended: false, check: a4 },
        Criterion { id: "A5", budget: secs(120), extended: false, check: a5 },
        Criterion { id: "A6", budget: secs(60), extended: false, check: a6 },
        Criterion { id: "A7", budget: secs(300), extended: false, check: a7 },
        Criterion { id: "A8", budget: secs(10), extended: false, check: a8 },
        Criterion { id: "A9", budget: secs(120), extended: false, check: a9 },
        Criterion { id: "A10", budget: secs(600), extended: false, check: a10 },
        Criterion { id: "A11", budget: secs(3600), extended: true, check: a11 },
        Criterion { id: "A12", budget: secs(60), extended: false, check: a12 },
    ];
    let mut failed = 0;
    for c in &criteria {
        if c.extended && !extended {
            println!("{:<4} SKIP  extended (run with --extended)", c.id);
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let took = start.elapsed();
        let tag = if c.extended { " [extended]" } else { "" };
        let (pass, detail) = match outcome {
            Ok(d) if took <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        failed += usize::from(!pass);
        println!(
            "{:<4} {}  {detail} ({:.2}s of {}s){tag}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
