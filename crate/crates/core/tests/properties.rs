use hubbard_cd::fermion::{build_hamiltonians, jw_ladder, spin_number, Ladder};
use hubbard_cd::lattice::{HoneycombLattice, Spin};
use hubbard_cd::pauli::{commutator, multiply, PauliString, PauliSum, PauliWord};
use hubbard_cd::stateprep::{compile_givens, single_particle_orbitals, OrbitalBasis};
use hubbard_cd::statevec::{run, Angle, Circuit, Gate, StateVector};
use hubbard_cd::vqa::{build_ansatz, Adagrad, AnsatzKind, Problem};
use hubbard_cd::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    let lim = 1u64 << n;
    (0..lim, 0..lim).prop_map(|(x, z)| PauliWord::from_masks(x, z))
}

fn pauli_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((word(n), -1.0..1.0f64, -1.0..1.0f64), 1..6)
        .prop_map(move |ts| PauliSum::from_terms(n, ts.into_iter().map(|(w, a, b)| (w, c(a, b)))))
}

fn hermitian_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((word(n), -1.0..1.0f64), 1..6)
        .prop_map(move |ts| PauliSum::from_terms(n, ts.into_iter().map(|(w, a)| (w, c(a, 0.0)))))
}

fn sized_pair() -> impl Strategy<Value = (PauliSum, PauliSum)> {
    (1usize..=4).prop_flat_map(|n| (pauli_sum(n), pauli_sum(n)))
}

fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_map(move |v| {
        let mut s = StateVector::from_amplitudes(v.into_iter().map(|(a, b)| c(a, b)).collect())
            .unwrap_or_else(|_| StateVector::new(n).unwrap());
        s.normalize();
        s
    })
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hexagon() -> HoneycombLattice {
    HoneycombLattice::build(1, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_matches_dense((a, b) in sized_pair()) {
        let (da, db) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        let dc = commutator(&a, &b).unwrap().to_dense().unwrap();
        prop_assert!(max_diff(&dc, &(&da * &db - &db * &da)) < 1e-12);
    }

    #[test]
    fn commutator_is_antisymmetric((a, b) in sized_pair()) {
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!((&ab + &ba).iter().all(|(_, z)| z.norm() < 1e-12));
    }

    #[test]
    fn i_commutator_of_hermitian_is_hermitian(
        (a, b) in (1usize..=4).prop_flat_map(|n| (hermitian_sum(n), hermitian_sum(n)))
    ) {
        let g = commutator(&a, &b).unwrap().scale(c(0.0, 1.0));
        prop_assert!(g.max_imag() < 1e-12);
    }

    #[test]
    fn product_is_associative(
        (x, y, z) in (word(6), word(6), word(6))
    ) {
        let s = |w: PauliWord| PauliString::new(6, w, c(1.0, 0.0)).unwrap();
        let left = multiply(&multiply(&s(x), &s(y)).unwrap(), &s(z)).unwrap();
        let right = multiply(&s(x), &multiply(&s(y), &s(z)).unwrap()).unwrap();
        prop_assert_eq!(left.word, right.word);
        prop_assert!((left.coeff - right.coeff).norm() < 1e-15);
    }

    #[test]
    fn exp_pauli_matches_dense(
        (w, theta, psi) in (1usize..=4).prop_flat_map(|n| (word(n), -3.0..3.0f64, random_state(n)))
    ) {
        let n = psi.n_qubits();
        let p = PauliSum::from_terms(n, [(w, c(1.0, 0.0))]).to_dense().unwrap();
        let id = DMatrix::<Complex64>::identity(1 << n, 1 << n);
        let u = id * c(theta.cos(), 0.0) - p * c(0.0, theta.sin());
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let expect = u * v;
        let mut got = psi.clone();
        got.apply_exp_pauli(&w, theta).unwrap();
        let err = got.amplitudes().iter().zip(expect.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn expectation_is_linear(
        (a, b, psi, k) in (1usize..=4).prop_flat_map(|n| (hermitian_sum(n), hermitian_sum(n), random_state(n), -2.0..2.0f64))
    ) {
        let lhs = psi.expectation_complex(&(&a + &b.scale_real(k))).unwrap();
        let rhs = psi.expectation_complex(&a).unwrap() + psi.expectation_complex(&b).unwrap() * k;
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn jw_anticommutators(n in 1usize..=6, i in 0usize..6, j in 0usize..6) {
        prop_assume!(i < n && j < n);
        let ci = jw_ladder(i, n, Ladder::Annihilate).unwrap();
        let cj = jw_ladder(j, n, Ladder::Create).unwrap();
        let cj2 = jw_ladder(j, n, Ladder::Annihilate).unwrap();
        let anti = &(&ci * &cj) + &(&cj * &ci);
        let expect = if i == j { PauliSum::identity(n, 1.0) } else { PauliSum::new(n) };
        prop_assert!((&anti - &expect).is_empty());
        prop_assert!((&(&ci * &cj2) + &(&cj2 * &ci)).is_empty());
    }

    #[test]
    fn unitary_circuits_preserve_norm(
        gates in prop::collection::vec((0usize..7, 0usize..8, 0usize..8, -3.0..3.0f64), 1..200),
        psi in random_state(8)
    ) {
        let mut circ = Circuit::new(8);
        for (kind, a, b, t) in gates {
            let b = if a == b { (b + 1) % 8 } else { b };
            let g = match kind {
                0 => Gate::H(a),
                1 => Gate::Rx(a, Angle::Fixed(t)),
                2 => Gate::Cnot { control: a, target: b },
                3 => Gate::Fswap(a, b),
                4 => Gate::Givens { a: a.min(b), b: a.max(b), angle: Angle::Fixed(t) },
                5 => Gate::Hop { a, b, angle: Angle::Fixed(t) },
                _ => Gate::SqrtISwap(a, b),
            };
            circ.push(g).unwrap();
        }
        let out = run(&circ, &[], &psi).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        let mut back = out;
        for g in circ.gates().iter().rev() {
            back.apply_gate_inverse(g, &[]).unwrap();
        }
        prop_assert!((back.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn adagrad_accumulator_never_decreases(
        grads in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 4), 1..40)
    ) {
        let mut opt = Adagrad::new(4, 0.05, 1e-8).unwrap();
        let mut params = vec![0.1, 0.2, 0.3, 0.4];
        let mut prev = opt.accumulated().to_vec();
        for g in grads {
            opt.step(&mut params, &g).unwrap();
            let now = opt.accumulated().to_vec();
            prop_assert!(now.iter().zip(&prev).all(|(a, b)| a >= b));
            prev = now;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn givens_network_reproduces_one_body_density(
        seed in prop::collection::vec(-1.0..1.0f64, 18),
        perm in 0usize..3
    ) {
        let lat = hexagon();
        let a = DMatrix::from_row_slice(6, 3, &seed);
        let qr = a.qr();
        let mut q = qr.q();
        // columns of Q are a gauge: swapping two must not change the density
        q.swap_columns(perm % 3, (perm + 1) % 3);
        let basis = OrbitalBasis { spin: Spin::Up, energies: vec![0.0; 6], orbitals: q.clone() };
        let psi = run(&compile_givens(&lat, &basis).unwrap(), &[], &StateVector::new(12).unwrap()).unwrap();
        let rho = &q * q.transpose();
        for i in 0..6 {
            for j in 0..6 {
                let (qi, qj) = (lat.qubit_of(i, Spin::Up), lat.qubit_of(j, Spin::Up));
                let op = &jw_ladder(qi, 12, Ladder::Create).unwrap() * &jw_ladder(qj, 12, Ladder::Annihilate).unwrap();
                let v = psi.expectation_complex(&op).unwrap();
                prop_assert!((v.re - rho[(i, j)]).abs() < 1e-10 && v.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn variational_energy_respects_ground_bound(
        params in prop::collection::vec(-3.2..3.2f64, 18),
        hv in any::<bool>()
    ) {
        let lat = hexagon();
        let hams = build_hamiltonians(&lat, 1.0, 1.5).unwrap();
        let kind = if hv { AnsatzKind::Hv } else { AnsatzKind::CdInspired };
        let prob = Problem::new(build_ansatz(kind, &lat, 1.0, 1.5, 1).unwrap(), &lat, hams).unwrap();
        let p = &params[..prob.n_params()];
        let (e, _) = prob.adjoint(p).unwrap();
        prop_assert!(e >= -5.978815789177377 - 1e-8);
    }
}

#[test]
fn hamiltonians_are_hermitian_and_conserve_spin_numbers() {
    for lat in [hexagon(), HoneycombLattice::build(1, 2).unwrap()] {
        let h = build_hamiltonians(&lat, 1.0, 1.5).unwrap();
        assert!(h.h_fh.max_imag() < 1e-12);
        assert!(h.h_hop.max_imag() < 1e-12 && h.h_coul.max_imag() < 1e-12);
        assert!((&h.h_fh - &(&h.h_hop + &h.h_coul)).is_empty());
        for s in Spin::BOTH {
            assert!(commutator(&h.h_fh, &spin_number(&lat, s).unwrap()).unwrap().is_empty());
        }
    }
}

#[test]
fn orbital_column_permutation_leaves_energy_unchanged() {
    let lat = hexagon();
    let hams = build_hamiltonians(&lat, 1.0, 1.5).unwrap();
    let mut b = single_particle_orbitals(&lat, 1.0, Spin::Up).unwrap();
    let e = |b: &OrbitalBasis| {
        let psi = run(&compile_givens(&lat, b).unwrap(), &[], &StateVector::new(12).unwrap()).unwrap();
        psi.expectation_complex(&hams.h_hop).unwrap().re
    };
    let before = e(&b);
    b.orbitals.swap_columns(0, 2);
    assert!((e(&b) - before).abs() < 1e-10);
    assert!((before - b.occupied_energy()).abs() < 1e-10);
}
