use std::f64::consts::PI;

use num_complex::Complex64;
use pft_core::dynamics::{lattice_hamiltonian, Component};
use pft_core::fock::basis::{
    enumerate_basis, FockModel, ModeIndex, OccupationState, Spin, Statistics,
};
use pft_core::fock::operators::{build_hopping, build_quasi_l_fock, build_total_spin};
use pft_core::fock::state::{state_from_function, Monomial, PolynomialFunction, Term};
use pft_core::fock::transfer::{
    best_transfer_fidelity, entangled_transfer_check, expected_particle_phase,
    function_transfer_check, hardcore_equivalence_check, no_init_transfer_check,
    qubit_transfer_check,
};
use pft_core::{commutator_norm, CouplingProfile, ExecMode, LatticeDims, PftError};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn model(extents: &[usize], st: Statistics, spinful: bool) -> FockModel {
    FockModel::new(LatticeDims::new(extents).unwrap(), st, spinful).unwrap()
}

/// Random polynomial on the first `modes` modes with total degree at most `max_degree`.
fn random_function(
    model: &FockModel,
    modes: usize,
    max_degree: usize,
    seed: u64,
) -> PolynomialFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fermion = model.statistics() != Statistics::Boson;
    let mut terms = Vec::new();
    for degree in 0..=max_degree {
        for _ in 0..2 {
            let mut factors: Vec<(ModeIndex, u32)> = Vec::new();
            let mut used = Vec::new();
            for _ in 0..degree {
                let p = rng.random_range(0..modes);
                if fermion && used.contains(&p) {
                    continue;
                }
                used.push(p);
                factors.push((model.mode(p), 1));
            }
            terms.push(Term {
                coefficient: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                monomial: Monomial { factors },
            });
        }
    }
    PolynomialFunction::new(terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_particle_sector_matches_lattice_hamiltonian(m in 2usize..=5, n in 2usize..=5, j1 in 0.3f64..2.0, j2 in 0.3f64..2.0) {
        let d = LatticeDims::new(&[m, n]).unwrap();
        let fm = FockModel::new(d.clone(), Statistics::Boson, false).unwrap();
        let basis = enumerate_basis(&fm, 1).unwrap();
        let h = build_hopping(&basis, &d, &[j1, j2]).unwrap();
        let reference = lattice_hamiltonian(&d, &[j1, j2]).unwrap();
        let site = |i: usize| basis.state(i).occupancies().iter().position(|&k| k == 1).unwrap();
        for a in 0..basis.dim() {
            for b in 0..basis.dim() {
                prop_assert!((h.get(a, b) - reference.get(site(a), site(b))).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn transfer_factorizes_on_small_lattices(
        extents in prop::collection::vec(prop::sample::select(vec![2usize, 3, 4]), 1..=2),
        fermion in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let st = if fermion { Statistics::Fermion } else { Statistics::Boson };
        let m = model(&extents, st, false);
        let d = m.dims().clone();
        let f = random_function(&m, m.mode_count().min(3), 3, seed);
        let r = match function_transfer_check(&m, &vec![1.0; d.rank()], &f, PI) {
            Ok(r) => r,
            Err(PftError::DegenerateFunction(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert!((r.fit.fidelity - 1.0).abs() <= 1e-8);
        prop_assert!(r.fit.rigidity_residual <= 1e-8);
        prop_assert!(r.phase_error <= 1e-8);
    }
}

#[test]
fn statistics_resolved_commutation() {
    let cases = [
        (&[2, 2][..], Statistics::Boson, false),
        (&[2, 3], Statistics::Boson, false),
        (&[3, 3], Statistics::Boson, false),
        (&[2, 2], Statistics::Fermion, false),
        (&[2, 3], Statistics::Fermion, false),
        (&[3, 3], Statistics::Fermion, false),
        (&[2, 2], Statistics::Fermion, true),
    ];
    for (extents, st, spinful) in cases {
        let d = LatticeDims::new(extents).unwrap();
        let fm = FockModel::new(d.clone(), st, spinful).unwrap();
        for n in 0..=3 {
            let basis = enumerate_basis(&fm, n).unwrap();
            let axis = |a| Component::ALL.map(|c| build_quasi_l_fock(&basis, &d, a, c).unwrap());
            let (first, second) = (axis(0), axis(1));
            for a in &first {
                for b in &second {
                    let norm = commutator_norm(a, b).unwrap();
                    assert!(
                        norm <= 1e-12,
                        "{extents:?} {st} spinful={spinful} n={n}: {norm:e}"
                    );
                }
            }
        }
    }
    let d = LatticeDims::new(&[2, 2]).unwrap();
    let basis = enumerate_basis(
        &FockModel::new(d.clone(), Statistics::HardCore, false).unwrap(),
        2,
    )
    .unwrap();
    let a = build_quasi_l_fock(&basis, &d, 0, Component::X).unwrap();
    let b = build_quasi_l_fock(&basis, &d, 1, Component::X).unwrap();
    assert!(commutator_norm(&a, &b).unwrap() >= 0.1);
}

#[test]
fn spin_commutes_with_quasi_angular_momenta() {
    let d = LatticeDims::new(&[2, 3]).unwrap();
    let fm = FockModel::new(d.clone(), Statistics::Fermion, true).unwrap();
    for n in 0..=3 {
        let basis = enumerate_basis(&fm, n).unwrap();
        for sc in Component::ALL {
            let s = build_total_spin(&basis, sc).unwrap();
            for axis in 0..2 {
                for lc in Component::ALL {
                    let l = build_quasi_l_fock(&basis, &d, axis, lc).unwrap();
                    assert!(commutator_norm(&s, &l).unwrap() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn uniform_couplings_fail_to_transfer() {
    for m in 4..=6 {
        let fm = model(&[m], Statistics::Boson, false);
        let profile = [CouplingProfile::uniform(0, m, 1.0).unwrap()];
        let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1]));
        let (t, best) =
            best_transfer_fidelity(&fm, &profile, &f, 2.0 * PI, 400, ExecMode::Parallel).unwrap();
        println!("uniform M={m}: best fidelity {best:.6} at t={t:.4}");
        assert!(best < 0.999, "M={m}: {best}");
    }
}

#[test]
fn best_fidelity_of_engineered_chain_is_one() {
    let fm = model(&[5], Statistics::Boson, false);
    let profile = [pft_core::coupling_profile(5, 1.0).unwrap()];
    let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1]));
    let seq =
        best_transfer_fidelity(&fm, &profile, &f, 2.0 * PI, 200, ExecMode::Sequential).unwrap();
    let par = best_transfer_fidelity(&fm, &profile, &f, 2.0 * PI, 200, ExecMode::Parallel).unwrap();
    assert_eq!(seq, par);
    assert!((seq.1 - 1.0).abs() < 1e-9);
    assert!((seq.0 - PI).abs() < 1e-4);
}

#[test]
fn sector_phases_are_powers_of_the_particle_phase() {
    for extents in [&[2, 2][..], &[2, 3], &[3, 4]] {
        let m = model(extents, Statistics::Boson, false);
        let corner = ModeIndex::spinless(&vec![1; extents.len()]);
        let f = PolynomialFunction::single_mode(
            &corner,
            &[c(0.3, 0.1), c(0.5, 0.0), c(0.2, -0.4), c(0.0, 0.6)],
        )
        .unwrap();
        let r = function_transfer_check(&m, &[1.0, 1.0], &f, PI).unwrap();
        let p = expected_particle_phase(m.dims());
        for s in &r.fit.sector_phases {
            assert!(
                (s.phase - p.powi(s.n as i32)).norm() < 1e-8,
                "{extents:?} n={}",
                s.n
            );
        }
    }
}

#[test]
fn no_initialization_configurations() {
    let m = model(&[3, 3], Statistics::Boson, false);
    let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1, 1]));
    let gs = [
        PolynomialFunction::constant(c(1.0, 0.0)),
        PolynomialFunction::linear(&ModeIndex::spinless(&[2, 1])),
        PolynomialFunction::single_mode(
            &ModeIndex::spinless(&[2, 2]),
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap(),
    ];
    for g in &gs {
        let r = no_init_transfer_check(&m, &[1.0, 1.0], &f, g, PI).unwrap();
        assert!((r.mirrored.fit.fidelity - 1.0).abs() < 1e-8);
        assert!(r.mirrored.fit.rigidity_residual < 1e-8);
    }
    // g on (2,1) ends on (2,3), so leaving it in place is orthogonal
    let r = no_init_transfer_check(&m, &[1.0, 1.0], &f, &gs[1], PI).unwrap();
    assert!(r.stationary_g_fidelity < 1e-12);
    let vac = no_init_transfer_check(&m, &[1.0, 1.0], &f, &gs[0], PI).unwrap();
    let plain = function_transfer_check(&m, &[1.0, 1.0], &f, PI).unwrap();
    assert!((vac.mirrored.fit.fidelity - plain.fit.fidelity).abs() < 1e-14);

    let fm = model(&[3, 3], Statistics::Fermion, false);
    let g = PolynomialFunction::linear(&ModeIndex::spinless(&[2, 1]))
        .product(&PolynomialFunction::linear(&ModeIndex::spinless(&[2, 2])));
    let r = no_init_transfer_check(&fm, &[1.0, 1.0], &f, &g, PI).unwrap();
    assert!((r.mirrored.fit.fidelity - 1.0).abs() < 1e-8);
}

#[test]
fn function_state_examples() {
    let m = model(&[2, 2], Statistics::Boson, false);
    let mode = ModeIndex::spinless(&[1, 1]);
    let h = 0.5f64.sqrt();
    let s = state_from_function(
        &m,
        &PolynomialFunction::single_mode(&mode, &[c(1.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap(),
    )
    .unwrap();
    let vac = OccupationState::vacuum(4);
    let mut two = OccupationState::vacuum(4);
    two.0[0] = 2;
    assert!((s.amplitude(&vac) - c(h, 0.0)).norm() < 1e-15);
    assert!((s.amplitude(&two) - c(h, 0.0)).norm() < 1e-15);

    let fm = model(&[2, 2], Statistics::Fermion, false);
    let square = PolynomialFunction::single_mode(&mode, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    if let Ok(f) = square {
        assert!(matches!(
            state_from_function(&fm, &f),
            Err(PftError::DegenerateFunction(_))
        ));
    }
}

#[test]
fn spin_qubit_examples() {
    let d23 = LatticeDims::new(&[2, 3]).unwrap();
    let d22 = LatticeDims::new(&[2, 2]).unwrap();
    let trivial = qubit_transfer_check(
        &d23,
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        &d23.origin(),
        &[1.0, 1.0],
    )
    .unwrap();
    assert!((trivial.fit.fidelity - 1.0).abs() < 1e-12);
    let q = qubit_transfer_check(
        &d23,
        [c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)],
        &d23.origin(),
        &[1.0, 1.0],
    )
    .unwrap();
    assert!((q.fit.fidelity - 1.0).abs() < 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut amps = [c(0.0, 0.0); 4];
    for a in amps.iter_mut() {
        *a = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let amps = amps.map(|z| z / norm);
    let r = qubit_transfer_check(&d22, amps, &d22.origin(), &[1.0, 1.0]).unwrap();
    assert!((r.fit.fidelity - 1.0).abs() < 1e-8);
    assert!(r.fit.rigidity_residual < 1e-8);

    let h = 0.5f64.sqrt();
    for (d, b, g) in [
        (&d23, c(1.0, 0.0), c(0.0, 0.0)),
        (&d23, c(h, 0.0), c(h, 0.0)),
        (&d22, c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)),
    ] {
        let r = entangled_transfer_check(d, b, g, &[1.0, 1.0]).unwrap();
        assert!((r.fit.fidelity - 1.0).abs() < 1e-8);
    }

    // moving a spin-up particle to the mirror site keeps its spin
    let fm = FockModel::new(d23.clone(), Statistics::Fermion, true).unwrap();
    let up = PolynomialFunction::linear(&ModeIndex::with_spin(&[1, 1], Spin::Up));
    let r = function_transfer_check(&fm, &[1.0, 1.0], &up, PI).unwrap();
    assert!((r.fit.fidelity - 1.0).abs() < 1e-8);
}

#[test]
fn hardcore_examples() {
    let h = 0.5f64.sqrt();
    let d33 = LatticeDims::new(&[3, 3]).unwrap();
    let d22 = LatticeDims::new(&[2, 2]).unwrap();
    for (d, a, b, u) in [
        (&d33, c(1.0, 0.0), c(0.0, 0.0), 10.0),
        (&d33, c(0.0, 0.0), c(1.0, 0.0), 50.0),
        (&d22, c(h, 0.0), c(h, 0.0), 10.0),
    ] {
        let r = hardcore_equivalence_check(d, a, b, u, &[1.0, 1.0]).unwrap();
        assert!(r.deviation <= 1e-10);
        assert!((r.transfer.fit.fidelity - 1.0).abs() < 1e-8);
    }
}
