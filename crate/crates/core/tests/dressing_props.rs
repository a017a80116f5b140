use std::f64::consts::PI;

use num_complex::Complex64;
use pft_core::dressing::{
    dress, dressed_transfer_check, lz_dressing_unitary, random_unitary, DressingSpec,
};
use pft_core::dynamics::{lattice_hamiltonian, quasi_l, Component};
use pft_core::fock::basis::{FockModel, ModeIndex, Statistics};
use pft_core::fock::state::PolynomialFunction;
use pft_core::fock::transfer::function_transfer_check;
use pft_core::operator::{max_abs, CMatrix};
use pft_core::{DenseOperator, LatticeDims};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn axis_sum(d: &LatticeDims, comp: Component) -> CMatrix {
    let n = d.site_count();
    let mut m = CMatrix::zeros(n, n);
    for axis in 0..d.rank() {
        m += quasi_l(d, axis, comp).unwrap().operator.matrix();
    }
    m
}

fn sorted_spectrum(h: &DenseOperator) -> Vec<f64> {
    let mut v = h.eigen().unwrap().eigenvalues;
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn lz_closed_form_for_all_small_lattices() {
    for m in 2..=6 {
        for n in 2..=6 {
            let d = LatticeDims::new(&[m, n]).unwrap();
            for theta in [0.0, 0.7, -2.3] {
                let j = 1.4;
                let h = DenseOperator::hermitian(axis_sum(&d, Component::X) * c(j, 0.0)).unwrap();
                let got = dress(&h, &lz_dressing_unitary(&d, theta).unwrap()).unwrap();
                let want = h.matrix() * c(theta.cos(), 0.0)
                    + axis_sum(&d, Component::Y) * c(j * theta.sin(), 0.0);
                assert!(
                    max_abs(&(got.matrix() - want)) <= 1e-10,
                    "{m}x{n} theta={theta}"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conjugation_identity(m in 2usize..=4, n in 2usize..=4, seed in any::<u64>(), t in -5.0f64..5.0) {
        let d = LatticeDims::new(&[m, n]).unwrap();
        let h = lattice_hamiltonian(&d, &[1.0, 0.7]).unwrap();
        let w = random_unitary(d.site_count(), seed).unwrap();
        let lhs = dress(&h, &w).unwrap().propagator(t).unwrap();
        let u = h.propagator(t).unwrap();
        let rhs = w.matrix() * u.matrix() * w.matrix().adjoint();
        prop_assert!(max_abs(&(lhs.matrix() - rhs)) <= 1e-10);
    }

    #[test]
    fn dressing_preserves_spectrum(m in 2usize..=5, seed in any::<u64>()) {
        let d = LatticeDims::new(&[m, 3]).unwrap();
        let h = lattice_hamiltonian(&d, &[1.0, 1.0]).unwrap();
        let w = random_unitary(d.site_count(), seed).unwrap();
        let a = sorted_spectrum(&h);
        let b = sorted_spectrum(&dress(&h, &w).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn dressed_fidelity_equals_undressed(seed in 0u64..1000, t in 0.05f64..6.0) {
        let d = LatticeDims::new(&[2, 4]).unwrap();
        let model = FockModel::new(d, Statistics::Boson, false).unwrap();
        let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1, 1]));
        let spec = DressingSpec::generic(random_unitary(8, seed).unwrap()).unwrap();
        let r = dressed_transfer_check(&model, &[1.0, 1.0], &spec, &f, t).unwrap();
        prop_assert!((r.fit.fidelity - r.undressed_fidelity).abs() <= 1e-10);
    }
}

#[test]
fn random_dressings_at_three_times() {
    let d = LatticeDims::new(&[2, 4]).unwrap();
    let model = FockModel::new(d, Statistics::Boson, false).unwrap();
    let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1, 1]));
    for seed in 1..=5u64 {
        let spec = DressingSpec::generic(random_unitary(8, seed).unwrap()).unwrap();
        for t in [0.5, 1.7, PI] {
            let r = dressed_transfer_check(&model, &[1.0, 1.0], &spec, &f, t).unwrap();
            assert!((r.fit.fidelity - r.undressed_fidelity).abs() <= 1e-10);
        }
        let r = dressed_transfer_check(&model, &[1.0, 1.0], &spec, &f, PI).unwrap();
        assert!((r.fit.fidelity - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn identity_dressing_reduces_to_plain_transfer() {
    let d = LatticeDims::new(&[3, 3]).unwrap();
    let model = FockModel::new(d, Statistics::Boson, false).unwrap();
    let f = PolynomialFunction::single_mode(
        &ModeIndex::spinless(&[1, 1]),
        &[c(0.3, 0.0), c(0.4, 0.5), c(0.0, 0.7)],
    )
    .unwrap();
    let plain = function_transfer_check(&model, &[1.0, 1.0], &f, PI).unwrap();
    let dressed =
        dressed_transfer_check(&model, &[1.0, 1.0], &DressingSpec::LzRotation(0.0), &f, PI)
            .unwrap();
    assert!((plain.fit.fidelity - dressed.fit.fidelity).abs() < 1e-12);
    assert!((plain.fit.per_particle_phase - dressed.fit.per_particle_phase).norm() < 1e-12);
}

#[test]
fn lz_dressed_multi_particle_transfer() {
    let d = LatticeDims::new(&[3, 3]).unwrap();
    let model = FockModel::new(d, Statistics::Boson, false).unwrap();
    let f = PolynomialFunction::single_mode(
        &ModeIndex::spinless(&[1, 1]),
        &[c(0.3, 0.0), c(0.4, 0.5), c(0.0, 0.7)],
    )
    .unwrap();
    for theta in [0.3, 0.7, 2.0] {
        let r = dressed_transfer_check(
            &model,
            &[1.0, 1.0],
            &DressingSpec::LzRotation(theta),
            &f,
            PI,
        )
        .unwrap();
        assert!((r.fit.fidelity - 1.0).abs() < 1e-8);
        assert!(r.fit.rigidity_residual < 1e-8);
        // bare-frame phase = undressed particle phase times the target dressing phase
        let expected = r.fit.per_particle_phase * r.target_dressing_phase.unwrap();
        assert!((r.bare_frame_phase.unwrap() - expected).norm() < 1e-8);
        println!(
            "theta={theta}: bare-frame phase {:.6}, quoted closed-form phase {:.6}",
            r.bare_frame_phase.unwrap(),
            r.quoted_phase.unwrap()
        );
    }
}
