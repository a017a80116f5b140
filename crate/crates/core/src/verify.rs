//! The acceptance suite: twelve numbered checks covering every module.
//!
//! Each check reports a single measured quantity against a threshold.
//! Runtimes are collected separately so the report itself is a pure
//! function of the code and the fixed inputs below.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::dressing::{
    dress, dressed_transfer_check, lz_dressing_unitary, random_unitary, DressingSpec,
};
use crate::dynamics::{
    disorder_fidelities, lattice_hamiltonian, measured_convention_phase, mirror_report,
    propagator_analytic, quasi_l, Component,
};
use crate::error::Result;
use crate::fock::basis::{enumerate_basis, FockModel, ModeIndex, Statistics};
use crate::fock::operators::{build_quasi_l_fock, build_total_spin};
use crate::fock::state::PolynomialFunction;
use crate::fock::transfer::{
    best_transfer_fidelity, entangled_transfer_check, function_transfer_check,
    hardcore_equivalence_check, no_init_transfer_check, qubit_transfer_check,
};
use crate::lattice::{lattice_signature, CouplingProfile, LatticeDims, SignaturePhase};
use crate::operator::{commutator_norm, max_abs, CMatrix, DenseOperator};
use crate::parallel::ExecMode;
use crate::wigner::{wigner_d, WignerOracle, MAX_TWO_L};

/// Wall-time limit for the whole suite.
pub const SUITE_BUDGET: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    Below,
}

impl Relation {
    pub fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => measured <= threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Below => measured < threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub description: &'static str,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    /// Whether the check finished inside its time budget, when it has one.
    pub within_budget: bool,
    pub passed: bool,
}

/// A named value recorded alongside the outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Real(f64),
    Complex(Complex64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub outcomes: Vec<CriterionOutcome>,
    pub extras: Vec<(String, Scalar)>,
    /// Per-check wall time, in id order. Not part of the deterministic record.
    pub timings: Vec<(u8, Duration)>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        !self.outcomes.is_empty() && self.outcomes.iter().all(|o| o.passed)
    }

    pub fn total_time(&self) -> Duration {
        self.timings.iter().map(|(_, d)| *d).sum()
    }
}

struct Check {
    id: u8,
    name: &'static str,
    description: &'static str,
    relation: Relation,
    threshold: f64,
    budget: Option<Duration>,
}

const CHECKS: [Check; 12] = [
    Check {
        id: 1,
        name: "chain_transfer",
        description: "chains M=2..20: max | |<M|U(t0)|1>| - 1 | and arrival-phase spread across sources",
        relation: Relation::AtMost,
        threshold: 1e-10,
        budget: Some(Duration::from_secs(1)),
    },
    Check {
        id: 2,
        name: "mirror_2d",
        description: "MxN lattices M,N=2..8: off-mirror modulus and analytic vs numeric propagator gap",
        relation: Relation::AtMost,
        threshold: 1e-9,
        budget: Some(Duration::from_secs(10)),
    },
    Check {
        id: 3,
        name: "mirror_3d",
        description: "2x2x2, 3x3x3, 2x3x4: corner modulus defect and phase gap to r1 r2 r3 times the convention phase",
        relation: Relation::AtMost,
        threshold: 1e-10,
        budget: Some(Duration::from_secs(5)),
    },
    Check {
        id: 4,
        name: "signature_interference",
        description: "|r1 r2 - 1| on 5x5 plus |r1 r2 + 1| on 2x2, exact",
        relation: Relation::AtMost,
        threshold: 0.0,
        budget: None,
    },
    Check {
        id: 5,
        name: "commutation",
        description: "cross-axis [L1, L2] for single-particle, boson n=2, fermion n=2 up to 3x3",
        relation: Relation::AtMost,
        threshold: 1e-12,
        budget: None,
    },
    Check {
        id: 6,
        name: "wigner_d",
        description: "2l<=40 over 63 angles vs eigendecomposition oracle; unitarity to 2l=60; composition",
        relation: Relation::AtMost,
        threshold: 1e-10,
        budget: Some(Duration::from_secs(10)),
    },
    Check {
        id: 7,
        name: "function_transfer",
        description: "3x3 bosons, degree <= 2: 1 - fidelity and phase rigidity residual at t0",
        relation: Relation::AtMost,
        threshold: 1e-8,
        budget: None,
    },
    Check {
        id: 8,
        name: "no_initialization",
        description: "3x3 bosons with interior content g: 1 - fidelity over three configurations",
        relation: Relation::AtMost,
        threshold: 1e-8,
        budget: None,
    },
    Check {
        id: 9,
        name: "hardcore_equivalence",
        description: "on-site repulsion {0, 10, 50}: single-excitation evolution gap and 1 - fidelity",
        relation: Relation::AtMost,
        threshold: 1e-10,
        budget: None,
    },
    Check {
        id: 10,
        name: "spin_transfer",
        description: "spinful fermions 2x3, 2x2: 1 - fidelity of qubit and entangled states",
        relation: Relation::AtMost,
        threshold: 1e-8,
        budget: Some(Duration::from_secs(30)),
    },
    Check {
        id: 11,
        name: "dressing",
        description: "L_z closed form on extents 2..6 and dressed vs undressed fidelity for 5 random W at 3 times",
        relation: Relation::AtMost,
        threshold: 1e-10,
        budget: None,
    },
    Check {
        id: 12,
        name: "determinism",
        description: "bitwise mismatches between repeated sequential and parallel runs, within the suite time budget",
        relation: Relation::AtMost,
        threshold: 0.0,
        budget: None,
    },
];

/// Thresholds for the parts of a check that use a different tolerance than its headline.
pub mod limits {
    /// Criterion 2: off-mirror modulus.
    pub const OFF_MIRROR: f64 = 1e-10;
    /// Criterion 5: hard-core cross-axis commutator lower bound.
    pub const HARDCORE_COMMUTATOR: f64 = 0.1;
    /// Criterion 6: orthogonality up to 2l = 60.
    pub const WIGNER_UNITARITY: f64 = 1e-12;
    /// Criterion 7: best fidelity of the uniform control chain.
    pub const UNIFORM_CONTROL: f64 = 0.999;
    /// Criterion 10: [S, L] commutators.
    pub const SPIN_COMMUTATOR: f64 = 1e-12;
    /// Criterion 11: dressed transfer fidelity at t0.
    pub const DRESSED_FIDELITY: f64 = 1e-8;
}

/// Runs all twelve checks.
pub fn run_suite(mode: ExecMode) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    let start = Instant::now();
    for check in &CHECKS[..11] {
        let t = Instant::now();
        let (measured, extra_ok) = match check.id {
            1 => chain_transfer(&mut report.extras)?,
            2 => mirror_2d(&mut report.extras)?,
            3 => mirror_3d(&mut report.extras)?,
            4 => signature_interference()?,
            5 => commutation(&mut report.extras)?,
            6 => wigner(&mut report.extras)?,
            7 => function_transfer(mode, &mut report.extras)?,
            8 => no_initialization(&mut report.extras)?,
            9 => hardcore()?,
            10 => spin_transfer(&mut report.extras)?,
            11 => dressing(&mut report.extras)?,
            _ => unreachable!("checks 1..=11"),
        };
        let elapsed = t.elapsed();
        report.timings.push((check.id, elapsed));
        report
            .outcomes
            .push(outcome(check, measured, extra_ok, elapsed));
    }
    let t = Instant::now();
    let mismatches = determinism_probe(&mut report.extras)?;
    let elapsed = t.elapsed();
    report.timings.push((12, elapsed));
    let total_ok = start.elapsed() < SUITE_BUDGET;
    report
        .outcomes
        .push(outcome(&CHECKS[11], mismatches, total_ok, elapsed));
    Ok(report)
}

fn outcome(check: &Check, measured: f64, extra_ok: bool, elapsed: Duration) -> CriterionOutcome {
    let within_budget = check.budget.is_none_or(|b| elapsed < b);
    let numeric = check.relation.holds(measured, check.threshold);
    CriterionOutcome {
        id: check.id,
        name: check.name,
        description: check.description,
        measured,
        relation: check.relation,
        threshold: check.threshold,
        within_budget,
        passed: numeric && extra_ok && within_budget,
    }
}

type Extras = Vec<(String, Scalar)>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dims(extents: &[usize]) -> Result<LatticeDims> {
    LatticeDims::for_transfer(extents)
}

fn chain_transfer(extras: &mut Extras) -> Result<(f64, bool)> {
    let mut worst = 0.0f64;
    for m in 2..=20 {
        let d = dims(&[m])?;
        let r = mirror_report(&d, 1.0)?;
        worst = worst.max(r.max_modulus_defect).max(r.phase_spread);
        if m <= 5 {
            extras.push((
                format!("c1.arrival_phase.M{m}"),
                Scalar::Complex(r.arrival_phase),
            ));
        }
    }
    Ok((worst, true))
}

fn mirror_2d(extras: &mut Extras) -> Result<(f64, bool)> {
    let mut off = 0.0f64;
    let mut gap = 0.0f64;
    for m in 2..=8 {
        extras.push((
            format!("c2.convention_phase.M{m}"),
            Scalar::Complex(axis_convention(m)?),
        ));
    }
    for m in 2..=8 {
        for n in 2..=8 {
            let d = dims(&[m, n])?;
            off = off.max(mirror_report(&d, 1.0)?.max_off_mirror);
            let conv = axis_convention(m)? * axis_convention(n)?;
            for t in [PI, 1.0] {
                let a = propagator_analytic(&d, &[1.0, 1.0], t)?;
                let num = lattice_hamiltonian(&d, &[1.0, 1.0])?.propagator(t)?;
                let shifted = num.matrix() * conv;
                gap = gap.max(max_abs(&(a.matrix() - shifted)));
            }
        }
    }
    extras.push(("c2.max_off_mirror".into(), Scalar::Real(off)));
    extras.push(("c2.max_analytic_numeric_gap".into(), Scalar::Real(gap)));
    Ok((gap, off <= limits::OFF_MIRROR))
}

/// Ratio of the analytic to the numeric corner amplitude <M|U(t0)|1> of one chain.
fn axis_convention(m: usize) -> Result<Complex64> {
    let d = dims(&[m])?;
    let r = mirror_report(&d, 1.0)?;
    Ok(r.arrival_phase / r.signature.value() / measured_convention_phase(m, 1.0)?)
}

fn mirror_3d(extras: &mut Extras) -> Result<(f64, bool)> {
    let mut worst = 0.0f64;
    for extents in [[2, 2, 2], [3, 3, 3], [2, 3, 4]] {
        let d = dims(&extents)?;
        let r = mirror_report(&d, 1.0)?;
        let convention: Complex64 = extents
            .iter()
            .map(|&e| measured_convention_phase(e, 1.0))
            .product::<Result<Complex64>>()?;
        let expected = r.signature.value() * convention;
        let label = format!("{}x{}x{}", extents[0], extents[1], extents[2]);
        extras.push((
            format!("c3.arrival_phase.{label}"),
            Scalar::Complex(r.arrival_phase),
        ));
        extras.push((
            format!("c3.signature.{label}"),
            Scalar::Complex(r.signature.value()),
        ));
        extras.push((
            format!("c3.convention_phase.{label}"),
            Scalar::Complex(convention),
        ));
        worst = worst
            .max(r.max_modulus_defect)
            .max(r.max_off_mirror)
            .max((r.arrival_phase - expected).norm());
    }
    Ok((worst, true))
}

fn signature_interference() -> Result<(f64, bool)> {
    let five = lattice_signature(&dims(&[5, 5])?);
    let two = lattice_signature(&dims(&[2, 2])?);
    let exact = five == SignaturePhase::ONE && two == SignaturePhase::from_quarter_turns(2);
    let measured = (five.value() - c(1.0, 0.0)).norm() + (two.value() + c(1.0, 0.0)).norm();
    Ok((measured, exact))
}

fn commutation(extras: &mut Extras) -> Result<(f64, bool)> {
    let mut worst = 0.0f64;
    for m in 2..=3 {
        for n in 2..=3 {
            let d = dims(&[m, n])?;
            for ca in Component::ALL {
                for cb in Component::ALL {
                    let a = quasi_l(&d, 0, ca)?.operator;
                    let b = quasi_l(&d, 1, cb)?.operator;
                    worst = worst.max(commutator_norm(&a, &b)?);
                }
            }
            for st in [Statistics::Boson, Statistics::Fermion] {
                let basis = enumerate_basis(&FockModel::new(d.clone(), st, false)?, 2)?;
                for ca in Component::ALL {
                    for cb in Component::ALL {
                        let a = build_quasi_l_fock(&basis, &d, 0, ca)?;
                        let b = build_quasi_l_fock(&basis, &d, 1, cb)?;
                        worst = worst.max(commutator_norm(&a, &b)?);
                    }
                }
            }
        }
    }
    let d = dims(&[2, 2])?;
    let basis = enumerate_basis(&FockModel::new(d.clone(), Statistics::HardCore, false)?, 2)?;
    let mut hard = 0.0f64;
    for ca in Component::ALL {
        for cb in Component::ALL {
            let a = build_quasi_l_fock(&basis, &d, 0, ca)?;
            let b = build_quasi_l_fock(&basis, &d, 1, cb)?;
            hard = hard.max(commutator_norm(&a, &b)?);
        }
    }
    extras.push(("c5.hardcore_commutator".into(), Scalar::Real(hard)));
    Ok((worst, hard >= limits::HARDCORE_COMMUTATOR))
}

fn wigner(extras: &mut Extras) -> Result<(f64, bool)> {
    let angles: Vec<f64> = (0..63)
        .map(|k| -PI + 2.0 * PI * k as f64 / 62.0 + 0.01)
        .collect();
    let mut oracle_gap = 0.0f64;
    let mut composition_gap = 0.0f64;
    for two_l in 0..=40 {
        let oracle = WignerOracle::new(two_l)?;
        for &beta in &angles {
            let d = wigner_d(two_l, beta)?;
            oracle_gap = oracle_gap.max(d.max_abs_diff(&oracle.at(beta)));
        }
        for (a, b) in [(0.3, 1.1), (-2.0, 0.7), (2.9, 2.9)] {
            let lhs = wigner_d(two_l, a)?.matrix * wigner_d(two_l, b)?.matrix;
            let rhs = wigner_d(two_l, a + b)?.matrix;
            composition_gap = composition_gap.max((lhs - rhs).amax());
        }
    }
    let mut unitarity = 0.0f64;
    for two_l in 0..=MAX_TWO_L {
        for &beta in angles.iter().step_by(7) {
            let d = wigner_d(two_l, beta)?.matrix;
            let n = two_l + 1;
            let gram = d.transpose() * &d - nalgebra::DMatrix::<f64>::identity(n, n);
            unitarity = unitarity.max(gram.amax());
        }
    }
    extras.push(("c6.oracle_gap".into(), Scalar::Real(oracle_gap)));
    extras.push(("c6.composition_gap".into(), Scalar::Real(composition_gap)));
    extras.push(("c6.unitarity_defect".into(), Scalar::Real(unitarity)));
    Ok((
        oracle_gap.max(composition_gap),
        unitarity <= limits::WIGNER_UNITARITY,
    ))
}

fn function_transfer(mode: ExecMode, extras: &mut Extras) -> Result<(f64, bool)> {
    let model = FockModel::new(dims(&[3, 3])?, Statistics::Boson, false)?;
    let corner = ModeIndex::spinless(&[1, 1]);
    let edge = ModeIndex::spinless(&[1, 2]);
    let functions = [
        PolynomialFunction::linear(&corner),
        PolynomialFunction::single_mode(&corner, &[c(0.2, 0.0), c(0.5, 0.3), c(-0.4, 0.6)])?,
        PolynomialFunction::single_mode(&corner, &[c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8)])?,
        PolynomialFunction::linear(&corner).product(&PolynomialFunction::linear(&edge)),
    ];
    let mut worst = 0.0f64;
    for (k, f) in functions.iter().enumerate() {
        let r = function_transfer_check(&model, &[1.0, 1.0], f, PI)?;
        worst = worst
            .max((1.0 - r.fit.fidelity).abs())
            .max(r.fit.rigidity_residual);
        extras.push((
            format!("c7.particle_phase.f{k}"),
            Scalar::Complex(r.fit.per_particle_phase),
        ));
    }
    let chain = FockModel::new(dims(&[5])?, Statistics::Boson, false)?;
    let uniform = [CouplingProfile::uniform(0, 5, 1.0)?];
    let (t_best, best) = best_transfer_fidelity(
        &chain,
        &uniform,
        &PolynomialFunction::linear(&ModeIndex::spinless(&[1])),
        2.0 * PI,
        400,
        mode,
    )?;
    extras.push(("c7.uniform_best_fidelity".into(), Scalar::Real(best)));
    extras.push(("c7.uniform_best_time".into(), Scalar::Real(t_best)));
    Ok((worst, best < limits::UNIFORM_CONTROL))
}

fn no_initialization(extras: &mut Extras) -> Result<(f64, bool)> {
    let model = FockModel::new(dims(&[3, 3])?, Statistics::Boson, false)?;
    let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1, 1]));
    let configs = [
        ("vacuum", PolynomialFunction::constant(c(1.0, 0.0))),
        (
            "linear_2_1",
            PolynomialFunction::linear(&ModeIndex::spinless(&[2, 1])),
        ),
        (
            "quadratic_center",
            PolynomialFunction::single_mode(
                &ModeIndex::spinless(&[2, 2]),
                &[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.8)],
            )?,
        ),
    ];
    let mut worst = 0.0f64;
    for (label, g) in &configs {
        let r = no_init_transfer_check(&model, &[1.0, 1.0], &f, g, PI)?;
        worst = worst
            .max((1.0 - r.mirrored.fit.fidelity).abs())
            .max(r.mirrored.fit.rigidity_residual);
        extras.push((
            format!("c8.stationary_g_fidelity.{label}"),
            Scalar::Real(r.stationary_g_fidelity),
        ));
    }
    Ok((worst, true))
}

fn hardcore() -> Result<(f64, bool)> {
    let h = 0.5f64.sqrt();
    let cases = [
        (&[3usize, 3][..], c(0.6, 0.0), c(0.0, 0.8)),
        (&[3, 3], c(0.0, 0.0), c(1.0, 0.0)),
        (&[2, 2], c(h, 0.0), c(h, 0.0)),
    ];
    let mut worst = 0.0f64;
    for (extents, alpha, beta) in cases {
        for strength in [0.0, 10.0, 50.0] {
            let r =
                hardcore_equivalence_check(&dims(extents)?, alpha, beta, strength, &[1.0, 1.0])?;
            worst = worst
                .max(r.deviation)
                .max((1.0 - r.transfer.fit.fidelity).abs());
        }
    }
    Ok((worst, true))
}

fn spin_transfer(extras: &mut Extras) -> Result<(f64, bool)> {
    let h = 0.5f64.sqrt();
    let mut worst = 0.0f64;
    let d23 = dims(&[2, 3])?;
    let d22 = dims(&[2, 2])?;
    let qubits: [(&LatticeDims, [Complex64; 4]); 4] = [
        (&d23, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        (&d23, [c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]),
        (&d23, [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]),
        (
            &d22,
            [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.1, 0.4899)],
        ),
    ];
    for (d, amps) in qubits {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps = amps.map(|z| z / norm);
        let r = qubit_transfer_check(d, amps, &d.origin(), &[1.0, 1.0])?;
        worst = worst.max((1.0 - r.fit.fidelity).abs());
    }
    for (d, beta, gamma) in [
        (&d23, c(1.0, 0.0), c(0.0, 0.0)),
        (&d23, c(h, 0.0), c(h, 0.0)),
        (&d22, c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)),
    ] {
        let r = entangled_transfer_check(d, beta, gamma, &[1.0, 1.0])?;
        worst = worst.max((1.0 - r.fit.fidelity).abs());
    }
    let mut spin = 0.0f64;
    for (d, n) in [(&d22, 1), (&d22, 2), (&d23, 2)] {
        let basis = enumerate_basis(&FockModel::new(d.clone(), Statistics::Fermion, true)?, n)?;
        for sc in Component::ALL {
            let s = build_total_spin(&basis, sc)?;
            for axis in 0..2 {
                for lc in Component::ALL {
                    let l = build_quasi_l_fock(&basis, d, axis, lc)?;
                    spin = spin.max(commutator_norm(&s, &l)?);
                }
            }
        }
    }
    extras.push(("c10.spin_commutator".into(), Scalar::Real(spin)));
    Ok((worst, spin <= limits::SPIN_COMMUTATOR))
}

fn dressing(extras: &mut Extras) -> Result<(f64, bool)> {
    let theta = 0.7;
    let mut closed_form = 0.0f64;
    for m in 2..=6 {
        for n in 2..=6 {
            let d = dims(&[m, n])?;
            let mut lx = CMatrix::zeros(d.site_count(), d.site_count());
            let mut ly = lx.clone();
            for axis in 0..2 {
                lx += quasi_l(&d, axis, Component::X)?.operator.matrix();
                ly += quasi_l(&d, axis, Component::Y)?.operator.matrix();
            }
            let h = DenseOperator::hermitian(lx)?;
            let got = dress(&h, &lz_dressing_unitary(&d, theta)?)?;
            let want = h.matrix() * c(theta.cos(), 0.0) + ly * c(theta.sin(), 0.0);
            closed_form = closed_form.max(max_abs(&(got.matrix() - want)));
        }
    }

    let model = FockModel::new(dims(&[2, 4])?, Statistics::Boson, false)?;
    let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1, 1]));
    let mut equality = 0.0f64;
    let mut at_t0 = 0.0f64;
    for seed in 1..=5u64 {
        let spec = DressingSpec::generic(random_unitary(8, seed)?)?;
        for t in [0.5, 1.7, PI] {
            let r = dressed_transfer_check(&model, &[1.0, 1.0], &spec, &f, t)?;
            equality = equality.max((r.fit.fidelity - r.undressed_fidelity).abs());
            if t == PI {
                at_t0 = at_t0.max((1.0 - r.fit.fidelity).abs());
            }
        }
    }

    let lz_model = FockModel::new(dims(&[3, 3])?, Statistics::Boson, false)?;
    let r = dressed_transfer_check(
        &lz_model,
        &[1.0, 1.0],
        &DressingSpec::LzRotation(theta),
        &f,
        PI,
    )?;
    extras.push(("c11.theta".into(), Scalar::Real(theta)));
    extras.push(("c11.lz_fidelity".into(), Scalar::Real(r.fit.fidelity)));
    extras.push((
        "c11.dressed_frame_phase".into(),
        Scalar::Complex(r.fit.per_particle_phase),
    ));
    if let Some(p) = r.bare_frame_phase {
        extras.push(("c11.bare_frame_phase".into(), Scalar::Complex(p)));
    }
    if let Some(p) = r.source_dressing_phase {
        extras.push(("c11.source_dressing_phase".into(), Scalar::Complex(p)));
    }
    if let Some(p) = r.target_dressing_phase {
        extras.push(("c11.target_dressing_phase".into(), Scalar::Complex(p)));
    }
    if let Some(p) = r.quoted_phase {
        extras.push(("c11.quoted_phase".into(), Scalar::Complex(p)));
    }
    extras.push(("c11.closed_form_gap".into(), Scalar::Real(closed_form)));
    extras.push(("c11.dressed_undressed_gap".into(), Scalar::Real(equality)));
    Ok((
        closed_form.max(equality),
        at_t0 <= limits::DRESSED_FIDELITY
            && (1.0 - r.fit.fidelity).abs() <= limits::DRESSED_FIDELITY,
    ))
}

fn determinism_probe(extras: &mut Extras) -> Result<f64> {
    let d = dims(&[8])?;
    let seeds: Vec<u64> = (0..32).collect();
    let runs = [
        disorder_fidelities(&d, &[1.0], &d.origin(), 0.01, &seeds, ExecMode::Sequential)?,
        disorder_fidelities(&d, &[1.0], &d.origin(), 0.01, &seeds, ExecMode::Parallel)?,
        disorder_fidelities(&d, &[1.0], &d.origin(), 0.01, &seeds, ExecMode::Parallel)?,
    ];
    let mut mismatches = 0usize;
    for run in &runs[1..] {
        mismatches += run
            .iter()
            .zip(&runs[0])
            .filter(|(a, b)| a.to_bits() != b.to_bits())
            .count();
    }
    let a = random_unitary(8, 42)?;
    let b = random_unitary(8, 42)?;
    mismatches += a
        .matrix()
        .iter()
        .zip(b.matrix().iter())
        .filter(|(x, y)| x.re.to_bits() != y.re.to_bits() || x.im.to_bits() != y.im.to_bits())
        .count();
    let mean = runs[0].iter().sum::<f64>() / runs[0].len() as f64;
    let min = runs[0].iter().copied().fold(f64::INFINITY, f64::min);
    extras.push(("c12.disorder_mean_fidelity".into(), Scalar::Real(mean)));
    extras.push(("c12.disorder_min_fidelity".into(), Scalar::Real(min)));
    Ok(mismatches as f64)
}
