//! Many-body transfer checks with per-sector phase fitting.
//!
//! Hopping conserves particle number, so a transferred state can only pick
//! up one phase per sector. [`fit_transfer`] fits those phases by maximizing
//! the overlap and then asks whether they form a geometric sequence p^n,
//! which is what a mirror map of single creation operators produces.

use std::collections::BTreeSet;

use num_complex::Complex64;

use super::basis::{FockBasis, FockModel, ModeIndex, Spin, Statistics};
use super::operators::{build_hopping_with_profiles, build_onsite_repulsion};
use super::state::{
    state_from_function_cached, BasisCache, Evolver, FockState, Monomial, PolynomialFunction, Term,
};
use crate::error::{PftError, Result};
use crate::lattice::{
    common_coupling, engineered_profiles, lattice_signature, pst_time, CouplingProfile,
    LatticeDims, SiteIndex,
};
use crate::operator::DenseOperator;
use crate::parallel::{self, ExecMode};

/// Sectors whose overlap magnitude is below this carry no phase information.
const PHASE_WEIGHT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SectorPhase {
    pub n: usize,
    pub phase: Complex64,
    /// |<target_n|evolved_n>|
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferFit {
    /// max over sector phases of |<target|evolved>|, i.e. sum_n |<target_n|evolved_n>|.
    pub fidelity: f64,
    pub sector_phases: Vec<SectorPhase>,
    /// p such that the sector phases best match p^n.
    pub per_particle_phase: Complex64,
    /// max_n |phase_n - p^n| over sectors with weight.
    pub rigidity_residual: f64,
}

/// Fits one phase per sector between two normalized states.
pub fn fit_transfer(target: &FockState, evolved: &FockState) -> Result<TransferFit> {
    let mut sector_phases = Vec::new();
    let mut fidelity = 0.0;
    for (&n, t) in &target.sectors {
        let Some(e) = evolved.sectors.get(&n) else {
            continue;
        };
        let o = t.inner(e)?;
        let w = o.norm();
        fidelity += w;
        sector_phases.push(SectorPhase {
            n,
            phase: if w > 0.0 {
                o / w
            } else {
                Complex64::new(1.0, 0.0)
            },
            weight: w,
        });
    }
    let (per_particle_phase, rigidity_residual) = fit_geometric(&sector_phases);
    Ok(TransferFit {
        fidelity,
        sector_phases,
        per_particle_phase,
        rigidity_residual,
    })
}

fn fit_geometric(phases: &[SectorPhase]) -> (Complex64, f64) {
    let weighted: Vec<&SectorPhase> = phases
        .iter()
        .filter(|s| s.weight > PHASE_WEIGHT_FLOOR)
        .collect();
    let residual = |p: Complex64| {
        weighted
            .iter()
            .map(|s| (s.phase - p.powi(s.n as i32)).norm())
            .fold(0.0, f64::max)
    };
    let Some(anchor) = weighted.iter().find(|s| s.n > 0) else {
        let p = Complex64::new(1.0, 0.0);
        return (p, residual(p));
    };
    let n = anchor.n as f64;
    let arg = anchor.phase.arg();
    (0..anchor.n)
        .map(|k| {
            let p = Complex64::from_polar(1.0, (arg + 2.0 * std::f64::consts::PI * k as f64) / n);
            (p, residual(p))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("anchor sector has n >= 1")
}

/// Phase a single particle picks up on its way to the mirror site:
/// the conjugate of the product of signatures.
pub fn expected_particle_phase(dims: &LatticeDims) -> Complex64 {
    lattice_signature(dims).conj().value()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub fit: TransferFit,
    /// Per-particle phase predicted by the mirror law.
    pub expected_phase: Complex64,
    /// |fitted - expected| per-particle phase.
    pub phase_error: f64,
}

impl TransferReport {
    fn new(dims: &LatticeDims, fit: TransferFit) -> Self {
        let expected_phase = expected_particle_phase(dims);
        let phase_error = (fit.per_particle_phase - expected_phase).norm();
        Self {
            fit,
            expected_phase,
            phase_error,
        }
    }
}

fn hopping_builder(
    profiles: &[CouplingProfile],
) -> impl Fn(&FockBasis) -> Result<DenseOperator> + '_ {
    move |b: &FockBasis| build_hopping_with_profiles(b, profiles)
}

/// Evolves f(a^dag)|0> under arbitrary profiles and compares with the mirrored function.
pub fn function_transfer_with_profiles(
    model: &FockModel,
    profiles: &[CouplingProfile],
    f: &PolynomialFunction,
    t: f64,
) -> Result<TransferFit> {
    let mut cache = BasisCache::default();
    let initial = state_from_function_cached(model, f, &mut cache)?;
    let target = state_from_function_cached(model, &f.mirrored(model.dims())?, &mut cache)?;
    let mut ev = Evolver::new(hopping_builder(profiles));
    let evolved = ev.prepare_and_evolve(&initial, t)?;
    fit_transfer(&target, &evolved)
}

/// Transfer of f under engineered couplings with a common J.
pub fn function_transfer_check(
    model: &FockModel,
    couplings: &[f64],
    f: &PolynomialFunction,
    t: f64,
) -> Result<TransferReport> {
    common_coupling(couplings)?;
    let profiles = engineered_profiles(model.dims(), couplings)?;
    let fit = function_transfer_with_profiles(model, &profiles, f, t)?;
    Ok(TransferReport::new(model.dims(), fit))
}

/// Best mirror-transfer fidelity over (0, t_max]: a uniform grid of `samples`
/// points followed by golden-section refinement around the best one.
pub fn best_transfer_fidelity(
    model: &FockModel,
    profiles: &[CouplingProfile],
    f: &PolynomialFunction,
    t_max: f64,
    samples: usize,
    mode: ExecMode,
) -> Result<(f64, f64)> {
    if t_max.is_nan() || t_max <= 0.0 || samples < 2 {
        return Err(PftError::InvalidArgument(
            "need t_max > 0 and at least two samples".into(),
        ));
    }
    let mut cache = BasisCache::default();
    let initial = state_from_function_cached(model, f, &mut cache)?;
    let target = state_from_function_cached(model, &f.mirrored(model.dims())?, &mut cache)?;
    let mut ev = Evolver::new(hopping_builder(profiles));
    ev.prepare(&initial)?;
    let fid =
        |t: f64| -> Result<f64> { Ok(fit_transfer(&target, &ev.evolve(&initial, t)?)?.fidelity) };

    let step = t_max / samples as f64;
    let grid: Vec<f64> = (1..=samples).map(|k| k as f64 * step).collect();
    let values = parallel::try_map(mode, &grid, |&t| fid(t))?;
    let (best_i, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");

    let (mut lo, mut hi) = (
        (grid[best_i] - step).max(f64::MIN_POSITIVE),
        (grid[best_i] + step).min(t_max),
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (fid(a)?, fid(b)?);
    for _ in 0..60 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = fid(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = fid(b)?;
        }
    }
    let candidates = [(grid[best_i], values[best_i]), (a, fa), (b, fb)];
    Ok(candidates
        .into_iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("three candidates"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoInitReport {
    /// Fit against f at the mirror corner with g's content also mirrored.
    pub mirrored: TransferReport,
    /// Fidelity against f mirrored but g left where it started.
    pub stationary_g_fidelity: f64,
}

/// f on the corner, g on interior modes, evolved together for time t.
pub fn no_init_transfer_check(
    model: &FockModel,
    couplings: &[f64],
    f: &PolynomialFunction,
    g: &PolynomialFunction,
    t: f64,
) -> Result<NoInitReport> {
    common_coupling(couplings)?;
    let overlap: BTreeSet<ModeIndex> = f.support().intersection(&g.support()).cloned().collect();
    if !overlap.is_empty() {
        return Err(PftError::InvalidArgument(format!(
            "f and g share modes: {}",
            overlap
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let dims = model.dims();
    let profiles = engineered_profiles(dims, couplings)?;
    let mut cache = BasisCache::default();
    let initial = state_from_function_cached(model, &f.product(g), &mut cache)?;
    let target = state_from_function_cached(model, &f.product(g).mirrored(dims)?, &mut cache)?;
    let mut ev = Evolver::new(hopping_builder(&profiles));
    let evolved = ev.prepare_and_evolve(&initial, t)?;
    let mirrored = TransferReport::new(dims, fit_transfer(&target, &evolved)?);

    let stationary = f.mirrored(dims)?.product(g);
    let stationary_g_fidelity = match state_from_function_cached(model, &stationary, &mut cache) {
        Ok(s) => fit_transfer(&s, &evolved)?.fidelity,
        // g placed on top of the mirrored f can vanish for fermions
        Err(PftError::DegenerateFunction(_)) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(NoInitReport {
        mirrored,
        stationary_g_fidelity,
    })
}

const NORMALIZATION_TOL: f64 = 1e-12;

fn check_normalized(amps: &[Complex64]) -> Result<()> {
    let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > NORMALIZATION_TOL {
        return Err(PftError::InvalidArgument(format!(
            "amplitudes have squared norm {n}, expected 1"
        )));
    }
    Ok(())
}

fn term(coefficient: Complex64, factors: Vec<(ModeIndex, u32)>) -> Term {
    Term {
        coefficient,
        monomial: Monomial { factors },
    }
}

/// (alpha + beta c_up^dag + gamma c_dn^dag + delta c_up^dag c_dn^dag)|0> at `source`,
/// transferred to the mirror site at t0.
pub fn qubit_transfer_check(
    dims: &LatticeDims,
    amplitudes: [Complex64; 4],
    source: &SiteIndex,
    couplings: &[f64],
) -> Result<TransferReport> {
    check_normalized(&amplitudes)?;
    dims.check_site(source)?;
    let model = FockModel::new(dims.clone(), Statistics::Fermion, true)?;
    let up = ModeIndex {
        site: source.clone(),
        spin: Some(Spin::Up),
    };
    let dn = ModeIndex {
        site: source.clone(),
        spin: Some(Spin::Down),
    };
    let [a, b, g, d] = amplitudes;
    let terms: Vec<Term> = [
        term(a, vec![]),
        term(b, vec![(up.clone(), 1)]),
        term(g, vec![(dn.clone(), 1)]),
        term(d, vec![(up, 1), (dn, 1)]),
    ]
    .into_iter()
    .filter(|t| t.coefficient.norm() != 0.0)
    .collect();
    let f = PolynomialFunction::new(terms)?;
    let t0 = pst_time(common_coupling(couplings)?)?;
    function_transfer_check(&model, couplings, &f, t0)
}

/// beta |0>_{(1,1)}|0>_{(1,2)} + gamma |1>_{(1,1)}|1>_{(1,2)} with |0> = up, |1> = down,
/// transferred to (M,N), (M,N-1) at t0.
pub fn entangled_transfer_check(
    dims: &LatticeDims,
    beta: Complex64,
    gamma: Complex64,
    couplings: &[f64],
) -> Result<TransferReport> {
    if dims.rank() < 2 || dims.extent(1) < 2 {
        return Err(PftError::InvalidExtent(format!(
            "entangled transfer needs at least two sites along axis 1, lattice is {dims}"
        )));
    }
    check_normalized(&[beta, gamma])?;
    let model = FockModel::new(dims.clone(), Statistics::Fermion, true)?;
    let mut first = vec![1; dims.rank()];
    let a = SiteIndex::new(&first);
    first[1] = 2;
    let b = SiteIndex::new(&first);
    let mode = |site: &SiteIndex, spin| ModeIndex {
        site: site.clone(),
        spin: Some(spin),
    };
    let terms: Vec<Term> = [
        term(beta, vec![(mode(&a, Spin::Up), 1), (mode(&b, Spin::Up), 1)]),
        term(
            gamma,
            vec![(mode(&a, Spin::Down), 1), (mode(&b, Spin::Down), 1)],
        ),
    ]
    .into_iter()
    .filter(|t| t.coefficient.norm() != 0.0)
    .collect();
    let f = PolynomialFunction::new(terms)?;
    let t0 = pst_time(common_coupling(couplings)?)?;
    function_transfer_check(&model, couplings, &f, t0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardcoreReport {
    pub transfer: TransferReport,
    /// Largest amplitude gap between evolution with and without H_U.
    pub deviation: f64,
}

/// alpha|0> + beta b_origin^dag|0> under H and H + strength * H_U.
pub fn hardcore_equivalence_check(
    dims: &LatticeDims,
    alpha: Complex64,
    beta: Complex64,
    strength: f64,
    couplings: &[f64],
) -> Result<HardcoreReport> {
    check_normalized(&[alpha, beta])?;
    let model = FockModel::new(dims.clone(), Statistics::Boson, false)?;
    let mode = ModeIndex {
        site: dims.origin(),
        spin: None,
    };
    let f = PolynomialFunction::single_mode(&mode, &[alpha, beta])?;
    let t0 = pst_time(common_coupling(couplings)?)?;
    let profiles = engineered_profiles(dims, couplings)?;

    let mut cache = BasisCache::default();
    let initial = state_from_function_cached(&model, &f, &mut cache)?;
    let target = state_from_function_cached(&model, &f.mirrored(dims)?, &mut cache)?;
    let mut free = Evolver::new(hopping_builder(&profiles));
    let mut interacting = Evolver::new(|b: &FockBasis| {
        let h = build_hopping_with_profiles(b, &profiles)?;
        let u = build_onsite_repulsion(b, strength)?;
        h.combine(1.0, &u, 1.0)
    });
    let a = free.prepare_and_evolve(&initial, t0)?;
    let b = interacting.prepare_and_evolve(&initial, t0)?;
    Ok(HardcoreReport {
        transfer: TransferReport::new(dims, fit_transfer(&target, &b)?),
        deviation: a.max_abs_diff(&b),
    })
}
