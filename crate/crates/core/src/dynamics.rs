//! Single-particle sector: engineered chain and lattice Hamiltonians,
//! quasi-angular-momentum matrices, analytic and numeric propagators,
//! transfer amplitudes, fidelity sweeps and coupling disorder.
//!
//! Sign convention: H = -sum J_a C_j (b_j^dag b_{j+1} + h.c.) = -sum J_a L_x^(a)
//! and evolution is exp(-iHt) = exp(+i sum J_a L_x^(a) t). The analytic
//! propagator is therefore U_{m'm} = i^(m-m') d^l_{m'm}(J t), which is the
//! Schroedinger-picture matrix; the Heisenberg coefficient i^(m'-m) d_{m'm}
//! is its complex conjugate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PftError, Result};
use crate::lattice::{
    check_couplings, engineered_profiles, lattice_signature, magnetic_number, mirror_site,
    pst_time, CouplingProfile, LatticeDims, SignaturePhase, SiteIndex, MAX_ANALYTIC_EXTENT,
};
use crate::operator::{kron, CMatrix, DenseOperator, Role, MAX_DENSE_DIM};
use crate::parallel::{self, ExecMode};
use crate::wigner::{quarter_turn_phase, wigner_d};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::X, Component::Y, Component::Z];
}

/// Single-particle amplitudes over the sites of a lattice, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    pub dims: LatticeDims,
    pub entries: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn localized(dims: &LatticeDims, site: &SiteIndex) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); dims.site_count()];
        entries[dims.flatten(site)?] = Complex64::new(1.0, 0.0);
        Ok(Self {
            dims: dims.clone(),
            entries,
        })
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn amplitude(&self, site: &SiteIndex) -> Result<Complex64> {
        Ok(self.entries[self.dims.flatten(site)?])
    }
}

#[derive(Debug, Clone)]
pub struct QuasiAngularMomentum {
    pub axis: usize,
    pub component: Component,
    pub operator: DenseOperator,
}

fn check_dense_sites(n: usize) -> Result<()> {
    if n > MAX_DENSE_DIM {
        return Err(PftError::UnsupportedSize(format!(
            "{n} sites exceed the dense single-particle limit {MAX_DENSE_DIM}"
        )));
    }
    Ok(())
}

/// -profile as a tridiagonal matrix.
pub fn chain_hamiltonian_from_profile(profile: &CouplingProfile) -> CMatrix {
    let n = profile.extent();
    let mut h = CMatrix::zeros(n, n);
    for (j, &v) in profile.values.iter().enumerate() {
        h[(j, j + 1)] = Complex64::new(-v, 0.0);
        h[(j + 1, j)] = Complex64::new(-v, 0.0);
    }
    h
}

/// Engineered chain Hamiltonian, equal to -J L_x in the spin-(M-1)/2 representation.
pub fn chain_hamiltonian(extent: usize, coupling: f64) -> Result<DenseOperator> {
    let profile = CouplingProfile::engineered(0, extent, coupling)?;
    check_dense_sites(extent)?;
    DenseOperator::hermitian(chain_hamiltonian_from_profile(&profile))
}

/// Kronecker sum of arbitrary per-axis chain Hamiltonians.
pub fn lattice_hamiltonian_from_profiles(
    dims: &LatticeDims,
    profiles: &[CouplingProfile],
) -> Result<DenseOperator> {
    check_profiles(dims, profiles)?;
    check_dense_sites(dims.site_count())?;
    let chains: Vec<CMatrix> = profiles
        .iter()
        .map(chain_hamiltonian_from_profile)
        .collect();
    DenseOperator::hermitian(kronecker_sum(dims, &chains))
}

/// Engineered lattice Hamiltonian; J = 0 on an axis decouples it.
pub fn lattice_hamiltonian(dims: &LatticeDims, couplings: &[f64]) -> Result<DenseOperator> {
    let profiles = engineered_profiles(dims, couplings)?;
    lattice_hamiltonian_from_profiles(dims, &profiles)
}

pub(crate) fn check_profiles(dims: &LatticeDims, profiles: &[CouplingProfile]) -> Result<()> {
    dims.require_transfer()?;
    if profiles.len() != dims.rank() {
        return Err(PftError::DimensionMismatch(format!(
            "{} coupling profiles for a {}-axis lattice",
            profiles.len(),
            dims.rank()
        )));
    }
    for (a, p) in profiles.iter().enumerate() {
        if p.extent() != dims.extent(a) {
            return Err(PftError::DimensionMismatch(format!(
                "profile for axis {a} has {} bonds, extent is {}",
                p.values.len(),
                dims.extent(a)
            )));
        }
    }
    Ok(())
}

/// Places `ops[a]` on axis a and sums: A_0 x I x I + I x A_1 x I + ...
fn kronecker_sum(dims: &LatticeDims, ops: &[CMatrix]) -> CMatrix {
    let n = dims.site_count();
    let mut total = CMatrix::zeros(n, n);
    for (a, op) in ops.iter().enumerate() {
        total += embed_axis(dims, a, op);
    }
    total
}

fn embed_axis(dims: &LatticeDims, axis: usize, op: &CMatrix) -> CMatrix {
    let before: usize = dims.extents()[..axis].iter().product();
    let after = dims.stride(axis);
    let left = CMatrix::identity(before, before);
    let right = CMatrix::identity(after, after);
    kron(&kron(&left, op), &right)
}

/// One chain's L component with C_j = sqrt(j(M-j))/2.
pub fn chain_quasi_l(extent: usize, component: Component) -> Result<CMatrix> {
    if extent < 1 {
        return Err(PftError::InvalidExtent("extent 0".into()));
    }
    let m = extent as f64;
    let mut out = CMatrix::zeros(extent, extent);
    for j in 1..extent {
        let c = 0.5 * ((j as f64) * (m - j as f64)).sqrt();
        let (up, down) = match component {
            Component::X => (Complex64::new(c, 0.0), Complex64::new(c, 0.0)),
            Component::Y => (Complex64::new(0.0, c), Complex64::new(0.0, -c)),
            Component::Z => continue,
        };
        out[(j - 1, j)] = up;
        out[(j, j - 1)] = down;
    }
    if component == Component::Z {
        for j in 1..=extent {
            out[(j - 1, j - 1)] = Complex64::new(magnetic_number(j, extent)?.to_f64(), 0.0);
        }
    }
    Ok(out)
}

/// Single-particle matrix of L_component^(axis).
pub fn quasi_l(
    dims: &LatticeDims,
    axis: usize,
    component: Component,
) -> Result<QuasiAngularMomentum> {
    dims.check_axis(axis)?;
    check_dense_sites(dims.site_count())?;
    let chain = chain_quasi_l(dims.extent(axis), component)?;
    Ok(QuasiAngularMomentum {
        axis,
        component,
        operator: DenseOperator::hermitian(embed_axis(dims, axis, &chain))?,
    })
}

/// U_{j'j}(t) = i^(m-m') d^l_{m'm}(J t) for one engineered chain.
pub fn propagator_analytic_1d(extent: usize, coupling: f64, t: f64) -> Result<DenseOperator> {
    Ok(DenseOperator::from_parts_unchecked(
        analytic_chain_matrix(extent, coupling, t)?,
        Role::Unitary,
    ))
}

fn analytic_chain_matrix(extent: usize, coupling: f64, t: f64) -> Result<CMatrix> {
    if extent < 2 {
        return Err(PftError::InvalidExtent(format!(
            "chain extent {extent} below 2"
        )));
    }
    if extent > MAX_ANALYTIC_EXTENT {
        return Err(PftError::UnsupportedSize(format!(
            "chain extent {extent} exceeds {MAX_ANALYTIC_EXTENT}"
        )));
    }
    if !coupling.is_finite() || !t.is_finite() {
        return Err(PftError::InvalidArgument(
            "non-finite coupling or time".into(),
        ));
    }
    let d = wigner_d(extent - 1, coupling * t)?;
    let mut u = CMatrix::zeros(extent, extent);
    for row in 0..extent {
        let m_prime = d.magnetic_number(row);
        for col in 0..extent {
            let m = d.magnetic_number(col);
            u[(row, col)] = quarter_turn_phase(m, m_prime)? * d.matrix[(row, col)];
        }
    }
    Ok(u)
}

/// Kronecker product of the per-axis analytic chain propagators.
pub fn propagator_analytic(dims: &LatticeDims, couplings: &[f64], t: f64) -> Result<DenseOperator> {
    check_couplings(dims, couplings)?;
    dims.require_transfer()?;
    check_dense_sites(dims.site_count())?;
    let mut u = CMatrix::identity(1, 1);
    for (a, &j) in couplings.iter().enumerate() {
        u = kron(&u, &analytic_chain_matrix(dims.extent(a), j, t)?);
    }
    Ok(DenseOperator::from_parts_unchecked(u, Role::Unitary))
}

/// Per-axis chain propagators at one time; lattice entries are products of these.
#[derive(Debug, Clone)]
pub struct FactorizedPropagator {
    axes: Vec<CMatrix>,
}

impl FactorizedPropagator {
    pub fn analytic(dims: &LatticeDims, couplings: &[f64], t: f64) -> Result<Self> {
        check_couplings(dims, couplings)?;
        dims.require_transfer()?;
        let axes = couplings
            .iter()
            .enumerate()
            .map(|(a, &j)| analytic_chain_matrix(dims.extent(a), j, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axes })
    }

    /// Numeric exponentials of each axis' chain Hamiltonian.
    pub fn numeric(dims: &LatticeDims, profiles: &[CouplingProfile], t: f64) -> Result<Self> {
        check_profiles(dims, profiles)?;
        let axes = profiles
            .iter()
            .map(|p| {
                let h = DenseOperator::hermitian(chain_hamiltonian_from_profile(p))?;
                Ok(h.propagator(t)?.into_matrix())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axes })
    }

    /// <target| U |source>.
    pub fn amplitude(&self, target: &SiteIndex, source: &SiteIndex) -> Complex64 {
        self.axes
            .iter()
            .zip(target.coords.iter().zip(&source.coords))
            .fold(Complex64::new(1.0, 0.0), |acc, (u, (&r, &c))| {
                acc * u[(r - 1, c - 1)]
            })
    }

    pub fn axis(&self, axis: usize) -> &CMatrix {
        &self.axes[axis]
    }
}

/// <target| U(t) |source> from the analytic propagator.
pub fn transfer_amplitude(
    dims: &LatticeDims,
    couplings: &[f64],
    source: &SiteIndex,
    target: &SiteIndex,
    t: f64,
) -> Result<Complex64> {
    dims.check_site(source)?;
    dims.check_site(target)?;
    Ok(FactorizedPropagator::analytic(dims, couplings, t)?.amplitude(target, source))
}

/// Pointwise |<target|U(t)|source>|^2 over a strictly increasing grid.
pub fn fidelity_sweep(
    dims: &LatticeDims,
    couplings: &[f64],
    source: &SiteIndex,
    target: &SiteIndex,
    t_grid: &[f64],
    mode: ExecMode,
) -> Result<Vec<(f64, f64)>> {
    check_grid(t_grid)?;
    dims.check_site(source)?;
    dims.check_site(target)?;
    check_couplings(dims, couplings)?;
    parallel::try_map(mode, t_grid, |&t| {
        let a = transfer_amplitude(dims, couplings, source, target, t)?;
        Ok((t, a.norm_sqr().min(1.0)))
    })
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(PftError::InvalidArgument("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(PftError::InvalidArgument("non-finite time in grid".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PftError::InvalidArgument(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Multiplies every bond by (1 + epsilon u), u ~ U[-1, 1], from a ChaCha8 stream seeded by `seed`.
pub fn disorder_perturb(
    profile: &CouplingProfile,
    epsilon: f64,
    seed: u64,
) -> Result<CouplingProfile> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(PftError::InvalidArgument(format!(
            "epsilon must be a finite nonnegative number, got {epsilon}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = profile
        .values
        .iter()
        .map(|&v| {
            let u: f64 = rng.random_range(-1.0..=1.0);
            v * (1.0 + epsilon * u)
        })
        .collect();
    Ok(CouplingProfile {
        axis: profile.axis,
        scale: profile.scale,
        values,
    })
}

/// Seed used for axis `axis` of Monte-Carlo sample `seed`.
pub fn axis_seed(seed: u64, axis: usize) -> u64 {
    // splitmix64 finaliser so neighbouring seeds give unrelated streams
    let mut z = seed.wrapping_add((axis as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mirror-transfer fidelity |<mirror(source)|U(t0)|source>|^2 for each disorder sample.
///
/// Each sample perturbs every axis profile independently and evolves with
/// the numeric (eigendecomposition) propagator.
pub fn disorder_fidelities(
    dims: &LatticeDims,
    couplings: &[f64],
    source: &SiteIndex,
    epsilon: f64,
    seeds: &[u64],
    mode: ExecMode,
) -> Result<Vec<f64>> {
    let j = crate::lattice::common_coupling(couplings)?;
    let t0 = pst_time(j)?;
    let target = mirror_site(source, dims)?;
    let base = engineered_profiles(dims, couplings)?;
    parallel::try_map(mode, seeds, |&seed| {
        let profiles = base
            .iter()
            .enumerate()
            .map(|(a, p)| disorder_perturb(p, epsilon, axis_seed(seed, a)))
            .collect::<Result<Vec<_>>>()?;
        let u = FactorizedPropagator::numeric(dims, &profiles, t0)?;
        Ok(u.amplitude(&target, source).norm_sqr().min(1.0))
    })
}

/// Summary of the propagator at t0 against the mirror permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorReport {
    /// Largest |U_{s',s}| with s' != mirror(s).
    pub max_off_mirror: f64,
    /// Largest | |U_{mirror(s),s}| - 1 |.
    pub max_modulus_defect: f64,
    /// U_{mirror(origin),origin}.
    pub arrival_phase: Complex64,
    /// Largest |U_{mirror(s),s} - arrival_phase| over all sites.
    pub phase_spread: f64,
    /// prod_a signature(extent_a).
    pub signature: SignaturePhase,
}

impl MirrorReport {
    /// arrival_phase / signature: the fixed convention phase of the propagator.
    pub fn convention_phase(&self) -> Complex64 {
        self.arrival_phase / self.signature.value()
    }
}

/// Checks the full analytic propagator at t0 = pi/J against the mirror law.
pub fn mirror_report(dims: &LatticeDims, coupling: f64) -> Result<MirrorReport> {
    let t0 = pst_time(coupling)?;
    let couplings = vec![coupling; dims.rank()];
    let u = FactorizedPropagator::analytic(dims, &couplings, t0)?;
    let origin = dims.origin();
    let arrival = u.amplitude(&mirror_site(&origin, dims)?, &origin);

    let mut max_off = 0.0f64;
    let mut max_defect = 0.0f64;
    let mut spread = 0.0f64;
    // per-axis factorization: off-mirror entries vanish iff every factor does
    for (a, m) in u.axes.iter().enumerate() {
        let e = dims.extent(a);
        for r in 0..e {
            for c in 0..e {
                if r + c + 1 != e {
                    max_off = max_off.max(m[(r, c)].norm());
                }
            }
        }
    }
    if dims.site_count() <= MAX_DENSE_DIM {
        let full = propagator_analytic(dims, &couplings, t0)?;
        for (col, s) in dims.sites().enumerate() {
            let row = dims.flatten(&mirror_site(&s, dims)?)?;
            for r in 0..dims.site_count() {
                if r != row {
                    max_off = max_off.max(full.get(r, col).norm());
                }
            }
            let v = full.get(row, col);
            max_defect = max_defect.max((v.norm() - 1.0).abs());
            spread = spread.max((v - arrival).norm());
        }
    } else {
        for s in dims.sites() {
            let v = u.amplitude(&mirror_site(&s, dims)?, &s);
            max_defect = max_defect.max((v.norm() - 1.0).abs());
            spread = spread.max((v - arrival).norm());
        }
    }
    Ok(MirrorReport {
        max_off_mirror: max_off,
        max_modulus_defect: max_defect,
        arrival_phase: arrival,
        phase_spread: spread,
        signature: lattice_signature(dims),
    })
}

/// Largest entrywise gap between the analytic propagator and exp(-iHt) of the lattice Hamiltonian.
pub fn analytic_vs_numeric(dims: &LatticeDims, couplings: &[f64], t: f64) -> Result<f64> {
    let analytic = propagator_analytic(dims, couplings, t)?;
    let numeric = lattice_hamiltonian(dims, couplings)?.propagator(t)?;
    analytic.max_abs_diff(&numeric)
}

/// Convention phase of one engineered chain, measured from the numeric oracle:
/// <M|exp(-iH t0)|1> / signature(M).
pub fn measured_convention_phase(extent: usize, coupling: f64) -> Result<Complex64> {
    let t0 = pst_time(coupling)?;
    let u = chain_hamiltonian(extent, coupling)?.propagator(t0)?;
    Ok(u.get(extent - 1, 0) / crate::lattice::signature(extent).value())
}

/// Largest column-norm deviation from 1.
pub fn column_norm_defect(u: &DenseOperator) -> f64 {
    let m: &DMatrix<Complex64> = u.matrix();
    m.column_iter()
        .map(|c| (c.norm() - 1.0).abs())
        .fold(0.0, f64::max)
}
