//! Second-quantized operators restricted to one fixed-number sector.

use num_complex::Complex64;

use super::basis::{apply_annihilation, apply_creation, FockBasis, Statistics};
use crate::dynamics::{check_profiles, Component};
use crate::error::{PftError, Result};
use crate::lattice::{engineered_profiles, magnetic_number, CouplingProfile, LatticeDims};
use crate::operator::{CMatrix, DenseOperator};

/// sum coef * a^dag_p a_q over (p, q, coef) with p, q site indices.
#[derive(Debug, Clone, Default)]
pub struct OneBody {
    pub terms: Vec<(usize, usize, Complex64)>,
}

impl OneBody {
    fn push_bond(&mut self, a: usize, b: usize, forward: Complex64) {
        self.terms.push((a, b, forward));
        self.terms.push((b, a, forward.conj()));
    }

    /// The same operator as a site-by-site matrix (single-particle sector).
    pub fn site_matrix(&self, sites: usize) -> CMatrix {
        let mut m = CMatrix::zeros(sites, sites);
        for &(p, q, c) in &self.terms {
            m[(p, q)] += c;
        }
        m
    }
}

/// Nearest-neighbour bonds along every axis: (site, site + stride, coordinate on the axis).
fn bonds(dims: &LatticeDims, axis: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    let stride = dims.stride(axis);
    let extent = dims.extent(axis);
    dims.sites().enumerate().filter_map(move |(i, s)| {
        let c = s.coords[axis];
        (c < extent).then_some((i, i + stride, c))
    })
}

/// -sum_a sum_bonds value (b^dag_s b_{s+e} + h.c.).
pub fn hopping_terms(dims: &LatticeDims, profiles: &[CouplingProfile]) -> Result<OneBody> {
    check_profiles(dims, profiles)?;
    let mut op = OneBody::default();
    for (axis, p) in profiles.iter().enumerate() {
        for (s, t, c) in bonds(dims, axis) {
            let v = p.values[c - 1];
            if v != 0.0 {
                op.push_bond(s, t, Complex64::new(-v, 0.0));
            }
        }
    }
    Ok(op)
}

/// L_component^(axis) with the engineered C_j on that axis.
pub fn quasi_l_terms(dims: &LatticeDims, axis: usize, component: Component) -> Result<OneBody> {
    dims.check_axis(axis)?;
    let extent = dims.extent(axis);
    let mut op = OneBody::default();
    match component {
        Component::Z => {
            for (i, s) in dims.sites().enumerate() {
                let m = magnetic_number(s.coords[axis], extent)?.to_f64();
                if m != 0.0 {
                    op.terms.push((i, i, Complex64::new(m, 0.0)));
                }
            }
        }
        Component::X | Component::Y => {
            for (s, t, c) in bonds(dims, axis) {
                let cj = 0.5 * ((c * (extent - c)) as f64).sqrt();
                let forward = match component {
                    Component::X => Complex64::new(cj, 0.0),
                    _ => Complex64::new(0.0, cj),
                };
                op.push_bond(s, t, forward);
            }
        }
    }
    Ok(op)
}

fn check_basis_dims(basis: &FockBasis, dims: &LatticeDims) -> Result<()> {
    if basis.model().dims() != dims {
        return Err(PftError::DimensionMismatch(format!(
            "basis built on {} used with lattice {}",
            basis.model().dims(),
            dims
        )));
    }
    Ok(())
}

/// Sector matrix of a mode-level one-body operator: sum coef a^dag_p a_q.
pub fn mode_operator_matrix(basis: &FockBasis, terms: &[(usize, usize, Complex64)]) -> CMatrix {
    let st = basis.statistics();
    let n = basis.dim();
    let mut m = CMatrix::zeros(n, n);
    for (col, state) in basis.states().iter().enumerate() {
        for &(p, q, c) in terms {
            let (mid, f1) = apply_annihilation(state, q, st);
            if f1 == 0.0 {
                continue;
            }
            let (out, f2) = apply_creation(&mid, p, st);
            if f2 == 0.0 {
                continue;
            }
            if let Some(row) = basis.index_of(&out) {
                m[(row, col)] += c * (f1 * f2);
            }
        }
    }
    m
}

/// Lifts a site-level one-body operator to the sector, spin-diagonally.
pub fn site_operator_matrix(basis: &FockBasis, op: &OneBody) -> CMatrix {
    let model = basis.model();
    let per = model.spins_per_site();
    let terms: Vec<(usize, usize, Complex64)> = op
        .terms
        .iter()
        .flat_map(|&(p, q, c)| (0..per).map(move |s| (p * per + s, q * per + s, c)))
        .collect();
    mode_operator_matrix(basis, &terms)
}

/// Hopping Hamiltonian in the sector for arbitrary per-axis profiles.
pub fn build_hopping_with_profiles(
    basis: &FockBasis,
    profiles: &[CouplingProfile],
) -> Result<DenseOperator> {
    let dims = basis.model().dims();
    check_sector_size(basis)?;
    let op = hopping_terms(dims, profiles)?;
    DenseOperator::hermitian(site_operator_matrix(basis, &op))
}

/// Engineered hopping Hamiltonian with per-axis J.
pub fn build_hopping(
    basis: &FockBasis,
    dims: &LatticeDims,
    couplings: &[f64],
) -> Result<DenseOperator> {
    check_basis_dims(basis, dims)?;
    let profiles = engineered_profiles(dims, couplings)?;
    build_hopping_with_profiles(basis, &profiles)
}

/// Second-quantized L_component^(axis) for the basis' statistics.
pub fn build_quasi_l_fock(
    basis: &FockBasis,
    dims: &LatticeDims,
    axis: usize,
    component: Component,
) -> Result<DenseOperator> {
    check_basis_dims(basis, dims)?;
    check_sector_size(basis)?;
    let op = quasi_l_terms(dims, axis, component)?;
    DenseOperator::hermitian(site_operator_matrix(basis, &op))
}

/// strength * sum_s n_s (n_s - 1), diagonal.
pub fn build_onsite_repulsion(basis: &FockBasis, strength: f64) -> Result<DenseOperator> {
    if basis.statistics() != Statistics::Boson {
        return Err(PftError::WrongStatistics(format!(
            "on-site repulsion needs bosons, basis holds {}",
            basis.statistics()
        )));
    }
    check_sector_size(basis)?;
    let n = basis.dim();
    let mut m = CMatrix::zeros(n, n);
    for (i, s) in basis.states().iter().enumerate() {
        let e: f64 = s
            .occupancies()
            .iter()
            .map(|&k| {
                let k = k as f64;
                k * (k - 1.0)
            })
            .sum();
        m[(i, i)] = Complex64::new(strength * e, 0.0);
    }
    DenseOperator::hermitian(m)
}

/// Total spin S_component = sum_sites sum_{s s'} <s'|sigma/2|s> c^dag_{s'} c_s.
pub fn build_total_spin(basis: &FockBasis, component: Component) -> Result<DenseOperator> {
    let model = basis.model();
    if !model.spinful() {
        return Err(PftError::WrongStatistics(
            "total spin needs a spinful fermion basis".into(),
        ));
    }
    check_sector_size(basis)?;
    let half = 0.5;
    let mut terms = Vec::new();
    for site in 0..model.dims().site_count() {
        let up = 2 * site;
        let dn = 2 * site + 1;
        match component {
            Component::X => {
                terms.push((up, dn, Complex64::new(half, 0.0)));
                terms.push((dn, up, Complex64::new(half, 0.0)));
            }
            Component::Y => {
                // <up|Y|dn> = -i, <dn|Y|up> = i
                terms.push((up, dn, Complex64::new(0.0, -half)));
                terms.push((dn, up, Complex64::new(0.0, half)));
            }
            Component::Z => {
                terms.push((up, up, Complex64::new(half, 0.0)));
                terms.push((dn, dn, Complex64::new(-half, 0.0)));
            }
        }
    }
    DenseOperator::hermitian(mode_operator_matrix(basis, &terms))
}

/// Total particle number, diagonal.
pub fn build_number(basis: &FockBasis) -> DenseOperator {
    let n = basis.dim();
    let v = basis.n_total() as f64;
    DenseOperator::hermitian(CMatrix::identity(n, n) * Complex64::new(v, 0.0))
        .expect("scaled identity is hermitian")
}

fn check_sector_size(basis: &FockBasis) -> Result<()> {
    if basis.dim() > crate::operator::MAX_DENSE_DIM {
        return Err(PftError::UnsupportedSize(format!(
            "sector dimension {} exceeds the dense limit {}",
            basis.dim(),
            crate::operator::MAX_DENSE_DIM
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::lattice_hamiltonian;
    use crate::fock::basis::{enumerate_basis, FockModel};
    use crate::operator::commutator_norm;

    fn basis(extents: &[usize], st: Statistics, spinful: bool, n: usize) -> FockBasis {
        let m = FockModel::new(LatticeDims::new(extents).unwrap(), st, spinful).unwrap();
        enumerate_basis(&m, n).unwrap()
    }

    #[test]
    fn single_particle_sector_matches_kronecker_sum() {
        for extents in [&[4][..], &[2, 3], &[3, 3], &[2, 3, 2]] {
            let dims = LatticeDims::new(extents).unwrap();
            let js: Vec<f64> = (0..dims.rank()).map(|a| 0.7 + 0.4 * a as f64).collect();
            for st in [Statistics::Boson, Statistics::Fermion, Statistics::HardCore] {
                let b = basis(extents, st, false, 1);
                let h = build_hopping(&b, &dims, &js).unwrap();
                let reference = lattice_hamiltonian(&dims, &js).unwrap();
                assert!(h.max_abs_diff(&reference).unwrap() <= 1e-14);
            }
        }
    }

    #[test]
    fn two_bosons_on_a_dimer() {
        // basis |0,2>, |1,1>, |2,0>; <1,1|b0^dag b1|0,2> = sqrt(2)
        let b = basis(&[2], Statistics::Boson, false, 2);
        let dims = LatticeDims::new(&[2]).unwrap();
        let h = build_hopping(&b, &dims, &[1.0]).unwrap();
        let s = -0.5 * 2f64.sqrt();
        let expect = [[0.0, s, 0.0], [s, 0.0, s], [0.0, s, 0.0]];
        for (r, row) in expect.iter().enumerate() {
            for (c, &want) in row.iter().enumerate() {
                assert!((h.get(r, c).re - want).abs() < 1e-15);
                assert_eq!(h.get(r, c).im, 0.0);
            }
        }
    }

    #[test]
    fn vacuum_sector_is_zero() {
        let b = basis(&[3, 3], Statistics::Boson, false, 0);
        let dims = LatticeDims::new(&[3, 3]).unwrap();
        let h = build_hopping(&b, &dims, &[1.0, 1.0]).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cross_axis_commutators_by_statistics() {
        let dims = LatticeDims::new(&[2, 2]).unwrap();
        for st in [Statistics::Boson, Statistics::Fermion] {
            let b = basis(&[2, 2], st, false, 2);
            for ca in Component::ALL {
                for cb in Component::ALL {
                    let a = build_quasi_l_fock(&b, &dims, 0, ca).unwrap();
                    let c = build_quasi_l_fock(&b, &dims, 1, cb).unwrap();
                    assert!(commutator_norm(&a, &c).unwrap() <= 1e-12, "{st}");
                }
            }
        }
        let b = basis(&[2, 2], Statistics::HardCore, false, 2);
        let a = build_quasi_l_fock(&b, &dims, 0, Component::X).unwrap();
        let c = build_quasi_l_fock(&b, &dims, 1, Component::X).unwrap();
        let norm = commutator_norm(&a, &c).unwrap();
        // regression constant for the Pauli substitution on 2x2, n = 2
        assert!((norm - 0.5).abs() < 1e-14, "{norm}");
    }

    #[test]
    fn repulsion() {
        let b = basis(&[3, 3], Statistics::Boson, false, 1);
        assert_eq!(build_onsite_repulsion(&b, 5.0).unwrap().max_abs(), 0.0);
        let b = basis(&[2], Statistics::Boson, false, 2);
        let u = build_onsite_repulsion(&b, 3.0).unwrap();
        // |0,2> and |2,0> are doubly occupied
        assert_eq!(u.get(0, 0).re, 6.0);
        assert_eq!(u.get(1, 1).re, 0.0);
        assert_eq!(u.get(2, 2).re, 6.0);
        let b = basis(&[2], Statistics::Boson, false, 0);
        assert_eq!(build_onsite_repulsion(&b, 3.0).unwrap().get(0, 0).re, 0.0);
        let b = basis(&[2], Statistics::Fermion, false, 1);
        assert!(build_onsite_repulsion(&b, 1.0).is_err());
    }

    #[test]
    fn spin_operators() {
        let b = basis(&[2, 2], Statistics::Fermion, true, 1);
        let sz = build_total_spin(&b, Component::Z).unwrap();
        // first state in lex order puts the particle on the last mode, (2,2) down
        let up_idx = b
            .index_of(&crate::fock::basis::OccupationState({
                let mut v = vec![0; 8];
                v[0] = 1;
                v
            }))
            .unwrap();
        assert_eq!(sz.get(up_idx, up_idx).re, 0.5);

        let b = basis(&[2, 2], Statistics::Fermion, true, 2);
        let sx = build_total_spin(&b, Component::X).unwrap();
        let sy = build_total_spin(&b, Component::Y).unwrap();
        let sz = build_total_spin(&b, Component::Z).unwrap();
        let xy = crate::operator::commutator(&sx, &sy).unwrap();
        let isz = DenseOperator::general(sz.matrix().map(|z| z * Complex64::i()));
        assert!(xy.max_abs_diff(&isz).unwrap() <= 1e-12);
        let dims = LatticeDims::new(&[2, 2]).unwrap();
        for axis in 0..2 {
            for c in Component::ALL {
                let l = build_quasi_l_fock(&b, &dims, axis, c).unwrap();
                for s in [&sx, &sy, &sz] {
                    assert!(commutator_norm(s, &l).unwrap() <= 1e-12);
                }
            }
        }
        let spinless = basis(&[2, 2], Statistics::Fermion, false, 1);
        assert!(build_total_spin(&spinless, Component::Z).is_err());
    }

    #[test]
    fn hopping_conserves_number_by_construction() {
        let b = basis(&[3, 2], Statistics::Boson, false, 3);
        let dims = LatticeDims::new(&[3, 2]).unwrap();
        let h = build_hopping(&b, &dims, &[1.0, 1.0]).unwrap();
        let n = build_number(&b);
        assert_eq!(commutator_norm(&h, &n).unwrap(), 0.0);
    }
}
