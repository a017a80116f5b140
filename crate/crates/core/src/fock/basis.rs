use std::collections::HashMap;
use std::fmt;

use crate::error::{PftError, Result};
use crate::lattice::{LatticeDims, SiteIndex};

/// Largest sector dimension that will be enumerated.
pub const MAX_SECTOR_DIM: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
    /// Occupancy capped at one, no exchange signs (the sigma^+ substitution).
    HardCore,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
            Statistics::HardCore => "hardcore",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub site: SiteIndex,
    pub spin: Option<Spin>,
}

impl ModeIndex {
    pub fn spinless(coords: &[usize]) -> Self {
        Self {
            site: SiteIndex::new(coords),
            spin: None,
        }
    }

    pub fn with_spin(coords: &[usize], spin: Spin) -> Self {
        Self {
            site: SiteIndex::new(coords),
            spin: Some(spin),
        }
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spin {
            None => write!(f, "{}", self.site),
            Some(Spin::Up) => write!(f, "{}up", self.site),
            Some(Spin::Down) => write!(f, "{}dn", self.site),
        }
    }
}

/// Lattice plus particle type: fixes the canonical mode order
/// (row-major sites, spin up before spin down within a site).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockModel {
    dims: LatticeDims,
    statistics: Statistics,
    spinful: bool,
}

impl FockModel {
    pub fn new(dims: LatticeDims, statistics: Statistics, spinful: bool) -> Result<Self> {
        if spinful && statistics != Statistics::Fermion {
            return Err(PftError::WrongStatistics(format!(
                "spinful models are spin-1/2 fermions, got {statistics}"
            )));
        }
        Ok(Self {
            dims,
            statistics,
            spinful,
        })
    }

    pub fn dims(&self) -> &LatticeDims {
        &self.dims
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn spinful(&self) -> bool {
        self.spinful
    }

    pub fn spins_per_site(&self) -> usize {
        if self.spinful {
            2
        } else {
            1
        }
    }

    pub fn mode_count(&self) -> usize {
        self.dims.site_count() * self.spins_per_site()
    }

    /// Canonical position of a mode.
    pub fn mode_position(&self, mode: &ModeIndex) -> Result<usize> {
        let site = self.dims.flatten(&mode.site)?;
        match (self.spinful, mode.spin) {
            (false, None) => Ok(site),
            (true, Some(Spin::Up)) => Ok(2 * site),
            (true, Some(Spin::Down)) => Ok(2 * site + 1),
            (true, None) => Err(PftError::Index(format!(
                "mode {mode} needs a spin label in a spinful model"
            ))),
            (false, Some(_)) => Err(PftError::Index(format!(
                "mode {mode} carries spin in a spinless model"
            ))),
        }
    }

    pub fn mode(&self, position: usize) -> ModeIndex {
        let per = self.spins_per_site();
        let site = self.dims.unflatten(position / per);
        let spin = self.spinful.then_some(if position.is_multiple_of(2) {
            Spin::Up
        } else {
            Spin::Down
        });
        ModeIndex { site, spin }
    }

    /// Flat site index of a mode position.
    pub fn site_of(&self, position: usize) -> usize {
        position / self.spins_per_site()
    }

    /// Mode positions at flat site `site`.
    pub fn modes_at(&self, site: usize) -> impl Iterator<Item = usize> {
        let per = self.spins_per_site();
        (site * per)..(site * per + per)
    }

    pub fn max_occupancy(&self, n_total: usize) -> u8 {
        match self.statistics {
            Statistics::Boson => n_total.min(u8::MAX as usize) as u8,
            Statistics::Fermion | Statistics::HardCore => 1,
        }
    }

    pub fn sector_dimension(&self, n_total: usize) -> Option<u128> {
        let k = self.mode_count() as u128;
        let n = n_total as u128;
        match self.statistics {
            Statistics::Boson => binomial(k + n - 1, n),
            _ => binomial(k, n),
        }
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Occupation numbers, one per mode in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationState(pub Vec<u8>);

impl OccupationState {
    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn occupancies(&self) -> &[u8] {
        &self.0
    }

    pub fn particle_number(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// Occupied modes strictly before `mode`.
    fn parity_before(&self, mode: usize) -> usize {
        self.0[..mode].iter().map(|&n| n as usize).sum()
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for n in &self.0 {
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

/// a^dag_mode |state>, returned as (new state, factor). A zero factor means the
/// state was annihilated; the returned state is then meaningless.
pub fn apply_creation(
    state: &OccupationState,
    mode: usize,
    statistics: Statistics,
) -> (OccupationState, f64) {
    let n = state.0[mode];
    let factor = match statistics {
        Statistics::Boson => ((n as f64) + 1.0).sqrt(),
        Statistics::HardCore => {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        }
        Statistics::Fermion => {
            if n != 0 {
                0.0
            } else if state.parity_before(mode).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        }
    };
    if factor == 0.0 {
        return (state.clone(), 0.0);
    }
    let mut next = state.clone();
    next.0[mode] = n.saturating_add(1);
    (next, factor)
}

/// a_mode |state>, same conventions as [`apply_creation`].
pub fn apply_annihilation(
    state: &OccupationState,
    mode: usize,
    statistics: Statistics,
) -> (OccupationState, f64) {
    let n = state.0[mode];
    if n == 0 {
        return (state.clone(), 0.0);
    }
    let factor = match statistics {
        Statistics::Boson => (n as f64).sqrt(),
        Statistics::HardCore => 1.0,
        Statistics::Fermion => {
            if state.parity_before(mode).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        }
    };
    let mut next = state.clone();
    next.0[mode] = n - 1;
    (next, factor)
}

/// All occupation states with a fixed particle number, ascending lexicographic order.
#[derive(Debug, Clone)]
pub struct FockBasis {
    model: FockModel,
    n_total: usize,
    states: Vec<OccupationState>,
    index: HashMap<OccupationState, usize>,
}

impl FockBasis {
    pub fn model(&self) -> &FockModel {
        &self.model
    }

    pub fn statistics(&self) -> Statistics {
        self.model.statistics
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationState {
        &self.states[i]
    }

    pub fn index_of(&self, state: &OccupationState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Enumerates the fixed-`n_total` sector of `model`.
pub fn enumerate_basis(model: &FockModel, n_total: usize) -> Result<FockBasis> {
    let dim = model
        .sector_dimension(n_total)
        .filter(|&d| d <= MAX_SECTOR_DIM as u128)
        .ok_or_else(|| {
            PftError::UnsupportedSize(format!(
                "sector with {n_total} particles on {} modes exceeds {MAX_SECTOR_DIM} states",
                model.mode_count()
            ))
        })? as usize;
    let modes = model.mode_count();
    let cap = model.max_occupancy(n_total);
    let mut states = Vec::with_capacity(dim);
    let mut current = vec![0u8; modes];
    fill(&mut current, 0, n_total, cap, &mut states);
    debug_assert_eq!(states.len(), dim);
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockBasis {
        model: model.clone(),
        n_total,
        states,
        index,
    })
}

fn fill(current: &mut [u8], pos: usize, remaining: usize, cap: u8, out: &mut Vec<OccupationState>) {
    if pos == current.len() {
        if remaining == 0 {
            out.push(OccupationState(current.to_vec()));
        }
        return;
    }
    let room = (current.len() - pos - 1) * cap as usize;
    let lo = remaining.saturating_sub(room);
    let hi = remaining.min(cap as usize);
    for n in lo..=hi {
        current[pos] = n as u8;
        fill(current, pos + 1, remaining - n, cap, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(extents: &[usize], st: Statistics, spinful: bool) -> FockModel {
        FockModel::new(LatticeDims::new(extents).unwrap(), st, spinful).unwrap()
    }

    #[test]
    fn dimensions() {
        let m = model(&[2, 2], Statistics::Boson, false);
        assert_eq!(enumerate_basis(&m, 0).unwrap().dim(), 1);
        assert_eq!(enumerate_basis(&m, 2).unwrap().dim(), 10);
        let m = model(&[2], Statistics::Fermion, true);
        assert_eq!(enumerate_basis(&m, 2).unwrap().dim(), 6);
        let m = model(&[3, 3], Statistics::HardCore, false);
        assert_eq!(enumerate_basis(&m, 3).unwrap().dim(), 84);
        let m = model(&[3, 3], Statistics::Fermion, false);
        assert_eq!(enumerate_basis(&m, 10).unwrap().dim(), 0);
    }

    #[test]
    fn lexicographic_order() {
        let m = model(&[3], Statistics::Boson, false);
        let b = enumerate_basis(&m, 2).unwrap();
        let got: Vec<Vec<u8>> = b.states().iter().map(|s| s.0.clone()).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0]
            ]
        );
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
        }
    }

    #[test]
    fn creation_factors() {
        let s = OccupationState(vec![1, 0]);
        let (t, f) = apply_creation(&s, 0, Statistics::Boson);
        assert_eq!(t.0, vec![2, 0]);
        assert!((f - 2f64.sqrt()).abs() < 1e-15);

        let (t, f) = apply_creation(&s, 1, Statistics::Fermion);
        assert_eq!(t.0, vec![1, 1]);
        assert_eq!(f, -1.0);
        let (_, f) = apply_creation(&s, 0, Statistics::Fermion);
        assert_eq!(f, 0.0);

        let (_, f) = apply_creation(&s, 0, Statistics::HardCore);
        assert_eq!(f, 0.0);
        let (t, f) = apply_creation(&s, 1, Statistics::HardCore);
        assert_eq!((t.0, f), (vec![1, 1], 1.0));
    }

    #[test]
    fn fermion_anticommutation() {
        // c_a^dag c_b^dag = - c_b^dag c_a^dag on every two-mode pair
        let vac = OccupationState::vacuum(4);
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    continue;
                }
                let (s1, f1) = apply_creation(&vac, b, Statistics::Fermion);
                let (s1, f2) = apply_creation(&s1, a, Statistics::Fermion);
                let (s2, g1) = apply_creation(&vac, a, Statistics::Fermion);
                let (s2, g2) = apply_creation(&s2, b, Statistics::Fermion);
                assert_eq!(s1, s2);
                assert_eq!(f1 * f2, -(g1 * g2));
            }
        }
    }

    #[test]
    fn annihilation_inverts_creation() {
        let s = OccupationState(vec![1, 2, 0]);
        let (t, f) = apply_creation(&s, 1, Statistics::Boson);
        let (u, g) = apply_annihilation(&t, 1, Statistics::Boson);
        assert_eq!(u, s);
        assert!((f * g - 3.0).abs() < 1e-14);
        let (_, z) = apply_annihilation(&s, 2, Statistics::Boson);
        assert_eq!(z, 0.0);
    }

    #[test]
    fn mode_positions() {
        let m = model(&[2, 3], Statistics::Fermion, true);
        assert_eq!(m.mode_count(), 12);
        let up = ModeIndex::with_spin(&[1, 2], Spin::Up);
        let dn = ModeIndex::with_spin(&[1, 2], Spin::Down);
        assert_eq!(m.mode_position(&up).unwrap(), 2);
        assert_eq!(m.mode_position(&dn).unwrap(), 3);
        assert_eq!(m.mode(3), dn);
        assert!(m.mode_position(&ModeIndex::spinless(&[1, 2])).is_err());
        assert!(FockModel::new(LatticeDims::new(&[2]).unwrap(), Statistics::Boson, true).is_err());
    }

    #[test]
    fn overflow_refused() {
        let m = model(&[20, 20], Statistics::Boson, false);
        assert!(matches!(
            enumerate_basis(&m, 4),
            Err(PftError::UnsupportedSize(_))
        ));
    }
}
