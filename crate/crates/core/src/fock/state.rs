//! Transferred functions f(a^dag)|0>, multi-sector states and their evolution.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;

use super::basis::{
    apply_creation, enumerate_basis, FockBasis, FockModel, ModeIndex, OccupationState,
};
use crate::error::{PftError, Result};
use crate::lattice::{mirror_site, LatticeDims};
use crate::operator::{max_abs_vec, CVector, DenseOperator, HermitianEigen};

/// Ordered product of creation-operator powers; `factors[0]` is leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub factors: Vec<(ModeIndex, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self { factors: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|&(_, p)| p as usize).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: Complex64,
    pub monomial: Monomial,
}

/// f as a sum of monomials over creation operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFunction {
    terms: Vec<Term>,
}

impl PolynomialFunction {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(PftError::DegenerateFunction("function has no terms".into()));
        }
        Ok(Self { terms })
    }

    /// sum_k coeffs[k] x^k with x the creation operator of `mode`.
    pub fn single_mode(mode: &ModeIndex, coeffs: &[Complex64]) -> Result<Self> {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, &c)| Term {
                coefficient: c,
                monomial: if k == 0 {
                    Monomial::one()
                } else {
                    Monomial {
                        factors: vec![(mode.clone(), k as u32)],
                    }
                },
            })
            .collect();
        Self::new(terms)
    }

    /// f(x) = x at `mode`.
    pub fn linear(mode: &ModeIndex) -> Self {
        Self {
            terms: vec![Term {
                coefficient: Complex64::new(1.0, 0.0),
                monomial: Monomial {
                    factors: vec![(mode.clone(), 1)],
                },
            }],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            terms: vec![Term {
                coefficient: c,
                monomial: Monomial::one(),
            }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.iter().map(|t| t.monomial.degree()).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Modes appearing in any term.
    pub fn support(&self) -> BTreeSet<ModeIndex> {
        self.terms
            .iter()
            .flat_map(|t| t.monomial.factors.iter().map(|(m, _)| m.clone()))
            .collect()
    }

    /// f * g, each product monomial ordered f-factors first.
    pub fn product(&self, other: &PolynomialFunction) -> PolynomialFunction {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.monomial.factors.clone();
                factors.extend(b.monomial.factors.iter().cloned());
                terms.push(Term {
                    coefficient: a.coefficient * b.coefficient,
                    monomial: Monomial { factors },
                });
            }
        }
        PolynomialFunction { terms }
    }

    /// Same function with every mode moved by `f`; factor order is kept.
    pub fn map_modes(
        &self,
        f: impl Fn(&ModeIndex) -> Result<ModeIndex>,
    ) -> Result<PolynomialFunction> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    coefficient: t.coefficient,
                    monomial: Monomial {
                        factors: t
                            .monomial
                            .factors
                            .iter()
                            .map(|(m, p)| Ok((f(m)?, *p)))
                            .collect::<Result<Vec<_>>>()?,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PolynomialFunction { terms })
    }

    /// Mirror image: every site reflected through the lattice centre.
    pub fn mirrored(&self, dims: &LatticeDims) -> Result<PolynomialFunction> {
        self.map_modes(|m| {
            Ok(ModeIndex {
                site: mirror_site(&m.site, dims)?,
                spin: m.spin,
            })
        })
    }
}

/// Amplitudes over one fixed-number sector.
#[derive(Debug, Clone)]
pub struct FockVector {
    pub basis: Arc<FockBasis>,
    pub amplitudes: CVector,
}

impl FockVector {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// <self|other>.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.basis.n_total() != other.basis.n_total() || self.basis.dim() != other.basis.dim() {
            return Err(PftError::DimensionMismatch(
                "inner product across different sectors".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Direct sum of sector vectors over one model.
#[derive(Debug, Clone)]
pub struct FockState {
    pub model: FockModel,
    pub sectors: BTreeMap<usize, FockVector>,
}

impl FockState {
    pub fn norm(&self) -> f64 {
        self.sectors
            .values()
            .map(FockVector::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sector(&self, n: usize) -> Option<&FockVector> {
        self.sectors.get(&n)
    }

    pub fn scale(&mut self, factor: Complex64) {
        for v in self.sectors.values_mut() {
            v.amplitudes *= factor;
        }
    }

    /// Largest |difference| of amplitudes over the union of sectors.
    pub fn max_abs_diff(&self, other: &FockState) -> f64 {
        let keys: BTreeSet<usize> = self
            .sectors
            .keys()
            .chain(other.sectors.keys())
            .copied()
            .collect();
        keys.into_iter()
            .map(|n| match (self.sectors.get(&n), other.sectors.get(&n)) {
                (Some(a), Some(b)) => max_abs_vec(&(&a.amplitudes - &b.amplitudes)),
                (Some(a), None) | (None, Some(a)) => max_abs_vec(&a.amplitudes),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Amplitude of a given occupation configuration.
    pub fn amplitude(&self, occupation: &OccupationState) -> Complex64 {
        let n = occupation.particle_number();
        self.sectors
            .get(&n)
            .and_then(|v| v.basis.index_of(occupation).map(|i| v.amplitudes[i]))
            .unwrap_or_default()
    }
}

/// Cache of sector bases so repeated calls share them.
#[derive(Debug, Default, Clone)]
pub struct BasisCache {
    bases: BTreeMap<usize, Arc<FockBasis>>,
}

impl BasisCache {
    pub fn get(&mut self, model: &FockModel, n: usize) -> Result<Arc<FockBasis>> {
        if let Some(b) = self.bases.get(&n) {
            if b.model() == model {
                return Ok(b.clone());
            }
        }
        let b = Arc::new(enumerate_basis(model, n)?);
        self.bases.insert(n, b.clone());
        Ok(b)
    }
}

/// f(a^dag)|0>, unnormalized.
pub fn apply_function(
    model: &FockModel,
    f: &PolynomialFunction,
    cache: &mut BasisCache,
) -> Result<FockState> {
    let st = model.statistics();
    let mut sectors: BTreeMap<usize, FockVector> = BTreeMap::new();
    for term in f.terms() {
        let mut positions = Vec::new();
        for (mode, power) in &term.monomial.factors {
            let p = model.mode_position(mode)?;
            positions.extend(std::iter::repeat_n(p, *power as usize));
        }
        // rightmost operator acts first
        let mut state = OccupationState::vacuum(model.mode_count());
        let mut factor = term.coefficient;
        for &p in positions.iter().rev() {
            let (next, k) = apply_creation(&state, p, st);
            if k == 0.0 {
                factor = Complex64::new(0.0, 0.0);
                break;
            }
            state = next;
            factor *= k;
        }
        if factor.norm() == 0.0 {
            continue;
        }
        let n = state.particle_number();
        let basis = cache.get(model, n)?;
        let idx = basis.index_of(&state).ok_or_else(|| {
            PftError::Numerical(format!("configuration {state} missing from its sector"))
        })?;
        let entry = sectors.entry(n).or_insert_with(|| FockVector {
            amplitudes: CVector::zeros(basis.dim()),
            basis: basis.clone(),
        });
        entry.amplitudes[idx] += factor;
    }
    sectors.retain(|_, v| v.norm_sqr() > 0.0);
    Ok(FockState {
        model: model.clone(),
        sectors,
    })
}

/// Normalized f(a^dag)|0> as a direct sum over the sectors f touches.
pub fn state_from_function(model: &FockModel, f: &PolynomialFunction) -> Result<FockState> {
    state_from_function_cached(model, f, &mut BasisCache::default())
}

pub fn state_from_function_cached(
    model: &FockModel,
    f: &PolynomialFunction,
    cache: &mut BasisCache,
) -> Result<FockState> {
    let mut state = apply_function(model, f, cache)?;
    let norm = state.norm();
    if norm < 1e-300 {
        return Err(PftError::DegenerateFunction("f(a^dag)|0> vanishes".into()));
    }
    state.scale(Complex64::new(1.0 / norm, 0.0));
    Ok(state)
}

/// exp(-iHt) applied to one sector vector.
pub fn evolve_fock(state: &FockVector, h: &DenseOperator, t: f64) -> Result<FockVector> {
    if h.dim() != state.basis.dim() {
        return Err(PftError::DimensionMismatch(format!(
            "Hamiltonian of dimension {} on a sector of dimension {}",
            h.dim(),
            state.basis.dim()
        )));
    }
    Ok(FockVector {
        basis: state.basis.clone(),
        amplitudes: h.eigen()?.evolve(&state.amplitudes, t)?,
    })
}

/// Evolves multi-sector states, diagonalizing each sector Hamiltonian once.
pub struct Evolver<F> {
    builder: F,
    spectra: BTreeMap<usize, HermitianEigen>,
}

impl<F> Evolver<F>
where
    F: Fn(&FockBasis) -> Result<DenseOperator>,
{
    pub fn new(builder: F) -> Self {
        Self {
            builder,
            spectra: BTreeMap::new(),
        }
    }

    /// Diagonalizes the Hamiltonian of every sector present in `state`.
    pub fn prepare(&mut self, state: &FockState) -> Result<()> {
        for (&n, v) in &state.sectors {
            if !self.spectra.contains_key(&n) {
                let h = (self.builder)(&v.basis)?;
                if h.dim() != v.basis.dim() {
                    return Err(PftError::DimensionMismatch(format!(
                        "sector {n}: Hamiltonian dimension {} vs basis {}",
                        h.dim(),
                        v.basis.dim()
                    )));
                }
                self.spectra.insert(n, h.eigen()?);
            }
        }
        Ok(())
    }

    /// exp(-iHt)|state>; every sector must have been prepared.
    pub fn evolve(&self, state: &FockState, t: f64) -> Result<FockState> {
        let mut sectors = BTreeMap::new();
        for (&n, v) in &state.sectors {
            let eig = self.spectra.get(&n).ok_or_else(|| {
                PftError::InvalidArgument(format!("sector {n} not prepared for evolution"))
            })?;
            sectors.insert(
                n,
                FockVector {
                    basis: v.basis.clone(),
                    amplitudes: eig.evolve(&v.amplitudes, t)?,
                },
            );
        }
        Ok(FockState {
            model: state.model.clone(),
            sectors,
        })
    }

    pub fn prepare_and_evolve(&mut self, state: &FockState, t: f64) -> Result<FockState> {
        self.prepare(state)?;
        self.evolve(state, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::{Spin, Statistics};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(extents: &[usize], st: Statistics, spinful: bool) -> FockModel {
        FockModel::new(LatticeDims::new(extents).unwrap(), st, spinful).unwrap()
    }

    #[test]
    fn linear_function_is_a_site_state() {
        let m = model(&[3, 3], Statistics::Boson, false);
        let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1, 1]));
        let s = state_from_function(&m, &f).unwrap();
        assert_eq!(s.sectors.len(), 1);
        let mut occ = vec![0u8; 9];
        occ[0] = 1;
        assert_eq!(s.amplitude(&OccupationState(occ)), c(1.0, 0.0));
    }

    #[test]
    fn boson_square_gets_sqrt_two() {
        // f = 1 + x^2/sqrt2 -> |0> + |2>, each weight 1 before normalization
        let m = model(&[2], Statistics::Boson, false);
        let mode = ModeIndex::spinless(&[1]);
        let f = PolynomialFunction::single_mode(
            &mode,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.5f64.sqrt(), 0.0)],
        )
        .unwrap();
        let s = state_from_function(&m, &f).unwrap();
        let h = 0.5f64.sqrt();
        assert!((s.amplitude(&OccupationState(vec![0, 0])) - c(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(&OccupationState(vec![2, 0])) - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn general_onsite_fermion_state() {
        let m = model(&[2], Statistics::Fermion, true);
        let up = ModeIndex::with_spin(&[1], Spin::Up);
        let dn = ModeIndex::with_spin(&[1], Spin::Down);
        let (a, b, g, d) = (c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(-0.5, 0.0));
        let f = PolynomialFunction::new(vec![
            Term {
                coefficient: a,
                monomial: Monomial::one(),
            },
            Term {
                coefficient: b,
                monomial: Monomial {
                    factors: vec![(up.clone(), 1)],
                },
            },
            Term {
                coefficient: g,
                monomial: Monomial {
                    factors: vec![(dn.clone(), 1)],
                },
            },
            Term {
                coefficient: d,
                monomial: Monomial {
                    factors: vec![(up, 1), (dn, 1)],
                },
            },
        ])
        .unwrap();
        let s = state_from_function(&m, &f).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.amplitude(&OccupationState(vec![0, 0, 0, 0])), a);
        assert_eq!(s.amplitude(&OccupationState(vec![1, 0, 0, 0])), b);
        assert_eq!(s.amplitude(&OccupationState(vec![0, 1, 0, 0])), g);
        // c_up^dag c_dn^dag |0>: c_dn^dag first (no sign), then c_up^dag before it (no sign)
        assert_eq!(s.amplitude(&OccupationState(vec![1, 1, 0, 0])), d);
    }

    #[test]
    fn fermionic_square_is_degenerate() {
        let m = model(&[2], Statistics::Fermion, false);
        let mode = ModeIndex::spinless(&[1]);
        let f = PolynomialFunction::single_mode(&mode, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!(matches!(
            state_from_function(&m, &f),
            Err(PftError::DegenerateFunction(_))
        ));
        assert!(PolynomialFunction::new(vec![]).is_err());
    }

    #[test]
    fn mirrored_keeps_order() {
        let dims = LatticeDims::new(&[2, 3]).unwrap();
        let f = PolynomialFunction::linear(&ModeIndex::spinless(&[1, 1]))
            .product(&PolynomialFunction::linear(&ModeIndex::spinless(&[1, 2])));
        let g = f.mirrored(&dims).unwrap();
        let factors: Vec<_> = g.terms()[0]
            .monomial
            .factors
            .iter()
            .map(|(m, _)| m.site.clone())
            .collect();
        assert_eq!(
            factors,
            vec![
                crate::lattice::SiteIndex::new(&[2, 3]),
                crate::lattice::SiteIndex::new(&[2, 2])
            ]
        );
    }

    #[test]
    fn evolution_preserves_norm_and_identity_at_zero() {
        let m = model(&[2, 2], Statistics::Boson, false);
        let mode = ModeIndex::spinless(&[1, 1]);
        let f = PolynomialFunction::single_mode(&mode, &[c(0.3, 0.0), c(0.0, 0.4), c(0.5, 0.1)])
            .unwrap();
        let s = state_from_function(&m, &f).unwrap();
        let dims = m.dims().clone();
        let mut ev = Evolver::new(|b: &FockBasis| {
            crate::fock::operators::build_hopping(b, &dims, &[1.0, 0.8])
        });
        let s0 = ev.prepare_and_evolve(&s, 0.0).unwrap();
        assert!(s0.max_abs_diff(&s) < 1e-12);
        let s1 = ev.evolve(&s, 2.7).unwrap();
        assert!((s1.norm() - 1.0).abs() < 1e-10);
    }
}
