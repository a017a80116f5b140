//! Lattice geometry, the site to magnetic-number dictionary, engineered
//! coupling profiles and signature phases.
//!
//! Site coordinates are 1-based on every axis. Flattening is row-major with
//! axis 0 slowest; every vector and operator in the crate uses that order.

use std::fmt;
use std::ops::{Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{PftError, Result};

/// Largest extent for which the analytic Wigner-d propagator is supported.
pub const MAX_ANALYTIC_EXTENT: usize = 61;
/// Largest total site count accepted for a lattice.
pub const MAX_SITES: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeDims {
    extents: Vec<usize>,
}

impl LatticeDims {
    pub fn new(extents: &[usize]) -> Result<Self> {
        if extents.is_empty() || extents.len() > 3 {
            return Err(PftError::InvalidExtent(format!(
                "lattice must have 1 to 3 axes, got {}",
                extents.len()
            )));
        }
        if let Some(a) = extents.iter().position(|&e| e == 0) {
            return Err(PftError::InvalidExtent(format!("axis {a} has extent 0")));
        }
        let total = extents
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .filter(|&n| n <= MAX_SITES)
            .ok_or_else(|| {
                PftError::UnsupportedSize(format!("more than {MAX_SITES} sites in {extents:?}"))
            })?;
        debug_assert!(total >= 1);
        Ok(Self {
            extents: extents.to_vec(),
        })
    }

    /// Same as [`LatticeDims::new`] but additionally requires every extent to be at least 2.
    pub fn for_transfer(extents: &[usize]) -> Result<Self> {
        let dims = Self::new(extents)?;
        dims.require_transfer()?;
        Ok(dims)
    }

    pub fn require_transfer(&self) -> Result<()> {
        match self.extents.iter().position(|&e| e < 2) {
            Some(a) => Err(PftError::InvalidExtent(format!(
                "axis {a} has extent {} but transfer needs at least 2",
                self.extents[a]
            ))),
            None => Ok(()),
        }
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn rank(&self) -> usize {
        self.extents.len()
    }

    pub fn extent(&self, axis: usize) -> usize {
        self.extents[axis]
    }

    pub fn site_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Distance in flat index between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.extents[axis + 1..].iter().product()
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.rank() {
            Ok(())
        } else {
            Err(PftError::Index(format!(
                "axis {axis} out of range for a {}-axis lattice",
                self.rank()
            )))
        }
    }

    pub fn check_site(&self, site: &SiteIndex) -> Result<()> {
        if site.coords.len() != self.rank() {
            return Err(PftError::Index(format!(
                "site {site} has {} coordinates, lattice has {} axes",
                site.coords.len(),
                self.rank()
            )));
        }
        for (a, (&c, &e)) in site.coords.iter().zip(&self.extents).enumerate() {
            if c < 1 || c > e {
                return Err(PftError::Index(format!(
                    "site {site}: coordinate {c} on axis {a} outside 1..={e}"
                )));
            }
        }
        Ok(())
    }

    /// Row-major flat index (axis 0 slowest) of a 1-based site.
    pub fn flatten(&self, site: &SiteIndex) -> Result<usize> {
        self.check_site(site)?;
        Ok(self.flatten_unchecked(&site.coords))
    }

    pub(crate) fn flatten_unchecked(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.extents)
            .fold(0, |acc, (&c, &e)| acc * e + (c - 1))
    }

    pub fn unflatten(&self, mut index: usize) -> SiteIndex {
        let mut coords = vec![0; self.rank()];
        for a in (0..self.rank()).rev() {
            coords[a] = index % self.extents[a] + 1;
            index /= self.extents[a];
        }
        SiteIndex { coords }
    }

    /// All sites in canonical (row-major) order.
    pub fn sites(&self) -> impl Iterator<Item = SiteIndex> + '_ {
        (0..self.site_count()).map(move |i| self.unflatten(i))
    }

    /// The corner (1, 1, ...).
    pub fn origin(&self) -> SiteIndex {
        SiteIndex {
            coords: vec![1; self.rank()],
        }
    }
}

impl fmt::Display for LatticeDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.extents.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// 1-based lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex {
    pub coords: Vec<usize>,
}

impl SiteIndex {
    pub fn new(coords: &[usize]) -> Self {
        Self {
            coords: coords.to_vec(),
        }
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Exact rational with denominator 1 or 2, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    pub fn from_int(n: i64) -> Self {
        Self { twice: 2 * n }
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn as_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.twice / 2)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}/2", self.twice),
        }
    }
}

/// Magnetic number m = j - (M+1)/2 of the 1-based coordinate `j` on an axis of extent `extent`.
pub fn magnetic_number(j: usize, extent: usize) -> Result<HalfInt> {
    if j < 1 || j > extent {
        return Err(PftError::Index(format!(
            "coordinate {j} outside 1..={extent}"
        )));
    }
    Ok(HalfInt::from_twice(2 * j as i64 - (extent as i64 + 1)))
}

/// A power of i, kept as an exact quarter-turn count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignaturePhase {
    quarter_turns: u8,
}

impl SignaturePhase {
    pub const ONE: SignaturePhase = SignaturePhase { quarter_turns: 0 };

    /// i^k for any integer k.
    pub fn from_quarter_turns(k: i64) -> Self {
        Self {
            quarter_turns: k.rem_euclid(4) as u8,
        }
    }

    pub fn quarter_turns(self) -> u8 {
        self.quarter_turns
    }

    pub fn value(self) -> Complex64 {
        match self.quarter_turns {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Self {
        Self::from_quarter_turns(-(self.quarter_turns as i64))
    }

    pub fn powi(self, n: i64) -> Self {
        Self::from_quarter_turns(self.quarter_turns as i64 * n)
    }
}

impl Mul for SignaturePhase {
    type Output = SignaturePhase;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: SignaturePhase) -> SignaturePhase {
        SignaturePhase::from_quarter_turns(self.quarter_turns as i64 + rhs.quarter_turns as i64)
    }
}

/// r = exp(-i pi (M-1)/2).
pub fn signature(extent: usize) -> SignaturePhase {
    SignaturePhase::from_quarter_turns(-(extent as i64 - 1))
}

/// Product of the per-axis signatures.
pub fn lattice_signature(dims: &LatticeDims) -> SignaturePhase {
    dims.extents()
        .iter()
        .fold(SignaturePhase::ONE, |acc, &e| acc * signature(e))
}

/// Reflects every coordinate: c -> extent - c + 1.
pub fn mirror_site(site: &SiteIndex, dims: &LatticeDims) -> Result<SiteIndex> {
    dims.check_site(site)?;
    Ok(SiteIndex {
        coords: site
            .coords
            .iter()
            .zip(dims.extents())
            .map(|(&c, &e)| e - c + 1)
            .collect(),
    })
}

/// Perfect-transfer time pi/|J|.
pub fn pst_time(coupling: f64) -> Result<f64> {
    if coupling == 0.0 || !coupling.is_finite() {
        return Err(PftError::DegenerateCoupling);
    }
    Ok(std::f64::consts::PI / coupling.abs())
}

/// Hopping amplitudes along one axis: `values[j-1]` couples sites j and j+1.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    pub axis: usize,
    /// Global scale J the profile was built from.
    pub scale: f64,
    pub values: Vec<f64>,
}

impl CouplingProfile {
    /// J * sqrt(j(M-j))/2 for j = 1..M-1.
    pub fn engineered(axis: usize, extent: usize, coupling: f64) -> Result<Self> {
        if extent < 2 {
            return Err(PftError::InvalidExtent(format!(
                "coupling profile needs extent >= 2, got {extent}"
            )));
        }
        if coupling == 0.0 || !coupling.is_finite() {
            return Err(PftError::DegenerateCoupling);
        }
        let m = extent as f64;
        let values = (1..extent)
            .map(|j| {
                let j = j as f64;
                coupling * 0.5 * (j * (m - j)).sqrt()
            })
            .collect();
        Ok(Self {
            axis,
            scale: coupling,
            values,
        })
    }

    /// Every bond set to `value`; the non-engineered control.
    pub fn uniform(axis: usize, extent: usize, value: f64) -> Result<Self> {
        if extent < 2 {
            return Err(PftError::InvalidExtent(format!(
                "coupling profile needs extent >= 2, got {extent}"
            )));
        }
        Ok(Self {
            axis,
            scale: value,
            values: vec![value; extent - 1],
        })
    }

    /// A profile with all-zero bonds, used to decouple an axis.
    pub(crate) fn zero(axis: usize, extent: usize) -> Self {
        Self {
            axis,
            scale: 0.0,
            values: vec![0.0; extent.saturating_sub(1)],
        }
    }

    pub fn extent(&self) -> usize {
        self.values.len() + 1
    }
}

/// Engineered coupling profile of a single chain, axis 0.
pub fn coupling_profile(extent: usize, coupling: f64) -> Result<CouplingProfile> {
    CouplingProfile::engineered(0, extent, coupling)
}

/// Engineered profiles for every axis of `dims`, one J per axis.
///
/// A zero J produces an all-zero profile on that axis instead of an error.
pub fn engineered_profiles(dims: &LatticeDims, couplings: &[f64]) -> Result<Vec<CouplingProfile>> {
    check_couplings(dims, couplings)?;
    dims.require_transfer()?;
    couplings
        .iter()
        .enumerate()
        .map(|(a, &j)| {
            if j == 0.0 {
                Ok(CouplingProfile::zero(a, dims.extent(a)))
            } else {
                CouplingProfile::engineered(a, dims.extent(a), j)
            }
        })
        .collect()
}

pub(crate) fn check_couplings(dims: &LatticeDims, couplings: &[f64]) -> Result<()> {
    if couplings.len() != dims.rank() {
        return Err(PftError::DimensionMismatch(format!(
            "{} couplings for a {}-axis lattice",
            couplings.len(),
            dims.rank()
        )));
    }
    if couplings.iter().any(|j| !j.is_finite()) {
        return Err(PftError::InvalidArgument("non-finite coupling".into()));
    }
    Ok(())
}

/// The common J when all axes share it, used by the mirror-law checks.
pub fn common_coupling(couplings: &[f64]) -> Result<f64> {
    let first = *couplings
        .first()
        .ok_or_else(|| PftError::InvalidArgument("no couplings given".into()))?;
    if couplings.iter().any(|&j| j != first) {
        return Err(PftError::InvalidArgument(format!(
            "mirror transfer needs equal couplings on every axis, got {couplings:?}"
        )));
    }
    pst_time(first)?;
    Ok(first)
}
