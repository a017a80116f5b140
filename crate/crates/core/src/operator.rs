//! Dense complex matrices with a role tag, plus the Hermitian exponential.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{PftError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance behind the `Hermitian` tag.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance behind the `Unitary` tag.
pub const UNITARY_TOL: f64 = 1e-10;
/// Largest matrix dimension handed to the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Hermitian,
    Unitary,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
    role: Role,
}

impl DenseOperator {
    /// Wraps `matrix`, checking the invariant implied by `role`.
    pub fn new(matrix: CMatrix, role: Role) -> Result<Self> {
        if !matrix.is_square() {
            return Err(PftError::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        match role {
            Role::Hermitian => {
                let dev = hermiticity_defect(&matrix);
                if dev > HERMITIAN_TOL {
                    return Err(PftError::RepresentationMismatch(format!(
                        "matrix tagged hermitian deviates by {dev:e}"
                    )));
                }
            }
            Role::Unitary => {
                let dev = unitarity_defect(&matrix);
                if dev > UNITARY_TOL {
                    return Err(PftError::RepresentationMismatch(format!(
                        "matrix tagged unitary deviates by {dev:e}"
                    )));
                }
            }
            Role::General => {}
        }
        Ok(Self { matrix, role })
    }

    pub fn hermitian(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, Role::Hermitian)
    }

    pub fn unitary(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, Role::Unitary)
    }

    pub fn general(matrix: CMatrix) -> Self {
        Self {
            matrix,
            role: Role::General,
        }
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, role: Role) -> Self {
        Self { matrix, role }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
            role: Role::Unitary,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
            role: Role::Hermitian,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            role: self.role,
        }
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    /// Product, tagged general unless both factors are unitary.
    pub fn mul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        check_same_dim(self, rhs)?;
        let role = if self.role == Role::Unitary && rhs.role == Role::Unitary {
            Role::Unitary
        } else {
            Role::General
        };
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
            role,
        })
    }

    /// Linear combination `a*self + b*other`; real weights keep the hermitian tag.
    pub fn combine(&self, a: f64, other: &DenseOperator, b: f64) -> Result<DenseOperator> {
        check_same_dim(self, other)?;
        let role = if self.role == Role::Hermitian && other.role == Role::Hermitian {
            Role::Hermitian
        } else {
            Role::General
        };
        Ok(Self {
            matrix: self.matrix.map(|z| z * a) + other.matrix.map(|z| z * b),
            role,
        })
    }

    pub fn scale(&self, factor: f64) -> DenseOperator {
        Self {
            matrix: self.matrix.map(|z| z * factor),
            role: if self.role == Role::Hermitian {
                Role::Hermitian
            } else {
                Role::General
            },
        }
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(PftError::DimensionMismatch(format!(
                "vector of length {} against a {}-dimensional operator",
                v.len(),
                self.dim()
            )));
        }
        Ok(&self.matrix * v)
    }

    /// Largest |entry| of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Eigendecomposition of a Hermitian operator.
    pub fn eigen(&self) -> Result<HermitianEigen> {
        HermitianEigen::new(self)
    }

    /// exp(-i H t) for Hermitian H.
    pub fn propagator(&self, t: f64) -> Result<DenseOperator> {
        Ok(self.eigen()?.propagator(t))
    }
}

/// Spectral decomposition H = V diag(lambda) V^dagger.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(op: &DenseOperator) -> Result<Self> {
        if op.role != Role::Hermitian {
            return Err(PftError::RepresentationMismatch(
                "eigendecomposition needs a hermitian operator".into(),
            ));
        }
        let n = op.dim();
        if n > MAX_DENSE_DIM {
            return Err(PftError::UnsupportedSize(format!(
                "dense eigensolve of dimension {n} exceeds {MAX_DENSE_DIM}"
            )));
        }
        if n == 0 {
            return Ok(Self {
                eigenvalues: vec![],
                eigenvectors: CMatrix::zeros(0, 0),
            });
        }
        let (eigenvalues, eigenvectors) = if op.is_real() {
            // real symmetric path is several times faster and covers every hopping matrix
            let real = op.matrix.map(|z| z.re);
            let eig =
                nalgebra::SymmetricEigen::try_new(real, f64::EPSILON, 0).ok_or_else(|| {
                    PftError::Numerical("symmetric eigensolver did not converge".into())
                })?;
            (
                eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
                eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
            )
        } else {
            let eig = nalgebra::SymmetricEigen::try_new(op.matrix.clone(), f64::EPSILON, 0)
                .ok_or_else(|| {
                    PftError::Numerical("hermitian eigensolver did not converge".into())
                })?;
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        };
        if eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(PftError::Numerical("non-finite eigenvalue".into()));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V f(lambda) V^dagger.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= w);
        }
        scaled * v.adjoint()
    }

    pub fn propagator(&self, t: f64) -> DenseOperator {
        DenseOperator::from_parts_unchecked(
            self.map_spectrum(|l| Complex64::from_polar(1.0, -l * t)),
            Role::Unitary,
        )
    }

    /// exp(-i H t) applied to one vector without forming the full propagator.
    pub fn evolve(&self, state: &CVector, t: f64) -> Result<CVector> {
        if state.len() != self.dim() {
            return Err(PftError::DimensionMismatch(format!(
                "state of length {} against a {}-dimensional Hamiltonian",
                state.len(),
                self.dim()
            )));
        }
        let v = &self.eigenvectors;
        let mut coeffs = v.adjoint() * state;
        for (c, &l) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -l * t);
        }
        Ok(v * coeffs)
    }
}

/// exp(-i H t) via eigendecomposition.
pub fn propagator_numeric(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    h.propagator(t)
}

/// Largest |entry| of AB - BA.
pub fn commutator_norm(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    check_same_dim(a, b)?;
    let ab = &a.matrix * &b.matrix;
    let ba = &b.matrix * &a.matrix;
    Ok(max_abs(&(ab - ba)))
}

pub fn commutator(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    check_same_dim(a, b)?;
    Ok(DenseOperator::general(
        &a.matrix * &b.matrix - &b.matrix * &a.matrix,
    ))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest |entry| of a complex vector.
pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

fn check_same_dim(a: &DenseOperator, b: &DenseOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(PftError::DimensionMismatch(format!(
            "operators of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}
