//! Wigner small-d matrices d^l_{m'm}(beta) = <l m'| exp(-i beta J_y) |l m>.
//!
//! Rows and columns are ordered by ascending m, so index 0 is m = -l.
//! [`wigner_d`] evaluates the Jacobi-polynomial closed form,
//! [`wigner_d_factorial_sum`] the explicit alternating sum, and
//! [`wigner_d_oracle`] exponentiates J_y by eigendecomposition to cross-check both.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{PftError, Result};
use crate::lattice::{HalfInt, SignaturePhase};
use crate::operator::{CMatrix, DenseOperator, HermitianEigen};

/// Largest supported 2l.
pub const MAX_TWO_L: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct WignerD {
    pub two_l: usize,
    pub beta: f64,
    pub matrix: DMatrix<f64>,
}

impl WignerD {
    pub fn dim(&self) -> usize {
        self.two_l + 1
    }

    /// Row/column index of magnetic number `m`.
    pub fn index_of(&self, m: HalfInt) -> Option<usize> {
        let shifted = m.twice() + self.two_l as i64;
        (shifted >= 0 && shifted % 2 == 0 && shifted / 2 <= self.two_l as i64)
            .then_some((shifted / 2) as usize)
    }

    pub fn magnetic_number(&self, index: usize) -> HalfInt {
        HalfInt::from_twice(2 * index as i64 - self.two_l as i64)
    }

    /// d^l_{m'm}.
    pub fn get(&self, m_prime: HalfInt, m: HalfInt) -> Option<f64> {
        Some(self.matrix[(self.index_of(m_prime)?, self.index_of(m)?)])
    }

    pub fn max_abs_diff(&self, other: &WignerD) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }
}

fn check_two_l(two_l: usize) -> Result<()> {
    if two_l > MAX_TWO_L {
        return Err(PftError::UnsupportedSize(format!(
            "2l = {two_l} exceeds the supported maximum {MAX_TWO_L}"
        )));
    }
    Ok(())
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Small-d matrix through the Jacobi-polynomial closed form
/// d = (-1)^lambda C(2l-k, k+a)^(1/2) C(k+b, b)^(-1/2) s^a c^b P_k^(a,b)(cos beta),
/// with s = sin(beta/2), c = cos(beta/2), k = min(l+-m, l+-m') and P evaluated by
/// its three-term recurrence. Accurate to ~1e-14 over the whole supported range.
pub fn wigner_d(two_l: usize, beta: f64) -> Result<WignerD> {
    check_two_l(two_l)?;
    let n = two_l + 1;
    let lnf = ln_factorials(two_l + 1);
    let (s, c) = (beta / 2.0).sin_cos();
    let x = beta.cos();
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    // column index p = l+m, row index q = l+m'
    for q in 0..n {
        for p in 0..n {
            let candidates = [p, two_l - p, q, two_l - q];
            let k = *candidates.iter().min().expect("four candidates");
            let (a, lambda) = if k == p || (k != two_l - p && k != q) {
                (q - p, q - p)
            } else {
                (p - q, 0)
            };
            let b = two_l - 2 * k - a;
            let ln_norm = 0.5
                * ((lnf[two_l - k] - lnf[k + a] - lnf[two_l - 2 * k - a])
                    - (lnf[k + b] - lnf[b] - lnf[k]));
            let value = ln_norm.exp() * powi(s, a) * powi(c, b) * jacobi(k, a as f64, b as f64, x);
            matrix[(q, p)] = if lambda % 2 == 0 { value } else { -value };
        }
    }
    Ok(WignerD {
        two_l,
        beta,
        matrix,
    })
}

/// Jacobi polynomial P_n^(a,b)(x) by upward recurrence.
fn jacobi(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let next = ((s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * cur
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * prev)
            / (2.0 * k * (k + a + b) * (s - 2.0));
        prev = cur;
        cur = next;
    }
    cur
}

/// Small-d matrix from the explicit factorial sum
/// d = sum_k (-1)^(k-m+m') sqrt((l+m')!(l-m')!(l+m)!(l-m)!)
///     / ((l+m-k)! k! (l-k-m')! (k-m+m')!) c^(2l+m-m'-2k) s^(2k-m+m').
///
/// The alternating sum cancels badly for large l: agreement with
/// [`wigner_d_oracle`] is ~1e-13 at 2l = 20 but only ~1e-9 at 2l = 40.
/// Kept as an independent closed form for small representations.
pub fn wigner_d_factorial_sum(two_l: usize, beta: f64) -> Result<WignerD> {
    check_two_l(two_l)?;
    let n = two_l + 1;
    let lnf = ln_factorials(two_l);
    let (s, c) = (beta / 2.0).sin_cos();
    let mut matrix = DMatrix::<f64>::zeros(n, n);

    // Integer shifts: a = l+m (column), b = l+m' (row); then
    // l-m = 2l-a, l-m' = 2l-b, k ranges over max(0, a-b)..=min(a, 2l-b).
    for b in 0..n {
        for a in 0..n {
            let prefactor = 0.5 * (lnf[b] + lnf[two_l - b] + lnf[a] + lnf[two_l - a]);
            let k_min = a.saturating_sub(b);
            let k_max = a.min(two_l - b);
            let mut sum = 0.0;
            for k in k_min..=k_max {
                // k - m + m' = k + b - a
                let kmm = k + b - a;
                let cos_pow = two_l + a - b - 2 * k;
                let sin_pow = 2 * k + b - a;
                let ln_den = lnf[a - k] + lnf[k] + lnf[two_l - b - k] + lnf[kmm];
                let mag = (prefactor - ln_den).exp() * powi(c, cos_pow) * powi(s, sin_pow);
                if kmm % 2 == 0 {
                    sum += mag;
                } else {
                    sum -= mag;
                }
            }
            matrix[(b, a)] = sum;
        }
    }
    Ok(WignerD {
        two_l,
        beta,
        matrix,
    })
}

fn powi(x: f64, p: usize) -> f64 {
    if p == 0 {
        1.0
    } else {
        x.powi(p as i32)
    }
}

/// J_y in the spin-l representation, ascending m.
///
/// <m+1|J_y|m> = -i sqrt((l-m)(l+m+1))/2.
pub fn spin_jy(two_l: usize) -> CMatrix {
    let n = two_l + 1;
    let mut jy = CMatrix::zeros(n, n);
    for idx in 0..two_l {
        let m = idx as f64 - two_l as f64 / 2.0;
        let l = two_l as f64 / 2.0;
        let amp = 0.5 * ((l - m) * (l + m + 1.0)).sqrt();
        jy[(idx + 1, idx)] = Complex64::new(0.0, -amp);
        jy[(idx, idx + 1)] = Complex64::new(0.0, amp);
    }
    jy
}

/// exp(-i beta J_y) by Hermitian eigendecomposition; real part returned.
pub fn wigner_d_oracle(two_l: usize, beta: f64) -> Result<WignerD> {
    Ok(WignerOracle::new(two_l)?.at(beta))
}

/// J_y diagonalized once, evaluated at many angles.
#[derive(Debug, Clone)]
pub struct WignerOracle {
    two_l: usize,
    eigen: HermitianEigen,
}

impl WignerOracle {
    pub fn new(two_l: usize) -> Result<Self> {
        check_two_l(two_l)?;
        let jy = DenseOperator::hermitian(spin_jy(two_l))?;
        Ok(Self {
            two_l,
            eigen: jy.eigen()?,
        })
    }

    pub fn at(&self, beta: f64) -> WignerD {
        WignerD {
            two_l: self.two_l,
            beta,
            matrix: self.eigen.propagator(beta).matrix().map(|z| z.re),
        }
    }
}

/// i^(m' - m), exact.
pub fn quarter_turn_phase(m_prime: HalfInt, m: HalfInt) -> Result<Complex64> {
    let diff = (m_prime - m).as_integer().ok_or_else(|| {
        PftError::RepresentationMismatch(format!("m' - m = {} is not an integer", m_prime - m))
    })?;
    Ok(SignaturePhase::from_quarter_turns(diff).value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scalar_representation() {
        for beta in [0.0, 1.3, -4.0, 10.0] {
            assert_eq!(wigner_d(0, beta).unwrap().matrix[(0, 0)], 1.0);
            assert!((wigner_d_oracle(0, beta).unwrap().matrix[(0, 0)] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn spin_half_closed_form() {
        // ascending order (m = -1/2, +1/2): d_{+1/2,-1/2} = -sin, d_{-1/2,+1/2} = +sin
        let beta = 0.83;
        let (s, c) = (beta / 2.0_f64).sin_cos();
        let d = wigner_d(1, beta).unwrap();
        let o = wigner_d_oracle(1, beta).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        assert!((&d.matrix - &expect).amax() < 1e-15);
        assert!((&o.matrix - &expect).amax() < 1e-14);
    }

    #[test]
    fn pi_rotation_is_antidiagonal() {
        let d = wigner_d(4, PI).unwrap();
        for r in 0..5 {
            for c in 0..5 {
                let v = d.matrix[(r, c)];
                if r + c == 4 {
                    // (-1)^(l-m) with l = 2, m = c - 2
                    let expect = if (4 - c) % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((v - expect).abs() < 1e-14, "({r},{c}) = {v}");
                } else {
                    assert!(v.abs() < 1e-14);
                }
            }
        }
        assert!(d.max_abs_diff(&wigner_d_oracle(4, PI).unwrap()) < 1e-12);
    }

    #[test]
    fn identity_at_zero() {
        let o = wigner_d_oracle(2, 0.0).unwrap();
        assert!((&o.matrix - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        let d = wigner_d(7, 0.0).unwrap();
        assert_eq!(d.matrix, DMatrix::<f64>::identity(8, 8));
    }

    #[test]
    fn spin_one_quarter_turn() {
        let d = wigner_d(2, PI / 2.0).unwrap();
        let o = wigner_d_oracle(2, PI / 2.0).unwrap();
        assert!(d.max_abs_diff(&o) < 1e-12);
        // d^1_{00}(pi/2) = cos(pi/2) = 0, d^1_{11} = (1 + cos)/2 = 1/2
        assert!(d.matrix[(1, 1)].abs() < 1e-15);
        assert!((d.matrix[(2, 2)] - 0.5).abs() < 1e-15);
        assert!((d.matrix[(0, 1)] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn symmetry_relation() {
        let d = wigner_d(9, 2.1).unwrap();
        for r in 0..10 {
            for c in 0..10 {
                let sign = if (r as i64 - c as i64).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                assert!((d.matrix[(r, c)] - sign * d.matrix[(c, r)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn factorial_sum_agrees_for_small_l() {
        for two_l in 0..=12 {
            for k in 0..20 {
                let beta = 0.33 * k as f64 - 1.0;
                let a = wigner_d(two_l, beta).unwrap();
                let b = wigner_d_factorial_sum(two_l, beta).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-13, "2l={two_l} beta={beta}");
            }
        }
    }

    #[test]
    fn jacobi_low_orders() {
        // P_2^(1,1)(x) = (15 x^2 - 3)/4 * ... via the closed form 3/4 (5x^2 - 1)
        for x in [-0.7, 0.0, 0.4, 1.0] {
            assert!((jacobi(2, 1.0, 1.0, x) - 0.75 * (5.0 * x * x - 1.0)).abs() < 1e-14);
            assert!((jacobi(1, 2.0, 0.0, x) - (3.0 + 4.0 * (x - 1.0) / 2.0)).abs() < 1e-14);
        }
        // P_n^(0,0) are Legendre: P_3 = (5x^3 - 3x)/2
        let x = 0.3;
        assert!((jacobi(3, 0.0, 0.0, x) - (5.0 * x * x * x - 3.0 * x) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            wigner_d(61, 0.1),
            Err(PftError::UnsupportedSize(_))
        ));
        assert!(matches!(
            wigner_d_oracle(61, 0.1),
            Err(PftError::UnsupportedSize(_))
        ));
        assert!(wigner_d(60, 0.1).is_ok());
    }

    #[test]
    fn quarter_turns() {
        let h = HalfInt::from_twice;
        assert_eq!(
            quarter_turn_phase(h(4), h(4)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            quarter_turn_phase(h(-2), h(2)).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
        assert_eq!(
            quarter_turn_phase(h(3), h(-1)).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
        assert!(matches!(
            quarter_turn_phase(h(1), h(2)),
            Err(PftError::RepresentationMismatch(_))
        ));
    }

    #[test]
    fn index_lookup() {
        let d = wigner_d(3, 0.4).unwrap();
        assert_eq!(d.index_of(HalfInt::from_twice(-3)), Some(0));
        assert_eq!(d.index_of(HalfInt::from_twice(3)), Some(3));
        assert_eq!(d.index_of(HalfInt::from_twice(2)), None);
        assert_eq!(d.magnetic_number(1), HalfInt::from_twice(-1));
    }
}
