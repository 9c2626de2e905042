//! Fixed-capacity vectors and dense symmetric-matrix helpers.
//!
//! Everything in this crate lives in spatial dimension 1..=3, so the system
//! matrices are at most 5x5 (two wave components plus the flow direction).
//! A pair of stack-allocated types covers all of it without pulling in a
//! general linear algebra dependency.

// Index loops mirror the subscript notation of the dense kernels below
// (simultaneous row/column updates rule out iterator form).
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub const MAX_SPATIAL_DIM: usize = 3;
pub const MAX_SYSTEM_DIM: usize = MAX_SPATIAL_DIM + 2;

/// A spatial vector with runtime dimension 1, 2 or 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialVec {
    dim: usize,
    c: [f64; MAX_SPATIAL_DIM],
}

impl SpatialVec {
    pub fn new(components: &[f64]) -> Self {
        assert!(
            (1..=MAX_SPATIAL_DIM).contains(&components.len()),
            "spatial dimension must be 1..=3, got {}",
            components.len()
        );
        let mut c = [0.0; MAX_SPATIAL_DIM];
        c[..components.len()].copy_from_slice(components);
        Self {
            dim: components.len(),
            c,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(&[0.0; MAX_SPATIAL_DIM][..dim])
    }

    /// Unit vector along the given axis.
    pub fn basis(dim: usize, axis: usize) -> Self {
        assert!(axis < dim);
        let mut v = Self::zeros(dim);
        v.c[axis] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut s = 0.0;
        for i in 0..self.dim {
            s += self.c[i] * other.c[i];
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut v = *self;
        for i in 0..self.dim {
            v.c[i] *= s;
        }
        v
    }

    /// Unit vector in the same direction, or `None` for a (near-)zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n < 1e-300 {
            None
        } else {
            Some(self.scaled(1.0 / n))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for SpatialVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        assert!(i < self.dim);
        &self.c[i]
    }
}

impl IndexMut<usize> for SpatialVec {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        assert!(i < self.dim);
        &mut self.c[i]
    }
}

impl Add for SpatialVec {
    type Output = SpatialVec;
    fn add(self, rhs: SpatialVec) -> SpatialVec {
        assert_eq!(self.dim, rhs.dim);
        let mut v = self;
        for i in 0..self.dim {
            v.c[i] += rhs.c[i];
        }
        v
    }
}

impl Sub for SpatialVec {
    type Output = SpatialVec;
    fn sub(self, rhs: SpatialVec) -> SpatialVec {
        assert_eq!(self.dim, rhs.dim);
        let mut v = self;
        for i in 0..self.dim {
            v.c[i] -= rhs.c[i];
        }
        v
    }
}

impl Mul<f64> for SpatialVec {
    type Output = SpatialVec;
    fn mul(self, s: f64) -> SpatialVec {
        self.scaled(s)
    }
}

/// Dense square matrix with runtime dimension at most [`MAX_SYSTEM_DIM`].
#[derive(Clone, Debug, PartialEq)]
pub struct SmallMatrix {
    dim: usize,
    a: [[f64; MAX_SYSTEM_DIM]; MAX_SYSTEM_DIM],
}

const JACOBI_MAX_SWEEPS: usize = 64;
/// Absolute eigenvalue tolerance for the Jacobi iteration.
pub const JACOBI_EIG_TOL: f64 = 1e-12;
/// Matrices with a larger off-diagonal mismatch are rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

impl SmallMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_SYSTEM_DIM).contains(&dim));
        Self {
            dim,
            a: [[0.0; MAX_SYSTEM_DIM]; MAX_SYSTEM_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dim && j < self.dim);
        self.a[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.dim && j < self.dim);
        self.a[i][j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.dim && j < self.dim);
        self.a[i][j] += v;
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.dim, other.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.a[i][j] += s * other.a[i][j];
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max(self.a[i][j].abs());
            }
        }
        m
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                m = m.max((self.a[i][j] - self.a[j][i]).abs());
            }
        }
        m
    }

    pub fn quad_form(&self, xi: &[f64]) -> f64 {
        assert_eq!(xi.len(), self.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += xi[i] * self.a[i][j] * xi[j];
            }
        }
        s
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            let mut s = 0.0;
            for j in 0..self.dim {
                s += self.a[i][j] * x[j];
            }
            out[i] = s;
        }
    }

    /// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
    /// sorted ascending. Rejects matrices whose asymmetry exceeds
    /// [`SYMMETRY_TOL`].
    pub fn jacobi_eigenvalues(&self) -> Result<Vec<f64>> {
        if self.max_asymmetry() > SYMMETRY_TOL {
            return Err(Error::InvalidInput(format!(
                "matrix is not symmetric (asymmetry {:.3e})",
                self.max_asymmetry()
            )));
        }
        let n = self.dim;
        let mut a = self.a;
        // Symmetrize exactly so rotations preserve symmetry bit-for-bit.
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (a[i][j] + a[j][i]);
                a[i][j] = m;
                a[j][i] = m;
            }
        }
        let scale = self.max_abs().max(1.0);
        let stop = (JACOBI_EIG_TOL * 1e-2 * scale).max(f64::MIN_POSITIVE);
        for _sweep in 0..JACOBI_MAX_SWEEPS {
            let mut off: f64 = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a[i][j].abs());
                }
            }
            if off <= stop {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq.abs() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    let app = a[p][p];
                    let aqq = a[q][q];
                    a[p][p] = app - t * apq;
                    a[q][q] = aqq + t * apq;
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    for r in 0..n {
                        if r != p && r != q {
                            let arp = a[r][p];
                            let arq = a[r][q];
                            a[r][p] = arp - s * (arq + tau * arp);
                            a[p][r] = a[r][p];
                            a[r][q] = arq + s * (arp - tau * arq);
                            a[q][r] = a[r][q];
                        }
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("non-finite eigenvalue"));
        Ok(eig)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.jacobi_eigenvalues()?[0])
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        let eig = self.jacobi_eigenvalues()?;
        Ok(eig
            .iter()
            .fold(0.0_f64, |acc, &l| acc.max(l.abs())))
    }

    /// Solves `self * x = b` for a symmetric positive definite matrix via
    /// Cholesky factorization. Fails with `Singular` when a pivot is not
    /// strictly positive.
    pub fn cholesky_solve(&self, b: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.dim;
        assert_eq!(b.len(), n);
        assert_eq!(out.len(), n);
        let mut l = [[0.0_f64; MAX_SYSTEM_DIM]; MAX_SYSTEM_DIM];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.a[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    if s.is_nan() || s <= 0.0 {
                        return Err(Error::Singular(format!(
                            "pivot {i} non-positive in Cholesky factorization ({s:.3e})"
                        )));
                    }
                    l[i][j] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        // forward substitution L y = b
        let mut y = [0.0_f64; MAX_SYSTEM_DIM];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        // back substitution L^T x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k][i] * out[k];
            }
            out[i] = s / l[i][i];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Roots of the characteristic polynomial of a symmetric 3x3 matrix via
    /// the trigonometric closed form. Independent of the Jacobi path.
    fn cubic_eigenvalues(m: &SmallMatrix) -> [f64; 3] {
        assert_eq!(m.dim(), 3);
        let a = |i: usize, j: usize| m.get(i, j);
        let p1 = a(0, 1).powi(2) + a(0, 2).powi(2) + a(1, 2).powi(2);
        let q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
        let p2 = (a(0, 0) - q).powi(2) + (a(1, 1) - q).powi(2) + (a(2, 2) - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        if p < 1e-300 {
            return [q, q, q];
        }
        // B = (A - q I) / p ; r = det(B) / 2
        let b = |i: usize, j: usize| (a(i, j) - if i == j { q } else { 0.0 }) / p;
        let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
            - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
            + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        let r = (det_b / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        let e2 = 3.0 * q - e1 - e3;
        let mut eig = [e1, e2, e3];
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eig
    }

    fn sym3(entries: [[f64; 3]; 3]) -> SmallMatrix {
        let mut m = SmallMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, entries[i][j]);
            }
        }
        m
    }

    #[test]
    fn jacobi_matches_characteristic_polynomial_roots() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let mut e = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..=i {
                    let v = rng.gen_range(-2.0..2.0);
                    e[i][j] = v;
                    e[j][i] = v;
                }
            }
            let m = sym3(e);
            let jac = m.jacobi_eigenvalues().unwrap();
            let cub = cubic_eigenvalues(&m);
            for k in 0..3 {
                assert!(
                    (jac[k] - cub[k]).abs() < 1e-10,
                    "eigenvalue mismatch: {:?} vs {:?}",
                    jac,
                    cub
                );
            }
        }
    }

    #[test]
    fn jacobi_diagonal_and_identity() {
        let mut m = SmallMatrix::zeros(4);
        for (i, v) in [3.0, -1.0, 0.5, 2.0].iter().enumerate() {
            m.set(i, i, *v);
        }
        let eig = m.jacobi_eigenvalues().unwrap();
        assert_eq!(eig, vec![-1.0, 0.5, 2.0, 3.0]);
        assert_eq!(SmallMatrix::identity(2).min_eigenvalue().unwrap(), 1.0);
    }

    #[test]
    fn jacobi_rejects_asymmetric_input() {
        let mut m = SmallMatrix::identity(3);
        m.set(0, 1, 1e-3);
        assert!(m.jacobi_eigenvalues().is_err());
        // asymmetry below the threshold is symmetrized and accepted
        let mut m2 = SmallMatrix::identity(3);
        m2.set(0, 1, 5e-11);
        assert!(m2.jacobi_eigenvalues().is_ok());
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let m = sym3([[4.0, 1.0, 0.2], [1.0, 3.0, -0.5], [0.2, -0.5, 2.0]]);
        let b = [1.0, -2.0, 0.5];
        let mut x = [0.0; 3];
        m.cholesky_solve(&b, &mut x).unwrap();
        let mut r = [0.0; 3];
        m.mul_vec(&x, &mut r);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite_matrix() {
        let m = sym3([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let mut x = [0.0; 3];
        assert!(m.cholesky_solve(&[1.0, 1.0, 1.0], &mut x).is_err());
    }

    #[test]
    fn spatial_vec_basics() {
        let v = SpatialVec::new(&[3.0, 4.0]);
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.dim(), 2);
        let u = v.normalized().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert!(SpatialVec::zeros(2).normalized().is_none());
        let e1 = SpatialVec::basis(3, 0);
        assert_eq!(e1.as_slice(), &[1.0, 0.0, 0.0]);
    }
}
