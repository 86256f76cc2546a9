//! Direct solvers for (cyclic) tridiagonal systems with scalar or 2×2 block
//! entries.
//!
//! The matrix is stored by its three diagonals. For a cyclic system the two
//! corner entries live in the otherwise unused slots `lower[0] = A[0][n-1]`
//! and `upper[n-1] = A[n-1][0]`.
//!
//! Non-cyclic systems use block Thomas elimination. Cyclic systems border the
//! last unknown: the leading `(n-1)`-block tridiagonal part `T` is factored,
//! the border column `E` is eliminated through `Z = T^{-1} E`, and the last
//! unknown is obtained from the Schur complement
//! `S = A[n-1][n-1] - R Z`. For symmetric scalar matrices the pivots of this
//! elimination are those of the `LDL^T` factorization, so their signs decide
//! positive definiteness.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

/// Entry type of a banded matrix: `f64` or a 2×2 block.
pub trait Block:
    Copy + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Send + Sync
{
    type Vector: Copy + Debug + Add<Output = Self::Vector> + Sub<Output = Self::Vector>;

    fn zero() -> Self;
    fn zero_vector() -> Self::Vector;
    fn inverse(&self) -> Option<Self>;
    fn apply(&self, v: Self::Vector) -> Self::Vector;
    fn magnitude(&self) -> f64;
    fn vector_magnitude(v: &Self::Vector) -> f64;
    /// Signed size of a pivot: the value for scalars, the determinant for blocks.
    fn pivot_value(&self) -> f64;
}

impl Block for f64 {
    type Vector = f64;

    fn zero() -> Self {
        0.0
    }
    fn zero_vector() -> f64 {
        0.0
    }
    fn inverse(&self) -> Option<Self> {
        (*self != 0.0 && self.is_finite()).then(|| 1.0 / self)
    }
    fn apply(&self, v: f64) -> f64 {
        self * v
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn vector_magnitude(v: &f64) -> f64 {
        v.abs()
    }
    fn pivot_value(&self) -> f64 {
        *self
    }
}

impl Block for Matrix2<f64> {
    type Vector = Vector2<f64>;

    fn zero() -> Self {
        Matrix2::zeros()
    }
    fn zero_vector() -> Vector2<f64> {
        Vector2::zeros()
    }
    fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Matrix2::new(self[(1, 1)], -self[(0, 1)], -self[(1, 0)], self[(0, 0)]) / det)
    }
    fn apply(&self, v: Vector2<f64>) -> Vector2<f64> {
        self * v
    }
    fn magnitude(&self) -> f64 {
        self.abs().max()
    }
    fn vector_magnitude(v: &Vector2<f64>) -> f64 {
        v.abs().max()
    }
    fn pivot_value(&self) -> f64 {
        self.determinant()
    }
}

/// A (possibly cyclic) tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<B> {
    /// `lower[i] = A[i][i-1]`; `lower[0]` is the corner `A[0][n-1]` if cyclic.
    pub lower: Vec<B>,
    pub diag: Vec<B>,
    /// `upper[i] = A[i][i+1]`; `upper[n-1]` is the corner `A[n-1][0]` if cyclic.
    pub upper: Vec<B>,
    pub cyclic: bool,
}

/// Scalar tridiagonal system.
pub type TridiagMatrix = BandedMatrix<f64>;
/// Tridiagonal system with 2×2 blocks.
pub type BlockTridiagMatrix = BandedMatrix<Matrix2<f64>>;

impl<B: Block> BandedMatrix<B> {
    pub fn zeros(n: usize, cyclic: bool) -> Self {
        Self {
            lower: vec![B::zero(); n],
            diag: vec![B::zero(); n],
            upper: vec![B::zero(); n],
            cyclic,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Adds `value` to entry `(i, j)`; `j` must be `i` or a (cyclic) neighbour.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: B) {
        let n = self.len();
        if i == j {
            self.diag[i] = self.diag[i] + value;
        } else if j + 1 == i || (self.cyclic && i == 0 && j == n - 1) {
            self.lower[i] = self.lower[i] + value;
        } else if j == i + 1 || (self.cyclic && i == n - 1 && j == 0) {
            self.upper[i] = self.upper[i] + value;
        } else {
            panic!("entry ({i}, {j}) is outside the band");
        }
    }

    /// Replaces row `i` by the identity row.
    pub fn set_identity_row(&mut self, i: usize, identity: B) {
        self.lower[i] = B::zero();
        self.upper[i] = B::zero();
        self.diag[i] = identity;
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[B::Vector]) -> Vec<B::Vector> {
        let n = self.len();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut y = self.diag[i].apply(x[i]);
                if i > 0 {
                    y = y + self.lower[i].apply(x[i - 1]);
                } else if self.cyclic {
                    y = y + self.lower[0].apply(x[n - 1]);
                }
                if i + 1 < n {
                    y = y + self.upper[i].apply(x[i + 1]);
                } else if self.cyclic {
                    y = y + self.upper[n - 1].apply(x[0]);
                }
                y
            })
            .collect()
    }

    /// Maximum absolute row sum bound, used for scaling pivot tolerances.
    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let mut s = self.diag[i].magnitude();
                if i > 0 || self.cyclic {
                    s += self.lower[i].magnitude();
                }
                if i + 1 < self.len() || self.cyclic {
                    s += self.upper[i].magnitude();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn factor(&self) -> Result<BandedLu<B>> {
        BandedLu::new(self)
    }

    pub fn solve(&self, rhs: &[B::Vector]) -> Result<Vec<B::Vector>>
    where
        B: Mul<B::Vector, Output = B::Vector>,
    {
        Ok(self.factor()?.solve(rhs))
    }
}

/// LU factorization of a [`BandedMatrix`], reusable for several right-hand
/// sides.
#[derive(Debug, Clone)]
pub struct BandedLu<B> {
    /// Size of the leading block that is eliminated by Thomas' algorithm.
    m: usize,
    multipliers: Vec<B>,
    pivot_inv: Vec<B>,
    upper: Vec<B>,
    pivots: Vec<B>,
    border: Option<Border<B>>,
}

#[derive(Debug, Clone)]
struct Border<B> {
    z: Vec<B>,
    row_first: B,
    row_last: B,
    schur_inv: B,
}

impl<B: Block> BandedLu<B> {
    fn new(a: &BandedMatrix<B>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::invalid("empty system"));
        }
        if a.lower.len() != n || a.upper.len() != n {
            return Err(Error::invalid("diagonal lengths differ"));
        }
        if a.cyclic && n < 3 {
            return Err(Error::invalid("cyclic systems need at least 3 unknowns"));
        }
        let tol = 1e-14 * a.norm_inf();
        let m = if a.cyclic { n - 1 } else { n };

        let mut multipliers = vec![B::zero(); m];
        let mut pivot_inv = Vec::with_capacity(m);
        let mut pivots = Vec::with_capacity(n);
        let check = |row: usize, p: &B| -> Result<B> {
            let inv = p.inverse();
            match inv {
                Some(inv) if p.magnitude() > tol && inv.magnitude().is_finite() => Ok(inv),
                _ => Err(Error::SingularSystem {
                    row,
                    pivot: p.pivot_value(),
                }),
            }
        };
        let mut p = a.diag[0];
        pivot_inv.push(check(0, &p)?);
        pivots.push(p);
        for i in 1..m {
            let l = a.lower[i] * pivot_inv[i - 1];
            multipliers[i] = l;
            p = a.diag[i] - l * a.upper[i - 1];
            pivot_inv.push(check(i, &p)?);
            pivots.push(p);
        }
        let mut lu = Self {
            m,
            multipliers,
            pivot_inv,
            upper: a.upper[..m].to_vec(),
            pivots,
            border: None,
        };
        if a.cyclic {
            // E = A[0..m][n-1], R = A[n-1][0..m]; only the first and last
            // entries are nonzero.
            let mut e = vec![B::zero(); m];
            e[0] = a.lower[0];
            e[m - 1] = e[m - 1] + a.upper[m - 1];
            let z = lu.solve_leading(&e);
            let row_first = a.upper[n - 1];
            let row_last = a.lower[n - 1];
            let s = a.diag[n - 1] - row_first * z[0] - row_last * z[m - 1];
            let schur_inv = check(n - 1, &s)?;
            lu.pivots.push(s);
            lu.border = Some(Border {
                z,
                row_first,
                row_last,
                schur_inv,
            });
        }
        Ok(lu)
    }

    /// Solves with the leading `m × m` tridiagonal part for any right-hand
    /// side type the blocks act on.
    fn solve_leading<V>(&self, rhs: &[V]) -> Vec<V>
    where
        V: Copy + Sub<Output = V>,
        B: Mul<V, Output = V>,
    {
        let m = self.m;
        let mut y: Vec<V> = Vec::with_capacity(m);
        y.push(rhs[0]);
        for i in 1..m {
            let prev = y[i - 1];
            y.push(rhs[i] - self.multipliers[i] * prev);
        }
        y[m - 1] = self.pivot_inv[m - 1] * y[m - 1];
        for i in (0..m - 1).rev() {
            y[i] = self.pivot_inv[i] * (y[i] - self.upper[i] * y[i + 1]);
        }
        y
    }

    pub fn solve(&self, rhs: &[B::Vector]) -> Vec<B::Vector>
    where
        B: Mul<B::Vector, Output = B::Vector>,
    {
        let m = self.m;
        match &self.border {
            None => {
                assert_eq!(rhs.len(), m, "right-hand side has the wrong length");
                self.solve_leading(rhs)
            }
            Some(border) => {
                assert_eq!(rhs.len(), m + 1, "right-hand side has the wrong length");
                let mut y = self.solve_leading(&rhs[..m]);
                let last = border.schur_inv
                    * (rhs[m] - border.row_first * y[0] - border.row_last * y[m - 1]);
                for (yi, zi) in y.iter_mut().zip(&border.z) {
                    *yi = *yi - *zi * last;
                }
                y.push(last);
                y
            }
        }
    }

    /// Pivots of the elimination, including the Schur complement of a cyclic
    /// system.
    pub fn pivots(&self) -> &[B] {
        &self.pivots
    }

    /// Smallest signed pivot value together with its row.
    pub fn min_pivot(&self) -> (usize, f64) {
        self.pivots.iter().map(Block::pivot_value).enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
        )
    }
}

/// Solves a non-cyclic scalar tridiagonal system.
pub fn solve_tridiag(a: &TridiagMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if a.cyclic {
        return Err(Error::invalid("solve_tridiag expects a non-cyclic system"));
    }
    a.solve(rhs)
}

/// Solves a cyclic scalar tridiagonal system.
pub fn solve_cyclic_tridiag(a: &TridiagMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if !a.cyclic {
        return Err(Error::invalid(
            "solve_cyclic_tridiag expects a cyclic system",
        ));
    }
    a.solve(rhs)
}

/// Solves a (cyclic or not) tridiagonal system with 2×2 blocks.
pub fn solve_block_tridiag(
    a: &BlockTridiagMatrix,
    rhs: &[Vector2<f64>],
) -> Result<Vec<Vector2<f64>>> {
    a.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize, diag: f64, cyclic: bool) -> TridiagMatrix {
        TridiagMatrix {
            lower: vec![-1.0; n],
            diag: vec![diag; n],
            upper: vec![-1.0; n],
            cyclic,
        }
    }

    #[test]
    fn identity() {
        let a = TridiagMatrix {
            lower: vec![0.0; 5],
            diag: vec![1.0; 5],
            upper: vec![0.0; 5],
            cyclic: false,
        };
        let b = [1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(solve_tridiag(&a, &b).unwrap(), b.to_vec());
        let mut c = a.clone();
        c.cyclic = true;
        assert_eq!(solve_cyclic_tridiag(&c, &b).unwrap(), b.to_vec());
    }

    #[test]
    fn hand_solvable_3x3() {
        let a = laplacian(3, 2.0, false);
        let x = solve_tridiag(&a, &[1.0, 0.0, 0.0]).unwrap();
        for (xi, want) in x.iter().zip([0.75, 0.5, 0.25]) {
            assert!((xi - want).abs() < 1e-15);
        }
    }

    #[test]
    fn cyclic_row_sums() {
        let a = laplacian(4, 3.0, true);
        let x = solve_cyclic_tridiag(&a, &[1.0; 4]).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        // circulant [2, -1, ..., -1] annihilates constants
        let a = laplacian(6, 2.0, true);
        assert!(matches!(a.factor(), Err(Error::SingularSystem { .. })));
        let z = TridiagMatrix {
            lower: vec![0.0; 3],
            diag: vec![1.0, 0.0, 1.0],
            upper: vec![0.0; 3],
            cyclic: false,
        };
        assert!(matches!(
            z.factor(),
            Err(Error::SingularSystem { row: 1, .. })
        ));
    }

    #[test]
    fn spd_pivots_are_positive() {
        let a = laplacian(10, 2.5, true);
        let lu = a.factor().unwrap();
        assert_eq!(lu.pivots().len(), 10);
        assert!(lu.min_pivot().1 > 0.0);
    }

    #[test]
    fn decoupled_blocks_match_scalar_solves() {
        let n = 7;
        let a = laplacian(n, 2.2, true);
        let b = TridiagMatrix {
            lower: (0..n).map(|i| -0.3 - 0.01 * i as f64).collect(),
            diag: vec![3.0; n],
            upper: (0..n).map(|i| -0.5 + 0.02 * i as f64).collect(),
            cyclic: true,
        };
        let ra: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let rb: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let blk = |x: f64, y: f64| Matrix2::new(x, 0.0, 0.0, y);
        let m = BlockTridiagMatrix {
            lower: (0..n).map(|i| blk(a.lower[i], b.lower[i])).collect(),
            diag: (0..n).map(|i| blk(a.diag[i], b.diag[i])).collect(),
            upper: (0..n).map(|i| blk(a.upper[i], b.upper[i])).collect(),
            cyclic: true,
        };
        let rhs: Vec<Vector2<f64>> = (0..n).map(|i| Vector2::new(ra[i], rb[i])).collect();
        let x = solve_block_tridiag(&m, &rhs).unwrap();
        let xa = a.solve(&ra).unwrap();
        let xb = b.solve(&rb).unwrap();
        for i in 0..n {
            assert!((x[i].x - xa[i]).abs() < 1e-14);
            assert!((x[i].y - xb[i]).abs() < 1e-14);
        }
    }
}
