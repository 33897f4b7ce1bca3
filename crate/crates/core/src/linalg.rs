//! Small dense kernels: Householder row compression and one-sided Jacobi SVD.
//!
//! Everything here works on column-major `ColMatrix` values and is generic
//! over the real scalar, so nullspace and rank decisions run in the same
//! precision as the matrices they come from.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

/// Column-major complex matrix. Column `j` is `data[j * rows .. (j + 1) * rows]`.
#[derive(Clone, Debug)]
pub struct ColMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ColMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    /// Builds a matrix from columns of equal length.
    pub fn from_columns(rows: usize, columns: impl IntoIterator<Item = Vec<Complex<T>>>) -> Self {
        let mut data = Vec::new();
        let mut cols = 0;
        for col in columns {
            assert_eq!(col.len(), rows, "column length");
            data.extend(col);
            cols += 1;
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, z: Complex<T>) {
        self.data[c * self.rows + r] = z;
    }

    pub fn column(&self, c: usize) -> &[Complex<T>] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    /// Stacks `other` below `self`.
    fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column count");
        let rows = self.rows + other.rows;
        let mut out = Self::zeros(rows, self.cols);
        for c in 0..self.cols {
            out.data[c * rows..c * rows + self.rows].copy_from_slice(self.column(c));
            out.data[c * rows + self.rows..(c + 1) * rows].copy_from_slice(other.column(c));
        }
        out
    }

    /// Upper-triangular factor `R` of a Householder QR, truncated to
    /// `min(rows, cols)` rows. `R` has the same singular values and right
    /// singular vectors as `self`.
    pub fn qr_r(mut self) -> Self {
        let (m, n) = (self.rows, self.cols);
        let steps = m.min(n);
        for j in 0..steps {
            let norm = (j..m).fold(T::zero(), |acc, r| acc + self.get(r, j).norm_sqr()).sqrt();
            if norm == T::zero() {
                continue;
            }
            let x0 = self.get(j, j);
            let phase = if x0.norm() == T::zero() {
                Complex::new(T::one(), T::zero())
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * norm;
            let mut v: Vec<Complex<T>> = (j..m).map(|r| self.get(r, j)).collect();
            v[0] = v[0] - alpha;
            let vnorm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
            if vnorm == T::zero() {
                continue;
            }
            for z in v.iter_mut() {
                *z = *z / vnorm;
            }
            let two = T::one() + T::one();
            for c in j..n {
                let col = &mut self.data[c * m + j..(c + 1) * m];
                let dot = v.iter().zip(col.iter()).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b);
                for (x, vi) in col.iter_mut().zip(&v) {
                    *x = *x - *vi * dot * two;
                }
            }
        }
        let mut r = Self::zeros(steps, n);
        for c in 0..n {
            for row in 0..steps.min(c + 1) {
                r.set(row, c, self.get(row, c));
            }
        }
        r
    }
}

/// Accumulates tall constraint stacks block by block, keeping only the
/// triangular factor so memory stays at `cols × cols`.
#[derive(Clone, Debug)]
pub struct RowCompressor<T> {
    cols: usize,
    r: Option<ColMatrix<T>>,
}

impl<T: Real> RowCompressor<T> {
    pub fn new(cols: usize) -> Self {
        Self { cols, r: None }
    }

    pub fn push(&mut self, block: ColMatrix<T>) {
        assert_eq!(block.cols, self.cols, "constraint block width");
        let stacked = match self.r.take() {
            Some(r) => r.vstack(&block),
            None => block,
        };
        self.r = Some(if stacked.rows > self.cols {
            stacked.qr_r()
        } else {
            stacked
        });
    }

    pub fn finish(self) -> ColMatrix<T> {
        self.r.unwrap_or_else(|| ColMatrix::zeros(0, self.cols))
    }
}

/// Singular values (descending) with matching right singular vectors.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub singular_values: Vec<T>,
    /// Column `j` is the right singular vector for `singular_values[j]`.
    pub right: ColMatrix<T>,
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD. Orthogonalizes the columns of `a` by
/// plane rotations, accumulating them in `V`, so `a·V` has orthogonal columns
/// whose norms are the singular values.
pub fn svd<T: Real>(a: &ColMatrix<T>) -> Svd<T> {
    let n = a.cols;
    let m = a.rows;
    let mut work = a.clone();
    let mut v = ColMatrix::<T>::zeros(n, n);
    for j in 0..n {
        v.set(j, j, Complex::new(T::one(), T::zero()));
    }
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), Complex::<T>::zero());
                {
                    let cp = work.column(p);
                    let cq = work.column(q);
                    for (x, y) in cp.iter().zip(cq) {
                        alpha = alpha + x.norm_sqr();
                        beta = beta + y.norm_sqr();
                        gamma = gamma + x.conj() * y;
                    }
                }
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let t = if zeta == T::zero() { T::one() } else { t };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut work.data, m, p, q, c, s, phase);
                rotate(&mut v.data, n, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(T, usize)> = (0..n)
        .map(|j| (work.column(j).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt(), j))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let right = ColMatrix::from_columns(n, pairs.iter().map(|&(_, j)| v.column(j).to_vec()));
    Svd {
        singular_values: pairs.into_iter().map(|(s, _)| s).collect(),
        right,
    }
}

/// `a_p ← c·a_p − s·φ·a_q`, `a_q ← s·a_p + c·φ·a_q` on columns of a column-major buffer.
fn rotate<T: Real>(data: &mut [Complex<T>], rows: usize, p: usize, q: usize, c: T, s: T, phase: Complex<T>) {
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Nullspace of a linear map given by its (possibly compressed) matrix.
#[derive(Clone, Debug)]
pub struct Nullspace<T> {
    /// Orthonormal (Euclidean) basis vectors of the kernel.
    pub vectors: Vec<Vec<Complex<T>>>,
    /// All singular values, descending; one per unknown.
    pub singular_values: Vec<T>,
    /// Smallest kept singular value divided by the largest dropped one.
    /// Infinite when every dropped value is exactly zero or nothing is kept.
    pub spectral_gap: T,
}

/// Vectors whose singular value is at most `rank_eps` span the nullspace.
pub fn nullspace<T: Real>(a: &ColMatrix<T>, rank_eps: T) -> Nullspace<T> {
    let svd = svd(a);
    let vectors = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= rank_eps)
        .map(|(j, _)| svd.right.column(j).to_vec())
        .collect();
    let spectral_gap = spectral_gap(&svd.singular_values, rank_eps);
    Nullspace {
        vectors,
        singular_values: svd.singular_values,
        spectral_gap,
    }
}

/// Ratio of smallest kept to largest dropped singular value at cutoff `rank_eps`.
pub fn spectral_gap<T: Real>(singular_values: &[T], rank_eps: T) -> T {
    let kept = singular_values.iter().copied().filter(|&s| s > rank_eps).fold(T::infinity(), T::min);
    let dropped = singular_values.iter().copied().filter(|&s| s <= rank_eps).fold(T::zero(), T::max);
    if dropped == T::zero() || kept == T::infinity() {
        T::infinity()
    } else {
        kept / dropped
    }
}
