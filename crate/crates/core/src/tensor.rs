//! Dense complex square matrices carrying a tensor-leg shape.
//!
//! Index convention: for legs `[d1, …, dm]` the composite index of the
//! multi-index `(i1, …, im)` is `Σ_j i_j · ∏_{l>j} d_l`. The leftmost leg is
//! the most significant digit, so `kron(a, b)` places `a` on the left legs.
//! "Embedding from the left" (`x ↦ I ⊗ x`) therefore adds new legs in front
//! of the existing ones, and a matrix on `n` legs sits on the *rightmost*
//! legs of any larger ambient it is embedded into.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{count, to_f64, Real};

/// Numeric policy threaded through every check.
///
/// `residual_eps` bounds `‖X‖_F / √order` for identities that should hold
/// exactly; `rank_eps` is the absolute singular-value cutoff used whenever a
/// rank or nullspace dimension is decided.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<T> {
    pub residual_eps: T,
    pub rank_eps: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(residual_eps: T, rank_eps: T) -> Result<Self> {
        let positive = |x: T| x > T::zero();
        if !positive(residual_eps) || !positive(rank_eps) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be strictly positive (residual_eps={residual_eps}, rank_eps={rank_eps})"
            )));
        }
        Ok(Self {
            residual_eps,
            rank_eps,
        })
    }

    #[inline]
    pub fn accepts(&self, residual: T) -> bool {
        residual <= self.residual_eps
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            residual_eps: T::default_residual_eps(),
            rank_eps: T::default_rank_eps(),
        }
    }
}

/// Outcome of a single residual test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict<T> {
    pub pass: bool,
    pub residual: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeggedMatrix<T> {
    legs: Vec<usize>,
    order: usize,
    data: Vec<Complex<T>>,
}

fn leg_product(legs: &[usize]) -> usize {
    legs.iter().product()
}

fn strides(legs: &[usize]) -> Vec<usize> {
    let mut s = vec![1; legs.len()];
    for j in (0..legs.len().saturating_sub(1)).rev() {
        s[j] = s[j + 1] * legs[j + 1];
    }
    s
}

fn digits(mut index: usize, legs: &[usize], out: &mut [usize]) {
    for j in (0..legs.len()).rev() {
        out[j] = index % legs[j];
        index /= legs[j];
    }
}

impl<T: Real> LeggedMatrix<T> {
    pub fn new(legs: Vec<usize>, data: Vec<Complex<T>>) -> Result<Self> {
        if legs.is_empty() || legs.contains(&0) {
            return Err(Error::InvalidArgument(format!("invalid legs {legs:?}")));
        }
        let order = leg_product(&legs);
        if data.len() != order * order {
            return Err(Error::InvalidArgument(format!(
                "data length {} does not match order {order}",
                data.len()
            )));
        }
        Ok(Self { legs, order, data })
    }

    pub fn from_fn(legs: Vec<usize>, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let order = leg_product(&legs);
        assert!(order > 0, "legs must be positive");
        let mut data = Vec::with_capacity(order * order);
        for r in 0..order {
            for c in 0..order {
                data.push(f(r, c));
            }
        }
        Self { legs, order, data }
    }

    pub fn zeros(legs: Vec<usize>) -> Self {
        Self::from_fn(legs, |_, _| Complex::zero())
    }

    pub fn identity(legs: Vec<usize>) -> Self {
        Self::from_fn(legs, |r, c| if r == c { Complex::one() } else { Complex::zero() })
    }

    /// Builds an order-`rows.len()` matrix with a single leg.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("rows do not form a square".into()));
        }
        Self::new(vec![n], rows.concat())
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Self {
        Self::from_fn(vec![entries.len()], |r, c| {
            if r == c {
                entries[r]
            } else {
                Complex::zero()
            }
        })
    }

    /// Permutation matrix `P` with `P e_j = e_{images[j]}`.
    pub fn permutation(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in images {
            if i >= n || seen[i] {
                return Err(Error::NotPermutation);
            }
            seen[i] = true;
        }
        Ok(Self::from_fn(vec![n], |r, c| {
            if images[c] == r {
                Complex::one()
            } else {
                Complex::zero()
            }
        }))
    }

    /// Matrix unit `E_ij` in `M_n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(vec![n], |r, c| {
            if r == i && c == j {
                Complex::one()
            } else {
                Complex::zero()
            }
        })
    }

    #[inline]
    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.order + c]
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    /// Re-associates legs. Data is untouched; only the product must agree.
    pub fn with_legs(mut self, legs: Vec<usize>) -> Result<Self> {
        let product = leg_product(&legs);
        if legs.is_empty() || legs.contains(&0) || product != self.order {
            return Err(Error::LegMismatch {
                legs,
                product,
                order: self.order,
            });
        }
        self.legs = legs;
        Ok(self)
    }

    pub fn merged(&self) -> Self {
        Self {
            legs: vec![self.order],
            order: self.order,
            data: self.data.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            legs: self.legs.clone(),
            order: self.order,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.order;
        Self::from_fn(self.legs.clone(), |r, c| self.data[c * n + r].conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        Self::from_fn(self.legs.clone(), |r, c| self.data[c * n + r])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    fn result_legs(&self, other: &Self) -> Vec<usize> {
        if self.legs == other.legs {
            self.legs.clone()
        } else {
            vec![self.order]
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        let n = self.order;
        let mut out = vec![Complex::<T>::zero(); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self {
            legs: self.result_legs(other),
            order: n,
            data: out,
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(Self {
            legs: self.result_legs(other),
            order: self.order,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self · x · self*`, computed as `(self · (self · x)*)*` so that only
    /// left products occur; those skip zero entries, which makes conjugation
    /// by permutations and diagonals quadratic.
    pub fn conjugate(&self, x: &Self) -> Self {
        (self * &(self * x).adjoint())
            .adjoint()
            .with_legs(x.legs.clone())
            .expect("conjugation preserves order")
    }

    pub fn pow(&self, m: usize) -> Self {
        let mut acc = Self::identity(self.legs.clone());
        for _ in 0..m {
            acc = &acc * self;
        }
        acc
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.order).fold(Complex::zero(), |acc, i| acc + self.data[i * self.order + i])
    }

    /// Normalized trace `tr(x) = Tr(x) / order`.
    pub fn normalized_trace(&self) -> Complex<T> {
        self.trace() / count::<T>(self.order)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// `‖x‖_F / √order`, the size-stable norm used for all residuals.
    pub fn normalized_norm(&self) -> T {
        self.frobenius_norm() / count::<T>(self.order).sqrt()
    }

    /// Normalized norm of `self - other`.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.order, other.order, "distance between different orders");
        let s = self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).norm_sqr());
        (s / count::<T>(self.order)).sqrt()
    }

    /// Trace inner product `⟨a, b⟩ = tr(a* b) / order`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.order, other.order, "inner product between different orders");
        let s = self
            .data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (&a, &b)| acc + a.conj() * b);
        s / count::<T>(self.order)
    }

    pub fn is_diagonal(&self, eps: T) -> bool {
        let n = self.order;
        (0..n).all(|r| (0..n).all(|c| r == c || self.data[r * n + c].norm() <= eps))
    }

    pub fn diagonal_entries(&self) -> Vec<Complex<T>> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    /// Reorders tensor legs: new leg `i` is old leg `perm[i]`.
    pub fn permute_legs(&self, perm: &[usize]) -> Result<Self> {
        let m = self.legs.len();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of {m} legs")));
        }
        let new_legs: Vec<usize> = perm.iter().map(|&p| self.legs[p]).collect();
        let new_strides = strides(&new_legs);
        let mut map = vec![0usize; self.order];
        let mut d = vec![0usize; m];
        for (old, slot) in map.iter_mut().enumerate() {
            digits(old, &self.legs, &mut d);
            *slot = perm.iter().enumerate().map(|(i, &p)| d[p] * new_strides[i]).sum();
        }
        let n = self.order;
        let mut data = vec![Complex::zero(); n * n];
        for r in 0..n {
            for c in 0..n {
                data[map[r] * n + map[c]] = self.data[r * n + c];
            }
        }
        Ok(Self {
            legs: new_legs,
            order: n,
            data,
        })
    }
}

impl<T: Real> Mul for &LeggedMatrix<T> {
    type Output = LeggedMatrix<T>;
    fn mul(self, rhs: Self) -> LeggedMatrix<T> {
        self.matmul(rhs).expect("matrix product of mismatched orders")
    }
}

impl<T: Real> Add for &LeggedMatrix<T> {
    type Output = LeggedMatrix<T>;
    fn add(self, rhs: Self) -> LeggedMatrix<T> {
        self.try_add(rhs).expect("sum of mismatched orders")
    }
}

impl<T: Real> Sub for &LeggedMatrix<T> {
    type Output = LeggedMatrix<T>;
    fn sub(self, rhs: Self) -> LeggedMatrix<T> {
        self.try_sub(rhs).expect("difference of mismatched orders")
    }
}

/// Kronecker product; `a` occupies the leftmost legs.
pub fn kron<T: Real>(a: &LeggedMatrix<T>, b: &LeggedMatrix<T>) -> LeggedMatrix<T> {
    let (na, nb) = (a.order, b.order);
    let n = na * nb;
    let mut data = vec![Complex::zero(); n * n];
    for ar in 0..na {
        for ac in 0..na {
            let x = a.data[ar * na + ac];
            if x.is_zero() {
                continue;
            }
            for br in 0..nb {
                let row = (ar * nb + br) * n + ac * nb;
                for bc in 0..nb {
                    data[row + bc] = x * b.data[br * nb + bc];
                }
            }
        }
    }
    let mut legs = a.legs.clone();
    legs.extend_from_slice(&b.legs);
    LeggedMatrix { legs, order: n, data }
}

/// Kronecker product of a list, left to right.
pub fn kron_all<T: Real>(factors: &[LeggedMatrix<T>]) -> LeggedMatrix<T> {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().fold(first.clone(), |acc, f| kron(&acc, f))
}

/// `I_n^{(count)}`: identity on `count` legs of dimension `n` (order 1 when `count == 0`).
pub fn identity_legs<T: Real>(n: usize, count: usize) -> LeggedMatrix<T> {
    if count == 0 {
        LeggedMatrix::identity(vec![1])
    } else {
        LeggedMatrix::identity(vec![n; count])
    }
}

/// `I^{(count)} ⊗ x`, dropping a unit leg when `count == 0`.
pub fn pad_left<T: Real>(x: &LeggedMatrix<T>, n: usize, count: usize) -> LeggedMatrix<T> {
    if count == 0 {
        x.clone()
    } else {
        kron(&identity_legs(n, count), x)
    }
}

/// `x ⊗ I^{(count)}`.
pub fn pad_right<T: Real>(x: &LeggedMatrix<T>, n: usize, count: usize) -> LeggedMatrix<T> {
    if count == 0 {
        x.clone()
    } else {
        kron(x, &identity_legs(n, count))
    }
}

/// Left-embeds `x` into an ambient of order `target` built from legs of
/// dimension `n`. Fails unless `target / x.order()` is a power of `n`.
pub fn embed_left<T: Real>(x: &LeggedMatrix<T>, n: usize, target: usize) -> Result<LeggedMatrix<T>> {
    if !target.is_multiple_of(x.order) {
        return Err(Error::OrderMismatch {
            left: x.order,
            right: target,
        });
    }
    let mut ratio = target / x.order;
    let mut pad = 0;
    while ratio > 1 {
        if !ratio.is_multiple_of(n) {
            return Err(Error::OrderMismatch {
                left: x.order,
                right: target,
            });
        }
        ratio /= n;
        pad += 1;
    }
    Ok(pad_left(x, n, pad))
}

fn check_split<T: Real>(m: &LeggedMatrix<T>, (n, k): (usize, usize)) -> Result<()> {
    if n == 0 || k == 0 || n * k != m.order {
        return Err(Error::SplitMismatch { n, k, order: m.order });
    }
    Ok(())
}

/// Block transpose `w̃[(α,a),(β,b)] = w[(β,a),(α,b)]` for the split `M_n ⊗ M_k`.
pub fn block_transpose<T: Real>(m: &LeggedMatrix<T>, split: (usize, usize)) -> Result<LeggedMatrix<T>> {
    check_split(m, split)?;
    let (n, k) = split;
    let order = m.order;
    let mut data = vec![Complex::zero(); order * order];
    for alpha in 0..n {
        for a in 0..k {
            let row = alpha * k + a;
            for beta in 0..n {
                for b in 0..k {
                    data[row * order + beta * k + b] = m.data[(beta * k + a) * order + alpha * k + b];
                }
            }
        }
    }
    Ok(LeggedMatrix {
        legs: vec![n, k],
        order,
        data,
    })
}

/// Traces out leg `leg`. The result keeps the remaining legs in order.
pub fn partial_trace<T: Real>(m: &LeggedMatrix<T>, leg: usize) -> Result<LeggedMatrix<T>> {
    let nlegs = m.legs.len();
    if leg >= nlegs {
        return Err(Error::BadLeg { leg, count: nlegs });
    }
    let mut out_legs: Vec<usize> = m.legs.clone();
    out_legs.remove(leg);
    if out_legs.is_empty() {
        out_legs.push(1);
    }
    let out_order = leg_product(&out_legs);
    let out_strides_full = {
        // stride of each original leg in the reduced index (0 for the traced leg)
        let mut s = vec![0usize; nlegs];
        let mut acc = 1;
        for j in (0..nlegs).rev() {
            if j != leg {
                s[j] = acc;
                acc *= m.legs[j];
            }
        }
        s
    };
    let mut reduced = vec![0usize; m.order];
    let mut traced = vec![0usize; m.order];
    let mut d = vec![0usize; nlegs];
    for idx in 0..m.order {
        digits(idx, &m.legs, &mut d);
        reduced[idx] = d.iter().zip(&out_strides_full).map(|(a, b)| a * b).sum();
        traced[idx] = d[leg];
    }
    let n = m.order;
    let mut data = vec![Complex::zero(); out_order * out_order];
    for r in 0..n {
        for c in 0..n {
            if traced[r] == traced[c] {
                let o = reduced[r] * out_order + reduced[c];
                data[o] = data[o] + m.data[r * n + c];
            }
        }
    }
    Ok(LeggedMatrix {
        legs: out_legs,
        order: out_order,
        data,
    })
}

/// Trace-preserving conditional expectation of `M_n ⊗ M_k` onto `ℂ ⊗ M_k`.
pub fn cond_expect_right<T: Real>(m: &LeggedMatrix<T>, split: (usize, usize)) -> Result<LeggedMatrix<T>> {
    check_split(m, split)?;
    let (n, k) = split;
    let order = m.order;
    let inv_n = T::one() / count::<T>(n);
    let reduced = LeggedMatrix::from_fn(vec![k], |a, b| {
        (0..n).fold(Complex::zero(), |acc, alpha| {
            acc + m.data[(alpha * k + a) * order + alpha * k + b]
        }) * inv_n
    });
    Ok(kron(&LeggedMatrix::identity(vec![n]), &reduced))
}

/// Trace-preserving conditional expectation onto `Ad_u(M_n ⊗ ℂ)`.
pub fn cond_expect_adu_left<T: Real>(
    m: &LeggedMatrix<T>,
    u: &LeggedMatrix<T>,
    split: (usize, usize),
    tol: &Tolerance<T>,
) -> Result<LeggedMatrix<T>> {
    check_split(m, split)?;
    if u.order != m.order {
        return Err(Error::OrderMismatch {
            left: u.order,
            right: m.order,
        });
    }
    let check = is_unitary(u, tol);
    if !check.pass {
        return Err(Error::NotUnitary {
            residual: to_f64(check.residual),
        });
    }
    let (n, k) = split;
    let order = m.order;
    let z = &(&u.adjoint() * m) * u;
    let inv_k = T::one() / count::<T>(k);
    let left = LeggedMatrix::from_fn(vec![n], |alpha, beta| {
        (0..k).fold(Complex::zero(), |acc, a| acc + z.data[(alpha * k + a) * order + beta * k + a]) * inv_k
    });
    let lifted = kron(&left, &LeggedMatrix::identity(vec![k]));
    Ok(u.with_split_legs(split).conjugate(&lifted))
}

impl<T: Real> LeggedMatrix<T> {
    fn with_split_legs(&self, (n, k): (usize, usize)) -> Self {
        self.clone().with_legs(vec![n, k]).expect("split checked by caller")
    }
}

/// Unitarity test with residual `‖m m* − I‖_F / √order`.
pub fn is_unitary<T: Real>(m: &LeggedMatrix<T>, tol: &Tolerance<T>) -> Verdict<T> {
    let prod = m * &m.adjoint();
    let residual = prod.distance(&LeggedMatrix::identity(prod.legs.clone()));
    Verdict {
        pass: tol.accepts(residual),
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = LeggedMatrix<f64>;

    fn f2() -> M {
        let s = 1.0 / 2f64.sqrt();
        M::from_rows(&[vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]).unwrap()
    }

    fn swap2() -> M {
        M::permutation(&[0, 2, 1, 3]).unwrap().with_legs(vec![2, 2]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = M::identity(vec![2]);
        let k = kron(&i2, &i2);
        assert_eq!(k.legs(), &[2, 2]);
        assert_eq!(k, M::identity(vec![2, 2]));
    }

    #[test]
    fn kron_follows_leftmost_major_convention() {
        let k = kron(&M::unit(2, 0, 1), &M::unit(2, 1, 0));
        for r in 0..4 {
            for col in 0..4 {
                let expected = if (r, col) == (1, 2) { 1.0 } else { 0.0 };
                assert_eq!(k.get(r, col), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn kron_of_fourier_has_uniform_moduli() {
        let k = kron(&f2(), &f2());
        assert!(k.data().iter().all(|z| (z.norm() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn block_transpose_of_swap_is_rank_one() {
        let bt = block_transpose(&swap2(), (2, 2)).unwrap();
        // (Σ_α |αα⟩)(Σ_β ⟨ββ|): ones exactly at rows/cols {0, 3}
        for r in 0..4 {
            for col in 0..4 {
                let expected = if [0, 3].contains(&r) && [0, 3].contains(&col) { 1.0 } else { 0.0 };
                assert_eq!(bt.get(r, col), c(expected, 0.0), "entry ({r},{col})");
            }
        }
        assert_eq!(block_transpose(&M::identity(vec![4]), (2, 2)).unwrap(), M::identity(vec![2, 2]));
    }

    #[test]
    fn block_transpose_rejects_bad_split() {
        assert!(matches!(
            block_transpose(&M::identity(vec![6]), (4, 2)),
            Err(Error::SplitMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_cases() {
        let i4 = M::identity(vec![2, 2]);
        assert_eq!(partial_trace(&i4, 0).unwrap(), M::identity(vec![2]).scale_real(2.0));
        let a = M::from_rows(&[vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]]).unwrap();
        let b = M::from_rows(&[vec![c(0.5, 0.0), c(0.0, 2.0)], vec![c(1.0, 1.0), c(-1.0, 0.0)]]).unwrap();
        let pt = partial_trace(&kron(&a, &b), 0).unwrap();
        assert!(pt.distance(&b.scale(a.trace())) < 1e-15);
        let e2 = &kron(&M::unit(2, 0, 0), &M::unit(2, 0, 0)) + &kron(&M::unit(2, 1, 1), &M::unit(2, 1, 1));
        assert_eq!(partial_trace(&e2, 0).unwrap(), M::identity(vec![2]));
        assert!(matches!(partial_trace(&i4, 2), Err(Error::BadLeg { .. })));
    }

    #[test]
    fn sequential_partial_traces_give_full_trace() {
        let m = M::from_fn(vec![2, 3, 2], |r, col| c((r * 7 + col) as f64 * 0.1, (r as f64) - (col as f64)));
        let t = partial_trace(&partial_trace(&partial_trace(&m, 2).unwrap(), 1).unwrap(), 0).unwrap();
        assert_eq!(t.order(), 1);
        assert!((t.get(0, 0) - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn right_expectation_fixes_and_kills() {
        let y = M::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 1.0)]]).unwrap();
        let x = kron(&M::identity(vec![2]), &y);
        assert!(cond_expect_right(&x, (2, 2)).unwrap().distance(&x) < 1e-15);
        let killed = cond_expect_right(&kron(&M::unit(2, 0, 1), &M::identity(vec![2])), (2, 2)).unwrap();
        assert!(killed.frobenius_norm() < 1e-15);
    }

    #[test]
    fn left_expectation_factorized_case() {
        let tol = Tolerance::default();
        let a = M::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 1.0)]]).unwrap();
        let b = M::from_rows(&[vec![c(2.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(4.0, 0.0)]]).unwrap();
        let u = M::identity(vec![2, 2]);
        let got = cond_expect_adu_left(&kron(&a, &b), &u, (2, 2), &tol).unwrap();
        let expected = kron(&a.scale(b.trace() / 2.0), &M::identity(vec![2]));
        assert!(got.distance(&expected) < 1e-15);
        let one = cond_expect_adu_left(&M::identity(vec![4]), &swap2(), (2, 2), &tol).unwrap();
        assert!(one.distance(&M::identity(vec![4])) < 1e-15);
        assert!(matches!(
            cond_expect_adu_left(&M::identity(vec![4]), &M::identity(vec![4]).scale_real(2.0), (2, 2), &tol),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn unitarity_verdicts() {
        let tol = Tolerance::default();
        let v = is_unitary(&M::identity(vec![3]), &tol);
        assert!(v.pass && v.residual == 0.0);
        assert!(is_unitary(&f2(), &tol).pass);
        assert!(!is_unitary(&M::identity(vec![3]).scale_real(2.0), &tol).pass);
    }

    #[test]
    fn permute_legs_swaps_kron_factors() {
        let a = M::from_fn(vec![2], |r, col| c(r as f64 + 1.0, col as f64));
        let b = M::from_fn(vec![3], |r, col| c((r * col) as f64, 1.0));
        let ab = kron(&a, &b);
        let swapped = ab.permute_legs(&[1, 0]).unwrap();
        assert_eq!(swapped, kron(&b, &a));
        assert!(ab.permute_legs(&[0, 0]).is_err());
    }

    #[test]
    fn leg_reassociation_keeps_data() {
        let m = M::from_fn(vec![2, 2, 2], |r, col| c(r as f64, col as f64));
        let re = m.clone().with_legs(vec![4, 2]).unwrap();
        assert_eq!(re.data(), m.data());
        assert!(matches!(m.with_legs(vec![3, 3]), Err(Error::LegMismatch { .. })));
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-9, -1.0).is_err());
        assert!(Tolerance::new(1e-9, 1e-8).is_ok());
    }

    #[test]
    fn embed_left_pads_identity_in_front() {
        let x = M::unit(2, 0, 1);
        let e = embed_left(&x, 2, 8).unwrap();
        assert_eq!(e, kron(&M::identity(vec![2, 2]), &x));
        assert!(embed_left(&x, 2, 6).is_err());
    }
}
