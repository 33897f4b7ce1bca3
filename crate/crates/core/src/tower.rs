//! The recursive tower built from a complex Hadamard matrix `u`.
//!
//! * `D_u = √n Σ conj(u_ij) E_ii ⊗ E_jj`
//! * `u_0 = u`, `u_{2k+1} = (I_n ⊗ u_{2k})(D_u ⊗ I^{(k)})`, `u_{2k} = u_{2k−1}(u ⊗ I^{(k)})`
//! * `u_{2k}` has order `n^{k+1}`, `u_{2k+1}` has order `n^{k+2}`
//! * Jones projections `e_1 = (1/n)Σ E_ij`, `e_2 = Σ E_ii ⊗ E_ii`,
//!   `e_{2k+1} = e_1 ⊗ I^{(k)}`, `e_{2k+2} = e_2 ⊗ I^{(k)}`
//!
//! When elements of different orders meet, the smaller one is embedded from
//! the left (`x ↦ I ⊗ x`), i.e. it keeps the rightmost legs.

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hadamard::{permutation_images, require_diagonal_unitary, require_hadamard};
use crate::scalar::{count, Real};
use crate::tensor::{embed_left, identity_legs, kron, pad_left, pad_right, LeggedMatrix, Tolerance};

pub const DEFAULT_MAX_LEVEL: usize = 6;

/// `D_u` as a diagonal matrix with legs `[n, n]`.
pub fn d_matrix<T: Real>(u: &LeggedMatrix<T>, tol: &Tolerance<T>) -> Result<LeggedMatrix<T>> {
    require_hadamard(u, tol)?;
    Ok(d_matrix_unchecked(u))
}

fn d_matrix_unchecked<T: Real>(u: &LeggedMatrix<T>) -> LeggedMatrix<T> {
    let n = u.order();
    let root = count::<T>(n).sqrt();
    let entries: Vec<Complex<T>> = (0..n * n).map(|ij| u.get(ij / n, ij % n).conj() * root).collect();
    LeggedMatrix::diagonal(&entries)
        .with_legs(vec![n, n])
        .expect("n·n legs")
}

/// Memoized tower `u_0, u_1, …` of a fixed base matrix.
///
/// Levels are computed on first use and never change afterwards, so a cache
/// can be shared across threads and repeated calls return identical matrices.
#[derive(Debug)]
pub struct TowerCache<T> {
    base: LeggedMatrix<T>,
    d_u: LeggedMatrix<T>,
    n: usize,
    levels: Vec<OnceLock<LeggedMatrix<T>>>,
}

impl<T: Real> TowerCache<T> {
    pub fn new(u: &LeggedMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        require_hadamard(u, tol)?;
        Ok(Self::new_unchecked(u, DEFAULT_MAX_LEVEL))
    }

    pub fn with_max_level(u: &LeggedMatrix<T>, tol: &Tolerance<T>, max_level: usize) -> Result<Self> {
        require_hadamard(u, tol)?;
        Ok(Self::new_unchecked(u, max_level))
    }

    /// Skips the Hadamard check. Used to build deliberately corrupted towers.
    pub fn new_unchecked(u: &LeggedMatrix<T>, max_level: usize) -> Self {
        let base = u.merged();
        let n = base.order();
        Self {
            d_u: d_matrix_unchecked(&base),
            base,
            n,
            levels: (0..=max_level).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &LeggedMatrix<T> {
        &self.base
    }

    pub fn d_u(&self) -> &LeggedMatrix<T> {
        &self.d_u
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// `u_m`, with legs `[n; order exponent]`.
    pub fn unitary(&self, m: usize) -> Result<&LeggedMatrix<T>> {
        let cell = self.levels.get(m).ok_or(Error::LevelTooDeep {
            level: m,
            max: self.max_level(),
        })?;
        if let Some(x) = cell.get() {
            return Ok(x);
        }
        let value = if m == 0 {
            self.base.clone()
        } else {
            let prev = self.unitary(m - 1)?;
            let n = self.n;
            let (product, legs) = if m % 2 == 1 {
                let k = (m - 1) / 2;
                (&pad_left(prev, n, 1) * &pad_right(&self.d_u, n, k), k + 2)
            } else {
                let k = m / 2;
                (prev * &pad_right(&self.base, n, k), k + 1)
            };
            product.with_legs(vec![n; legs])?
        };
        Ok(cell.get_or_init(|| value))
    }
}

/// Number of `n`-legs of `u_m`.
pub fn tower_legs(m: usize) -> usize {
    if m.is_multiple_of(2) {
        m / 2 + 1
    } else {
        (m - 1) / 2 + 2
    }
}

/// `e_m` for `m ≥ 1`.
pub fn jones_projection<T: Real>(m: usize, n: usize) -> Result<LeggedMatrix<T>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("jones projection e_{m} of order {n}")));
    }
    let inv_n = T::one() / count::<T>(n);
    if m % 2 == 1 {
        let k = (m - 1) / 2;
        let e1 = LeggedMatrix::from_fn(vec![n], |_, _| Complex::new(inv_n, T::zero()));
        Ok(pad_right(&e1, n, k))
    } else {
        let k = (m - 2) / 2;
        Ok(pad_right(&diagonal_projection(n), n, k))
    }
}

/// `e_2 = Σ_i E_ii ⊗ E_ii`.
fn diagonal_projection<T: Real>(n: usize) -> LeggedMatrix<T> {
    LeggedMatrix::from_fn(vec![n, n], |r, c| {
        if r == c && r / n == r % n {
            Complex::one()
        } else {
            Complex::zero()
        }
    })
}

/// Residual of `u_m e_m u_m* = e_{m+1}`, both sides in the order of `u_m`.
pub fn intertwining_residual<T: Real>(cache: &TowerCache<T>, m: usize) -> Result<T> {
    let n = cache.n();
    let um = cache.unitary(m)?;
    let em = embed_left(&jones_projection(m, n)?, n, um.order())?;
    let next = embed_left(&jones_projection(m + 1, n)?, n, um.order())?;
    Ok(um.conjugate(&em).distance(&next))
}

/// `V_ℓ = Σ E_ij ⊗ E_ji ⊗ I^{(ℓ)}`, the flip of the first two legs.
pub fn swap_v<T: Real>(n: usize, level: usize) -> LeggedMatrix<T> {
    let flip = LeggedMatrix::from_fn(vec![n, n], |r, c| {
        let (i, j) = (r / n, r % n);
        if c == j * n + i {
            Complex::one()
        } else {
            Complex::zero()
        }
    });
    pad_right(&flip, n, level)
}

fn same_order<T: Real>(u: &TowerCache<T>, w: &TowerCache<T>) -> Result<usize> {
    if u.n() != w.n() {
        return Err(Error::OrderMismatch {
            left: u.n(),
            right: w.n(),
        });
    }
    Ok(u.n())
}

/// `BU(u, w; ℓ) = u_{2ℓ+2} w_{2ℓ+1} V_ℓ`, order `n^{ℓ+2}`.
pub fn biunitary_bu<T: Real>(u: &TowerCache<T>, w: &TowerCache<T>, level: usize) -> Result<LeggedMatrix<T>> {
    let n = same_order(u, w)?;
    let product = &(u.unitary(2 * level + 2)? * w.unitary(2 * level + 1)?) * &swap_v(n, level);
    product.with_legs(vec![n; level + 2])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Unitary implementing `N_{2k}` (even) or `N_{2k+1}` (odd) as a conjugate of
/// `I ⊗ Δ_n ⊗ I^{(k)}` or `I ⊗ M_n ⊗ I^{(k)}`.
pub fn n_conjugator<T: Real>(u: &TowerCache<T>, w: &TowerCache<T>, k: usize, parity: Parity) -> Result<LeggedMatrix<T>> {
    let n = same_order(u, w)?;
    let c = match parity {
        Parity::Even => u.unitary(2 * k + 1)? * &pad_left(w.unitary(2 * k)?, n, 1),
        Parity::Odd => u.unitary(2 * k + 2)? * w.unitary(2 * k + 1)?,
    };
    c.with_legs(vec![n; k + 2])
}

/// Spanning set of `N_{2k}` (the `n` images of `I ⊗ E_jj ⊗ I^{(k)}`) or of
/// `N_{2k+1}` (the `n²` images of `I ⊗ E_ij ⊗ I^{(k)}`).
pub fn n_generators<T: Real>(u: &TowerCache<T>, w: &TowerCache<T>, k: usize, parity: Parity) -> Result<Vec<LeggedMatrix<T>>> {
    let n = same_order(u, w)?;
    let c = n_conjugator(u, w, k, parity)?;
    let units: Vec<(usize, usize)> = match parity {
        Parity::Even => (0..n).map(|j| (j, j)).collect(),
        Parity::Odd => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
    };
    Ok(units
        .into_iter()
        .map(|(i, j)| c.conjugate(&pad_right(&pad_left(&LeggedMatrix::unit(n, i, j), n, 1), n, k)))
        .collect())
}

/// `(I^{(level)} ⊗ ξ)·P^{⊗(level+1)}` with `P = p2·p1*`, `ξ = d2·P·d1*·P*`.
pub fn chain_conjugator<T: Real>(
    p1: &LeggedMatrix<T>,
    d1: &LeggedMatrix<T>,
    p2: &LeggedMatrix<T>,
    d2: &LeggedMatrix<T>,
    level: usize,
    tol: &Tolerance<T>,
) -> Result<LeggedMatrix<T>> {
    let n = p1.order();
    for m in [d1, p2, d2] {
        if m.order() != n {
            return Err(Error::OrderMismatch { left: n, right: m.order() });
        }
    }
    permutation_images(p1, tol.residual_eps)?;
    permutation_images(p2, tol.residual_eps)?;
    require_diagonal_unitary(d1, tol.residual_eps)?;
    require_diagonal_unitary(d2, tol.residual_eps)?;
    let p = &p2.merged() * &p1.merged().adjoint();
    let xi = &(&(&d2.merged() * &p) * &d1.merged().adjoint()) * &p.adjoint();
    let mut p_power = p.clone();
    for _ in 0..level {
        p_power = kron(&p_power, &p);
    }
    Ok(&pad_left(&xi, n, level) * &p_power)
}

/// `W_k = Σ_{i,j < n^{k+1}} E_ij ⊗ I^{(s)} ⊗ E_ji` on `2k+s+2` legs:
/// exchanges the block of the first `k+1` legs with the block of the last `k+1`.
pub fn block_swap_w<T: Real>(n: usize, k: usize, s: usize) -> LeggedMatrix<T> {
    let block = n.pow((k + 1) as u32);
    let middle = n.pow(s as u32);
    leg_permutation_matrix(vec![n; 2 * k + s + 2], |idx| {
        let (a, rest) = (idx / (middle * block), idx % (middle * block));
        let (b, c) = (rest / block, rest % block);
        (c * middle + b) * block + a
    })
}

/// `V_k = I^{(k+s)} ⊗ Σ E_ij ⊗ I^{(k)} ⊗ E_ji`: exchanges leg `k+s` with the last leg.
pub fn leg_swap_v<T: Real>(n: usize, k: usize, s: usize) -> LeggedMatrix<T> {
    let inner = n.pow(k as u32);
    let flip = leg_permutation_matrix(vec![n; k + 2], |idx| {
        let (i, rest) = (idx / (inner * n), idx % (inner * n));
        let (mid, j) = (rest / n, rest % n);
        (j * inner + mid) * n + i
    });
    pad_left(&flip, n, k + s)
}

/// Permutation matrix sending basis vector `idx` to `image(idx)`.
fn leg_permutation_matrix<T: Real>(legs: Vec<usize>, image: impl Fn(usize) -> usize) -> LeggedMatrix<T> {
    let order: usize = legs.iter().product();
    let images: Vec<usize> = (0..order).map(image).collect();
    LeggedMatrix::permutation(&images)
        .expect("leg exchange is a bijection")
        .with_legs(legs)
        .expect("legs multiply to order")
}

/// `I^{(count)}` re-exported for callers composing tower elements.
pub fn identity<T: Real>(n: usize, count: usize) -> LeggedMatrix<T> {
    identity_legs(n, count)
}
