//! Finite-level identities of the tower, each returning a residual so the
//! scenarios can report them and tests can feed deliberately broken inputs.

use std::f64::consts::TAU;

use crate::algebra::{algebra_contained, algebra_equal, generate_algebra, AlgebraBasis};
use crate::error::{Error, Result};
use crate::hadamard::{clock, shift};
use crate::scalar::{to_f64, Real};
use crate::tensor::{embed_left, kron_all, pad_left, pad_right, LeggedMatrix, Tolerance};
use crate::tower::{block_swap_w, jones_projection, leg_swap_v, n_conjugator, n_generators, Parity, TowerCache};

/// Largest residual of `𝒟_k F = F σ_{n−1}^k` and `σ_k F = F 𝒟_k` over `k < n`,
/// where `σ_1` is the cyclic shift and `𝒟_1` the clock.
pub fn clock_shift_residual<T: Real>(f: &LeggedMatrix<T>) -> T {
    let f = f.merged();
    let n = f.order();
    let mut worst = T::zero();
    for k in 0..n {
        let d = clock::<T>(n, k);
        let s = shift::<T>(n, k);
        let s_inv = shift::<T>(n, ((n - 1) * k) % n);
        worst = worst.max((&d * &f).distance(&(&f * &s_inv)));
        worst = worst.max((&s * &f).distance(&(&f * &d)));
    }
    worst
}

/// Residual of `Ad_{I ⊗ u_{2k}}(I ⊗ 𝒟_1 ⊗ I^{(k)}) = I ⊗ σ_1^{⊗(k+1)}`.
pub fn clock_to_shift_residual<T: Real>(cache: &TowerCache<T>, k: usize) -> Result<T> {
    let n = cache.n();
    let conj = pad_left(cache.unitary(2 * k)?, n, 1);
    let x = pad_right(&pad_left(&clock::<T>(n, 1), n, 1), n, k);
    let shifts: Vec<LeggedMatrix<T>> = (0..=k).map(|_| shift(n, 1)).collect();
    let target = pad_left(&kron_all(&shifts), n, 1);
    Ok(conj.conjugate(&x).distance(&target))
}

/// `Ad_{u_{2k+1}(I ⊗ w_{2k})}(I ⊗ 𝒟_1 ⊗ I^{(k)})`, which generates `N_{2k}`.
pub fn clock_image<T: Real>(u: &TowerCache<T>, w: &TowerCache<T>, k: usize) -> Result<LeggedMatrix<T>> {
    let n = u.n();
    let c = n_conjugator(u, w, k, Parity::Even)?;
    let x = pad_right(&pad_left(&clock::<T>(n, 1), n, 1), n, k);
    Ok(c.conjugate(&x))
}

/// Shape of the clock image for a Fourier tower: diagonal, and along the
/// leading leg each fibre is `Ad_{σ_r}(𝒟_1)` with `r` fixed by the last leg.
#[derive(Clone, Debug)]
pub struct DiagonalForm<T> {
    pub off_diagonal: T,
    /// Largest distance of a fibre from its best matching `Ad_{σ_r}(𝒟_1)`.
    pub fibre_residual: T,
    /// Shift `r` selected for every value of the trailing legs.
    pub shifts: Vec<usize>,
    /// Whether `r` depends on the last leg only.
    pub last_leg_only: bool,
}

pub fn diagonal_form<T: Real>(u: &TowerCache<T>, w: &TowerCache<T>, k: usize) -> Result<DiagonalForm<T>> {
    let n = u.n();
    let x = clock_image(u, w, k)?;
    let order = x.order();
    let rest = order / n;
    let mut off_diagonal = T::zero();
    for r in 0..order {
        for c in 0..order {
            if r != c {
                off_diagonal = off_diagonal.max(x.get(r, c).norm());
            }
        }
    }
    let d1 = clock::<T>(n, 1);
    let candidates: Vec<Vec<_>> = (0..n).map(|r| shift::<T>(n, r).conjugate(&d1).diagonal_entries()).collect();
    let mut fibre_residual = T::zero();
    let mut shifts = Vec::with_capacity(rest);
    for t in 0..rest {
        let fibre: Vec<_> = (0..n).map(|a| x.get(a * rest + t, a * rest + t)).collect();
        let (best, dist) = candidates
            .iter()
            .enumerate()
            .map(|(r, cand)| {
                let d = fibre.iter().zip(cand).fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()));
                (r, d)
            })
            .fold((0, T::infinity()), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        fibre_residual = fibre_residual.max(dist);
        shifts.push(best);
    }
    let last_leg_only = shifts.iter().enumerate().all(|(t, &r)| r == shifts[t % n]);
    Ok(DiagonalForm {
        off_diagonal,
        fibre_residual,
        shifts,
        last_leg_only,
    })
}

/// Comparison of two algebras by mutual membership.
#[derive(Clone, Debug)]
pub struct AlgebraComparison<T> {
    pub holds: bool,
    pub left_dim: usize,
    pub right_dim: usize,
    /// Largest distance of a basis element of the left algebra from the right one.
    pub residual: T,
}

fn worst_membership<T: Real>(a: &AlgebraBasis<T>, b: &AlgebraBasis<T>) -> T {
    a.basis().iter().fold(T::zero(), |acc, x| acc.max(b.membership_residual(x)))
}

/// `⟨N_{2k}, e_{2k+3}⟩ = N_{2k+1}`.
pub fn basic_construction_step<T: Real>(u: &TowerCache<T>, w: &TowerCache<T>, k: usize, tol: &Tolerance<T>) -> Result<AlgebraComparison<T>> {
    let n = u.n();
    let mut gens = n_generators(u, w, k, Parity::Even)?;
    let legs = gens[0].legs().to_vec();
    gens.push(jones_projection::<T>(2 * k + 3, n)?.with_legs(legs.clone())?);
    let left = generate_algebra(legs.clone(), &gens, tol)?;
    let right = generate_algebra(legs, &n_generators(u, w, k, Parity::Odd)?, tol)?;
    Ok(AlgebraComparison {
        holds: algebra_equal(&left, &right, tol)?,
        left_dim: left.dim(),
        right_dim: right.dim(),
        residual: worst_membership(&left, &right).max(worst_membership(&right, &left)),
    })
}

/// Whether `N_{2k+2}` (even) or `N_{2k+3}` (odd) lies in `⟨N_{2k+1}, e_{2k+4}⟩`.
pub fn next_level_containment<T: Real>(
    u: &TowerCache<T>,
    w: &TowerCache<T>,
    k: usize,
    parity: Parity,
    tol: &Tolerance<T>,
) -> Result<AlgebraComparison<T>> {
    let n = u.n();
    let target_gens = n_generators(u, w, k + 1, parity)?;
    let legs = target_gens[0].legs().to_vec();
    let order = target_gens[0].order();
    let mut gens = Vec::new();
    for g in n_generators(u, w, k, Parity::Odd)? {
        gens.push(embed_left(&g, n, order)?.with_legs(legs.clone())?);
    }
    gens.push(embed_left(&jones_projection::<T>(2 * k + 4, n)?, n, order)?.with_legs(legs.clone())?);
    let ambient = generate_algebra(legs.clone(), &gens, tol)?;
    let target = generate_algebra(legs, &target_gens, tol)?;
    Ok(AlgebraComparison {
        holds: algebra_contained(&target, &ambient, tol)?,
        left_dim: target.dim(),
        right_dim: ambient.dim(),
        residual: worst_membership(&target, &ambient),
    })
}

/// `Ad_{V_k W_k}(I^{(k+1)} ⊗ y_s)` against the rearranged tensor product, where
/// `y_s = x_{k+s+1} ⊗ … ⊗ x_1` and `factors[j] = x_{j+1}`.
///
/// The expected side is assembled by `kron` from the factors in the order
/// `x_{k+1} ⊗ … ⊗ x_1 ⊗ x_{k+s+1} ⊗ … ⊗ x_{k+3} ⊗ I ⊗ I^{(k)} ⊗ x_{k+2}`.
pub fn leg_rearrangement_residual<T: Real>(
    factors: &[LeggedMatrix<T>],
    k: usize,
    s: usize,
    w: &LeggedMatrix<T>,
    v: &LeggedMatrix<T>,
) -> Result<T> {
    if s == 0 || factors.len() != k + s + 1 {
        return Err(Error::InvalidArgument(format!(
            "need k+s+1 = {} factors with s ≥ 1, got {} (s = {s})",
            k + s + 1,
            factors.len()
        )));
    }
    let n = factors[0].order();
    let x = |i: usize| factors[i - 1].merged();
    let y: Vec<LeggedMatrix<T>> = (1..=k + s + 1).rev().map(x).collect();
    let lifted = pad_left(&kron_all(&y), n, k + 1);
    let conj = v * w;
    if conj.order() != lifted.order() {
        return Err(Error::OrderMismatch {
            left: conj.order(),
            right: lifted.order(),
        });
    }
    let actual = conj.conjugate(&lifted.clone().with_legs(conj.legs().to_vec())?);
    let id = LeggedMatrix::identity(vec![n]);
    let mut expected: Vec<LeggedMatrix<T>> = (1..=k + 1).rev().map(x).collect();
    expected.extend((k + 3..=k + s + 1).rev().map(x));
    expected.extend((0..k + 1).map(|_| id.clone()));
    expected.push(x(k + 2));
    let expected = kron_all(&expected).with_legs(conj.legs().to_vec())?;
    Ok(actual.distance(&expected))
}

/// Swaps for [`leg_rearrangement_residual`] on `2k+s+2` legs of size `n`.
pub fn leg_rearrangement_swaps<T: Real>(n: usize, k: usize, s: usize) -> (LeggedMatrix<T>, LeggedMatrix<T>) {
    (block_swap_w(n, k, s), leg_swap_v(n, k, s))
}

/// Nearest `r` with `z ≈ e^{2πi r/n}`, and the distance to that root.
pub fn nearest_root<T: Real>(z: num_complex::Complex<T>, n: usize) -> (usize, T) {
    let angle = to_f64(z.arg()).rem_euclid(TAU);
    let r = ((angle / TAU * n as f64).round() as usize) % n;
    let root = crate::scalar::root_of_unity::<T>(r as i64, n);
    (r, (z - root).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::fourier;
    use crate::random::{ginibre, seeded};
    use crate::scalar::c;

    type M = LeggedMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn tower(n: usize) -> TowerCache<f64> {
        TowerCache::new(&fourier(n).unwrap(), &tol()).unwrap()
    }

    #[test]
    fn clock_shift_identities_hold_for_fourier() {
        for n in 2..6 {
            assert!(clock_shift_residual(&fourier::<f64>(n).unwrap()) < 1e-12);
        }
        let mut f = fourier::<f64>(3).unwrap().into_data();
        f[4] *= c(0.0, 1.0);
        assert!(clock_shift_residual(&M::new(vec![3], f).unwrap()) > 1e-3);
    }

    #[test]
    fn clock_becomes_shift() {
        for n in [2, 3] {
            for k in 0..2 {
                assert!(clock_to_shift_residual(&tower(n), k).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn clock_image_is_twisted_clock() {
        for n in [2, 3] {
            let t = tower(n);
            for k in 0..2 {
                let form = diagonal_form(&t, &t, k).unwrap();
                assert!(form.off_diagonal < 1e-12);
                assert!(form.fibre_residual < 1e-12);
                assert!(form.last_leg_only);
            }
        }
        // n = 2, k = 0: diag(1, −1, −1, 1)
        let t = tower(2);
        let d = clock_image(&t, &t, 0).unwrap().diagonal_entries();
        let expect = [1.0, -1.0, -1.0, 1.0];
        for (z, e) in d.iter().zip(expect) {
            assert!((z - c(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn basic_construction_step_holds() {
        for n in [2, 3] {
            let t = tower(n);
            let r = basic_construction_step(&t, &t, 0, &tol()).unwrap();
            assert!(r.holds, "{r:?}");
            assert_eq!(r.left_dim, n * n);
        }
    }

    #[test]
    fn rearrangement_matches_kron_assembly() {
        let mut rng = seeded(5);
        for k in 0..2 {
            for s in 1..3 {
                let factors: Vec<M> = (0..k + s + 1).map(|_| ginibre(2, &mut rng)).collect();
                let (w, v) = leg_rearrangement_swaps::<f64>(2, k, s);
                assert!(leg_rearrangement_residual(&factors, k, s, &w, &v).unwrap() < 1e-12);
                let wrong = leg_rearrangement_residual(&factors, k, s, &w, &M::identity(v.legs().to_vec())).unwrap();
                assert!(wrong > 1e-3);
            }
        }
    }

    #[test]
    fn roots() {
        let (r, d) = nearest_root(crate::scalar::root_of_unity::<f64>(2, 3), 3);
        assert_eq!(r, 2);
        assert!(d < 1e-15);
    }
}
