//! Finite-dimensional *-subalgebras of `M_N` represented by orthonormal bases
//! under the normalized trace inner product `⟨a, b⟩ = tr(a* b) / N`.
//!
//! Orthogonal projection onto such a basis is the trace-preserving
//! conditional expectation onto the algebra.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, ColMatrix, RowCompressor};
use crate::scalar::{count, Real};
use crate::tensor::{kron, LeggedMatrix, Tolerance};

#[derive(Clone, Debug)]
pub struct AlgebraBasis<T> {
    legs: Vec<usize>,
    ambient_order: usize,
    basis: Vec<LeggedMatrix<T>>,
    /// Smallest kept over largest dropped singular value of the nullspace
    /// problem that produced this basis; infinite for span-built algebras.
    spectral_gap: T,
}

impl<T: Real> AlgebraBasis<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_order(&self) -> usize {
        self.ambient_order
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn basis(&self) -> &[LeggedMatrix<T>] {
        &self.basis
    }

    pub fn spectral_gap(&self) -> T {
        self.spectral_gap
    }

    /// Scalars `ℂ·I`.
    pub fn scalars(legs: Vec<usize>) -> Self {
        let id = LeggedMatrix::identity(legs.clone());
        Self {
            ambient_order: id.order(),
            legs,
            basis: vec![id],
            spectral_gap: T::infinity(),
        }
    }

    /// Full matrix algebra spanned by normalized matrix units.
    pub fn full(legs: Vec<usize>) -> Self {
        let order: usize = legs.iter().product();
        let scale = count::<T>(order).sqrt();
        let basis = (0..order * order)
            .map(|idx| {
                LeggedMatrix::from_fn(legs.clone(), |r, c| {
                    if r * order + c == idx {
                        Complex::new(scale, T::zero())
                    } else {
                        Complex::zero()
                    }
                })
            })
            .collect();
        Self {
            legs,
            ambient_order: order,
            basis,
            spectral_gap: T::infinity(),
        }
    }

    /// Diagonal matrices `Δ_N`.
    pub fn diagonal(legs: Vec<usize>) -> Self {
        let order: usize = legs.iter().product();
        let scale = count::<T>(order).sqrt();
        let basis = (0..order)
            .map(|i| {
                LeggedMatrix::from_fn(legs.clone(), |r, c| {
                    if r == i && c == i {
                        Complex::new(scale, T::zero())
                    } else {
                        Complex::zero()
                    }
                })
            })
            .collect();
        Self {
            legs,
            ambient_order: order,
            basis,
            spectral_gap: T::infinity(),
        }
    }

    /// Whether the identity lies in the span.
    pub fn contains_identity(&self, tol: &Tolerance<T>) -> bool {
        self.contains(&LeggedMatrix::identity(self.legs.clone()), tol)
    }

    /// Orthogonal projection of `x` onto the span (trace-preserving conditional expectation).
    pub fn project(&self, x: &LeggedMatrix<T>) -> LeggedMatrix<T> {
        let mut out = LeggedMatrix::zeros(self.legs.clone());
        for b in &self.basis {
            out = &out + &b.scale(b.inner(x));
        }
        out
    }

    /// Normalized distance from `x` to the span.
    pub fn membership_residual(&self, x: &LeggedMatrix<T>) -> T {
        x.distance(&self.project(x))
    }

    pub fn contains(&self, x: &LeggedMatrix<T>, tol: &Tolerance<T>) -> bool {
        self.membership_residual(x) <= tol.rank_eps * T::one().max(x.normalized_norm())
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { Complex::one() } else { Complex::zero() };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }

    /// Largest distance of a pairwise product or adjoint from the span.
    pub fn closure_residual(&self) -> T {
        let mut worst = T::zero();
        for a in &self.basis {
            worst = worst.max(self.membership_residual(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.membership_residual(&(a * b)));
            }
        }
        worst
    }
}

/// Appends `candidate` to an orthonormal list unless it already lies in the span.
/// Two Gram-Schmidt passes keep orthogonality at working precision.
fn extend_orthonormal<T: Real>(basis: &mut Vec<LeggedMatrix<T>>, candidate: &LeggedMatrix<T>, rank_eps: T) -> bool {
    let scale = candidate.normalized_norm();
    if scale == T::zero() {
        return false;
    }
    let mut r = candidate.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            r = &r - &b.scale(b.inner(&r));
        }
    }
    let norm = r.normalized_norm();
    if norm <= rank_eps * T::one().max(scale) {
        return false;
    }
    basis.push(r.scale_real(T::one() / norm));
    true
}

fn check_orders<T: Real>(gens: &[LeggedMatrix<T>]) -> Result<()> {
    if let Some(first) = gens.first() {
        for g in gens {
            if g.order() != first.order() {
                return Err(Error::OrderMismatch {
                    left: first.order(),
                    right: g.order(),
                });
            }
        }
    }
    Ok(())
}

/// Unital *-algebra generated by `gens` inside `M_N` with the given legs.
///
/// Seeds the span with `I`, the generators and their adjoints, then keeps
/// left-multiplying newly added basis elements by generators and adjoints
/// until no product leaves the span. Every word in the generators is reached
/// this way, so the final span is the generated algebra.
pub fn generate_algebra<T: Real>(legs: Vec<usize>, gens: &[LeggedMatrix<T>], tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    check_orders(gens)?;
    let order: usize = legs.iter().product();
    if let Some(g) = gens.first() {
        if g.order() != order {
            return Err(Error::OrderMismatch { left: order, right: g.order() });
        }
    }
    let mut letters: Vec<LeggedMatrix<T>> = Vec::with_capacity(2 * gens.len());
    for g in gens {
        let g = g.clone().with_legs(legs.clone())?;
        let adj = g.adjoint();
        if adj.distance(&g) > T::zero() {
            letters.push(adj);
        }
        letters.push(g);
    }
    let mut basis = Vec::new();
    extend_orthonormal(&mut basis, &LeggedMatrix::identity(legs.clone()), tol.rank_eps);
    let mut frontier = Vec::new();
    for g in &letters {
        if extend_orthonormal(&mut basis, g, tol.rank_eps) {
            frontier.push(basis.len() - 1);
        }
    }
    let limit = order * order + 1;
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        if rounds > limit {
            return Err(Error::NoStabilization { rounds });
        }
        let mut next = Vec::new();
        for &idx in &frontier {
            for g in &letters {
                let product = g * &basis[idx];
                if extend_orthonormal(&mut basis, &product, tol.rank_eps) {
                    next.push(basis.len() - 1);
                }
            }
        }
        frontier = next;
    }
    Ok(AlgebraBasis {
        legs,
        ambient_order: order,
        basis,
        spectral_gap: T::infinity(),
    })
}

/// Column of the commutator map `X ↦ X·g − g·X` evaluated at `X = x`.
fn commutator_column<T: Real>(x: &LeggedMatrix<T>, gens: &[LeggedMatrix<T>]) -> Vec<Complex<T>> {
    let mut col = Vec::with_capacity(gens.len() * x.order() * x.order());
    for g in gens {
        let c = &(x * g) - &(g * x);
        col.extend_from_slice(c.data());
    }
    col
}

/// Kernel of `X ↦ ([X, g])_g` over the span of `candidates`, as coefficient vectors.
fn commuting_combinations<T: Real>(
    candidates: &[LeggedMatrix<T>],
    gens: &[LeggedMatrix<T>],
    tol: &Tolerance<T>,
) -> crate::linalg::Nullspace<T> {
    let per_gen = candidates.first().map_or(0, |c| c.order() * c.order());
    let mut comp = RowCompressor::new(candidates.len());
    // one generator at a time keeps the stacked block small
    for g in gens {
        let cols = candidates.iter().map(|x| commutator_column(x, std::slice::from_ref(g)));
        comp.push(ColMatrix::from_columns(per_gen, cols));
    }
    nullspace(&comp.finish(), tol.rank_eps)
}

fn combine<T: Real>(legs: &[usize], candidates: &[LeggedMatrix<T>], coeffs: &[Complex<T>]) -> LeggedMatrix<T> {
    let mut out = LeggedMatrix::zeros(legs.to_vec());
    for (x, &c) in candidates.iter().zip(coeffs) {
        if !c.is_zero() {
            out = &out + &x.scale(c);
        }
    }
    out
}

/// Builds an orthonormal basis from kernel vectors over an orthonormal
/// candidate family (combinations of orthonormal elements stay orthonormal).
fn from_kernel<T: Real>(legs: Vec<usize>, candidates: &[LeggedMatrix<T>], ns: crate::linalg::Nullspace<T>, tol: &Tolerance<T>) -> AlgebraBasis<T> {
    let mut basis = Vec::new();
    for v in &ns.vectors {
        extend_orthonormal(&mut basis, &combine(&legs, candidates, v), tol.rank_eps);
    }
    AlgebraBasis {
        ambient_order: legs.iter().product(),
        legs,
        basis,
        spectral_gap: ns.spectral_gap,
    }
}

/// `A' = {X ∈ M_N : [X, a] = 0 for all a ∈ A}` over the full ambient.
/// The nullspace problem has `N²` unknowns.
pub fn commutant<T: Real>(a: &AlgebraBasis<T>, tol: &Tolerance<T>) -> AlgebraBasis<T> {
    let full = AlgebraBasis::full(a.legs.clone());
    let ns = commuting_combinations(&full.basis, &a.basis, tol);
    from_kernel(a.legs.clone(), &full.basis, ns, tol)
}

/// `Z(A) = A ∩ A'`, parametrized over the basis of `A`.
pub fn center<T: Real>(a: &AlgebraBasis<T>, tol: &Tolerance<T>) -> AlgebraBasis<T> {
    let ns = commuting_combinations(&a.basis, &a.basis, tol);
    from_kernel(a.legs.clone(), &a.basis, ns, tol)
}

/// Elements `I_n ⊗ Y`, `Y ∈ M_m`, commuting with every generator (and its
/// adjoint). Parametrized directly over `Y`, so there are `m²` unknowns.
pub fn relative_commutant<T: Real>(gens: &[LeggedMatrix<T>], n: usize, m: usize, tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    check_orders(gens)?;
    let order = n * m;
    for g in gens {
        if g.order() != order {
            return Err(Error::SplitMismatch { n, k: m, order: g.order() });
        }
    }
    let mut letters = Vec::new();
    for g in gens {
        let adj = g.adjoint();
        if adj.distance(g) > tol.residual_eps {
            letters.push(adj);
        }
        letters.push(g.clone());
    }
    let inner = AlgebraBasis::<T>::full(vec![m]);
    let id_n = LeggedMatrix::identity(vec![n]);
    let candidates: Vec<LeggedMatrix<T>> = inner.basis.iter().map(|y| kron(&id_n, y)).collect();
    let ns = commuting_combinations(&candidates, &letters, tol);
    Ok(from_kernel(vec![n, m], &candidates, ns, tol))
}

/// Same span and dimension, decided by membership at `rank_eps`.
pub fn algebra_equal<T: Real>(a: &AlgebraBasis<T>, b: &AlgebraBasis<T>, tol: &Tolerance<T>) -> Result<bool> {
    if a.ambient_order != b.ambient_order {
        return Err(Error::AmbientMismatch {
            left: a.ambient_order,
            right: b.ambient_order,
        });
    }
    Ok(a.dim() == b.dim() && a.basis.iter().all(|x| b.contains(x, tol)))
}

/// Whether every basis element of `a` lies in `b`.
pub fn algebra_contained<T: Real>(a: &AlgebraBasis<T>, b: &AlgebraBasis<T>, tol: &Tolerance<T>) -> Result<bool> {
    if a.ambient_order != b.ambient_order {
        return Err(Error::AmbientMismatch {
            left: a.ambient_order,
            right: b.ambient_order,
        });
    }
    Ok(a.basis.iter().all(|x| b.contains(x, tol)))
}

/// `p` is a minimal projection of `a`: a self-adjoint idempotent in `a` with
/// `p·a·p` one-dimensional.
pub fn is_minimal_projection<T: Real>(a: &AlgebraBasis<T>, p: &LeggedMatrix<T>, tol: &Tolerance<T>) -> bool {
    if p.order() != a.ambient_order || p.normalized_norm() <= tol.rank_eps {
        return false;
    }
    if (p * p).distance(p) > tol.residual_eps || p.adjoint().distance(p) > tol.residual_eps || !a.contains(p, tol) {
        return false;
    }
    let mut corner = Vec::new();
    for b in &a.basis {
        extend_orthonormal(&mut corner, &(&(p * b) * p), tol.rank_eps);
        if corner.len() > 1 {
            return false;
        }
    }
    corner.len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{clock, shift};
    use crate::random::{haar_unitary, seeded};
    use crate::tensor::pad_right;

    type M = LeggedMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn generated_dimensions() {
        assert_eq!(generate_algebra::<f64>(vec![3], &[], &tol()).unwrap().dim(), 1);
        assert_eq!(generate_algebra(vec![3], &[clock::<f64>(3, 1)], &tol()).unwrap().dim(), 3);
        let a = generate_algebra(vec![2], &[shift::<f64>(2, 1), clock(2, 1)], &tol()).unwrap();
        assert_eq!(a.dim(), 4);
        assert!(a.gram_deviation() < 1e-12);
        assert!(a.closure_residual() < 1e-12);
        assert!(a.contains_identity(&tol()));
    }

    #[test]
    fn generation_rejects_mixed_orders() {
        assert!(generate_algebra(vec![2], &[M::identity(vec![2]), M::identity(vec![3])], &tol()).is_err());
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant(&AlgebraBasis::<f64>::scalars(vec![3]), &tol()).dim(), 9);
        assert_eq!(commutant(&AlgebraBasis::<f64>::full(vec![3]), &tol()).dim(), 1);
        let delta = AlgebraBasis::<f64>::diagonal(vec![4]);
        let c = commutant(&delta, &tol());
        assert!(algebra_equal(&c, &delta, &tol()).unwrap());
    }

    #[test]
    fn algebra_equality() {
        let delta = AlgebraBasis::<f64>::diagonal(vec![2]);
        assert!(algebra_equal(&delta, &delta, &tol()).unwrap());
        let shifted = generate_algebra(vec![2], &[shift::<f64>(2, 1)], &tol()).unwrap();
        assert_eq!(shifted.dim(), 2);
        assert!(!algebra_equal(&delta, &shifted, &tol()).unwrap());
        assert!(algebra_equal(&delta, &AlgebraBasis::full(vec![3]), &tol()).is_err());
    }

    #[test]
    fn centers() {
        assert_eq!(center(&AlgebraBasis::<f64>::full(vec![3]), &tol()).dim(), 1);
        assert_eq!(center(&AlgebraBasis::<f64>::diagonal(vec![3]), &tol()).dim(), 3);
        // M_2 ⊗ Δ_2 has center I ⊗ Δ_2
        let gens = [
            pad_right(&shift::<f64>(2, 1), 2, 0),
            kron(&clock::<f64>(2, 1), &M::identity(vec![2])),
            kron(&M::identity(vec![2]), &clock::<f64>(2, 1)),
            kron(&shift::<f64>(2, 1), &M::identity(vec![2])),
        ];
        let a = generate_algebra(vec![2, 2], &gens[1..], &tol()).unwrap();
        assert_eq!(a.dim(), 8);
        assert_eq!(center(&a, &tol()).dim(), 2);
    }

    #[test]
    fn relative_commutant_of_left_factor() {
        // gens in M_2 ⊗ ℂ commute with every I ⊗ Y
        let g = kron(&shift::<f64>(2, 1), &M::identity(vec![3]));
        let rc = relative_commutant(&[g], 2, 3, &tol()).unwrap();
        assert_eq!(rc.dim(), 9);
        let g = kron(&M::identity(vec![2]), &clock::<f64>(3, 1));
        assert_eq!(relative_commutant(&[g], 2, 3, &tol()).unwrap().dim(), 3);
        assert!(relative_commutant(&[M::identity(vec![5])], 2, 3, &tol()).is_err());
    }

    #[test]
    fn double_commutant_of_conjugated_subalgebra() {
        let mut rng = seeded(4);
        let w = haar_unitary::<f64, _>(4, &mut rng).with_legs(vec![2, 2]).unwrap();
        let gens = [w.conjugate(&kron(&clock::<f64>(2, 1), &shift(2, 1))), w.conjugate(&kron(&M::identity(vec![2]), &clock(2, 1)))];
        let a = generate_algebra(vec![2, 2], &gens, &tol()).unwrap();
        let cc = commutant(&commutant(&a, &tol()), &tol());
        assert!(algebra_equal(&cc, &a, &tol()).unwrap());
    }

    #[test]
    fn minimal_projections() {
        let delta = AlgebraBasis::<f64>::diagonal(vec![3]);
        assert!(is_minimal_projection(&delta, &M::unit(3, 1, 1), &tol()));
        let two = &M::unit(3, 0, 0) + &M::unit(3, 1, 1);
        assert!(!is_minimal_projection(&delta, &two, &tol()));
        assert!(!is_minimal_projection(&delta, &M::unit(3, 0, 1), &tol()));
    }
}
