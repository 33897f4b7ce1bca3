//! Biunitarity and commuting-square verification.
//!
//! A unitary `m ∈ M_n ⊗ M_k` is biunitary when its block transpose is unitary
//! as well; equivalently the quadruple
//!
//! ```text
//! ℂ ⊗ M_k        ⊂  M_n ⊗ M_k
//!    ∪                  ∪
//!    ℂ          ⊂  Ad_m(M_n ⊗ ℂ)
//! ```
//!
//! is a commuting square. Both routes are implemented independently.

use num_complex::Complex;
use num_traits::Zero;

use crate::algebra::generate_algebra;
use crate::error::{Error, Result};
use crate::linalg::{svd, ColMatrix};
use crate::scalar::{count, to_f64, Real};
use crate::tensor::{block_transpose, cond_expect_adu_left, cond_expect_right, is_unitary, kron, LeggedMatrix, Tolerance};
use crate::tower::{n_generators, Parity, TowerCache};

/// Orders up to which the commuting-square test also applies both
/// conditional expectations to every matrix unit directly.
pub const DIRECT_PROBE_MAX_ORDER: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct SquareCheck<T> {
    pub name: String,
    pub pass: bool,
    pub residual: T,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareReport<T> {
    pub checks: Vec<SquareCheck<T>>,
    pub overall: bool,
}

impl<T: Real> SquareReport<T> {
    fn new() -> Self {
        Self {
            checks: Vec::new(),
            overall: true,
        }
    }

    fn push(&mut self, name: &str, pass: bool, residual: T, expected: impl Into<String>) {
        self.overall &= pass;
        self.checks.push(SquareCheck {
            name: name.to_string(),
            pass,
            residual,
            expected: expected.into(),
        });
    }

    fn push_residual(&mut self, name: &str, residual: T, tol: &Tolerance<T>, expected: &str) {
        self.push(name, tol.accepts(residual), residual, expected);
    }

    pub fn check(&self, name: &str) -> Option<&SquareCheck<T>> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest residual over all checks.
    pub fn max_residual(&self) -> T {
        self.checks.iter().fold(T::zero(), |acc, c| acc.max(c.residual))
    }
}

fn check_split<T: Real>(m: &LeggedMatrix<T>, (n, k): (usize, usize)) -> Result<()> {
    if n == 0 || k == 0 || n * k != m.order() {
        return Err(Error::SplitMismatch { n, k, order: m.order() });
    }
    Ok(())
}

/// `m` unitary and its block transpose unitary.
pub fn is_biunitary_blockwise<T: Real>(m: &LeggedMatrix<T>, split: (usize, usize), tol: &Tolerance<T>) -> Result<SquareReport<T>> {
    check_split(m, split)?;
    let mut report = SquareReport::new();
    let direct = is_unitary(m, tol);
    report.push("unitary", direct.pass, direct.residual, "m m* = I");
    let bt = is_unitary(&block_transpose(m, split)?, tol);
    report.push("block_transpose_unitary", bt.pass, bt.residual, "m̃ m̃* = I");
    Ok(report)
}

/// Overlaps `G[(c,d),(i,j)] = ⟨√k (I ⊗ E_cd), √n m (E_ij ⊗ I) m*⟩` between the
/// orthonormal matrix-unit bases of `ℂ ⊗ M_k` and `Ad_m(M_n ⊗ ℂ)`.
fn overlap_matrix<T: Real>(m: &LeggedMatrix<T>, (n, k): (usize, usize)) -> ColMatrix<T> {
    let order = n * k;
    let scale = T::one() / count::<T>(order).sqrt();
    let at = |alpha: usize, a: usize, i: usize, g: usize| m.get(alpha * k + a, i * k + g);
    let mut gram = ColMatrix::zeros(k * k, n * n);
    for c in 0..k {
        for d in 0..k {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Complex::zero();
                    for alpha in 0..n {
                        for g in 0..k {
                            acc = acc + at(alpha, c, i, g) * at(alpha, d, j, g).conj();
                        }
                    }
                    gram.set(c * k + d, i * n + j, acc * scale);
                }
            }
        }
    }
    gram
}

/// Commuting-square criterion.
///
/// With `E₁` onto `ℂ ⊗ M_k` and `E₂` onto `Ad_m(M_n ⊗ ℂ)` expressed in
/// orthonormal unit bases, `E₁E₂ = tr(·)I` on all of `M_{nk}` exactly when
/// the overlap matrix `G` equals `β α*`, where `β, α` are the coordinates of
/// `I`. The Frobenius residual of that identity is the operator residual over
/// the whole matrix-unit basis; `E₂E₁` uses `G*`. For small orders both
/// composites are also applied to every matrix unit. The intersection
/// dimension is the multiplicity of the singular value 1 of `G`.
pub fn is_biunitary_via_square<T: Real>(m: &LeggedMatrix<T>, split: (usize, usize), tol: &Tolerance<T>) -> Result<SquareReport<T>> {
    check_split(m, split)?;
    let unitary = is_unitary(m, tol);
    if !unitary.pass {
        return Err(Error::NotUnitary {
            residual: to_f64(unitary.residual),
        });
    }
    let (n, k) = split;
    let gram = overlap_matrix(m, split);
    let beta = |cd: usize| if cd / k == cd % k { T::one() / count::<T>(k).sqrt() } else { T::zero() };
    let alpha = |ij: usize| if ij / n == ij % n { T::one() / count::<T>(n).sqrt() } else { T::zero() };
    let mut sq = T::zero();
    for cd in 0..k * k {
        for ij in 0..n * n {
            sq = sq + (gram.get(cd, ij) - Complex::new(beta(cd) * alpha(ij), T::zero())).norm_sqr();
        }
    }
    let residual = sq.sqrt();
    let mut report = SquareReport::new();
    report.push_residual("e1e2_trace", residual, tol, "E₁E₂ = tr(·)I on all matrix units");
    // ‖G* − αβ*‖ = ‖G − βα*‖, kept as its own line so both composites are visible
    report.push_residual("e2e1_trace", residual, tol, "E₂E₁ = tr(·)I on all matrix units");

    if n * k <= DIRECT_PROBE_MAX_ORDER {
        let (e12, e21) = direct_probes(m, split, tol)?;
        report.push_residual("e1e2_trace_direct", e12, tol, "E₁E₂(E_ab) = tr(E_ab)I for each unit");
        report.push_residual("e2e1_trace_direct", e21, tol, "E₂E₁(E_ab) = tr(E_ab)I for each unit");
    }

    let sv = svd(&gram).singular_values;
    let threshold = T::one() - tol.rank_eps.sqrt();
    let dim = sv.iter().filter(|&&s| s >= threshold).count();
    let top = sv.first().copied().unwrap_or_else(T::zero);
    report.push(
        "intersection_trivial",
        dim == 1,
        (top - T::one()).abs(),
        format!("dim Ad_m(M_n⊗ℂ) ∩ (ℂ⊗M_k) = 1 (found {dim})"),
    );
    Ok(report)
}

fn direct_probes<T: Real>(m: &LeggedMatrix<T>, split: (usize, usize), tol: &Tolerance<T>) -> Result<(T, T)> {
    let order = m.order();
    let m = m.clone().with_legs(vec![split.0, split.1])?;
    let id = LeggedMatrix::identity(vec![split.0, split.1]);
    let (mut e12, mut e21) = (T::zero(), T::zero());
    for a in 0..order {
        for b in 0..order {
            let x = LeggedMatrix::unit(order, a, b).with_legs(vec![split.0, split.1])?;
            let target = id.scale(x.normalized_trace());
            let one_two = cond_expect_right(&cond_expect_adu_left(&x, &m, split, tol)?, split)?;
            let two_one = cond_expect_adu_left(&cond_expect_right(&x, split)?, &m, split, tol)?;
            e12 = e12.max(one_two.distance(&target));
            e21 = e21.max(two_one.distance(&target));
        }
    }
    Ok((e12, e21))
}

/// Runs both criteria and records whether their verdicts agree.
pub fn is_biunitary_both<T: Real>(m: &LeggedMatrix<T>, split: (usize, usize), tol: &Tolerance<T>) -> Result<SquareReport<T>> {
    let blockwise = is_biunitary_blockwise(m, split, tol)?;
    let mut report = SquareReport::new();
    let square = if blockwise.check("unitary").is_some_and(|c| c.pass) {
        Some(is_biunitary_via_square(m, split, tol)?)
    } else {
        None
    };
    let square_pass = square.as_ref().is_some_and(|s| s.overall);
    for c in blockwise.checks {
        report.push(&format!("blockwise.{}", c.name), c.pass, c.residual, c.expected);
    }
    if let Some(s) = square {
        for c in s.checks {
            report.push(&format!("square.{}", c.name), c.pass, c.residual, c.expected);
        }
    }
    let agree = blockwise.overall == square_pass;
    report.checks.push(SquareCheck {
        name: "criteria_agree".to_string(),
        pass: agree,
        residual: T::zero(),
        expected: "blockwise and commuting-square verdicts coincide".to_string(),
    });
    report.overall = blockwise.overall && square_pass && agree;
    Ok(report)
}

/// Largest entry of `x` outside the block diagonal of its leading leg.
fn off_leading_diagonal<T: Real>(x: &LeggedMatrix<T>, n: usize) -> T {
    let m = x.order() / n;
    let mut worst = T::zero();
    for r in 0..x.order() {
        for c in 0..x.order() {
            if r / m != c / m {
                worst = worst.max(x.get(r, c).norm());
            }
        }
    }
    worst
}

/// Level-`k` square
///
/// ```text
/// ℂ ⊗ M^{(k+1)}  ⊂  Δ_n ⊗ M^{(k+1)}
///      ∪                  ∪
///      ℂ          ⊂     N_{2k}
/// ```
///
/// Checks that `N_{2k}` sits inside `Δ_n ⊗ M^{(k+1)}`, that both conditional
/// expectations collapse the opposite corner to scalars, and non-degeneracy:
/// products `N_{2k}·(ℂ ⊗ M^{(k+1)})` span `Δ_n ⊗ M^{(k+1)}`.
///
/// Writing the generator projections as `g_i = Σ_α E_αα ⊗ g_i^α`, the span of
/// `g_i (I ⊗ Y)` is `m · rank Γ` dimensional with `Γ[(α,t),(i,a)] = g_i^α[t,a]`,
/// so non-degeneracy is `rank Γ = n·m`.
pub fn verify_square_ik<T: Real>(u: &LeggedMatrix<T>, w: &LeggedMatrix<T>, k: usize, tol: &Tolerance<T>) -> Result<SquareReport<T>> {
    if u.order() != w.order() {
        return Err(Error::OrderMismatch {
            left: u.order(),
            right: w.order(),
        });
    }
    let level = 2 * k + 2;
    let uc = TowerCache::with_max_level(u, tol, level)?;
    let wc = TowerCache::with_max_level(w, tol, level)?;
    verify_square_ik_towers(&uc, &wc, k, tol)
}

/// [`verify_square_ik`] on prebuilt towers.
pub fn verify_square_ik_towers<T: Real>(uc: &TowerCache<T>, wc: &TowerCache<T>, k: usize, tol: &Tolerance<T>) -> Result<SquareReport<T>> {
    let n = uc.n();
    let gens = n_generators(uc, wc, k, Parity::Even)?;
    let order = gens[0].order();
    let m = order / n;
    let legs = gens[0].legs().to_vec();
    let mut report = SquareReport::new();

    let containment = gens.iter().fold(T::zero(), |acc, g| acc.max(off_leading_diagonal(g, n)));
    report.push_residual("containment", containment, tol, "N_{2k} ⊂ Δ_n ⊗ M^{(k+1)}");

    let algebra = generate_algebra(legs.clone(), &gens, tol)?;
    report.push("n_dimension", algebra.dim() == n, T::zero(), format!("dim N_{{2k}} = {n} (found {})", algebra.dim()));

    let id_n = LeggedMatrix::identity(vec![n]);
    let id = LeggedMatrix::identity(legs.clone());
    let mut onto_n = T::zero();
    for a in 0..m {
        for b in 0..m {
            let x = kron(&id_n, &LeggedMatrix::unit(m, a, b)).with_legs(legs.clone())?;
            let target = id.scale(x.normalized_trace());
            onto_n = onto_n.max(algebra.project(&x).distance(&target));
        }
    }
    report.push_residual("expectation_onto_n", onto_n, tol, "E_N(I ⊗ E_ab) = tr(E_ab)I");

    let mut onto_right = T::zero();
    for b in algebra.basis() {
        let target = id.scale(b.normalized_trace());
        onto_right = onto_right.max(cond_expect_right(b, (n, m))?.with_legs(legs.clone())?.distance(&target));
    }
    report.push_residual("expectation_onto_right", onto_right, tol, "E_{ℂ⊗M}(x) = tr(x)I for x ∈ N_{2k}");

    let scale = T::one() / count::<T>(order).sqrt();
    let mut gamma = ColMatrix::zeros(n * m, n * m);
    for (i, g) in gens.iter().enumerate() {
        for alpha in 0..n {
            for t in 0..m {
                for a in 0..m {
                    gamma.set(alpha * m + t, i * m + a, g.get(alpha * m + t, alpha * m + a) * scale);
                }
            }
        }
    }
    let sv = svd(&gamma).singular_values;
    let top = sv.first().copied().unwrap_or_else(T::zero);
    let rank = sv.iter().filter(|&&s| s > tol.rank_eps * top).count();
    let smallest = sv.last().copied().unwrap_or_else(T::zero);
    report.push(
        "non_degenerate",
        rank == n * m,
        smallest,
        format!("span N_{{2k}}·(ℂ⊗M^{{(k+1)}}) has dim {} (found {})", n * m * m, rank * m),
    );
    Ok(report)
}

/// Index `‖Λ‖² = n^{2(k+1)}` of the level-`k` square, where the inclusion
/// matrix of `ℂ ⊂ M^{(k+1)}` is the `1×1` matrix `Λ = [n^{k+1}]`.
pub fn square_index(n: u64, k: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("square index needs n ≥ 1".into()));
    }
    let overflow = || Error::InvalidArgument(format!("index n^(2(k+1)) overflows for n={n}, k={k}"));
    let lambda = k.checked_add(1).and_then(|e| n.checked_pow(e)).ok_or_else(overflow)?;
    lambda.checked_mul(lambda).ok_or_else(overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::fourier;
    use crate::random::{haar_unitary, seeded};
    use crate::tower::{biunitary_bu, swap_v};

    type M = LeggedMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn bu(n: usize, level: usize) -> M {
        let f = fourier::<f64>(n).unwrap();
        let c = TowerCache::new(&f, &tol()).unwrap();
        biunitary_bu(&c, &c, level).unwrap()
    }

    #[test]
    fn identity_passes_both() {
        let id = M::identity(vec![6]);
        assert!(is_biunitary_blockwise(&id, (2, 3), &tol()).unwrap().overall);
        assert!(is_biunitary_via_square(&id, (2, 3), &tol()).unwrap().overall);
    }

    #[test]
    fn swap_fails_both() {
        let v = swap_v::<f64>(2, 0);
        let block = is_biunitary_blockwise(&v, (2, 2), &tol()).unwrap();
        assert!(!block.overall);
        assert!(block.check("unitary").unwrap().pass);
        let sq = is_biunitary_via_square(&v, (2, 2), &tol()).unwrap();
        assert!(!sq.overall);
        assert!(!sq.check("e1e2_trace_direct").unwrap().pass);
    }

    #[test]
    fn bu_fourier_passes_both() {
        for (n, level) in [(2, 0), (2, 1), (3, 0), (3, 1)] {
            let m = bu(n, level);
            let split = (n, n.pow(level as u32 + 1));
            let r = is_biunitary_both(&m, split, &tol()).unwrap();
            assert!(r.overall, "n={n} level={level}: {r:?}");
            assert!(r.max_residual() < 1e-9);
        }
    }

    #[test]
    fn split_mismatch_is_error() {
        assert!(is_biunitary_blockwise(&M::identity(vec![6]), (4, 2), &tol()).is_err());
        let not_unitary = M::identity(vec![4]).scale_real(2.0);
        assert!(matches!(
            is_biunitary_via_square(&not_unitary, (2, 2), &tol()),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn gram_residual_matches_direct_probes() {
        let mut rng = seeded(21);
        for _ in 0..5 {
            let m = haar_unitary::<f64, _>(6, &mut rng);
            let r = is_biunitary_via_square(&m, (2, 3), &tol()).unwrap();
            assert!(!r.overall);
            assert_eq!(r.check("e1e2_trace").unwrap().pass, r.check("e1e2_trace_direct").unwrap().pass);
        }
    }

    #[test]
    fn level_square_fourier() {
        for (n, k) in [(2, 0), (2, 1), (3, 0), (3, 1)] {
            let f = fourier::<f64>(n).unwrap();
            let r = verify_square_ik(&f, &f, k, &tol()).unwrap();
            assert!(r.overall, "n={n} k={k}: {r:?}");
        }
    }

    #[test]
    fn index_formula() {
        assert_eq!(square_index(2, 0).unwrap(), 4);
        assert_eq!(square_index(3, 1).unwrap(), 81);
        assert_eq!(square_index(1, 7).unwrap(), 1);
        assert!(square_index(0, 1).is_err());
        assert!(square_index(1 << 20, 3).is_err());
    }
}
