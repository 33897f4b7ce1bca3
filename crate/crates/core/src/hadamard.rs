//! Complex Hadamard matrices: Fourier matrices, clock and shift, dephasing,
//! fine equivalence `v = u·P·D`, exhaustive Hadamard-equivalence search, and
//! permutation / projective orders.

use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{count, root_of_unity, to_f64, Real};
use crate::tensor::{is_unitary, LeggedMatrix, Tolerance};

/// Default largest order for which `hadamard_equivalent` will search.
pub const DEFAULT_MAX_SEARCH_ORDER: usize = 6;

/// `F_n[i][j] = exp(2πi·ij/n)/√n`.
pub fn fourier<T: Real>(n: usize) -> Result<LeggedMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("fourier order must be positive".into()));
    }
    let scale = T::one() / count::<T>(n).sqrt();
    Ok(LeggedMatrix::from_fn(vec![n], |i, j| {
        root_of_unity::<T>((i * j % n) as i64, n) * scale
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardCheck<T> {
    pub pass: bool,
    pub unitarity_residual: T,
    /// Largest `| |m_ij| − 1/√n |`.
    pub modulus_deviation: T,
}

pub fn is_complex_hadamard<T: Real>(m: &LeggedMatrix<T>, tol: &Tolerance<T>) -> HadamardCheck<T> {
    let target = T::one() / count::<T>(m.order()).sqrt();
    let modulus_deviation = m.data().iter().fold(T::zero(), |acc, z| acc.max((z.norm() - target).abs()));
    let unitary = is_unitary(m, tol);
    HadamardCheck {
        pass: unitary.pass && modulus_deviation <= tol.residual_eps,
        unitarity_residual: unitary.residual,
        modulus_deviation,
    }
}

pub(crate) fn require_hadamard<T: Real>(m: &LeggedMatrix<T>, tol: &Tolerance<T>) -> Result<()> {
    let check = is_complex_hadamard(m, tol);
    if check.pass {
        Ok(())
    } else {
        Err(Error::NotHadamard(format!(
            "unitarity residual {:e}, modulus deviation {:e}",
            to_f64(check.unitarity_residual),
            to_f64(check.modulus_deviation)
        )))
    }
}

/// Clock matrix `𝒟_k = diag(1, ω^k, …, ω^{(n−1)k})`, `ω = e^{2πi/n}`.
pub fn clock<T: Real>(n: usize, k: usize) -> LeggedMatrix<T> {
    assert!(n > 0, "clock order must be positive");
    let entries: Vec<Complex<T>> = (0..n).map(|j| root_of_unity((j * k % n) as i64, n)).collect();
    LeggedMatrix::diagonal(&entries)
}

/// Shift matrix `σ_k = σ_1^k` with `σ_1 = Σ_i E_{i,i+1}` (indices mod n),
/// so `σ_1 e_j = e_{j−1}`.
pub fn shift<T: Real>(n: usize, k: usize) -> LeggedMatrix<T> {
    assert!(n > 0, "shift order must be positive");
    let images: Vec<usize> = (0..n).map(|j| (j + n - k % n) % n).collect();
    LeggedMatrix::permutation(&images).expect("cyclic shift is a bijection")
}

/// Result of dephasing: `matrix = d_left · m · d_right` with first row and
/// column equal to `1/√n`.
#[derive(Clone, Debug)]
pub struct Dephased<T> {
    pub matrix: LeggedMatrix<T>,
    pub d_left: LeggedMatrix<T>,
    pub d_right: LeggedMatrix<T>,
}

fn unit_phase<T: Real>(z: Complex<T>) -> Complex<T> {
    z / z.norm()
}

pub fn dephase<T: Real>(m: &LeggedMatrix<T>, tol: &Tolerance<T>) -> Result<Dephased<T>> {
    require_hadamard(m, tol)?;
    let n = m.order();
    let left: Vec<Complex<T>> = (0..n).map(|i| unit_phase(m.get(i, 0)).conj()).collect();
    let right: Vec<Complex<T>> = (0..n)
        .map(|j| unit_phase(left[0] * m.get(0, j)).conj())
        .collect();
    let matrix = LeggedMatrix::from_fn(m.legs().to_vec(), |i, j| left[i] * m.get(i, j) * right[j]);
    Ok(Dephased {
        matrix,
        d_left: LeggedMatrix::diagonal(&left),
        d_right: LeggedMatrix::diagonal(&right),
    })
}

/// Column images of a permutation matrix: `images[j]` is the row holding
/// the 1 in column `j`. Entries must be within `eps` of 0 or 1.
pub fn permutation_images<T: Real>(p: &LeggedMatrix<T>, eps: T) -> Result<Vec<usize>> {
    let n = p.order();
    let mut images = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for j in 0..n {
        let mut hit = None;
        for i in 0..n {
            let z = p.get(i, j);
            if (z - Complex::one()).norm() <= eps {
                if hit.is_some() {
                    return Err(Error::NotPermutation);
                }
                hit = Some(i);
            } else if z.norm() > eps {
                return Err(Error::NotPermutation);
            }
        }
        let i = hit.ok_or(Error::NotPermutation)?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::NotPermutation);
        }
        images.push(i);
    }
    Ok(images)
}

pub(crate) fn require_diagonal_unitary<T: Real>(d: &LeggedMatrix<T>, eps: T) -> Result<()> {
    let n = d.order();
    for i in 0..n {
        for j in 0..n {
            let z = d.get(i, j);
            let bad = if i == j { (z.norm() - T::one()).abs() > eps } else { z.norm() > eps };
            if bad {
                return Err(Error::NotDiagonalUnitary);
            }
        }
    }
    Ok(())
}

/// Decomposition `x = P·D` of a complex permutation matrix.
#[derive(Clone, Debug)]
pub struct ComplexPermutation<T> {
    pub p: LeggedMatrix<T>,
    pub d: LeggedMatrix<T>,
}

/// Recognizes a complex permutation matrix: in every column exactly one entry
/// of modulus at least `1 − eps`, all others at most `eps`, rows distinct.
pub fn complex_permutation<T: Real>(x: &LeggedMatrix<T>, eps: T) -> Option<ComplexPermutation<T>> {
    let n = x.order();
    let mut images = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for j in 0..n {
        let mut hit = None;
        for i in 0..n {
            let a = x.get(i, j).norm();
            if a >= T::one() - eps {
                if hit.is_some() {
                    return None;
                }
                hit = Some(i);
            } else if a > eps {
                return None;
            }
        }
        let i = hit?;
        if std::mem::replace(&mut seen[i], true) {
            return None;
        }
        images.push(i);
        phases.push(x.get(i, j));
    }
    Some(ComplexPermutation {
        p: LeggedMatrix::permutation(&images).ok()?,
        d: LeggedMatrix::diagonal(&phases),
    })
}

/// Fine equivalence `u ∼ v` iff `v = u·P·D`; returns `(P, D)` when it holds.
pub fn fine_equivalent<T: Real>(
    u: &LeggedMatrix<T>,
    v: &LeggedMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Option<ComplexPermutation<T>>> {
    if u.order() != v.order() {
        return Err(Error::OrderMismatch {
            left: u.order(),
            right: v.order(),
        });
    }
    let x = &u.merged().adjoint() * &v.merged();
    Ok(complex_permutation(&x, tol.residual_eps))
}

/// `h1 = d1·p1·h2·p2·d2`.
#[derive(Clone, Debug)]
pub struct EquivalenceWitness<T> {
    pub d1: LeggedMatrix<T>,
    pub p1: LeggedMatrix<T>,
    pub p2: LeggedMatrix<T>,
    pub d2: LeggedMatrix<T>,
    pub residual: T,
}

impl<T: Real> EquivalenceWitness<T> {
    pub fn apply(&self, h2: &LeggedMatrix<T>) -> LeggedMatrix<T> {
        &(&(&(&self.d1 * &self.p1) * &h2.merged()) * &self.p2) * &self.d2
    }
}

/// Decides Hadamard equivalence by exhaustive search over dephased forms.
///
/// For every pivot entry of `h2` moved to position (0,0), both matrices are
/// dephased; they are then equivalent iff a row permutation and a column
/// permutation, each fixing index 0, carry one onto the other. Rows are
/// assigned one at a time while tracking, per column, which columns remain
/// compatible; a final bipartite matching fixes the column permutation.
/// Every returned witness is re-verified against the tolerance.
pub fn hadamard_equivalent<T: Real>(
    h1: &LeggedMatrix<T>,
    h2: &LeggedMatrix<T>,
    tol: &Tolerance<T>,
    max_order: usize,
) -> Result<Option<EquivalenceWitness<T>>> {
    let n = h1.order();
    if n != h2.order() {
        return Err(Error::OrderMismatch { left: n, right: h2.order() });
    }
    if n > max_order {
        return Err(Error::SearchRefused { order: n, limit: max_order });
    }
    let h1 = h1.merged();
    let h2 = h2.merged();
    let a = dephase(&h1, tol)?;
    require_hadamard(&h2, tol)?;
    let match_eps = tol.residual_eps.sqrt();
    for i0 in 0..n {
        for j0 in 0..n {
            let q = LeggedMatrix::permutation(&swap_to_front(n, i0))?;
            let s = LeggedMatrix::permutation(&swap_to_front(n, j0))?;
            let moved = &(&q * &h2) * &s;
            let b = dephase(&moved, tol)?;
            let mut search = Search {
                a: &a.matrix,
                b: &b.matrix,
                n,
                eps: match_eps,
                rows: vec![usize::MAX; n],
                used: vec![false; n],
            };
            search.rows[0] = 0;
            search.used[0] = true;
            let mut cand: Vec<Vec<bool>> = (0..n).map(|j| (0..n).map(|c| (j == 0) == (c == 0)).collect()).collect();
            search.filter(0, &mut cand);
            if let Some((rows, cols)) = search.run(1, cand) {
                // a = Πr·b·Πc with Πr e_{rows[r]} = e_r and Πc e_j = e_{cols[j]}
                let mut inv = vec![0; n];
                for (r, &br) in rows.iter().enumerate() {
                    inv[br] = r;
                }
                let pr = LeggedMatrix::permutation(&inv)?;
                let pc = LeggedMatrix::permutation(&cols)?;
                let lhs_left = &(&a.d_left.adjoint() * &pr) * &(&b.d_left * &q);
                let rhs_right = &(&(&s * &b.d_right) * &pc) * &a.d_right.adjoint();
                let p1 = &pr * &q;
                let d1 = &lhs_left * &p1.adjoint();
                let p2 = &s * &pc;
                let d2 = &p2.adjoint() * &rhs_right;
                let witness = EquivalenceWitness {
                    residual: T::zero(),
                    d1,
                    p1,
                    p2,
                    d2,
                };
                let residual = witness.apply(&h2).distance(&h1);
                if tol.accepts(residual) {
                    return Ok(Some(EquivalenceWitness { residual, ..witness }));
                }
            }
        }
    }
    Ok(None)
}

fn swap_to_front(n: usize, i: usize) -> Vec<usize> {
    let mut images: Vec<usize> = (0..n).collect();
    images.swap(0, i);
    images
}

struct Search<'a, T> {
    a: &'a LeggedMatrix<T>,
    b: &'a LeggedMatrix<T>,
    n: usize,
    eps: T,
    /// `rows[r]` is the row of `b` placed at row `r` of `a`.
    rows: Vec<usize>,
    used: Vec<bool>,
}

impl<T: Real> Search<'_, T> {
    /// Removes column candidates incompatible with the assignment of row `r`.
    fn filter(&self, r: usize, cand: &mut [Vec<bool>]) -> bool {
        let br = self.rows[r];
        for (j, cj) in cand.iter_mut().enumerate() {
            let mut any = false;
            for (c, ok) in cj.iter_mut().enumerate() {
                if *ok {
                    *ok = (self.a.get(r, j) - self.b.get(br, c)).norm() <= self.eps;
                    any |= *ok;
                }
            }
            if !any {
                return false;
            }
        }
        true
    }

    fn run(&mut self, r: usize, cand: Vec<Vec<bool>>) -> Option<(Vec<usize>, Vec<usize>)> {
        if r == self.n {
            let cols = match_columns(&cand)?;
            return Some((self.rows.clone(), cols));
        }
        for br in 1..self.n {
            if self.used[br] {
                continue;
            }
            self.rows[r] = br;
            self.used[br] = true;
            let mut next = cand.clone();
            if self.filter(r, &mut next) {
                if let Some(found) = self.run(r + 1, next) {
                    return Some(found);
                }
            }
            self.used[br] = false;
        }
        self.rows[r] = usize::MAX;
        None
    }
}

/// Perfect matching of columns of `a` to columns of `b` by augmenting paths.
fn match_columns(cand: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = cand.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(j: usize, cand: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..cand.len() {
            if cand[j][c] && !seen[c] {
                seen[c] = true;
                if owner[c].is_none_or(|other| augment(other, cand, seen, owner)) {
                    owner[c] = Some(j);
                    return true;
                }
            }
        }
        false
    }
    for j in 0..n {
        let mut seen = vec![false; n];
        if !augment(j, cand, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut cols = vec![0; n];
    for (c, o) in owner.iter().enumerate() {
        cols[o.expect("perfect matching")] = c;
    }
    Some(cols)
}

/// Least `m ≥ 1` with `p^m = I`: the lcm of the cycle lengths.
pub fn permutation_order<T: Real>(p: &LeggedMatrix<T>, tol: &Tolerance<T>) -> Result<u64> {
    let images = permutation_images(p, tol.residual_eps)?;
    Ok(images_order(&images))
}

pub fn images_order(images: &[usize]) -> u64 {
    let mut seen = vec![false; images.len()];
    let mut order = 1u64;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = images[j];
            len += 1;
        }
        order = order.lcm(&len);
    }
    order
}

/// Least `m ≤ m_max` such that `u^m` is a scalar multiple of the identity.
pub fn projective_order<T: Real>(u: &LeggedMatrix<T>, m_max: usize, tol: &Tolerance<T>) -> Option<usize> {
    let u = u.merged();
    let id = LeggedMatrix::identity(vec![u.order()]);
    let mut power = id.clone();
    for m in 1..=m_max {
        power = &power * &u;
        let lambda = power.normalized_trace();
        if power.distance(&id.scale(lambda)) <= tol.residual_eps && !lambda.is_zero() {
            return Some(m);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_orbit_point, seeded};
    use crate::scalar::c;
    use crate::tensor::kron;

    type M = LeggedMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn small_fourier_matrices() {
        assert_eq!(fourier::<f64>(1).unwrap(), M::identity(vec![1]));
        let s = 0.5f64.sqrt();
        let f2 = fourier::<f64>(2).unwrap();
        let expected = M::from_rows(&[vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]).unwrap();
        assert!(f2.distance(&expected) < 1e-15);
        assert!(is_unitary(&fourier::<f64>(5).unwrap(), &tol()).residual < 1e-12);
        assert!(fourier::<f64>(0).is_err());
    }

    #[test]
    fn hadamard_recognition() {
        assert!(is_complex_hadamard(&fourier::<f64>(3).unwrap(), &tol()).pass);
        assert!(!is_complex_hadamard(&M::identity(vec![2]), &tol()).pass);
        let f2 = fourier::<f64>(2).unwrap();
        assert!(is_complex_hadamard(&kron(&f2, &f2), &tol()).pass);
    }

    #[test]
    fn clock_and_shift_basics() {
        let d = clock::<f64>(3, 1);
        let w = root_of_unity::<f64>(1, 3);
        assert!((d.get(1, 1) - w).norm() < 1e-15 && (d.get(2, 2) - w * w).norm() < 1e-15);
        assert_eq!(shift::<f64>(4, 0), M::identity(vec![4]));
        let s1 = shift::<f64>(3, 1);
        // σ_1 = E_01 + E_12 + E_20
        assert_eq!(s1.get(0, 1), c(1.0, 0.0));
        assert_eq!(s1.get(1, 2), c(1.0, 0.0));
        assert_eq!(s1.get(2, 0), c(1.0, 0.0));
        let f3 = fourier::<f64>(3).unwrap();
        assert!((&s1 * &f3).distance(&(&f3 * &d)) < 1e-12);
    }

    #[test]
    fn dephasing() {
        let f2 = fourier::<f64>(2).unwrap();
        let out = dephase(&f2, &tol()).unwrap();
        assert!(out.matrix.distance(&f2) < 1e-15);
        let twisted = &M::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]) * &f2;
        let out = dephase(&twisted, &tol()).unwrap();
        assert!(out.matrix.distance(&f2) < 1e-15);
        assert!(out.d_left.distance(&M::diagonal(&[c(1.0, 0.0), c(0.0, -1.0)])) < 1e-15);
        let again = dephase(&out.matrix, &tol()).unwrap();
        assert!(again.matrix.distance(&out.matrix) < 1e-15);
        assert!(matches!(dephase(&M::identity(vec![2]), &tol()), Err(Error::NotHadamard(_))));
    }

    #[test]
    fn fine_equivalence_examples() {
        let f3 = fourier::<f64>(3).unwrap();
        let s1 = shift::<f64>(3, 1);
        let found = fine_equivalent(&f3, &(&s1 * &f3), &tol()).unwrap().unwrap();
        assert!((&(&f3 * &found.p) * &found.d).distance(&(&s1 * &f3)) < 1e-12);
        let f2 = fourier::<f64>(2).unwrap();
        let twisted = &M::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]) * &f2;
        assert!(fine_equivalent(&f2, &twisted, &tol()).unwrap().is_none());
        assert!(fine_equivalent(&f2, &f3, &tol()).is_err());
    }

    #[test]
    fn equivalence_search_finds_orbit_points() {
        let mut rng = seeded(5);
        for n in 2..=5 {
            let f = fourier::<f64>(n).unwrap();
            let h = random_orbit_point(&f, &mut rng).matrix;
            let w = hadamard_equivalent(&h, &f, &tol(), 6).unwrap().expect("equivalent");
            assert!(w.apply(&f).distance(&h) < 1e-9);
        }
        let f2 = fourier::<f64>(2).unwrap();
        let id = hadamard_equivalent(&f2, &f2, &tol(), 6).unwrap().unwrap();
        assert!(id.residual < 1e-12);
    }

    #[test]
    fn search_refuses_large_orders() {
        let f7 = fourier::<f64>(7).unwrap();
        assert!(matches!(
            hadamard_equivalent(&f7, &f7, &tol(), 6),
            Err(Error::SearchRefused { order: 7, limit: 6 })
        ));
    }

    #[test]
    fn orders() {
        assert_eq!(permutation_order(&shift::<f64>(3, 1), &tol()).unwrap(), 3);
        assert_eq!(permutation_order(&M::identity(vec![4]), &tol()).unwrap(), 1);
        let t = M::permutation(&[1, 0, 2]).unwrap();
        assert_eq!(permutation_order(&t, &tol()).unwrap(), 2);
        assert!(permutation_order(&fourier::<f64>(2).unwrap(), &tol()).is_err());
        let w = root_of_unity::<f64>(1, 5);
        assert_eq!(projective_order(&M::identity(vec![3]).scale(w), 10, &tol()), Some(1));
        assert_eq!(projective_order(&shift::<f64>(5, 1), 10, &tol()), Some(5));
        assert_eq!(projective_order(&clock::<f64>(4, 1), 10, &tol()), Some(4));
        assert_eq!(projective_order(&clock::<f64>(4, 1), 3, &tol()), None);
    }
}
