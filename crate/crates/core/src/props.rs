//! Seeded structural properties: double commutant, conditional expectations,
//! block-transpose involution and Hadamard-equivalence witnesses.

use rand::Rng;

use crate::algebra::{algebra_equal, commutant, generate_algebra};
use crate::error::Result;
use crate::hadamard::{fourier, hadamard_equivalent, DEFAULT_MAX_SEARCH_ORDER};
use crate::random::{ginibre, haar_unitary, random_orbit_point, seeded};
use crate::tensor::{block_transpose, cond_expect_adu_left, cond_expect_right, kron, LeggedMatrix, Tolerance};

type M = LeggedMatrix<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub residual: f64,
}

fn outcome(name: &'static str, residual: f64, tol: &Tolerance<f64>) -> PropertyOutcome {
    PropertyOutcome {
        name,
        pass: tol.accepts(residual),
        residual,
    }
}

/// Generators of a random unital subalgebra of `M_2 ⊗ M_2`, conjugated by a Haar unitary.
fn random_subalgebra_generators<R: Rng>(rng: &mut R) -> Vec<M> {
    let id = M::identity(vec![2]);
    let local = ginibre::<f64, _>(2, rng);
    let diag = M::diagonal(&[num_complex::Complex::new(1.0, 0.0), num_complex::Complex::new(-1.0, 0.0)]);
    let raw = match rng.random_range(0..4) {
        0 => vec![kron(&local, &id)],
        1 => vec![kron(&diag, &id), kron(&id, &diag)],
        2 => vec![kron(&local, &id), kron(&id, &diag)],
        _ => vec![kron(&local, &local.adjoint())],
    };
    let w = haar_unitary::<f64, _>(4, rng).with_legs(vec![2, 2]).expect("4 = 2·2");
    raw.iter().map(|g| w.conjugate(g)).collect()
}

/// `A'' = A` for a random subalgebra.
pub fn double_commutant(seed: u64, tol: &Tolerance<f64>) -> Result<PropertyOutcome> {
    let mut rng = seeded(seed);
    let gens = random_subalgebra_generators(&mut rng);
    let a = generate_algebra(vec![2, 2], &gens, tol)?;
    let cc = commutant(&commutant(&a, tol), tol);
    let residual = a.basis().iter().chain(cc.basis()).fold(0.0f64, |acc, x| {
        acc.max(a.membership_residual(x)).max(cc.membership_residual(x))
    });
    Ok(PropertyOutcome {
        name: "double_commutant",
        pass: algebra_equal(&a, &cc, tol)?,
        residual,
    })
}

/// Both conditional expectations are idempotent and trace preserving.
pub fn conditional_expectations(seed: u64, tol: &Tolerance<f64>) -> Result<PropertyOutcome> {
    let mut rng = seeded(seed);
    let n = rng.random_range(2..4);
    let k = rng.random_range(2..4);
    let split = (n, k);
    let x = ginibre::<f64, _>(n * k, &mut rng).with_legs(vec![n, k])?;
    let u = haar_unitary::<f64, _>(n * k, &mut rng).with_legs(vec![n, k])?;
    let right = cond_expect_right(&x, split)?;
    let left = cond_expect_adu_left(&x, &u, split, tol)?;
    let mut residual = cond_expect_right(&right, split)?.distance(&right);
    residual = residual.max(cond_expect_adu_left(&left, &u, split, tol)?.distance(&left));
    residual = residual.max((right.normalized_trace() - x.normalized_trace()).norm());
    residual = residual.max((left.normalized_trace() - x.normalized_trace()).norm());
    Ok(outcome("conditional_expectations", residual, tol))
}

/// Block transposition twice is the identity.
pub fn block_transpose_involution(seed: u64, tol: &Tolerance<f64>) -> Result<PropertyOutcome> {
    let mut rng = seeded(seed);
    let n = rng.random_range(1..5);
    let k = rng.random_range(1..5);
    let x = ginibre::<f64, _>(n * k, &mut rng);
    let twice = block_transpose(&block_transpose(&x, (n, k))?, (n, k))?;
    Ok(outcome("block_transpose_involution", twice.distance(&x.with_legs(vec![n, k])?), tol))
}

/// A random orbit point of `F_n` is recognised and the returned witness reproduces it.
pub fn equivalence_witness(seed: u64, tol: &Tolerance<f64>) -> Result<PropertyOutcome> {
    let mut rng = seeded(seed);
    let n = rng.random_range(2..=DEFAULT_MAX_SEARCH_ORDER);
    let f = fourier::<f64>(n)?;
    let sample = random_orbit_point(&f, &mut rng);
    let residual = match hadamard_equivalent(&sample.matrix, &f, tol, DEFAULT_MAX_SEARCH_ORDER)? {
        Some(w) => w.apply(&f).distance(&sample.matrix),
        None => f64::INFINITY,
    };
    Ok(outcome("equivalence_witness", residual, tol))
}

/// Every property at one seed.
pub fn run_all(seed: u64, tol: &Tolerance<f64>) -> Result<Vec<PropertyOutcome>> {
    Ok(vec![
        double_commutant(seed, tol)?,
        conditional_expectations(seed, tol)?,
        block_transpose_involution(seed, tol)?,
        equivalence_witness(seed, tol)?,
    ])
}
