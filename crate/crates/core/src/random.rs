//! Seeded random inputs: Haar unitaries, diagonal unitaries, permutations,
//! and random points in the Hadamard-equivalence orbit of a matrix.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{lit, Real};
use crate::tensor::LeggedMatrix;

/// The generator used everywhere a seed is accepted.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re), lit(im))
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> LeggedMatrix<T> {
    LeggedMatrix::from_fn(vec![n], |_, _| gaussian(rng))
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> LeggedMatrix<T> {
    let g = ginibre::<T, R>(n, rng);
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|c| (0..n).map(|r| g.get(r, c)).collect()).collect();
    for j in 0..n {
        // two passes keep the columns orthogonal to working precision
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let dot = done[i].iter().zip(&rest[0]).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                    acc + a.conj() * b
                });
                for (x, y) in rest[0].iter_mut().zip(&done[i]) {
                    *x = *x - *y * dot;
                }
            }
        }
        let norm = cols[j].iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        for x in cols[j].iter_mut() {
            *x = *x / norm;
        }
    }
    LeggedMatrix::from_fn(vec![n], |r, c| cols[c][r])
}

pub fn random_phases<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..n)
        .map(|_| {
            let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            Complex::from_polar(T::one(), lit(t))
        })
        .collect()
}

pub fn random_diagonal_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> LeggedMatrix<T> {
    LeggedMatrix::diagonal(&random_phases(n, rng))
}

/// Images of a uniformly random permutation of `0..n`.
pub fn random_images<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    images
}

pub fn random_permutation<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> LeggedMatrix<T> {
    LeggedMatrix::permutation(&random_images(n, rng)).expect("shuffle is a bijection")
}

/// Factors of a random Hadamard-equivalent copy `d1·p1·h·p2·d2`.
#[derive(Clone, Debug)]
pub struct OrbitSample<T> {
    pub d1: LeggedMatrix<T>,
    pub p1: LeggedMatrix<T>,
    pub p2: LeggedMatrix<T>,
    pub d2: LeggedMatrix<T>,
    pub matrix: LeggedMatrix<T>,
}

pub fn random_orbit_point<T: Real, R: Rng + ?Sized>(h: &LeggedMatrix<T>, rng: &mut R) -> OrbitSample<T> {
    let n = h.order();
    let d1 = random_diagonal_unitary(n, rng);
    let p1 = random_permutation(n, rng);
    let p2 = random_permutation(n, rng);
    let d2 = random_diagonal_unitary(n, rng);
    let matrix = &(&(&(&d1 * &p1) * &h.merged()) * &p2) * &d2;
    OrbitSample { d1, p1, p2, d2, matrix }
}
