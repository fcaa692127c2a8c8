//! Seeded sampling on spheres.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const DEFAULT_SEED: u64 = 0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for a named sub-task.
pub fn substream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(tag);
    r
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| StandardNormal.sample(rng)))
}

/// Uniform point on the unit sphere in `ℝ^dim` (normalized Gaussian).
pub fn sphere_point(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

pub fn sphere_points(dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut r = rng(seed);
    (0..count).map(|_| sphere_point(&mut r, dim)).collect()
}

/// Random tangent vector at `x`, Gaussian in `T_x`.
pub fn tangent_vector(rng: &mut ChaCha8Rng, x: &DVector<f64>) -> DVector<f64> {
    let v = gaussian_vector(rng, x.len());
    let d = v.dot(x);
    v - x * d
}

/// Random unit vector in the column span of an orthonormal `basis`.
pub fn unit_in_span(rng: &mut ChaCha8Rng, basis: &nalgebra::DMatrix<f64>) -> DVector<f64> {
    let c = sphere_point(rng, basis.ncols());
    basis * c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_unit_and_reproducible() {
        let a = sphere_points(5, 10, 7);
        let b = sphere_points(5, 10, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (p.norm() - 1.0).abs() < 1e-14));
        assert_ne!(a, sphere_points(5, 10, 8));
    }

    #[test]
    fn tangent_vectors_are_tangent() {
        let mut r = rng(3);
        let x = sphere_point(&mut r, 4);
        let v = tangent_vector(&mut r, &x);
        assert!(v.dot(&x).abs() < 1e-14);
    }
}
