//! Counter-based random streams.
//!
//! Samplers index their draws: stream `k` of a seed is independent of every
//! other stream, and a sweep over indices gives identical results whether it
//! runs sequentially or chunked across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Vector;

/// RNG for the `index`-th sample of a seeded sweep.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point in an axis-aligned box.
pub fn point_in_box(rng: &mut impl Rng, lo: &[f64], hi: &[f64]) -> Vector {
    Vector::from_iterator(lo.len(), lo.iter().zip(hi).map(|(&a, &b)| rng.gen_range(a..b)))
}

/// Uniform direction on the unit sphere.
pub fn unit_vector(rng: &mut impl Rng, dim: usize) -> Vector {
    loop {
        let v = Vector::from_iterator(dim, (0..dim).map(|_| rng.gen_range(-1.0..1.0)));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Unit vector orthogonal to `v` (Gram-Schmidt applied to a random draw).
///
/// Requires dimension >= 2.
pub fn unit_vector_orthogonal_to(rng: &mut impl Rng, v: &Vector) -> Vector {
    assert!(v.len() >= 2, "no nonzero orthogonal vector in dimension < 2");
    loop {
        let mut w = unit_vector(rng, v.len());
        let proj = v.dot(&w);
        w -= v * proj;
        let n = w.norm();
        if n > 1e-6 {
            return w / n;
        }
    }
}
