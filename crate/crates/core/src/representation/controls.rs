//! Control samples in the closed unit ball `𝔹 ⊂ ℝ^m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 4] = [2, 3, 5, 7];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Maps a point of `[0,1)^m` to the closed unit ball (`m ∈ {2,3}`), keeping
/// volume proportions.
fn cube_to_ball(u: &[f64]) -> Vec<f64> {
    match u.len() {
        2 => {
            let r = u[0].sqrt();
            let th = std::f64::consts::TAU * u[1];
            vec![r * th.cos(), r * th.sin()]
        }
        3 => {
            let r = u[0].cbrt();
            let z = 2.0 * u[1] - 1.0;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let ph = std::f64::consts::TAU * u[2];
            vec![r * s * ph.cos(), r * s * ph.sin(), r * z]
        }
        _ => vec![2.0 * u[0] - 1.0],
    }
}

/// First `count` points of a Halton sequence in `𝔹 ⊂ ℝ^m`, randomly shifted
/// modulo 1 with a shift drawn from `seed`. Prefixes are nested: the cloud of
/// size `N` is the start of the cloud of size `2N`.
pub fn control_cloud(m: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
    (0..count as u64)
        .map(|i| {
            let u: Vec<f64> = (0..m).map(|k| (radical_inverse(i + 1, PRIMES[k]) + shift[k]).fract()).collect();
            cube_to_ball(&u)
        })
        .collect()
}

/// Uniform draw from `𝔹 ⊂ ℝ^m`.
pub fn random_ball_point<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    let u: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
    cube_to_ball(&u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clouds_are_nested_and_in_the_ball() {
        for m in [2, 3] {
            let a = control_cloud(m, 100, 7);
            let b = control_cloud(m, 200, 7);
            assert_eq!(&b[..100], &a[..]);
            assert!(b.iter().all(|p| p.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-15));
            assert_ne!(control_cloud(m, 10, 8), control_cloud(m, 10, 7));
        }
    }

    #[test]
    fn cloud_is_roughly_uniform() {
        // fraction inside radius 1/2 should be 1/4 in the disc
        let c = control_cloud(2, 4000, 1);
        let inner = c.iter().filter(|p| p[0].hypot(p[1]) < 0.5).count() as f64 / 4000.0;
        assert!((inner - 0.25).abs() < 0.01, "{inner}");
        let c = control_cloud(3, 4000, 1);
        let inner = c.iter().filter(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() < 0.5).count() as f64;
        assert!((inner / 4000.0 - 0.125).abs() < 0.01);
    }

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }
}
