//! Seeded, deterministic pseudo-noise keyed on the evaluation point.
//!
//! The value at a point depends only on the seed and the bit patterns of the
//! coordinates, so noisy functions stay pure and thread-independent.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A value in `[−1, 1]` determined by `seed` and `coords`.
pub fn hash_unit(seed: u64, coords: &[f64]) -> f64 {
    let mut h = splitmix64(seed);
    for c in coords {
        // +0.0 and -0.0 must hash alike
        let bits = if *c == 0.0 { 0 } else { c.to_bits() };
        h = splitmix64(h ^ bits);
    }
    let u = (h >> 11) as f64 / (1u64 << 53) as f64;
    2.0 * u - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_and_deterministic() {
        let mut lo: f64 = 1.0;
        let mut hi: f64 = -1.0;
        for k in 0..10_000 {
            let v = hash_unit(7, &[k as f64 / 10_000.0]);
            assert!((-1.0..=1.0).contains(&v));
            assert_eq!(v, hash_unit(7, &[k as f64 / 10_000.0]));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(lo < -0.99 && hi > 0.99);
        assert_ne!(hash_unit(1, &[0.5]), hash_unit(2, &[0.5]));
        assert_eq!(hash_unit(3, &[0.0]), hash_unit(3, &[-0.0]));
    }
}
