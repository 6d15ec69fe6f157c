//! Cayley transform between the unit disk and the right half-plane.
//!
//! `C(z) = (1+z)/(1-z)` sends the Denjoy-Wolff point `z = 1` to infinity.
//! Near that point the offset `z - 1 = -2/(w + 1)` is computed directly from
//! `w`, which keeps full relative precision where `z` itself would round to 1.

use num_complex::Complex64;

pub fn to_halfplane(z: Complex64) -> Complex64 {
    (1.0 + z) / (1.0 - z)
}

pub fn to_disk(w: Complex64) -> Complex64 {
    (w - 1.0) / (w + 1.0)
}

/// `C^{-1}(w) - 1`, exact in relative terms for large `|w|`.
pub fn disk_offset(w: Complex64) -> Complex64 {
    -2.0 / (w + 1.0)
}

/// `1 / (1 - z)` for `z = C^{-1}(w)`.
pub fn inv_one_minus(w: Complex64) -> Complex64 {
    (w + 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, -0.3),
            Complex64::new(-0.9, 0.1),
        ] {
            assert!((to_disk(to_halfplane(z)) - z).norm() < 1e-15);
        }
        assert_eq!(to_disk(Complex64::new(3.0, 0.0)), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn offset_matches_difference() {
        let w = Complex64::new(2.0, 5.0);
        assert!((disk_offset(w) - (to_disk(w) - 1.0)).norm() < 1e-15);
        assert!((inv_one_minus(w) - 1.0 / (1.0 - to_disk(w))).norm() < 1e-14);
    }
}
