//! Roots of unity `exp(2 pi i m / n)` with exact integer argument reduction.
//!
//! The residue `m` is folded into the first octant with integer arithmetic, so
//! the only rounding in the angle is the single division `r / n` with
//! `r <= n / 2`; sine and cosine are then evaluated on `[0, pi/4]`. Conjugate
//! and rotated residues therefore produce bit-identical (up to sign and swap)
//! coordinates.

use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

/// `exp(2 pi i m / n)` for any `m`; `n` must be nonzero.
pub fn unit_root(m: u64, n: u64) -> Complex64 {
    debug_assert!(n > 0);
    let m = (m % n) as u128;
    let n128 = n as u128;
    // 4m = quadrant * n + r, 0 <= r < n; angle = (pi/2) * (quadrant + r/n)
    let four_m = 4 * m;
    let quadrant = (four_m / n128) as u8;
    let r = four_m % n128;
    // fold to [0, pi/4] inside the quadrant
    let (c, s) = if 2 * r <= n128 {
        let t = (r as f64 / n as f64) * FRAC_PI_2;
        (libm::cos(t), libm::sin(t))
    } else {
        let t = ((n128 - r) as f64 / n as f64) * FRAC_PI_2;
        (libm::sin(t), libm::cos(t))
    };
    match quadrant {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}
