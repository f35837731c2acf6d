//! Measures of unit balls.

/// Volume of the unit ball in dimension `n`.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * ball_volume(n - 2),
    }
}

/// Surface measure of the unit sphere, `n` times the ball volume.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

/// Planar isoperimetric constant, perimeter over square root of area for the disk.
pub const ISO_2D: f64 = 3.544_907_701_811_032; // 2 sqrt(pi)

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_dimensions() {
        assert_eq!(ball_volume(1), 2.0);
        assert!((ball_volume(2) - PI).abs() < 1e-15);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((ISO_2D - 2.0 * PI.sqrt()).abs() < 1e-15);
    }
}
