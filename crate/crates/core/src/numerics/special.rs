use std::f64::consts::PI;

/// Γ(n/2) for a positive integer `n`.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n > 0, "gamma_half requires n >= 1");
    if n.is_multiple_of(2) {
        // Γ(k) = (k-1)!
        (1..n / 2).map(f64::from).product()
    } else {
        // Γ(k + 1/2) = √π · (2k-1)!! / 2^k
        let k = (n - 1) / 2;
        let mut v = PI.sqrt();
        for j in 0..k {
            v *= f64::from(2 * j + 1) / 2.0;
        }
        v
    }
}

/// Surface area of the unit sphere in `n` dimensions, 2π^{n/2}/Γ(n/2).
pub fn unit_sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(f64::from(n) / 2.0) / gamma_half(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert!((gamma_half(3) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(gamma_half(6), 2.0);
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }
}
