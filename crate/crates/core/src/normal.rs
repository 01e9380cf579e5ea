//! Standard normal distribution function and its inverse.
//!
//! Φ uses the `libm` complementary error function (accurate to about one
//! ulp); the inverse starts from `statrs`' `erfc_inv` and is polished by a
//! Newton step against that Φ.
//! Every module that needs Φ goes through here so the Black–Scholes
//! equivalence and the pointwise tests share one implementation.

use libm::erfc;
use statrs::function::erf::erfc_inv;

/// Φ(x) = ½·erfc(−x/√2).
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// 1 − Φ(x), evaluated without cancellation in the right tail.
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ⁻¹(p) for p in (0, 1); ±∞ at the endpoints.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // One Newton step on the lower-tail form removes the last few ulps of
    // error left by erfc_inv.
    let dens = pdf(z);
    if dens > 0.0 {
        let err = if p < 0.5 { cdf(z) - p } else { (1.0 - p) - sf(z) };
        z -= err / dens;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((cdf(1.959963984540054) - 0.975).abs() < 1e-15);
        assert!((cdf(-1.0) - 0.15865525393145707).abs() < 1e-15);
        assert!((sf(8.0) - 6.220960574271785e-16).abs() < 1e-28);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-10, 1e-4, 0.01, 0.025, 0.3, 0.5, 0.77, 0.975, 0.999999] {
            let z = quantile(p);
            assert!((cdf(z) - p).abs() <= 1e-15 * p.max(1e-3), "p = {p}");
        }
        assert!((quantile(0.975) - 1.959963984540054).abs() < 1e-13);
    }
}
