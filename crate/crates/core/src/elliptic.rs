//! Complete elliptic integrals of the first and second kind.
//!
//! Both integrals come out of a single arithmetic-geometric mean sweep:
//!
//! ```text
//! K(k) = π / (2·AGM(1, k'))                     k' = √(1 − k²)
//! E(k) = K(k) · (1 − Σₙ 2ⁿ⁻¹ cₙ²)               c₀ = k, cₙ = (aₙ₋₁ − bₙ₋₁)/2
//! ```
//!
//! All public functions take the modulus `k`, not the parameter `m = k²`.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

/// Largest modulus accepted by [`complete_elliptic_k`]. K diverges
/// logarithmically at k = 1.
pub const K_MODULUS_LIMIT: f64 = 1.0 - 1e-12;

const AGM_TOLERANCE: f64 = 1e-15;
const AGM_MAX_ITER: usize = 64;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum EllipticError {
    #[error("elliptic modulus {0} outside the supported domain")]
    Domain(f64),
}

/// K(k) and E(k) evaluated at the same modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub k_first: f64,
    pub e_second: f64,
}

/// K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ), for 0 ≤ k < 1.
pub fn complete_elliptic_k(k: f64) -> Result<f64, EllipticError> {
    if !(0.0..K_MODULUS_LIMIT).contains(&k) {
        return Err(EllipticError::Domain(k));
    }
    Ok(agm_sweep(k, complement(k)).k_first)
}

/// E(k) = ∫₀^{π/2} √(1 − k² sin²θ) dθ, for 0 ≤ k ≤ 1.
pub fn complete_elliptic_e(k: f64) -> Result<f64, EllipticError> {
    if !(0.0..=1.0).contains(&k) {
        return Err(EllipticError::Domain(k));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    Ok(agm_sweep(k, complement(k)).e_second)
}

/// Both integrals at modulus `k`, sharing one AGM sweep.
pub fn complete_elliptic_pair(k: f64) -> Result<EllipticPair, EllipticError> {
    if !(0.0..K_MODULUS_LIMIT).contains(&k) {
        return Err(EllipticError::Domain(k));
    }
    Ok(agm_sweep(k, complement(k)))
}

/// Both integrals from the complementary modulus `k' = √(1 − k²)`.
///
/// Callers that can form `k'` directly (the loop field does, from a ratio of
/// squared distances) avoid the cancellation in `1 − k²` close to the wire.
/// Requires `0 < k' ≤ 1`.
pub fn complete_elliptic_pair_complementary(k_prime: f64) -> Result<EllipticPair, EllipticError> {
    if !(k_prime > 0.0 && k_prime <= 1.0) {
        return Err(EllipticError::Domain(k_prime));
    }
    let k = ((1.0 - k_prime) * (1.0 + k_prime)).sqrt();
    Ok(agm_sweep(k, k_prime))
}

fn complement(k: f64) -> f64 {
    ((1.0 - k) * (1.0 + k)).sqrt()
}

fn agm_sweep(k: f64, k_prime: f64) -> EllipticPair {
    let mut a = 1.0_f64;
    let mut b = k_prime;
    // Σ 2ⁿ⁻¹ cₙ², starting with n = 0
    let mut sum = 0.5 * k * k;
    let mut weight = 0.5;

    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOLERANCE * a {
            break;
        }
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        weight *= 2.0;
        sum += weight * c * c;
    }

    let k_first = FRAC_PI_2 / a;
    EllipticPair {
        k_first,
        e_second: k_first * (1.0 - sum),
    }
}
