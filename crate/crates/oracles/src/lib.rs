//! Slow, independent reference computations for the test suites.
//!
//! Nothing here shares code with the engine: integrals are evaluated by
//! quadrature of their definitions, loop fields by direct Biot–Savart
//! summation, derivatives by finite-difference stencils and squares by
//! exhaustive search.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

pub const MU_0: f64 = 4.0e-7 * PI;

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // the second bound stops refinement once the difference is pure roundoff
    if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= 4.0 * f64::EPSILON * (left.abs() + right.abs()) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

const QUAD_TOL: f64 = 1e-14;

/// `K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ)` by quadrature.
pub fn elliptic_k_quadrature(k: f64) -> f64 {
    adaptive_simpson(|t| 1.0 / delta(k, t), 0.0, FRAC_PI_2, QUAD_TOL)
}

/// `E(k) = ∫₀^{π/2} √(1 − k² sin²θ) dθ` by quadrature.
pub fn elliptic_e_quadrature(k: f64) -> f64 {
    adaptive_simpson(|t| delta(k, t), 0.0, FRAC_PI_2, QUAD_TOL)
}

/// `√(1 − k² sin²θ)` written as `√(cos²θ + k'² sin²θ)`, which keeps full
/// precision as k → 1.
fn delta(k: f64, t: f64) -> f64 {
    let kp2 = (1.0 - k) * (1.0 + k);
    let (s, c) = t.sin_cos();
    (c * c + kp2 * s * s).sqrt()
}

/// Field of one filamentary loop by midpoint summation of `dl × R / |R|³`
/// over `segments` equal arcs. Returns `(B_ρ, B_z)` at (ρ, z).
pub fn biot_savart_loop(radius: f64, z_loop: f64, ampere_turns: f64, rho: f64, z: f64, segments: usize) -> (f64, f64) {
    let dphi = 2.0 * PI / segments as f64;
    const CHUNK: usize = 4096;
    let (bx, bz) = (0..segments.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sx = 0.0;
            let mut sz = 0.0;
            for i in c * CHUNK..((c + 1) * CHUNK).min(segments) {
                let phi = (i as f64 + 0.5) * dphi;
                let (s, co) = phi.sin_cos();
                // dl = r dφ (−sin φ, cos φ, 0); R = P − L with P = (ρ, 0, z)
                let (dlx, dly) = (-radius * dphi * s, radius * dphi * co);
                let (rx, ry, rz) = (rho - radius * co, -radius * s, z - z_loop);
                let inv3 = (rx * rx + ry * ry + rz * rz).powf(-1.5);
                sx += dly * rz * inv3;
                sz += (dlx * ry - dly * rx) * inv3;
            }
            (sx, sz)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let c = MU_0 * ampere_turns / (4.0 * PI);
    (c * bx, c * bz)
}

/// A coaxial loop given as (radius, axial position, ampere-turns).
pub type Loop = (f64, f64, f64);

/// Closed-form axial field of a set of loops at height z.
pub fn on_axis_bz(loops: &[Loop], z: f64) -> f64 {
    loops
        .iter()
        .map(|&(r, z0, nia)| {
            let d = z - z0;
            MU_0 * nia * r * r / (2.0 * (r * r + d * d).powf(1.5))
        })
        .sum()
}

/// Fornberg's finite-difference weights for the `order`-th derivative at
/// `x0` from samples at `nodes`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// `order`-th derivative of `f` at `x0` from a central stencil of
/// `2·half + 1` points spaced `h`.
pub fn central_derivative<F: Fn(f64) -> f64>(f: F, x0: f64, h: f64, order: usize, half: usize) -> f64 {
    let offsets: Vec<f64> = (-(half as i64)..=half as i64).map(|i| i as f64).collect();
    let w = fornberg_weights(0.0, &offsets, order);
    let sum: f64 = offsets.iter().zip(&w).map(|(&o, &wi)| wi * f(x0 + o * h)).sum();
    sum / h.powi(order as i32)
}

/// `Rⁿ·|Bⁿ(0)| / B(0)` for a single loop of radius R, at its own center.
/// The n-th derivative of `(1 + u²)^{-3/2}` at zero.
pub fn single_loop_normalized_derivative(order: usize) -> f64 {
    // (1+u²)^{-3/2} = Σ_m binom(-3/2, m) u^{2m}
    if order % 2 == 1 {
        return 0.0;
    }
    let m = order / 2;
    let mut binom = 1.0;
    for j in 0..m {
        binom *= (-1.5 - j as f64) / (j as f64 + 1.0);
    }
    let factorial: f64 = (1..=order).map(|i| i as f64).product();
    (binom * factorial).abs()
}

/// Normalized even-order axial flatness at the loop set's center `z0`:
/// `Rⁿ·|Bⁿ(z0)| / B(z0)` divided by the single-loop value of the same
/// order. Uses a 13-point stencil with `h = R/20`.
pub fn normalized_flatness(loops: &[Loop], z0: f64, base_radius: f64, order: usize) -> f64 {
    let b0 = on_axis_bz(loops, z0);
    let h = base_radius / 20.0;
    let d = central_derivative(|z| on_axis_bz(loops, z), z0, h, order, 6);
    base_radius.powi(order as i32) * d.abs() / b0.abs() / single_loop_normalized_derivative(order)
}

/// Largest all-true square in a row-major `ny × nz` mask by exhaustive
/// search, as `(iy0, iz0, side)`; ties to the smallest iy0 then iz0.
pub fn brute_force_square(ny: usize, nz: usize, cells: &[bool]) -> Option<(usize, usize, usize)> {
    for side in (1..=ny.min(nz)).rev() {
        for iy0 in 0..=ny - side {
            for iz0 in 0..=nz - side {
                let full = (iy0..iy0 + side).all(|iy| (iz0..iz0 + side).all(|iz| cells[iy * nz + iz]));
                if full {
                    return Some((iy0, iz0, side));
                }
            }
        }
    }
    None
}
