//! Exponential-integrator weights for `u' = -ρu + b`.

/// `(1 - e^{-x}) / x`.
pub fn e1(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

/// `(x - 1 + e^{-x}) / x²`.
pub fn e2(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        // 1/2 - x/6 + x²/24 - x³/120 + x⁴/720
        0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 + x * (-1.0 / 120.0 + x / 720.0)))
    } else {
        (x + (-x).exp_m1()) / (x * x)
    }
}

/// `∫_0^τ e^{-ρs} ds`.
pub fn phi1(rho: f64, tau: f64) -> f64 {
    tau * e1(rho * tau)
}

/// `∫_0^τ ∫_0^s e^{-ρr} dr ds = (τ - φ1)/ρ`.
pub fn phi2(rho: f64, tau: f64) -> f64 {
    tau * tau * e2(rho * tau)
}

/// Per-mode state after time `τ`: `e^{-ρτ} u + φ1 b`.
#[inline]
pub fn advance(rho: f64, tau: f64, u: f64, b: f64) -> f64 {
    (-rho * tau).exp() * u + phi1(rho, tau) * b
}

/// `∫_0^τ u(s) ds` along the same segment.
#[inline]
pub fn segment_integral(rho: f64, tau: f64, u: f64, b: f64) -> f64 {
    phi1(rho, tau) * u + phi2(rho, tau) * b
}
