//! Smooth cutoffs, all built from θ(x) = e^{-1/x} (x > 0), θ = 0 otherwise.

/// θ(x) = e^{-1/x} for x > 0.
pub fn theta(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for v ≤ 0, 1 for v ≥ 1.
pub fn step(v: f64) -> f64 {
    let a = theta(v);
    a / (a + theta(1.0 - v))
}

/// Odd-symmetric transition: 0 for v ≤ -1, 1 for v ≥ 1, T(v) + T(-v) = 1.
pub fn transition(v: f64) -> f64 {
    let a = theta(v + 1.0);
    a / (a + theta(1.0 - v))
}

/// Two-way partition on [0, ∞): φ(r) = 0 for r ≥ 2, φ(r) = 1 for r ≤ 1/2, φ(r) + φ(1/r) = 1.
pub fn two_way_phi(r: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    transition(-r.log2())
}

/// Three-way outer piece: φ(r) = 1 for r ≤ 1/4, φ(r) = 0 for r ≥ 1/2.
pub fn three_way_phi(r: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    step(-r.log2() - 1.0)
}

/// Balanced piece φ̃(r) = 1 - φ(r) - φ(1/r), supported in (1/4, 4).
pub fn three_way_phi_tilde(r: f64) -> f64 {
    let inv = if r > 0.0 { three_way_phi(1.0 / r) } else { 0.0 };
    1.0 - three_way_phi(r) - inv
}

/// Littlewood–Paley base: 1 on ρ ≤ 1, 0 on ρ ≥ 3/2.
pub fn lp_base(rho: f64) -> f64 {
    1.0 - step(2.0 * (rho - 1.0))
}

/// Annulus window supported on 1 ≤ ρ ≤ 2.
pub fn shell_window(rho: f64) -> f64 {
    step(2.0 * (rho - 1.0)) * step(2.0 * (2.0 - rho))
}
