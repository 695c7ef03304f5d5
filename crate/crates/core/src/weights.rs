//! Ball families, weight-class constants, weighted norms and Campanato–Morrey norms.
//! Suprema over balls are maxima over a fixed finite `BallFamily`.

use crate::error::{precondition, Result};
use crate::grid::{lp_average_on, lp_norm_on, mean_on, Ball, GridFunction, PeriodicGrid, Region};
use crate::semigroup::{bilinear_oscillation, double_smoothed_oscillation, HeatSemigroup};

/// 1/q = 1/p1 + 1/p2 - s/n.
pub fn sobolev_exponent(p1: f64, p2: f64, s: f64, n: usize) -> Result<f64> {
    if !(p1 > 1.0 && p2 > 1.0) {
        return precondition("p1, p2 must exceed 1");
    }
    let inv = 1.0 / p1 + 1.0 / p2 - s / n as f64;
    if inv <= 1e-12 {
        return precondition("scaling gives q = ∞ or negative");
    }
    Ok(1.0 / inv)
}

/// Centers on a coarse sublattice (`stride` points per axis) times a radius list.
#[derive(Clone, Debug, PartialEq)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
}

impl BallFamily {
    /// Default radii 2^k h + h/4, k ≥ 1, while 2^k h ≤ L/4.
    pub fn default_radii(grid: &PeriodicGrid) -> Vec<f64> {
        let h = grid.spacing();
        let mut out = Vec::new();
        let mut k = 1;
        while 2f64.powi(k) * h <= grid.length() / 4.0 {
            out.push(2f64.powi(k) * h + h / 4.0);
            k += 1;
        }
        out
    }

    pub fn new(grid: &PeriodicGrid, stride: usize, radii: Option<&[f64]>) -> Result<Self> {
        let n = grid.size();
        if stride == 0 || stride > n || n % stride != 0 {
            return precondition(format!("stride must divide N = {n}"));
        }
        let radii = match radii {
            Some(r) => r.to_vec(),
            None => Self::default_radii(grid),
        };
        if radii.is_empty() {
            return precondition("ball family needs at least one radius");
        }
        let step = (n / stride) as f64 * grid.spacing();
        let mut centers = Vec::new();
        for i in 0..stride {
            if grid.dim() == 1 {
                centers.push([i as f64 * step, 0.0]);
            } else {
                for j in 0..stride {
                    centers.push([i as f64 * step, j as f64 * step]);
                }
            }
        }
        let mut balls = Vec::new();
        for &r in &radii {
            for &c in &centers {
                let b = Ball::new(c, r)?;
                b.check_resolved(grid)?;
                balls.push(b);
            }
        }
        Ok(Self { balls })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

fn nonempty(family: &BallFamily) -> Result<()> {
    if family.is_empty() {
        return precondition("empty family");
    }
    Ok(())
}

fn dual(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// (avg_B w^{1-p'})^{q/p'}; at p = 1 its limit (min_B w)^{-q}.
fn dual_factor(w: &[f64], idx: &[usize], p: f64, q: f64) -> f64 {
    let pd = dual(p);
    if pd.is_infinite() {
        let min = idx.iter().fold(f64::INFINITY, |m, &i| m.min(w[i]));
        return min.powf(-q);
    }
    let v: Vec<f64> = w.iter().map(|x| x.powf(1.0 - pd)).collect();
    mean_on(&v, idx).powf(q / pd)
}

/// max_B (avg w^{q/p}) (avg w^{1-p'})^{q/p'}.
pub fn apq_constant(w: &GridFunction, p: f64, q: f64, family: &BallFamily) -> Result<f64> {
    nonempty(family)?;
    if !(p >= 1.0 && q >= 1.0) {
        return precondition("p, q must be at least 1");
    }
    let grid = w.grid();
    let wv = w.values();
    let wq: Vec<f64> = wv.iter().map(|x| x.powf(q / p)).collect();
    Ok(family.balls.iter().fold(0.0f64, |m, b| {
        let idx = b.indices(grid);
        m.max(mean_on(&wq, &idx) * dual_factor(wv, &idx, p, q))
    }))
}

/// max_B (avg w) Π_j (avg w_j^{1-p_j'})^{q/p_j'}, w = w1^{q/p1} w2^{q/p2}.
pub fn bilinear_weight_constant(
    w1: &GridFunction,
    w2: &GridFunction,
    p1: f64,
    p2: f64,
    q: f64,
    family: &BallFamily,
) -> Result<f64> {
    nonempty(family)?;
    let grid = w1.grid();
    let (a, b) = (w1.values(), w2.values());
    let w: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.powf(q / p1) * y.powf(q / p2)).collect();
    Ok(family.balls.iter().fold(0.0f64, |m, ball| {
        let idx = ball.indices(grid);
        m.max(mean_on(&w, &idx) * dual_factor(a, &idx, p1, q) * dual_factor(b, &idx, p2, q))
    }))
}

/// (∫_region |f|^p w)^{1/p}.
pub fn weighted_lp_norm(f: &GridFunction, w: &GridFunction, p: f64, region: &Region) -> Result<f64> {
    if !(p > 0.0) {
        return precondition("p must be positive");
    }
    let fw = f.zip_with(w, |a, b| a.abs() * b.powf(1.0 / p));
    Ok(lp_norm_on(&fw, p, &region.indices(f.grid())))
}

fn max_over<F: Fn(&Ball, &[usize]) -> Result<f64>>(family: &BallFamily, grid: &PeriodicGrid, f: F) -> Result<f64> {
    nonempty(family)?;
    let mut m: f64 = 0.0;
    for b in &family.balls {
        m = m.max(f(b, &b.indices(grid))?);
    }
    Ok(m)
}

/// max_B |B|^{-λ} (avg_B |f|^p)^{1/p}.
pub fn campanato_norm(f: &GridFunction, p: f64, lambda: f64, family: &BallFamily) -> Result<f64> {
    let grid = f.grid();
    max_over(family, grid, |b, idx| Ok(b.measure(grid).powf(-lambda) * lp_average_on(f, p, idx)))
}

/// max_B |B|^{-λ} (avg_B |fg - S_{r²}f S_{r²}g|^p)^{1/p}.
pub fn bilinear_campanato_norm(
    f: &GridFunction,
    g: &GridFunction,
    p: f64,
    lambda: f64,
    sg: &HeatSemigroup,
    family: &BallFamily,
) -> Result<f64> {
    let grid = f.grid();
    max_over(family, grid, |b, idx| {
        let osc = bilinear_oscillation(f, g, b, sg)?;
        Ok(b.measure(grid).powf(-lambda) * lp_average_on(&osc, p, idx))
    })
}

/// Upper bound for the tilde norm, taking h = S_{r²}f S_{r²}g in the infimum:
/// max_B |B|^{-λ} (avg_B |fg - S_{r²}[S_{r²}f S_{r²}g]|^p)^{1/p}.
pub fn semigroup_campanato_tilde(
    f: &GridFunction,
    g: &GridFunction,
    p: f64,
    lambda: f64,
    sg: &HeatSemigroup,
    family: &BallFamily,
) -> Result<f64> {
    let grid = f.grid();
    max_over(family, grid, |b, idx| {
        let osc = double_smoothed_oscillation(f, g, b, sg)?;
        Ok(b.measure(grid).powf(-lambda) * lp_average_on(&osc, p, idx))
    })
}

/// Two-weight testing constant with φ(B) = r(B)^{phi_exponent} and μ(B) = |B|:
/// max_B φ(B) |B|^{1/q + 1/p1' + 1/p2'} U_B Π_i (avg v_i^{-t p_i'})^{1/(t p_i')},
/// U_B = (avg u^{qt})^{1/(qt)} for q > 1 and (avg u^q)^{1/q} for q ≤ 1.
#[allow(clippy::too_many_arguments)]
pub fn testability_constant(
    u: &GridFunction,
    v1: &GridFunction,
    v2: &GridFunction,
    p1: f64,
    p2: f64,
    q: f64,
    phi_exponent: f64,
    t: f64,
    family: &BallFamily,
) -> Result<f64> {
    if !(t > 1.0) {
        return precondition("t must exceed 1");
    }
    let grid = u.grid();
    let (d1, d2) = (dual(p1), dual(p2));
    let ue = if q > 1.0 { q * t } else { q };
    let vf = |v: &GridFunction, d: f64, idx: &[usize]| {
        if d.is_infinite() {
            let min = idx.iter().fold(f64::INFINITY, |m, &i| m.min(v.get(i)));
            1.0 / min
        } else {
            let e = t * d;
            let w: Vec<f64> = v.values().iter().map(|x| x.powf(-e)).collect();
            mean_on(&w, idx).powf(1.0 / e)
        }
    };
    let expo = 1.0 / q + 1.0 / d1 + 1.0 / d2;
    max_over(family, grid, |b, idx| {
        let phi = b.radius.powf(phi_exponent);
        let mu = b.measure(grid).powf(expo);
        Ok(phi * mu * lp_average_on(u, ue, idx) * vf(v1, d1, idx) * vf(v2, d2, idx))
    })
}
