//! Spectral heat semigroup S_t = e^{tΔ} on the torus (order m = 2), bilinear
//! oscillations, and the right-hand sides of the bilinear Poincaré inequality and the
//! representation formula.

use num_complex::Complex64;

use crate::error::{precondition, Error, Result};
use crate::frac_ops::log_potential_at;
use crate::grid::{
    apply_multiplier, from_spectral, gradient_modulus, lp_norm_on, Ball, Freq, GridFunction, PeriodicGrid, Region,
    SpectralFunction,
};

fn norm2(xi: Freq) -> f64 {
    xi[0] * xi[0] + xi[1] * xi[1]
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return precondition(format!("t must be positive, got {t}"));
    }
    Ok(())
}

/// S_t f, multiplier e^{-t|ξ|²}.
pub fn apply_st(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    Ok(apply_multiplier(f, |xi| (-t * norm2(xi)).exp()))
}

/// t ∂_t S_t f, multiplier -t|ξ|² e^{-t|ξ|²}.
pub fn apply_tdt_st(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    Ok(apply_multiplier(f, |xi| {
        let a = t * norm2(xi);
        -a * (-a).exp()
    }))
}

/// Heat semigroup with the decay parameter ε of the scaled Poisson bound.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatSemigroup {
    pub grid: PeriodicGrid,
    pub epsilon: f64,
}

impl HeatSemigroup {
    /// Order of the semigroup: S_t is applied at t = r(B)^m.
    pub const ORDER: f64 = 2.0;

    pub fn new(grid: &PeriodicGrid, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return precondition("epsilon must be positive");
        }
        Ok(Self { grid: grid.clone(), epsilon })
    }

    pub fn apply(&self, f: &GridFunction, t: f64) -> Result<GridFunction> {
        apply_st(f, t)
    }

    pub fn time_for(&self, ball: &Ball) -> f64 {
        ball.radius.powf(Self::ORDER)
    }
}

/// Row p_t(0, ·) of the periodized heat kernel, L^{-n} Σ_k e^{-t|ξ_k|²} e^{i y ξ_k}.
pub fn heat_kernel_row(grid: &PeriodicGrid, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    let scale = grid.volume().recip();
    let coefficients = (0..grid.len())
        .map(|i| Complex64::new(scale * (-t * norm2(grid.frequency(i))).exp(), 0.0))
        .collect();
    Ok(from_spectral(&SpectralFunction::new(grid, coefficients)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonBoundReport {
    /// sup_y |p_t(0,y)| t^{n/2} (1 + d(0,y)/√t)^{2n+ε}.
    pub sup: f64,
    /// p_t(0,0) t^{n/2}.
    pub at_origin: f64,
}

pub fn kernel_poisson_bound_check(grid: &PeriodicGrid, t: f64, epsilon: f64) -> Result<PoissonBoundReport> {
    let h = grid.spacing();
    let hi = (grid.length() / 8.0).powi(2);
    if !(t >= h * h && t <= hi) {
        return precondition(format!("t must lie in [h^2, (L/8)^2] = [{}, {hi}]", h * h));
    }
    let n = grid.dim() as f64;
    let p = heat_kernel_row(grid, t)?;
    let st = t.sqrt();
    let sup = (0..grid.len()).fold(0.0f64, |m, j| {
        let d = grid.offset_norm(j);
        m.max(p.get(j).abs() * t.powf(n / 2.0) * (1.0 + d / st).powf(2.0 * n + epsilon))
    });
    Ok(PoissonBoundReport { sup, at_origin: p.get(0) * t.powf(n / 2.0) })
}

/// fg - S_{r²}f · S_{r²}g on B, zero outside.
pub fn bilinear_oscillation(f: &GridFunction, g: &GridFunction, ball: &Ball, sg: &HeatSemigroup) -> Result<GridFunction> {
    ball.check_resolved(f.grid())?;
    let t = sg.time_for(ball);
    let (sf, sgg) = (sg.apply(f, t)?, sg.apply(g, t)?);
    Ok(f.mul(g).sub(&sf.mul(&sgg)).masked(&Region::Ball(*ball)))
}

/// fg - S_{r²}[S_{r²}f · S_{r²}g] on B, zero outside.
pub fn double_smoothed_oscillation(
    f: &GridFunction,
    g: &GridFunction,
    ball: &Ball,
    sg: &HeatSemigroup,
) -> Result<GridFunction> {
    ball.check_resolved(f.grid())?;
    let t = sg.time_for(ball);
    let inner = sg.apply(f, t)?.mul(&sg.apply(g, t)?);
    Ok(f.mul(g).sub(&sg.apply(&inner, t)?).masked(&Region::Ball(*ball)))
}

/// Dilates 2^{l+1}B for l = 0.. until the first one that covers the torus.
/// Returns the proper balls; the next level on is the torus.
fn dyadic_dilates(ball: &Ball, grid: &PeriodicGrid) -> Vec<Ball> {
    let mut out = Vec::new();
    let mut l = 0;
    loop {
        match Region::dilated(ball, 2f64.powi(l + 1), grid) {
            Region::Ball(b) => out.push(b),
            Region::Torus => return out,
        }
        l += 1;
    }
}

/// Σ_{l=0}^{l_max} w^l a_l where a_l = a_torus for l ≥ proper.len(); when l_max reaches the
/// torus level the constant tail is summed to infinity.
fn dyadic_series(proper: &[f64], torus: f64, w: f64, l_max: usize) -> f64 {
    let lstar = proper.len();
    let direct = lstar.min(l_max + 1);
    let mut s = 0.0;
    for (l, a) in proper.iter().enumerate().take(direct) {
        s += w.powi(l as i32) * a;
    }
    if l_max >= lstar {
        s += torus * w.powi(lstar as i32) / (1.0 - w);
    }
    s
}

/// r^α Σ_l 2^{-l(ε-α)} [‖∇f‖_{p1} ‖g‖_{p2} + ‖f‖_{p1} ‖∇g‖_{p2}] over 2^{l+1}B.
#[allow(clippy::too_many_arguments)]
pub fn poincare_rhs_series(
    f: &GridFunction,
    g: &GridFunction,
    ball: &Ball,
    p1: f64,
    p2: f64,
    alpha: f64,
    epsilon: f64,
    l_max: usize,
) -> Result<f64> {
    if alpha >= epsilon {
        return precondition("series diverges");
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return precondition("alpha must lie in (0, 1)");
    }
    let grid = f.grid();
    let (df, dg) = (gradient_modulus(f), gradient_modulus(g));
    let term = |idx: &[usize]| {
        lp_norm_on(&df, p1, idx) * lp_norm_on(g, p2, idx) + lp_norm_on(f, p1, idx) * lp_norm_on(&dg, p2, idx)
    };
    let proper: Vec<f64> = dyadic_dilates(ball, grid).iter().map(|b| term(&b.indices(grid))).collect();
    let all: Vec<usize> = (0..grid.len()).collect();
    let w = 2f64.powf(-(epsilon - alpha));
    Ok(ball.radius.powf(alpha) * dyadic_series(&proper, term(&all), w, l_max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationReport {
    /// Smallest C with LHS ≤ C·RHS at every point of B (∞ if some RHS vanishes under a
    /// positive LHS, 0 if the oscillation vanishes).
    pub c_rep: f64,
    pub argmax: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Pointwise |fg - S f S g|(x) ≤ C Σ_l 2^{-lε}[𝒥_{2^{l+1}B}(|∇f|,|g|) + 𝒥_{2^{l+1}B}(|f|,|∇g|)](x).
pub fn representation_formula_check(
    f: &GridFunction,
    g: &GridFunction,
    ball: &Ball,
    sg: &HeatSemigroup,
    l_max: usize,
) -> Result<RepresentationReport> {
    let grid = f.grid();
    let osc = bilinear_oscillation(f, g, ball, sg)?;
    let targets = ball.indices(grid);
    if targets.is_empty() {
        return Err(Error::DegenerateBall);
    }
    let (af, ag) = (f.abs(), g.abs());
    let (df, dg) = (gradient_modulus(f), gradient_modulus(g));
    let both = |region: &Region| -> Result<Vec<f64>> {
        let a = log_potential_at(&df, &ag, region, &targets)?;
        let b = log_potential_at(&af, &dg, region, &targets)?;
        Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect())
    };
    let mut levels = Vec::new();
    for b in dyadic_dilates(ball, grid) {
        levels.push(both(&Region::Ball(b))?);
    }
    let torus = both(&Region::Torus)?;
    let w = 2f64.powf(-sg.epsilon);
    let mut rep = RepresentationReport { c_rep: 0.0, argmax: targets[0], lhs: 0.0, rhs: 0.0 };
    for (k, &x) in targets.iter().enumerate() {
        let proper: Vec<f64> = levels.iter().map(|v| v[k]).collect();
        let rhs = dyadic_series(&proper, torus[k], w, l_max);
        let lhs = osc.get(x).abs();
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            continue;
        };
        if ratio > rep.c_rep {
            rep = RepresentationReport { c_rep: ratio, argmax: x, lhs, rhs };
        }
    }
    Ok(rep)
}
