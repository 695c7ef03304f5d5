//! Direct-quadrature fractional integrals: the Riesz potential I_α, the bilinear
//! operators ℐ_α and ℬ_α, and the log-kernel potential 𝒥_B.
//!
//! Far from the singularity every cell carries the midpoint weight h^n K(x, y). The
//! singular cell (y = x, or y = z = x for bilinear kernels) carries the exact integral of
//! the kernel over that cell. In n = 1 the same holds for every cell within
//! [`NEAR_CELLS`] cells of the singularity: there the midpoint rule underweights the
//! kernel at a rate h^α, which dominated the error. Weights stay positive.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::grid::{lp_norm_on, pairwise_sum, Ball, GridFunction, PeriodicGrid, Region};

/// Order of a fractional operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracOrder(pub f64);

fn simpson(a: f64, b: f64, intervals: usize, f: impl Fn(f64) -> f64) -> f64 {
    let m = intervals + intervals % 2;
    let step = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * step);
    }
    s * step / 3.0
}

/// ∫ over one grid cell centred at the origin of |y|^{α-n}.
pub fn linear_cell_integral(dim: usize, alpha: f64, h: f64) -> f64 {
    let c = h / 2.0;
    if dim == 1 {
        2.0 * c.powf(alpha) / alpha
    } else {
        let angular = simpson(0.0, PI / 4.0, 512, |t| t.cos().powf(-alpha));
        8.0 / alpha * c.powf(alpha) * angular
    }
}

/// Density of |u| for u uniform (Lebesgue) in the 2D cell [-c, c]².
fn radial_density_2d(a: f64, c: f64) -> f64 {
    if a <= c {
        2.0 * PI * a
    } else if a <= c * 2f64.sqrt() {
        a * (2.0 * PI - 8.0 * (c / a).acos())
    } else {
        0.0
    }
}

/// ∫ over the 2n-dimensional diagonal cell of K(|u| + |v|).
///
/// `near` must be ∫_0^c K(R) R^{2n-1} dR in closed form (c = h/2); below R = c the
/// density of |u|+|v| is an exact multiple of R^{2n-1}, above it is integrated numerically.
pub fn bilinear_cell_integral(dim: usize, h: f64, kernel: impl Fn(f64) -> f64, near: f64) -> f64 {
    let c = h / 2.0;
    if dim == 1 {
        4.0 * near + simpson(c, 2.0 * c, 512, |r| kernel(r) * 4.0 * (2.0 * c - r))
    } else {
        let rmax = c * 2f64.sqrt();
        let density = |r: f64| {
            let lo = (r - rmax).max(0.0);
            let hi = r.min(rmax);
            if hi <= lo {
                return 0.0;
            }
            simpson(lo, hi, 400, |a| radial_density_2d(a, c) * radial_density_2d(r - a, c))
        };
        2.0 * PI * PI / 3.0 * near + simpson(c, 2.0 * rmax, 400, |r| kernel(r) * density(r))
    }
}

/// Cell integral of (|u|+|v|)^{α-2n}.
pub fn power_cell_integral(dim: usize, alpha: f64, h: f64) -> f64 {
    let c = h / 2.0;
    let e = alpha - 2.0 * dim as f64;
    bilinear_cell_integral(dim, h, |r| r.powf(e), c.powf(alpha) / alpha)
}

/// Cell integral of (|u|+|v|)^{1-2n} log(a/(|u|+|v|)).
pub fn log_cell_integral(dim: usize, a: f64, h: f64) -> f64 {
    let c = h / 2.0;
    let e = 1.0 - 2.0 * dim as f64;
    bilinear_cell_integral(dim, h, |r| r.powf(e) * (a / r).ln(), c * ((a / c).ln() + 1.0))
}

/// Cells per axis, in n = 1, whose weight is the exact cell integral of the kernel.
pub const NEAR_CELLS: i64 = 8;

/// Signed lattice offset along one axis for an offset index on an N-point axis.
fn signed_offset(o: usize, size: usize) -> i64 {
    if o <= size / 2 {
        o as i64
    } else {
        o as i64 - size as i64
    }
}

/// ∫∫ K(|u| + |v|) over the 1D cell pair centred at (i h, j h), given F with F'' = K and
/// F(0) = 0. Cells straddling an axis are folded onto [0, h/2] with multiplicity 2.
fn pair_cell_integral_1d(i: i64, j: i64, h: f64, big_f: &impl Fn(f64) -> f64) -> f64 {
    let span = |k: i64| {
        let k = k.abs() as f64;
        if k == 0.0 {
            (0.0, 0.5 * h, 2.0)
        } else {
            ((k - 0.5) * h, (k + 0.5) * h, 1.0)
        }
    };
    let ((a1, a2, ma), (b1, b2, mb)) = (span(i), span(j));
    ma * mb * (big_f(a2 + b2) - big_f(a1 + b2) - big_f(a2 + b1) + big_f(a1 + b1))
}

/// Second antiderivative of s^{α-2}, vanishing at 0 (up to a linear term, which cancels
/// in [`pair_cell_integral_1d`]).
fn power_antiderivative(alpha: f64) -> impl Fn(f64) -> f64 {
    move |s: f64| {
        if s == 0.0 {
            0.0
        } else if (alpha - 1.0).abs() < 1e-12 {
            s * s.ln()
        } else {
            s.powf(alpha) / ((alpha - 1.0) * alpha)
        }
    }
}

/// Second antiderivative of s^{-1} log(a/s), vanishing at 0.
fn log_antiderivative(a: f64) -> impl Fn(f64) -> f64 {
    move |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            let l = (a / s).ln();
            -0.5 * s * (l * l + 2.0 * l + 2.0)
        }
    }
}

/// Quadrature weights of the kernel |y|^{α-n} per offset index.
pub fn linear_weights(grid: &PeriodicGrid, alpha: f64) -> Vec<f64> {
    let n = grid.dim() as f64;
    let (h, hv) = (grid.spacing(), grid.cell_volume());
    (0..grid.len())
        .map(|o| {
            let k = signed_offset(o, grid.size()).abs();
            if o == 0 {
                linear_cell_integral(grid.dim(), alpha, h)
            } else if grid.dim() == 1 && k <= NEAR_CELLS {
                let k = k as f64;
                (((k + 0.5) * h).powf(alpha) - ((k - 0.5) * h).powf(alpha)) / alpha
            } else {
                hv * grid.offset_norm(o).powf(alpha - n)
            }
        })
        .collect()
}

fn check_linear_order(grid: &PeriodicGrid, alpha: FracOrder) -> Result<()> {
    let n = grid.dim() as f64;
    if !(alpha.0 > 0.0 && alpha.0 < n) {
        return precondition(format!("alpha must lie in (0, n) = (0, {n}), got {}", alpha.0));
    }
    Ok(())
}

/// (I_α f)(x) = Σ_y w(x - y) f(y).
pub fn riesz_linear(f: &GridFunction, alpha: FracOrder) -> Result<GridFunction> {
    let grid = f.grid();
    check_linear_order(grid, alpha)?;
    let w = linear_weights(grid, alpha.0);
    let v = f.values();
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|x| pairwise_sum(w.len(), &|o| w[o] * v[grid.sub_index(x, o)]))
        .collect();
    GridFunction::new(grid, out)
}

/// ℬ_α(f, g)(x) = Σ_y w(y) f(x - s1 y) g(x - s2 y), integer shifts.
pub fn bilinear_b(f: &GridFunction, g: &GridFunction, alpha: FracOrder, s1: i64, s2: i64) -> Result<GridFunction> {
    let grid = f.grid();
    check_linear_order(grid, alpha)?;
    if s1 == s2 || s1 == 0 || s2 == 0 {
        return precondition("degenerate shift pair");
    }
    let w = linear_weights(grid, alpha.0);
    let (fv, gv) = (f.values(), g.values());
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            pairwise_sum(w.len(), &|o| {
                let a = grid.sub_index(x, grid.scale_index(s1, o));
                let b = grid.sub_index(x, grid.scale_index(s2, o));
                w[o] * fv[a] * gv[b]
            })
        })
        .collect();
    GridFunction::new(grid, out)
}

/// Result of the pointwise Hölder domination ℬ_α(|f|,|g|) ≤ I_α(|f|^r)^{1/r} I_α(|g|^s)^{1/s}.
#[derive(Clone, Debug)]
pub struct HolderReport {
    pub max_ratio: f64,
    pub argmax: usize,
    pub lhs_at_max: f64,
    pub rhs_at_max: f64,
    /// Points with ratio above 1 + 1e-12.
    pub violations: usize,
}

pub fn holder_domination_check(
    f: &GridFunction,
    g: &GridFunction,
    alpha: FracOrder,
    p1: f64,
    p2: f64,
) -> Result<HolderReport> {
    if !(p1 > 1.0 && p2 > 1.0 && p1.is_finite() && p2.is_finite()) || 1.0 / p1 + 1.0 / p2 >= 1.0 {
        return precondition("need 1 < p1, p2 < ∞ with 1/p1 + 1/p2 < 1");
    }
    let r = 1.0 + p1 / p2;
    let s = 1.0 + p2 / p1;
    let (af, ag) = (f.abs(), g.abs());
    let lhs = bilinear_b(&af, &ag, alpha, 1, -1)?;
    let i_f = riesz_linear(&af.map(|v| v.powf(r)), alpha)?;
    let i_g = riesz_linear(&ag.map(|v| v.powf(s)), alpha)?;
    let mut rep = HolderReport { max_ratio: 0.0, argmax: 0, lhs_at_max: 0.0, rhs_at_max: 0.0, violations: 0 };
    for x in 0..f.grid().len() {
        let l = lhs.get(x);
        let rr = i_f.get(x).powf(1.0 / r) * i_g.get(x).powf(1.0 / s);
        let ratio = if rr > 0.0 {
            l / rr
        } else if l > 0.0 {
            f64::INFINITY
        } else {
            continue;
        };
        if ratio > 1.0 + 1e-12 {
            rep.violations += 1;
        }
        if ratio > rep.max_ratio {
            rep = HolderReport { max_ratio: ratio, argmax: x, lhs_at_max: l, rhs_at_max: rr, violations: rep.violations };
        }
    }
    Ok(rep)
}

/// Largest N for which the n = 2 bilinear ℐ_α double sum is allowed.
pub const BILINEAR_I_MAX_N_2D: usize = 24;

/// Symmetric triangle sum Σ_{a≤b} W(a,b)(F_a G_b + F_b G_a) (diagonal counted once).
fn triangle_sum(m: usize, w: impl Fn(usize, usize) -> f64, fx: &[f64], gx: &[f64]) -> f64 {
    pairwise_sum(m, &|a| {
        let diag = w(a, a) * (fx[a] * gx[a]);
        diag + pairwise_sum(m - a - 1, &|k| {
            let b = a + 1 + k;
            w(a, b) * (fx[a] * gx[b] + fx[b] * gx[a])
        })
    })
}

/// Weight table W(a, b), a and b flat offset indices, of the ℐ_α double sum:
/// h^{2n}(|a|+|b|)^{α-2n} off the diagonal cell, its exact cell integral at (0, 0).
pub fn bilinear_i_weights(grid: &PeriodicGrid, alpha: FracOrder) -> Result<Vec<f64>> {
    let n = grid.dim();
    if !(alpha.0 > 0.0 && alpha.0 < 2.0 * n as f64) {
        return precondition(format!("alpha must lie in (0, 2n), got {}", alpha.0));
    }
    if n == 2 && grid.size() > BILINEAR_I_MAX_N_2D {
        return precondition(format!("bilinear I_alpha in n=2 needs N <= {BILINEAR_I_MAX_N_2D}"));
    }
    let m = grid.len();
    let dist: Vec<f64> = (0..m).map(|o| grid.offset_norm(o)).collect();
    let e = alpha.0 - 2.0 * n as f64;
    let h = grid.spacing();
    let h2 = grid.cell_volume() * grid.cell_volume();
    let diag = power_cell_integral(n, alpha.0, h);
    let big_f = power_antiderivative(alpha.0);
    Ok((0..m * m)
        .map(|ab| {
            let (a, b) = (ab / m, ab % m);
            let (i, j) = (signed_offset(a, grid.size()), signed_offset(b, grid.size()));
            if a == 0 && b == 0 {
                diag
            } else if n == 1 && i.abs() <= NEAR_CELLS && j.abs() <= NEAR_CELLS {
                pair_cell_integral_1d(i, j, h, &big_f)
            } else {
                h2 * (dist[a] + dist[b]).powf(e)
            }
        })
        .collect())
}

/// ℐ_α(f,g)(x) = ΣΣ W(y - x, z - x) f(y) g(z) with W ≈ h^{2n}(d(x,y)+d(x,z))^{α-2n}.
pub fn bilinear_i(f: &GridFunction, g: &GridFunction, alpha: FracOrder) -> Result<GridFunction> {
    let grid = f.grid();
    let table = bilinear_i_weights(grid, alpha)?;
    let m = grid.len();
    let (fv, gv) = (f.values(), g.values());
    let out: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|x| {
            let fx: Vec<f64> = (0..m).map(|a| fv[grid.add_index(x, a)]).collect();
            let gx: Vec<f64> = (0..m).map(|a| gv[grid.add_index(x, a)]).collect();
            triangle_sum(m, |a, b| table[a * m + b], &fx, &gx)
        })
        .collect();
    GridFunction::new(grid, out)
}

/// 𝒥 over `region` evaluated at the grid points `targets`; inputs are restricted to the
/// region. The torus counts as a ball of radius L/2.
pub fn log_potential_at(
    f: &GridFunction,
    g: &GridFunction,
    region: &Region,
    targets: &[usize],
) -> Result<Vec<f64>> {
    let grid = f.grid();
    let r = region.radius(grid);
    let h = grid.spacing();
    if r < 4.0 * h {
        return Err(Error::BallTooSmall);
    }
    let n = grid.dim();
    let pts = region.indices(grid);
    let a = 8.0 * r;
    let e = 1.0 - 2.0 * n as f64;
    let h2 = grid.cell_volume() * grid.cell_volume();
    let diag = log_cell_integral(n, a, h);
    let big_f = log_antiderivative(a);
    let (fv, gv) = (f.values(), g.values());
    let fp: Vec<f64> = pts.iter().map(|&i| fv[i]).collect();
    let gp: Vec<f64> = pts.iter().map(|&i| gv[i]).collect();
    Ok(targets
        .par_iter()
        .map(|&x| {
            let off: Vec<usize> = pts.iter().map(|&p| grid.sub_index(p, x)).collect();
            let d: Vec<f64> = off.iter().map(|&o| grid.offset_norm(o)).collect();
            let k: Vec<i64> = off.iter().map(|&o| signed_offset(o, grid.size())).collect();
            let w = |i: usize, j: usize| {
                let dd = d[i] + d[j];
                if dd == 0.0 {
                    diag
                } else if n == 1 && k[i].abs() <= NEAR_CELLS && k[j].abs() <= NEAR_CELLS {
                    pair_cell_integral_1d(k[i], k[j], h, &big_f)
                } else {
                    h2 * dd.powf(e) * (a / dd).ln()
                }
            };
            triangle_sum(pts.len(), w, &fp, &gp)
        })
        .collect())
}

/// 𝒥_B(f, g) on B, zero outside B.
pub fn log_potential_jb(f: &GridFunction, g: &GridFunction, ball: &Ball) -> Result<GridFunction> {
    let grid = f.grid();
    let region = Region::Ball(*ball);
    let idx = ball.indices(grid);
    let vals = log_potential_at(f, g, &region, &idx)?;
    let mut out = vec![0.0; grid.len()];
    for (i, v) in idx.iter().zip(vals) {
        out[*i] = v;
    }
    GridFunction::new(grid, out)
}

/// 1/q = 1/p1 + 1/p2 - (1-α)/n, checked to 1e-12 (q may be ∞).
pub fn check_jb_exponents(n: usize, p1: f64, p2: f64, q: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return precondition("alpha must lie in (0, 1]");
    }
    let target = 1.0 / p1 + 1.0 / p2 - (1.0 - alpha) / n as f64;
    if (1.0 / q - target).abs() > 1e-12 {
        return precondition(format!("scaling relation violated: 1/q = {} but expected {target}", 1.0 / q));
    }
    Ok(())
}

/// ‖𝒥_B(f,g)‖_{L^q(B)} and r(B)^α ‖f‖_{L^{p1}(B)} ‖g‖_{L^{p2}(B)}.
pub fn jb_ratio_parts(
    f: &GridFunction,
    g: &GridFunction,
    ball: &Ball,
    p1: f64,
    p2: f64,
    q: f64,
    alpha: f64,
) -> Result<(f64, f64)> {
    let grid = f.grid();
    let idx = ball.indices(grid);
    let vals = log_potential_at(f, g, &Region::Ball(*ball), &idx)?;
    let jb = GridFunction::new(grid, {
        let mut out = vec![0.0; grid.len()];
        for (i, v) in idx.iter().zip(vals) {
            out[*i] = v;
        }
        out
    })?;
    let lhs = lp_norm_on(&jb, q, &idx);
    let rhs = ball.radius.powf(alpha) * lp_norm_on(f, p1, &idx) * lp_norm_on(g, p2, &idx);
    Ok((lhs, rhs))
}

/// sup over the family pairs of ‖𝒥_B(f,g)‖_q / (r^α ‖f‖_{p1} ‖g‖_{p2}).
pub fn jb_operator_ratio(
    ball: &Ball,
    family: &[(GridFunction, GridFunction)],
    p1: f64,
    p2: f64,
    q: f64,
    alpha: f64,
) -> Result<f64> {
    if family.is_empty() {
        return precondition("empty family");
    }
    check_jb_exponents(family[0].0.grid().dim(), p1, p2, q, alpha)?;
    let mut sup: f64 = 0.0;
    for (f, g) in family {
        let (l, r) = jb_ratio_parts(f, g, ball, p1, p2, q, alpha)?;
        if r > 0.0 {
            sup = sup.max(l / r);
        } else if l > 0.0 {
            return Ok(f64::INFINITY);
        }
    }
    Ok(sup)
}

/// t^{1-2n} log(8r/t), the profile of the 𝒥_B kernel.
pub fn jb_profile(dim: usize, radius: f64, t: f64) -> f64 {
    t.powf(1.0 - 2.0 * dim as f64) * (8.0 * radius / t).ln()
}

/// Empirical constant C(c) in K(x₁,x₂,y,z) ≤ C K(v,w,y,z) whenever
/// d(v,y)+d(w,z) ≤ c (d(x₁,y)+d(x₂,z)), over `samples` random sextuples of grid points in B.
/// The same sample stream is used for every c, so C is monotone in c.
pub fn jb_growth_constant(grid: &PeriodicGrid, ball: &Ball, c: f64, samples: usize, seed: u64) -> Result<f64> {
    let pts = ball.indices(grid);
    if pts.len() < 2 {
        return Err(Error::DegenerateBall);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pick = || grid.point(pts[rng.gen_range(0..pts.len())]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (x1, x2, y, z, v, w) = (pick(), pick(), pick(), pick(), pick(), pick());
        let t = grid.torus_dist(&x1, &y) + grid.torus_dist(&x2, &z);
        let t2 = grid.torus_dist(&v, &y) + grid.torus_dist(&w, &z);
        if t == 0.0 || t2 == 0.0 || t2 > c * t {
            continue;
        }
        let k = jb_profile(grid.dim(), ball.radius, t);
        let k2 = jb_profile(grid.dim(), ball.radius, t2);
        worst = worst.max(k / k2);
    }
    Ok(worst)
}

/// φ(B) = sup of the 𝒥_B kernel over triples with d(x,y)+d(x,z) ≥ c r(B); the profile
/// is decreasing, so this is the profile at c r(B).
pub fn jb_phi_functional(dim: usize, radius: f64, c: f64) -> f64 {
    jb_profile(dim, radius, c * radius)
}
