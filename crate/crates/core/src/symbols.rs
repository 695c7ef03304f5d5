//! x-independent bilinear symbols σ(ξ, η), the operators T_σ and T_θ (θ = π/4), symbol
//! kernels, class seminorms and the frequency decompositions behind the Leibniz rules.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use crate::cutoff::{shell_window, three_way_phi, three_way_phi_tilde, two_way_phi};
use crate::error::{precondition, Error, Result};
use crate::frac_ops::{bilinear_i_weights, linear_weights, FracOrder};
use crate::grid::{from_spectral, pairwise_sum, to_spectral, Freq, GridFunction, PeriodicGrid, SpectralFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolClass {
    BsInhom,
    BsHom,
    BsTheta,
    Unclassified,
}

pub trait BilinearSymbol: Send + Sync {
    fn name(&self) -> &str;
    /// Declared order m.
    fn order(&self) -> f64;
    fn class(&self) -> SymbolClass;
    fn eval(&self, xi: Freq, eta: Freq) -> Complex64;
}

fn sq(x: Freq) -> f64 {
    x[0] * x[0] + x[1] * x[1]
}

fn add(a: Freq, b: Freq) -> Freq {
    [a[0] + b[0], a[1] + b[1]]
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub struct ConstantSymbol {
    pub value: f64,
}

impl BilinearSymbol for ConstantSymbol {
    fn name(&self) -> &str {
        "constant"
    }
    fn order(&self) -> f64 {
        0.0
    }
    fn class(&self) -> SymbolClass {
        SymbolClass::BsInhom
    }
    fn eval(&self, _: Freq, _: Freq) -> Complex64 {
        real(self.value)
    }
}

/// (1 + |ξ|² + |η|²)^{-s/2}.
pub struct BesselSymbol {
    pub s: f64,
}

impl BilinearSymbol for BesselSymbol {
    fn name(&self) -> &str {
        "bessel_order"
    }
    fn order(&self) -> f64 {
        -self.s
    }
    fn class(&self) -> SymbolClass {
        SymbolClass::BsInhom
    }
    fn eval(&self, xi: Freq, eta: Freq) -> Complex64 {
        real((1.0 + sq(xi) + sq(eta)).powf(-self.s / 2.0))
    }
}

/// |(ξ, η)|^{-s}, set to 0 at the origin.
pub struct HomogeneousSymbol {
    pub s: f64,
}

impl BilinearSymbol for HomogeneousSymbol {
    fn name(&self) -> &str {
        "homogeneous_order"
    }
    fn order(&self) -> f64 {
        -self.s
    }
    fn class(&self) -> SymbolClass {
        SymbolClass::BsHom
    }
    fn eval(&self, xi: Freq, eta: Freq) -> Complex64 {
        let r2 = sq(xi) + sq(eta);
        if r2 == 0.0 {
            real(0.0)
        } else {
            real(r2.powf(-self.s / 2.0))
        }
    }
}

/// e^{-a(|ξ|² + |η|²)}.
pub struct GaussianSymbol {
    pub a: f64,
}

impl BilinearSymbol for GaussianSymbol {
    fn name(&self) -> &str {
        "gaussian"
    }
    fn order(&self) -> f64 {
        0.0
    }
    fn class(&self) -> SymbolClass {
        SymbolClass::Unclassified
    }
    fn eval(&self, xi: Freq, eta: Freq) -> Complex64 {
        real((-self.a * (sq(xi) + sq(eta))).exp())
    }
}

/// (1 + |ξ+η|²)^{m/2}, the symbol of f, g ↦ J^m(fg).
pub struct JmProductSymbol {
    pub m: f64,
}

impl BilinearSymbol for JmProductSymbol {
    fn name(&self) -> &str {
        "jm_product"
    }
    fn order(&self) -> f64 {
        self.m
    }
    fn class(&self) -> SymbolClass {
        SymbolClass::BsInhom
    }
    fn eval(&self, xi: Freq, eta: Freq) -> Complex64 {
        real((1.0 + sq(add(xi, eta))).powf(self.m / 2.0))
    }
}

/// Which cutoff splits the frequency plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    /// η dominates (paired with J^{m+s} on g).
    First,
    /// ξ dominates (paired with J^{m+s} on f).
    Second,
    /// Balanced frequencies, three-way split only.
    Third,
}

/// Pieces of the two-way or three-way split of J^m(fg):
/// σ₁ = (1+|ξ+η|²)^{m/2} φ(ρ) (1+|η|²)^{-(m+s)/2}, σ₂ the mirror image, σ₃ = (1+|ξ+η|²)^{m/2} φ̃(ρ),
/// with ρ = (1+|ξ|²)/(1+|η|²).
pub struct DecouplingSymbol {
    pub m: f64,
    pub s: f64,
    pub piece: Piece,
    pub three_way: bool,
    name: &'static str,
}

impl DecouplingSymbol {
    pub fn new(m: f64, s: f64, piece: Piece, three_way: bool) -> Result<Self> {
        let name = match (three_way, piece) {
            (false, Piece::First) => "cm_sigma1",
            (false, Piece::Second) => "cm_sigma2",
            (false, Piece::Third) => return precondition("two-way split has no third piece"),
            (true, Piece::First) => "three_way_sigma1",
            (true, Piece::Second) => "three_way_sigma2",
            (true, Piece::Third) => "three_way_sigma3",
        };
        Ok(Self { m, s, piece, three_way, name })
    }
}

impl BilinearSymbol for DecouplingSymbol {
    fn name(&self) -> &str {
        self.name
    }
    fn order(&self) -> f64 {
        match self.piece {
            Piece::Third => self.m,
            _ => -self.s,
        }
    }
    fn class(&self) -> SymbolClass {
        SymbolClass::BsInhom
    }
    fn eval(&self, xi: Freq, eta: Freq) -> Complex64 {
        let jm = (1.0 + sq(add(xi, eta))).powf(self.m / 2.0);
        let (a, b) = (1.0 + sq(xi), 1.0 + sq(eta));
        let phi = |r: f64| if self.three_way { three_way_phi(r) } else { two_way_phi(r) };
        let e = -(self.m + self.s) / 2.0;
        real(match self.piece {
            Piece::First => jm * phi(a / b) * b.powf(e),
            Piece::Second => jm * phi(b / a) * a.powf(e),
            Piece::Third => jm * three_way_phi_tilde(a / b),
        })
    }
}

/// σ₀(ξ - η) with σ₀(ζ) = (1 + |ζ|²)^{-s/2}.
pub struct ThetaBesselSymbol {
    pub s: f64,
}

impl ThetaBesselSymbol {
    pub fn sigma0(&self, zeta: Freq) -> f64 {
        (1.0 + sq(zeta)).powf(-self.s / 2.0)
    }
}

impl BilinearSymbol for ThetaBesselSymbol {
    fn name(&self) -> &str {
        "theta_bessel"
    }
    fn order(&self) -> f64 {
        -self.s
    }
    fn class(&self) -> SymbolClass {
        SymbolClass::BsTheta
    }
    fn eval(&self, xi: Freq, eta: Freq) -> Complex64 {
        real(self.sigma0([xi[0] - eta[0], xi[1] - eta[1]]))
    }
}

/// (σ₁, σ₂) of the two-way frequency decoupling.
pub fn decompose_frequency(m: f64, s: f64) -> (DecouplingSymbol, DecouplingSymbol) {
    (
        DecouplingSymbol { m, s, piece: Piece::First, three_way: false, name: "cm_sigma1" },
        DecouplingSymbol { m, s, piece: Piece::Second, three_way: false, name: "cm_sigma2" },
    )
}

/// (σ₁, σ₂, σ₃) of the three-way decoupling.
pub fn decompose_three_way(m: f64, s: f64) -> (DecouplingSymbol, DecouplingSymbol, DecouplingSymbol) {
    (
        DecouplingSymbol { m, s, piece: Piece::First, three_way: true, name: "three_way_sigma1" },
        DecouplingSymbol { m, s, piece: Piece::Second, three_way: true, name: "three_way_sigma2" },
        DecouplingSymbol { m, s, piece: Piece::Third, three_way: true, name: "three_way_sigma3" },
    )
}

/// T_σ(f,g)(x) = Σ_{k,l} σ(ξ_k, ξ_l) f̂_k ĝ_l e^{ix(ξ_k+ξ_l)}, grouped by the aliased sum
/// frequency and finished with one inverse transform.
pub fn eval_tsigma<T>(sigma: &dyn BilinearSymbol, f: &GridFunction<T>, g: &GridFunction<T>) -> GridFunction<Complex64>
where
    T: crate::grid::Sample,
{
    let grid = f.grid();
    let (fs, gs) = (to_spectral(f), to_spectral(g));
    let (fc, gc) = (fs.coefficients(), gs.coefficients());
    let m = grid.len();
    let freq: Vec<Freq> = (0..m).map(|k| grid.frequency(k)).collect();
    let buckets: Vec<Complex64> = (0..m)
        .into_par_iter()
        .map(|sum| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                let l = grid.sub_index(sum, k);
                let (a, b) = (fc[k], gc[l]);
                if a.norm_sqr() == 0.0 || b.norm_sqr() == 0.0 {
                    continue;
                }
                acc += sigma.eval(freq[k], freq[l]) * a * b;
            }
            acc
        })
        .collect();
    let spec = SpectralFunction::new(grid, buckets).expect("bucket count matches grid");
    from_spectral(&spec)
}

/// Kernel k(u, v) = L^{-2n} Σ σ(ξ_k, ξ_l) e^{i(u ξ_k + v ξ_l)} on the 2n-dimensional grid.
#[derive(Clone, Debug)]
pub struct SymbolKernel {
    grid: PeriodicGrid,
    values: Vec<Complex64>,
}

/// Largest N for which a 2n = 4 dimensional kernel table is built.
pub const KERNEL_MAX_N_2D: usize = 32;

impl SymbolKernel {
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// k at offsets (u, v) given as flat grid indices.
    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.values[u * self.grid.len() + v]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

fn kernel_from_table(grid: &PeriodicGrid, mut table: Vec<Complex64>) -> SymbolKernel {
    grid.transform_axes(&mut table, 2 * grid.dim(), true);
    let scale = grid.volume().powi(2).recip();
    for v in &mut table {
        *v *= scale;
    }
    SymbolKernel { grid: grid.clone(), values: table }
}

pub fn symbol_kernel(sigma: &dyn BilinearSymbol, grid: &PeriodicGrid) -> Result<SymbolKernel> {
    if grid.dim() == 2 && grid.size() > KERNEL_MAX_N_2D {
        return precondition(format!("symbol kernel in n=2 needs N <= {KERNEL_MAX_N_2D}"));
    }
    let m = grid.len();
    let freq: Vec<Freq> = (0..m).map(|k| grid.frequency(k)).collect();
    let table: Vec<Complex64> = (0..m * m).into_par_iter().map(|i| sigma.eval(freq[i / m], freq[i % m])).collect();
    Ok(kernel_from_table(grid, table))
}

/// sup |k(u,v)| (|u|+|v|)^{2n-s} over h ≤ |u|+|v| ≤ L/4.
pub fn kernel_decay_constant(sigma: &dyn BilinearSymbol, grid: &PeriodicGrid, s: f64) -> Result<f64> {
    let n = grid.dim() as f64;
    if !(s > 0.0 && s < 2.0 * n) {
        return precondition(format!("s must lie in (0, 2n), got {s}"));
    }
    let k = symbol_kernel(sigma, grid)?;
    Ok(decay_sup(&k, 2.0 * n - s))
}

fn decay_sup(k: &SymbolKernel, power: f64) -> f64 {
    let grid = &k.grid;
    let m = grid.len();
    let (h, cap) = (grid.spacing(), grid.length() / 4.0);
    let dist: Vec<f64> = (0..m).map(|o| grid.offset_norm(o)).collect();
    let mut sup: f64 = 0.0;
    for u in 0..m {
        for v in 0..m {
            let d = dist[u] + dist[v];
            if d >= h * (1.0 - 1e-12) && d <= cap {
                sup = sup.max(k.get(u, v).norm() * d.powf(power));
            }
        }
    }
    sup
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShellRow {
    pub t: f64,
    pub decay_power: u32,
    pub constant: f64,
}

/// For each t: sup over (u, v) of |(Ψ(t·)σ)^∧(u,v)| t^{2n-s} (1 + |(u,v)|/t)^M, M ∈ {2, 4},
/// with Ψ an annulus window on 1 ≤ |(ξ,η)| ≤ 2.
pub fn shell_decay_check(
    sigma: &dyn BilinearSymbol,
    grid: &PeriodicGrid,
    s: f64,
    t_list: &[f64],
) -> Result<Vec<ShellRow>> {
    if grid.dim() == 2 && grid.size() > KERNEL_MAX_N_2D {
        return precondition(format!("symbol kernel in n=2 needs N <= {KERNEL_MAX_N_2D}"));
    }
    let n = grid.dim() as f64;
    let m = grid.len();
    let freq: Vec<Freq> = (0..m).map(|k| grid.frequency(k)).collect();
    let dist: Vec<f64> = (0..m).map(|o| grid.offset_norm(o)).collect();
    let mut rows = Vec::new();
    for &t in t_list {
        if !(t > 0.0) {
            return precondition("shell scale t must be positive");
        }
        let table: Vec<Complex64> = (0..m * m)
            .into_par_iter()
            .map(|i| {
                let (xi, eta) = (freq[i / m], freq[i % m]);
                let w = shell_window(t * (sq(xi) + sq(eta)).sqrt());
                if w == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    sigma.eval(xi, eta) * w
                }
            })
            .collect();
        let k = kernel_from_table(grid, table);
        for power in [2u32, 4] {
            let mut sup: f64 = 0.0;
            for u in 0..m {
                for v in 0..m {
                    let d = (dist[u] * dist[u] + dist[v] * dist[v]).sqrt();
                    let val = k.get(u, v).norm() * t.powf(2.0 * n - s) * (1.0 + d / t).powi(power as i32);
                    sup = sup.max(val);
                }
            }
            rows.push(ShellRow { t, decay_power: power, constant: sup });
        }
    }
    Ok(rows)
}

/// Weight in the seminorm table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeminormWeight {
    /// (1+|ξ|+|η|)^{-m+|β|+|γ|}.
    Inhomogeneous { order: f64 },
    /// (|ξ|+|η|)^{|β|+|γ|}, frequencies with |ξ|+|η| < 1 skipped.
    CoifmanMeyer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeminormEntry {
    pub beta: [usize; 2],
    pub gamma: [usize; 2],
    pub value: f64,
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Multi-indices of the 2n frequency variables with total order ≤ max_order.
fn multi_indices(vars: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..vars {
        let mut next = Vec::new();
        for head in &out {
            let used: usize = head.iter().sum();
            for k in 0..=max_order - used {
                let mut v = head.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));
    out
}

/// Central-difference estimates of sup |∂_ξ^β ∂_η^γ σ| × weight, step 2π/L.
pub fn seminorm_estimate(
    sigma: &dyn BilinearSymbol,
    grid: &PeriodicGrid,
    max_order: usize,
    weight: SeminormWeight,
) -> Result<Vec<SeminormEntry>> {
    if max_order > 4 {
        return precondition("max_order must be at most 4");
    }
    let n = grid.dim();
    let delta = 2.0 * std::f64::consts::PI / grid.length();
    let m = grid.len();
    let freq: Vec<Freq> = (0..m).map(|k| grid.frequency(k)).collect();
    let mut out = Vec::new();
    for idx in multi_indices(2 * n, max_order) {
        let order: usize = idx.iter().sum();
        let mut beta = [0usize; 2];
        let mut gamma = [0usize; 2];
        beta[..n].copy_from_slice(&idx[..n]);
        gamma[..n].copy_from_slice(&idx[n..]);
        // Stencil: product over variables of Σ_j (-1)^j C(k,j) at offset (k/2 - j)δ.
        let mut stencil: Vec<(Vec<f64>, f64)> = vec![(vec![0.0; 2 * n], 1.0)];
        for (var, &k) in idx.iter().enumerate() {
            let mut next = Vec::new();
            for (shift, c) in &stencil {
                for j in 0..=k {
                    let mut sh = shift.clone();
                    sh[var] = (k as f64 / 2.0 - j as f64) * delta;
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    next.push((sh, c * sign * binomial(k, j)));
                }
            }
            stencil = next;
        }
        let scale = delta.powi(-(order as i32));
        let sup = (0..m * m)
            .into_par_iter()
            .map(|i| {
                let (xi, eta) = (freq[i / m], freq[i % m]);
                let size = xi[0].hypot(xi[1]) + eta[0].hypot(eta[1]);
                let w = match weight {
                    SeminormWeight::Inhomogeneous { order: mo } => (1.0 + size).powf(-mo + order as f64),
                    SeminormWeight::CoifmanMeyer => {
                        if size < 1.0 {
                            return 0.0;
                        }
                        size.powi(order as i32)
                    }
                };
                let mut d = Complex64::new(0.0, 0.0);
                for (sh, c) in &stencil {
                    let mut x = xi;
                    let mut y = eta;
                    for a in 0..n {
                        x[a] += sh[a];
                        y[a] += sh[n + a];
                    }
                    d += sigma.eval(x, y) * c;
                }
                d.norm() * scale * w
            })
            .reduce(|| 0.0, f64::max);
        out.push(SeminormEntry { beta, gamma, value: sup });
    }
    Ok(out)
}

/// Kernel row k(y) = L^{-n} Σ σ₀(ζ) e^{iyζ} of an even real one-variable multiplier.
pub fn theta_kernel(grid: &PeriodicGrid, sigma0: &dyn Fn(Freq) -> f64) -> GridFunction {
    let scale = grid.volume().recip();
    let coefficients = (0..grid.len()).map(|k| real(scale * sigma0(grid.frequency(k)))).collect();
    let spec = SpectralFunction::new(grid, coefficients).expect("coefficient count matches grid");
    from_spectral::<Complex64>(&spec).re()
}

/// T(f,g)(x) = Σ_y h^n k(y) f(x+y) g(x-y), the θ = π/4 operator with k = σ₀^∧
/// (σ₀ even and real).
pub fn eval_ttheta(sigma0: &dyn Fn(Freq) -> f64, f: &GridFunction, g: &GridFunction) -> GridFunction {
    let grid = f.grid();
    let k = theta_kernel(grid, sigma0);
    let hv = grid.cell_volume();
    let (kv, fv, gv) = (k.values(), f.values(), g.values());
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|x| pairwise_sum(grid.len(), &|y| hv * kv[y] * fv[grid.add_index(x, y)] * gv[grid.sub_index(x, y)]))
        .collect();
    GridFunction::new(grid, out).expect("grid sizes match")
}

/// Smallest C with h^n |k(y)| ≤ C w_s(y) at every offset, w_s the ℬ_s quadrature weights;
/// then |T(f,g)| ≤ C ℬ_s(|f|,|g|) holds term by term.
pub fn ttheta_domination_constant(grid: &PeriodicGrid, sigma0: &dyn Fn(Freq) -> f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < grid.dim() as f64) {
        return precondition("s must lie in (0, n)");
    }
    let k = theta_kernel(grid, sigma0);
    let w = linear_weights(grid, s);
    let hv = grid.cell_volume();
    Ok((0..grid.len()).fold(0.0f64, |c, y| c.max(hv * k.get(y).abs() / w[y])))
}

/// Smallest C with h^{2n}|k(u,v)| ≤ C W_s(u,v) at every offset pair, W_s the ℐ_s weights;
/// then |T_σ(f,g)| ≤ C ℐ_s(|f|,|g|) holds term by term.
pub fn newbond_domination_constant(sigma: &dyn BilinearSymbol, grid: &PeriodicGrid, s: f64) -> Result<f64> {
    let w = bilinear_i_weights(grid, FracOrder(s))?;
    let k = symbol_kernel(sigma, grid)?;
    let h2 = grid.cell_volume().powi(2);
    Ok(k.values().iter().zip(&w).fold(0.0f64, |c, (kv, wv)| c.max(h2 * kv.norm() / wv)))
}

type SymbolBuilder = fn(&Value) -> Result<Box<dyn BilinearSymbol>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValueParams {
    #[serde(default = "one")]
    value: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SParams {
    s: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AParams {
    #[serde(default = "one")]
    a: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MParams {
    m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MsParams {
    m: f64,
    s: f64,
}

fn one() -> f64 {
    1.0
}

fn parse<T: for<'de> Deserialize<'de>>(key: &str, v: &Value) -> Result<T> {
    let v = if v.is_null() { Value::Object(Default::default()) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| Error::Config(format!("symbol {key}: {e}")))
}

fn decoupling(key: &str, v: &Value, piece: Piece, three_way: bool) -> Result<Box<dyn BilinearSymbol>> {
    let p: MsParams = parse(key, v)?;
    Ok(Box::new(DecouplingSymbol::new(p.m, p.s, piece, three_way)?))
}

/// Symbols nameable in experiment configs.
pub struct SymbolRegistry {
    entries: BTreeMap<&'static str, (&'static str, SymbolBuilder)>,
}

impl Default for SymbolRegistry {
    fn default() -> Self {
        let mut entries: BTreeMap<&'static str, (&'static str, SymbolBuilder)> = BTreeMap::new();
        entries.insert("constant", ("σ ≡ value", |v| {
            let p: ValueParams = parse("constant", v)?;
            Ok(Box::new(ConstantSymbol { value: p.value }))
        }));
        entries.insert("bessel_order", ("(1+|ξ|²+|η|²)^{-s/2}", |v| {
            let p: SParams = parse("bessel_order", v)?;
            Ok(Box::new(BesselSymbol { s: p.s }))
        }));
        entries.insert("homogeneous_order", ("|(ξ,η)|^{-s}, 0 at the origin", |v| {
            let p: SParams = parse("homogeneous_order", v)?;
            Ok(Box::new(HomogeneousSymbol { s: p.s }))
        }));
        entries.insert("gaussian", ("e^{-a(|ξ|²+|η|²)}", |v| {
            let p: AParams = parse("gaussian", v)?;
            Ok(Box::new(GaussianSymbol { a: p.a }))
        }));
        entries.insert("jm_product", ("(1+|ξ+η|²)^{m/2}", |v| {
            let p: MParams = parse("jm_product", v)?;
            Ok(Box::new(JmProductSymbol { m: p.m }))
        }));
        entries.insert("cm_sigma1", ("two-way decoupling piece, η dominant", |v| {
            decoupling("cm_sigma1", v, Piece::First, false)
        }));
        entries.insert("cm_sigma2", ("two-way decoupling piece, ξ dominant", |v| {
            decoupling("cm_sigma2", v, Piece::Second, false)
        }));
        entries.insert("three_way_sigma1", ("three-way decoupling piece, η dominant", |v| {
            decoupling("three_way_sigma1", v, Piece::First, true)
        }));
        entries.insert("three_way_sigma2", ("three-way decoupling piece, ξ dominant", |v| {
            decoupling("three_way_sigma2", v, Piece::Second, true)
        }));
        entries.insert("three_way_sigma3", ("three-way decoupling piece, balanced", |v| {
            decoupling("three_way_sigma3", v, Piece::Third, true)
        }));
        entries.insert("theta_bessel", ("(1+|ξ-η|²)^{-s/2}, θ = π/4", |v| {
            let p: SParams = parse("theta_bessel", v)?;
            Ok(Box::new(ThetaBesselSymbol { s: p.s }))
        }));
        Self { entries }
    }
}

impl SymbolRegistry {
    pub fn build(&self, key: &str, params: &Value) -> Result<Box<dyn BilinearSymbol>> {
        match self.entries.get(key) {
            Some((_, b)) => b(params),
            None => Err(Error::Config(format!("unknown symbol {key:?}"))),
        }
    }

    pub fn list(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(k, (d, _))| (*k, *d)).collect()
    }
}
