//! Periodic grids on the n-torus, sampled functions, spectral transforms,
//! midpoint quadrature and torus balls.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{precondition, Error, Result};

/// A point on the torus. Only the first `dim` coordinates are used.
pub type Point = [f64; 2];

/// A frequency vector. Only the first `dim` components are used.
pub type Freq = [f64; 2];

#[derive(Clone)]
pub struct PeriodicGrid {
    dim: usize,
    size: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("dim", &self.dim)
            .field("size", &self.size)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.size == other.size && self.length == other.length
    }
}

impl PeriodicGrid {
    pub fn new(dim: usize, size: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return precondition(format!("dimension must be 1 or 2, got {dim}"));
        }
        if size < 8 || !size.is_power_of_two() {
            return precondition(format!("N must be a power of two >= 8, got {size}"));
        }
        if !(length.is_finite() && length > 0.0) {
            return precondition(format!("period length must be positive, got {length}"));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        Ok(Self { dim, size, length, forward, inverse })
    }

    /// Grid on the standard torus of period 2π.
    pub fn standard(dim: usize, size: usize) -> Result<Self> {
        Self::new(dim, size, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.size as f64
    }

    /// h^n, the volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of grid points N^n.
    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// L^n.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Same dimension and period, different resolution.
    pub fn with_size(&self, size: usize) -> Result<Self> {
        Self::new(self.dim, size, self.length)
    }

    pub fn split(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.size, idx % self.size]
        }
    }

    pub fn join(&self, m: [usize; 2]) -> usize {
        if self.dim == 1 {
            m[0]
        } else {
            m[0] * self.size + m[1]
        }
    }

    pub fn point(&self, idx: usize) -> Point {
        let h = self.spacing();
        let m = self.split(idx);
        if self.dim == 1 {
            [m[0] as f64 * h, 0.0]
        } else {
            [m[0] as f64 * h, m[1] as f64 * h]
        }
    }

    /// Signed integer wavenumber in [-N/2, N/2) for a transform index along one axis.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.size as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Physical frequency vector ξ_k = 2πk/L of a flat spectral index.
    pub fn frequency(&self, idx: usize) -> Freq {
        let m = self.split(idx);
        let scale = 2.0 * PI / self.length;
        let mut xi = [0.0; 2];
        for (a, x) in xi.iter_mut().enumerate().take(self.dim) {
            *x = scale * self.wavenumber(m[a]) as f64;
        }
        xi
    }

    /// True when the flat spectral index has the Nyquist wavenumber -N/2 along `axis`.
    pub fn is_nyquist(&self, idx: usize, axis: usize) -> bool {
        self.split(idx)[axis] == self.size / 2
    }

    pub fn torus_dist(&self, x: &Point, y: &Point) -> f64 {
        let mut s = 0.0;
        for a in 0..self.dim {
            let d = axis_dist(x[a] - y[a], self.length);
            s += d * d;
        }
        s.sqrt()
    }

    /// Torus length of the displacement encoded by a flat offset index.
    pub fn offset_norm(&self, off: usize) -> f64 {
        let h = self.spacing();
        let m = self.split(off);
        let mut s = 0.0;
        for &o in m.iter().take(self.dim) {
            let k = o.min(self.size - o) as f64 * h;
            s += k * k;
        }
        s.sqrt()
    }

    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let (ma, mb) = (self.split(a), self.split(b));
        let n = self.size;
        self.join([(ma[0] + mb[0]) % n, (ma[1] + mb[1]) % n])
    }

    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        let (ma, mb) = (self.split(a), self.split(b));
        let n = self.size;
        self.join([(ma[0] + n - mb[0]) % n, (ma[1] + n - mb[1]) % n])
    }

    /// Index of k·offset for an integer multiplier k.
    pub fn scale_index(&self, k: i64, off: usize) -> usize {
        let m = self.split(off);
        let n = self.size as i64;
        let s = |o: usize| ((k * o as i64).rem_euclid(n)) as usize;
        self.join([s(m[0]), s(m[1])])
    }

    /// Nearest grid index to a point (ties round down).
    pub fn nearest_index(&self, x: &Point) -> usize {
        let h = self.spacing();
        let mut m = [0usize; 2];
        for a in 0..self.dim {
            let t = (x[a].rem_euclid(self.length) / h).round() as usize;
            m[a] = t % self.size;
        }
        self.join(m)
    }

    /// Forward (unnormalized) or inverse (unnormalized) DFT over the n grid axes.
    pub(crate) fn transform(&self, data: &mut [Complex64], inverse: bool) {
        self.transform_axes(data, self.dim, inverse);
    }

    /// DFT along `axes` axes of length N, laid out row-major. Used for 2n-dimensional
    /// symbol tables as well as for grid functions.
    pub(crate) fn transform_axes(&self, data: &mut [Complex64], axes: usize, inverse: bool) {
        let n = self.size;
        debug_assert_eq!(data.len(), n.pow(axes as u32));
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Last axis is contiguous: one batched call.
        plan.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..axes.saturating_sub(1) {
            let stride = n.pow((axes - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[start + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[start + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Minimal-image distance along one periodic axis.
pub fn axis_dist(d: f64, length: f64) -> f64 {
    // |d| first so that axis_dist(d) and axis_dist(-d) agree bit for bit.
    let r = d.abs().rem_euclid(length);
    r.min(length - r)
}

/// Scalar types a grid function may hold.
pub trait Sample:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn to_complex(self) -> Complex64;
    /// Real samples keep the real part.
    fn from_complex(c: Complex64) -> Self;
    fn scale(self, a: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Sample for f64 {
    fn zero() -> Self {
        0.0
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(c: Complex64) -> Self {
        c.re
    }
    fn scale(self, a: f64) -> Self {
        self * a
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Sample for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(c: Complex64) -> Self {
        c
    }
    fn scale(self, a: f64) -> Self {
        self * a
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Samples of a function at every grid point, lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T: Sample = f64> {
    grid: PeriodicGrid,
    values: Vec<T>,
}

impl<T: Sample> GridFunction<T> {
    pub fn new(grid: &PeriodicGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return precondition(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            ));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(Point) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn constant(grid: &PeriodicGrid, c: T) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, idx: usize) -> T {
        self.values[idx]
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> GridFunction<U> {
        GridFunction { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with<U: Sample, V: Sample>(
        &self,
        other: &GridFunction<U>,
        f: impl Fn(T, U) -> V,
    ) -> GridFunction<V> {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        GridFunction { grid: self.grid.clone(), values }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| v.scale(a))
    }

    pub fn abs(&self) -> GridFunction<f64> {
        self.map(|v| v.modulus())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    pub fn to_complex(&self) -> GridFunction<Complex64> {
        self.map(|v| v.to_complex())
    }

    /// Zero outside the region.
    pub fn masked(&self, region: &Region) -> Self {
        let mut values = vec![T::zero(); self.values.len()];
        for i in region.indices(&self.grid) {
            values[i] = self.values[i];
        }
        Self { grid: self.grid.clone(), values }
    }
}

impl GridFunction<Complex64> {
    pub fn re(&self) -> GridFunction<f64> {
        self.map(|c| c.re)
    }

    pub fn im(&self) -> GridFunction<f64> {
        self.map(|c| c.im)
    }
}

/// Fourier coefficients c_k = N^{-n} Σ_j f(x_j) e^{-i x_j·ξ_k}, stored in transform order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    grid: PeriodicGrid,
    coefficients: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(grid: &PeriodicGrid, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return precondition("coefficient count must equal N^n");
        }
        Ok(Self { grid: grid.clone(), coefficients })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient of the integer wavenumber vector `k` (unused components ignored).
    pub fn coefficient(&self, k: [i64; 2]) -> Complex64 {
        let n = self.grid.size as i64;
        let m = [k[0].rem_euclid(n) as usize, k[1].rem_euclid(n) as usize];
        self.coefficients[self.grid.join(m)]
    }

    /// Pointwise multiplication of coefficients by m(ξ_k).
    pub fn multiply(&self, m: impl Fn(Freq) -> Complex64) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| c * m(self.grid.frequency(i)))
            .collect();
        Self { grid: self.grid.clone(), coefficients }
    }
}

pub fn to_spectral<T: Sample>(f: &GridFunction<T>) -> SpectralFunction {
    let grid = f.grid();
    let mut data: Vec<Complex64> = f.values().iter().map(|v| v.to_complex()).collect();
    grid.transform(&mut data, false);
    let norm = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= norm;
    }
    SpectralFunction { grid: grid.clone(), coefficients: data }
}

pub fn from_spectral<T: Sample>(s: &SpectralFunction) -> GridFunction<T> {
    let mut data = s.coefficients.clone();
    s.grid.transform(&mut data, true);
    GridFunction { grid: s.grid.clone(), values: data.into_iter().map(T::from_complex).collect() }
}

/// Fourier multiplier m(ξ) applied to f.
pub fn apply_multiplier<T: Sample>(f: &GridFunction<T>, m: impl Fn(Freq) -> f64) -> GridFunction<T> {
    from_spectral(&to_spectral(f).multiply(|xi| Complex64::new(m(xi), 0.0)))
}

/// Spectral gradient; the Nyquist mode of each differentiated axis is zeroed.
pub fn gradient(f: &GridFunction<f64>) -> Vec<GridFunction<f64>> {
    let grid = f.grid();
    let spec = to_spectral(f);
    (0..grid.dim())
        .map(|axis| {
            let coefficients = spec
                .coefficients()
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    if grid.is_nyquist(i, axis) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c * Complex64::new(0.0, grid.frequency(i)[axis])
                    }
                })
                .collect();
            from_spectral(&SpectralFunction { grid: grid.clone(), coefficients })
        })
        .collect()
}

/// |∇f| pointwise.
pub fn gradient_modulus(f: &GridFunction<f64>) -> GridFunction<f64> {
    let parts = gradient(f);
    let values = (0..f.grid().len())
        .map(|i| parts.iter().map(|p| p.get(i) * p.get(i)).sum::<f64>().sqrt())
        .collect();
    GridFunction { grid: f.grid().clone(), values }
}

/// Open metric ball on the torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return precondition(format!("ball radius must be positive, got {radius}"));
        }
        Ok(Self { center, radius })
    }

    pub fn dilate(&self, factor: f64) -> Self {
        Self { center: self.center, radius: self.radius * factor }
    }

    pub fn contains(&self, grid: &PeriodicGrid, x: &Point) -> bool {
        grid.torus_dist(&self.center, x) < self.radius
    }

    /// Grid indices strictly inside the ball, ascending.
    pub fn indices(&self, grid: &PeriodicGrid) -> Vec<usize> {
        (0..grid.len()).filter(|&i| self.contains(grid, &grid.point(i))).collect()
    }

    /// |B| by midpoint quadrature of the indicator.
    pub fn measure(&self, grid: &PeriodicGrid) -> f64 {
        self.indices(grid).len() as f64 * grid.cell_volume()
    }

    /// Errors unless r(B) ≥ 2h, the floor for every norm computed on a ball.
    pub fn check_resolved(&self, grid: &PeriodicGrid) -> Result<()> {
        if self.radius < 2.0 * grid.spacing() {
            return Err(Error::DegenerateBall);
        }
        Ok(())
    }
}

/// Integration region: a ball or the whole torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Ball(Ball),
    Torus,
}

impl Region {
    pub fn indices(&self, grid: &PeriodicGrid) -> Vec<usize> {
        match self {
            Region::Ball(b) => b.indices(grid),
            Region::Torus => (0..grid.len()).collect(),
        }
    }

    pub fn measure(&self, grid: &PeriodicGrid) -> f64 {
        match self {
            Region::Ball(b) => b.measure(grid),
            Region::Torus => grid.volume(),
        }
    }

    /// Radius used by dilation-dependent formulas; the torus counts as radius L/2.
    pub fn radius(&self, grid: &PeriodicGrid) -> f64 {
        match self {
            Region::Ball(b) => b.radius,
            Region::Torus => grid.length() / 2.0,
        }
    }

    /// The dilate θB, replaced by the whole torus once θ r ≥ L/2.
    pub fn dilated(ball: &Ball, factor: f64, grid: &PeriodicGrid) -> Region {
        let b = ball.dilate(factor);
        if b.radius >= grid.length() / 2.0 {
            Region::Torus
        } else {
            Region::Ball(b)
        }
    }
}

/// Deterministic pairwise summation of term(0..len).
pub fn pairwise_sum(len: usize, term: &impl Fn(usize) -> f64) -> f64 {
    pairwise_range(0, len, term)
}

fn pairwise_range(lo: usize, hi: usize, term: &impl Fn(usize) -> f64) -> f64 {
    if hi - lo <= 32 {
        let mut s = 0.0;
        for i in lo..hi {
            s += term(i);
        }
        s
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_range(lo, mid, term) + pairwise_range(mid, hi, term)
    }
}

/// Midpoint rule h^n Σ_{x_j ∈ region} f(x_j).
pub fn quad_integral(f: &GridFunction<f64>, region: &Region) -> Result<f64> {
    let grid = f.grid();
    if let Region::Ball(b) = region {
        if b.radius < grid.spacing() {
            return Err(Error::DegenerateBall);
        }
    }
    let idx = region.indices(grid);
    if idx.is_empty() {
        return Err(Error::DegenerateBall);
    }
    let v = f.values();
    Ok(grid.cell_volume() * pairwise_sum(idx.len(), &|i| v[idx[i]]))
}

/// (h^n Σ |f|^p)^{1/p} over the region; p = ∞ gives the maximum of |f| there.
pub fn lp_norm(f: &GridFunction<f64>, p: f64, region: &Region) -> f64 {
    let idx = region.indices(f.grid());
    lp_norm_on(f, p, &idx)
}

pub(crate) fn lp_norm_on(f: &GridFunction<f64>, p: f64, idx: &[usize]) -> f64 {
    let v = f.values();
    if p.is_infinite() {
        return idx.iter().fold(0.0, |m, &i| m.max(v[i].abs()));
    }
    let s = pairwise_sum(idx.len(), &|i| v[idx[i]].abs().powf(p));
    (f.grid().cell_volume() * s).powf(1.0 / p)
}

/// Average of |f|^p over the index set, raised to 1/p (maximum for p = ∞).
pub(crate) fn lp_average_on(f: &GridFunction<f64>, p: f64, idx: &[usize]) -> f64 {
    let v = f.values();
    if p.is_infinite() {
        return idx.iter().fold(0.0, |m, &i| m.max(v[i].abs()));
    }
    let s = pairwise_sum(idx.len(), &|i| v[idx[i]].abs().powf(p));
    (s / idx.len() as f64).powf(1.0 / p)
}

/// Average of a positive function over the index set.
pub(crate) fn mean_on(values: &[f64], idx: &[usize]) -> f64 {
    pairwise_sum(idx.len(), &|i| values[idx[i]]) / idx.len() as f64
}
