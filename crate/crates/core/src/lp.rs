//! Inhomogeneous Littlewood–Paley ladder, Bony paraproduct, exact product reconstruction,
//! and the Sobolev multipliers J^s, D^s.
//!
//! Levels: S_j has multiplier φ̂(2^{-j}ξ), Δ_j = S_{j+1} - S_j, for -1 ≤ j ≤ j_max.
//! S_{j_max+1} is the identity on the grid, so S_0 + Σ_{j=0}^{j_max} Δ_j = I exactly.
//!
//! Π(f,g) = Σ_{j=0}^{j_max} Δ_j f · S_{j-1} g + S_0 f · S_0 g, and
//! fg = Π(f,g) + Π(g,f) + R_{-1} + R_0 + R_1 with
//!   R_m = Σ_j Δ_j f · Δ_{j+m} g over levels 0..=j_max,
//!   R_{-1} += Δ_0 f · Δ_{-1} g,  R_1 += Δ_{-1} f · Δ_0 g,  R_0 -= S_0 f · S_0 g.

use crate::cutoff::lp_base;
use crate::error::{precondition, Result};
use crate::grid::{apply_multiplier, lp_norm, to_spectral, Freq, GridFunction, PeriodicGrid, Region};

fn modulus(xi: Freq) -> f64 {
    xi[0].hypot(xi[1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpFamily {
    grid: PeriodicGrid,
    j_max: i32,
}

impl LpFamily {
    /// j_max = ⌊log₂(N/3)⌋, raised until φ̂(2^{-j_max-1}ξ) = 1 at every grid frequency.
    pub fn new(grid: &PeriodicGrid) -> Self {
        let mut j_max = ((grid.size() as f64 / 3.0).log2().floor() as i32).max(0);
        let top = (0..grid.len()).map(|k| modulus(grid.frequency(k))).fold(0.0, f64::max);
        while lp_base(top * 2f64.powi(-j_max - 1)) < 1.0 {
            j_max += 1;
        }
        Self { grid: grid.clone(), j_max }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn j_max(&self) -> usize {
        self.j_max as usize
    }

    /// Multiplier of S_j.
    pub fn s_symbol(&self, j: i32, xi: Freq) -> f64 {
        lp_base(2f64.powi(-j) * modulus(xi))
    }

    /// Multiplier of Δ_j, the shell ψ̂(2^{-j}ξ).
    pub fn delta_symbol(&self, j: i32, xi: Freq) -> f64 {
        self.s_symbol(j + 1, xi) - self.s_symbol(j, xi)
    }

    fn check_level(&self, j: usize) -> Result<()> {
        if j as i32 > self.j_max {
            return precondition(format!("level {j} outside 0..={}", self.j_max));
        }
        Ok(())
    }

    fn s_level(&self, f: &GridFunction, j: i32) -> GridFunction {
        apply_multiplier(f, |xi| self.s_symbol(j, xi))
    }

    fn delta_level(&self, f: &GridFunction, j: i32) -> GridFunction {
        apply_multiplier(f, |xi| self.delta_symbol(j, xi))
    }

    pub fn sj(&self, f: &GridFunction, j: usize) -> Result<GridFunction> {
        self.check_level(j)?;
        Ok(self.s_level(f, j as i32))
    }

    pub fn delta_j(&self, f: &GridFunction, j: usize) -> Result<GridFunction> {
        self.check_level(j)?;
        Ok(self.delta_level(f, j as i32))
    }

    /// Δ_{-1} f, ..., Δ_{j_max} f.
    fn ladder(&self, f: &GridFunction) -> Vec<GridFunction> {
        (-1..=self.j_max).map(|j| self.delta_level(f, j)).collect()
    }

    pub fn bony_paraproduct(&self, f: &GridFunction, g: &GridFunction) -> GridFunction {
        let df = self.ladder(f);
        self.paraproduct_from(&df, f, g)
    }

    fn paraproduct_from(&self, df: &[GridFunction], f: &GridFunction, g: &GridFunction) -> GridFunction {
        let mut out = self.s_level(f, 0).mul(&self.s_level(g, 0));
        for j in 0..=self.j_max {
            out = out.add(&df[(j + 1) as usize].mul(&self.s_level(g, j - 1)));
        }
        out
    }

    /// Remainders R_{-1}, R_0, R_1.
    pub fn remainders(&self, f: &GridFunction, g: &GridFunction) -> [GridFunction; 3] {
        let (df, dg) = (self.ladder(f), self.ladder(g));
        self.remainders_from(&df, &dg, f, g)
    }

    fn at(v: &[GridFunction], j: i32) -> &GridFunction {
        &v[(j + 1) as usize]
    }

    fn remainders_from(
        &self,
        df: &[GridFunction],
        dg: &[GridFunction],
        f: &GridFunction,
        g: &GridFunction,
    ) -> [GridFunction; 3] {
        let grid = f.grid();
        // df[j + 1] = Δ_j f.
        let mut r = [GridFunction::zeros(grid), GridFunction::zeros(grid), GridFunction::zeros(grid)];
        for (slot, m) in [-1i32, 0, 1].into_iter().enumerate() {
            for j in 0..=self.j_max {
                let k = j + m;
                if (0..=self.j_max).contains(&k) {
                    r[slot] = r[slot].add(&Self::at(df, j).mul(Self::at(dg, k)));
                }
            }
        }
        r[0] = r[0].add(&Self::at(df, 0).mul(Self::at(dg, -1)));
        r[2] = r[2].add(&Self::at(df, -1).mul(Self::at(dg, 0)));
        r[1] = r[1].sub(&self.s_level(f, 0).mul(&self.s_level(g, 0)));
        r
    }

    /// ‖fg - Π(f,g) - Π(g,f) - ΣR_m‖_∞ / ‖fg‖_∞, absolute when fg ≡ 0.
    pub fn reconstruct_product(&self, f: &GridFunction, g: &GridFunction) -> f64 {
        let (res, scale) = self.reconstruction_residual(f, g);
        if scale > 0.0 {
            res / scale
        } else {
            res
        }
    }

    /// (‖fg - Π(f,g) - Π(g,f) - ΣR_m‖_∞, ‖fg‖_∞).
    pub fn reconstruction_residual(&self, f: &GridFunction, g: &GridFunction) -> (f64, f64) {
        let (df, dg) = (self.ladder(f), self.ladder(g));
        let mut sum = self.paraproduct_from(&df, f, g).add(&self.paraproduct_from(&dg, g, f));
        for r in self.remainders_from(&df, &dg, f, g) {
            sum = sum.add(&r);
        }
        let fg = f.mul(g);
        (fg.sub(&sum).sup_norm(), fg.sup_norm())
    }
}

/// J^s, multiplier (1+|ξ|²)^{s/2}.
pub fn bessel_js(f: &GridFunction, s: f64) -> GridFunction {
    apply_multiplier(f, |xi| (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(s / 2.0))
}

/// D^s, multiplier |ξ|^s with the zero mode set to 0 (kept for s = 0).
pub fn riesz_ds(f: &GridFunction, s: f64) -> Result<GridFunction> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        let c0 = to_spectral(f).coefficients()[0].norm();
        if c0 > 1e-12 * f.sup_norm().max(f64::MIN_POSITIVE) {
            return precondition("zero-frequency singularity");
        }
    }
    Ok(apply_multiplier(f, |xi| {
        let r = modulus(xi);
        if r == 0.0 {
            0.0
        } else {
            r.powf(s)
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SobolevVariant {
    Inhom,
    Hom,
}

/// ‖J^s f‖_{L^p} (inhom) or ‖D^s f‖_{L^p} (hom) on the torus.
pub fn sobolev_norm(f: &GridFunction, s: f64, p: f64, variant: SobolevVariant) -> Result<f64> {
    if !(p > 0.0) {
        return precondition("p must be positive");
    }
    let g = match variant {
        SobolevVariant::Inhom => bessel_js(f, s),
        SobolevVariant::Hom => riesz_ds(f, s)?,
    };
    Ok(lp_norm(&g, p, &Region::Torus))
}
