//! Deterministic test functions, family sweeps and power weights.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{precondition, Error, Result};
use crate::grid::{GridFunction, PeriodicGrid, Point};

pub fn make_gaussian(grid: &PeriodicGrid, center: Point, width: f64) -> Result<GridFunction> {
    check_width(grid, width)?;
    let two_w2 = 2.0 * width * width;
    Ok(GridFunction::from_fn(grid, |x| {
        let d = grid.torus_dist(&x, &center);
        (-d * d / two_w2).exp()
    }))
}

/// Smooth compact bump exp(1 - 1/(1 - (d/width)^2)) with peak 1, supported in d < width.
pub fn make_bump(grid: &PeriodicGrid, center: Point, width: f64) -> Result<GridFunction> {
    if !(width > 0.0 && width <= grid.length() / 4.0) {
        return Err(Error::Precondition("support exceeds L/4".into()));
    }
    Ok(GridFunction::from_fn(grid, |x| {
        let t = grid.torus_dist(&x, &center) / width;
        if t < 1.0 {
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    }))
}

/// Gaussian envelope times cos(freq·x₁).
pub fn make_modulated_packet(
    grid: &PeriodicGrid,
    center: Point,
    width: f64,
    freq: f64,
) -> Result<GridFunction> {
    check_width(grid, width)?;
    let unit = 2.0 * std::f64::consts::PI / grid.length();
    let k = freq / unit;
    if (k - k.round()).abs() > 1e-9 {
        return precondition(format!("freq must be an integer multiple of 2π/L, got {freq}"));
    }
    let env = make_gaussian(grid, center, width)?;
    let wave = GridFunction::from_fn(grid, |x| (freq * x[0]).cos());
    Ok(env.mul(&wave))
}

/// Positive band-limited trigonometric polynomial
/// A(1 + ½ M⁻¹ Σ_{0<|k|∞≤d} (a_k cos k·x + b_k sin k·x)), with a_k, b_k ∈ [-1, 1] drawn from
/// ChaCha8 seeded by `seed` and M the number of terms. Degree 0 is the constant A.
pub fn make_trig_poly(grid: &PeriodicGrid, degree: usize, amplitude: f64, seed: u64) -> Result<GridFunction> {
    if degree >= grid.size() / 4 {
        return precondition("trig_poly degree must stay below N/4");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = degree as i64;
    let mut terms: Vec<([i64; 2], f64, f64)> = Vec::new();
    let range2 = if grid.dim() == 2 { -d..=d } else { 0..=0 };
    for k0 in -d..=d {
        for k1 in range2.clone() {
            // One representative per ± pair.
            if (k0, k1) <= (0, 0) {
                continue;
            }
            let a = rng.gen_range(-1.0..=1.0);
            let b = rng.gen_range(-1.0..=1.0);
            terms.push(([k0, k1], a, b));
        }
    }
    let unit = 2.0 * std::f64::consts::PI / grid.length();
    let m = terms.len().max(1) as f64;
    Ok(GridFunction::from_fn(grid, |x| {
        let mut s = 0.0;
        for (k, a, b) in &terms {
            let ph = unit * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
            s += a * ph.cos() + b * ph.sin();
        }
        amplitude * (1.0 + 0.5 * s / m)
    }))
}

/// max(torus_dist(x, x₀), h/2)^a.
pub fn make_power_weight(grid: &PeriodicGrid, a: f64, x0: Point) -> GridFunction {
    let floor = grid.spacing() / 2.0;
    GridFunction::from_fn(grid, |x| grid.torus_dist(&x, &x0).max(floor).powf(a))
}

fn check_width(grid: &PeriodicGrid, width: f64) -> Result<()> {
    if !(width > 0.0) || 3.0 * width > grid.length() / 4.0 {
        return Err(Error::Precondition("support exceeds L/4".into()));
    }
    Ok(())
}

/// One generated family member.
#[derive(Clone, Debug)]
pub struct Member {
    pub label: String,
    pub values: GridFunction,
}

/// A finite, declared sweep of test functions.
pub trait FunctionFamily: Send + Sync {
    fn kind(&self) -> &'static str;
    fn members(&self, grid: &PeriodicGrid) -> Result<Vec<Member>>;
}

/// A center given as a scalar (repeated on every axis) or an explicit pair.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum CenterSpec {
    Scalar(f64),
    Pair([f64; 2]),
}

impl CenterSpec {
    pub fn point(&self, grid: &PeriodicGrid) -> Point {
        match *self {
            CenterSpec::Scalar(c) if grid.dim() == 1 => [c, 0.0],
            CenterSpec::Scalar(c) => [c, c],
            CenterSpec::Pair(p) => p,
        }
    }

    fn label(&self) -> String {
        match self {
            CenterSpec::Scalar(c) => format!("{c}"),
            CenterSpec::Pair(p) => format!("({},{})", p[0], p[1]),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeParams {
    #[allow(dead_code)]
    kind: String,
    centers: Vec<CenterSpec>,
    widths: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PacketParams {
    #[allow(dead_code)]
    kind: String,
    centers: Vec<CenterSpec>,
    widths: Vec<f64>,
    freqs: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigParams {
    #[allow(dead_code)]
    kind: String,
    degrees: Vec<usize>,
    #[serde(default = "unit_amplitudes")]
    amplitudes: Vec<f64>,
    #[serde(default = "zero_seed")]
    seeds: Vec<u64>,
}

fn unit_amplitudes() -> Vec<f64> {
    vec![1.0]
}

fn zero_seed() -> Vec<u64> {
    vec![0]
}

pub struct GaussianFamily {
    centers: Vec<CenterSpec>,
    widths: Vec<f64>,
}

impl GaussianFamily {
    pub fn new(centers: Vec<CenterSpec>, widths: Vec<f64>) -> Self {
        Self { centers, widths }
    }
}

impl FunctionFamily for GaussianFamily {
    fn kind(&self) -> &'static str {
        "gaussian"
    }
    fn members(&self, grid: &PeriodicGrid) -> Result<Vec<Member>> {
        let mut out = Vec::new();
        for c in &self.centers {
            for &w in &self.widths {
                out.push(Member {
                    label: format!("gaussian(c={},w={w})", c.label()),
                    values: make_gaussian(grid, c.point(grid), w)?,
                });
            }
        }
        Ok(out)
    }
}

pub struct BumpFamily {
    centers: Vec<CenterSpec>,
    widths: Vec<f64>,
}

impl FunctionFamily for BumpFamily {
    fn kind(&self) -> &'static str {
        "bump"
    }
    fn members(&self, grid: &PeriodicGrid) -> Result<Vec<Member>> {
        let mut out = Vec::new();
        for c in &self.centers {
            for &w in &self.widths {
                out.push(Member {
                    label: format!("bump(c={},w={w})", c.label()),
                    values: make_bump(grid, c.point(grid), w)?,
                });
            }
        }
        Ok(out)
    }
}

pub struct PacketFamily {
    centers: Vec<CenterSpec>,
    widths: Vec<f64>,
    freqs: Vec<f64>,
}

impl PacketFamily {
    pub fn new(centers: Vec<CenterSpec>, widths: Vec<f64>, freqs: Vec<f64>) -> Self {
        Self { centers, widths, freqs }
    }
}

impl FunctionFamily for PacketFamily {
    fn kind(&self) -> &'static str {
        "modulated_packet"
    }
    fn members(&self, grid: &PeriodicGrid) -> Result<Vec<Member>> {
        let mut out = Vec::new();
        for c in &self.centers {
            for &w in &self.widths {
                for &k in &self.freqs {
                    out.push(Member {
                        label: format!("packet(c={},w={w},k={k})", c.label()),
                        values: make_modulated_packet(grid, c.point(grid), w, k)?,
                    });
                }
            }
        }
        Ok(out)
    }
}

pub struct TrigPolyFamily {
    degrees: Vec<usize>,
    amplitudes: Vec<f64>,
    seeds: Vec<u64>,
}

impl TrigPolyFamily {
    pub fn new(degrees: Vec<usize>, amplitudes: Vec<f64>, seeds: Vec<u64>) -> Self {
        Self { degrees, amplitudes, seeds }
    }
}

impl FunctionFamily for TrigPolyFamily {
    fn kind(&self) -> &'static str {
        "trig_poly"
    }
    fn members(&self, grid: &PeriodicGrid) -> Result<Vec<Member>> {
        let mut out = Vec::new();
        for &d in &self.degrees {
            for &a in &self.amplitudes {
                for &s in &self.seeds {
                    out.push(Member {
                        label: format!("trig(d={d},A={a},seed={s})"),
                        values: make_trig_poly(grid, d, a, s)?,
                    });
                }
            }
        }
        Ok(out)
    }
}

pub struct ConstantFamily {
    values: Vec<f64>,
}

impl FunctionFamily for ConstantFamily {
    fn kind(&self) -> &'static str {
        "constant"
    }
    fn members(&self, grid: &PeriodicGrid) -> Result<Vec<Member>> {
        Ok(self
            .values
            .iter()
            .map(|&c| Member { label: format!("constant({c})"), values: GridFunction::constant(grid, c) })
            .collect())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    #[allow(dead_code)]
    kind: String,
    values: Vec<f64>,
}

type FamilyBuilder = fn(&Value) -> Result<Box<dyn FunctionFamily>>;

/// Family kinds by registry key.
pub struct FamilyRegistry {
    entries: BTreeMap<&'static str, (&'static str, FamilyBuilder)>,
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Config(format!("family: {e}")))
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("family parameter `{name}` is empty")));
    }
    Ok(())
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        let mut entries: BTreeMap<&'static str, (&'static str, FamilyBuilder)> = BTreeMap::new();
        entries.insert(
            "gaussian",
            ("exp(-d(x,c)^2/(2w^2)) over centers x widths", |v| {
                let p: EnvelopeParams = parse(v)?;
                nonempty("centers", &p.centers)?;
                nonempty("widths", &p.widths)?;
                Ok(Box::new(GaussianFamily { centers: p.centers, widths: p.widths }))
            }),
        );
        entries.insert(
            "bump",
            ("compact C^inf bump over centers x widths", |v| {
                let p: EnvelopeParams = parse(v)?;
                nonempty("centers", &p.centers)?;
                nonempty("widths", &p.widths)?;
                Ok(Box::new(BumpFamily { centers: p.centers, widths: p.widths }))
            }),
        );
        entries.insert(
            "modulated_packet",
            ("gaussian envelope times cos(k x1) over centers x widths x freqs", |v| {
                let p: PacketParams = parse(v)?;
                nonempty("centers", &p.centers)?;
                nonempty("widths", &p.widths)?;
                nonempty("freqs", &p.freqs)?;
                Ok(Box::new(PacketFamily { centers: p.centers, widths: p.widths, freqs: p.freqs }))
            }),
        );
        entries.insert(
            "trig_poly",
            ("positive seeded trigonometric polynomial over degrees x amplitudes x seeds", |v| {
                let p: TrigParams = parse(v)?;
                nonempty("degrees", &p.degrees)?;
                nonempty("amplitudes", &p.amplitudes)?;
                nonempty("seeds", &p.seeds)?;
                Ok(Box::new(TrigPolyFamily { degrees: p.degrees, amplitudes: p.amplitudes, seeds: p.seeds }))
            }),
        );
        entries.insert(
            "constant",
            ("constant functions over values", |v| {
                let p: ConstantParams = parse(v)?;
                nonempty("values", &p.values)?;
                Ok(Box::new(ConstantFamily { values: p.values }))
            }),
        );
        Self { entries }
    }
}

impl FamilyRegistry {
    pub fn build(&self, spec: &Value) -> Result<Box<dyn FunctionFamily>> {
        let kind = spec
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Config("family entry needs a string `kind`".into()))?;
        let (_, builder) = self
            .entries
            .get(kind)
            .ok_or_else(|| Error::Config(format!("unknown family kind `{kind}`")))?;
        builder(spec)
    }

    /// (key, description) sorted by key.
    pub fn list(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(k, (d, _))| (*k, *d)).collect()
    }
}
