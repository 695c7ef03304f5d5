//! Experiment driver: ratio sweeps, exact identities, pointwise dominations and the discrete
//! lemma, all selected by registry key from an `ExperimentConfig`.

mod inequalities;
pub mod lemma;

use rayon::prelude::*;

use crate::config::{CheckKind, ExperimentConfig, Exponents};
use crate::error::{Error, Result};
use crate::grid::{Ball, GridFunction, PeriodicGrid};
use crate::report::{
    stability, summarize, Diagnostic, ParamValue, Params, PostCheck, TrialRecord, Verdict, VerificationReport,
};
use crate::symbols::{BilinearSymbol, SymbolRegistry};
use crate::testbed::{FamilyRegistry, Member};
use crate::weights::{sobolev_exponent, BallFamily};

pub use inequalities::InequalityRegistry;
pub use lemma::{lemma_check, lemma_sum_lhs, lemma_sum_rhs, LemmaReport, LemmaRow};

/// Default truncation of the dyadic ball series.
pub const DEFAULT_L_MAX: usize = 30;

/// How family members become trial inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMode {
    /// f from families[0], g from families[1] (or families[0] again).
    Pairs,
    /// One function per trial, taken from families[0].
    Single,
    /// One trial per resolution, no functions.
    NoFunctions,
}

/// Exponent relation fixing q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scaling {
    None,
    /// 1/q = 1/p1 + 1/p2 - s/n (s = 0 is Hölder scaling).
    Sobolev(f64),
}

/// Exponents after scaling; `q` is ∞ when the config says "inf".
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub raw: Exponents,
    pub q: Option<f64>,
}

fn missing(name: &str) -> Error {
    Error::Config(format!("exponent `{name}` is required"))
}

impl Resolved {
    pub fn p1(&self) -> Result<f64> {
        self.raw.p1.ok_or_else(|| missing("p1"))
    }
    pub fn p2(&self) -> Result<f64> {
        self.raw.p2.ok_or_else(|| missing("p2"))
    }
    pub fn q(&self) -> Result<f64> {
        self.q.ok_or_else(|| missing("q"))
    }
    pub fn s(&self) -> Result<f64> {
        self.raw.s.ok_or_else(|| missing("s"))
    }
    pub fn alpha(&self) -> Result<f64> {
        self.raw.alpha.ok_or_else(|| missing("alpha"))
    }
    pub fn epsilon(&self) -> Result<f64> {
        self.raw.epsilon.ok_or_else(|| missing("epsilon"))
    }
    pub fn m(&self) -> Result<f64> {
        self.raw.m.ok_or_else(|| missing("m"))
    }
    pub fn lambda1(&self) -> f64 {
        self.raw.lambda1.unwrap_or(0.0)
    }
    pub fn lambda2(&self) -> f64 {
        self.raw.lambda2.unwrap_or(0.0)
    }

    fn params(&self) -> Params {
        let e = &self.raw;
        let mut p = Params::new();
        let fields = [
            ("p1", e.p1),
            ("p2", e.p2),
            ("q", self.q),
            ("s", e.s),
            ("alpha", e.alpha),
            ("epsilon", e.epsilon),
            ("m", e.m),
            ("lambda1", e.lambda1),
            ("lambda2", e.lambda2),
        ];
        for (k, v) in fields {
            if let Some(v) = v {
                p.insert(k.to_string(), ParamValue::float(v));
            }
        }
        p
    }
}

/// Resolve q from the scaling relation, or check a given q against it to 1e-12.
pub fn resolve_exponents(raw: &Exponents, scaling: Scaling, n: usize) -> Result<Resolved> {
    let given = raw.q.map(|e| e.0);
    if let Some(q) = given {
        if !(q > 0.0) {
            return Err(Error::Config("q must be positive".into()));
        }
    }
    let q = match scaling {
        Scaling::None => given,
        Scaling::Sobolev(s) => {
            let p1 = raw.p1.ok_or_else(|| missing("p1"))?;
            let p2 = raw.p2.ok_or_else(|| missing("p2"))?;
            match given {
                Some(q) => {
                    let target = 1.0 / p1 + 1.0 / p2 - s / n as f64;
                    if (1.0 / q - target).abs() > 1e-12 {
                        return Err(Error::Config(format!(
                            "q = {q} violates the scaling relation, which gives 1/q = {target}"
                        )));
                    }
                    Some(q)
                }
                None => Some(sobolev_exponent(p1, p2, s, n).map_err(|e| Error::Config(e.to_string()))?),
            }
        }
    };
    Ok(Resolved { raw: raw.clone(), q })
}

/// Per-resolution state shared by all trials.
pub struct Context {
    pub grid: PeriodicGrid,
    pub exponents: Resolved,
    pub symbol: Option<Box<dyn BilinearSymbol>>,
    pub balls: Option<BallFamily>,
    pub l_max: usize,
    pub t_list: Vec<f64>,
    /// Values computed once by `Inequality::prepare`.
    pub constants: Vec<(&'static str, f64)>,
}

impl Context {
    pub fn symbol(&self) -> Result<&dyn BilinearSymbol> {
        self.symbol.as_deref().ok_or_else(|| Error::Config("this inequality needs a `symbol` block".into()))
    }

    pub fn balls(&self) -> Result<&BallFamily> {
        self.balls.as_ref().ok_or_else(|| Error::Config("this inequality needs a `ball_family` block".into()))
    }

    pub fn constant(&self, name: &str) -> f64 {
        self.constants.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).expect("constant set in prepare")
    }
}

/// LHS, RHS and the ratio reported for one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl Measurement {
    /// lhs/rhs; 0/0 gives 0 (degenerate), positive/0 gives ∞.
    pub fn ratio(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self { lhs, rhs, ratio }
    }

    /// Residual relative to `scale`, absolute when the scale vanishes.
    pub fn residual(res: f64, scale: f64) -> Self {
        let ratio = if scale > 0.0 { res / scale } else { res };
        Self { lhs: res, rhs: scale, ratio }
    }

    pub fn explicit(lhs: f64, rhs: f64, ratio: f64) -> Self {
        Self { lhs, rhs, ratio }
    }
}

/// A registered statement: how to measure one trial and how to judge the sweep.
pub trait Inequality: Send + Sync {
    fn key(&self) -> &'static str;
    /// The statement it checks, e.g. "Theorem thm:bp".
    fn citation(&self) -> Option<&'static str>;
    fn description(&self) -> &'static str;
    fn check_kind(&self) -> CheckKind;
    fn pair_mode(&self) -> PairMode {
        PairMode::Pairs
    }
    /// Trials run over the ball family.
    fn uses_balls(&self) -> bool {
        false
    }
    /// A ball family is built (for trials or for sup-over-balls norms).
    fn needs_ball_family(&self) -> bool {
        self.uses_balls()
    }
    fn needs_symbol(&self) -> bool {
        false
    }
    /// Tolerance used when the config gives none (identities and dominations).
    fn default_tolerance(&self) -> f64 {
        match self.check_kind() {
            CheckKind::ExactIdentity => 1e-10,
            _ => 1e-12,
        }
    }
    /// Degrees (in f, in g) of homogeneity shared by both sides, when declared.
    fn homogeneity(&self) -> Option<[u32; 2]> {
        None
    }
    fn scaling(&self, _e: &Exponents) -> Result<Scaling> {
        Ok(Scaling::None)
    }
    fn validate(&self, _ctx: &Context) -> Result<()> {
        Ok(())
    }
    /// Per-resolution precomputation; may push diagnostics.
    fn prepare(&self, _ctx: &mut Context, _diag: &mut Vec<(String, ParamValue)>) -> Result<()> {
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, ball: Option<&Ball>) -> Result<Measurement>;
    /// Extra pass/fail checks over the finished records.
    fn post_checks(&self, _cfg: &ExperimentConfig, _records: &[TrialRecord]) -> Vec<PostCheck> {
        Vec::new()
    }
    /// Experiments that are not trial sweeps (the discrete lemma) run here.
    fn run_custom(&self, _cfg: &ExperimentConfig) -> Option<Result<VerificationReport>> {
        None
    }
}

fn ball_params(p: &mut Params, ball: &Ball, dim: usize) {
    p.insert("center_x".into(), ParamValue::Float(ball.center[0]));
    if dim == 2 {
        p.insert("center_y".into(), ParamValue::Float(ball.center[1]));
    }
    p.insert("radius".into(), ParamValue::Float(ball.radius));
}

struct Trial<'a> {
    f: &'a Member,
    g: Option<&'a Member>,
    ball: Option<&'a Ball>,
}

fn members(cfg: &ExperimentConfig, grid: &PeriodicGrid, slot: usize) -> Result<Vec<Member>> {
    let spec = cfg
        .families
        .get(slot)
        .or_else(|| cfg.families.first())
        .ok_or_else(|| Error::Config("`families` is empty".into()))?;
    let out = FamilyRegistry::default().build(spec)?.members(grid)?;
    if out.is_empty() {
        return Err(Error::Config("family has no members".into()));
    }
    Ok(out)
}

/// Run a configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let registry = InequalityRegistry::default();
    let ineq = registry.get(cfg.inequality_key())?;
    if ineq.check_kind() != cfg.check_kind {
        return Err(Error::Config(format!(
            "`{}` is a {} check, config says {}",
            ineq.key(),
            ineq.check_kind().as_str(),
            cfg.check_kind.as_str()
        )));
    }
    if let Some(rep) = ineq.run_custom(cfg) {
        return rep;
    }
    if cfg.families.len() > 2 {
        return Err(Error::Config("at most two families".into()));
    }
    let exponents = resolve_exponents(&cfg.exponents, ineq.scaling(&cfg.exponents)?, cfg.n)?;
    let symbols = SymbolRegistry::default();
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut summaries = Vec::new();
    for &size in &cfg.n_list {
        let grid = PeriodicGrid::new(cfg.n, size, cfg.length).map_err(|e| Error::Config(e.to_string()))?;
        let symbol = match (&cfg.symbol, ineq.needs_symbol()) {
            (Some(s), true) => Some(symbols.build(&s.key, &s.params)?),
            (None, true) => return Err(Error::Config(format!("`{}` needs a `symbol` block", ineq.key()))),
            (Some(_), false) => return Err(Error::Config(format!("`{}` takes no symbol", ineq.key()))),
            (None, false) => None,
        };
        let balls = if ineq.needs_ball_family() {
            let spec = cfg.ball_family.clone().unwrap_or_default();
            Some(BallFamily::new(&grid, spec.stride, spec.radii.as_deref()).map_err(|e| Error::Config(e.to_string()))?)
        } else {
            None
        };
        let mut ctx = Context {
            grid: grid.clone(),
            exponents: exponents.clone(),
            symbol,
            balls,
            l_max: cfg.l_max.unwrap_or(DEFAULT_L_MAX),
            t_list: cfg.t_list.clone().unwrap_or_default(),
            constants: Vec::new(),
        };
        ineq.validate(&ctx).map_err(|e| Error::Config(e.to_string()))?;
        let mut diag = Vec::new();
        ineq.prepare(&mut ctx, &mut diag)?;
        diagnostics.extend(diag.into_iter().map(|(name, value)| Diagnostic { resolution: Some(size), name, value }));

        let (fs, gs) = match ineq.pair_mode() {
            PairMode::NoFunctions => (Vec::new(), Vec::new()),
            PairMode::Single => (members(cfg, &grid, 0)?, Vec::new()),
            PairMode::Pairs => (members(cfg, &grid, 0)?, members(cfg, &grid, 1)?),
        };
        let ball_list: Vec<Option<&Ball>> = match (&ctx.balls, ineq.uses_balls()) {
            (Some(b), true) => b.balls.iter().map(Some).collect(),
            _ => vec![None],
        };
        let mut trials = Vec::new();
        match ineq.pair_mode() {
            PairMode::NoFunctions => {}
            PairMode::Single => {
                for f in &fs {
                    for b in &ball_list {
                        trials.push(Trial { f, g: None, ball: *b });
                    }
                }
            }
            PairMode::Pairs => {
                for f in &fs {
                    for g in &gs {
                        for b in &ball_list {
                            trials.push(Trial { f, g: Some(g), ball: *b });
                        }
                    }
                }
            }
        }
        let base = records.len();
        let new: Vec<TrialRecord> = if ineq.pair_mode() == PairMode::NoFunctions {
            let zero = GridFunction::zeros(&grid);
            let m = ineq.measure(&ctx, &zero, &zero, None)?;
            vec![TrialRecord::new(base, Some(size), Params::new(), m.lhs, m.rhs, m.ratio)]
        } else {
            trials
                .par_iter()
                .enumerate()
                .map(|(i, t)| {
                    let g = t.g.unwrap_or(t.f);
                    let m = ineq.measure(&ctx, &t.f.values, &g.values, t.ball)?;
                    let mut p = Params::new();
                    p.insert("f".into(), ParamValue::Str(t.f.label.clone()));
                    if let Some(g) = t.g {
                        p.insert("g".into(), ParamValue::Str(g.label.clone()));
                    }
                    if let Some(b) = t.ball {
                        ball_params(&mut p, b, grid.dim());
                    }
                    Ok(TrialRecord::new(base + i, Some(size), p, m.lhs, m.rhs, m.ratio))
                })
                .collect::<Result<Vec<_>>>()?
        };
        let refs: Vec<&TrialRecord> = new.iter().collect();
        summaries.push(summarize(size, &refs));
        records.extend(new);
    }

    let post_checks = ineq.post_checks(cfg, &records);
    let all_finite = summaries.iter().all(|s| s.sup_ratio.is_some());
    let worst = summaries.iter().filter_map(|s| s.sup_ratio).fold(0.0f64, f64::max);
    let (stab, factor, tolerance, ok) = match cfg.check_kind {
        CheckKind::RatioSweep => {
            let sups: Vec<Option<f64>> = summaries.iter().map(|s| s.sup_ratio).collect();
            let st = stability(&sups);
            let factor = cfg.stability();
            (st, Some(factor), None, all_finite && st.is_some_and(|v| v <= factor))
        }
        CheckKind::ExactIdentity => {
            let tol = cfg.tolerance.unwrap_or(ineq.default_tolerance());
            (None, None, Some(tol), all_finite && worst <= tol)
        }
        CheckKind::PointwiseDomination => {
            let tol = cfg.tolerance.unwrap_or(ineq.default_tolerance());
            (None, None, Some(tol), all_finite && worst <= 1.0 + tol)
        }
        CheckKind::DiscreteLemma => (None, None, None, all_finite),
    };
    let verdict = if ok && post_checks.iter().all(|c| c.passed) { Verdict::Pass } else { Verdict::Fail };
    Ok(VerificationReport {
        experiment_id: cfg.id.clone(),
        inequality: ineq.key().to_string(),
        citation: ineq.citation().map(str::to_string),
        check_kind: cfg.check_kind,
        n: cfg.n,
        length: cfg.length,
        exponents: exponents.params(),
        resolutions: summaries,
        stability: stab,
        stability_factor: factor,
        tolerance,
        diagnostics,
        post_checks,
        verdict,
        records,
    })
}
