//! Registered statements. Each measures one trial; sweeps, summaries and verdicts live in
//! the runner.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{lemma, Context, Inequality, Measurement, PairMode, Scaling};
use crate::config::{CheckKind, ExperimentConfig, Exponents};
use crate::error::{precondition, Error, Result};
use crate::frac_ops::{bilinear_b, bilinear_i, check_jb_exponents, holder_domination_check, jb_ratio_parts, FracOrder};
use crate::grid::{gradient_modulus, lp_norm, Ball, Freq, GridFunction, Region};
use crate::lp::{bessel_js, sobolev_norm, LpFamily, SobolevVariant};
use crate::report::{ParamValue, PostCheck, TrialRecord, VerificationReport};
use crate::semigroup::{
    bilinear_oscillation, double_smoothed_oscillation, poincare_rhs_series, representation_formula_check,
    HeatSemigroup,
};
use crate::symbols::{
    decompose_frequency, decompose_three_way, eval_tsigma, eval_ttheta, kernel_decay_constant,
    newbond_domination_constant, ttheta_domination_constant, BilinearSymbol, ConstantSymbol, SymbolClass,
};
use crate::weights::{bilinear_campanato_norm, campanato_norm, semigroup_campanato_tilde};

fn torus(f: &GridFunction, p: f64) -> f64 {
    lp_norm(f, p, &Region::Torus)
}

fn need_ball(ball: Option<&Ball>) -> Result<&Ball> {
    ball.ok_or_else(|| Error::Config("trial needs a ball".into()))
}

fn config_err(msg: impl Into<String>) -> Result<()> {
    Err(Error::Config(msg.into()))
}

fn check_p(p1: f64, p2: f64) -> Result<()> {
    if !(p1 > 1.0 && p2 > 1.0 && p1.is_finite() && p2.is_finite()) {
        return config_err("need 1 < p1, p2 < ∞");
    }
    Ok(())
}

/// 0 < α < min(1, ε) and 1 < p1, p2 < ∞.
fn check_poincare(ctx: &Context) -> Result<()> {
    let e = &ctx.exponents;
    check_p(e.p1()?, e.p2()?)?;
    let (alpha, eps) = (e.alpha()?, e.epsilon()?);
    if !(alpha > 0.0 && alpha < 1.0_f64.min(eps)) {
        return config_err(format!("need 0 < alpha < min(1, epsilon), got alpha = {alpha}, epsilon = {eps}"));
    }
    Ok(())
}

/// Scale of a bilinear identity residual: max(‖lhs‖_∞, ‖f‖_∞ ‖g‖_∞). Rounding error in the
/// spectral sums is of size ε‖f‖_∞‖g‖_∞ even when fg itself is tiny (far-apart supports).
fn identity_scale(lhs: f64, f: &GridFunction, g: &GridFunction) -> f64 {
    lhs.max(f.sup_norm() * g.sup_norm())
}

/// sup_x |a - b| relative to `identity_scale`.
fn complex_residual(a: &GridFunction<Complex64>, b: &GridFunction<Complex64>, f: &GridFunction, g: &GridFunction) -> Measurement {
    let res = a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    Measurement::residual(res, identity_scale(a.abs().sup_norm(), f, g))
}

/// max_x lhs(x)/rhs(x) with the values at the maximizer; 0/0 points are skipped.
fn pointwise_max(lhs: &GridFunction, rhs: &GridFunction) -> Measurement {
    let mut best = Measurement::explicit(0.0, 0.0, 0.0);
    for (l, r) in lhs.values().iter().zip(rhs.values()) {
        let m = Measurement::ratio(*l, *r);
        if (*l != 0.0 || *r != 0.0) && (m.ratio > best.ratio || best.lhs == 0.0 && best.rhs == 0.0) {
            best = m;
        }
        if m.ratio.is_infinite() {
            return m;
        }
    }
    best
}

fn one_minus_alpha(e: &Exponents) -> Result<Scaling> {
    let alpha = e.alpha.ok_or_else(|| Error::Config("exponent `alpha` is required".into()))?;
    Ok(Scaling::Sobolev(1.0 - alpha))
}

fn s_scaling(e: &Exponents) -> Result<Scaling> {
    let s = e.s.ok_or_else(|| Error::Config("exponent `s` is required".into()))?;
    Ok(Scaling::Sobolev(s))
}

// Bilinear Poincaré inequalities.

struct BpPoincare {
    double_smoothed: bool,
}

impl Inequality for BpPoincare {
    fn key(&self) -> &'static str {
        if self.double_smoothed {
            "coro_bp_poincare"
        } else {
            "thm_bp_poincare"
        }
    }
    fn citation(&self) -> Option<&'static str> {
        Some(if self.double_smoothed { "Theorem coro:bp" } else { "Theorem thm:bp" })
    }
    fn description(&self) -> &'static str {
        if self.double_smoothed {
            "‖fg - S[SfSg]‖_q(B) vs r^α Σ 2^{-l(ε-α)} [‖∇f‖‖g‖ + ‖f‖‖∇g‖](2^{l+1}B)"
        } else {
            "‖fg - SfSg‖_q(B) vs r^α Σ 2^{-l(ε-α)} [‖∇f‖‖g‖ + ‖f‖‖∇g‖](2^{l+1}B)"
        }
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn uses_balls(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        one_minus_alpha(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        check_poincare(ctx)
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, ball: Option<&Ball>) -> Result<Measurement> {
        let b = need_ball(ball)?;
        let e = &ctx.exponents;
        let sg = HeatSemigroup::new(&ctx.grid, e.epsilon()?)?;
        let osc = if self.double_smoothed {
            double_smoothed_oscillation(f, g, b, &sg)?
        } else {
            bilinear_oscillation(f, g, b, &sg)?
        };
        let lhs = lp_norm(&osc, e.q()?, &Region::Ball(*b));
        let rhs = poincare_rhs_series(f, g, b, e.p1()?, e.p2()?, e.alpha()?, e.epsilon()?, ctx.l_max)?;
        Ok(Measurement::ratio(lhs, rhs))
    }
}

struct Representation;

impl Inequality for Representation {
    fn key(&self) -> &'static str {
        "thm_representation"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Theorem thm:representation")
    }
    fn description(&self) -> &'static str {
        "pointwise |fg - SfSg| on B vs Σ 2^{-lε}[𝒥(|∇f|,|g|) + 𝒥(|f|,|∇g|)] over 2^{l+1}B; ratio = C_rep"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn uses_balls(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        if !(ctx.exponents.epsilon()? > 0.0) {
            return config_err("epsilon must be positive");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, ball: Option<&Ball>) -> Result<Measurement> {
        let b = need_ball(ball)?;
        let sg = HeatSemigroup::new(&ctx.grid, ctx.exponents.epsilon()?)?;
        let rep = representation_formula_check(f, g, b, &sg, ctx.l_max)?;
        Ok(Measurement::explicit(rep.lhs, rep.rhs, rep.c_rep))
    }
}

struct JbBound;

/// Largest max/min of per-radius sups allowed within one resolution.
const JB_RADIUS_FACTOR: f64 = 4.0;

impl Inequality for JbBound {
    fn key(&self) -> &'static str {
        "prop_jbbound"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Proposition jbbound")
    }
    fn description(&self) -> &'static str {
        "‖𝒥_B(f,g)‖_q(B) vs r(B)^α ‖f‖_p1(B) ‖g‖_p2(B); per-radius sups within a factor 4"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn uses_balls(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        one_minus_alpha(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_jb_exponents(ctx.grid.dim(), e.p1()?, e.p2()?, e.q()?, e.alpha()?)
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, ball: Option<&Ball>) -> Result<Measurement> {
        let b = need_ball(ball)?;
        let e = &ctx.exponents;
        let (lhs, rhs) = jb_ratio_parts(f, g, b, e.p1()?, e.p2()?, e.q()?, e.alpha()?)?;
        Ok(Measurement::ratio(lhs, rhs))
    }
    fn post_checks(&self, _cfg: &ExperimentConfig, records: &[TrialRecord]) -> Vec<PostCheck> {
        // resolution -> radius bits -> sup
        let mut sups: BTreeMap<usize, BTreeMap<u64, Option<f64>>> = BTreeMap::new();
        for r in records {
            let radius = match r.params.get("radius") {
                Some(ParamValue::Float(v)) => *v,
                _ => continue,
            };
            let slot = sups.entry(r.resolution.unwrap_or(0)).or_default().entry(radius.to_bits()).or_insert(Some(0.0));
            *slot = match (*slot, r.ratio) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        sups.into_iter()
            .map(|(n, per)| {
                let vals: Vec<Option<f64>> = per.values().copied().collect();
                let spread = if vals.iter().any(Option::is_none) {
                    None
                } else {
                    let v: Vec<f64> = vals.into_iter().flatten().collect();
                    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
                    (lo > 0.0).then(|| hi / lo)
                };
                let detail = per
                    .iter()
                    .map(|(r, s)| format!("r={}: {}", f64::from_bits(*r), s.map_or("inf".into(), |v| format!("{v:.6e}"))))
                    .collect::<Vec<_>>()
                    .join(", ");
                PostCheck {
                    name: format!("radius_spread N={n}"),
                    passed: spread.is_some_and(|s| s <= JB_RADIUS_FACTOR),
                    detail: format!(
                        "max/min = {} (allowed {JB_RADIUS_FACTOR}); {detail}",
                        spread.map_or("inf".into(), |s| format!("{s:.6}"))
                    ),
                }
            })
            .collect()
    }
}

// Campanato–Morrey Leibniz rules.

struct CampanatoLeibniz {
    tilde: bool,
}

impl Inequality for CampanatoLeibniz {
    fn key(&self) -> &'static str {
        if self.tilde {
            "leibniz3"
        } else {
            "leibniz2"
        }
    }
    fn citation(&self) -> Option<&'static str> {
        Some(if self.tilde { "Theorem leibniz3" } else { "Theorem leibniz2" })
    }
    fn description(&self) -> &'static str {
        if self.tilde {
            "‖fg‖ in the semigroup tilde Campanato norm vs CM(∇f)CM(g) + CM(f)CM(∇g)"
        } else {
            "‖(f,g)‖ in the bilinear semigroup Campanato norm vs CM(∇f)CM(g) + CM(f)CM(∇g)"
        }
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn needs_ball_family(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        one_minus_alpha(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        check_poincare(ctx)?;
        let e = &ctx.exponents;
        let (l1, l2) = (e.lambda1(), e.lambda2());
        if l1 < 0.0 || l2 < 0.0 {
            return config_err("lambda1, lambda2 must be nonnegative");
        }
        let n = ctx.grid.dim() as f64;
        let lambda = 1.0 / n + l1 + l2;
        let bound = n * (lambda + 1.0 / e.q()?);
        if !(e.epsilon()? > bound) {
            return config_err(format!("need epsilon > n(lambda + 1/q) = {bound}"));
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let family = ctx.balls()?;
        let sg = HeatSemigroup::new(&ctx.grid, e.epsilon()?)?;
        let (p1, p2, q) = (e.p1()?, e.p2()?, e.q()?);
        let (l1, l2) = (e.lambda1(), e.lambda2());
        let lambda = 1.0 / ctx.grid.dim() as f64 + l1 + l2;
        let lhs = if self.tilde {
            semigroup_campanato_tilde(f, g, q, lambda, &sg, family)?
        } else {
            bilinear_campanato_norm(f, g, q, lambda, &sg, family)?
        };
        let (df, dg) = (gradient_modulus(f), gradient_modulus(g));
        let rhs = campanato_norm(&df, p1, l1, family)? * campanato_norm(g, p2, l2, family)?
            + campanato_norm(f, p1, l1, family)? * campanato_norm(&dg, p2, l2, family)?;
        Ok(Measurement::ratio(lhs, rhs))
    }
}

// Pseudodifferential bounds and Sobolev Leibniz rules.

fn tsigma_abs(sigma: &dyn BilinearSymbol, f: &GridFunction, g: &GridFunction) -> GridFunction {
    eval_tsigma(sigma, f, g).abs()
}

fn sigma0_of(sigma: &dyn BilinearSymbol) -> impl Fn(Freq) -> f64 + '_ {
    move |z: Freq| sigma.eval(z, [0.0, 0.0]).re
}

struct PdoBoundsA;

impl Inequality for PdoBoundsA {
    fn key(&self) -> &'static str {
        "pdobounds_a"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Theorem thm:pdobounds (a)")
    }
    fn description(&self) -> &'static str {
        "‖T_σ(f,g)‖_q vs ‖f‖_p1 ‖g‖_p2 for σ of order -s, Sobolev scaling"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn needs_symbol(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        s_scaling(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_p(e.p1()?, e.p2()?)?;
        let s = e.s()?;
        let n = ctx.grid.dim() as f64;
        if !(s > 0.0 && s < 2.0 * n) {
            return config_err("need 0 < s < 2n");
        }
        let sigma = ctx.symbol()?;
        if sigma.order() > -s + 1e-12 {
            return config_err(format!("symbol `{}` has order {} > -s", sigma.name(), sigma.order()));
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let lhs = torus(&tsigma_abs(ctx.symbol()?, f, g), e.q()?);
        let rhs = torus(f, e.p1()?) * torus(g, e.p2()?);
        Ok(Measurement::ratio(lhs, rhs))
    }
}

struct PdoBoundsB;

impl Inequality for PdoBoundsB {
    fn key(&self) -> &'static str {
        "pdobounds_b"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Theorem thm:pdobounds (b)")
    }
    fn description(&self) -> &'static str {
        "‖T_θ(f,g)‖_q vs ‖f‖_p1 ‖g‖_p2, θ = π/4, σ = σ₀(ξ - η) of order -s"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn needs_symbol(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        s_scaling(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_p(e.p1()?, e.p2()?)?;
        let s = e.s()?;
        if !(s > 0.0 && s < ctx.grid.dim() as f64) {
            return config_err("need 0 < s < n");
        }
        if ctx.symbol()?.class() != SymbolClass::BsTheta {
            return config_err("pdobounds_b needs a θ-class symbol (theta_bessel)");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let sigma0 = sigma0_of(ctx.symbol()?);
        let lhs = torus(&eval_ttheta(&sigma0, f, g), e.q()?);
        let rhs = torus(f, e.p1()?) * torus(g, e.p2()?);
        Ok(Measurement::ratio(lhs, rhs))
    }
}

struct CoroLeibniz;

impl Inequality for CoroLeibniz {
    fn key(&self) -> &'static str {
        "coro_leibniz"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Corollary leibniz")
    }
    fn description(&self) -> &'static str {
        "‖T_σ(f,g)‖_q vs ‖J^{m+s}f‖_p1 ‖g‖_p2 + ‖f‖_p1 ‖J^{m+s}g‖_p2, m the symbol order"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn needs_symbol(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        s_scaling(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_p(e.p1()?, e.p2()?)?;
        let s = e.s()?;
        if !(s > 0.0 && s < 2.0 * ctx.grid.dim() as f64) {
            return config_err("need 0 < s < 2n");
        }
        let m = ctx.symbol()?.order();
        if m < -s {
            return config_err(format!("symbol order {m} is below -s"));
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let sigma = ctx.symbol()?;
        let k = sigma.order() + e.s()?;
        let (p1, p2) = (e.p1()?, e.p2()?);
        let lhs = torus(&tsigma_abs(sigma, f, g), e.q()?);
        let rhs = torus(&bessel_js(f, k), p1) * torus(g, p2) + torus(f, p1) * torus(&bessel_js(g, k), p2);
        Ok(Measurement::ratio(lhs, rhs))
    }
}

/// ‖J^a f‖_p1 ‖g‖_p2 + ‖f‖_p1 ‖J^a g‖_p2.
fn sobolev_pair_rhs(f: &GridFunction, g: &GridFunction, a: f64, p1: f64, p2: f64) -> Result<f64> {
    let v = SobolevVariant::Inhom;
    Ok(sobolev_norm(f, a, p1, v)? * torus(g, p2) + torus(f, p1) * sobolev_norm(g, a, p2, v)?)
}

struct SobolevLeibniz;

impl Inequality for SobolevLeibniz {
    fn key(&self) -> &'static str {
        "coro_leibniz_sobolev"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Corollary coro:leibniz")
    }
    fn description(&self) -> &'static str {
        "‖J^m(fg)‖_q vs ‖J^{m+s}f‖_p1 ‖g‖_p2 + ‖f‖_p1 ‖J^{m+s}g‖_p2, Sobolev scaling"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        s_scaling(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_p(e.p1()?, e.p2()?)?;
        let (s, m, q) = (e.s()?, e.m()?, e.q()?);
        let n = ctx.grid.dim() as f64;
        if !(s >= 0.0 && s < 2.0 * n) {
            return config_err("need 0 ≤ s < 2n");
        }
        if q < 1.0 && !(m > 0.0f64.max(n - s)) {
            return config_err(format!("q < 1 needs m > max(0, n - s) = {}", 0.0f64.max(n - s)));
        }
        if m < 0.0 {
            return config_err("need m ≥ 0");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let m = e.m()?;
        let lhs = torus(&bessel_js(&f.mul(g), m), e.q()?);
        let rhs = sobolev_pair_rhs(f, g, m + e.s()?, e.p1()?, e.p2()?)?;
        Ok(Measurement::ratio(lhs, rhs))
    }
}

struct KatoPonce;

impl Inequality for KatoPonce {
    fn key(&self) -> &'static str {
        "katoponce"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Eq. katoponce")
    }
    fn description(&self) -> &'static str {
        "‖J^m(fg)‖_q vs ‖J^m f‖_p1 ‖g‖_p2 + ‖f‖_p1 ‖J^m g‖_p2, Hölder scaling"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, _e: &Exponents) -> Result<Scaling> {
        Ok(Scaling::Sobolev(0.0))
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_p(e.p1()?, e.p2()?)?;
        if !(e.q()? >= 1.0) {
            return config_err("need q ≥ 1");
        }
        if !(e.m()? >= 0.0) {
            return config_err("need m ≥ 0");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let m = e.m()?;
        let lhs = torus(&bessel_js(&f.mul(g), m), e.q()?);
        let rhs = sobolev_pair_rhs(f, g, m, e.p1()?, e.p2()?)?;
        Ok(Measurement::ratio(lhs, rhs))
    }
}

struct BilinearSobolev;

impl Inequality for BilinearSobolev {
    fn key(&self) -> &'static str {
        "eq_sob"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Eq. eq:sob")
    }
    fn description(&self) -> &'static str {
        "‖fg‖_q vs ‖∇f‖_p1 ‖g‖_p2 + ‖f‖_p1 ‖∇g‖_p2, 1/q = 1/p1 + 1/p2 - 1/n"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn scaling(&self, _e: &Exponents) -> Result<Scaling> {
        Ok(Scaling::Sobolev(1.0))
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_p(e.p1()?, e.p2()?)
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let (p1, p2) = (e.p1()?, e.p2()?);
        let lhs = torus(&f.mul(g), e.q()?);
        let rhs =
            torus(&gradient_modulus(f), p1) * torus(g, p2) + torus(f, p1) * torus(&gradient_modulus(g), p2);
        Ok(Measurement::ratio(lhs, rhs))
    }
}

struct SqrtEmbedding;

impl Inequality for SqrtEmbedding {
    fn key(&self) -> &'static str {
        "sqrt_embedding"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Section sec:leibnizsob, square-root proposition")
    }
    fn description(&self) -> &'static str {
        "‖h‖_q vs ‖J^s √h‖_t², p1 = p2 = t, 1/q = 2/t - s/n, h ≥ 0"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn pair_mode(&self) -> PairMode {
        PairMode::Single
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 0])
    }
    fn scaling(&self, e: &Exponents) -> Result<Scaling> {
        s_scaling(e)
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        let (p1, p2) = (e.p1()?, e.p2()?);
        check_p(p1, p2)?;
        if p1 != p2 {
            return config_err("sqrt_embedding needs p1 = p2 = t");
        }
        let s = e.s()?;
        if !(s > 0.0 && s < 1.0) {
            return config_err("need 0 < s < 1");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, h: &GridFunction, _g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        if h.values().iter().any(|v| *v < 0.0) {
            return precondition("negative h member");
        }
        let e = &ctx.exponents;
        let root = h.map(f64::sqrt);
        let lhs = torus(h, e.q()?);
        let rhs = sobolev_norm(&root, e.s()?, e.p1()?, SobolevVariant::Inhom)?.powi(2);
        Ok(Measurement::ratio(lhs, rhs))
    }
}

// Exact identities.

struct ProductIdentity;

impl Inequality for ProductIdentity {
    fn key(&self) -> &'static str {
        "product_identity"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Eq. freqdecoup, σ ≡ 1")
    }
    fn description(&self) -> &'static str {
        "T_σ(f,g) = fg for σ ≡ 1; relative sup residual"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::ExactIdentity
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn measure(&self, _ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let t = eval_tsigma(&ConstantSymbol { value: 1.0 }, f, g);
        Ok(complex_residual(&f.mul(g).to_complex(), &t, f, g))
    }
}

struct Decoupling {
    three_way: bool,
}

impl Inequality for Decoupling {
    fn key(&self) -> &'static str {
        if self.three_way {
            "three_way_identity"
        } else {
            "freqdecoup_identity"
        }
    }
    fn citation(&self) -> Option<&'static str> {
        Some(if self.three_way { "Corollary coro:leibniz, proof" } else { "Eq. freqdecoup" })
    }
    fn description(&self) -> &'static str {
        if self.three_way {
            "J^m(fg) = T_σ1(f, J^{m+s}g) + T_σ2(J^{m+s}f, g) + T_σ3(f, g)"
        } else {
            "J^m(fg) = T_σ1(f, J^{m+s}g) + T_σ2(J^{m+s}f, g)"
        }
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::ExactIdentity
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        if !(e.m()? >= 0.0 && e.s()? >= 0.0) {
            return config_err("need m ≥ 0 and s ≥ 0");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let (m, s) = (e.m()?, e.s()?);
        let lhs = bessel_js(&f.mul(g), m).to_complex();
        let (jf, jg) = (bessel_js(f, m + s), bessel_js(g, m + s));
        let rhs = if self.three_way {
            let (s1, s2, s3) = decompose_three_way(m, s);
            let a = eval_tsigma(&s1, f, &jg);
            let b = eval_tsigma(&s2, &jf, g);
            let c = eval_tsigma(&s3, f, g);
            a.zip_with(&b, |x, y| x + y).zip_with(&c, |x, y| x + y)
        } else {
            let (s1, s2) = decompose_frequency(m, s);
            eval_tsigma(&s1, f, &jg).zip_with(&eval_tsigma(&s2, &jf, g), |x, y| x + y)
        };
        Ok(complex_residual(&lhs, &rhs, f, g))
    }
}

struct ParaproductReconstruction;

impl Inequality for ParaproductReconstruction {
    fn key(&self) -> &'static str {
        "paraproduct_reconstruction"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Section sec:leibnizsob, fg = Π(f,g) + Π(g,f) + Σ R_m")
    }
    fn description(&self) -> &'static str {
        "fg = Π(f,g) + Π(g,f) + R_{-1} + R_0 + R_1 on the finite Littlewood–Paley ladder"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::ExactIdentity
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let (res, scale) = LpFamily::new(&ctx.grid).reconstruction_residual(f, g);
        Ok(Measurement::residual(res, identity_scale(scale, f, g)))
    }
}

// Pointwise dominations.

struct HolderDomination;

impl Inequality for HolderDomination {
    fn key(&self) -> &'static str {
        "holder_domination"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Remark weightsBalpha")
    }
    fn description(&self) -> &'static str {
        "ℬ_α(|f|,|g|) ≤ I_α(|f|^r)^{1/r} I_α(|g|^r')^{1/r'} at every grid point, r = 1 + p1/p2"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::PointwiseDomination
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let e = &ctx.exponents;
        check_p(e.p1()?, e.p2()?)?;
        let a = e.alpha()?;
        if !(a > 0.0 && a < ctx.grid.dim() as f64) {
            return config_err("need 0 < alpha < n");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let e = &ctx.exponents;
        let rep = holder_domination_check(f, g, FracOrder(e.alpha()?), e.p1()?, e.p2()?)?;
        Ok(Measurement::explicit(rep.lhs_at_max, rep.rhs_at_max, rep.max_ratio))
    }
}

struct NewbondDomination;

impl Inequality for NewbondDomination {
    fn key(&self) -> &'static str {
        "newbond_domination"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Eq. newbond")
    }
    fn description(&self) -> &'static str {
        "|T_σ(f,g)| ≤ C ℐ_s(|f|,|g|) pointwise, C from the kernel cell by cell; 5% slack"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::PointwiseDomination
    }
    fn needs_symbol(&self) -> bool {
        true
    }
    fn default_tolerance(&self) -> f64 {
        0.05
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let s = ctx.exponents.s()?;
        if !(s > 0.0 && s < 2.0 * ctx.grid.dim() as f64) {
            return config_err("need 0 < s < 2n");
        }
        Ok(())
    }
    fn prepare(&self, ctx: &mut Context, diag: &mut Vec<(String, ParamValue)>) -> Result<()> {
        let s = ctx.exponents.s()?;
        let sigma = ctx.symbol()?;
        let c = newbond_domination_constant(sigma, &ctx.grid, s)?;
        let decay = kernel_decay_constant(sigma, &ctx.grid, s)?;
        diag.push(("domination_constant".into(), ParamValue::float(c)));
        diag.push(("kernel_decay_constant".into(), ParamValue::float(decay)));
        ctx.constants.push(("C", c));
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let c = ctx.constant("C");
        let t = tsigma_abs(ctx.symbol()?, f, g);
        let i = bilinear_i(&f.abs(), &g.abs(), FracOrder(ctx.exponents.s()?))?.scale(c);
        Ok(pointwise_max(&t, &i))
    }
}

struct ThetaDomination;

impl Inequality for ThetaDomination {
    fn key(&self) -> &'static str {
        "ttheta_domination"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Theorem thm:pdobounds (b), proof")
    }
    fn description(&self) -> &'static str {
        "|T_θ(f,g)| ≤ C ℬ_s(|f|,|g|) pointwise, θ = π/4, C from the kernel cell by cell"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::PointwiseDomination
    }
    fn needs_symbol(&self) -> bool {
        true
    }
    fn homogeneity(&self) -> Option<[u32; 2]> {
        Some([1, 1])
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let s = ctx.exponents.s()?;
        if !(s > 0.0 && s < ctx.grid.dim() as f64) {
            return config_err("need 0 < s < n");
        }
        if ctx.symbol()?.class() != SymbolClass::BsTheta {
            return config_err("ttheta_domination needs a θ-class symbol (theta_bessel)");
        }
        Ok(())
    }
    fn prepare(&self, ctx: &mut Context, diag: &mut Vec<(String, ParamValue)>) -> Result<()> {
        let s = ctx.exponents.s()?;
        let c = {
            let sigma0 = sigma0_of(ctx.symbol()?);
            ttheta_domination_constant(&ctx.grid, &sigma0, s)?
        };
        diag.push(("domination_constant".into(), ParamValue::float(c)));
        ctx.constants.push(("C", c));
        Ok(())
    }
    fn measure(&self, ctx: &Context, f: &GridFunction, g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let c = ctx.constant("C");
        let sigma0 = sigma0_of(ctx.symbol()?);
        let t = eval_ttheta(&sigma0, f, g).abs();
        let b = bilinear_b(&f.abs(), &g.abs(), FracOrder(ctx.exponents.s()?), 1, -1)?.scale(c);
        Ok(pointwise_max(&t, &b))
    }
}

// Kernel estimate and the discrete lemma.

struct KernelDecay;

impl Inequality for KernelDecay {
    fn key(&self) -> &'static str {
        "kernel_decay"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Eq. eq:amon")
    }
    fn description(&self) -> &'static str {
        "sup |k(u,v)| (|u|+|v|)^{2n-s} over h ≤ |u|+|v| ≤ L/4; one trial per resolution"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::RatioSweep
    }
    fn pair_mode(&self) -> PairMode {
        PairMode::NoFunctions
    }
    fn needs_symbol(&self) -> bool {
        true
    }
    fn validate(&self, ctx: &Context) -> Result<()> {
        let s = ctx.exponents.s()?;
        if !(s > 0.0 && s < 2.0 * ctx.grid.dim() as f64) {
            return config_err("need 0 < s < 2n");
        }
        Ok(())
    }
    fn measure(&self, ctx: &Context, _f: &GridFunction, _g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        let c = kernel_decay_constant(ctx.symbol()?, &ctx.grid, ctx.exponents.s()?)?;
        Ok(Measurement::explicit(c, 1.0, c))
    }
}

struct LemmaLem;

impl Inequality for LemmaLem {
    fn key(&self) -> &'static str {
        "lemma_lem"
    }
    fn citation(&self) -> Option<&'static str> {
        Some("Lemma lem")
    }
    fn description(&self) -> &'static str {
        "Σ_{k≤l} 2^{k(m+n)}/(a2^k+b)^{2n-s} vs 2^{l(m+n)}/(a2^l+b)^{2n-s}, brute-force sweep"
    }
    fn check_kind(&self) -> CheckKind {
        CheckKind::DiscreteLemma
    }
    fn measure(&self, _ctx: &Context, _f: &GridFunction, _g: &GridFunction, _ball: Option<&Ball>) -> Result<Measurement> {
        Err(Error::Config("lemma_lem runs as a sweep, not per trial".into()))
    }
    fn run_custom(&self, cfg: &ExperimentConfig) -> Option<Result<VerificationReport>> {
        Some(lemma::run(cfg, self.key(), self.citation().unwrap_or_default()))
    }
}

/// Inequalities by registry key.
pub struct InequalityRegistry {
    entries: BTreeMap<&'static str, Box<dyn Inequality>>,
}

impl Default for InequalityRegistry {
    fn default() -> Self {
        let all: Vec<Box<dyn Inequality>> = vec![
            Box::new(BpPoincare { double_smoothed: false }),
            Box::new(BpPoincare { double_smoothed: true }),
            Box::new(Representation),
            Box::new(JbBound),
            Box::new(CampanatoLeibniz { tilde: false }),
            Box::new(CampanatoLeibniz { tilde: true }),
            Box::new(PdoBoundsA),
            Box::new(PdoBoundsB),
            Box::new(CoroLeibniz),
            Box::new(SobolevLeibniz),
            Box::new(KatoPonce),
            Box::new(BilinearSobolev),
            Box::new(SqrtEmbedding),
            Box::new(ProductIdentity),
            Box::new(Decoupling { three_way: false }),
            Box::new(Decoupling { three_way: true }),
            Box::new(ParaproductReconstruction),
            Box::new(HolderDomination),
            Box::new(NewbondDomination),
            Box::new(ThetaDomination),
            Box::new(KernelDecay),
            Box::new(LemmaLem),
        ];
        Self { entries: all.into_iter().map(|i| (i.key(), i)).collect() }
    }
}

impl InequalityRegistry {
    pub fn get(&self, key: &str) -> Result<&dyn Inequality> {
        self.entries
            .get(key)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Config(format!("unknown inequality `{key}`")))
    }

    /// All entries sorted by key.
    pub fn iter(&self) -> impl Iterator<Item = &dyn Inequality> {
        self.entries.values().map(|b| b.as_ref())
    }
}
