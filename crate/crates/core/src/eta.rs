//! Numeric probes of the modulus of uniformization `eta` for the Euclidean
//! metric on a polydisc.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::foliation::{numeric_point, sample_parameters, FoliationModel};
use crate::numeric::{integrate_ray, OdeOptions, OdeOutcome, OdeStats};
use crate::algebra::Value;

#[derive(Debug, Error, PartialEq)]
pub enum EtaError {
    #[error("invalid product-leaf declaration: {0}")]
    DeclInvalid(String),
    #[error("point lies outside the polydisc")]
    OutsideDomain,
    #[error("point is within the singular-set threshold")]
    OnSingularSet,
    #[error("the field vanishes at the point")]
    ZeroField,
    #[error("scan path has zero length")]
    ZeroLength,
    #[error("polydisc radius must be positive")]
    BadRadius,
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { got: usize, expected: usize },
}

/// Euclidean metric on the polydisc of the given radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricContext {
    pub radius: f64,
}

impl MetricContext {
    pub fn new(radius: f64) -> Result<Self, EtaError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(MetricContext { radius })
        } else {
            Err(EtaError::BadRadius)
        }
    }

    pub fn contains(&self, p: &[Complex64]) -> bool {
        p.iter().all(|z| z.norm() < self.radius)
    }
}

/// Leaves are `{x_i = const, i != coordinate}` inside the polydisc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductLeafDecl {
    pub coordinate: usize,
}

impl ProductLeafDecl {
    /// Every other coefficient vanishes identically and the remaining one does
    /// not depend on the leaf coordinate.
    pub fn verify(&self, model: &FoliationModel) -> Result<(), EtaError> {
        let j = self.coordinate;
        let coeffs = &model.field.coeffs;
        if j >= coeffs.len() {
            return Err(EtaError::DeclInvalid(format!("no coordinate {j}")));
        }
        if let Some(i) = (0..coeffs.len()).find(|&i| i != j && !coeffs[i].is_zero()) {
            return Err(EtaError::DeclInvalid(format!("coefficient of {} is not zero", model.ctx.vars[i])));
        }
        if coeffs[j].uses_slot(j) {
            return Err(EtaError::DeclInvalid(format!(
                "coefficient of {} depends on {}",
                model.ctx.vars[j], model.ctx.vars[j]
            )));
        }
        Ok(())
    }
}

/// `eta(p) = r (1 - |x_j / r|^2)`: the leaf through `p` is the full disc of
/// radius `r` in the coordinate `x_j`.
pub fn eta_exact_product(p: &[Complex64], decl: &ProductLeafDecl, ctx: &MetricContext) -> Result<f64, EtaError> {
    let z = *p.get(decl.coordinate).ok_or(EtaError::DeclInvalid("point is too short".into()))?;
    if !ctx.contains(p) {
        return Err(EtaError::OutsideDomain);
    }
    let u = z / ctx.radius;
    Ok(ctx.radius * (1.0 - u.norm_sqr()))
}

#[derive(Clone, Debug)]
pub struct ShootOptions {
    pub rays: usize,
    /// Largest tested radius is `2^max_doublings`.
    pub max_doublings: u32,
    /// Singular-set proxy: max over saturated coefficients of `|P_i|`.
    pub threshold: f64,
    pub ode: OdeOptions,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions { rays: 32, max_doublings: 8, threshold: 1e-6, ode: OdeOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaEstimate {
    pub point: Vec<Complex64>,
    pub lower_bound: f64,
    pub exact: Option<f64>,
    pub shoot_radius: f64,
    pub field_norm: f64,
    pub stats: OdeStats,
    /// Rays whose integration failed; the radius falls back to their last safe time.
    pub diverged_rays: usize,
}

struct Evaluator<'a> {
    model: &'a FoliationModel,
    params: Vec<Complex64>,
}

impl Evaluator<'_> {
    fn full(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut f = self.params.clone();
        f[..y.len()].copy_from_slice(y);
        f
    }

    fn field(&self, y: &[Complex64]) -> Vec<Complex64> {
        let f = self.full(y);
        self.model.field.coeffs.iter().map(|c| c.eval_complex(&f)).collect()
    }

    fn generator_max(&self, y: &[Complex64]) -> f64 {
        let f = self.full(y);
        self.model.saturated.coeffs.iter().map(|c| c.eval_complex(&f).norm()).fold(0.0, f64::max)
    }
}

/// Float coordinates of a symbolic point, parameters at their sample values.
pub fn point_to_complex(model: &FoliationModel, p: &[Value]) -> Vec<Complex64> {
    numeric_point(p, &model.ctx)
}

/// Lower bound `rho |X(p)|` from the flow disc `zeta -> phi_zeta(p)`, where
/// `rho` is the first time any of the rays leaves the polydisc or comes
/// within the threshold of `E`.
pub fn eta_lower_bound_shoot(
    model: &FoliationModel,
    p: &[Complex64],
    ctx: &MetricContext,
    opts: &ShootOptions,
) -> Result<EtaEstimate, EtaError> {
    let n = model.nvars();
    if p.len() != n {
        return Err(EtaError::Arity { got: p.len(), expected: n });
    }
    if !ctx.contains(p) {
        return Err(EtaError::OutsideDomain);
    }
    let ev = Evaluator { model, params: sample_parameters(&model.ctx) };
    if ev.generator_max(p) <= opts.threshold {
        return Err(EtaError::OnSingularSet);
    }
    let x0 = ev.field(p);
    let field_norm = x0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if field_norm == 0.0 {
        return Err(EtaError::ZeroField);
    }
    let s_max = 2f64.powi(opts.max_doublings as i32);
    let stop = |y: &[Complex64]| !ctx.contains(y) || ev.generator_max(y) <= opts.threshold;
    let rhs = |y: &[Complex64]| ev.field(y);
    let results: Vec<(f64, OdeOutcome, OdeStats)> = (0..opts.rays)
        .into_par_iter()
        .map(|k| {
            let dir = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / opts.rays as f64);
            let r = integrate_ray(&rhs, p, dir, s_max, &opts.ode, &stop);
            (r.s, r.outcome, r.stats)
        })
        .collect();
    let mut stats = OdeStats::default();
    let mut rho = s_max;
    let mut diverged_rays = 0;
    for (s, outcome, st) in &results {
        stats.add(st);
        rho = rho.min(*s);
        if *outcome == OdeOutcome::Diverged {
            diverged_rays += 1;
        }
    }
    Ok(EtaEstimate {
        point: p.to_vec(),
        lower_bound: rho * field_norm,
        exact: None,
        shoot_radius: rho,
        field_norm,
        stats,
        diverged_rays,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub s: f64,
    pub point: Vec<Complex64>,
    pub lower_bound: Option<f64>,
    pub exact: Option<f64>,
    pub safe_radius: Option<f64>,
    pub note: String,
}

/// Samples `q(s) = target + s (start - target)` at `s = k / samples`, `k = 1..=samples`.
pub fn continuity_scan(
    model: &FoliationModel,
    ctx: &MetricContext,
    start: &[Complex64],
    target: &[Complex64],
    samples: usize,
    decl: Option<&ProductLeafDecl>,
    opts: &ShootOptions,
) -> Result<Vec<ScanRow>, EtaError> {
    let n = model.nvars();
    for q in [start, target] {
        if q.len() != n {
            return Err(EtaError::Arity { got: q.len(), expected: n });
        }
    }
    if start.iter().zip(target).all(|(a, b)| a == b) || samples == 0 {
        return Err(EtaError::ZeroLength);
    }
    if let Some(d) = decl {
        d.verify(model)?;
    }
    let rows = (1..=samples)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / samples as f64;
            let point: Vec<Complex64> = target.iter().zip(start).map(|(b, a)| b + (a - b) * s).collect();
            let exact = decl.and_then(|d| eta_exact_product(&point, d, ctx).ok());
            match eta_lower_bound_shoot(model, &point, ctx, opts) {
                Ok(e) => ScanRow {
                    s,
                    point,
                    lower_bound: Some(e.lower_bound),
                    exact,
                    safe_radius: Some(e.shoot_radius),
                    note: String::new(),
                },
                Err(e) => ScanRow { s, point, lower_bound: None, exact, safe_radius: None, note: e.to_string() },
            }
        })
        .collect();
    Ok(rows)
}
