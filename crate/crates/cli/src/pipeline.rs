//! Runs the analysis stages over a parsed file.

use std::collections::BTreeMap;

use folia_core::algebra::{invert, GaussianRational, Polynomial, Value, VarContext};
use folia_core::cones::{certify_transversal, falsify_transversal, SampleOptions};
use folia_core::eta::{eta_exact_product, eta_lower_bound_shoot, point_to_complex, EtaEstimate, MetricContext, ProductLeafDecl, ShootOptions};
use folia_core::foliation::{
    a0_evidence, classify_order, compute_lp, is_invariant_hypersurface, ClassifyOptions, FoliationModel,
    HypersurfaceInvariance, Ledger, Lp, SeparatrixCandidate, VectorField,
};
use folia_core::recheck::recheck_ledger;
use folia_core::theorems::{check_continuity_theorems, consistency_check, HypothesisReport, Violation};
use folia_core::variety::SolveOptions;
use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::syntax::FoliationFile;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot build the model: {0}")]
    Model(String),
    #[error("coordinate change: {0}")]
    Change(String),
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub classify: ClassifyOptions,
    pub sample: SampleOptions,
    pub cert_degree: u32,
    pub shoot: ShootOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            classify: ClassifyOptions::default(),
            sample: SampleOptions { budget: 600, max_exponent: 2, random_arcs: 16, seed: 0 },
            cert_degree: 3,
            shoot: ShootOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Query,
    Component(usize),
}

#[derive(Clone, Debug)]
pub struct PointRecord {
    pub point: Vec<Value>,
    pub origin: Origin,
    pub in_e: Option<bool>,
    pub local_dim: Option<usize>,
    pub lp: Option<Lp>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct InvarianceRecord {
    pub f: Polynomial,
    pub result: Result<HypersurfaceInvariance, String>,
}

#[derive(Clone, Debug)]
pub struct EtaRecord {
    pub point: Vec<Value>,
    pub numeric: Vec<Complex64>,
    pub exact: Option<f64>,
    pub estimate: Result<EtaEstimate, String>,
}

/// Everything the emitters need. Symbolic data is in the analysed coordinates,
/// which differ from the input ones only under a `change` declaration.
#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub file: FoliationFile,
    pub input_sha256: String,
    pub model: FoliationModel,
    pub invariants: Vec<InvarianceRecord>,
    pub points: Vec<PointRecord>,
    pub ledger: Ledger,
    pub hypotheses: Option<HypothesisReport>,
    pub consistency: Vec<Violation>,
    pub eta: Vec<EtaRecord>,
    pub product: Option<Result<ProductLeafDecl, String>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `x = A x'`: substitution of the new coordinates into old polynomials, and
/// the inverse map for points.
pub struct CoordinateChange {
    a: Vec<Vec<GaussianRational>>,
    inv: Vec<Vec<GaussianRational>>,
}

impl CoordinateChange {
    pub fn new(a: Vec<Vec<GaussianRational>>) -> Result<Self, PipelineError> {
        let inv = invert(&a).ok_or_else(|| PipelineError::Change("matrix is singular".into()))?;
        Ok(CoordinateChange { a, inv })
    }

    fn combination(m: &[Vec<GaussianRational>], i: usize, vals: &[Polynomial], ns: usize) -> Polynomial {
        m[i].iter()
            .zip(vals)
            .fold(Polynomial::zero(ns), |acc, (c, v)| &acc + &v.scale(c))
    }

    /// `f(A x')`.
    pub fn pull(&self, f: &Polynomial) -> Polynomial {
        let ns = f.nslots();
        let vars: Vec<Polynomial> = (0..self.a.len()).map(|j| Polynomial::var(ns, j)).collect();
        let map: BTreeMap<usize, Polynomial> =
            (0..self.a.len()).map(|i| (i, Self::combination(&self.a, i, &vars, ns))).collect();
        f.substitute(&map)
    }

    /// `A^{-1} X(A x')`.
    pub fn field(&self, x: &[Polynomial]) -> Vec<Polynomial> {
        let ns = x.first().map_or(0, |p| p.nslots());
        let pulled: Vec<Polynomial> = x.iter().map(|c| self.pull(c)).collect();
        (0..x.len()).map(|i| Self::combination(&self.inv, i, &pulled, ns)).collect()
    }

    /// `A^{-1} v` for polynomial-valued vectors (points and curves).
    pub fn vector(&self, v: &[Polynomial]) -> Vec<Polynomial> {
        let ns = v.first().map_or(0, |p| p.nslots());
        (0..v.len()).map(|i| Self::combination(&self.inv, i, v, ns)).collect()
    }

    pub fn point(&self, p: &[Value]) -> Result<Vec<Value>, PipelineError> {
        if p.iter().all(|v| matches!(v, Value::Sym(_))) {
            let polys: Vec<Polynomial> =
                p.iter().map(|v| if let Value::Sym(q) = v { q.clone() } else { unreachable!() }).collect();
            return Ok(self.vector(&polys).into_iter().map(Value::Sym).collect());
        }
        // algebraic coordinates survive only a permutation-like change
        let mut out = Vec::with_capacity(p.len());
        for row in &self.inv {
            let nz: Vec<usize> = (0..row.len()).filter(|&j| !num_traits::Zero::is_zero(&row[j])).collect();
            match nz.as_slice() {
                [j] if num_traits::One::is_one(&row[*j]) => out.push(p[*j].clone()),
                _ => return Err(PipelineError::Change("algebraic points need a permutation change".into())),
            }
        }
        Ok(out)
    }
}

/// Model, separatrices and queries in the analysed coordinates.
pub struct Prepared {
    pub model: FoliationModel,
    pub separatrices: Vec<SeparatrixCandidate>,
    pub queries: Vec<Vec<Value>>,
    pub invariants: Vec<Polynomial>,
    pub change: Option<CoordinateChange>,
}

pub fn prepare(file: &FoliationFile) -> Result<Prepared, PipelineError> {
    let change = file.change.clone().map(CoordinateChange::new).transpose()?;
    let ctx: VarContext = file.ctx.clone();
    let (field, separatrices, queries, invariants) = match &change {
        None => (file.field.clone(), file.separatrices.clone(), file.queries.clone(), file.invariants.clone()),
        Some(c) => {
            let seps = file
                .separatrices
                .iter()
                .map(|s| {
                    Ok(SeparatrixCandidate { base: c.point(&s.base)?, curve: c.vector(&s.curve) })
                })
                .collect::<Result<Vec<_>, PipelineError>>()?;
            let qs = file.queries.iter().map(|q| c.point(q)).collect::<Result<Vec<_>, _>>()?;
            let inv = file.invariants.iter().map(|f| c.pull(f)).collect();
            (c.field(&file.field), seps, qs, inv)
        }
    };
    let declared: Vec<Polynomial> = file
        .factors
        .iter()
        .flat_map(|f| f.factors.iter())
        .filter(|f| !f.is_constant())
        .map(|f| change.as_ref().map_or_else(|| f.clone(), |c| c.pull(f)))
        .collect();
    let vf = VectorField::new(field).map_err(|e| PipelineError::Model(e.to_string()))?;
    let model = FoliationModel::new(ctx, vf, file.domain.clone(), SolveOptions { declared_factors: declared })
        .map_err(|e| PipelineError::Model(e.to_string()))?;
    Ok(Prepared { model, separatrices, queries, invariants, change })
}

fn analyze_point(
    model: &FoliationModel,
    p: &[Value],
    origin: Origin,
    separatrices: &[SeparatrixCandidate],
    opts: &PipelineOptions,
) -> (Ledger, PointRecord) {
    let ctx = &model.ctx;
    let mut ledger = Ledger::default();
    let mut errors = Vec::new();
    let in_e = match model.singular_set.membership(p, ctx) {
        Ok(m) => m.is_member(),
        Err(e) => {
            errors.push(e.to_string());
            None
        }
    };
    let local_dim = model.singular_set.local_dimension(p, ctx).ok().flatten();
    let mut lp = None;
    if in_e == Some(true) {
        for l in 1..=model.nvars().saturating_sub(2) {
            classify_order(model, p, l, &[], &opts.classify, &mut ledger);
        }
        a0_evidence(model, p, separatrices, &mut ledger);
        let mut t = certify_transversal(model, p, opts.cert_degree);
        if !t.is_yes() {
            let f = falsify_transversal(model, p, &opts.sample);
            if f.is_no() {
                t = f;
            }
        }
        ledger.push(t);
        lp = compute_lp(model, p, &ledger).ok();
    } else {
        a0_evidence(model, p, separatrices, &mut ledger);
    }
    let rec = PointRecord { point: p.to_vec(), origin, in_e, local_dim, lp, errors };
    (ledger, rec)
}

/// Points to analyse: queries in order, then one generic point per component
/// of `E` when requested.
pub fn analysis_points(file: &FoliationFile, prepared: &Prepared) -> Vec<(Vec<Value>, Origin)> {
    let mut pts: Vec<(Vec<Value>, Origin)> = prepared.queries.iter().map(|q| (q.clone(), Origin::Query)).collect();
    if file.query_components {
        for (k, s) in prepared.model.singular_set.slices.iter().enumerate() {
            let g = prepared.model.generic_point(s);
            if !pts.iter().any(|(q, _)| *q == g) {
                pts.push((g, Origin::Component(k)));
            }
        }
    }
    pts
}

pub fn run_pipeline(file: &FoliationFile, source: &[u8], opts: &PipelineOptions) -> Result<AnalysisReport, PipelineError> {
    let prepared = prepare(file)?;
    let model = &prepared.model;
    let mut opts = opts.clone();
    opts.classify.assume_exhaustive |= file.assume_exhaustive;

    let invariants = prepared
        .invariants
        .iter()
        .map(|f| InvarianceRecord {
            f: f.clone(),
            result: is_invariant_hypersurface(&model.saturated, f).map_err(|e| e.to_string()),
        })
        .collect();

    let pts = analysis_points(file, &prepared);
    let per_point: Vec<(Ledger, PointRecord)> = pts
        .par_iter()
        .map(|(p, origin)| analyze_point(model, p, *origin, &prepared.separatrices, &opts))
        .collect();
    let mut ledger = Ledger::default();
    let mut points = Vec::new();
    for (l, r) in per_point {
        ledger.append(l);
        points.push(r);
    }

    let hypotheses = (!points.is_empty()).then(|| check_continuity_theorems(model, &ledger, file.assume_ncp));
    let consistency = consistency_check(Some(model), &ledger);

    let product = file.product.map(|k| {
        let d = ProductLeafDecl { coordinate: k };
        d.verify(model).map(|_| d).map_err(|e| e.to_string())
    });
    let mut eta = Vec::new();
    if let Some(radius) = model.domain.radius() {
        let metric = MetricContext::new(radius).map_err(|e| PipelineError::Model(e.to_string()))?;
        for r in points.iter().filter(|r| r.in_e == Some(false)) {
            let numeric = point_to_complex(model, &r.point);
            let exact = match &product {
                Some(Ok(d)) if radius == 1.0 => eta_exact_product(&numeric, d, &metric).ok(),
                _ => None,
            };
            let estimate = eta_lower_bound_shoot(model, &numeric, &metric, &opts.shoot).map_err(|e| e.to_string());
            eta.push(EtaRecord { point: r.point.clone(), numeric, exact, estimate });
        }
    }

    Ok(AnalysisReport {
        file: file.clone(),
        input_sha256: sha256_hex(source),
        model: prepared.model,
        invariants,
        points,
        ledger,
        hypotheses,
        consistency,
        eta,
        product,
    })
}

/// Re-verifies every certificate in the report. Returns the failures.
pub fn recheck_report(report: &AnalysisReport) -> Vec<String> {
    let model = &report.model;
    let mut out: Vec<String> = recheck_ledger(model, &report.ledger)
        .into_iter()
        .map(|(id, e)| format!("entry #{id}: {e}"))
        .collect();
    for r in &report.invariants {
        if let Ok(HypersurfaceInvariance::Invariant(c)) = &r.result {
            if !c.recheck(&model.saturated) {
                out.push(format!("invariant hypersurface {}: certificate fails", r.f.display(&model.ctx)));
            }
        }
    }
    if let Some(h) = &report.hypotheses {
        if let Err(e) = h.recheck(model, &report.ledger) {
            out.push(format!("hypothesis report: {e}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_foliation_file;

    #[test]
    fn change_of_coordinates_conjugates_the_field() {
        let src = "foliation \"s\" { vars: x, y; field { x: y; y: 0; } change [[1, 1], [0, 1]]; query (1, 0); }";
        let f = parse_foliation_file(src).unwrap();
        let p = prepare(&f).unwrap();
        // x = x' + y', y = y': X' = A^{-1} (y', 0) = (y', 0)
        let ns = f.ctx.nslots();
        assert_eq!(p.model.field.coeffs[0], Polynomial::var(ns, 1));
        assert!(p.model.field.coeffs[1].is_zero());
        assert_eq!(p.queries[0][0].as_number(), Some(GaussianRational::from_int(1)));
    }

    #[test]
    fn empty_queries_give_summary_only() {
        let src = "foliation \"e\" { vars: x, y, z; field { x: x; y: z*y; z: 0; } }";
        let f = parse_foliation_file(src).unwrap();
        let r = run_pipeline(&f, src.as_bytes(), &PipelineOptions::default()).unwrap();
        assert!(r.points.is_empty() && r.ledger.entries.is_empty() && r.hypotheses.is_none());
        assert_eq!(r.model.singular_set.slices.len(), 2);
    }
}
