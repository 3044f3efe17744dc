//! JSON, text and CSV emission.

use std::collections::BTreeMap;

use folia_core::algebra::{render_point, AlgPoly, Polynomial, Value, VarContext};
use folia_core::cones::{TransversalityCertificate, WitnessArc};
use folia_core::eta::ScanRow;
use folia_core::foliation::{Class, Evidence, Grade, HypersurfaceInvariance, Ledger, Verdict};
use folia_core::theorems::{HypothesisReport, HypothesisStatus, Property, NCP_STATEMENT};
use folia_core::variety::Slice;
use num_complex::Complex64;
use serde_json::{json, Map, Value as Json};

use crate::pipeline::{AnalysisReport, Origin};

pub const SCHEMA: &str = "1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Decimal with 12 significant digits.
pub fn decimal(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let digits = 11 - exp;
    if (0..=20).contains(&digits) {
        format!("{:.*}", digits as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

pub fn complex_decimal(z: Complex64) -> String {
    if z.im == 0.0 {
        decimal(z.re)
    } else if z.re == 0.0 {
        format!("{}*i", decimal(z.im))
    } else if z.im < 0.0 {
        format!("{}-{}*i", decimal(z.re), decimal(-z.im))
    } else {
        format!("{}+{}*i", decimal(z.re), decimal(z.im))
    }
}

struct Names<'a> {
    ctx: &'a VarContext,
    with_t: Vec<String>,
}

impl<'a> Names<'a> {
    fn new(ctx: &'a VarContext) -> Self {
        let mut with_t: Vec<String> = (0..ctx.nslots()).map(|s| ctx.slot_name(s).to_string()).collect();
        with_t.push("t".into());
        Names { ctx, with_t }
    }

    fn poly(&self, p: &Polynomial) -> String {
        if p.nslots() == self.ctx.nslots() {
            p.display(self.ctx).to_string()
        } else {
            p.display_with(&self.with_t).to_string()
        }
    }

    fn alg(&self, a: &AlgPoly) -> String {
        a.render(&|p: &Polynomial| self.poly(p))
    }

    fn point(&self, p: &[Value]) -> String {
        render_point(p, self.ctx)
    }

    fn var(&self, i: usize) -> String {
        self.ctx.vars[i].clone()
    }

    fn slice(&self, s: &Slice) -> String {
        s.render(self.ctx)
    }
}

fn certificate_json(n: &Names, c: &TransversalityCertificate) -> Json {
    let comps: Vec<Json> = c
        .components
        .iter()
        .map(|comp| {
            let syz: Vec<Json> = comp
                .syzygies
                .iter()
                .map(|z| {
                    let g: Map<String, Json> = z.g.iter().map(|(j, q)| (n.var(*j), json!(n.poly(q)))).collect();
                    json!({
                        "index": n.var(z.index),
                        "d": n.poly(&z.d),
                        "g": g,
                        "d_at_point": n.alg(&z.d_at_point),
                    })
                })
                .collect();
            json!({
                "cone_component": comp.subspace.iter().map(|&i| n.var(i)).collect::<Vec<_>>(),
                "syzygies": syz,
            })
        })
        .collect();
    json!({ "degree": c.degree, "components": comps })
}

fn witness_json(n: &Names, w: &WitnessArc) -> Json {
    json!({
        "arc": {
            "coefficients": w.arc.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "exponents": w.arc.exponents,
            "curve": w.arc.curve(n.ctx.nslots()).iter().map(|c| n.alg(c)).collect::<Vec<_>>(),
        },
        "direction": w.direction.iter().map(|d| n.alg(d)).collect::<Vec<_>>(),
        "cone_component": w.subspace.iter().map(|&i| n.var(i)).collect::<Vec<_>>(),
    })
}

fn evidence_json(n: &Names, class: &Class, ev: &Evidence) -> Json {
    let restricted_names = |polys: &[Polynomial]| -> Vec<String> {
        match class.sigma() {
            Some(s) => {
                let rctx = n.ctx.restricted(&s.free_vars());
                polys.iter().map(|p| p.display(&rctx).to_string()).collect()
            }
            None => polys.iter().map(|p| n.poly(p)).collect(),
        }
    };
    match ev {
        Evidence::None => json!({ "kind": "none" }),
        Evidence::NotSingular => json!({ "kind": "not_singular" }),
        Evidence::NotThroughPoint => json!({ "kind": "not_through_point" }),
        Evidence::NotInvariant { index, value } => {
            json!({ "kind": "not_invariant", "coefficient": n.var(*index), "value": n.alg(value) })
        }
        Evidence::DimensionMismatch { local_dim, expected } => {
            json!({ "kind": "dimension_mismatch", "local_dimension": local_dim, "expected": expected })
        }
        Evidence::Removable { restricted, factor, index, value, local_dim } => {
            let free = class.sigma().map(|s| s.free_vars()).unwrap_or_default();
            json!({
                "kind": "removable",
                "restricted_field": restricted_names(restricted),
                "factor": class.sigma().map_or_else(
                    || n.poly(factor),
                    |s| factor.display(&n.ctx.restricted(&s.free_vars())).to_string()
                ),
                "nonzero_component": free.get(*index).map_or_else(|| index.to_string(), |&v| n.var(v)),
                "value": n.alg(value),
                "local_dimension": local_dim,
            })
        }
        Evidence::SingularForRestriction { restricted } => {
            json!({ "kind": "singular_for_restriction", "restricted_field": restricted_names(restricted) })
        }
        Evidence::LeafInE { leaf } => {
            json!({ "kind": "leaf_in_e", "leaf": leaf.iter().map(|c| n.alg(c)).collect::<Vec<_>>() })
        }
        Evidence::LeafLeavesE { leaf, index, t, value } => json!({
            "kind": "leaf_leaves_e",
            "leaf": leaf.iter().map(|c| n.alg(c)).collect::<Vec<_>>(),
            "coefficient": n.var(*index),
            "t": t.to_string(),
            "value": n.alg(value),
        }),
        Evidence::NumericLeaf { max_generator, time, steps } => json!({
            "kind": "numeric_leaf",
            "max_generator": decimal(*max_generator),
            "time": decimal(*time),
            "steps": steps,
        }),
        Evidence::Separatrix { curve, index, pullback } => json!({
            "kind": "separatrix",
            "curve": curve.iter().map(|c| n.alg(c)).collect::<Vec<_>>(),
            "coefficient": n.var(*index),
            "pullback": n.alg(pullback),
        }),
        Evidence::Support { ids } => json!({ "kind": "support", "ids": ids }),
        Evidence::TransversalCertificate(c) => {
            json!({ "kind": "transversality_certificate", "certificate": certificate_json(n, c) })
        }
        Evidence::TransversalWitness(w) => json!({ "kind": "transversality_witness", "witness": witness_json(n, w) }),
        Evidence::Failure(m) => json!({ "kind": "failure", "message": m }),
    }
}

fn verdict_json(n: &Names, id: usize, v: &Verdict) -> Json {
    json!({
        "id": id,
        "point": n.point(&v.point),
        "class": v.class.label(),
        "order": v.class.order(),
        "sigma": v.class.sigma().map(|s| n.slice(s)),
        "status": v.status.to_string(),
        "grade": match v.grade { Grade::Exact => "exact", Grade::Numeric => "numeric" },
        "exhaustive": v.exhaustive,
        "note": v.note,
        "evidence": evidence_json(n, &v.class, &v.evidence),
    })
}

fn status_json(s: &HypothesisStatus) -> Json {
    match s {
        HypothesisStatus::Certified => json!({ "status": "Certified" }),
        HypothesisStatus::Failed(why) => json!({ "status": "Failed", "reason": why }),
        HypothesisStatus::Undetermined(missing) => json!({ "status": "Undetermined", "missing": missing }),
    }
}

fn hypotheses_json(n: &Names, h: &HypothesisReport) -> Json {
    let scope: Vec<Json> = h
        .scope
        .iter()
        .map(|f| {
            let l = match &f.property_l {
                Property::Certified(w) => json!({
                    "certified": true,
                    "l_p": w.lp.value,
                    "l_p_exact": w.lp.exact,
                    "hypersurfaces": w.hypersurfaces.iter().map(|c| format!("{} = {}", n.var(c.index), c.value.render(n.ctx))).collect::<Vec<_>>(),
                    "sigma": n.slice(&w.sigma),
                    "strong_entry": w.strong_id,
                }),
                Property::Undetermined(why) => json!({ "certified": false, "reason": why }),
            };
            let m = match &f.property_m {
                Property::Certified(w) => json!({
                    "certified": true,
                    "k": w.k,
                    "hypersurfaces": w.hypersurfaces.iter().map(|c| format!("{} = {}", n.var(c.index), c.value.render(n.ctx))).collect::<Vec<_>>(),
                    "intersection": n.slice(&w.slice),
                }),
                Property::Undetermined(why) => json!({ "certified": false, "reason": why }),
            };
            json!({
                "point": n.point(&f.point),
                "a0_entry": f.a0,
                "b_entry": f.b1,
                "property_l": l,
                "property_m": m,
            })
        })
        .collect();
    let comps: Vec<Json> = h
        .extension
        .components
        .iter()
        .map(|c| {
            json!({
                "component": n.slice(&c.component),
                "transversal_entry": c.verdict,
                "exceptional_set": c.exceptional.as_ref().map(|v| v.slices.iter().map(|s| n.slice(s)).collect::<Vec<_>>()),
            })
        })
        .collect();
    let theorems: Map<String, Json> = h
        .theorems
        .iter()
        .map(|t| {
            let mut s = status_json(&t.status);
            s["facts"] = json!(t.facts);
            (t.theorem.label().to_string(), s)
        })
        .collect();
    json!({
        "ncp": { "assumed": h.ncp_assumed, "statement": NCP_STATEMENT },
        "scope": scope,
        "excluded": h.excluded.iter().map(|(p, id)| json!({ "point": n.point(p), "a0_entry": id })).collect::<Vec<_>>(),
        "extension": {
            "components": comps,
            "crossings": h.extension.crossings.iter().map(|s| n.slice(s)).collect::<Vec<_>>(),
            "exceptional_set": h.extension.exceptional.as_ref().map(|v| v.iter().map(|s| n.slice(s)).collect::<Vec<_>>()),
        },
        "theorems": theorems,
    })
}

pub fn report_json(r: &AnalysisReport) -> Json {
    let m = &r.model;
    let n = Names::new(&m.ctx);
    let f = &r.file;
    let by_dim: Map<String, Json> = {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, s) in m.singular_set.slices.iter().enumerate() {
            groups.entry(s.dimension()).or_default().push(k);
        }
        groups.into_iter().map(|(d, ks)| (d.to_string(), json!(ks))).collect()
    };
    let singular = json!({
        "dimension": m.singular_set.dimension(),
        "components": m.singular_set.slices.iter().enumerate().map(|(k, s)| json!({
            "id": k,
            "slice": n.slice(s),
            "dimension": s.dimension(),
        })).collect::<Vec<_>>(),
        "by_dimension": by_dim,
        "residuals": m.singular_set.residuals.iter().map(|res| json!({
            "assignments": res.assignments.iter().map(|(k, v)| format!("{} = {}", n.var(*k), v.render(&m.ctx))).collect::<Vec<_>>(),
            "system": res.system.iter().map(|a| n.alg(a)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "parameter_assumptions": m.singular_set.assumptions.iter().map(|p| format!("{} != 0", n.poly(p))).collect::<Vec<_>>(),
    });
    let model = json!({
        "vars": m.ctx.vars,
        "params": f.params.iter().map(|(p, ex)| json!({ "name": p, "excluded": ex.as_ref().map(|c| c.to_string()) })).collect::<Vec<_>>(),
        "field": m.field.coeffs.iter().map(|c| n.poly(c)).collect::<Vec<_>>(),
        "saturated_field": m.saturated.coeffs.iter().map(|c| n.poly(c)).collect::<Vec<_>>(),
        "common_factor": n.poly(&m.common_factor),
        "domain": match m.domain.radius() { Some(_) => format!("polydisc {}", match &m.domain { folia_core::foliation::Domain::Polydisc(r) => r.to_string(), _ => unreachable!() }), None => "affine".into() },
        "change": f.change.as_ref().map(|a| a.iter().map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
        "declared_factors": f.factors.iter().map(|d| json!({ "poly": n.poly(&d.lhs), "factors": d.factors.iter().map(|q| n.poly(q)).collect::<Vec<_>>() })).collect::<Vec<_>>(),
        "assumptions": { "ncp": f.assume_ncp, "exhaustive_slices": f.assume_exhaustive },
    });
    let invariants: Vec<Json> = r
        .invariants
        .iter()
        .map(|i| match &i.result {
            Ok(HypersurfaceInvariance::Invariant(c)) => {
                json!({ "f": n.poly(&i.f), "invariant": true, "quotient": n.poly(&c.h) })
            }
            Ok(HypersurfaceInvariance::NotInvariant { remainder }) => {
                json!({ "f": n.poly(&i.f), "invariant": false, "remainder": n.poly(remainder) })
            }
            Err(e) => json!({ "f": n.poly(&i.f), "invariant": Json::Null, "error": e }),
        })
        .collect();
    let points: Vec<Json> = r
        .points
        .iter()
        .map(|p| {
            let mut summary = Map::new();
            for (id, v) in r.ledger.at_point(&p.point) {
                if v.class.sigma().is_none() {
                    summary.insert(v.class.label(), json!({ "status": v.status.to_string(), "entry": id }));
                }
            }
            json!({
                "point": n.point(&p.point),
                "origin": match p.origin { Origin::Query => "query".to_string(), Origin::Component(k) => format!("component {k}") },
                "in_e": p.in_e,
                "local_dimension": p.local_dim,
                "l_p": p.lp.as_ref().map(|lp| json!({ "value": lp.value, "exact": lp.exact, "support": lp.support })),
                "classes": summary,
                "errors": p.errors,
            })
        })
        .collect();
    let eta: Vec<Json> = r
        .eta
        .iter()
        .map(|e| {
            let est = match &e.estimate {
                Ok(s) => json!({
                    "lower_bound": decimal(s.lower_bound),
                    "shoot_radius": decimal(s.shoot_radius),
                    "field_norm": decimal(s.field_norm),
                    "diverged_rays": s.diverged_rays,
                    "accepted_steps": s.stats.accepted,
                    "rejected_steps": s.stats.rejected,
                }),
                Err(err) => json!({ "error": err }),
            };
            json!({
                "point": n.point(&e.point),
                "numeric_point": e.numeric.iter().map(|z| complex_decimal(*z)).collect::<Vec<_>>(),
                "exact": e.exact.map(decimal),
                "estimate": est,
                "grade": "numeric",
            })
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "tool": { "name": "folia", "version": VERSION },
        "input": { "name": f.name, "sha256": r.input_sha256 },
        "model": model,
        "singular_set": singular,
        "invariant_hypersurfaces": invariants,
        "points": points,
        "ledger": r.ledger.entries.iter().enumerate().map(|(id, v)| verdict_json(&n, id, v)).collect::<Vec<_>>(),
        "hypotheses": r.hypotheses.as_ref().map(|h| hypotheses_json(&n, h)),
        "consistency": r.consistency.iter().map(|v| json!({ "rule": v.rule, "ids": v.ids, "message": v.message })).collect::<Vec<_>>(),
        "product_leaves": r.product.as_ref().map(|p| match p {
            Ok(d) => json!({ "coordinate": n.var(d.coordinate), "verified": true }),
            Err(e) => json!({ "verified": false, "error": e }),
        }),
        "eta": eta,
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn emit_json(r: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(&report_json(r)).expect("JSON values serialize");
    s.push('\n');
    s
}

fn class_rank(c: &Class) -> (usize, usize, usize) {
    match c {
        Class::A0 => (0, 0, 0),
        Class::Weak { l } => (1, *l, 0),
        Class::WeakSigma { l, .. } => (1, *l, 1),
        Class::Strong { l } => (2, *l, 0),
        Class::StrongSigma { l, .. } => (2, *l, 1),
        Class::Transversal => (3, 0, 0),
    }
}

fn evidence_brief(n: &Names, ev: &Evidence) -> String {
    match ev {
        Evidence::Support { ids } => {
            format!("from {}", ids.iter().map(|i| format!("#{i}")).collect::<Vec<_>>().join(", "))
        }
        Evidence::Removable { .. } => "restricted saturated field nonzero".into(),
        Evidence::SingularForRestriction { .. } => "restricted saturated field vanishes".into(),
        Evidence::NotInvariant { index, .. } => format!("coefficient of {} does not vanish on the slice", n.var(*index)),
        Evidence::DimensionMismatch { local_dim, expected } => {
            format!("local dimension {} does not match order {expected}", local_dim.map_or("?".into(), |d| d.to_string()))
        }
        Evidence::LeafInE { .. } => "polynomial leaf inside E".into(),
        Evidence::LeafLeavesE { .. } => "polynomial leaf leaves E".into(),
        Evidence::NumericLeaf { .. } => "numeric leaf".into(),
        Evidence::Separatrix { curve, .. } => {
            format!("separatrix ({})", curve.iter().map(|c| n.alg(c)).collect::<Vec<_>>().join(", "))
        }
        Evidence::TransversalCertificate(c) => format!("syzygy certificate of degree {}", c.degree),
        Evidence::TransversalWitness(w) => format!(
            "witness arc ({}) with direction ({})",
            w.arc.curve(n.ctx.nslots()).iter().map(|c| n.alg(c)).collect::<Vec<_>>().join(", "),
            w.direction.iter().map(|c| n.alg(c)).collect::<Vec<_>>().join(", ")
        ),
        Evidence::NotSingular => "point is not singular".into(),
        Evidence::NotThroughPoint => "slice misses the point".into(),
        Evidence::Failure(m) => format!("failure: {m}"),
        Evidence::None => "no evidence".into(),
    }
}

fn ledger_text(n: &Names, ledger: &Ledger, out: &mut String) {
    let mut order: Vec<usize> = (0..ledger.entries.len()).collect();
    order.sort_by_key(|&i| (class_rank(&ledger.entries[i].class), i));
    let mut current = None;
    for id in order {
        let v = &ledger.entries[id];
        let head = match &v.class {
            Class::WeakSigma { l, .. } => format!("A_{l} (per submanifold)"),
            Class::StrongSigma { l, .. } => format!("B_{l} (per submanifold)"),
            c => c.label(),
        };
        if current.as_ref() != Some(&head) {
            out.push_str(&format!("\n{head}\n"));
            current = Some(head);
        }
        let sigma = v.class.sigma().map(|s| format!(" via {}", n.slice(s))).unwrap_or_default();
        let note = if v.note.is_empty() { String::new() } else { format!(" [{}]", v.note) };
        out.push_str(&format!(
            "  [#{id}] {}{sigma}: {}{} - {}{note}\n",
            n.point(&v.point),
            v.status,
            if v.grade == Grade::Numeric { " (numeric)" } else { "" },
            evidence_brief(n, &v.evidence),
        ));
    }
}

pub fn hypotheses_text(r: &AnalysisReport) -> String {
    let n = Names::new(&r.model.ctx);
    let mut out = String::new();
    let Some(h) = &r.hypotheses else {
        return "no points analysed; theorem hypotheses not checked\n".into();
    };
    out.push_str(&format!("NCP: {}\n", if h.ncp_assumed { "assumed" } else { "not assumed" }));
    for f in &h.scope {
        let l = match &f.property_l {
            Property::Certified(w) => format!("certified (l_p = {}, {})", w.lp.value, n.slice(&w.sigma)),
            Property::Undetermined(why) => format!("undetermined ({why})"),
        };
        let m = match &f.property_m {
            Property::Certified(w) => format!("certified ({})", n.slice(&w.slice)),
            Property::Undetermined(why) => format!("undetermined ({why})"),
        };
        out.push_str(&format!("  {}: property (L) {l}; property (M) {m}\n", n.point(&f.point)));
    }
    for t in &h.theorems {
        let s = match &t.status {
            HypothesisStatus::Certified => "Certified".to_string(),
            HypothesisStatus::Failed(why) => format!("Failed: {why}"),
            HypothesisStatus::Undetermined(m) => format!("Undetermined: {}", m.join("; ")),
        };
        let facts = t.facts.iter().map(|i| format!("#{i}")).collect::<Vec<_>>().join(", ");
        out.push_str(&format!("{}: {s}{}\n", t.theorem.label(), if facts.is_empty() { String::new() } else { format!(" [{facts}]") }));
    }
    if let Some(exc) = &h.extension.exceptional {
        out.push_str(&format!(
            "non-transversal candidates: {}\n",
            if exc.is_empty() { "none".into() } else { exc.iter().map(|s| n.slice(s)).collect::<Vec<_>>().join(", ") }
        ));
    }
    out
}

pub fn emit_text(r: &AnalysisReport) -> String {
    let m = &r.model;
    let n = Names::new(&m.ctx);
    let mut out = String::new();
    out.push_str(&format!("folia {VERSION}: {} (sha256 {})\n", r.file.name, r.input_sha256));
    out.push_str(&format!(
        "field: ({})\n",
        m.field.coeffs.iter().map(|c| n.poly(c)).collect::<Vec<_>>().join(", ")
    ));
    if !m.common_factor.is_constant() {
        out.push_str(&format!("common factor: {}\n", n.poly(&m.common_factor)));
    }
    out.push_str("singular set:\n");
    for (k, s) in m.singular_set.slices.iter().enumerate() {
        out.push_str(&format!("  E[{k}] {} (dimension {})\n", n.slice(s), s.dimension()));
    }
    if !m.singular_set.residuals.is_empty() {
        out.push_str(&format!("  {} unsolved branches\n", m.singular_set.residuals.len()));
    }
    for i in &r.invariants {
        let s = match &i.result {
            Ok(HypersurfaceInvariance::Invariant(c)) => format!("invariant, X(f) = ({}) f", n.poly(&c.h)),
            Ok(HypersurfaceInvariance::NotInvariant { .. }) => "not invariant".into(),
            Err(e) => e.clone(),
        };
        out.push_str(&format!("hypersurface {}: {s}\n", n.poly(&i.f)));
    }
    if r.ledger.entries.is_empty() {
        return out;
    }
    ledger_text(&n, &r.ledger, &mut out);
    out.push_str("\ntheorems\n");
    out.push_str(&hypotheses_text(r));
    if !r.consistency.is_empty() {
        out.push_str("\nconsistency violations\n");
        for v in &r.consistency {
            out.push_str(&format!("  {}: {} {:?}\n", v.rule, v.message, v.ids));
        }
    }
    for e in &r.eta {
        let est = match &e.estimate {
            Ok(s) => format!("lower bound {}", decimal(s.lower_bound)),
            Err(err) => err.clone(),
        };
        let exact = e.exact.map(|x| format!(", exact {}", decimal(x))).unwrap_or_default();
        out.push_str(&format!("eta at {}: {est}{exact}\n", n.point(&e.point)));
    }
    out
}

/// Columns `s, x_1..x_N, lower_bound, exact, safe_radius`.
pub fn emit_scan_csv(vars: &[String], rows: &[ScanRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["s".to_string()];
    header.extend(vars.iter().cloned());
    header.extend(["lower_bound", "exact", "safe_radius"].map(String::from));
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        let mut rec = vec![decimal(r.s)];
        rec.extend(r.point.iter().map(|z| complex_decimal(*z)));
        rec.push(r.lower_bound.map(decimal).unwrap_or_default());
        rec.push(r.exact.map(decimal).unwrap_or_default());
        rec.push(r.safe_radius.map(decimal).unwrap_or_default());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Single-point verdicts for the `classify` and `transversal` commands.
pub fn verdicts_text(ctx: &VarContext, ledger: &Ledger) -> String {
    let n = Names::new(ctx);
    let mut out = String::new();
    ledger_text(&n, ledger, &mut out);
    out
}

pub fn verdicts_json(ctx: &VarContext, ledger: &Ledger) -> Json {
    let n = Names::new(ctx);
    json!({
        "schema": SCHEMA,
        "ledger": ledger.entries.iter().enumerate().map(|(id, v)| verdict_json(&n, id, v)).collect::<Vec<_>>(),
    })
}
