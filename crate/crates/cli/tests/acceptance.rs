//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use folia::pipeline::{recheck_report, run_pipeline, AnalysisReport, Origin, PipelineOptions};
use folia::report::emit_json;
use folia::syntax::{parse_foliation_file, print_foliation_file};
use folia_core::algebra::{gcd_pair, render_point, AlgPoly, GaussianRational, Monomial, Polynomial, Value, VarContext};
use folia_core::cones::{certify_transversal, exceptional_set};
use folia_core::eta::{eta_exact_product, eta_lower_bound_shoot, MetricContext, ProductLeafDecl, ShootOptions};
use folia_core::foliation::{classify_weak, is_invariant_hypersurface, Class, Evidence, HypersurfaceInvariance, Ledger};
use folia_core::theorems::{HypothesisReport, HypothesisStatus, Property, Theorem};
use folia_core::variety::Slice;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerances.
const ETA_IDENTITY_TOL: f64 = 4.0 * f64::EPSILON;
const SHOOT_TOL: f64 = 1e-6;
const HALVING_TOL: f64 = 1e-4;
const CYCLIC_BUDGET: Duration = Duration::from_secs(30);

const GOLDEN: [&str; 9] = [
    "crossing_axes",
    "cusp_separatrix",
    "plane_and_line",
    "line_in_polydisc",
    "root_lines_rational",
    "root_lines_algebraic",
    "cyclic_monomials",
    "three_axes",
    "cusp_hypersurface",
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn golden_path(name: &str, ext: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join(format!("{name}.{ext}"))
}

fn source(name: &str) -> String {
    std::fs::read_to_string(golden_path(name, "fol")).expect("golden file")
}

fn analyze_source(src: &str) -> Result<AnalysisReport, String> {
    let f = parse_foliation_file(src).map_err(|e| e.to_string())?;
    run_pipeline(&f, src.as_bytes(), &PipelineOptions::default()).map_err(|e| e.to_string())
}

fn analyze(name: &str) -> Result<AnalysisReport, String> {
    analyze_source(&source(name))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Renders with the trailing time slot named `t`.
fn alg_text(a: &AlgPoly, ctx: &VarContext) -> String {
    let mut names: Vec<String> = (0..ctx.nslots()).map(|s| ctx.slot_name(s).to_string()).collect();
    names.push("t".into());
    a.render(&|p: &Polynomial| p.display_with(&names).to_string())
}

fn point_text(r: &AnalysisReport, p: &[Value]) -> String {
    render_point(p, &r.model.ctx)
}

fn component_texts(r: &AnalysisReport) -> BTreeSet<String> {
    r.model.singular_set.slices.iter().map(|s| s.render(&r.model.ctx)).collect()
}

/// Points of `E` analysed by the pipeline.
fn e_points(r: &AnalysisReport) -> Vec<Vec<Value>> {
    r.points.iter().filter(|p| p.in_e == Some(true)).map(|p| p.point.clone()).collect()
}

fn component_points(r: &AnalysisReport) -> Vec<(usize, Vec<Value>)> {
    r.points
        .iter()
        .filter_map(|p| match p.origin {
            Origin::Component(i) => Some((i, p.point.clone())),
            Origin::Query => None,
        })
        .collect()
}

fn sigma_yes(r: &AnalysisReport, p: &[Value], strong: bool, l: usize, sigma: &str) -> bool {
    r.ledger.at_point(p).any(|(_, v)| {
        let hit = match &v.class {
            Class::WeakSigma { l: k, sigma: s } if !strong => *k == l && s.render(&r.model.ctx) == sigma,
            Class::StrongSigma { l: k, sigma: s } if strong => *k == l && s.render(&r.model.ctx) == sigma,
            _ => false,
        };
        hit && v.is_yes()
    })
}

fn class_yes(ledger: &Ledger, p: &[Value], class: &Class) -> bool {
    ledger.find(p, class).is_some_and(|(_, v)| v.is_yes())
}

fn hypotheses(r: &AnalysisReport) -> Result<&HypothesisReport, String> {
    r.hypotheses.as_ref().ok_or_else(|| "no hypothesis report".to_string())
}

fn consistency_empty(r: &AnalysisReport) -> Result<(), String> {
    ensure(r.consistency.is_empty(), || format!("{} consistency violations", r.consistency.len()))
}

fn crossing_axes() -> Outcome {
    let r = analyze("crossing_axes")?;
    let want: BTreeSet<String> = ["{x = 0, y = 0}", "{x = 0, z = 0}"].iter().map(|s| s.to_string()).collect();
    ensure(component_texts(&r) == want, || format!("E = {:?}", component_texts(&r)))?;
    let pts = e_points(&r);
    ensure(pts.len() == 3, || format!("{} points of E analysed", pts.len()))?;
    for p in &pts {
        ensure(sigma_yes(&r, p, false, 1, "{x = 0}"), || format!("A_1 via {{x = 0}} missing at {}", point_text(&r, p)))?;
    }
    for want in ["(0, c, 0)", "(0, 0, c)"] {
        let p = pts.iter().find(|p| point_text(&r, p) == want).ok_or(format!("{want} not analysed"))?;
        let (_, v) = r.ledger.find(p, &Class::A0).ok_or(format!("no A_0 entry at {want}"))?;
        ensure(v.is_yes() && matches!(v.evidence, Evidence::Separatrix { .. }), || format!("A_0 not certified at {want}"))?;
    }
    consistency_empty(&r)?;
    Ok(format!("E has 2 components; A_1 on {} points; A_0 at 2 points", pts.len()))
}

fn cusp_separatrix() -> Outcome {
    let r = analyze("cusp_separatrix")?;
    let find = |t: &str| e_points(&r).into_iter().find(|p| point_text(&r, p) == t).ok_or(format!("{t} not analysed"));
    let on_y = find("(0, c, 0)")?;
    ensure(sigma_yes(&r, &on_y, false, 1, "{z = 0}"), || "A_1 via {z = 0} missing on the y-axis".into())?;
    let on_z = find("(0, 0, c)")?;
    let ctx = &r.model.ctx;
    let sigma = Slice::through(&on_z, &[2]);
    ensure(sigma.render(ctx) == "{z = c}", || format!("unexpected slice {}", sigma.render(ctx)))?;
    let mut ledger = Ledger::default();
    let id = classify_weak(&r.model, &on_z, &sigma, &mut ledger);
    let v = ledger.get(id).expect("entry");
    ensure(v.is_no() && matches!(v.evidence, Evidence::DimensionMismatch { .. }), || {
        format!("classify_weak via {{z = c}}: {:?} {:?}", v.status, v.evidence)
    })?;
    let (_, a0) = r.ledger.find(&on_z, &Class::A0).ok_or("no A_0 entry on the z-axis")?;
    let Evidence::Separatrix { curve, .. } = &a0.evidence else {
        return Err("A_0 on the z-axis is not certified by a separatrix".into());
    };
    ensure(a0.is_yes(), || "A_0 not certified on the z-axis".into())?;
    let shown: Vec<String> = curve.iter().map(|c| alg_text(c, ctx)).collect();
    ensure(shown == ["c*t^2", "c*t^3", "c"], || format!("separatrix {shown:?}"))?;
    Ok("A_1 on the y-axis; {z = c} fails on dimension; cusp separatrix certifies A_0".into())
}

fn plane_and_line() -> Outcome {
    let r = analyze("plane_and_line")?;
    let ctx = &r.model.ctx;
    let dims = r.model.singular_set.components_by_dimension().map_err(|e| e.to_string())?;
    ensure(dims.keys().copied().collect::<Vec<_>>() == [1, 2], || format!("dimensions {:?}", dims.keys()))?;
    let comps = component_points(&r);
    ensure(comps.len() == 2, || "expected one generic point per component".into())?;
    for (_, p) in &comps {
        ensure(class_yes(&r.ledger, p, &Class::Weak { l: 1 }), || format!("A_1 missing at {}", point_text(&r, p)))?;
    }
    let e2 = comps
        .iter()
        .map(|(_, p)| p)
        .find(|p| r.model.singular_set.local_dimension(p, ctx).ok().flatten() == Some(2))
        .ok_or("no point on E_2")?;
    ensure(sigma_yes(&r, e2, false, 2, "{y = 0}"), || "A_2 via {y = 0} missing on E_2".into())?;
    let axis = comps
        .iter()
        .map(|(_, p)| p)
        .find(|p| r.model.singular_set.local_dimension(p, ctx).ok().flatten() == Some(1))
        .ok_or("no point on E_1")?;
    ensure(sigma_yes(&r, axis, true, 1, "{x = 0, w = 0}"), || "B_1 via {x = 0, w = 0} missing on the y-axis".into())?;
    ensure(point_text(&r, e2) == "(0, 0, ~z, ~w)", || format!("E_2 point {}", point_text(&r, e2)))?;
    let v = certify_transversal(&r.model, e2, 3);
    let Evidence::TransversalCertificate(cert) = &v.evidence else {
        return Err("certify_transversal gave no certificate on E_2".into());
    };
    let component = r.model.singular_set.slices.iter().find(|s| s.contains(e2, ctx) == Some(true)).ok_or("no component")?;
    let exc = exceptional_set(&r.model, component, cert).map_err(|e| e.to_string())?;
    let z_zero = Slice::new(4, [(2, Value::zero(ctx.nslots()))].into_iter().collect());
    ensure(exc.residuals.is_empty() && exc.slices.iter().all(|s| s.is_within(&z_zero)), || {
        format!("exceptional set {:?} is not inside {{z = 0}}", exc.slices.iter().map(|s| s.render(ctx)).collect::<Vec<_>>())
    })?;
    consistency_empty(&r)?;
    Ok(format!("dims {{1, 2}}; transversal certificate of degree {}; exceptional set inside {{z = 0}}", cert.degree))
}

fn line_in_polydisc() -> Outcome {
    let r = analyze("line_in_polydisc")?;
    let pts = e_points(&r);
    ensure(!pts.is_empty(), || "no points of E".into())?;
    for p in &pts {
        ensure(sigma_yes(&r, p, true, 1, "{y = 0, z = 0}"), || format!("B_1 missing at {}", point_text(&r, p)))?;
    }
    let h = hypotheses(&r)?;
    ensure(h.ncp_assumed, || "NCP not assumed".into())?;
    for f in &h.scope {
        let Property::Certified(w) = &f.property_l else {
            return Err(format!("property (L) not certified at {}", point_text(&r, &f.point)));
        };
        let idx: Vec<usize> = w.hypersurfaces.iter().map(|h| h.index).collect();
        ensure(idx == [1, 2] && w.hypersurfaces.iter().all(|h| h.value.as_number().is_some_and(|c| c.is_zero())), || "hypersurfaces are not {y = 0}, {z = 0}".into())?;
    }
    ensure(*h.status(Theorem::PropertyL) == HypothesisStatus::Certified, || "continuity-L not certified".into())?;
    Ok(format!("B_1 and property (L) on {} points", pts.len()))
}

fn root_lines() -> Outcome {
    let mut total = 0;
    for name in ["root_lines_rational", "root_lines_algebraic"] {
        let r = analyze(name)?;
        let comps = component_points(&r);
        ensure(comps.len() == r.model.singular_set.slices.len(), || format!("{name}: a component has no point"))?;
        for (_, p) in &comps {
            ensure(sigma_yes(&r, p, true, 1, "{z = 0}"), || format!("{name}: B_1 via {{z = 0}} missing at {}", point_text(&r, p)))?;
        }
        total += comps.len();
    }
    Ok(format!("B_1 via {{z = 0}} on all {total} components"))
}

fn cyclic() -> Outcome {
    let start = Instant::now();
    let r = analyze("cyclic_monomials")?;
    let elapsed = start.elapsed();
    let comps = component_points(&r);
    ensure(comps.len() == 6 && r.model.singular_set.slices.iter().all(|s| s.dimension() == 2), || "expected six planes".into())?;
    for (_, p) in &comps {
        ensure(class_yes(&r.ledger, p, &Class::Strong { l: 2 }), || format!("B_2 missing at {}", point_text(&r, p)))?;
    }
    consistency_empty(&r)?;
    ensure(elapsed < CYCLIC_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("B_2 on 6 planes in {:.2}s", elapsed.as_secs_f64()))
}

fn mixed() -> Outcome {
    let r = analyze("plane_and_line")?;
    let ctx = &r.model.ctx;
    let h = hypotheses(&r)?;
    let (mut l, mut m) = (0, 0);
    for f in &h.scope {
        let dim = r.model.singular_set.local_dimension(&f.point, ctx).ok().flatten();
        match dim {
            Some(1) => {
                ensure(f.property_l.is_certified(), || format!("property (L) missing at {}", point_text(&r, &f.point)))?;
                l += 1;
            }
            Some(2) => {
                ensure(f.property_m.is_certified(), || format!("property (M) missing at {}", point_text(&r, &f.point)))?;
                m += 1;
            }
            _ => {}
        }
    }
    ensure(l > 0 && m > 0, || "points on E_1 and E_2 needed".into())?;
    ensure(*h.status(Theorem::Mixed) == HypothesisStatus::Certified, || "mixed hypotheses not certified".into())?;
    Ok(format!("(L) on {l} points of E_1, (M) on {m} points of E_2"))
}

fn three_axes() -> Outcome {
    let r = analyze("three_axes")?;
    let ctx = &r.model.ctx;
    let n = ctx.nslots();
    let origin = vec![Value::zero(n); 3];
    let (_, v) = r.ledger.find(&origin, &Class::Transversal).ok_or("no transversality entry at 0")?;
    let Evidence::TransversalWitness(w) = &v.evidence else {
        return Err("no witness arc at 0".into());
    };
    ensure(v.is_no(), || "transversality at 0 not refuted".into())?;
    // (t, -t, -t) up to t -> -t.
    let c: Vec<GaussianRational> = w.arc.coeffs.clone();
    let plus = [1, -1, -1].map(GaussianRational::from_int);
    let minus = [-1, 1, 1].map(GaussianRational::from_int);
    ensure((c == plus || c == minus) && w.arc.exponents == [1, 1, 1], || format!("witness arc {c:?}"))?;
    let dir: Vec<String> = w.direction.iter().map(|d| alg_text(d, ctx)).collect();
    ensure(dir == ["1", "0", "0"], || format!("direction {dir:?}"))?;
    let h = hypotheses(&r)?;
    for comp in &h.extension.components {
        let id = comp.verdict.ok_or("component without transversality entry")?;
        let e = r.ledger.get(id).ok_or("missing entry")?;
        let Evidence::TransversalCertificate(cert) = &e.evidence else {
            return Err(format!("no certificate on {}", comp.component.render(ctx)));
        };
        ensure(cert.degree <= 2 && cert.max_degree() <= 2, || format!("certificate degree {}", cert.degree))?;
        let exc = comp.exceptional.as_ref().ok_or("no exceptional set")?;
        ensure(exc.slices.iter().all(|s| s.dimension() == 0 && s.contains(&origin, ctx) == Some(true)), || {
            format!("exceptional set on {} not inside {{0}}", comp.component.render(ctx))
        })?;
    }
    ensure(h.extension.components.len() == 3, || "expected three components".into())?;
    ensure(h.scope.iter().all(|f| f.property_m.is_certified()), || "property (M) missing".into())?;
    ensure(*h.status(Theorem::Extension) == HypothesisStatus::Certified, || "extension hypotheses not certified".into())?;
    let exc = h.extension.exceptional.as_ref().ok_or("no exceptional set")?;
    ensure(exc.len() == 1 && exc[0].render(ctx) == "{x = 0, y = 0, z = 0}", || "exceptional set is not {0}".into())?;
    Ok("witness (t, -t, -t) -> (1, 0, 0); degree <= 2 certificates; exceptional set {0}".into())
}

fn cusp_hypersurface() -> Outcome {
    let r = analyze("cusp_hypersurface")?;
    let ctx = &r.model.ctx;
    let n = ctx.nslots();
    let (x, y) = (Polynomial::var(n, 0), Polynomial::var(n, 1));
    let f = &y.pow(2) - &x.pow(3);
    let quotient = &(&y * &Polynomial::int(n, 2)) - &(&x.pow(2) * &Polynomial::int(n, 3));
    match is_invariant_hypersurface(&r.model.field, &f).map_err(|e| e.to_string())? {
        HypersurfaceInvariance::Invariant(c) => ensure(c.h == quotient, || format!("quotient {}", c.h.display(ctx)))?,
        other => return Err(format!("{other:?}")),
    }
    let want: BTreeSet<String> = ["{x = 0, y = 0}".to_string()].into();
    ensure(component_texts(&r) == want, || format!("E = {:?}", component_texts(&r)))?;
    Ok("quotient 2*y - 3*x^2; E = {x = y = 0}".into())
}

fn random_monomial(rng: &mut ChaCha8Rng, n: usize, names: &[&str]) -> String {
    let deg = rng.gen_range(0..=3);
    let mut exps = vec![0u32; n];
    for _ in 0..deg {
        exps[rng.gen_range(0..n)] += 1;
    }
    let coeff = ["1", "-1", "2", "1/2", "-3"][rng.gen_range(0..5)];
    let mut parts = vec![coeff.to_string()];
    for (i, &e) in exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].to_string()),
            _ => parts.push(format!("{}^{e}", names[i])),
        }
    }
    parts.join("*")
}

/// Random field whose coefficients are single monomials (or zero).
fn random_monomial_field(rng: &mut ChaCha8Rng, k: usize) -> String {
    let n = if rng.gen_bool(0.5) { 3 } else { 4 };
    let names = ["x", "y", "z", "w"];
    let mut coeffs: Vec<String> = (0..n)
        .map(|_| if rng.gen_bool(0.15) { "0".to_string() } else { random_monomial(rng, n, &names) })
        .collect();
    if coeffs.iter().all(|c| c == "0") {
        coeffs[0] = "1".into();
    }
    let lines: String = (0..n).map(|i| format!("    {}: {};\n", names[i], coeffs[i])).collect();
    format!(
        "foliation \"random {k}\" {{\n  vars: {};\n  field {{\n{lines}  }}\n  domain: polydisc 1;\n  query components;\n  query ({});\n}}\n",
        names[..n].join(", "),
        vec!["0"; n].join(", ")
    )
}

fn lattice_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut analysed = 0;
    let mut entries = 0;
    for k in 0..200 {
        let src = random_monomial_field(&mut rng, k);
        let r = analyze_source(&src).map_err(|e| format!("field {k}: {e}\n{src}"))?;
        if !r.consistency.is_empty() {
            let msgs: Vec<String> = r.consistency.iter().map(|v| format!("{}: {}", v.rule, v.message)).collect();
            return Err(format!("field {k}: {}\n{src}", msgs.join("; ")));
        }
        analysed += 1;
        entries += r.ledger.entries.len();
    }
    Ok(format!("{analysed} fields, {entries} ledger entries, no violations"))
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> Polynomial {
    let terms = rng.gen_range(0..=4);
    Polynomial::from_terms(
        n,
        (0..terms).map(|_| {
            let m = Monomial((0..n).map(|_| rng.gen_range(0..=2)).collect());
            let re = GaussianRational::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            let c = if rng.gen_bool(0.2) { &re * &GaussianRational::i() + GaussianRational::from_int(1) } else { re };
            (m, c)
        }),
    )
}

fn algebra_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 3;
    let mut checks = 0;
    while checks < 1000 {
        let (a, b, c) = (random_poly(&mut rng, n), random_poly(&mut rng, n), random_poly(&mut rng, n));
        ensure(&(&a + &b) + &c == &a + &(&b + &c), || "addition is not associative".into())?;
        ensure(&a * &b == &b * &a, || "multiplication is not commutative".into())?;
        ensure(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || "distributivity fails".into())?;
        ensure(&(&a * &b) * &c == &a * &(&b * &c), || "multiplication is not associative".into())?;
        checks += 4;
        if !b.is_zero() {
            let q = (&a * &b).divide_exact(&b).map_err(|e| e.to_string())?;
            ensure(q == a, || "divide_exact does not invert multiplication".into())?;
            checks += 1;
        }
        let g = gcd_pair(&(&a * &c), &(&b * &c));
        if !g.is_zero() {
            ensure((&a * &c).divide_exact(&g).is_ok() && (&b * &c).divide_exact(&g).is_ok(), || "gcd does not divide".into())?;
            if !c.is_zero() {
                ensure(g.divide_exact(&c).is_ok(), || "common factor missing from gcd".into())?;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} exact checks"))
}

fn product_model() -> Result<folia_core::foliation::FoliationModel, String> {
    let src = "foliation \"disc leaves\" {\n  vars: x, y;\n  field {\n    x: 1 + y/2;\n    y: 0;\n  }\n  domain: polydisc 1;\n  product: x;\n}\n";
    let r = analyze_source(src)?;
    Ok(r.model)
}

fn random_in_disc(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn eta_product() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let metric = MetricContext::new(1.0).map_err(|e| e.to_string())?;
    let decl = ProductLeafDecl { coordinate: 0 };
    let mut worst_identity: f64 = 0.0;
    for _ in 0..100 {
        let z0 = random_in_disc(&mut rng, 0.999);
        let p = [z0, random_in_disc(&mut rng, 0.9)];
        let eta = eta_exact_product(&p, &decl, &metric).map_err(|e| e.to_string())?;
        worst_identity = worst_identity.max((eta - (1.0 - z0.norm_sqr())).abs());
    }
    ensure(worst_identity <= ETA_IDENTITY_TOL, || format!("exact value off by {worst_identity:e}"))?;
    let model = product_model()?;
    decl.verify(&model).map_err(|e| e.to_string())?;
    let opts = ShootOptions::default();
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..20 {
        let p = [random_in_disc(&mut rng, 0.9), random_in_disc(&mut rng, 0.9)];
        let exact = eta_exact_product(&p, &decl, &metric).map_err(|e| e.to_string())?;
        let est = eta_lower_bound_shoot(&model, &p, &metric, &opts).map_err(|e| e.to_string())?;
        worst_excess = worst_excess.max(est.lower_bound - exact);
    }
    ensure(worst_excess <= SHOOT_TOL, || format!("shoot bound exceeds exact value by {worst_excess:e}"))?;
    // Tolerances divided by 2^5 halve the steps of the fifth-order integrator.
    let mut fine = ShootOptions::default();
    fine.ode.rtol /= 32.0;
    fine.ode.atol /= 32.0;
    fine.ode.initial_step /= 2.0;
    fine.ode.event_tolerance /= 2.0;
    let cusp = analyze("cusp_hypersurface")?.model;
    let mut worst_halving: f64 = 0.0;
    for (m, pts) in [
        (&model, vec![vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)]]),
        (&cusp, vec![vec![Complex64::new(0.25, 0.0), Complex64::new(0.125, 0.0), Complex64::new(0.0, 0.0)]]),
    ] {
        for p in pts {
            let a = eta_lower_bound_shoot(m, &p, &metric, &opts).map_err(|e| e.to_string())?;
            let b = eta_lower_bound_shoot(m, &p, &metric, &fine).map_err(|e| e.to_string())?;
            worst_halving = worst_halving.max((a.lower_bound - b.lower_bound).abs());
        }
    }
    ensure(worst_halving < HALVING_TOL, || format!("step halving moves the bound by {worst_halving:e}"))?;
    Ok(format!(
        "identity within {worst_identity:e}; shoot excess {worst_excess:.2e}; step halving {worst_halving:.2e}"
    ))
}

const FUZZ_ALPHABET: &[u8] = b"xyzwct01234567890^*+-/()[]{};:,.=!#\" \nabfieldomainqrypsvt~";

fn mutate(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut bytes = base.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..=6) {
        if bytes.is_empty() {
            break;
        }
        let at = rng.gen_range(0..bytes.len());
        match rng.gen_range(0..5) {
            0 => {
                bytes.remove(at);
            }
            1 => bytes.insert(at, FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())]),
            2 => bytes[at] = FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())],
            3 => bytes.truncate(at),
            _ => {
                let end = (at + rng.gen_range(1..20)).min(bytes.len());
                let chunk = bytes[at..end].to_vec();
                let to = rng.gen_range(0..bytes.len());
                bytes.splice(to..to, chunk);
            }
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

fn parser_suite() -> Outcome {
    let mut sources = Vec::new();
    for name in GOLDEN {
        let src = source(name);
        let parsed = parse_foliation_file(&src).map_err(|e| format!("{name}: {e}"))?;
        let printed = print_foliation_file(&parsed);
        let again = parse_foliation_file(&printed).map_err(|e| format!("{name}: reprint does not parse: {e}"))?;
        ensure(again == parsed, || format!("{name}: round trip changes the file"))?;
        ensure(print_foliation_file(&again) == printed, || format!("{name}: printing is not stable"))?;
        let expected = std::fs::read_to_string(golden_path(name, "json")).map_err(|e| format!("{name}: {e}"))?;
        for _ in 0..2 {
            let report = analyze_source(&src)?;
            ensure(emit_json(&report) == expected, || format!("{name}: JSON differs from the stored report"))?;
        }
        let report = analyze_source(&src)?;
        let fails = recheck_report(&report);
        ensure(fails.is_empty(), || format!("{name}: recheck failed: {}", fails.join("; ")))?;
        sources.push(src);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut accepted, mut rejected) = (0, 0);
    for case in 0..10_000 {
        let input = if case % 10 == 9 {
            let len = rng.gen_range(0..200);
            (0..len).map(|_| FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())] as char).collect()
        } else {
            let base = &sources[rng.gen_range(0..sources.len())];
            mutate(&mut rng, base)
        };
        let outcome = catch_unwind(AssertUnwindSafe(|| match parse_foliation_file(&input) {
            Ok(f) => {
                let printed = print_foliation_file(&f);
                match parse_foliation_file(&printed) {
                    Ok(g) if g == f => Ok(true),
                    Ok(_) => Err("reprint differs".to_string()),
                    Err(e) => Err(format!("reprint does not parse: {e}")),
                }
            }
            Err(_) => Ok(false),
        }));
        match outcome {
            Ok(Ok(true)) => accepted += 1,
            Ok(Ok(false)) => rejected += 1,
            Ok(Err(e)) => return Err(format!("fuzz case {case}: {e}\n{input}")),
            Err(_) => return Err(format!("fuzz case {case}: parser panicked\n{input}")),
        }
    }
    Ok(format!("9 round trips, stable JSON, rechecks clean; fuzz {accepted} accepted, {rejected} rejected, 0 crashes"))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("crossing axes replay", crossing_axes),
        ("cusp separatrix replay", cusp_separatrix),
        ("plane and line replay", plane_and_line),
        ("line in polydisc replay", line_in_polydisc),
        ("root lines replay", root_lines),
        ("cyclic monomials replay", cyclic),
        ("mixed theorem replay", mixed),
        ("three axes replay", three_axes),
        ("cusp hypersurface replay", cusp_hypersurface),
        ("inclusion-lattice fuzz", lattice_fuzz),
        ("algebra property suite", algebra_suite),
        ("eta product checks", eta_product),
        ("parser and report suite", parser_suite),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
