use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{
    is_invariant_slice, restrict, saturate, Class, Evidence, FoliationError, FoliationModel, Grade,
    Ledger, SliceInvariance, Status, VectorField, Verdict,
};
use crate::algebra::{
    compose_alg, decide_vanishing, poly_eval, substitute_alg, AlgPoly, GaussianRational, Polynomial,
    Value, VarContext, Vanishing,
};
use crate::numeric::{integrate_ray, OdeOptions};
use crate::variety::Slice;

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Degree bound for exact polynomial leaves.
    pub leaf_degree: u32,
    /// The input asserts that coordinate slices are the only candidate submanifolds.
    pub assume_exhaustive: bool,
    /// Real time span for numeric leaf integration.
    pub numeric_time: f64,
    pub leaf_threshold: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { leaf_degree: 8, assume_exhaustive: false, numeric_time: 0.25, leaf_threshold: 1e-6 }
    }
}

/// A user-supplied curve `t -> gamma(t)` through a point, in the ambient
/// context extended by a trailing time slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatrixCandidate {
    pub base: Vec<Value>,
    pub curve: Vec<Polynomial>,
}

fn first_existing(ledger: &Ledger, p: &[Value], class: &Class) -> Option<usize> {
    ledger.find(p, class).map(|(id, _)| id)
}

/// `A_{l,Sigma}` at `p`, where `l = dim Sigma - 1`.
pub fn classify_weak(model: &FoliationModel, p: &[Value], sigma: &Slice, ledger: &mut Ledger) -> usize {
    let l = sigma.dimension().saturating_sub(1);
    let class = Class::WeakSigma { l, sigma: sigma.clone() };
    if let Some(id) = first_existing(ledger, p, &class) {
        return id;
    }
    let v = weak_verdict(model, p, sigma, class);
    ledger.push(v)
}

fn weak_verdict(model: &FoliationModel, p: &[Value], sigma: &Slice, class: Class) -> Verdict {
    let ctx = &model.ctx;
    let l = sigma.dimension().saturating_sub(1);
    if sigma.dimension() < 2 {
        return Verdict::unknown(p, class, "submanifold must have dimension at least 2");
    }
    match model.singular_set.membership(p, ctx).map(|m| m.is_member()) {
        Ok(Some(true)) => {}
        Ok(Some(false)) => return Verdict::exact(p, class, Status::CertifiedNo, Evidence::NotSingular),
        Ok(None) => return Verdict::unknown(p, class, "membership in E depends on a parameter"),
        Err(e) => return Verdict::unknown(p, class, e.to_string()),
    }
    match sigma.contains(p, ctx) {
        Some(true) => {}
        Some(false) => return Verdict::exact(p, class, Status::CertifiedNo, Evidence::NotThroughPoint),
        None => return Verdict::unknown(p, class, "slice membership depends on a parameter"),
    }
    match is_invariant_slice(&model.saturated, sigma) {
        Ok(SliceInvariance::Invariant { .. }) => {}
        Ok(SliceInvariance::NotInvariant { index, value }) => {
            return Verdict::exact(p, class, Status::CertifiedNo, Evidence::NotInvariant { index, value })
        }
        Err(e) => return Verdict::unknown(p, class, e.to_string()),
    }
    let r = match restrict(&model.saturated, sigma, ctx) {
        Ok(r) => r,
        Err(e) => return Verdict::unknown(p, class, e.to_string()),
    };
    let local_dim = match model
        .singular_set
        .intersect_slice(sigma, ctx)
        .and_then(|v| v.local_dimension(p, ctx))
    {
        Ok(d) => d,
        Err(e) => return Verdict::unknown(p, class, e.to_string()),
    };
    if local_dim != Some(l) {
        return Verdict::exact(
            p,
            class,
            Status::CertifiedNo,
            Evidence::DimensionMismatch { local_dim, expected: l },
        );
    }
    if r.field.iter().all(|c| c.is_zero()) {
        return Verdict::exact(
            p,
            class,
            Status::CertifiedNo,
            Evidence::SingularForRestriction { restricted: r.field.clone() },
        );
    }
    let (factor, y) = saturate(&VectorField { coeffs: r.field.clone() });
    let q = match r.lower_point(p, ctx) {
        Some(q) => q,
        None => return Verdict::unknown(p, class, "point uses frozen coordinates"),
    };
    let mut undecided = false;
    for (j, c) in y.coeffs.iter().enumerate() {
        let val = match poly_eval(c, &q) {
            Ok(v) => v,
            Err(e) => return Verdict::unknown(p, class, e.to_string()),
        };
        match decide_vanishing(&val, &r.ctx) {
            Vanishing::NonZero => {
                return Verdict::exact(
                    p,
                    class,
                    Status::CertifiedYes,
                    Evidence::Removable { restricted: y.coeffs.clone(), factor, index: j, value: val, local_dim: l },
                )
            }
            Vanishing::Zero => {}
            Vanishing::Undecided => undecided = true,
        }
    }
    if undecided {
        return Verdict::unknown(p, class, "removability depends on a parameter");
    }
    Verdict::exact(
        p,
        class,
        Status::CertifiedNo,
        Evidence::SingularForRestriction { restricted: y.coeffs.clone() },
    )
}

/// `B_{l,Sigma}` at `p`; also records `A_{l,Sigma}`. Returns `(weak, strong)` ids.
pub fn classify_strong(
    model: &FoliationModel,
    p: &[Value],
    sigma: &Slice,
    opts: &ClassifyOptions,
    ledger: &mut Ledger,
) -> (usize, usize) {
    let weak = classify_weak(model, p, sigma, ledger);
    let l = sigma.dimension().saturating_sub(1);
    let class = Class::StrongSigma { l, sigma: sigma.clone() };
    if let Some(id) = first_existing(ledger, p, &class) {
        return (weak, id);
    }
    let w = ledger.entries[weak].clone();
    let v = match w.status {
        Status::CertifiedNo => Verdict::exact(p, class, Status::CertifiedNo, Evidence::Support { ids: vec![weak] }),
        Status::Unknown => Verdict::unknown(p, class, "weak membership undecided"),
        Status::CertifiedYes => {
            let restricted = match &w.evidence {
                Evidence::Removable { restricted, .. } => restricted.clone(),
                _ => unreachable!("weak Yes carries the restricted field"),
            };
            strong_verdict(model, p, sigma, &restricted, class, opts)
        }
    };
    (weak, ledger.push(v))
}

fn strong_verdict(
    model: &FoliationModel,
    p: &[Value],
    sigma: &Slice,
    restricted: &[Polynomial],
    class: Class,
    opts: &ClassifyOptions,
) -> Verdict {
    let ctx = &model.ctx;
    let lifted = lift_field(sigma, restricted, ctx);
    match polynomial_leaf(p, &lifted, opts.leaf_degree) {
        Ok(Some(leaf)) => leaf_verdict(model, p, leaf, class),
        Ok(None) => numeric_leaf_verdict(model, p, sigma, &lifted, class, opts),
        Err(e) => Verdict::unknown(p, class, e.to_string()),
    }
}

/// Restricted field components written in ambient slots, one per ambient coordinate
/// (zero on frozen coordinates).
pub(crate) fn lift_field(sigma: &Slice, restricted: &[Polynomial], ctx: &VarContext) -> Vec<Polynomial> {
    let free = sigma.free_vars();
    let f = free.len();
    let nv = ctx.nvars();
    let mut out = vec![Polynomial::zero(ctx.nslots()); nv];
    for (k, c) in restricted.iter().enumerate() {
        out[free[k]] = c
            .remap(ctx.nslots(), |s| Some(if s < f { free[s] } else { s - f + nv }))
            .expect("total map");
    }
    out
}

/// Time slot of curves: the slot after the context's slots.
pub fn time_slot(ctx: &VarContext) -> usize {
    ctx.nslots()
}

fn point_as_curve(p: &[Value], nslots: usize) -> Vec<AlgPoly> {
    p.iter().map(|v| v.to_alg(nslots).extend_slots(1)).collect()
}

/// Solution of `gamma' = field(gamma)`, `gamma(0) = p`, when it is a polynomial
/// in time of degree at most `degree`.
pub fn polynomial_leaf(
    p: &[Value],
    field: &[Polynomial],
    degree: u32,
) -> Result<Option<Vec<AlgPoly>>, crate::algebra::AlgebraError> {
    let nslots = field[0].nslots();
    let t = nslots;
    let base = point_as_curve(p, nslots);
    let ext: Vec<Polynomial> = field.iter().map(|c| c.extend_slots(1)).collect();
    let mut gamma = base.clone();
    for _ in 0..=degree {
        let map: BTreeMap<usize, AlgPoly> = gamma.iter().cloned().enumerate().collect();
        let mut next = Vec::with_capacity(gamma.len());
        for (i, c) in ext.iter().enumerate() {
            let rhs = compose_alg(c, &map)?.truncate_degree(t, degree);
            next.push(base[i].add(&rhs.map_coeffs(|q| q.integrate(t)))?);
        }
        if next == gamma {
            break;
        }
        gamma = next;
    }
    let map: BTreeMap<usize, AlgPoly> = gamma.iter().cloned().enumerate().collect();
    for (i, c) in ext.iter().enumerate() {
        if !compose_alg(c, &map)?.sub(&gamma[i].derivative(t))?.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(gamma))
}

pub(crate) fn substitute_time(g: &AlgPoly, t: usize, value: &GaussianRational) -> Result<AlgPoly, crate::algebra::AlgebraError> {
    let n = g.nslots();
    let assign: BTreeMap<usize, Value> = [(t, Value::number(n, value.clone()))].into_iter().collect();
    substitute_alg(g, &assign)
}

fn leaf_verdict(model: &FoliationModel, p: &[Value], leaf: Vec<AlgPoly>, class: Class) -> Verdict {
    let pulled = match model.pullback(&leaf) {
        Ok(v) => v,
        Err(e) => return Verdict::unknown(p, class, e.to_string()),
    };
    let Some(index) = pulled.iter().position(|g| !g.is_zero()) else {
        return Verdict::exact(p, class, Status::CertifiedYes, Evidence::LeafInE { leaf });
    };
    let t = time_slot(&model.ctx);
    let g = &pulled[index];
    let tries = g.degree_in(t) as i64 + 2;
    for k in 1..=tries {
        let t0 = GaussianRational::from_ratio(1, k);
        let Ok(value) = substitute_time(g, t, &t0) else { break };
        if decide_vanishing(&value, &model.ctx) == Vanishing::NonZero {
            return Verdict::exact(p, class, Status::CertifiedNo, Evidence::LeafLeavesE { leaf, index, t: t0, value });
        }
    }
    Verdict::unknown(p, class, "leaf pullback vanishing depends on a parameter")
}

/// Numerical parameter values used whenever a point must be evaluated in floats:
/// distinct, small, and away from excluded values.
pub fn sample_parameters(ctx: &VarContext) -> Vec<Complex64> {
    let nv = ctx.nvars();
    let mut out = vec![Complex64::new(0.0, 0.0); ctx.nslots()];
    for (j, slot) in (nv..ctx.nslots()).enumerate() {
        let mut z = Complex64::new(0.31 + 0.07 * j as f64, 0.0);
        while ctx.excluded_values(slot).any(|c| (c.to_complex() - z).norm() < 1e-3) {
            z += Complex64::new(0.013, 0.0);
        }
        out[slot] = z;
    }
    out
}

/// Float coordinates of a point at the sampled parameter values.
pub fn numeric_point(p: &[Value], ctx: &VarContext) -> Vec<Complex64> {
    let params = sample_parameters(ctx);
    p.iter()
        .map(|v| match v {
            Value::Sym(q) => q.eval_complex(&params),
            Value::Root(r) => r.approx(),
        })
        .collect()
}

fn numeric_leaf_verdict(
    model: &FoliationModel,
    p: &[Value],
    sigma: &Slice,
    lifted: &[Polynomial],
    class: Class,
    opts: &ClassifyOptions,
) -> Verdict {
    let ctx = &model.ctx;
    let nv = ctx.nvars();
    let params = sample_parameters(ctx);
    let y0 = numeric_point(p, ctx);
    let frozen = sigma.frozen_vars();
    let eval_at = |y: &[Complex64]| {
        let mut full = params.clone();
        full[..nv].copy_from_slice(y);
        full
    };
    let rhs = |y: &[Complex64]| {
        let full = eval_at(y);
        (0..nv)
            .map(|i| if frozen.contains(&i) { Complex64::new(0.0, 0.0) } else { lifted[i].eval_complex(&full) })
            .collect::<Vec<_>>()
    };
    let gen_max = |y: &[Complex64]| {
        let full = eval_at(y);
        model.saturated.coeffs.iter().map(|c| c.eval_complex(&full).norm()).fold(0.0, f64::max)
    };
    let radius = model.domain.radius();
    let outside = |y: &[Complex64]| radius.is_some_and(|r| y.iter().any(|z| z.norm() >= r));
    let mut max_generator = 0.0f64;
    let mut steps = 0;
    let mut time = 0.0f64;
    for k in 0..4 {
        let dir = Complex64::i().powu(k);
        let track = std::cell::Cell::new(0.0f64);
        let stop = |y: &[Complex64]| {
            track.set(track.get().max(gen_max(y)));
            outside(y)
        };
        let r = integrate_ray(&rhs, &y0, dir, opts.numeric_time, &OdeOptions::default(), &stop);
        steps += r.stats.accepted;
        time = time.max(r.s);
        max_generator = max_generator.max(track.get());
    }
    let leaning = if max_generator > opts.leaf_threshold {
        "numeric integration leaves E: leaning No"
    } else {
        "numeric integration stays within E: leaning Yes"
    };
    Verdict {
        point: p.to_vec(),
        class,
        status: Status::Unknown,
        grade: Grade::Numeric,
        evidence: Evidence::NumericLeaf { max_generator, time, steps },
        exhaustive: false,
        note: leaning.into(),
    }
}

/// Candidate coordinate slices of dimension `l + 1` through `p`, frozen index
/// sets in lexicographic order.
pub fn enumerate_slices(p: &[Value], l: usize) -> Vec<Slice> {
    let n = p.len();
    if l + 1 > n {
        return Vec::new();
    }
    let k = n - l - 1;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(Slice::through(p, &idx));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Existential classes `A_l` and `B_l` at `p` over auto-enumerated and supplied
/// slices. Returns `(A_l id, B_l id)`.
pub fn classify_order(
    model: &FoliationModel,
    p: &[Value],
    l: usize,
    supplied: &[Slice],
    opts: &ClassifyOptions,
    ledger: &mut Ledger,
) -> (usize, usize) {
    let a_class = Class::Weak { l };
    let b_class = Class::Strong { l };
    if let (Some(a), Some(b)) = (first_existing(ledger, p, &a_class), first_existing(ledger, p, &b_class)) {
        return (a, b);
    }
    let ctx = &model.ctx;
    let local = match model.singular_set.local_dimension(p, ctx) {
        Ok(d) => d,
        Err(e) => {
            let a = ledger.push(Verdict::unknown(p, a_class, e.to_string()));
            let b = ledger.push(Verdict::unknown(p, b_class, e.to_string()));
            return (a, b);
        }
    };
    let Some(local) = local else {
        let a = ledger.push(Verdict::exact(p, a_class, Status::CertifiedNo, Evidence::NotSingular));
        let b = ledger.push(Verdict::exact(p, b_class, Status::CertifiedNo, Evidence::NotSingular));
        return (a, b);
    };
    if l == 0 || l > local {
        // no submanifold can meet E in dimension l at p
        let ev = Evidence::DimensionMismatch { local_dim: Some(local), expected: l };
        let mut a = Verdict::exact(p, a_class, Status::CertifiedNo, ev.clone());
        let mut b = Verdict::exact(p, b_class, Status::CertifiedNo, ev);
        a.exhaustive = true;
        b.exhaustive = true;
        return (ledger.push(a), ledger.push(b));
    }
    let mut sigmas = enumerate_slices(p, l);
    for s in supplied {
        if s.dimension() == l + 1 && !sigmas.contains(s) {
            sigmas.push(s.clone());
        }
    }
    let mut weak_ids = Vec::new();
    let mut strong_ids = Vec::new();
    for s in &sigmas {
        let (w, st) = classify_strong(model, p, s, opts, ledger);
        weak_ids.push(w);
        strong_ids.push(st);
    }
    let a = existential(ledger, p, a_class, &weak_ids, opts.assume_exhaustive);
    let b = existential(ledger, p, b_class, &strong_ids, opts.assume_exhaustive);
    (ledger.push(a), ledger.push(b))
}

fn existential(ledger: &Ledger, p: &[Value], class: Class, ids: &[usize], exhaustive: bool) -> Verdict {
    if let Some(&id) = ids.iter().find(|&&i| ledger.entries[i].is_yes()) {
        return Verdict::exact(p, class, Status::CertifiedYes, Evidence::Support { ids: vec![id] });
    }
    let all_no = ids.iter().all(|&i| ledger.entries[i].is_no());
    if all_no && exhaustive {
        let mut v = Verdict::exact(p, class, Status::CertifiedNo, Evidence::Support { ids: ids.to_vec() });
        v.exhaustive = true;
        return v.with_note("coordinate slices exhausted; no other submanifold assumed");
    }
    let mut v = Verdict::unknown(
        p,
        class,
        if all_no { "no coordinate slice certifies; other submanifolds not excluded" } else { "undecided slices" },
    );
    v.evidence = Evidence::Support { ids: ids.to_vec() };
    v
}

/// Checks a separatrix candidate: passes through `p`, tangent to the saturated
/// field, and leaves the singular set.
pub fn check_separatrix(model: &FoliationModel, p: &[Value], curve: &[AlgPoly]) -> Result<Evidence, String> {
    let ctx = &model.ctx;
    let t = time_slot(ctx);
    if curve.len() != ctx.nvars() {
        return Err("curve has wrong number of components".into());
    }
    let zero = GaussianRational::from_int(0);
    for (i, c) in curve.iter().enumerate() {
        let at0 = substitute_time(c, t, &zero).map_err(|e| e.to_string())?;
        let diff = at0.sub(&p[i].to_alg(ctx.nslots()).extend_slots(1)).map_err(|e| e.to_string())?;
        if decide_vanishing(&diff, ctx) != Vanishing::Zero {
            return Err(format!("curve does not pass through the point in coordinate {}", ctx.vars[i]));
        }
    }
    let deriv: Vec<AlgPoly> = curve.iter().map(|c| c.derivative(t)).collect();
    if deriv.iter().all(|d| d.is_zero()) {
        return Err("curve is constant".into());
    }
    let pulled = model.pullback(curve).map_err(|e| e.to_string())?;
    for i in 0..curve.len() {
        for j in i + 1..curve.len() {
            let a = pulled[i].mul(&deriv[j]).map_err(|e| e.to_string())?;
            let b = pulled[j].mul(&deriv[i]).map_err(|e| e.to_string())?;
            if !a.sub(&b).map_err(|e| e.to_string())?.is_zero() {
                return Err(format!("not tangent: minor ({}, {}) is nonzero", ctx.vars[i], ctx.vars[j]));
            }
        }
    }
    for (index, g) in pulled.iter().enumerate() {
        if g.coefficients_in(t).iter().any(|c| decide_vanishing(c, ctx) == Vanishing::NonZero) {
            return Ok(Evidence::Separatrix { curve: curve.to_vec(), index, pullback: g.clone() });
        }
    }
    Err("curve is not certified to leave the singular set".into())
}

/// `A_0` at `p` from separatrix candidates, exact non-E polynomial leaves in the
/// ledger, or a certified `A_l` with an exhaustive `B_l` No.
pub fn a0_evidence(
    model: &FoliationModel,
    p: &[Value],
    candidates: &[SeparatrixCandidate],
    ledger: &mut Ledger,
) -> usize {
    let class = Class::A0;
    if let Some(id) = first_existing(ledger, p, &class) {
        return id;
    }
    match model.singular_set.membership(p, &model.ctx).map(|m| m.is_member()) {
        Ok(Some(true)) => {}
        Ok(Some(false)) => return ledger.push(Verdict::exact(p, class, Status::CertifiedNo, Evidence::NotSingular)),
        _ => return ledger.push(Verdict::unknown(p, class, "membership in E undecided")),
    }
    let mut curves: Vec<Vec<AlgPoly>> = Vec::new();
    for c in candidates.iter().filter(|c| c.base == p) {
        curves.push(c.curve.iter().cloned().map(AlgPoly::from_poly).collect());
    }
    for (_, v) in ledger.at_point(p) {
        if let Evidence::LeafLeavesE { leaf, .. } = &v.evidence {
            curves.push(leaf.clone());
        }
    }
    let mut reasons = Vec::new();
    for c in &curves {
        match check_separatrix(model, p, c) {
            Ok(ev) => return ledger.push(Verdict::exact(p, class, Status::CertifiedYes, ev)),
            Err(r) => reasons.push(r),
        }
    }
    let route = ledger.at_point(p).find_map(|(aid, a)| match a.class {
        Class::Weak { l } if a.is_yes() => ledger
            .find(p, &Class::Strong { l })
            .filter(|(_, b)| b.is_no() && b.exhaustive)
            .map(|(bid, _)| vec![aid, bid]),
        _ => None,
    });
    if let Some(ids) = route {
        return ledger.push(Verdict::exact(p, class, Status::CertifiedYes, Evidence::Support { ids }));
    }
    let note = if reasons.is_empty() {
        "no separatrix candidate and no ledger route".to_string()
    } else {
        format!("candidates rejected: {}", reasons.join("; "))
    };
    ledger.push(Verdict::unknown(p, class, note))
}

/// `l_p = max { j : p in B_j }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lp {
    pub value: usize,
    /// False when only a lower bound is certified.
    pub exact: bool,
    pub support: Vec<usize>,
}

pub fn compute_lp(model: &FoliationModel, p: &[Value], ledger: &Ledger) -> Result<Lp, FoliationError> {
    let best = ledger
        .at_point(p)
        .filter_map(|(id, v)| match v.class {
            Class::Strong { l } if v.is_yes() => Some((l, id)),
            _ => None,
        })
        .max();
    let Some((j, id)) = best else {
        return Err(FoliationError::NoCertifiedB);
    };
    let mut support = vec![id];
    let local = model.singular_set.local_dimension(p, &model.ctx).ok().flatten();
    let mut exact = local.is_some_and(|d| j >= d);
    if !exact {
        if let Some((nid, _)) = ledger
            .find(p, &Class::Strong { l: j + 1 })
            .filter(|(_, v)| v.is_no() && v.exhaustive)
        {
            support.push(nid);
            exact = true;
        }
    }
    Ok(Lp { value: j, exact, support })
}
