//! Hypotheses of the continuity and extension results for the modulus of
//! uniformization, and inclusion-lattice consistency of a ledger.

use std::collections::BTreeMap;

use crate::algebra::{render_point, substitute_alg, AlgPoly, Polynomial, Value};
use crate::cones::exceptional_set;
use crate::foliation::{
    compute_lp, is_invariant_hypersurface, Class, Evidence, FoliationModel, HypersurfaceCertificate,
    HypersurfaceInvariance, Ledger, Lp,
};
use crate::variety::{Slice, Variety};

/// `{x_index = value}`; invariant when the saturated coefficient `P_index`
/// vanishes on it. Parameter-valued hyperplanes also carry `X(f) = h f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateHypersurface {
    pub index: usize,
    pub value: Value,
    pub certificate: Option<HypersurfaceCertificate>,
}

impl CoordinateHypersurface {
    pub fn check(model: &FoliationModel, index: usize, value: &Value) -> Option<Self> {
        let n = model.ctx.nslots();
        let assign: BTreeMap<usize, Value> = [(index, value.clone())].into_iter().collect();
        let on = substitute_alg(&AlgPoly::from_poly(model.saturated.coeffs[index].clone()), &assign).ok()?;
        if !on.is_zero() {
            return None;
        }
        let certificate = match value {
            Value::Sym(q) => match is_invariant_hypersurface(&model.saturated, &(&Polynomial::var(n, index) - q)) {
                Ok(HypersurfaceInvariance::Invariant(c)) => Some(c),
                _ => return None,
            },
            Value::Root(_) => None,
        };
        Some(CoordinateHypersurface { index, value: value.clone(), certificate })
    }

    pub fn recheck(&self, model: &FoliationModel) -> Result<(), String> {
        let again = Self::check(model, self.index, &self.value)
            .ok_or_else(|| format!("hyperplane {} is not invariant", model.ctx.vars[self.index]))?;
        if let Some(c) = &self.certificate {
            if !c.recheck(&model.saturated) || again.certificate.as_ref().map(|a| &a.f) != Some(&c.f) {
                return Err("hypersurface certificate does not verify".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Property<W> {
    Certified(W),
    Undetermined(String),
}

impl<W> Property<W> {
    pub fn is_certified(&self) -> bool {
        matches!(self, Property::Certified(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyLWitness {
    pub point: Vec<Value>,
    pub lp: Lp,
    pub hypersurfaces: Vec<CoordinateHypersurface>,
    pub sigma: Slice,
    /// Ledger id of the `B_{l_p, sigma}` verdict.
    pub strong_id: usize,
}

impl PropertyLWitness {
    pub fn recheck(&self, model: &FoliationModel, ledger: &Ledger) -> Result<(), String> {
        for h in &self.hypersurfaces {
            h.recheck(model)?;
        }
        let cut: BTreeMap<usize, Value> = self.hypersurfaces.iter().map(|h| (h.index, h.value.clone())).collect();
        if cut != self.sigma.assignments || self.hypersurfaces.len() != cut.len() {
            return Err("hypersurfaces do not cut out the submanifold".into());
        }
        if self.sigma.dimension() != self.lp.value + 1 {
            return Err("submanifold has the wrong dimension".into());
        }
        let v = ledger.get(self.strong_id).ok_or("missing ledger entry")?;
        let expected = Class::StrongSigma { l: self.lp.value, sigma: self.sigma.clone() };
        if v.class != expected || !v.is_yes() || v.point != self.point {
            return Err("referenced verdict is not the certified B_{l_p, sigma}".into());
        }
        for &id in &self.lp.support {
            if ledger.get(id).is_none() {
                return Err("l_p support is missing".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyMWitness {
    pub point: Vec<Value>,
    pub k: usize,
    pub hypersurfaces: Vec<CoordinateHypersurface>,
    pub slice: Slice,
}

impl PropertyMWitness {
    pub fn recheck(&self, model: &FoliationModel) -> Result<(), String> {
        for h in &self.hypersurfaces {
            h.recheck(model)?;
        }
        let cut: BTreeMap<usize, Value> = self.hypersurfaces.iter().map(|h| (h.index, h.value.clone())).collect();
        if cut != self.slice.assignments || self.slice.dimension() != self.k {
            return Err("hypersurfaces do not cut out a slice of dimension dim_p E".into());
        }
        let local = model.singular_set.local_dimension(&self.point, &model.ctx).map_err(|e| e.to_string())?;
        if local != Some(self.k) {
            return Err("dim_p E differs".into());
        }
        if self.slice.contains(&self.point, &model.ctx) != Some(true) {
            return Err("slice misses the point".into());
        }
        if !slice_in_e(model, &self.slice) {
            return Err("slice is not contained in E".into());
        }
        Ok(())
    }
}

fn slice_in_e(model: &FoliationModel, s: &Slice) -> bool {
    model.saturated.coeffs.iter().all(|c| {
        substitute_alg(&AlgPoly::from_poly(c.clone()), &s.assignments).is_ok_and(|v| v.is_zero())
    })
}

fn hyperplanes_for(model: &FoliationModel, s: &Slice) -> Option<Vec<CoordinateHypersurface>> {
    s.assignments.iter().map(|(&k, v)| CoordinateHypersurface::check(model, k, v)).collect()
}

/// Property (L) from certified `B_{l_p, Sigma}` entries whose `Sigma` is cut out
/// by invariant coordinate hyperplanes.
pub fn check_property_l(model: &FoliationModel, p: &[Value], ledger: &Ledger) -> Property<PropertyLWitness> {
    let lp = match compute_lp(model, p, ledger) {
        Ok(lp) => lp,
        Err(_) => return Property::Undetermined("no certified B_j with j >= 1".into()),
    };
    if !lp.exact {
        return Property::Undetermined(format!("l_p is only known to be at least {}", lp.value));
    }
    for (id, v) in ledger.at_point(p) {
        let Class::StrongSigma { l, sigma } = &v.class else { continue };
        if *l != lp.value || !v.is_yes() {
            continue;
        }
        if let Some(hypersurfaces) = hyperplanes_for(model, sigma) {
            return Property::Certified(PropertyLWitness {
                point: p.to_vec(),
                lp: lp.clone(),
                hypersurfaces,
                sigma: sigma.clone(),
                strong_id: id,
            });
        }
    }
    Property::Undetermined(format!("no certified B_{},S with S cut out by invariant hyperplanes", lp.value))
}

fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Property (M) with invariant coordinate hyperplanes through `p`.
pub fn check_property_m(model: &FoliationModel, p: &[Value]) -> Property<PropertyMWitness> {
    let k = match model.singular_set.local_dimension(p, &model.ctx) {
        Ok(Some(k)) => k,
        Ok(None) => return Property::Undetermined("point is not in E".into()),
        Err(e) => return Property::Undetermined(e.to_string()),
    };
    let n = model.nvars();
    for frozen in index_subsets(n, n - k) {
        let slice = Slice::through(p, &frozen);
        if !slice_in_e(model, &slice) {
            continue;
        }
        if let Some(hypersurfaces) = hyperplanes_for(model, &slice) {
            return Property::Certified(PropertyMWitness { point: p.to_vec(), k, hypersurfaces, slice });
        }
    }
    Property::Undetermined(format!("no {} invariant coordinate hyperplanes through the point cut out a subset of E", n - k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypothesisStatus {
    Certified,
    Failed(String),
    Undetermined(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Theorem {
    /// `A_0 ⊂ B_1` and property (L) on `A_0`.
    PropertyL,
    /// `A_0 ⊂ E_L ∪ E_M`.
    Mixed,
    /// Non-transversal locus discrete, plus continuity off `E`.
    Extension,
}

impl Theorem {
    pub fn label(&self) -> &'static str {
        match self {
            Theorem::PropertyL => "continuity-L",
            Theorem::Mixed => "continuity-LM",
            Theorem::Extension => "extension",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremCheck {
    pub theorem: Theorem,
    pub status: HypothesisStatus,
    /// Ledger entries the status rests on.
    pub facts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointFacts {
    pub point: Vec<Value>,
    pub a0: Option<usize>,
    /// A certified `B_j`, `j >= 1`.
    pub b1: Option<usize>,
    pub property_l: Property<PropertyLWitness>,
    pub property_m: Property<PropertyMWitness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentTransversality {
    pub component: Slice,
    pub verdict: Option<usize>,
    pub exceptional: Option<Variety>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionFacts {
    pub components: Vec<ComponentTransversality>,
    /// Pairwise intersections of distinct components.
    pub crossings: Vec<Slice>,
    /// Union of the exceptional sets and crossings, when every component is certified.
    pub exceptional: Option<Vec<Slice>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub ncp_assumed: bool,
    /// Points of `E` in the ledger not certified outside `A_0`.
    pub scope: Vec<PointFacts>,
    /// Ledger points of `E` excluded because `A_0` is certified No there.
    pub excluded: Vec<(Vec<Value>, usize)>,
    pub extension: ExtensionFacts,
    pub theorems: Vec<TheoremCheck>,
}

pub const NCP_STATEMENT: &str = "the family of leaf uniformizations is normal on compact parts (assumed, not checked)";

fn strong_yes(ledger: &Ledger, p: &[Value]) -> Option<usize> {
    ledger
        .at_point(p)
        .filter(|(_, v)| v.is_yes() && matches!(v.class, Class::Strong { l } | Class::StrongSigma { l, .. } if l >= 1))
        .map(|(id, _)| id)
        .next()
}

fn b1_excluded(ledger: &Ledger, p: &[Value]) -> Option<usize> {
    ledger
        .find(p, &Class::Strong { l: 1 })
        .filter(|(_, v)| v.is_no() && v.exhaustive)
        .map(|(id, _)| id)
}

fn transversal_entry(ledger: &Ledger, p: &[Value]) -> Option<usize> {
    ledger.find(p, &Class::Transversal).map(|(id, _)| id)
}

/// Checks the three results over the ledger's points of `E`. Transversality
/// verdicts are looked up at the generic point of every component.
pub fn check_continuity_theorems(model: &FoliationModel, ledger: &Ledger, ncp_assumed: bool) -> HypothesisReport {
    let ctx = &model.ctx;
    let mut scope = Vec::new();
    let mut excluded = Vec::new();
    let mut membership_unknown = Vec::new();
    for p in ledger.points() {
        match model.singular_set.membership(&p, ctx).map(|m| m.is_member()) {
            Ok(Some(true)) => {}
            Ok(Some(false)) => continue,
            _ => {
                membership_unknown.push(render_point(&p, ctx));
                continue;
            }
        }
        let a0 = ledger.find(&p, &Class::A0);
        if let Some((id, v)) = a0 {
            if v.is_no() {
                excluded.push((p.clone(), id));
                continue;
            }
        }
        scope.push(PointFacts {
            a0: a0.map(|(id, _)| id),
            b1: strong_yes(ledger, &p),
            property_l: check_property_l(model, &p, ledger),
            property_m: check_property_m(model, &p),
            point: p,
        });
    }

    let mut common_missing: Vec<String> = Vec::new();
    if !ncp_assumed {
        common_missing.push("NCP is not assumed".into());
    }
    for q in &membership_unknown {
        common_missing.push(format!("membership of {q} in E is undecided"));
    }
    if !model.singular_set.residuals.is_empty() {
        common_missing.push("E has unsolved components".into());
    }

    let theorem_l = {
        let mut missing = common_missing.clone();
        let mut facts = Vec::new();
        let mut failed = None;
        for f in &scope {
            let pt = render_point(&f.point, ctx);
            let a0_yes = f.a0.is_some_and(|id| ledger.entries[id].is_yes());
            match f.b1 {
                Some(id) => facts.push(id),
                None => {
                    if let (true, Some(no)) = (a0_yes, b1_excluded(ledger, &f.point)) {
                        failed = Some((format!("{pt} is in A_0 but not in B_1"), vec![f.a0.unwrap(), no]));
                    }
                    missing.push(format!("{pt}: no certified B_1"));
                }
            }
            match &f.property_l {
                Property::Certified(w) => {
                    facts.push(w.strong_id);
                    facts.extend(&w.lp.support);
                }
                Property::Undetermined(why) => missing.push(format!("{pt}: property (L): {why}")),
            }
        }
        finish(Theorem::PropertyL, failed, missing, facts)
    };

    let theorem_mixed = {
        let mut missing = common_missing.clone();
        let mut facts = Vec::new();
        for f in &scope {
            match (&f.property_l, &f.property_m) {
                (Property::Certified(w), _) => {
                    facts.push(w.strong_id);
                    facts.extend(&w.lp.support);
                }
                (_, Property::Certified(_)) => {}
                (Property::Undetermined(a), Property::Undetermined(b)) => missing.push(format!(
                    "{}: property (L): {a}; property (M): {b}",
                    render_point(&f.point, ctx)
                )),
            }
        }
        finish(Theorem::Mixed, None, missing, facts)
    };

    let (extension, theorem_ext) = extension_check(model, ledger, &common_missing, &theorem_l, &theorem_mixed);

    HypothesisReport {
        ncp_assumed,
        scope,
        excluded,
        extension,
        theorems: vec![theorem_l, theorem_mixed, theorem_ext],
    }
}

fn finish(theorem: Theorem, failed: Option<(String, Vec<usize>)>, missing: Vec<String>, mut facts: Vec<usize>) -> TheoremCheck {
    if let Some((why, ids)) = failed {
        return TheoremCheck { theorem, status: HypothesisStatus::Failed(why), facts: ids };
    }
    facts.sort();
    facts.dedup();
    let status = if missing.is_empty() { HypothesisStatus::Certified } else { HypothesisStatus::Undetermined(missing) };
    TheoremCheck { theorem, status, facts }
}

fn extension_check(
    model: &FoliationModel,
    ledger: &Ledger,
    common_missing: &[String],
    theorem_l: &TheoremCheck,
    theorem_mixed: &TheoremCheck,
) -> (ExtensionFacts, TheoremCheck) {
    let ctx = &model.ctx;
    let mut missing = common_missing.to_vec();
    let mut facts = Vec::new();
    let mut failed = None;
    let continuity = [theorem_l, theorem_mixed]
        .into_iter()
        .find(|t| t.status == HypothesisStatus::Certified);
    match continuity {
        Some(t) => facts.extend(&t.facts),
        None => missing.push("continuity off E is not certified".into()),
    }
    let comps = &model.singular_set.slices;
    let mut components = Vec::new();
    let mut all: Vec<Slice> = Vec::new();
    let mut complete = model.singular_set.residuals.is_empty();
    for c in comps {
        let g = model.generic_point(c);
        let id = transversal_entry(ledger, &g);
        let mut exc = None;
        match id.map(|i| &ledger.entries[i]) {
            Some(v) if v.is_yes() => {
                if let Evidence::TransversalCertificate(cert) = &v.evidence {
                    match exceptional_set(model, c, cert) {
                        Ok(e) => {
                            facts.push(id.unwrap());
                            if !e.residuals.is_empty() {
                                complete = false;
                                missing.push(format!("exceptional set on {} is not solved", c.render(ctx)));
                            }
                            all.extend(e.slices.iter().cloned());
                            exc = Some(e);
                        }
                        Err(e) => {
                            complete = false;
                            missing.push(e.to_string());
                        }
                    }
                }
            }
            Some(v) if v.is_no() && c.dimension() > 0 => {
                failed = Some((
                    format!("not transversal type along the component {}", c.render(ctx)),
                    vec![id.unwrap()],
                ));
                complete = false;
            }
            _ => {
                complete = false;
                missing.push(format!("transversality undecided on {}", c.render(ctx)));
            }
        }
        components.push(ComponentTransversality { component: c.clone(), verdict: id, exceptional: exc });
    }
    let mut crossings = Vec::new();
    for (i, a) in comps.iter().enumerate() {
        for b in &comps[i + 1..] {
            match a.intersect(b, ctx) {
                Ok(Some(u)) => {
                    if !crossings.contains(&u) {
                        crossings.push(u);
                    }
                }
                Ok(None) => {}
                Err(e) => {
                    complete = false;
                    missing.push(e.to_string());
                }
            }
        }
    }
    all.extend(crossings.iter().cloned());
    let mut union: Vec<Slice> = Vec::new();
    for s in all {
        if !union.iter().any(|u| s.is_within(u)) {
            union.retain(|u| !u.is_within(&s));
            union.push(s);
        }
    }
    union.sort();
    if complete {
        if let Some(big) = union.iter().find(|s| s.dimension() > 0) {
            missing.push(format!("exceptional set is not finite: contains {}", big.render(ctx)));
        }
    }
    let check = finish(Theorem::Extension, failed, missing, facts);
    (
        ExtensionFacts { components, crossings, exceptional: complete.then_some(union) },
        check,
    )
}

impl HypothesisReport {
    pub fn status(&self, t: Theorem) -> &HypothesisStatus {
        &self.theorems.iter().find(|c| c.theorem == t).expect("all theorems checked").status
    }

    /// Re-verifies every property witness and exceptional set.
    pub fn recheck(&self, model: &FoliationModel, ledger: &Ledger) -> Result<(), String> {
        for f in &self.scope {
            if let Property::Certified(w) = &f.property_l {
                w.recheck(model, ledger)?;
            }
            if let Property::Certified(w) = &f.property_m {
                w.recheck(model)?;
            }
        }
        for c in &self.extension.components {
            let (Some(id), Some(exc)) = (c.verdict, &c.exceptional) else { continue };
            let Evidence::TransversalCertificate(cert) = &ledger.get(id).ok_or("missing ledger entry")?.evidence else {
                return Err("transversality entry has no certificate".into());
            };
            let again = exceptional_set(model, &c.component, cert).map_err(|e| e.to_string())?;
            if &again != exc {
                return Err("exceptional set does not reproduce".into());
            }
        }
        for t in &self.theorems {
            if t.status == HypothesisStatus::Certified {
                for &id in &t.facts {
                    let v = ledger.get(id).ok_or("missing ledger entry")?;
                    if !v.is_yes() {
                        return Err(format!("{} rests on entry {id}, which is not certified", t.theorem.label()));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub ids: Vec<usize>,
    pub message: String,
}

/// Pairs of certified facts contradicting the inclusions between the classes.
pub fn consistency_check(model: Option<&FoliationModel>, ledger: &Ledger) -> Vec<Violation> {
    let mut out = Vec::new();
    let show = |p: &[Value]| model.map_or_else(|| format!("{p:?}"), |m| render_point(p, &m.ctx));
    for (id, v) in ledger.entries.iter().enumerate() {
        let p = &v.point;
        match &v.class {
            Class::Strong { l: 0 } | Class::StrongSigma { l: 0, .. } if v.is_yes() => out.push(Violation {
                rule: "B_0 is empty",
                ids: vec![id],
                message: format!("{} certified in B_0", show(p)),
            }),
            _ => {}
        }
        if v.is_yes() {
            let weak = match &v.class {
                Class::StrongSigma { l, sigma } => Some(Class::WeakSigma { l: *l, sigma: sigma.clone() }),
                Class::Strong { l } => Some(Class::Weak { l: *l }),
                _ => None,
            };
            if let Some((wid, _)) = weak.and_then(|w| ledger.find(p, &w)).filter(|(_, w)| w.is_no()) {
                out.push(Violation {
                    rule: "B_l is contained in A_l",
                    ids: vec![id, wid],
                    message: format!("{}: {} Yes but the weak class No", show(p), v.class.label()),
                });
            }
            let lower = match &v.class {
                Class::Weak { l } if *l >= 2 => Some(Class::Weak { l: l - 1 }),
                Class::Strong { l } if *l >= 2 => Some(Class::Strong { l: l - 1 }),
                _ => None,
            };
            if let Some((lid, lv)) = lower.and_then(|c| ledger.find(p, &c)).filter(|(_, w)| w.is_no() && w.exhaustive) {
                out.push(Violation {
                    rule: "classes decrease with the order",
                    ids: vec![id, lid],
                    message: format!("{}: {} Yes but {} No", show(p), v.class.label(), lv.class.label()),
                });
            }
            if let (Some(m), Some(l)) = (model, v.class.order()) {
                if !matches!(v.class, Class::A0) {
                    if let Ok(local) = m.singular_set.local_dimension(p, &m.ctx) {
                        if local.is_none_or(|d| d < l) {
                            out.push(Violation {
                                rule: "A_l and B_l lie in components of dimension at least l",
                                ids: vec![id],
                                message: format!("{}: {} Yes with dim_p E = {:?}", show(p), v.class.label(), local),
                            });
                        }
                    }
                }
            }
            if let Class::Weak { l } = v.class {
                let b_no = ledger.find(p, &Class::Strong { l }).filter(|(_, b)| b.is_no() && b.exhaustive);
                let a0_no = ledger.find(p, &Class::A0).filter(|(_, a)| a.is_no());
                if let (Some((bid, _)), Some((aid, _))) = (b_no, a0_no) {
                    out.push(Violation {
                        rule: "A_l minus B_l is contained in A_0",
                        ids: vec![id, bid, aid],
                        message: format!("{}: A_{l} Yes, B_{l} No, A_0 No", show(p)),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{Grade, Status, Verdict};

    #[test]
    fn fabricated_violations() {
        let p = vec![Value::zero(4), Value::zero(4)];
        let sigma = Slice::through(&p, &[]);
        let mut ledger = Ledger::default();
        ledger.push(Verdict::exact(&p, Class::Strong { l: 0 }, Status::CertifiedYes, Evidence::None));
        ledger.push(Verdict::exact(&p, Class::StrongSigma { l: 2, sigma: sigma.clone() }, Status::CertifiedYes, Evidence::None));
        ledger.push(Verdict::exact(&p, Class::WeakSigma { l: 2, sigma }, Status::CertifiedNo, Evidence::None));
        let v = consistency_check(None, &ledger);
        let rules: Vec<&str> = v.iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec!["B_0 is empty", "B_l is contained in A_l"]);
        assert_eq!(ledger.entries[0].grade, Grade::Exact);
    }

    #[test]
    fn subsets() {
        assert_eq!(index_subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(index_subsets(2, 0), vec![Vec::<usize>::new()]);
    }
}
