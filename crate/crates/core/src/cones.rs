//! Foliation tangent cones from arcs, and transversality verdicts.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{
    decide_vanishing, nullspace, poly_eval, AlgPoly, AlgebraError, GaussianRational,
    Monomial, Polynomial, Value, Vanishing,
};
use crate::foliation::{time_slot, Class, Evidence, FoliationModel, Status, Verdict};
use crate::variety::{solve_variety, Slice, SolveOptions, Variety, VarietyError};

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("the arc lies in the singular set")]
    IdenticallyZero,
    #[error("vanishing of an arc coefficient depends on a parameter")]
    Undecided,
    #[error("arc has {got} components, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `t -> p + (c_1 t^{m_1}, ..., c_N t^{m_N})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub base: Vec<Value>,
    pub coeffs: Vec<GaussianRational>,
    pub exponents: Vec<u32>,
}

impl Arc {
    pub fn curve(&self, nslots: usize) -> Vec<AlgPoly> {
        let t = nslots;
        self.base
            .iter()
            .zip(self.coeffs.iter().zip(&self.exponents))
            .map(|(v, (c, &m))| {
                let mut e = vec![0; nslots + 1];
                e[t] = m;
                let shift = AlgPoly::from_poly(Polynomial::monomial(Monomial(e), c.clone()));
                v.to_alg(nslots).extend_slots(1).add(&shift).expect("no new root")
            })
            .collect()
    }
}

/// Lowest-order coefficient vector of the saturated field along an arc,
/// scaled so that its first numeric nonzero entry is 1.
pub fn arc_limit_direction(model: &FoliationModel, arc: &Arc) -> Result<Vec<AlgPoly>, ConeError> {
    let ctx = &model.ctx;
    let n = ctx.nvars();
    if arc.coeffs.len() != n || arc.exponents.len() != n || arc.base.len() != n {
        return Err(ConeError::Arity { got: arc.coeffs.len(), expected: n });
    }
    let t = time_slot(ctx);
    let pulled = model.pullback(&arc.curve(ctx.nslots()))?;
    let series: Vec<Vec<AlgPoly>> = pulled.iter().map(|g| g.coefficients_in(t)).collect();
    let maxdeg = series.iter().map(|s| s.len()).max().unwrap_or(0);
    for k in 0..maxdeg {
        let mut any = false;
        let mut undecided = false;
        let mut vec = Vec::with_capacity(n);
        for s in &series {
            let c = s.get(k).cloned().unwrap_or_else(|| AlgPoly::from_poly(Polynomial::zero(ctx.nslots() + 1)));
            match decide_vanishing(&c, ctx) {
                Vanishing::Zero => {}
                Vanishing::NonZero => any = true,
                Vanishing::Undecided => undecided = true,
            }
            vec.push(c);
        }
        if undecided {
            return Err(ConeError::Undecided);
        }
        if any {
            return Ok(normalize(vec, ctx.nslots()));
        }
    }
    Err(ConeError::IdenticallyZero)
}

fn normalize(v: Vec<AlgPoly>, nslots: usize) -> Vec<AlgPoly> {
    let lead = v.iter().find_map(|c| c.as_poly().and_then(|p| p.constant_value()).filter(|x| !num_traits::Zero::is_zero(x)));
    let out: Vec<AlgPoly> = match lead {
        Some(c) => {
            let inv = c.inv().expect("nonzero");
            v.iter().map(|x| x.scale(&inv)).collect()
        }
        None => v,
    };
    out.into_iter()
        .map(|x| AlgPoly::new(x.root().cloned(), x.coeffs().iter().map(|c| c.truncate_slots(nslots).unwrap_or_else(|| c.clone())).collect()))
        .collect()
}

/// Indices of certified nonzero entries, or `None` if some entry is undecided.
pub fn direction_support(model: &FoliationModel, d: &[AlgPoly]) -> Option<BTreeSet<usize>> {
    let mut s = BTreeSet::new();
    for (i, c) in d.iter().enumerate() {
        match decide_vanishing(c, &model.ctx) {
            Vanishing::Zero => {}
            Vanishing::NonZero => {
                s.insert(i);
            }
            Vanishing::Undecided => return None,
        }
    }
    Some(s)
}

#[derive(Clone, Debug)]
pub struct SampleOptions {
    pub budget: usize,
    pub max_exponent: u32,
    pub random_arcs: usize,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { budget: 4000, max_exponent: 3, random_arcs: 64, seed: 0 }
    }
}

fn unit_patterns(n: usize, max_exponent: u32) -> Vec<(Vec<i64>, Vec<u32>)> {
    let mut patterns = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = Vec::with_capacity(n);
        let mut x = code;
        for _ in 0..n {
            c.push([0i64, 1, -1][x % 3]);
            x /= 3;
        }
        if c.iter().all(|&v| v == 0) {
            continue;
        }
        patterns.push(c);
    }
    let mut out = Vec::new();
    for c in patterns {
        let support: Vec<usize> = (0..n).filter(|&i| c[i] != 0).collect();
        let k = support.len();
        let combos = (max_exponent as usize).pow(k as u32);
        for code in 0..combos {
            let mut m = vec![1u32; n];
            let mut x = code;
            for &i in &support {
                m[i] = 1 + (x % max_exponent as usize) as u32;
                x /= max_exponent as usize;
            }
            out.push((c.clone(), m));
        }
    }
    out.sort_by_key(|(c, m)| {
        let total: u32 = (0..n).filter(|&i| c[i] != 0).map(|i| m[i]).sum();
        let nz = c.iter().filter(|&&v| v != 0).count();
        (total, nz)
    });
    out
}

/// Directions of the foliation cone at `p` found from a finite family of arcs.
pub fn sample_foliation_cone(model: &FoliationModel, p: &[Value], opts: &SampleOptions) -> Vec<(Arc, Vec<AlgPoly>)> {
    let n = model.nvars();
    let mut arcs: Vec<Arc> = unit_patterns(n, opts.max_exponent)
        .into_iter()
        .take(opts.budget)
        .map(|(c, m)| Arc {
            base: p.to_vec(),
            coeffs: c.into_iter().map(GaussianRational::from_int).collect(),
            exponents: m,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_arcs {
        let coeffs = (0..n)
            .map(|_| GaussianRational::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
            .collect();
        let exponents = (0..n).map(|_| rng.gen_range(1..=opts.max_exponent.max(1))).collect();
        arcs.push(Arc { base: p.to_vec(), coeffs, exponents });
    }
    let mut out: Vec<(Arc, Vec<AlgPoly>)> = Vec::new();
    for arc in arcs {
        if arc.coeffs.iter().all(num_traits::Zero::is_zero) {
            continue;
        }
        if let Ok(d) = arc_limit_direction(model, &arc) {
            if !out.iter().any(|(_, e)| *e == d) {
                out.push((arc, d));
            }
        }
    }
    out
}

/// A sampled cone direction inside a cone component of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessArc {
    pub arc: Arc,
    pub direction: Vec<AlgPoly>,
    pub subspace: BTreeSet<usize>,
}

/// `d * P_i = sum_{j not in S} g_j * P_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syzygy {
    pub index: usize,
    pub d: Polynomial,
    pub g: BTreeMap<usize, Polynomial>,
    /// `d` at the base point.
    pub d_at_point: AlgPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentCertificate {
    pub subspace: BTreeSet<usize>,
    pub syzygies: Vec<Syzygy>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalityCertificate {
    pub components: Vec<ComponentCertificate>,
    pub degree: u32,
}

impl TransversalityCertificate {
    pub fn max_degree(&self) -> u32 {
        self.components
            .iter()
            .flat_map(|c| &c.syzygies)
            .flat_map(|s| std::iter::once(s.d.total_degree()).chain(s.g.values().map(|g| g.total_degree())))
            .max()
            .unwrap_or(0)
    }
}

fn component_directions(e: &Variety, p: &[Value], model: &FoliationModel) -> Result<Vec<BTreeSet<usize>>, VarietyError> {
    Ok(e.c4_cone(p, &model.ctx)?.subspaces)
}

/// `CertifiedNo` when a sampled direction lies in the Whitney cone of `E`.
pub fn falsify_transversal(model: &FoliationModel, p: &[Value], opts: &SampleOptions) -> Verdict {
    let class = Class::Transversal;
    let cone = match component_directions(&model.singular_set, p, model) {
        Ok(c) => c,
        Err(e) => return Verdict::unknown(p, class, e.to_string()),
    };
    for (arc, d) in sample_foliation_cone(model, p, opts) {
        let Some(support) = direction_support(model, &d) else { continue };
        if support.is_empty() {
            continue;
        }
        if let Some(s) = cone.iter().find(|s| support.is_subset(s)) {
            let w = WitnessArc { arc, direction: d, subspace: s.clone() };
            return Verdict::exact(p, class, Status::CertifiedNo, Evidence::TransversalWitness(w));
        }
    }
    Verdict::unknown(p, class, "no sampled direction lies in the cone of E")
}

fn monomials_upto(nslots: usize, active: &[usize], degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial(vec![0; nslots])];
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &out {
            for &s in active {
                let mut e = m.0.clone();
                e[s] += 1;
                let m2 = Monomial(e);
                if !out.contains(&m2) && !next.contains(&m2) {
                    next.push(m2);
                }
            }
        }
        out.extend(next);
    }
    out.sort();
    out
}

/// Searches `d * P_i = sum_{j not in S} g_j P_j` with `deg <= degree` and `d(p) != 0`,
/// preferring the smallest degree of `d`.
pub fn find_syzygy(model: &FoliationModel, p: &[Value], s: &BTreeSet<usize>, i: usize, degree: u32) -> Option<Syzygy> {
    let ctx = &model.ctx;
    let ns = ctx.nslots();
    let coeffs = &model.saturated.coeffs;
    let others: Vec<usize> = (0..model.nvars()).filter(|j| !s.contains(j)).collect();
    let mut active: Vec<usize> = (0..model.nvars()).collect();
    for c in coeffs {
        for sl in c.used_slots() {
            if !active.contains(&sl) {
                active.push(sl);
            }
        }
    }
    active.sort();
    let g_monos = monomials_upto(ns, &active, degree);
    for d_deg in 0..=degree {
        let d_monos: Vec<Monomial> = g_monos.iter().filter(|m| m.degree() <= d_deg).cloned().collect();
        // columns: g_j monomials (j in others), then d monomials
        let mut columns: Vec<Polynomial> = Vec::new();
        for &j in &others {
            for m in &g_monos {
                columns.push(-coeffs[j].mul_monomial(m, &GaussianRational::from_int(1)));
            }
        }
        for m in &d_monos {
            columns.push(coeffs[i].mul_monomial(m, &GaussianRational::from_int(1)));
        }
        let mut row_index: BTreeMap<Monomial, usize> = BTreeMap::new();
        for c in &columns {
            for (m, _) in c.terms() {
                let k = row_index.len();
                row_index.entry(m.clone()).or_insert(k);
            }
        }
        let ncols = columns.len();
        let mut rows = vec![vec![GaussianRational::from_int(0); ncols]; row_index.len()];
        for (col, c) in columns.iter().enumerate() {
            for (m, a) in c.terms() {
                rows[row_index[m]][col] = a.clone();
            }
        }
        let g_cols = others.len() * g_monos.len();
        for v in nullspace(rows, ncols) {
            let d = Polynomial::from_terms(
                ns,
                d_monos.iter().zip(&v[g_cols..]).map(|(m, c)| (m.clone(), c.clone())),
            );
            if d.is_zero() {
                continue;
            }
            let Ok(at) = poly_eval(&d, p) else { continue };
            if decide_vanishing(&at, ctx) != Vanishing::NonZero {
                continue;
            }
            let mut g = BTreeMap::new();
            for (k, &j) in others.iter().enumerate() {
                let gj = Polynomial::from_terms(
                    ns,
                    g_monos
                        .iter()
                        .zip(&v[k * g_monos.len()..(k + 1) * g_monos.len()])
                        .map(|(m, c)| (m.clone(), c.clone())),
                );
                g.insert(j, gj);
            }
            // canonical scaling: d monic
            let lc = d.leading_coeff().inv().expect("nonzero");
            let d = d.scale(&lc);
            let g = g.into_iter().map(|(j, q)| (j, q.scale(&lc))).collect();
            let d_at_point = poly_eval(&d, p).ok()?;
            return Some(Syzygy { index: i, d, g, d_at_point });
        }
    }
    None
}

/// `CertifiedYes` when every cone component of `E` at `p` admits syzygies,
/// using the lowest degree that works.
pub fn certify_transversal(model: &FoliationModel, p: &[Value], degree: u32) -> Verdict {
    let class = Class::Transversal;
    let cone = match component_directions(&model.singular_set, p, model) {
        Ok(c) => c,
        Err(e) => return Verdict::unknown(p, class, e.to_string()),
    };
    'degrees: for deg in 0..=degree {
        let mut components = Vec::new();
        for s in &cone {
            let mut syzygies = Vec::new();
            for &i in s {
                match find_syzygy(model, p, s, i, deg) {
                    Some(z) => syzygies.push(z),
                    None => continue 'degrees,
                }
            }
            components.push(ComponentCertificate { subspace: s.clone(), syzygies });
        }
        let cert = TransversalityCertificate { components, degree: deg };
        return Verdict::exact(p, class, Status::CertifiedYes, Evidence::TransversalCertificate(cert));
    }
    Verdict::unknown(p, class, format!("no certificate of degree <= {degree}"))
}

/// Re-verifies every identity and the nonvanishing at `p`.
pub fn recheck_certificate(model: &FoliationModel, p: &[Value], cert: &TransversalityCertificate) -> Result<(), String> {
    let coeffs = &model.saturated.coeffs;
    let cone = component_directions(&model.singular_set, p, model).map_err(|e| e.to_string())?;
    if cone.len() != cert.components.len() {
        return Err("certificate does not cover the cone of E".into());
    }
    for comp in &cert.components {
        if !cone.contains(&comp.subspace) {
            return Err(format!("component {:?} is not in the cone of E", comp.subspace));
        }
        for &i in &comp.subspace {
            let z = comp
                .syzygies
                .iter()
                .find(|z| z.index == i)
                .ok_or_else(|| format!("missing identity for index {i}"))?;
            let mut rhs = Polynomial::zero(model.ctx.nslots());
            for (&j, g) in &z.g {
                if comp.subspace.contains(&j) {
                    return Err("identity uses a coefficient inside the component".into());
                }
                rhs = &rhs + &(g * &coeffs[j]);
            }
            if !(&(&z.d * &coeffs[i]) - &rhs).is_zero() {
                return Err(format!("identity for index {i} does not expand to zero"));
            }
            let at = poly_eval(&z.d, p).map_err(|e| e.to_string())?;
            if decide_vanishing(&at, &model.ctx) != Vanishing::NonZero {
                return Err(format!("denominator vanishes at the point for index {i}"));
            }
        }
    }
    Ok(())
}

pub fn recheck_witness(model: &FoliationModel, p: &[Value], w: &WitnessArc) -> Result<(), String> {
    if w.arc.base != p {
        return Err("witness arc is based elsewhere".into());
    }
    let d = arc_limit_direction(model, &w.arc).map_err(|e| e.to_string())?;
    if d != w.direction {
        return Err("arc does not reproduce the stored direction".into());
    }
    let support = direction_support(model, &d).ok_or("direction support undecided")?;
    if support.is_empty() || !support.is_subset(&w.subspace) {
        return Err("direction is not in the stored subspace".into());
    }
    let cone = component_directions(&model.singular_set, p, model).map_err(|e| e.to_string())?;
    if !cone.contains(&w.subspace) {
        return Err("subspace is not a cone component of E".into());
    }
    Ok(())
}

/// Points of a component where some certificate denominator vanishes.
pub fn exceptional_set(
    model: &FoliationModel,
    component: &Slice,
    cert: &TransversalityCertificate,
) -> Result<Variety, VarietyError> {
    let ctx = &model.ctx;
    let n = ctx.nslots();
    let mut gens: Vec<Polynomial> = Vec::new();
    let mut declared = model.solve.declared_factors.clone();
    for (&k, v) in &component.assignments {
        match v {
            Value::Sym(q) => gens.push(&Polynomial::var(n, k) - q),
            Value::Root(r) => {
                let m = r.minimal_poly_in(n, k);
                declared.push(m.clone());
                gens.push(m);
            }
        }
    }
    let mut product = Polynomial::one(n);
    for z in cert.components.iter().flat_map(|c| &c.syzygies) {
        product = &product * &z.d;
    }
    gens.push(product);
    let v = solve_variety(&gens, ctx, &SolveOptions { declared_factors: declared });
    let mut slices = Vec::new();
    for s in &v.slices {
        if let Some(u) = component.intersect(s, ctx)? {
            if !slices.contains(&u) {
                slices.push(u);
            }
        }
    }
    let mut out = Variety { slices, residuals: v.residuals, assumptions: v.assumptions };
    if let Some(r) = model.domain.radius() {
        out = out.restrict_to_polydisc(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarContext;
    use crate::foliation::{Domain, VectorField};

    fn model_3axes() -> FoliationModel {
        let ctx = VarContext::new(vec!["x".into(), "y".into(), "z".into()], vec![], vec![]).unwrap();
        let n = ctx.nslots();
        let (x, y, z) = (Polynomial::var(n, 0), Polynomial::var(n, 1), Polynomial::var(n, 2));
        let f = VectorField::new(vec![&x * &(&y + &z), &y * &(&x + &z), &z * &(&x + &y)]).unwrap();
        FoliationModel::new(ctx, f, Domain::Affine, SolveOptions::default()).unwrap()
    }

    #[test]
    fn arc_direction() {
        let m = model_3axes();
        let n = m.ctx.nslots();
        let zero = Value::zero(n);
        let arc = Arc {
            base: vec![zero.clone(), zero.clone(), zero.clone()],
            coeffs: vec![GaussianRational::from_int(1), GaussianRational::from_int(-1), GaussianRational::from_int(-1)],
            exponents: vec![1, 1, 1],
        };
        let d = arc_limit_direction(&m, &arc).unwrap();
        let support = direction_support(&m, &d).unwrap();
        assert_eq!(support, [0].into_iter().collect());
        assert_eq!(d[0].as_poly().unwrap(), &Polynomial::one(n));
        let scaled = Arc { coeffs: arc.coeffs.iter().map(|c| c * &GaussianRational::from_int(3)).collect(), ..arc.clone() };
        assert_eq!(arc_limit_direction(&m, &scaled).unwrap(), d);
    }

    #[test]
    fn transversality_at_axes() {
        let m = model_3axes();
        let n = m.ctx.nslots();
        let zero = Value::zero(n);
        let origin = vec![zero.clone(), zero.clone(), zero.clone()];
        let no = falsify_transversal(&m, &origin, &SampleOptions::default());
        assert!(no.is_no(), "{no:?}");
        if let Evidence::TransversalWitness(w) = &no.evidence {
            assert!(recheck_witness(&m, &origin, w).is_ok());
        }
        assert!(!certify_transversal(&m, &origin, 3).is_yes());

        let gx = Value::Sym(Polynomial::var(n, m.ctx.generic_slot_for(0).unwrap()));
        let p = vec![gx, zero.clone(), zero];
        let yes = certify_transversal(&m, &p, 2);
        assert!(yes.is_yes(), "{yes:?}");
        let Evidence::TransversalCertificate(cert) = &yes.evidence else { panic!() };
        assert!(cert.max_degree() <= 2);
        assert!(recheck_certificate(&m, &p, cert).is_ok());
        assert!(!falsify_transversal(&m, &p, &SampleOptions::default()).is_no());
    }
}
