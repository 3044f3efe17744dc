//! Zero sets of polynomial systems as unions of coordinate slices.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{
    decide_vanishing, factor_split, param_poly_nonzero, substitute_alg, values_equal, AlgPoly,
    AlgebraError, FactorKind, GaussianRational, Polynomial, Value, VarContext, Vanishing,
};

#[derive(Debug, Error)]
pub enum VarietyError {
    #[error("the variety has unsolved residual components")]
    ResidualPresent,
    #[error("point is not in the variety")]
    PointNotInVariety,
    #[error("membership depends on an unconstrained parameter")]
    UndecidedParameter,
    #[error("point has {got} coordinates, expected {expected}")]
    PointArity { got: usize, expected: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A coordinate slice `{x_i = v_i : i assigned}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slice {
    pub assignments: BTreeMap<usize, Value>,
    pub nvars: usize,
}

impl Slice {
    pub fn new(nvars: usize, assignments: BTreeMap<usize, Value>) -> Self {
        debug_assert!(assignments.keys().all(|&k| k < nvars));
        Slice { assignments, nvars }
    }

    pub fn dimension(&self) -> usize {
        self.nvars - self.assignments.len()
    }

    pub fn free_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|i| !self.assignments.contains_key(i)).collect()
    }

    pub fn frozen_vars(&self) -> Vec<usize> {
        self.assignments.keys().copied().collect()
    }

    /// The slice through `p` freezing the given coordinates at `p`'s values.
    pub fn through(p: &[Value], frozen: &[usize]) -> Slice {
        Slice::new(p.len(), frozen.iter().map(|&i| (i, p[i].clone())).collect())
    }

    /// Whether this slice's set is contained in `other`'s (syntactic test).
    pub fn is_within(&self, other: &Slice) -> bool {
        other
            .assignments
            .iter()
            .all(|(k, v)| self.assignments.get(k) == Some(v))
    }

    pub fn root(&self) -> Option<&crate::algebra::AlgebraicValue> {
        self.assignments.values().find_map(|v| v.root())
    }

    /// Exact test of `p` on the slice.
    pub fn contains(&self, p: &[Value], ctx: &VarContext) -> Option<bool> {
        let mut undecided = false;
        for (&i, v) in &self.assignments {
            match values_equal(&p[i], v, ctx) {
                Some(true) => {}
                Some(false) => return Some(false),
                None => undecided = true,
            }
        }
        if undecided {
            None
        } else {
            Some(true)
        }
    }

    /// Intersection with another slice; `None` when provably empty.
    pub fn intersect(&self, other: &Slice, ctx: &VarContext) -> Result<Option<Slice>, VarietyError> {
        let mut a = self.assignments.clone();
        for (&k, v) in &other.assignments {
            match a.get(&k) {
                None => {
                    if let (Some(r), Some(s)) = (Slice::new(self.nvars, a.clone()).root(), v.root()) {
                        if r != s {
                            return Err(AlgebraError::MixedAlgebraics.into());
                        }
                    }
                    a.insert(k, v.clone());
                }
                Some(w) => match values_equal(w, v, ctx) {
                    Some(true) => {}
                    Some(false) => return Ok(None),
                    None => return Err(VarietyError::UndecidedParameter),
                },
            }
        }
        Ok(Some(Slice::new(self.nvars, a)))
    }

    pub fn render(&self, ctx: &VarContext) -> String {
        if self.assignments.is_empty() {
            return "{}".into();
        }
        let parts: Vec<String> = self
            .assignments
            .iter()
            .map(|(&k, v)| format!("{} = {}", ctx.vars[k], v.render(ctx)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// A branch the solver could not resolve into slices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub assignments: BTreeMap<usize, Value>,
    pub system: Vec<AlgPoly>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Variety {
    pub slices: Vec<Slice>,
    pub residuals: Vec<Residual>,
    /// Parameter polynomials assumed nonzero while solving.
    pub assumptions: Vec<Polynomial>,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Univariate polynomials whose roots may be used as coordinate values.
    pub declared_factors: Vec<Polynomial>,
}

/// Union of coordinate directions at a point. An empty list is the cone `{0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeAtPoint {
    pub base: Vec<Value>,
    pub subspaces: Vec<BTreeSet<usize>>,
}

/// Which parts of a variety contain a point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointMembership {
    pub slices: Vec<usize>,
    pub undecided_slices: Vec<usize>,
    pub residuals: Vec<usize>,
    pub undecided_residuals: Vec<usize>,
}

impl PointMembership {
    pub fn is_member(&self) -> Option<bool> {
        if !self.slices.is_empty() || !self.residuals.is_empty() {
            Some(true)
        } else if self.undecided_slices.is_empty() && self.undecided_residuals.is_empty() {
            Some(false)
        } else {
            None
        }
    }
}

struct Branch {
    assign: BTreeMap<usize, Value>,
    gens: Vec<AlgPoly>,
}

enum Step {
    Continue(Branch),
    Split(Vec<Branch>),
    Slice(BTreeMap<usize, Value>),
    Residual(Residual),
    Dead,
}

/// Solves `gens = 0` by branching on coordinate factors.
pub fn solve_variety(gens: &[Polynomial], ctx: &VarContext, opts: &SolveOptions) -> Variety {
    let mut out = Variety::default();
    let mut work = vec![Branch {
        assign: BTreeMap::new(),
        gens: gens.iter().cloned().map(AlgPoly::from_poly).collect(),
    }];
    let mut slices = Vec::new();
    let mut residuals = Vec::new();
    while let Some(b) = work.pop() {
        match step(b, ctx, opts, &mut out.assumptions) {
            Step::Continue(b) => work.push(b),
            Step::Split(children) => work.extend(children.into_iter().rev()),
            Step::Slice(a) => slices.push(Slice::new(ctx.nvars(), a)),
            Step::Residual(r) => residuals.push(r),
            Step::Dead => {}
        }
    }
    out.slices = remove_redundant(slices);
    residuals.retain(|r| {
        let as_slice = Slice::new(ctx.nvars(), r.assignments.clone());
        !out.slices.iter().any(|s| as_slice.is_within(s))
    });
    residuals.sort_by(|a, b| a.assignments.cmp(&b.assignments));
    residuals.dedup();
    out.residuals = residuals;
    out.assumptions.sort();
    out.assumptions.dedup();
    out
}

fn remove_redundant(mut slices: Vec<Slice>) -> Vec<Slice> {
    slices.sort();
    slices.dedup();
    let keep: Vec<bool> = slices
        .iter()
        .enumerate()
        .map(|(i, a)| !slices.iter().enumerate().any(|(j, b)| i != j && a.is_within(b)))
        .collect();
    slices
        .into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

fn assign_child(b: &Branch, slot: usize, v: Value, replace: Option<(usize, AlgPoly)>) -> Result<Branch, AlgebraError> {
    let mut assign = b.assign.clone();
    assign.insert(slot, v.clone());
    let single: BTreeMap<usize, Value> = [(slot, v)].into_iter().collect();
    let mut gens = Vec::with_capacity(b.gens.len());
    for (i, g) in b.gens.iter().enumerate() {
        let g = match &replace {
            Some((j, r)) if *j == i => r,
            _ => g,
        };
        gens.push(substitute_alg(g, &single)?);
    }
    Ok(Branch { assign, gens })
}

fn step(mut b: Branch, ctx: &VarContext, opts: &SolveOptions, assumptions: &mut Vec<Polynomial>) -> Step {
    let nv = ctx.nvars();
    let is_var = |s: usize| s < nv;

    let mut kept = Vec::new();
    for g in b.gens.drain(..) {
        if g.is_zero() {
            continue;
        }
        if g.free_of(is_var) {
            match decide_vanishing(&g, ctx) {
                Vanishing::Zero => continue,
                Vanishing::NonZero => return Step::Dead,
                Vanishing::Undecided => {
                    if let Some(p) = g.as_poly() {
                        assumptions.push(p.monic());
                    }
                    return Step::Dead;
                }
            }
        }
        if !kept.contains(&g) {
            kept.push(g);
        }
    }
    b.gens = kept;
    if b.gens.is_empty() {
        return Step::Slice(b.assign);
    }

    let root = Slice::new(nv, b.assign.clone()).root().cloned();
    for (i, g) in b.gens.iter().enumerate() {
        let children = match g.as_poly() {
            Some(p) => split_children(&b, i, p, ctx, opts, root.as_ref(), assumptions),
            None => split_extension(&b, i, g, nv),
        };
        match children {
            Ok(Some(ch)) => return Step::Split(ch),
            Ok(None) => {}
            Err(_) => return residual(b),
        }
    }

    match linear_elimination(&b, ctx) {
        Linear::Inconsistent(p) => {
            if !param_poly_nonzero(&p, ctx) {
                assumptions.push(p.monic());
            }
            Step::Dead
        }
        Linear::Assign(slot, v) => match assign_child(&b, slot, Value::Sym(v), None) {
            Ok(c) => Step::Continue(c),
            Err(_) => residual(b),
        },
        Linear::Stuck => residual(b),
    }
}

fn residual(b: Branch) -> Step {
    Step::Residual(Residual { assignments: b.assign, system: b.gens })
}

fn split_children(
    b: &Branch,
    i: usize,
    p: &Polynomial,
    ctx: &VarContext,
    opts: &SolveOptions,
    root: Option<&crate::algebra::AlgebraicValue>,
    assumptions: &mut Vec<Polynomial>,
) -> Result<Option<Vec<Branch>>, AlgebraError> {
    let sp = factor_split(p, ctx, &opts.declared_factors);
    if !sp.is_informative() {
        return Ok(None);
    }
    if !param_poly_nonzero(&sp.unit, ctx) {
        assumptions.push(sp.unit.monic());
    }
    let mut children = Vec::new();
    for f in &sp.factors {
        match &f.kind {
            FactorKind::Monomial { slot } => {
                children.push(assign_child(b, *slot, Value::zero(ctx.nslots()), None)?);
            }
            FactorKind::Linear { slot, value } => {
                children.push(assign_child(b, *slot, value.clone(), None)?);
            }
            FactorKind::Roots { slot, roots } => {
                for r in roots {
                    if root.is_some_and(|q| q != r) {
                        let mut gens = b.gens.clone();
                        gens[i] = AlgPoly::from_poly(f.poly.clone());
                        children.push(Branch { assign: b.assign.clone(), gens });
                        break;
                    }
                    children.push(assign_child(b, *slot, Value::Root(r.clone()), None)?);
                }
            }
            FactorKind::Residual => {
                let mut gens = b.gens.clone();
                gens[i] = AlgPoly::from_poly(f.poly.clone());
                children.push(Branch { assign: b.assign.clone(), gens });
            }
        }
    }
    Ok(Some(children))
}

/// Splits off coordinate monomial content of an element with algebraic coefficients.
fn split_extension(b: &Branch, i: usize, g: &AlgPoly, nv: usize) -> Result<Option<Vec<Branch>>, AlgebraError> {
    let n = g.nslots();
    let mut mono = vec![u32::MAX; nv];
    for c in g.coeffs().iter().filter(|c| !c.is_zero()) {
        for (m, _) in c.terms() {
            for (s, e) in mono.iter_mut().enumerate() {
                *e = (*e).min(m.0[s]);
            }
        }
    }
    let slots: Vec<usize> = (0..nv).filter(|&s| mono[s] > 0 && mono[s] != u32::MAX).collect();
    if slots.is_empty() {
        return Ok(None);
    }
    let mut full = vec![0u32; n];
    for &s in &slots {
        full[s] = mono[s];
    }
    let den = Polynomial::monomial(crate::algebra::Monomial(full), GaussianRational::from_int(1));
    let rest = g.map_coeffs(|c| c.divide_exact(&den).expect("monomial content divides"));
    let mut children = Vec::new();
    for &s in &slots {
        children.push(assign_child(b, s, Value::zero(n), None)?);
    }
    if !rest.free_of(|s| s < nv) {
        let mut gens = b.gens.clone();
        gens[i] = rest;
        children.push(Branch { assign: b.assign.clone(), gens });
    }
    Ok(Some(children))
}

enum Linear {
    Inconsistent(Polynomial),
    Assign(usize, Polynomial),
    Stuck,
}

/// Gaussian elimination on a system of affine-linear generators with numeric
/// coordinate coefficients; yields the first coordinate pinned to a value.
fn linear_elimination(b: &Branch, ctx: &VarContext) -> Linear {
    let nv = ctx.nvars();
    let n = ctx.nslots();
    let mut rows: Vec<(Vec<GaussianRational>, Polynomial)> = Vec::new();
    for g in &b.gens {
        let p = match g.as_poly() {
            Some(p) => p,
            None => return Linear::Stuck,
        };
        let mut coeffs = vec![GaussianRational::zero(); nv];
        let mut rhs = Polynomial::zero(n);
        for (m, c) in p.split_by_slots(|s| s < nv) {
            match m.degree() {
                0 => rhs = -&c,
                1 => {
                    let slot = m.0.iter().position(|&e| e == 1).unwrap();
                    match c.constant_value() {
                        Some(v) => coeffs[slot] = v,
                        None => return Linear::Stuck,
                    }
                }
                _ => return Linear::Stuck,
            }
        }
        rows.push((coeffs, rhs));
    }
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..nv {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = rows[pivot_row].0[col].inv().unwrap();
        let (pc, prhs) = rows[pivot_row].clone();
        let pc: Vec<GaussianRational> = pc.iter().map(|x| x * &inv).collect();
        let prhs = prhs.scale(&inv);
        rows[pivot_row] = (pc.clone(), prhs.clone());
        for (k, row) in rows.iter_mut().enumerate() {
            if k == pivot_row || row.0[col].is_zero() {
                continue;
            }
            let f = row.0[col].clone();
            for (x, y) in row.0.iter_mut().zip(&pc) {
                *x = &*x - &(&f * y);
            }
            row.1 = &row.1 - &prhs.scale(&f);
        }
        pivots.push(col);
        pivot_row += 1;
    }
    for row in &rows[pivot_row..] {
        if !row.1.is_zero() {
            return Linear::Inconsistent(row.1.clone());
        }
    }
    for (r, &col) in pivots.iter().enumerate() {
        if rows[r].0.iter().enumerate().all(|(j, x)| j == col || x.is_zero()) {
            return Linear::Assign(col, rows[r].1.clone());
        }
    }
    Linear::Stuck
}

impl Variety {
    pub fn is_empty(&self) -> bool {
        self.slices.is_empty() && self.residuals.is_empty()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.slices.iter().map(Slice::dimension).max()
    }

    /// `E_m`: slices grouped by dimension.
    pub fn components_by_dimension(&self) -> Result<BTreeMap<usize, Vec<Slice>>, VarietyError> {
        if !self.residuals.is_empty() {
            return Err(VarietyError::ResidualPresent);
        }
        let mut out: BTreeMap<usize, Vec<Slice>> = BTreeMap::new();
        for s in &self.slices {
            out.entry(s.dimension()).or_default().push(s.clone());
        }
        Ok(out)
    }

    pub fn membership(&self, p: &[Value], ctx: &VarContext) -> Result<PointMembership, VarietyError> {
        if p.len() != ctx.nvars() {
            return Err(VarietyError::PointArity { got: p.len(), expected: ctx.nvars() });
        }
        let mut m = PointMembership::default();
        for (i, s) in self.slices.iter().enumerate() {
            match s.contains(p, ctx) {
                Some(true) => m.slices.push(i),
                Some(false) => {}
                None => m.undecided_slices.push(i),
            }
        }
        for (i, r) in self.residuals.iter().enumerate() {
            let on_assign = Slice::new(ctx.nvars(), r.assignments.clone()).contains(p, ctx);
            if on_assign == Some(false) {
                continue;
            }
            let mut decided = on_assign.is_some();
            let mut inside = true;
            let full: BTreeMap<usize, Value> = p.iter().cloned().enumerate().collect();
            for g in &r.system {
                match substitute_alg(g, &full) {
                    Ok(v) => match decide_vanishing(&v, ctx) {
                        Vanishing::Zero => {}
                        Vanishing::NonZero => inside = false,
                        Vanishing::Undecided => decided = false,
                    },
                    Err(_) => decided = false,
                }
            }
            if !inside {
                continue;
            }
            if decided {
                m.residuals.push(i);
            } else {
                m.undecided_residuals.push(i);
            }
        }
        Ok(m)
    }

    /// Exact membership; undecided parameter dependence is an error.
    pub fn contains_point(&self, p: &[Value], ctx: &VarContext) -> Result<(bool, Vec<Slice>), VarietyError> {
        let m = self.membership(p, ctx)?;
        let slices = m.slices.iter().map(|&i| self.slices[i].clone()).collect();
        match m.is_member() {
            Some(b) => Ok((b, slices)),
            None => Err(VarietyError::UndecidedParameter),
        }
    }

    /// Largest dimension of a slice through `p`.
    pub fn local_dimension(&self, p: &[Value], ctx: &VarContext) -> Result<Option<usize>, VarietyError> {
        let m = self.membership(p, ctx)?;
        if !m.residuals.is_empty() || !m.undecided_residuals.is_empty() {
            return Err(VarietyError::ResidualPresent);
        }
        if !m.undecided_slices.is_empty() {
            return Err(VarietyError::UndecidedParameter);
        }
        Ok(m.slices.iter().map(|&i| self.slices[i].dimension()).max())
    }

    /// Whitney C4 tangent cone at a point of a union of coordinate slices.
    pub fn c4_cone(&self, p: &[Value], ctx: &VarContext) -> Result<ConeAtPoint, VarietyError> {
        let m = self.membership(p, ctx)?;
        if !m.residuals.is_empty() || !m.undecided_residuals.is_empty() {
            return Err(VarietyError::ResidualPresent);
        }
        if !m.undecided_slices.is_empty() {
            return Err(VarietyError::UndecidedParameter);
        }
        if m.slices.is_empty() {
            return Err(VarietyError::PointNotInVariety);
        }
        let mut sets: Vec<BTreeSet<usize>> = m
            .slices
            .iter()
            .map(|&i| self.slices[i].free_vars().into_iter().collect::<BTreeSet<_>>())
            .filter(|s| !s.is_empty())
            .collect();
        sets.sort();
        sets.dedup();
        let maximal: Vec<BTreeSet<usize>> = sets
            .iter()
            .filter(|a| !sets.iter().any(|b| b != *a && a.is_subset(b)))
            .cloned()
            .collect();
        Ok(ConeAtPoint { base: p.to_vec(), subspaces: maximal })
    }

    /// Intersection with a coordinate slice.
    pub fn intersect_slice(&self, s: &Slice, ctx: &VarContext) -> Result<Variety, VarietyError> {
        let mut slices = Vec::new();
        for t in &self.slices {
            if let Some(u) = t.intersect(s, ctx)? {
                slices.push(u);
            }
        }
        let mut residuals = Vec::new();
        for r in &self.residuals {
            let rs = Slice::new(ctx.nvars(), r.assignments.clone());
            if let Some(u) = rs.intersect(s, ctx)? {
                let extra: BTreeMap<usize, Value> = s
                    .assignments
                    .iter()
                    .filter(|(k, _)| !r.assignments.contains_key(k))
                    .map(|(k, v)| (*k, v.clone()))
                    .collect();
                let system = r
                    .system
                    .iter()
                    .map(|g| substitute_alg(g, &extra))
                    .collect::<Result<Vec<_>, _>>()?;
                residuals.push(Residual { assignments: u.assignments, system });
            }
        }
        Ok(Variety {
            slices: remove_redundant(slices),
            residuals,
            assumptions: self.assumptions.clone(),
        })
    }

    /// Drops slices that miss the open polydisc of the given radius.
    pub fn restrict_to_polydisc(&self, radius: f64) -> Variety {
        let inside = |v: &Value| v.approx().is_none_or(|z| z.norm() < radius);
        let mut out = self.clone();
        out.slices.retain(|s| s.assignments.values().all(inside));
        out.residuals.retain(|r| r.assignments.values().all(inside));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(vars: &[&str], params: &[&str]) -> VarContext {
        VarContext::new(
            vars.iter().map(|s| s.to_string()).collect(),
            params.iter().map(|s| s.to_string()).collect(),
            vec![],
        )
        .unwrap()
    }

    fn frozen(v: &Variety) -> Vec<Vec<usize>> {
        v.slices.iter().map(|s| s.frozen_vars()).collect()
    }

    #[test]
    fn coordinate_unions() {
        let c = ctx(&["x", "y", "z", "w"], &[]);
        let n = c.nslots();
        let v = |i| Polynomial::var(n, i);
        let gens = [v(0), &v(1) * &v(2), &v(1) * &v(3), &v(0) * &v(3)];
        let e = solve_variety(&gens, &c, &SolveOptions::default());
        assert!(e.residuals.is_empty());
        assert_eq!(frozen(&e), vec![vec![0, 1], vec![0, 2, 3]]);
        let by_dim = e.components_by_dimension().unwrap();
        assert_eq!(by_dim[&1][0].frozen_vars(), vec![0, 2, 3]);
        assert_eq!(by_dim[&2][0].frozen_vars(), vec![0, 1]);
    }

    #[test]
    fn cusp_and_axes() {
        let c = ctx(&["x", "y", "z"], &[]);
        let n = c.nslots();
        let (x, y, z) = (Polynomial::var(n, 0), Polynomial::var(n, 1), Polynomial::var(n, 2));
        let cusp = &y.pow(2) - &x.pow(3);
        let e = solve_variety(&[cusp.clone(), cusp, x.clone()], &c, &SolveOptions::default());
        assert_eq!(frozen(&e), vec![vec![0, 1]]);

        let gens = [&x * &(&y + &z), &y * &(&x + &z), &z * &(&x + &y)];
        let e = solve_variety(&gens, &c, &SolveOptions::default());
        assert!(e.residuals.is_empty(), "{:?}", e.residuals);
        assert_eq!(frozen(&e), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        let zero = Value::zero(n);
        let cone = e.c4_cone(&[zero.clone(), zero.clone(), zero.clone()], &c).unwrap();
        assert_eq!(cone.subspaces.len(), 3);
        let p = [Value::number(n, GaussianRational::from_int(2)), zero.clone(), zero];
        let cone = e.c4_cone(&p, &c).unwrap();
        assert_eq!(cone.subspaces, vec![[0].into_iter().collect()]);
    }

    #[test]
    fn parametric_membership() {
        let c = VarContext::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec!["c".into()],
            vec![("c".into(), GaussianRational::zero())],
        )
        .unwrap();
        let n = c.nslots();
        let (x, y, z) = (Polynomial::var(n, 0), Polynomial::var(n, 1), Polynomial::var(n, 2));
        let e = solve_variety(&[x.clone(), &z * &y], &c, &SolveOptions::default());
        let cp = Polynomial::var(n, c.slot("c").unwrap());
        let p = [Value::zero(n), Value::Sym(cp.clone()), Value::zero(n)];
        let (inside, slices) = e.contains_point(&p, &c).unwrap();
        assert!(inside);
        assert_eq!(slices.len(), 1);
        assert_eq!(slices[0].frozen_vars(), vec![0, 2]);
        let q = [Value::number(n, GaussianRational::from_int(1)), Value::zero(n), Value::zero(n)];
        assert!(!e.contains_point(&q, &c).unwrap().0);

        let free = ctx(&["x", "y", "z"], &["c"]);
        let e = solve_variety(&[x, &z * &y], &free, &SolveOptions::default());
        let m = e.membership(&p, &free).unwrap();
        assert_eq!(m.slices.len(), 1);
        assert_eq!(m.undecided_slices.len(), 1);
    }

    #[test]
    fn declared_roots_and_residuals() {
        let c = ctx(&["x", "y", "z"], &[]);
        let n = c.nslots();
        let (x, y, z) = (Polynomial::var(n, 0), Polynomial::var(n, 1), Polynomial::var(n, 2));
        let half = Polynomial::constant(n, GaussianRational::from_ratio(1, 2));
        let q = &y.pow(2) - &half;
        let gens = [&(&y * &q) + &(&z * &y), &z * &x, z.pow(2)];
        let opts = SolveOptions { declared_factors: vec![q] };
        let e = solve_variety(&gens, &c, &opts);
        assert!(e.residuals.is_empty());
        assert_eq!(e.slices.len(), 3);
        assert!(e.slices.iter().any(|s| s.root().is_some()));

        let cusp = &y.pow(2) - &x.pow(3);
        let e = solve_variety(&[&cusp * &z], &c, &SolveOptions::default());
        assert_eq!(e.slices.len(), 1);
        assert_eq!(e.residuals.len(), 1);
        assert!(e.components_by_dimension().is_err());
    }

    #[test]
    fn linear_system() {
        let c = ctx(&["x", "y"], &[]);
        let n = c.nslots();
        let (x, y) = (Polynomial::var(n, 0), Polynomial::var(n, 1));
        let one = Polynomial::one(n);
        let e = solve_variety(&[&(&x + &y) - &one, &x - &y], &c, &SolveOptions::default());
        assert_eq!(e.slices.len(), 1);
        let half = Value::number(n, GaussianRational::from_ratio(1, 2));
        assert_eq!(e.slices[0].assignments.values().cloned().collect::<Vec<_>>(), vec![half.clone(), half]);
        let e = solve_variety(&[&x + &y, &(&x + &y) - &one], &c, &SolveOptions::default());
        assert!(e.is_empty());
    }
}
