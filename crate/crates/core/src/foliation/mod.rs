//! Polynomial vector fields and the foliations they induce.

mod classify;
mod ledger;

pub use classify::*;
pub use ledger::*;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{
    compose_alg, multivariate_gcd, substitute_alg, AlgPoly, AlgebraError, GaussianRational,
    Polynomial, Value, VarContext,
};
use crate::variety::{solve_variety, SolveOptions, Slice, Variety, VarietyError};

#[derive(Debug, Error)]
pub enum FoliationError {
    #[error("vector field is identically zero")]
    ZeroField,
    #[error("vector field has {got} components, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("singular set has a component of codimension one")]
    InvalidFoliation,
    #[error("slice is not invariant")]
    NotInvariant,
    #[error("restriction has coefficients in an algebraic extension")]
    AlgebraicCoefficients,
    #[error("hypersurface must be nonconstant")]
    ConstantHypersurface,
    #[error("no certified B_j at the point")]
    NoCertifiedB,
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `X = sum P_i d/dx_i`; coefficients live in the slots of a `VarContext`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub coeffs: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(coeffs: Vec<Polynomial>) -> Result<Self, FoliationError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(FoliationError::ZeroField);
        }
        Ok(VectorField { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `X(f) = sum P_i df/dx_i`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Polynomial::zero(f.nslots()), |acc, (i, p)| &acc + &(p * &f.partial_derivative(i)))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_constant())
    }
}

/// Splits off the gcd of the coefficients: `X = g * X_hat`.
pub fn saturate(x: &VectorField) -> (Polynomial, VectorField) {
    let g = multivariate_gcd(&x.coeffs).expect("nonzero field");
    let coeffs = x
        .coeffs
        .iter()
        .map(|c| c.divide_exact(&g).expect("gcd divides"))
        .collect();
    (g, VectorField { coeffs })
}

/// Zero set of the saturated coefficients.
pub fn singular_set(x: &VectorField, ctx: &VarContext, opts: &SolveOptions) -> Result<Variety, FoliationError> {
    let (_, sat) = saturate(x);
    let v = solve_variety(&sat.coeffs, ctx, opts);
    let n = ctx.nvars();
    if v.slices.iter().any(|s| s.dimension() >= n.saturating_sub(1) && n >= 1) {
        return Err(FoliationError::InvalidFoliation);
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    Affine,
    Polydisc(GaussianRational),
}

impl Domain {
    pub fn radius(&self) -> Option<f64> {
        match self {
            Domain::Affine => None,
            Domain::Polydisc(r) => Some(r.to_complex().re),
        }
    }
}

/// `X(f) = h f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceCertificate {
    pub f: Polynomial,
    pub h: Polynomial,
}

impl HypersurfaceCertificate {
    pub fn recheck(&self, x: &VectorField) -> bool {
        !self.f.is_constant() && (&x.apply(&self.f) - &(&self.h * &self.f)).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypersurfaceInvariance {
    Invariant(HypersurfaceCertificate),
    NotInvariant { remainder: Polynomial },
}

pub fn is_invariant_hypersurface(x: &VectorField, f: &Polynomial) -> Result<HypersurfaceInvariance, FoliationError> {
    if f.is_constant() {
        return Err(FoliationError::ConstantHypersurface);
    }
    let xf = x.apply(f);
    match xf.divide_exact(f) {
        Ok(h) => Ok(HypersurfaceInvariance::Invariant(HypersurfaceCertificate { f: f.clone(), h })),
        Err(AlgebraError::NotDivisible { remainder }) => Ok(HypersurfaceInvariance::NotInvariant { remainder }),
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SliceInvariance {
    /// Every frozen coefficient substitutes to zero on the slice.
    Invariant { checked: Vec<usize> },
    NotInvariant { index: usize, value: AlgPoly },
}

pub fn is_invariant_slice(x: &VectorField, s: &Slice) -> Result<SliceInvariance, FoliationError> {
    let mut checked = Vec::new();
    for &k in s.assignments.keys() {
        let v = substitute_alg(&AlgPoly::from_poly(x.coeffs[k].clone()), &s.assignments)?;
        if !v.is_zero() {
            return Ok(SliceInvariance::NotInvariant { index: k, value: v });
        }
        checked.push(k);
    }
    Ok(SliceInvariance::Invariant { checked })
}

/// A vector field on the free coordinates of a slice.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub slice: Slice,
    pub free: Vec<usize>,
    pub ctx: VarContext,
    pub field: Vec<Polynomial>,
}

impl Restriction {
    /// Maps a polynomial in the restricted context back to the ambient one.
    pub fn lift(&self, p: &Polynomial, ambient: &VarContext) -> Polynomial {
        let f = self.free.len();
        let nv = ambient.nvars();
        p.remap(ambient.nslots(), |s| Some(if s < f { self.free[s] } else { s - f + nv }))
            .expect("total map")
    }

    /// Maps an ambient polynomial free of frozen coordinates into the restricted context.
    pub fn lower(&self, p: &Polynomial, ambient: &VarContext) -> Option<Polynomial> {
        let f = self.free.len();
        let nv = ambient.nvars();
        let free = &self.free;
        p.remap(self.ctx.nslots(), |s| {
            if s < nv {
                free.iter().position(|&x| x == s)
            } else {
                Some(s - nv + f)
            }
        })
    }

    /// The point's free coordinates.
    pub fn lower_point(&self, p: &[Value], ambient: &VarContext) -> Option<Vec<Value>> {
        self.free
            .iter()
            .map(|&i| match &p[i] {
                Value::Sym(q) => self.lower(q, ambient).map(Value::Sym),
                Value::Root(r) => Some(Value::Root(r.clone())),
            })
            .collect()
    }
}

pub fn restrict(x: &VectorField, s: &Slice, ctx: &VarContext) -> Result<Restriction, FoliationError> {
    match is_invariant_slice(x, s)? {
        SliceInvariance::Invariant { .. } => {}
        SliceInvariance::NotInvariant { .. } => return Err(FoliationError::NotInvariant),
    }
    let free = s.free_vars();
    let rctx = ctx.restricted(&free);
    let mut r = Restriction { slice: s.clone(), free: free.clone(), ctx: rctx, field: Vec::new() };
    let mut field = Vec::new();
    for &i in &free {
        let v = substitute_alg(&AlgPoly::from_poly(x.coeffs[i].clone()), &s.assignments)?;
        let p = v.as_poly().ok_or(FoliationError::AlgebraicCoefficients)?;
        field.push(r.lower(p, ctx).expect("frozen coordinates substituted"));
    }
    r.field = field;
    Ok(r)
}

/// Everything derived from the input field once.
#[derive(Clone, Debug)]
pub struct FoliationModel {
    pub ctx: VarContext,
    pub field: VectorField,
    pub saturated: VectorField,
    pub common_factor: Polynomial,
    pub singular_set: Variety,
    pub domain: Domain,
    pub solve: SolveOptions,
}

impl FoliationModel {
    pub fn new(ctx: VarContext, field: VectorField, domain: Domain, solve: SolveOptions) -> Result<Self, FoliationError> {
        if field.dim() != ctx.nvars() {
            return Err(FoliationError::Arity { got: field.dim(), expected: ctx.nvars() });
        }
        let (common_factor, saturated) = saturate(&field);
        let mut singular_set = singular_set(&saturated, &ctx, &solve)?;
        if let Some(r) = domain.radius() {
            singular_set = singular_set.restrict_to_polydisc(r);
        }
        Ok(FoliationModel { ctx, field, saturated, common_factor, singular_set, domain, solve })
    }

    pub fn nvars(&self) -> usize {
        self.ctx.nvars()
    }

    /// Pulls the saturated coefficients back along a curve given in the
    /// context extended by one trailing slot.
    pub fn pullback(&self, curve: &[AlgPoly]) -> Result<Vec<AlgPoly>, AlgebraError> {
        let map: BTreeMap<usize, AlgPoly> = curve.iter().cloned().enumerate().collect();
        self.saturated
            .coeffs
            .iter()
            .map(|c| compose_alg(&c.extend_slots(1), &map))
            .collect()
    }

    /// Generic point of a slice: free coordinates become generic parameters.
    pub fn generic_point(&self, s: &Slice) -> Vec<Value> {
        let n = self.ctx.nslots();
        (0..self.nvars())
            .map(|i| match s.assignments.get(&i) {
                Some(v) => v.clone(),
                None => Value::Sym(Polynomial::var(n, self.ctx.generic_slot_for(i).expect("generic slot"))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(vars: &[&str]) -> VarContext {
        VarContext::new(vars.iter().map(|s| s.to_string()).collect(), vec![], vec![]).unwrap()
    }

    #[test]
    fn saturation_examples() {
        let c = ctx(&["x", "y", "z"]);
        let n = c.nslots();
        let (x, y, z) = (Polynomial::var(n, 0), Polynomial::var(n, 1), Polynomial::var(n, 2));
        let zero = Polynomial::zero(n);
        let f = VectorField::new(vec![zero.clone(), &y * &z, zero.clone()]).unwrap();
        let (g, s) = saturate(&f);
        assert_eq!(g, &y * &z);
        assert_eq!(s.coeffs, vec![zero.clone(), Polynomial::one(n), zero.clone()]);

        let f = VectorField::new(vec![x.clone(), &z * &y, zero]).unwrap();
        let e = singular_set(&f, &c, &SolveOptions::default()).unwrap();
        let frozen: Vec<Vec<usize>> = e.slices.iter().map(|s| s.frozen_vars()).collect();
        assert_eq!(frozen, vec![vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn hypersurface_invariance() {
        let c = ctx(&["x", "y", "z"]);
        let n = c.nslots();
        let (x, y) = (Polynomial::var(n, 0), Polynomial::var(n, 1));
        let cusp = &y.pow(2) - &x.pow(3);
        let f = VectorField::new(vec![cusp.clone(), cusp.clone(), x.clone()]).unwrap();
        match is_invariant_hypersurface(&f, &cusp).unwrap() {
            HypersurfaceInvariance::Invariant(cert) => {
                assert_eq!(cert.h, &(&y * &Polynomial::int(n, 2)) - &(&x.pow(2) * &Polynomial::int(n, 3)));
                assert!(cert.recheck(&f));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            is_invariant_hypersurface(&f, &x).unwrap(),
            HypersurfaceInvariance::NotInvariant { .. }
        ));
    }

    #[test]
    fn restriction_to_slices() {
        let c = ctx(&["x", "y", "z", "w"]);
        let n = c.nslots();
        let v = |i| Polynomial::var(n, i);
        let f = VectorField::new(vec![v(0), &v(1) * &v(2), &v(1) * &v(3), &v(0) * &v(3)]).unwrap();
        let s = Slice::new(4, [(0, Value::zero(n)), (3, Value::zero(n))].into_iter().collect());
        let r = restrict(&f, &s, &c).unwrap();
        let rn = r.ctx.nslots();
        assert_eq!(r.field, vec![&Polynomial::var(rn, 0) * &Polynomial::var(rn, 1), Polynomial::zero(rn)]);
        let bad = Slice::new(4, [(1, Value::number(n, GaussianRational::from_int(1)))].into_iter().collect());
        assert!(matches!(restrict(&f, &bad, &c), Err(FoliationError::NotInvariant)));
    }
}
