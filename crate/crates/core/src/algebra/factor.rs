use num_traits::{One, Zero};

use super::{multivariate_gcd, AlgPoly, AlgebraicValue, Monomial, Polynomial, Value, VarContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorKind {
    /// A bare split slot.
    Monomial { slot: usize },
    /// `slot - value`, value free of split slots.
    Linear { slot: usize, value: Value },
    /// Declared univariate factor over Q(i); one linear factor per root.
    Roots { slot: usize, roots: Vec<AlgebraicValue> },
    Residual,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub poly: Polynomial,
    pub multiplicity: u32,
    pub kind: FactorKind,
}

/// `p = unit * prod(factor^multiplicity)`; `unit` is free of the split slots.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub unit: Polynomial,
    pub factors: Vec<Factor>,
}

impl Splitting {
    pub fn product(&self) -> Polynomial {
        self.factors
            .iter()
            .fold(self.unit.clone(), |acc, f| &acc * &f.poly.pow(f.multiplicity))
    }

    /// True if the split does more than return a single residual factor.
    pub fn is_informative(&self) -> bool {
        match self.factors.as_slice() {
            [] => false,
            [f] => f.kind != FactorKind::Residual,
            _ => true,
        }
    }
}

/// Splits over the coordinate slots of `ctx`.
pub fn factor_split(p: &Polynomial, ctx: &VarContext, declared: &[Polynomial]) -> Splitting {
    let nv = ctx.nvars();
    factor_split_over(p, &|s| s < nv, declared)
}

/// Splits `p` (nonzero) into monomial factors, linear-univariate factors and a
/// residual, with respect to the slots selected by `split`.
pub fn factor_split_over(
    p: &Polynomial,
    split: &dyn Fn(usize) -> bool,
    declared: &[Polynomial],
) -> Splitting {
    assert!(!p.is_zero(), "factor_split of zero");
    let n = p.nslots();
    let mut factors: Vec<Factor> = Vec::new();

    let mut mono = vec![u32::MAX; n];
    for (m, _) in p.terms() {
        for (s, &e) in m.0.iter().enumerate() {
            mono[s] = mono[s].min(e);
        }
    }
    for (s, e) in mono.iter_mut().enumerate() {
        if !split(s) {
            *e = 0;
        }
    }
    for (s, &e) in mono.iter().enumerate() {
        if e > 0 {
            factors.push(Factor {
                poly: Polynomial::var(n, s),
                multiplicity: e,
                kind: FactorKind::Monomial { slot: s },
            });
        }
    }
    let mut q = p
        .divide_exact(&Polynomial::monomial(Monomial(mono), One::one()))
        .expect("monomial content divides");

    // content free of split slots
    let groups: Vec<Polynomial> = q.split_by_slots(split).into_values().collect();
    let mut unit = multivariate_gcd(&groups).expect("nonzero");
    q = q.divide_exact(&unit).expect("content divides");
    let lc = q.leading_coeff();
    q = q.monic();
    unit = unit.scale(&lc);

    if q.free_of(split) {
        unit = &unit * &q;
        return Splitting { unit, factors };
    }

    let mut pieces: Vec<(Polynomial, bool)> = Vec::new();
    for d in declared {
        if d.is_zero() || d.nslots() != n || d.free_of(split) {
            continue;
        }
        let d = d.monic();
        while let Ok(quot) = q.divide_exact(&d) {
            pieces.push((d.clone(), true));
            q = quot;
            if q.free_of(split) {
                break;
            }
        }
        if q.free_of(split) {
            break;
        }
    }
    if q.free_of(split) {
        unit = &unit * &q;
    } else {
        let lc = q.leading_coeff();
        unit = unit.scale(&lc);
        pieces.push((q.monic(), false));
    }

    for (f, was_declared) in pieces {
        if let Some(existing) = factors.iter_mut().find(|g| g.poly == f) {
            existing.multiplicity += 1;
            continue;
        }
        let kind = classify_piece(&f, split, was_declared);
        factors.push(Factor { poly: f, multiplicity: 1, kind });
    }
    Splitting { unit, factors }
}

fn classify_piece(f: &Polynomial, split: &dyn Fn(usize) -> bool, declared: bool) -> FactorKind {
    let used: Vec<usize> = f.used_slots().into_iter().filter(|&s| split(s)).collect();
    if used.len() != 1 {
        return FactorKind::Residual;
    }
    let s = used[0];
    let coeffs = f.coefficients_in(s);
    if coeffs.iter().any(|c| !c.free_of(split)) {
        return FactorKind::Residual;
    }
    if coeffs.len() == 2 {
        if let Some(a) = coeffs[1].constant_value() {
            let value = coeffs[0].scale(&-a.inv().expect("nonzero"));
            return FactorKind::Linear { slot: s, value: Value::Sym(value) };
        }
        return FactorKind::Residual;
    }
    if declared {
        if let Some(dense) = AlgebraicValue::dense_from(f, s) {
            if let Ok(roots) = AlgebraicValue::all_roots(dense) {
                return FactorKind::Roots { slot: s, roots };
            }
        }
    }
    FactorKind::Residual
}

/// Whether an exact quantity vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vanishing {
    Zero,
    NonZero,
    /// Depends on a declared parameter that the side conditions do not pin down.
    Undecided,
}

/// Decides whether `v` vanishes. Coordinates are treated as indeterminates,
/// generic parameters as generic values, declared parameters through their
/// side conditions only.
pub fn decide_vanishing(v: &AlgPoly, ctx: &VarContext) -> Vanishing {
    if v.is_zero() {
        return Vanishing::Zero;
    }
    let nv = ctx.nvars();
    if !v.free_of(|s| s < nv) {
        return Vanishing::NonZero;
    }
    match v.as_poly() {
        Some(p) => {
            if param_poly_nonzero(p, ctx) {
                Vanishing::NonZero
            } else {
                Vanishing::Undecided
            }
        }
        None => {
            let all_const = v.coeffs().iter().all(|c| c.is_constant());
            let generic = v
                .coeffs()
                .iter()
                .any(|c| c.used_slots().iter().any(|&s| ctx.is_generic_slot(s)));
            if all_const || generic {
                Vanishing::NonZero
            } else {
                Vanishing::Undecided
            }
        }
    }
}

/// Certifies a nonzero polynomial in the parameters is nonzero at the
/// parameter values allowed by the context.
pub fn param_poly_nonzero(p: &Polynomial, ctx: &VarContext) -> bool {
    if p.is_zero() {
        return false;
    }
    if p.is_constant() {
        return true;
    }
    let nv = ctx.nvars();
    let split = |s: usize| s >= nv;
    let sp = factor_split_over(p, &split, &[]);
    if !sp.unit.is_constant() || sp.unit.is_zero() {
        return false;
    }
    sp.factors.iter().all(|f| {
        if f.poly.used_slots().iter().any(|&s| ctx.is_generic_slot(s)) {
            return true;
        }
        match &f.kind {
            FactorKind::Monomial { slot } => ctx.excluded_values(*slot).any(|c| c.is_zero()),
            FactorKind::Linear { slot, value } => match value.as_number() {
                Some(v) => ctx.excluded_values(*slot).any(|c| *c == v),
                None => false,
            },
            _ => false,
        }
    })
}

/// Numeric sanity helper for tests and reports.
pub fn is_unit_constant(p: &Polynomial) -> bool {
    p.constant_value().is_some_and(|c| !c.is_zero())
}
