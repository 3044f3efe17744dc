use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{AlgPoly, AlgebraError, AlgebraicValue, GaussianRational, Polynomial, VarContext};

/// A coordinate value: a polynomial in the parameters (numbers included) or a
/// tagged algebraic root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Sym(Polynomial),
    Root(AlgebraicValue),
}

/// One value per coordinate.
pub type Point = Vec<Value>;

/// Result of evaluating a polynomial at a point: a number, a polynomial in the
/// parameters, or an element of a simple algebraic extension.
pub type ExtendedValue = AlgPoly;

impl Value {
    pub fn number(nslots: usize, c: GaussianRational) -> Value {
        Value::Sym(Polynomial::constant(nslots, c))
    }

    pub fn zero(nslots: usize) -> Value {
        Value::Sym(Polynomial::zero(nslots))
    }

    pub fn as_number(&self) -> Option<GaussianRational> {
        match self {
            Value::Sym(p) => p.constant_value(),
            Value::Root(r) => r.as_rational(),
        }
    }

    pub fn to_alg(&self, nslots: usize) -> AlgPoly {
        match self {
            Value::Sym(p) => AlgPoly::from_poly(p.clone()),
            Value::Root(r) => AlgPoly::alpha(r, nslots),
        }
    }

    pub fn root(&self) -> Option<&AlgebraicValue> {
        match self {
            Value::Root(r) => Some(r),
            Value::Sym(_) => None,
        }
    }

    /// Numerical value if no parameter is involved.
    pub fn approx(&self) -> Option<Complex64> {
        match self {
            Value::Sym(p) => p.constant_value().map(|c| c.to_complex()),
            Value::Root(r) => Some(r.approx()),
        }
    }

    pub fn uses_params(&self) -> bool {
        matches!(self, Value::Sym(p) if !p.is_constant())
    }

    pub fn render(&self, ctx: &VarContext) -> String {
        match self {
            Value::Sym(p) => p.display(ctx).to_string(),
            Value::Root(r) => r.render(),
        }
    }
}

pub fn render_point(pt: &[Value], ctx: &VarContext) -> String {
    let parts: Vec<String> = pt.iter().map(|v| v.render(ctx)).collect();
    format!("({})", parts.join(", "))
}

/// Substitutes coordinate values; unassigned slots stay symbolic.
pub fn substitute_values(
    p: &Polynomial,
    assign: &BTreeMap<usize, Value>,
) -> Result<AlgPoly, AlgebraError> {
    let nslots = p.nslots();
    let mut root: Option<&AlgebraicValue> = None;
    let mut sym = BTreeMap::new();
    let mut root_slots = Vec::new();
    for (&slot, v) in assign {
        match v {
            Value::Sym(q) => {
                sym.insert(slot, q.clone());
            }
            Value::Root(r) => {
                match root {
                    Some(prev) if prev != r => return Err(AlgebraError::MixedAlgebraics),
                    _ => root = Some(r),
                }
                root_slots.push(slot);
            }
        }
    }
    let p = p.substitute(&sym);
    let root = match root {
        None => return Ok(AlgPoly::from_poly(p)),
        Some(r) => r.clone(),
    };
    let is_root_slot = |s: usize| root_slots.contains(&s);
    let grouped = p.split_by_slots(is_root_slot);
    let maxk = grouped.keys().map(|m| m.degree() as usize).max().unwrap_or(0);
    let mut coeffs = vec![Polynomial::zero(nslots); maxk + 1];
    for (m, c) in grouped {
        let k = m.degree() as usize;
        coeffs[k] = &coeffs[k] + &c;
    }
    Ok(AlgPoly::new(Some(root), coeffs))
}

/// Substitutes coordinate values into an extension element.
pub fn substitute_alg(
    g: &AlgPoly,
    assign: &BTreeMap<usize, Value>,
) -> Result<AlgPoly, AlgebraError> {
    let n = g.nslots();
    let alpha = g.root().map(|r| AlgPoly::alpha(r, n));
    let mut acc = AlgPoly::from_poly(Polynomial::zero(n));
    let mut power = AlgPoly::from_poly(Polynomial::one(n));
    for (k, c) in g.coeffs().iter().enumerate() {
        if k > 0 {
            power = power.mul(alpha.as_ref().expect("root present"))?;
        }
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&substitute_values(c, assign)?.mul(&power)?)?;
    }
    Ok(acc)
}

/// Substitutes extension elements for slots; other slots stay symbolic.
/// All substituted elements must share one root.
pub fn compose_alg(p: &Polynomial, map: &BTreeMap<usize, AlgPoly>) -> Result<AlgPoly, AlgebraError> {
    let n = p.nslots();
    let mut powers: BTreeMap<(usize, u32), AlgPoly> = BTreeMap::new();
    let mut acc = AlgPoly::from_poly(Polynomial::zero(n));
    for (m, c) in p.terms() {
        let mut kept = m.0.clone();
        let mut term = AlgPoly::from_poly(Polynomial::one(n));
        for (&slot, q) in map {
            let e = m.0[slot];
            if e == 0 {
                continue;
            }
            kept[slot] = 0;
            let pw = match powers.get(&(slot, e)) {
                Some(x) => x.clone(),
                None => {
                    let mut x = AlgPoly::from_poly(Polynomial::one(n));
                    for _ in 0..e {
                        x = x.mul(q)?;
                    }
                    powers.insert((slot, e), x.clone());
                    x
                }
            };
            term = term.mul(&pw)?;
        }
        let mono = AlgPoly::from_poly(Polynomial::monomial(super::Monomial(kept), c.clone()));
        acc = acc.add(&term.mul(&mono)?)?;
    }
    Ok(acc)
}

/// Exact equality of two values; `None` when it depends on declared parameters.
pub fn values_equal(a: &Value, b: &Value, ctx: &VarContext) -> Option<bool> {
    use super::{decide_vanishing, Vanishing};
    if a == b {
        return Some(true);
    }
    if let (Value::Root(r), Value::Root(s)) = (a, b) {
        if !r.is_root_of(s.minimal_poly()) {
            return Some(false);
        }
        let near = |x: &AlgebraicValue| x.approx();
        return Some((near(r) - near(s)).norm() < 1e-9);
    }
    let n = ctx.nslots();
    let d = a.to_alg(n).sub(&b.to_alg(n)).ok()?;
    match decide_vanishing(&d, ctx) {
        Vanishing::Zero => Some(true),
        Vanishing::NonZero => Some(false),
        Vanishing::Undecided => None,
    }
}

/// Exact value of `p` at a point assigning every coordinate.
pub fn poly_eval(p: &Polynomial, pt: &[Value]) -> Result<ExtendedValue, AlgebraError> {
    let assign: BTreeMap<usize, Value> = pt.iter().cloned().enumerate().collect();
    substitute_values(p, &assign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> VarContext {
        VarContext::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec!["c".into()],
            vec![("c".into(), GaussianRational::from_int(0))],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let c = ctx();
        let n = c.nslots();
        let (x, y, z) = (Polynomial::var(n, 0), Polynomial::var(n, 1), Polynomial::var(n, 2));
        let p = &x * &(&y + &z);
        let pt = vec![
            Value::number(n, GaussianRational::from_int(1)),
            Value::number(n, GaussianRational::from_int(-1)),
            Value::number(n, GaussianRational::from_int(-1)),
        ];
        assert_eq!(poly_eval(&p, &pt).unwrap().as_poly().unwrap(), &Polynomial::int(n, -2));

        let cp = Polynomial::var(n, c.slot("c").unwrap());
        let pt = vec![Value::zero(n), Value::Sym(cp), Value::zero(n)];
        assert!(poly_eval(&(&y * &z), &pt).unwrap().is_zero());

        // y^2 - x^3 at x = 0, y = root of t^2 (not squarefree) is rejected; use t^2 - 2 instead
        let r = AlgebraicValue::new(
            vec![GaussianRational::from_int(-2), GaussianRational::from_int(0), GaussianRational::from_int(1)],
            0,
        )
        .unwrap();
        let f = &(&y.pow(2) - &x.pow(3)) - &Polynomial::int(n, 2);
        let pt = vec![Value::zero(n), Value::Root(r.clone()), Value::zero(n)];
        assert!(poly_eval(&f, &pt).unwrap().is_zero());

        let other = AlgebraicValue::new(
            vec![GaussianRational::from_int(-3), GaussianRational::from_int(0), GaussianRational::from_int(1)],
            1,
        )
        .unwrap();
        let pt = vec![Value::Root(other), Value::Root(r), Value::zero(n)];
        assert!(matches!(poly_eval(&f, &pt), Err(AlgebraError::MixedAlgebraics)));
    }

    #[test]
    fn zero_root_of_linear_minimal_poly() {
        // the degenerate root of t (degree one) evaluates y^2 - x^3 to zero
        let c = ctx();
        let n = c.nslots();
        let (x, y) = (Polynomial::var(n, 0), Polynomial::var(n, 1));
        let r = AlgebraicValue::new(vec![GaussianRational::from_int(0), GaussianRational::from_int(1)], 0).unwrap();
        let pt = vec![Value::zero(n), Value::Root(r), Value::zero(n)];
        assert!(poly_eval(&(&y.pow(2) - &x.pow(3)), &pt).unwrap().is_zero());
    }
}
