use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{AlgebraError, GaussianRational, VarContext};

/// Exponent vector ordered graded-lexicographically (slot 0 is the most significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nslots: usize) -> Self {
        Monomial(vec![0; nslots])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over Q(i) in a fixed number of slots.
///
/// Terms are kept in a map keyed by grlex monomials with no zero coefficients,
/// so equal polynomials have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    nslots: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Polynomial {
    pub fn zero(nslots: usize) -> Self {
        Polynomial { nslots, terms: BTreeMap::new() }
    }

    pub fn constant(nslots: usize, c: GaussianRational) -> Self {
        let mut p = Polynomial::zero(nslots);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nslots), c);
        }
        p
    }

    pub fn one(nslots: usize) -> Self {
        Polynomial::constant(nslots, GaussianRational::one())
    }

    pub fn int(nslots: usize, n: i64) -> Self {
        Polynomial::constant(nslots, GaussianRational::from_int(n))
    }

    pub fn var(nslots: usize, slot: usize) -> Self {
        assert!(slot < nslots);
        let mut e = vec![0; nslots];
        e[slot] = 1;
        Polynomial::monomial(Monomial(e), GaussianRational::one())
    }

    pub fn monomial(m: Monomial, c: GaussianRational) -> Self {
        let mut p = Polynomial::zero(m.0.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nslots: usize, terms: impl IntoIterator<Item = (Monomial, GaussianRational)>) -> Self {
        let mut p = Polynomial::zero(nslots);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nslots);
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nslots(&self) -> usize {
        self.nslots
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, slot: usize) -> u32 {
        self.terms.keys().map(|m| m.0[slot]).max().unwrap_or(0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        self.terms.keys().any(|m| m.0[slot] > 0)
    }

    pub fn used_slots(&self) -> Vec<usize> {
        (0..self.nslots).filter(|&s| self.uses_slot(s)).collect()
    }

    /// True if no slot in `slots` appears.
    pub fn free_of(&self, slots: impl Fn(usize) -> bool) -> bool {
        self.terms
            .keys()
            .all(|m| m.0.iter().enumerate().all(|(s, &e)| e == 0 || !slots(s)))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> GaussianRational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(GaussianRational::zero)
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nslots);
        }
        Polynomial {
            nslots: self.nslots,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Scales so the grlex-leading coefficient is 1; zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero")),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussianRational) -> Polynomial {
        Polynomial {
            nslots: self.nslots,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nslots);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial_derivative(&self, slot: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nslots);
        for (m, c) in &self.terms {
            let e = m.0[slot];
            if e == 0 {
                continue;
            }
            let mut d = m.clone();
            d.0[slot] -= 1;
            out.add_term(d, c * &GaussianRational::from_int(e as i64));
        }
        out
    }

    /// Antiderivative in `slot` vanishing where `slot` is zero.
    pub fn integrate(&self, slot: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nslots);
        for (m, c) in &self.terms {
            let mut d = m.clone();
            d.0[slot] += 1;
            let k = GaussianRational::from_int(d.0[slot] as i64);
            out.add_term(d, c / &k);
        }
        out
    }

    /// Replaces the bound slots by the given polynomials (same slot layout).
    pub fn substitute(&self, bindings: &BTreeMap<usize, Polynomial>) -> Polynomial {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut cache: BTreeMap<(usize, u32), Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero(self.nslots);
        for (m, c) in &self.terms {
            let mut kept = m.clone();
            let mut factor = Polynomial::constant(self.nslots, c.clone());
            for (&slot, val) in bindings {
                let e = m.0[slot];
                if e == 0 {
                    continue;
                }
                kept.0[slot] = 0;
                let pw = cache.entry((slot, e)).or_insert_with(|| val.pow(e));
                factor = &factor * pw;
            }
            let term = factor.mul_monomial(&kept, &GaussianRational::one());
            out = &out + &term;
        }
        out
    }

    /// Re-expresses the polynomial in a new slot layout; `None` if a used slot has no image.
    pub fn remap(&self, new_nslots: usize, map: impl Fn(usize) -> Option<usize>) -> Option<Polynomial> {
        let mut out = Polynomial::zero(new_nslots);
        for (m, c) in &self.terms {
            let mut e = vec![0; new_nslots];
            for (s, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                e[map(s)?] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Some(out)
    }

    /// Appends `extra` unused slots at the end.
    pub fn extend_slots(&self, extra: usize) -> Polynomial {
        self.remap(self.nslots + extra, Some).expect("identity remap")
    }

    /// Drops the trailing slots, which must be unused.
    pub fn truncate_slots(&self, new_nslots: usize) -> Option<Polynomial> {
        self.remap(new_nslots, |s| (s < new_nslots).then_some(s))
    }

    /// Coefficients with respect to `slot`: `self = sum_k coeffs[k] * slot^k`.
    pub fn coefficients_in(&self, slot: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(slot) as usize;
        let mut out = vec![Polynomial::zero(self.nslots); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[slot] as usize;
            let mut r = m.clone();
            r.0[slot] = 0;
            out[k].add_term(r, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(slot: usize, coeffs: &[Polynomial], nslots: usize) -> Polynomial {
        let mut out = Polynomial::zero(nslots);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; nslots];
            e[slot] = k as u32;
            out = &out + &c.mul_monomial(&Monomial(e), &GaussianRational::one());
        }
        out
    }

    /// Groups terms by their exponents on the selected slots; the map values
    /// only involve the other slots.
    pub fn split_by_slots(&self, selected: impl Fn(usize) -> bool) -> BTreeMap<Monomial, Polynomial> {
        let mut out: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut key = vec![0; self.nslots];
            let mut rest = m.clone();
            for s in 0..self.nslots {
                if selected(s) {
                    key[s] = m.0[s];
                    rest.0[s] = 0;
                }
            }
            out.entry(Monomial(key))
                .or_insert_with(|| Polynomial::zero(self.nslots))
                .add_term(rest, c.clone());
        }
        out
    }

    /// Exact quotient `self / den` under grlex division.
    /// Stops at the first leading term the divisor cannot cancel; the reported
    /// remainder is then only the part computed so far.
    pub fn divide_exact(&self, den: &Polynomial) -> Result<Polynomial, AlgebraError> {
        assert_eq!(self.nslots, den.nslots, "slot layout mismatch");
        let (lm, lc) = match den.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(AlgebraError::DivisionByZero),
        };
        if (0..self.nslots).any(|s| den.degree_in(s) > self.degree_in(s)) && !self.is_zero() {
            return Err(AlgebraError::NotDivisible { remainder: self.clone() });
        }
        let lc_inv = lc.inv().expect("nonzero");
        let mut p = self.clone();
        let mut q = Polynomial::zero(self.nslots);
        while let Some((m, c)) = p.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&m) {
                return Err(AlgebraError::NotDivisible { remainder: p });
            }
            let qm = lm.quotient_of(&m);
            let qc = &c * &lc_inv;
            p = &p - &den.mul_monomial(&qm, &qc);
            q.add_term(qm, qc);
        }
        Ok(q)
    }

    /// Multivariate division by a single divisor: `self = q * den + r`, no term of
    /// `r` divisible by the leading monomial of `den`.
    pub fn div_rem(&self, den: &Polynomial) -> Result<(Polynomial, Polynomial), AlgebraError> {
        assert_eq!(self.nslots, den.nslots, "slot layout mismatch");
        let (lm, lc) = match den.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(AlgebraError::DivisionByZero),
        };
        let lc_inv = lc.inv().expect("nonzero");
        let mut p = self.clone();
        let mut q = Polynomial::zero(self.nslots);
        let mut r = Polynomial::zero(self.nslots);
        while let Some((m, c)) = p.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if lm.divides(&m) {
                let qm = lm.quotient_of(&m);
                let qc = &c * &lc_inv;
                p = &p - &den.mul_monomial(&qm, &qc);
                q.add_term(qm, qc);
            } else {
                p.terms.remove(&m);
                r.add_term(m, c);
            }
        }
        Ok((q, r))
    }

    /// Evaluates all slots numerically.
    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.nslots);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (s, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= x[s].powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Renders with slot names from `ctx`, highest grlex term first.
    pub fn display<'a>(&'a self, ctx: &'a VarContext) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names: Names::Ctx(ctx) }
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names: Names::List(names) }
    }
}

enum Names<'a> {
    Ctx(&'a VarContext),
    List(&'a [String]),
}

impl Names<'_> {
    fn get(&self, slot: usize) -> String {
        match self {
            Names::Ctx(c) => c.slot_name(slot).to_string(),
            Names::List(l) => l.get(slot).cloned().unwrap_or_else(|| format!("_s{slot}")),
        }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: Names<'a>,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            for (s, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names.get(s)),
                    _ => factors.push(format!("{}^{}", self.names.get(s), e)),
                }
            }
            // sign handling keeps the output re-parseable
            let (neg, mag) = if c.is_compound() {
                (false, c.clone())
            } else if c.re < num_rational::BigRational::zero()
                || (c.re.is_zero() && c.im < num_rational::BigRational::zero())
            {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let coeff_str = if mag.is_compound() {
                format!("({mag})")
            } else {
                mag.to_string()
            };
            if factors.is_empty() {
                write!(f, "{coeff_str}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff_str, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nslots, o.nslots, "slot layout mismatch");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nslots, o.nslots, "slot layout mismatch");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nslots, o.nslots, "slot layout mismatch");
        let mut out = Polynomial::zero(self.nslots);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-GaussianRational::one())
    }
}

macro_rules! forward_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, o: Polynomial) -> Polynomial {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, o: &Polynomial) -> Polynomial {
                (&self).$m(o)
            }
        }
    };
}
forward_poly!(Add, add);
forward_poly!(Sub, sub);
forward_poly!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> (Polynomial, Polynomial, Polynomial) {
        (Polynomial::var(3, 0), Polynomial::var(3, 1), Polynomial::var(3, 2))
    }

    #[test]
    fn derivative_examples() {
        let (x, y, _) = vars();
        let f = &y.pow(2) - &x.pow(3);
        assert_eq!(f.partial_derivative(0), x.pow(2).scale(&GaussianRational::from_int(-3)));
        assert_eq!(f.partial_derivative(1), y.scale(&GaussianRational::from_int(2)));
        assert!(Polynomial::int(3, 5).partial_derivative(0).is_zero());
    }

    #[test]
    fn substitute_examples() {
        let (x, y, z) = vars();
        let yz = &y * &z;
        let mut b = BTreeMap::new();
        b.insert(0, Polynomial::zero(3));
        assert_eq!(yz.substitute(&b), yz);
        let f = &y.pow(2) - &x.pow(3);
        assert_eq!(f.substitute(&b), y.pow(2));
    }

    #[test]
    fn divide_examples() {
        let (x, y, z) = vars();
        let f = &y.pow(2) - &x.pow(3);
        let h = &y.scale(&GaussianRational::from_int(2)) - &x.pow(2).scale(&GaussianRational::from_int(3));
        assert_eq!((&h * &f).divide_exact(&f).unwrap(), h);
        assert_eq!((&y * &z).divide_exact(&y).unwrap(), z);
        match x.divide_exact(&y) {
            Err(AlgebraError::NotDivisible { remainder }) => assert_eq!(remainder, x),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(x.divide_exact(&Polynomial::zero(3)), Err(AlgebraError::DivisionByZero)));
    }

    #[test]
    fn grlex_order() {
        let (x, y, z) = vars();
        let p = &(&x + &y.pow(2)) + &z;
        assert_eq!(p.leading_term().unwrap().0, y.pow(2).leading_term().unwrap().0);
        let q = &x + &y;
        assert_eq!(q.leading_term().unwrap().0, x.leading_term().unwrap().0);
    }

    #[test]
    fn display_roundtrip_shape() {
        let (x, y, _) = vars();
        let p = &(&y.pow(2) - &x.pow(3)) + &Polynomial::constant(3, GaussianRational::from_ratio(-1, 2));
        let names = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        assert_eq!(p.display_with(&names).to_string(), "-x^3 + y^2 - 1/2");
    }
}
