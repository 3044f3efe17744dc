use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{AlgebraError, GaussianRational, Monomial, Polynomial};

/// Dense univariate polynomial over Q(i), lowest degree first, no trailing zeros.
pub type DenseUni = Vec<GaussianRational>;

fn trim(p: &mut DenseUni) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn uni_rem(a: &DenseUni, b: &DenseUni) -> DenseUni {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lc_inv = b[db].inv().expect("nonzero leading coefficient");
    while r.len() > db {
        let k = r.len() - 1;
        let f = &r[k] * &lc_inv;
        for j in 0..=db {
            let t = &f * &b[j];
            r[k - db + j] = &r[k - db + j] - &t;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn uni_gcd(a: &DenseUni, b: &DenseUni) -> DenseUni {
    let (mut a, mut b) = (a.clone(), b.clone());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// A root of a monic squarefree univariate polynomial, selected by `index`
/// in the order of its numerical approximation (real part, then imaginary part).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicValue {
    minimal_poly: DenseUni,
    index: usize,
}

impl AlgebraicValue {
    /// `coeffs` lowest degree first. The polynomial is made monic.
    pub fn new(coeffs: DenseUni, index: usize) -> Result<Self, AlgebraError> {
        let mut c = coeffs;
        trim(&mut c);
        if c.len() < 2 {
            return Err(AlgebraError::BadMinimalPolynomial("degree must be at least 1".into()));
        }
        let lc_inv = c.last().unwrap().inv().unwrap();
        let c: DenseUni = c.iter().map(|x| x * &lc_inv).collect();
        let deriv: DenseUni = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, x)| x * &GaussianRational::from_int(k as i64))
            .collect();
        if uni_gcd(&c, &deriv).len() > 1 {
            return Err(AlgebraError::BadMinimalPolynomial("not squarefree".into()));
        }
        if index >= c.len() - 1 {
            return Err(AlgebraError::BadMinimalPolynomial(format!(
                "root index {index} out of range for degree {}",
                c.len() - 1
            )));
        }
        Ok(AlgebraicValue { minimal_poly: c, index })
    }

    /// Extracts the dense coefficients of a polynomial that only uses `slot`.
    pub fn dense_from(p: &Polynomial, slot: usize) -> Option<DenseUni> {
        if !p.free_of(|s| s != slot) {
            return None;
        }
        let coeffs = p.coefficients_in(slot);
        Some(coeffs.iter().map(|c| c.constant_value().unwrap()).collect())
    }

    pub fn all_roots(coeffs: DenseUni) -> Result<Vec<AlgebraicValue>, AlgebraError> {
        let deg = {
            let mut c = coeffs.clone();
            trim(&mut c);
            c.len().saturating_sub(1)
        };
        (0..deg.max(1)).map(|k| AlgebraicValue::new(coeffs.clone(), k)).collect()
    }

    /// Exact test whether this root is a root of `h`: the common factor with the
    /// minimal polynomial is computed exactly, and its roots are matched to the
    /// (separated) roots of the minimal polynomial.
    pub fn is_root_of(&self, h: &DenseUni) -> bool {
        let mut h = h.clone();
        trim(&mut h);
        if h.is_empty() {
            return true;
        }
        let g = uni_gcd(&h, &self.minimal_poly);
        if g.len() < 2 {
            return false;
        }
        if g.len() == self.minimal_poly.len() {
            return true;
        }
        let lc_inv = g.last().unwrap().inv().unwrap();
        let g: DenseUni = g.iter().map(|x| x * &lc_inv).collect();
        let all = sorted_roots(&self.minimal_poly);
        sorted_roots(&g).iter().any(|z| {
            let nearest = all
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
                .map(|(i, _)| i);
            nearest == Some(self.index)
        })
    }

    pub fn minimal_poly(&self) -> &DenseUni {
        &self.minimal_poly
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn degree(&self) -> usize {
        self.minimal_poly.len() - 1
    }

    /// Rational value when the minimal polynomial is linear.
    pub fn as_rational(&self) -> Option<GaussianRational> {
        (self.degree() == 1).then(|| -&self.minimal_poly[0])
    }

    pub fn approx(&self) -> Complex64 {
        sorted_roots(&self.minimal_poly)[self.index]
    }

    pub fn minimal_poly_in(&self, nslots: usize, slot: usize) -> Polynomial {
        let coeffs: Vec<Polynomial> = self
            .minimal_poly
            .iter()
            .map(|c| Polynomial::constant(nslots, c.clone()))
            .collect();
        Polynomial::from_coefficients_in(slot, &coeffs, nslots)
    }

    /// `root(t^2 - 1/2, 0)` style rendering.
    pub fn render(&self) -> String {
        let nslots = 1;
        let p = self.minimal_poly_in(nslots, 0);
        format!("root({}, {})", p.display_with(&["t".to_string()]), self.index)
    }
}

impl fmt::Display for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialOrd for AlgebraicValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.minimal_poly
            .len()
            .cmp(&other.minimal_poly.len())
            .then_with(|| self.minimal_poly.cmp(&other.minimal_poly))
            .then_with(|| self.index.cmp(&other.index))
    }
}

/// Durand-Kerner iteration followed by Newton polishing; sorted by (re, im).
fn sorted_roots(monic: &DenseUni) -> Vec<Complex64> {
    let coeffs: Vec<Complex64> = monic.iter().map(|c| c.to_complex()).collect();
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c);
    let deval = |z: Complex64| {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::zero(), |acc, (k, c)| acc * z + c * k as f64)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::one();
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = deval(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    let key = |z: &Complex64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    roots.sort_by_key(|a| key(a));
    roots
}

/// `sum_k coeffs[k] * alpha^k` reduced modulo the minimal polynomial of `alpha`;
/// without a root it is a plain polynomial (one coefficient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgPoly {
    root: Option<AlgebraicValue>,
    coeffs: Vec<Polynomial>,
}

impl AlgPoly {
    pub fn from_poly(p: Polynomial) -> Self {
        AlgPoly { root: None, coeffs: vec![p] }
    }

    pub fn new(root: Option<AlgebraicValue>, coeffs: Vec<Polynomial>) -> Self {
        assert!(!coeffs.is_empty());
        let mut out = AlgPoly { root, coeffs };
        out.reduce();
        out.prune();
        out
    }

    pub fn root(&self) -> Option<&AlgebraicValue> {
        self.root.as_ref()
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn nslots(&self) -> usize {
        self.coeffs[0].nslots()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The plain polynomial, when no positive power of the root survives.
    pub fn as_poly(&self) -> Option<&Polynomial> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn free_of(&self, slots: impl Fn(usize) -> bool + Copy) -> bool {
        self.coeffs.iter().all(|c| c.free_of(slots))
    }

    fn reduce(&mut self) {
        let m = match &self.root {
            Some(r) => r.minimal_poly.clone(),
            None => {
                debug_assert!(self.coeffs[1..].iter().all(|c| c.is_zero()));
                self.coeffs.truncate(1);
                return;
            }
        };
        let d = m.len() - 1;
        while self.coeffs.len() > d {
            let top = self.coeffs.pop().unwrap();
            let k = self.coeffs.len();
            // alpha^k = -sum_{j<d} m_j alpha^(k-d+j)
            for (j, mj) in m.iter().enumerate().take(d) {
                let idx = k - d + j;
                self.coeffs[idx] = &self.coeffs[idx] - &top.scale(mj);
            }
        }
        while self.coeffs.len() < d {
            let n = self.nslots();
            self.coeffs.push(Polynomial::zero(n));
        }
    }

    /// Drops every monomial whose coefficient, a polynomial in the root,
    /// vanishes at the root; afterwards `is_zero` is exact.
    fn prune(&mut self) {
        let root = match &self.root {
            Some(r) if r.degree() > 1 => r.clone(),
            _ => return,
        };
        let mut groups: BTreeMap<Monomial, DenseUni> = BTreeMap::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            for (m, a) in c.terms() {
                let e = groups.entry(m.clone()).or_default();
                if e.len() <= k {
                    e.resize(k + 1, GaussianRational::zero());
                }
                e[k] = a.clone();
            }
        }
        let n = self.nslots();
        for (m, h) in groups {
            if root.is_root_of(&h) {
                for (k, c) in self.coeffs.iter_mut().enumerate() {
                    if let Some(a) = h.get(k).filter(|a| !a.is_zero()) {
                        *c = &*c - &Polynomial::monomial(m.clone(), a.clone());
                    }
                }
            }
        }
        debug_assert_eq!(self.nslots(), n);
    }

    fn merged_root(&self, other: &AlgPoly) -> Result<Option<AlgebraicValue>, AlgebraError> {
        match (&self.root, &other.root) {
            (None, r) | (r, None) => Ok(r.clone()),
            (Some(a), Some(b)) if a == b => Ok(Some(a.clone())),
            _ => Err(AlgebraError::MixedAlgebraics),
        }
    }

    fn padded(&self, len: usize) -> Vec<Polynomial> {
        let mut c = self.coeffs.clone();
        while c.len() < len {
            c.push(Polynomial::zero(self.nslots()));
        }
        c
    }

    pub fn add(&self, other: &AlgPoly) -> Result<AlgPoly, AlgebraError> {
        let root = self.merged_root(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let a = self.padded(len);
        let b = other.padded(len);
        let coeffs = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        Ok(AlgPoly::new(root, coeffs))
    }

    pub fn neg(&self) -> AlgPoly {
        AlgPoly { root: self.root.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &AlgPoly) -> Result<AlgPoly, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AlgPoly) -> Result<AlgPoly, AlgebraError> {
        let root = self.merged_root(other)?;
        let n = self.nslots();
        let mut coeffs = vec![Polynomial::zero(n); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(AlgPoly::new(root, coeffs))
    }

    /// The root itself as an extension element.
    pub fn alpha(root: &AlgebraicValue, nslots: usize) -> AlgPoly {
        AlgPoly::new(
            Some(root.clone()),
            vec![Polynomial::zero(nslots), Polynomial::one(nslots)],
        )
    }

    pub fn scale(&self, c: &GaussianRational) -> AlgPoly {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn derivative(&self, slot: usize) -> AlgPoly {
        self.map_coeffs(|p| p.partial_derivative(slot))
    }

    pub fn degree_in(&self, slot: usize) -> u32 {
        self.coeffs.iter().map(|c| c.degree_in(slot)).max().unwrap_or(0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        self.coeffs.iter().any(|c| c.uses_slot(slot))
    }

    /// Coefficients of powers of `slot`, lowest first.
    pub fn coefficients_in(&self, slot: usize) -> Vec<AlgPoly> {
        let d = self.degree_in(slot) as usize;
        let per: Vec<Vec<Polynomial>> = self.coeffs.iter().map(|c| c.coefficients_in(slot)).collect();
        (0..=d)
            .map(|k| {
                let cs = per
                    .iter()
                    .map(|v| v.get(k).cloned().unwrap_or_else(|| Polynomial::zero(self.nslots())))
                    .collect();
                AlgPoly::new(self.root.clone(), cs)
            })
            .collect()
    }

    /// Drops all terms of degree above `d` in `slot`.
    pub fn truncate_degree(&self, slot: usize, d: u32) -> AlgPoly {
        self.map_coeffs(|p| {
            Polynomial::from_terms(
                p.nslots(),
                p.terms().filter(|(m, _)| m.0[slot] <= d).map(|(m, c)| (m.clone(), c.clone())),
            )
        })
    }

    pub fn extend_slots(&self, extra: usize) -> AlgPoly {
        AlgPoly {
            root: self.root.clone(),
            coeffs: self.coeffs.iter().map(|c| c.extend_slots(extra)).collect(),
        }
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        let a = self.root.as_ref().map_or(Complex64::zero(), |r| r.approx());
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * a + c.eval_complex(x))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Polynomial) -> Polynomial) -> AlgPoly {
        AlgPoly::new(self.root.clone(), self.coeffs.iter().map(f).collect())
    }

    pub fn render(&self, names: &dyn Fn(&Polynomial) -> String) -> String {
        match &self.root {
            None => names(&self.coeffs[0]),
            Some(r) => {
                let parts: Vec<String> = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| match k {
                        0 => format!("({})", names(c)),
                        1 => format!("({})*a", names(c)),
                        _ => format!("({})*a^{}", names(c), k),
                    })
                    .collect();
                if parts.is_empty() {
                    "0".into()
                } else {
                    format!("{} where a = {}", parts.join(" + "), r)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> GaussianRational {
        GaussianRational::from_ratio(1, 2)
    }

    #[test]
    fn squarefree_required() {
        // t^2 (double root)
        let c = vec![GaussianRational::zero(), GaussianRational::zero(), GaussianRational::one()];
        assert!(AlgebraicValue::new(c, 0).is_err());
        let c = vec![-half(), GaussianRational::zero(), GaussianRational::one()];
        let roots = AlgebraicValue::all_roots(c).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].approx().re < 0.0);
        assert!((roots[1].approx().re - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reduction_mod_minimal_poly() {
        let c = vec![-half(), GaussianRational::zero(), GaussianRational::one()];
        let r = AlgebraicValue::new(c, 1).unwrap();
        let a = AlgPoly::alpha(&r, 1);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.as_poly().unwrap(), &Polynomial::constant(1, half()));
        let other = AlgebraicValue::new(vec![-GaussianRational::from_int(3), GaussianRational::zero(), GaussianRational::one()], 0).unwrap();
        assert!(matches!(a.add(&AlgPoly::alpha(&other, 1)), Err(AlgebraError::MixedAlgebraics)));
    }

    #[test]
    fn complex_roots_sorted() {
        // t^2 + 1: roots -i, i
        let c = vec![GaussianRational::one(), GaussianRational::zero(), GaussianRational::one()];
        let roots = AlgebraicValue::all_roots(c).unwrap();
        assert!(roots[0].approx().im < 0.0);
        assert!(roots[1].approx().im > 0.0);
    }

    #[test]
    fn reducible_minimal_poly() {
        // t^2 - t has roots 0 and 1
        let m = vec![GaussianRational::zero(), -GaussianRational::one(), GaussianRational::one()];
        let zero_root = AlgebraicValue::new(m.clone(), 0).unwrap();
        let one_root = AlgebraicValue::new(m, 1).unwrap();
        let one = AlgPoly::from_poly(Polynomial::one(2));
        let x = AlgPoly::from_poly(Polynomial::var(2, 0));
        let a1 = AlgPoly::alpha(&one_root, 2);
        assert!(a1.sub(&one).unwrap().is_zero());
        assert!(!a1.is_zero());
        let a0 = AlgPoly::alpha(&zero_root, 2);
        assert!(a0.is_zero());
        // x * (alpha - 1) + alpha at the root 1 is 1
        let e = x.mul(&a1.sub(&one).unwrap()).unwrap().add(&a1).unwrap();
        assert!(e.sub(&one).unwrap().is_zero());
        assert!(!e.is_zero());
    }
}
