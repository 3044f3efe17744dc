//! Multivariate gcd over Q(i): monomial content extraction followed by a
//! recursive primitive polynomial remainder sequence.

use super::algebraic::uni_gcd;
use super::{AlgebraError, DenseUni, GaussianRational, Monomial, Polynomial};
use num_traits::{One, Zero};

/// Gcd of a list, ignoring zero entries. Normalized to leading coefficient 1.
pub fn multivariate_gcd(ps: &[Polynomial]) -> Result<Polynomial, AlgebraError> {
    let nonzero: Vec<&Polynomial> = ps.iter().filter(|p| !p.is_zero()).collect();
    let first = match nonzero.first() {
        Some(p) => *p,
        None => return Err(AlgebraError::AllZero),
    };
    let nslots = first.nslots();

    // monomial content first: it is cheap and often all there is
    let mut mono = vec![u32::MAX; nslots];
    for p in &nonzero {
        for (m, _) in p.terms() {
            for (s, &e) in m.0.iter().enumerate() {
                mono[s] = mono[s].min(e);
            }
        }
    }
    let mono = Monomial(mono);
    let mono_poly = Polynomial::monomial(mono.clone(), One::one());
    let reduced: Vec<Polynomial> = nonzero
        .iter()
        .map(|p| p.divide_exact(&mono_poly).expect("monomial content divides"))
        .collect();

    let mut g = reduced[0].clone();
    for p in &reduced[1..] {
        if g.is_constant() {
            break;
        }
        g = gcd_pair(&g, p);
    }
    Ok((&g.monic() * &mono_poly).monic())
}

/// Gcd of two polynomials (either may be zero, not both).
pub fn gcd_pair(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let nslots = a.nslots();
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(nslots);
    }
    let ma = monomial_content(a);
    let mb = monomial_content(b);
    if ma.degree() > 0 || mb.degree() > 0 {
        let common = Monomial(ma.0.iter().zip(&mb.0).map(|(x, y)| *x.min(y)).collect());
        let a = a.divide_exact(&Polynomial::monomial(ma, One::one())).expect("monomial content divides");
        let b = b.divide_exact(&Polynomial::monomial(mb, One::one())).expect("monomial content divides");
        return gcd_pair(&a, &b).mul_monomial(&common, &One::one());
    }
    if let Some(s) = (0..nslots).find(|&s| a.uses_slot(s) != b.uses_slot(s)) {
        return if a.uses_slot(s) {
            gcd_pair(&content(a, s), b).monic()
        } else {
            gcd_pair(a, &content(b, s)).monic()
        };
    }
    let main = match (0..nslots)
        .filter(|&s| a.uses_slot(s))
        .min_by_key(|&s| (a.degree_in(s).max(b.degree_in(s)), a.degree_in(s).min(b.degree_in(s))))
    {
        Some(s) => s,
        None => return Polynomial::one(nslots),
    };

    let ca = content(a, main);
    let cb = content(b, main);
    let c = gcd_pair(&ca, &cb);
    let mut p = a.divide_exact(&ca).expect("content divides");
    let mut q = b.divide_exact(&cb).expect("content divides");
    if p.degree_in(main) < q.degree_in(main) {
        std::mem::swap(&mut p, &mut q);
    }
    match image_gcd_degree(&p, &q, main) {
        Some(0) => return c.monic(),
        Some(d) if d == q.degree_in(main) as usize && p.divide_exact(&q).is_ok() => return (&c * &q).monic(),
        _ => {}
    }
    let g = subresultant_prs(p, q, main);
    (&c * &primitive_part(&g, main)).monic()
}

/// Last nonzero entry of the subresultant remainder sequence of `p` and `q`
/// (`deg p >= deg q` in `slot`), or `1` when it has degree 0.
fn subresultant_prs(mut p: Polynomial, mut q: Polynomial, slot: usize) -> Polynomial {
    let nslots = p.nslots();
    let mut g = Polynomial::one(nslots);
    let mut h = Polynomial::one(nslots);
    loop {
        let delta = p.degree_in(slot) - q.degree_in(slot);
        let r = pseudo_remainder(&p, &q, slot);
        if r.is_zero() {
            return q;
        }
        if !r.uses_slot(slot) {
            return Polynomial::one(nslots);
        }
        let den = &g * &h.pow(delta);
        p = q;
        q = r.divide_exact(&den).expect("subresultant division is exact");
        g = p.coefficients_in(slot).pop().expect("nonzero");
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).divide_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
}

fn monomial_content(p: &Polynomial) -> Monomial {
    let mut m = vec![u32::MAX; p.nslots()];
    for (t, _) in p.terms() {
        for (s, &e) in t.0.iter().enumerate() {
            m[s] = m[s].min(e);
        }
    }
    Monomial(m)
}

/// `p` with every slot but `slot` set to `point`, as a dense polynomial in `slot`.
fn specialize(p: &Polynomial, slot: usize, point: &[GaussianRational]) -> DenseUni {
    let mut out = vec![GaussianRational::zero(); p.degree_in(slot) as usize + 1];
    for (m, c) in p.terms() {
        let mut v = c.clone();
        for (s, &e) in m.0.iter().enumerate() {
            if s != slot && e > 0 {
                v = &v * &point[s].pow(e);
            }
        }
        let k = m.0[slot] as usize;
        out[k] = &out[k] + &v;
    }
    out
}

/// Upper bound on `deg_slot gcd(p, q)`: the degree of the gcd of the images at a
/// point where neither leading coefficient in `slot` vanishes.
fn image_gcd_degree(p: &Polynomial, q: &Polynomial, slot: usize) -> Option<usize> {
    const SMALL_PRIMES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    for attempt in 0..4usize {
        let point: Vec<GaussianRational> = (0..p.nslots())
            .map(|s| GaussianRational::from_ratio(SMALL_PRIMES[(s + 3 * attempt) % 8] + attempt as i64, 7 + s as i64))
            .collect();
        let (pi, qi) = (specialize(p, slot, &point), specialize(q, slot, &point));
        if pi.last().is_none_or(Zero::is_zero) || qi.last().is_none_or(Zero::is_zero) {
            continue;
        }
        return Some(uni_gcd(&pi, &qi).len() - 1);
    }
    None
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `slot`.
pub fn content(p: &Polynomial, slot: usize) -> Polynomial {
    let coeffs = p.coefficients_in(slot);
    let mut g = Polynomial::zero(p.nslots());
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd_pair(&g, c);
        if g.is_constant() {
            return Polynomial::one(p.nslots());
        }
    }
    g
}

pub fn primitive_part(p: &Polynomial, slot: usize) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    p.divide_exact(&content(p, slot)).expect("content divides")
}

/// `lc(b)^(deg a - deg b + 1) * a mod b` in the univariate sense over `slot`.
pub fn pseudo_remainder(a: &Polynomial, b: &Polynomial, slot: usize) -> Polynomial {
    let nslots = a.nslots();
    let db = b.degree_in(slot);
    let b_coeffs = b.coefficients_in(slot);
    let lcb = b_coeffs[db as usize].clone();
    let mut r = a.clone();
    let mut e = (a.degree_in(slot) + 1).saturating_sub(db);
    while !r.is_zero() && r.degree_in(slot) >= db {
        let dr = r.degree_in(slot);
        let lcr = r.coefficients_in(slot)[dr as usize].clone();
        let mut shift = vec![0; nslots];
        shift[slot] = dr - db;
        let s = lcr.mul_monomial(&Monomial(shift), &One::one());
        r = &(&lcb * &r) - &(&s * b);
        e = e.saturating_sub(1);
    }
    &lcb.pow(e) * &r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussianRational;

    fn v(i: usize) -> Polynomial {
        Polynomial::var(4, i)
    }

    #[test]
    fn saturation_examples() {
        let (x, y, z, w) = (v(0), v(1), v(2), v(3));
        let zero = Polynomial::zero(4);
        assert_eq!(
            multivariate_gcd(&[zero.clone(), &y * &z, zero.clone()]).unwrap(),
            &y * &z
        );
        assert_eq!(
            multivariate_gcd(&[x.clone(), &y * &z, &y * &w, &x * &w]).unwrap(),
            Polynomial::one(4)
        );
        assert_eq!(multivariate_gcd(&[x.clone(), &x * &w]).unwrap(), x);
        assert!(matches!(multivariate_gcd(std::slice::from_ref(&zero)), Err(AlgebraError::AllZero)));
    }

    #[test]
    fn nontrivial_common_factor() {
        let (x, y, z, _) = (v(0), v(1), v(2), v(3));
        let g = &(&x + &y) + &Polynomial::constant(4, GaussianRational::from_int(3));
        let a = &g * &(&z.pow(2) - &x);
        let b = &g * &(&(&y * &z) + &Polynomial::one(4));
        assert_eq!(multivariate_gcd(&[a, b]).unwrap(), g.monic());
    }

    #[test]
    fn univariate_gcd() {
        let x = v(0);
        let one = Polynomial::one(4);
        let a = &(&x - &one) * &(&x + &one);
        let b = &(&x - &one) * &(&x - &Polynomial::int(4, 2));
        assert_eq!(multivariate_gcd(&[a, b]).unwrap(), &x - &one);
    }
}
