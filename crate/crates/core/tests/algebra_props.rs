use folia_core::algebra::{gcd_pair, multivariate_gcd, GaussianRational, Monomial, Polynomial};
use num_traits::Zero;
use proptest::prelude::*;

const SLOTS: usize = 3;

fn coefficient() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4, -2i64..=2).prop_map(|(n, d, im)| {
        GaussianRational::from_ratio(n, d) + &GaussianRational::from_int(im) * &GaussianRational::i()
    })
}

fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..=2, SLOTS), coefficient()), 0..5)
        .prop_map(|terms| Polynomial::from_terms(SLOTS, terms.into_iter().map(|(e, c)| (Monomial(e), c))))
}

fn nonzero_poly() -> impl Strategy<Value = Polynomial> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(SLOTS), a.clone());
    }

    #[test]
    fn divide_exact_inverts_multiplication(a in poly(), b in nonzero_poly()) {
        let q = (&a * &b).divide_exact(&b).unwrap();
        prop_assert_eq!(q, a);
    }

    #[test]
    fn div_rem_reconstructs(a in poly(), b in nonzero_poly()) {
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
    }

    #[test]
    fn gcd_divides_both(a in nonzero_poly(), b in nonzero_poly(), c in nonzero_poly()) {
        let (ac, bc) = (&a * &c, &b * &c);
        let g = gcd_pair(&ac, &bc);
        prop_assert!(ac.divide_exact(&g).is_ok());
        prop_assert!(bc.divide_exact(&g).is_ok());
        prop_assert!(g.divide_exact(&c).is_ok());
        prop_assert_eq!(g.leading_coeff(), GaussianRational::from_int(1));
    }

    #[test]
    fn list_gcd_matches_pairs(a in nonzero_poly(), b in nonzero_poly(), c in nonzero_poly()) {
        let g = multivariate_gcd(&[&a * &c, &b * &c, Polynomial::zero(SLOTS)]).unwrap();
        prop_assert_eq!(g, gcd_pair(&(&a * &c), &(&b * &c)));
    }

    #[test]
    fn derivative_is_a_derivation(a in poly(), b in poly(), s in 0usize..SLOTS) {
        let lhs = (&a * &b).partial_derivative(s);
        let rhs = &(&a.partial_derivative(s) * &b) + &(&a * &b.partial_derivative(s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gaussian_field_inverse(c in coefficient()) {
        match c.inv() {
            Some(inv) => prop_assert_eq!(&c * &inv, GaussianRational::from_int(1)),
            None => prop_assert!(c.is_zero()),
        }
    }
}
