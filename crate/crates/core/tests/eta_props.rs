use folia_core::algebra::{GaussianRational, Polynomial, VarContext};
use folia_core::eta::{eta_exact_product, eta_lower_bound_shoot, EtaError, MetricContext, ProductLeafDecl, ShootOptions};
use folia_core::foliation::{Domain, FoliationModel, VectorField};
use folia_core::variety::SolveOptions;
use num_complex::Complex64;
use proptest::prelude::*;

/// `(1, 0)` on the unit bidisc: leaves are discs in `x`.
fn translation() -> FoliationModel {
    let ctx = VarContext::new(vec!["x".into(), "y".into()], vec![], vec![]).unwrap();
    let n = ctx.nslots();
    let field = VectorField::new(vec![Polynomial::one(n), Polynomial::zero(n)]).unwrap();
    FoliationModel::new(ctx, field, Domain::Polydisc(GaussianRational::from_int(1)), SolveOptions::default()).unwrap()
}

fn disc_point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_value_is_the_disc_density(z in disc_point(0.999), w in disc_point(0.999)) {
        let m = MetricContext::new(1.0).unwrap();
        let eta = eta_exact_product(&[z, w], &ProductLeafDecl { coordinate: 0 }, &m).unwrap();
        prop_assert_eq!(eta, 1.0 - z.norm_sqr());
        prop_assert!(eta > 0.0 && eta <= 1.0);
    }

    #[test]
    fn exact_value_scales_with_radius(z in disc_point(0.9), r in 0.5f64..4.0) {
        let unit = eta_exact_product(&[z, z], &ProductLeafDecl { coordinate: 0 }, &MetricContext::new(1.0).unwrap()).unwrap();
        let scaled = eta_exact_product(&[z * r, z * r], &ProductLeafDecl { coordinate: 0 }, &MetricContext::new(r).unwrap()).unwrap();
        prop_assert!((scaled - r * unit).abs() < 1e-12 * r);
    }

    #[test]
    fn shoot_bound_stays_below_exact(z in disc_point(0.9), w in disc_point(0.9)) {
        let model = translation();
        let m = MetricContext::new(1.0).unwrap();
        let exact = eta_exact_product(&[z, w], &ProductLeafDecl { coordinate: 0 }, &m).unwrap();
        let opts = ShootOptions { rays: 16, ..ShootOptions::default() };
        let est = eta_lower_bound_shoot(&model, &[z, w], &m, &opts).unwrap();
        prop_assert!(est.lower_bound <= exact + 1e-6, "{} > {}", est.lower_bound, exact);
        prop_assert!(est.lower_bound >= 1.0 - z.norm() - 1e-6);
    }
}

#[test]
fn points_outside_are_rejected() {
    let m = MetricContext::new(1.0).unwrap();
    let p = [Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0)];
    assert_eq!(eta_exact_product(&p, &ProductLeafDecl { coordinate: 0 }, &m), Err(EtaError::OutsideDomain));
    assert_eq!(eta_lower_bound_shoot(&translation(), &p, &m, &ShootOptions::default()), Err(EtaError::OutsideDomain));
    assert_eq!(MetricContext::new(0.0), Err(EtaError::BadRadius));
}

#[test]
fn product_declaration_is_checked() {
    let model = translation();
    assert!(ProductLeafDecl { coordinate: 0 }.verify(&model).is_ok());
    assert!(ProductLeafDecl { coordinate: 1 }.verify(&model).is_err());
}
