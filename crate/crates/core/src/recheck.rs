//! Independent re-verification of exact ledger evidence.

use std::collections::BTreeMap;

use crate::algebra::{compose_alg, decide_vanishing, poly_eval, substitute_alg, AlgPoly, Value, Vanishing};
use crate::cones::{recheck_certificate, recheck_witness};
use crate::foliation::{
    check_separatrix, lift_field, restrict, substitute_time, time_slot, Class, Evidence, FoliationModel, Grade,
    Ledger, Status, Verdict,
};
use crate::variety::Slice;

fn nonzero(v: &AlgPoly, ctx: &crate::algebra::VarContext) -> Result<(), String> {
    match decide_vanishing(v, ctx) {
        Vanishing::NonZero => Ok(()),
        _ => Err("stored value is not certified nonzero".into()),
    }
}

fn in_e(model: &FoliationModel, p: &[Value]) -> Option<bool> {
    model.singular_set.membership(p, &model.ctx).ok().and_then(|m| m.is_member())
}

fn sigma_of(v: &Verdict) -> Result<&Slice, String> {
    v.class.sigma().ok_or_else(|| format!("{} evidence needs a submanifold", v.class.label()))
}

/// `gamma(0) = p` and `gamma' = field(gamma)`.
fn leaf_solves(model: &FoliationModel, p: &[Value], field: &[crate::algebra::Polynomial], leaf: &[AlgPoly]) -> Result<(), String> {
    let ctx = &model.ctx;
    let t = time_slot(ctx);
    if leaf.len() != p.len() {
        return Err("leaf has wrong arity".into());
    }
    let zero = crate::algebra::GaussianRational::from_int(0);
    let map: BTreeMap<usize, AlgPoly> = leaf.iter().cloned().enumerate().collect();
    for (i, c) in leaf.iter().enumerate() {
        let at0 = substitute_time(c, t, &zero).map_err(|e| e.to_string())?;
        let d = at0.sub(&p[i].to_alg(ctx.nslots()).extend_slots(1)).map_err(|e| e.to_string())?;
        if !d.is_zero() {
            return Err("leaf does not start at the point".into());
        }
        let rhs = compose_alg(&field[i].extend_slots(1), &map).map_err(|e| e.to_string())?;
        if !rhs.sub(&c.derivative(t)).map_err(|e| e.to_string())?.is_zero() {
            return Err("leaf does not solve the restricted flow".into());
        }
    }
    Ok(())
}

fn restricted_of_weak(ledger: &Ledger, v: &Verdict) -> Result<Vec<crate::algebra::Polynomial>, String> {
    let Class::StrongSigma { l, sigma } = &v.class else {
        return Err("leaf evidence outside a strong class".into());
    };
    let weak = Class::WeakSigma { l: *l, sigma: sigma.clone() };
    match ledger.find(&v.point, &weak) {
        Some((_, w)) if w.is_yes() => match &w.evidence {
            Evidence::Removable { restricted, .. } => Ok(restricted.clone()),
            _ => Err("weak entry carries no restricted field".into()),
        },
        _ => Err("no certified weak entry for the submanifold".into()),
    }
}

/// Re-derives the claim of one entry from its evidence alone.
pub fn recheck_entry(model: &FoliationModel, ledger: &Ledger, id: usize) -> Result<(), String> {
    let v = ledger.get(id).ok_or("no such entry")?;
    let p = &v.point;
    let ctx = &model.ctx;
    if v.status == Status::Unknown || v.grade == Grade::Numeric {
        return Ok(());
    }
    match &v.evidence {
        Evidence::None | Evidence::Failure(_) | Evidence::NumericLeaf { .. } => {
            Err("certified verdict without exact evidence".into())
        }
        Evidence::NotSingular => match in_e(model, p) {
            Some(false) => Ok(()),
            _ => Err("point is not certified outside E".into()),
        },
        Evidence::NotThroughPoint => match sigma_of(v)?.contains(p, ctx) {
            Some(false) => Ok(()),
            _ => Err("submanifold passes through the point".into()),
        },
        Evidence::NotInvariant { index, value } => {
            let s = sigma_of(v)?;
            let again = substitute_alg(&AlgPoly::from_poly(model.saturated.coeffs[*index].clone()), &s.assignments)
                .map_err(|e| e.to_string())?;
            if &again != value || value.is_zero() {
                return Err("frozen coefficient does not reproduce".into());
            }
            Ok(())
        }
        Evidence::DimensionMismatch { local_dim, expected } => {
            match &v.class {
                Class::WeakSigma { sigma, .. } | Class::StrongSigma { sigma, .. } => {
                    let d = model
                        .singular_set
                        .intersect_slice(sigma, ctx)
                        .and_then(|e| e.local_dimension(p, ctx))
                        .map_err(|e| e.to_string())?;
                    if d != *local_dim || d == Some(*expected) {
                        return Err("dimension condition does not reproduce".into());
                    }
                }
                _ => {
                    let d = model.singular_set.local_dimension(p, ctx).map_err(|e| e.to_string())?;
                    let Some(d) = d else { return Err("point is not in E".into()) };
                    if Some(d) != *local_dim || (*expected != 0 && *expected <= d) {
                        return Err("order is admissible at the point".into());
                    }
                }
            }
            Ok(())
        }
        Evidence::Removable { restricted, factor, index, value, local_dim } => {
            let s = sigma_of(v)?;
            if in_e(model, p) != Some(true) || s.contains(p, ctx) != Some(true) {
                return Err("point is not on E and the submanifold".into());
            }
            let r = restrict(&model.saturated, s, ctx).map_err(|e| e.to_string())?;
            for (a, b) in r.field.iter().zip(restricted) {
                if a != &(factor * b) {
                    return Err("restricted field does not factor as stored".into());
                }
            }
            let d = model
                .singular_set
                .intersect_slice(s, ctx)
                .and_then(|e| e.local_dimension(p, ctx))
                .map_err(|e| e.to_string())?;
            if d != Some(*local_dim) || s.dimension() != local_dim + 1 {
                return Err("dimension condition fails".into());
            }
            let q = r.lower_point(p, ctx).ok_or("point uses frozen coordinates")?;
            let again = poly_eval(&restricted[*index], &q).map_err(|e| e.to_string())?;
            if &again != value {
                return Err("stored value does not reproduce".into());
            }
            nonzero(value, &r.ctx)
        }
        Evidence::SingularForRestriction { restricted } => {
            let s = sigma_of(v)?;
            let r = restrict(&model.saturated, s, ctx).map_err(|e| e.to_string())?;
            let q = r.lower_point(p, ctx).ok_or("point uses frozen coordinates")?;
            if restricted.len() != r.field.len() {
                return Err("restricted field has the wrong length".into());
            }
            for c in restricted {
                let val = poly_eval(c, &q).map_err(|e| e.to_string())?;
                if decide_vanishing(&val, &r.ctx) != Vanishing::Zero {
                    return Err("restricted field does not vanish at the point".into());
                }
            }
            let all_zero = r.field.iter().all(|c| c.is_zero());
            let (_, y) = crate::foliation::saturate(&crate::foliation::VectorField { coeffs: r.field.clone() });
            if !(all_zero || y.coeffs == *restricted) {
                return Err("restricted field does not reproduce".into());
            }
            Ok(())
        }
        Evidence::LeafInE { leaf } => {
            let restricted = restricted_of_weak(ledger, v)?;
            let lifted = lift_field(sigma_of(v)?, &restricted, ctx);
            leaf_solves(model, p, &lifted, leaf)?;
            let pulled = model.pullback(leaf).map_err(|e| e.to_string())?;
            if pulled.iter().all(|g| g.is_zero()) {
                Ok(())
            } else {
                Err("leaf leaves E".into())
            }
        }
        Evidence::LeafLeavesE { leaf, index, t, value } => {
            let restricted = restricted_of_weak(ledger, v)?;
            let lifted = lift_field(sigma_of(v)?, &restricted, ctx);
            leaf_solves(model, p, &lifted, leaf)?;
            let pulled = model.pullback(leaf).map_err(|e| e.to_string())?;
            let at = substitute_time(&pulled[*index], time_slot(ctx), t).map_err(|e| e.to_string())?;
            if &at != value {
                return Err("stored value does not reproduce".into());
            }
            nonzero(value, ctx)
        }
        Evidence::Separatrix { curve, .. } => {
            check_separatrix(model, p, curve).map(|_| ())
        }
        Evidence::Support { ids } => recheck_support(ledger, id, v, ids),
        Evidence::TransversalCertificate(c) => recheck_certificate(model, p, c),
        Evidence::TransversalWitness(w) => recheck_witness(model, p, w),
    }
}

fn recheck_support(ledger: &Ledger, id: usize, v: &Verdict, ids: &[usize]) -> Result<(), String> {
    let refs: Vec<&Verdict> = ids
        .iter()
        .map(|&i| if i < id { ledger.get(i).ok_or("missing entry") } else { Err("forward reference") })
        .collect::<Result<_, _>>()?;
    if refs.iter().any(|r| r.point != v.point) {
        return Err("support refers to another point".into());
    }
    let ok = match (&v.class, v.status) {
        (Class::Weak { l }, Status::CertifiedYes) => {
            refs.len() == 1 && refs[0].is_yes() && matches!(refs[0].class, Class::WeakSigma { l: m, .. } if m == *l)
        }
        (Class::Strong { l }, Status::CertifiedYes) => {
            refs.len() == 1 && refs[0].is_yes() && matches!(refs[0].class, Class::StrongSigma { l: m, .. } if m == *l)
        }
        (Class::Weak { l }, Status::CertifiedNo) => {
            v.exhaustive
                && refs.iter().all(|r| r.is_no() && matches!(r.class, Class::WeakSigma { l: m, .. } if m == *l))
        }
        (Class::Strong { l }, Status::CertifiedNo) => {
            v.exhaustive
                && refs.iter().all(|r| r.is_no() && matches!(r.class, Class::StrongSigma { l: m, .. } if m == *l))
        }
        (Class::StrongSigma { l, sigma }, Status::CertifiedNo) => {
            refs.len() == 1
                && refs[0].is_no()
                && refs[0].class == Class::WeakSigma { l: *l, sigma: sigma.clone() }
        }
        (Class::A0, Status::CertifiedYes) => {
            refs.len() == 2
                && refs[0].is_yes()
                && refs[1].is_no()
                && refs[1].exhaustive
                && matches!((&refs[0].class, &refs[1].class), (Class::Weak { l }, Class::Strong { l: m }) if l == m)
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("support does not entail {} {}", v.class.label(), v.status))
    }
}

/// Failures as `(entry id, reason)`.
pub fn recheck_ledger(model: &FoliationModel, ledger: &Ledger) -> Vec<(usize, String)> {
    (0..ledger.entries.len())
        .filter_map(|id| recheck_entry(model, ledger, id).err().map(|e| (id, e)))
        .collect()
}
