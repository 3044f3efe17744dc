use std::collections::HashSet;

use super::{AlgebraError, GaussianRational};

/// Prefix of the parameters that stand for a generic coordinate value.
pub const GENERIC_PREFIX: char = '~';

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: String,
    /// Generic parameters model an unspecified point of a component; a nonzero
    /// polynomial in them is treated as nonzero.
    pub generic: bool,
}

/// `param != value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideCondition {
    pub param: usize,
    pub excluded: GaussianRational,
}

/// Names of the polynomial slots: coordinates first, then parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarContext {
    pub vars: Vec<String>,
    pub params: Vec<ParamInfo>,
    pub side_conditions: Vec<SideCondition>,
}

impl VarContext {
    /// Builds a context and appends one generic parameter `~v` per coordinate.
    pub fn new(
        vars: Vec<String>,
        params: Vec<String>,
        side_conditions: Vec<(String, GaussianRational)>,
    ) -> Result<Self, AlgebraError> {
        if vars.len() < 2 {
            return Err(AlgebraError::Context(format!(
                "at least two coordinates are required, got {}",
                vars.len()
            )));
        }
        let mut seen = HashSet::new();
        for n in vars.iter().chain(params.iter()) {
            if n.starts_with(GENERIC_PREFIX) {
                return Err(AlgebraError::Context(format!("reserved name '{n}'")));
            }
            if !seen.insert(n.clone()) {
                return Err(AlgebraError::Context(format!("duplicate name '{n}'")));
            }
        }
        let mut all_params: Vec<ParamInfo> = params
            .into_iter()
            .map(|name| ParamInfo { name, generic: false })
            .collect();
        for v in &vars {
            all_params.push(ParamInfo {
                name: format!("{GENERIC_PREFIX}{v}"),
                generic: true,
            });
        }
        let mut ctx = VarContext { vars, params: all_params, side_conditions: Vec::new() };
        for (name, value) in side_conditions {
            let slot = ctx
                .param_slot(&name)
                .ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))?;
            ctx.side_conditions.push(SideCondition {
                param: slot - ctx.nvars(),
                excluded: value,
            });
        }
        Ok(ctx)
    }

    /// Context of a coordinate slice: the listed coordinates, all parameters kept.
    pub fn restricted(&self, free_vars: &[usize]) -> VarContext {
        VarContext {
            vars: free_vars.iter().map(|&i| self.vars[i].clone()).collect(),
            params: self.params.clone(),
            side_conditions: self.side_conditions.clone(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn nslots(&self) -> usize {
        self.vars.len() + self.params.len()
    }

    pub fn is_var_slot(&self, slot: usize) -> bool {
        slot < self.nvars()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn param_slot(&self, name: &str) -> Option<usize> {
        self.params
            .iter()
            .position(|p| p.name == name)
            .map(|j| j + self.nvars())
    }

    pub fn slot(&self, name: &str) -> Option<usize> {
        self.var_index(name).or_else(|| self.param_slot(name))
    }

    pub fn slot_name(&self, slot: usize) -> &str {
        if slot < self.nvars() {
            &self.vars[slot]
        } else {
            &self.params[slot - self.nvars()].name
        }
    }

    pub fn is_generic_slot(&self, slot: usize) -> bool {
        slot >= self.nvars() && self.params[slot - self.nvars()].generic
    }

    /// Slot of the generic parameter attached to coordinate `var`.
    pub fn generic_slot_for(&self, var: usize) -> Option<usize> {
        self.param_slot(&format!("{GENERIC_PREFIX}{}", self.vars[var]))
    }

    /// Declared (non-generic) parameter names, in order.
    pub fn declared_params(&self) -> impl Iterator<Item = &ParamInfo> {
        self.params.iter().filter(|p| !p.generic)
    }

    pub fn excluded_values(&self, slot: usize) -> impl Iterator<Item = &GaussianRational> {
        let nv = self.nvars();
        self.side_conditions
            .iter()
            .filter(move |c| c.param + nv == slot)
            .map(|c| &c.excluded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_clashes() {
        let e = VarContext::new(vec!["x".into(), "y".into()], vec!["x".into()], vec![]);
        assert!(e.is_err());
        let e = VarContext::new(vec!["x".into()], vec![], vec![]);
        assert!(e.is_err());
    }

    #[test]
    fn slots_and_generics() {
        let ctx = VarContext::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec!["c".into()],
            vec![("c".into(), GaussianRational::from_int(0))],
        )
        .unwrap();
        assert_eq!(ctx.nslots(), 3 + 1 + 3);
        assert_eq!(ctx.slot("c"), Some(3));
        assert_eq!(ctx.generic_slot_for(1), Some(5));
        assert!(ctx.is_generic_slot(5));
        assert!(!ctx.is_generic_slot(3));
        assert_eq!(ctx.excluded_values(3).count(), 1);
    }
}
