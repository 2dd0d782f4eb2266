//! Assigned type sets: which concrete types may flow into a variable.

use std::collections::{BTreeSet, HashMap};

use crate::frontend::ast::DeclId;
use crate::semantics::{SymbolTable, TypeRef, ValueSource, VarId};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssignedTypeSet {
    /// Exact types of the values assigned (object creations), in first-seen order.
    pub types: Vec<TypeRef>,
    /// Some source could not be analyzed; consumers fall back to the declared cone.
    pub open: bool,
}

impl AssignedTypeSet {
    fn add(&mut self, t: &TypeRef) -> bool {
        if self.types.contains(t) {
            return false;
        }
        self.types.push(t.clone());
        true
    }
}

/// Whether a value of exact type `t` can be seen through a variable used
/// at static type `use_ty`. Use sites mentioning type variables are not
/// filtered.
pub(crate) fn admits(table: &SymbolTable, t: &TypeRef, use_ty: &TypeRef) -> bool {
    use_ty.contains_var() || t.contains_var() || table.is_subtype(t, use_ty)
}

/// Project-wide assigned type sets for every tracked variable.
#[derive(Debug, Default)]
pub struct AssignedSets {
    sets: HashMap<VarId, AssignedTypeSet>,
}

impl AssignedSets {
    /// `open_params`: methods whose parameters receive values from outside
    /// the project (entrypoints and library callbacks).
    pub fn compute(table: &SymbolTable, open_params: &BTreeSet<DeclId>) -> Self {
        let mut sets: HashMap<VarId, AssignedTypeSet> = HashMap::new();
        for &m in open_params {
            let n = table.sig(m).map(|s| s.params.len()).unwrap_or(0);
            for i in 0..n {
                sets.entry(VarId::Param(m, i)).or_default().open = true;
            }
        }
        // (target, source) with parameter facts also flowing into overriders
        let mut flows: Vec<(VarId, &ValueSource)> = Vec::new();
        for f in &table.facts {
            flows.push((f.target.clone(), &f.source));
            if let VarId::Param(m, i) = f.target {
                for &o in table.overridden_by(m) {
                    flows.push((VarId::Param(o, i), &f.source));
                }
            }
        }
        loop {
            let mut changed = false;
            for (target, source) in &flows {
                let incoming: Option<AssignedTypeSet> = match source {
                    ValueSource::Exact(t) => Some(AssignedTypeSet {
                        types: vec![t.clone()],
                        open: false,
                    }),
                    ValueSource::Nothing => None,
                    ValueSource::Open => Some(AssignedTypeSet {
                        types: Vec::new(),
                        open: true,
                    }),
                    ValueSource::Var(v, use_ty) => sets.get(v).map(|s| AssignedTypeSet {
                        types: s.types.iter().filter(|t| admits(table, t, use_ty)).cloned().collect(),
                        open: s.open,
                    }),
                };
                let entry = sets.entry(target.clone()).or_default();
                if let Some(inc) = incoming {
                    if inc.open && !entry.open {
                        entry.open = true;
                        changed = true;
                    }
                    for t in &inc.types {
                        changed |= entry.add(t);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        AssignedSets { sets }
    }

    /// The set for `var`; variables never assigned have the empty closed set.
    pub fn get(&self, var: &VarId) -> AssignedTypeSet {
        self.sets.get(var).cloned().unwrap_or_default()
    }

    /// The set seen through a use of `var` at static type `use_ty`.
    pub fn at_use(&self, table: &SymbolTable, var: &VarId, use_ty: &TypeRef) -> AssignedTypeSet {
        let s = self.get(var);
        AssignedTypeSet {
            types: s.types.into_iter().filter(|t| admits(table, t, use_ty)).collect(),
            open: s.open,
        }
    }
}
