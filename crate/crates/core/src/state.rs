//! Superpositions as canonical maps from branch labels to amplitudes.
//!
//! The displayed states of the toy models never occupy more than a handful
//! of branches of an astronomically large formal tensor space, so states
//! are kept symbolic: a sorted label → amplitude map. All operations are
//! pure; a state is never mutated after construction.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::amplitude::Amplitude;
use crate::error::{Error, Result};
use crate::label::{BranchLabel, LabelSchema, Symbol};
use crate::weight::Weight;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A normalized (or intermediate) superposition over labeled branches.
#[derive(Clone, Debug)]
pub struct BranchState {
    branches: BTreeMap<BranchLabel, Amplitude>,
    schema: LabelSchema,
    tolerance: f64,
}

impl BranchState {
    /// Builds a state from branch terms, merging duplicate labels by
    /// amplitude addition and pruning entries below tolerance. The result
    /// is canonical: any insertion order of the same multiset gives the
    /// same state.
    pub fn from_branches(
        branches: impl IntoIterator<Item = (BranchLabel, Amplitude)>,
    ) -> Result<Self> {
        Self::from_branches_with_tolerance(branches, DEFAULT_TOLERANCE)
    }

    pub fn from_branches_with_tolerance(
        branches: impl IntoIterator<Item = (BranchLabel, Amplitude)>,
        tolerance: f64,
    ) -> Result<Self> {
        let mut map: BTreeMap<BranchLabel, Amplitude> = BTreeMap::new();
        let mut schema: Option<LabelSchema> = None;
        for (label, amp) in branches {
            if !amp.is_finite() {
                return Err(Error::NonFiniteAmplitude);
            }
            match &schema {
                None => schema = Some(LabelSchema::of(&label)),
                Some(s) if !s.matches(&label) => return Err(Error::SchemaMismatch),
                _ => {}
            }
            match map.entry(label) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(amp);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = e.get().add(&amp);
                    e.insert(merged);
                }
            }
        }
        map.retain(|_, a| a.abs() >= tolerance);
        let schema = schema.ok_or(Error::EmptyState)?;
        if map.is_empty() {
            return Err(Error::EmptyState);
        }
        Ok(BranchState {
            branches: map,
            schema,
            tolerance,
        })
    }

    /// The unit state on a single label.
    pub fn pure(label: BranchLabel) -> Self {
        Self::from_branches([(label, Amplitude::one())]).expect("single unit branch")
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BranchLabel, &Amplitude)> {
        self.branches.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &BranchLabel> {
        self.branches.keys()
    }

    pub fn amplitude(&self, label: &BranchLabel) -> Option<&Amplitude> {
        self.branches.get(label)
    }

    pub fn schema(&self) -> &LabelSchema {
        &self.schema
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `Σ|a|²`, exact when every amplitude is exact.
    pub fn norm_sqr(&self) -> Weight {
        let mut total = Weight::zero();
        for amp in self.branches.values() {
            total = total.add(&amp.norm_sqr());
        }
        total
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr().to_f64() - 1.0).abs() <= self.tolerance
    }

    /// Tensor product. Label schemas must be field-wise disjoint.
    pub fn tensor(&self, other: &BranchState) -> Result<BranchState> {
        if !self.schema.disjoint(&other.schema) {
            return Err(Error::IncompatibleSchemas);
        }
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (la, aa) in &self.branches {
            for (lb, ab) in &other.branches {
                out.push((la.concat(lb)?, aa.mul(ab)));
            }
        }
        BranchState::from_branches_with_tolerance(out, self.tolerance.max(other.tolerance))
    }

    /// Applies a label-level unitary: labels are rewritten by the bijection,
    /// amplitudes pick up the per-symbol phase. Norm is preserved exactly.
    pub fn apply(&self, u: &LabelUnitary) -> Result<BranchState> {
        u.check_applicable(&self.schema)?;
        let rewritten = self
            .branches
            .iter()
            .map(|(label, amp)| u.rewrite(label, amp))
            .collect::<Vec<_>>();
        BranchState::from_branches_with_tolerance(rewritten, self.tolerance)
    }

    /// Sends the system field of every branch whose outcome is in `targets`
    /// to the ground symbol `∅`. The rewrite must stay injective on full
    /// labels: if two distinct branches would land on the same label the
    /// protocol is outside its valid regime and this errors.
    pub fn erase(&self, targets: &BTreeSet<Symbol>) -> Result<BranchState> {
        if !self.schema.has_system {
            return Err(Error::MissingField("system"));
        }
        let mut map: BTreeMap<BranchLabel, Amplitude> = BTreeMap::new();
        for (label, amp) in &self.branches {
            let mut new_label = label.clone();
            if let Some(sys) = &label.system {
                if targets.contains(sys) {
                    new_label.system = Some(Symbol::ground());
                }
            }
            if map.insert(new_label.clone(), amp.clone()).is_some() {
                return Err(Error::NonUnitaryCollision(new_label.to_string()));
            }
        }
        BranchState::from_branches_with_tolerance(map, self.tolerance)
    }

    /// `⟨self|other⟩ = Σ conj(a)·b` over shared labels.
    pub fn inner_product(&self, other: &BranchState) -> Result<Amplitude> {
        if self.schema != other.schema {
            return Err(Error::SchemaMismatch);
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Amplitude::zero();
        for (label, amp_small) in &small.branches {
            if let Some(amp_large) = large.branches.get(label) {
                let term = if std::ptr::eq(small, self) {
                    amp_small.conj().mul(amp_large)
                } else {
                    amp_large.conj().mul(amp_small)
                };
                acc = acc.add(&term);
            }
        }
        Ok(acc)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &BranchState) -> Result<Weight> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Additive measure `Σ|a|²` over branches whose label satisfies the
    /// predicate. Exact when the matching amplitudes are exact.
    pub fn measure_of(&self, predicate: impl Fn(&BranchLabel) -> bool) -> Weight {
        let mut total = Weight::zero();
        for (label, amp) in &self.branches {
            if predicate(label) {
                total = total.add(&amp.norm_sqr());
            }
        }
        total
    }

    /// Branch-for-branch comparison: same label set, amplitudes within `tol`.
    pub fn approx_eq(&self, other: &BranchState, tol: f64) -> bool {
        if self.branches.len() != other.branches.len() {
            return false;
        }
        self.branches.iter().all(|(label, amp)| {
            other
                .branches
                .get(label)
                .map(|b| amp.approx_eq(b, tol))
                .unwrap_or(false)
        })
    }

    /// The distinct system outcomes present in the state, in canonical order.
    pub fn system_alphabet(&self) -> Vec<Symbol> {
        let mut seen = BTreeSet::new();
        for label in self.branches.keys() {
            if let Some(s) = &label.system {
                seen.insert(s.clone());
            }
        }
        seen.into_iter().collect()
    }
}

impl std::fmt::Display for BranchState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .branches
            .iter()
            .map(|(label, amp)| format!("{amp}·{label}"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Which symbol field a unitary rewrites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolField {
    System,
    Env,
}

#[derive(Clone, Debug)]
enum UnitaryAction {
    /// Permutation of one field's symbol set (identity off the map),
    /// with an optional per-symbol phase keyed by the original symbol.
    Symbols {
        field: SymbolField,
        map: BTreeMap<Symbol, Symbol>,
        phases: BTreeMap<Symbol, Complex64>,
    },
    /// Permutation of joint (system, env) symbol pairs; identity elsewhere.
    SystemEnv {
        map: BTreeMap<(Symbol, Symbol), (Symbol, Symbol)>,
    },
    /// Reordering of the mind slots: slot `i` receives old slot `perm[i]`.
    PermuteMinds { perm: Vec<usize> },
}

/// A unitary operator given by a bijection on label symbols. The identity
/// on every unmapped symbol is the remainder part of a swap.
#[derive(Clone, Debug)]
pub struct LabelUnitary {
    action: UnitaryAction,
}

impl LabelUnitary {
    /// The swap `a ↔ b` on the chosen field.
    pub fn swap(field: SymbolField, a: impl Into<Symbol>, b: impl Into<Symbol>) -> Self {
        let a = a.into();
        let b = b.into();
        let mut map = BTreeMap::new();
        map.insert(a.clone(), b.clone());
        map.insert(b, a);
        LabelUnitary {
            action: UnitaryAction::Symbols {
                field,
                map,
                phases: BTreeMap::new(),
            },
        }
    }

    /// A general symbol permutation. The map's key set must equal its value
    /// set, otherwise the induced operator is not a bijection.
    pub fn permutation(field: SymbolField, map: BTreeMap<Symbol, Symbol>) -> Result<Self> {
        Self::permutation_with_phases(field, map, BTreeMap::new())
    }

    pub fn permutation_with_phases(
        field: SymbolField,
        map: BTreeMap<Symbol, Symbol>,
        phases: BTreeMap<Symbol, Complex64>,
    ) -> Result<Self> {
        let keys: BTreeSet<&Symbol> = map.keys().collect();
        let values: BTreeSet<&Symbol> = map.values().collect();
        if keys != values {
            return Err(Error::NotABijection);
        }
        for phase in phases.values() {
            if (phase.norm() - 1.0).abs() > DEFAULT_TOLERANCE {
                return Err(Error::NotABijection);
            }
        }
        Ok(LabelUnitary {
            action: UnitaryAction::Symbols { field, map, phases },
        })
    }

    /// A per-symbol phase rotation (identity permutation).
    pub fn phases(field: SymbolField, phases: BTreeMap<Symbol, Complex64>) -> Result<Self> {
        Self::permutation_with_phases(field, BTreeMap::new(), phases)
    }

    /// A permutation of joint (system, env) pairs, e.g. the environment
    /// relabeling `|α⟩⊗|e⟩ ↔ |α⟩⊗|ε⟩` conditioned on the system symbol.
    pub fn system_env_permutation(
        map: BTreeMap<(Symbol, Symbol), (Symbol, Symbol)>,
    ) -> Result<Self> {
        let keys: BTreeSet<&(Symbol, Symbol)> = map.keys().collect();
        let values: BTreeSet<&(Symbol, Symbol)> = map.values().collect();
        if keys != values {
            return Err(Error::NotABijection);
        }
        Ok(LabelUnitary {
            action: UnitaryAction::SystemEnv { map },
        })
    }

    /// Mind-slot permutation: new slot `i` takes the old slot `perm[i]`.
    pub fn permute_minds(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::NotABijection);
            }
            seen[p] = true;
        }
        Ok(LabelUnitary {
            action: UnitaryAction::PermuteMinds { perm },
        })
    }

    fn check_applicable(&self, schema: &LabelSchema) -> Result<()> {
        match &self.action {
            UnitaryAction::Symbols { field, .. } => match field {
                SymbolField::System if !schema.has_system => Err(Error::MissingField("system")),
                SymbolField::Env if !schema.has_env => Err(Error::MissingField("env")),
                _ => Ok(()),
            },
            UnitaryAction::SystemEnv { .. } => {
                if !schema.has_system {
                    Err(Error::MissingField("system"))
                } else if !schema.has_env {
                    Err(Error::MissingField("env"))
                } else {
                    Ok(())
                }
            }
            UnitaryAction::PermuteMinds { perm } => match schema.mind_slots {
                Some(n) if n == perm.len() => Ok(()),
                _ => Err(Error::MissingField("minds")),
            },
        }
    }

    fn rewrite(&self, label: &BranchLabel, amp: &Amplitude) -> (BranchLabel, Amplitude) {
        match &self.action {
            UnitaryAction::Symbols { field, map, phases } => {
                let mut out = label.clone();
                let slot = match field {
                    SymbolField::System => &mut out.system,
                    SymbolField::Env => &mut out.env,
                };
                let mut new_amp = amp.clone();
                if let Some(sym) = slot.as_ref() {
                    if let Some(phase) = phases.get(sym) {
                        new_amp = new_amp.mul_phase(*phase);
                    }
                    if let Some(target) = map.get(sym) {
                        *slot = Some(target.clone());
                    }
                }
                (out, new_amp)
            }
            UnitaryAction::SystemEnv { map } => {
                let mut out = label.clone();
                if let (Some(sys), Some(env)) = (&label.system, &label.env) {
                    if let Some((new_sys, new_env)) = map.get(&(sys.clone(), env.clone())) {
                        out.system = Some(new_sys.clone());
                        out.env = Some(new_env.clone());
                    }
                }
                (out, amp.clone())
            }
            UnitaryAction::PermuteMinds { perm } => {
                let mut out = label.clone();
                if let Some(minds) = &label.minds {
                    out.minds = Some(perm.iter().map(|&i| minds[i].clone()).collect());
                }
                (out, amp.clone())
            }
        }
    }
}
