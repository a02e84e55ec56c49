//! Branch labels: the symbolic index set of a superposition.
//!
//! A label is a composite of up to four fields — system outcome,
//! environment tag, per-mind slot states, per-mind qubit symbols. States
//! over different subsystems use different subsets of the fields; tensor
//! products concatenate disjoint subsets into one wider label.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An interned, opaque outcome/tag symbol. Ordered by string value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        Symbol(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The distinguished erased/ground outcome `∅`.
    pub fn ground() -> Self {
        Symbol::new("∅")
    }

    pub fn is_ground(&self) -> bool {
        self.as_str() == "∅"
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.0)
    }
}

/// State of one mind slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MindSlot {
    /// Pre-measurement `O₀`.
    Ready,
    /// Mind recorded the given outcome.
    Aware(Symbol),
    /// The memory ground state `∅`.
    Empty,
}

impl MindSlot {
    pub fn is_aware(&self) -> bool {
        matches!(self, MindSlot::Aware(_))
    }

    pub fn aware_of(&self) -> Option<&Symbol> {
        match self {
            MindSlot::Aware(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for MindSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MindSlot::Ready => f.write_str("O_0"),
            MindSlot::Aware(s) => write!(f, "O_{s}"),
            MindSlot::Empty => f.write_str("∅"),
        }
    }
}

/// Composite branch label. Absent fields mean the state does not involve
/// that subsystem. Comparison is total and lexicographic over
/// (system, env, minds, qubits), which fixes the canonical branch order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchLabel {
    pub system: Option<Symbol>,
    pub env: Option<Symbol>,
    pub minds: Option<Vec<MindSlot>>,
    pub qubits: Option<Vec<Symbol>>,
}

impl BranchLabel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_system(mut self, s: impl Into<Symbol>) -> Self {
        self.system = Some(s.into());
        self
    }

    pub fn with_env(mut self, s: impl Into<Symbol>) -> Self {
        self.env = Some(s.into());
        self
    }

    pub fn with_minds(mut self, slots: Vec<MindSlot>) -> Self {
        self.minds = Some(slots);
        self
    }

    pub fn with_qubits(mut self, qubits: Vec<Symbol>) -> Self {
        self.qubits = Some(qubits);
        self
    }

    /// Field-wise concatenation for tensor products; both sides owning the
    /// same field is a schema collision.
    pub fn concat(&self, other: &BranchLabel) -> Result<BranchLabel> {
        fn join<T: Clone>(a: &Option<T>, b: &Option<T>) -> Result<Option<T>> {
            match (a, b) {
                (Some(_), Some(_)) => Err(Error::IncompatibleSchemas),
                (Some(x), None) | (None, Some(x)) => Ok(Some(x.clone())),
                (None, None) => Ok(None),
            }
        }
        Ok(BranchLabel {
            system: join(&self.system, &other.system)?,
            env: join(&self.env, &other.env)?,
            minds: join(&self.minds, &other.minds)?,
            qubits: join(&self.qubits, &other.qubits)?,
        })
    }

    pub fn aware_count(&self) -> usize {
        self.minds
            .as_deref()
            .map(|m| m.iter().filter(|s| s.is_aware()).count())
            .unwrap_or(0)
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if let Some(s) = &self.system {
            parts.push(format!("|{s}⟩"));
        }
        if let Some(e) = &self.env {
            parts.push(format!("|{e}⟩"));
        }
        if let Some(m) = &self.minds {
            let inner: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            parts.push(format!("|{}⟩", inner.join(",")));
        }
        if let Some(q) = &self.qubits {
            let inner: Vec<String> = q.iter().map(|x| x.to_string()).collect();
            parts.push(format!("|{}⟩", inner.join(",")));
        }
        f.write_str(&parts.join("⊗"))
    }
}

/// Shape of a label: which fields are present and the slot counts.
/// Every branch of one state must share the same schema.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelSchema {
    pub has_system: bool,
    pub has_env: bool,
    pub mind_slots: Option<usize>,
    pub qubit_slots: Option<usize>,
}

impl LabelSchema {
    pub fn of(label: &BranchLabel) -> Self {
        LabelSchema {
            has_system: label.system.is_some(),
            has_env: label.env.is_some(),
            mind_slots: label.minds.as_ref().map(|m| m.len()),
            qubit_slots: label.qubits.as_ref().map(|q| q.len()),
        }
    }

    pub fn matches(&self, label: &BranchLabel) -> bool {
        *self == LabelSchema::of(label)
    }

    /// True when no field is owned by both schemas.
    pub fn disjoint(&self, other: &LabelSchema) -> bool {
        !(self.has_system && other.has_system)
            && !(self.has_env && other.has_env)
            && !(self.mind_slots.is_some() && other.mind_slots.is_some())
            && !(self.qubit_slots.is_some() && other.qubit_slots.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_is_fieldwise_disjoint() {
        let sys = BranchLabel::new().with_system("↑");
        let rest = BranchLabel::new()
            .with_env("E_↑")
            .with_minds(vec![MindSlot::Ready])
            .with_qubits(vec![Symbol::new("♠")]);
        let full = sys.concat(&rest).unwrap();
        assert_eq!(full.system, Some(Symbol::new("↑")));
        assert_eq!(full.minds.as_ref().unwrap().len(), 1);

        let clash = sys.concat(&BranchLabel::new().with_system("↓"));
        assert_eq!(clash.unwrap_err(), Error::IncompatibleSchemas);
    }

    #[test]
    fn ordering_is_lexicographic_over_fields() {
        let a = BranchLabel::new().with_system("↑").with_env("E_↑");
        let b = BranchLabel::new().with_system("↑").with_env("E_↓");
        let c = BranchLabel::new().with_system("↓").with_env("E_↑");
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn schema_tracks_presence_and_lengths() {
        let l = BranchLabel::new()
            .with_system("↑")
            .with_minds(vec![MindSlot::Empty, MindSlot::Ready]);
        let s = LabelSchema::of(&l);
        assert!(s.has_system);
        assert!(!s.has_env);
        assert_eq!(s.mind_slots, Some(2));
        assert!(!s.matches(&BranchLabel::new().with_system("↑")));
    }
}
