use std::fmt;

use crate::algebra::{AlgPoly, GaussianRational, Polynomial, Value};
use crate::cones::{TransversalityCertificate, WitnessArc};
use crate::variety::Slice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    CertifiedYes,
    CertifiedNo,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::CertifiedYes => "CertifiedYes",
            Status::CertifiedNo => "CertifiedNo",
            Status::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grade {
    Exact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    /// `A_{l,Sigma}`.
    WeakSigma { l: usize, sigma: Slice },
    /// `B_{l,Sigma}`.
    StrongSigma { l: usize, sigma: Slice },
    A0,
    Weak { l: usize },
    Strong { l: usize },
    Transversal,
}

impl Class {
    pub fn order(&self) -> Option<usize> {
        match self {
            Class::WeakSigma { l, .. } | Class::StrongSigma { l, .. } | Class::Weak { l } | Class::Strong { l } => Some(*l),
            Class::A0 => Some(0),
            Class::Transversal => None,
        }
    }

    pub fn sigma(&self) -> Option<&Slice> {
        match self {
            Class::WeakSigma { sigma, .. } | Class::StrongSigma { sigma, .. } => Some(sigma),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Class::WeakSigma { l, .. } => format!("A_{l},S"),
            Class::StrongSigma { l, .. } => format!("B_{l},S"),
            Class::A0 => "A_0".into(),
            Class::Weak { l } => format!("A_{l}"),
            Class::Strong { l } => format!("B_{l}"),
            Class::Transversal => "transversal".into(),
        }
    }
}

/// Why a verdict holds; exact variants are re-checkable.
#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    None,
    /// The point is not in the singular set.
    NotSingular,
    /// The slice does not pass through the point.
    NotThroughPoint,
    /// A frozen coefficient does not vanish on the slice.
    NotInvariant { index: usize, value: AlgPoly },
    /// `dim_p(Sigma ∩ E)` differs from the order.
    DimensionMismatch { local_dim: Option<usize>, expected: usize },
    /// The saturated restricted field `Y` (`X|Sigma = factor * Y`) is nonzero at the point.
    Removable {
        restricted: Vec<Polynomial>,
        factor: Polynomial,
        index: usize,
        value: AlgPoly,
        local_dim: usize,
    },
    /// The saturated restricted field vanishes at the point.
    SingularForRestriction { restricted: Vec<Polynomial> },
    /// A polynomial leaf through the point (trailing slot is the time) on
    /// which every saturated coefficient vanishes identically.
    LeafInE { leaf: Vec<AlgPoly> },
    /// A polynomial leaf along which a saturated coefficient is nonzero at `t`.
    LeafLeavesE { leaf: Vec<AlgPoly>, index: usize, t: GaussianRational, value: AlgPoly },
    /// Numerical leaf integration; never exact.
    NumericLeaf { max_generator: f64, time: f64, steps: usize },
    /// A curve through the point, tangent to the field, leaving the singular set.
    Separatrix { curve: Vec<AlgPoly>, index: usize, pullback: AlgPoly },
    /// Derived from other ledger entries.
    Support { ids: Vec<usize> },
    TransversalCertificate(TransversalityCertificate),
    TransversalWitness(WitnessArc),
    Failure(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub point: Vec<Value>,
    pub class: Class,
    pub status: Status,
    pub grade: Grade,
    pub evidence: Evidence,
    /// The No side covers the whole auto-enumerated space and the input asserts
    /// that no other submanifold needs consideration.
    pub exhaustive: bool,
    pub note: String,
}

impl Verdict {
    pub fn exact(point: &[Value], class: Class, status: Status, evidence: Evidence) -> Self {
        Verdict {
            point: point.to_vec(),
            class,
            status,
            grade: Grade::Exact,
            evidence,
            exhaustive: false,
            note: String::new(),
        }
    }

    pub fn unknown(point: &[Value], class: Class, note: impl Into<String>) -> Self {
        Verdict {
            point: point.to_vec(),
            class,
            status: Status::Unknown,
            grade: Grade::Exact,
            evidence: Evidence::None,
            exhaustive: false,
            note: note.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn is_yes(&self) -> bool {
        self.status == Status::CertifiedYes
    }

    pub fn is_no(&self) -> bool {
        self.status == Status::CertifiedNo
    }
}

/// Append-only list of verdicts; an entry's id is its index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ledger {
    pub entries: Vec<Verdict>,
}

impl Ledger {
    pub fn push(&mut self, v: Verdict) -> usize {
        self.entries.push(v);
        self.entries.len() - 1
    }

    pub fn get(&self, id: usize) -> Option<&Verdict> {
        self.entries.get(id)
    }

    /// Appends another ledger, shifting its internal references.
    pub fn append(&mut self, other: Ledger) -> usize {
        let offset = self.entries.len();
        for mut v in other.entries {
            if let Evidence::Support { ids } = &mut v.evidence {
                for id in ids.iter_mut() {
                    *id += offset;
                }
            }
            self.entries.push(v);
        }
        offset
    }

    pub fn at_point<'a>(&'a self, p: &'a [Value]) -> impl Iterator<Item = (usize, &'a Verdict)> + 'a {
        self.entries.iter().enumerate().filter(move |(_, v)| v.point == p)
    }

    pub fn find<'a>(&'a self, p: &'a [Value], class: &Class) -> Option<(usize, &'a Verdict)> {
        self.at_point(p).find(|(_, v)| &v.class == class)
    }

    pub fn points(&self) -> Vec<Vec<Value>> {
        let mut out: Vec<Vec<Value>> = Vec::new();
        for v in &self.entries {
            if !out.contains(&v.point) {
                out.push(v.point.clone());
            }
        }
        out
    }
}
