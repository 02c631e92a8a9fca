use std::fmt;

use serde::Serialize;

use crate::graph::{TermGraph, VertexId};

/// A named correctness condition that a validator can report as violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    // scope functions
    ScopeRoot,
    ScopeSelf,
    ScopeNest,
    ScopeClosed,
    Scope0,
    Scope1,
    // abstraction-prefix functions
    PrefixRoot,
    PrefixAbs,
    PrefixApp,
    PrefixVar0,
    PrefixVar1,
    PrefixDel1,
    PrefixDel2,
    PrefixEntries,
    // diagnostics derived from the nesting lemma
    Nesting,
    Dominance,
    // prefix inference
    Conflict,
    Unreached,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::ScopeRoot | Condition::PrefixRoot => "(root)",
            Condition::ScopeSelf => "(self)",
            Condition::ScopeNest => "(nest)",
            Condition::ScopeClosed => "(closed)",
            Condition::Scope0 => "(scope)0",
            Condition::Scope1 => "(scope)1",
            Condition::PrefixAbs => "(λ)",
            Condition::PrefixApp => "(@)",
            Condition::PrefixVar0 => "(0)0",
            Condition::PrefixVar1 => "(0)1",
            Condition::PrefixDel1 => "(S)1",
            Condition::PrefixDel2 => "(S)2",
            Condition::PrefixEntries => "(entries)",
            Condition::Nesting => "(nesting)",
            Condition::Dominance => "(dominance)",
            Condition::Conflict => "(conflict)",
            Condition::Unreached => "(unreached)",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub witnesses: Vec<VertexId>,
}

/// Outcome of a validator: passes iff there are no violations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, condition: Condition, witnesses: impl Into<Vec<VertexId>>) {
        self.violations.push(Violation {
            condition,
            witnesses: witnesses.into(),
        });
    }

    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn violates(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    /// Conditions violated, sorted and without repetition.
    pub fn conditions(&self) -> Vec<Condition> {
        let mut c: Vec<Condition> = self.violations.iter().map(|v| v.condition).collect();
        c.sort();
        c.dedup();
        c
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    /// One line per violation, witnesses printed by vertex name.
    pub fn describe(&self, g: &TermGraph) -> String {
        let mut out = String::new();
        for v in &self.violations {
            let names: Vec<&str> = v
                .witnesses
                .iter()
                .map(|&w| if g.contains(w) { g.name(w) } else { "?" })
                .collect();
            out.push_str(&format!("{} at {}\n", v.condition, names.join(" ")));
        }
        out
    }
}
