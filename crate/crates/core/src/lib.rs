pub mod cli;
pub mod document;
pub mod dot;
pub mod fo;
pub mod graph;
pub mod ho;
pub mod report;
pub mod sharing;
pub mod term;
pub mod transform;
pub mod translate;

pub use fo::{EagerMode, FoError, FoLambdaGraph, Traversal};
pub use graph::{GraphError, Label, Path, Signature, TermGraph, VertexId, VertexMap};
pub use ho::{ApHoTermGraph, HoError, HoTermGraph, Prefix, PrefixFn, ScopeFn};
pub use report::{Condition, ValidationReport, Violation};
