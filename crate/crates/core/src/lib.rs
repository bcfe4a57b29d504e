//! A synchronous multiparty session calculus: syntax, expression
//! evaluation, global types and projection, precise subtyping with
//! evidence for its negation, algorithmic typing, an interpreter with
//! stuck-state search, and characteristic constructions that turn a
//! failed subtyping check into a concrete stuck session.

pub mod characteristic;
pub mod expr;
pub mod global;
mod graph;
pub mod parse;
pub mod print;
pub mod runtime;
pub mod subtype;
pub mod syntax;
pub mod typing;

pub use parse::{parse, Category, ParseError, ParseErrorKind, Syntax};
pub use syntax::{
    regular_tree_eq, Branch, Expr, GlobalType, Label, Participant, Polarity, ProcVar, Process, Recursive, Session,
    SessionType, Sort, SyntaxError, TypeVar, Var,
};
pub use expr::{eval_all, infer_sort, subsort, ExprError, Value};
pub use global::{consume, global_step, is_projectable, merge, project, project_all, CommAction, ProjectionError};
pub use subtype::{decide, nsub, sub, sub_stats, NsubDerivation, NsubRule, SubStats, Verdict};
pub use typing::{check_process, check_session, synthesize_process, Env, TypeError, TypeErrorKind};
pub use runtime::{step_all, stuck_search, ReductionTrace, SearchVerdict, SessionState, Step, StuckReport};
pub use characteristic::{char_global, char_proc, counterexample_session, preciseness_check, Outcome};
