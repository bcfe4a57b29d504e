//! Algorithmic typing of processes against session types and of sessions
//! against global types. Subsumption is folded into the rules.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::expr::{infer_sort, join, subsort, ExprError};
use crate::global::{project, ProjectionError};
use crate::graph::{Node, NodeId, TypeGraph};
use crate::subtype::sub_nodes;
use crate::syntax::{
    fresh_name, regular_tree_eq, Branch, Expr, GlobalType, Label, Participant, Polarity, ProcVar, Process, Recursive,
    Session, SessionType, Sort, TypeVar, Var,
};

/// The type a loop was entered at: a node of the checked type, or a
/// type built during synthesis.
#[derive(Clone, Debug, PartialEq, Eq)]
enum LoopType {
    Node(NodeId),
    Type(SessionType),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct LoopBinding {
    ty: LoopType,
    /// Sorts of the free variables of the loop body when it was entered.
    snapshot: Vec<(Var, Sort)>,
}

/// Typing environment: sorts of expression variables and the types of
/// recursion variables. Extension returns a new environment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    vars: BTreeMap<Var, Sort>,
    loops: BTreeMap<ProcVar, LoopBinding>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_var(&self, x: Var, s: Sort) -> Self {
        let mut next = self.clone();
        next.vars.insert(x, s);
        next
    }

    pub fn sort_of(&self, x: &Var) -> Option<Sort> {
        self.vars.get(x).copied()
    }

    fn with_loop(&self, x: &ProcVar, body: &Process, ty: LoopType) -> Self {
        let snapshot = body.free_vars().into_iter().filter_map(|v| self.sort_of(&v).map(|s| (v, s))).collect();
        let mut next = self.clone();
        next.loops.insert(x.clone(), LoopBinding { ty, snapshot });
        next
    }
}

/// What went wrong, with the rule that failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    /// The process shape does not fit the head of the expected type.
    Shape { rule: &'static str, expected: SessionType },
    /// The type offers an input label no summand handles.
    UncoveredLabel(Label),
    /// Two summands of an external choice receive the same label.
    DuplicateLabel(Label),
    /// The output label is not among those the type allows.
    LabelNotAllowed(Label),
    PayloadSort { label: Label, found: Sort, expected: Sort },
    Expr { rule: &'static str, error: ExprError },
    UnboundProcVar(ProcVar),
    /// The loop type is not a subtype of the type expected at the jump.
    LoopNotSubtype { var: ProcVar, bound: SessionType, expected: SessionType },
    /// A variable the loop body reads was rebound at a wider sort.
    LoopVarWidened { var: Var, now: Sort, before: Sort },
    NoSort(Var),
    IllegalUnion(SessionType, SessionType),
    IllegalIntersection(Label),
    UnguardedLoop(ProcVar),
    ParticipantMissing(Participant),
    Projection(ProjectionError),
}

impl TypeErrorKind {
    pub fn rule(&self) -> &'static str {
        match self {
            TypeErrorKind::Shape { rule, .. } | TypeErrorKind::Expr { rule, .. } => rule,
            TypeErrorKind::UncoveredLabel(_)
            | TypeErrorKind::DuplicateLabel(_)
            | TypeErrorKind::NoSort(_)
            | TypeErrorKind::IllegalIntersection(_) => "t-in-choice",
            TypeErrorKind::LabelNotAllowed(_) | TypeErrorKind::PayloadSort { .. } => "t-out",
            TypeErrorKind::UnboundProcVar(_)
            | TypeErrorKind::LoopNotSubtype { .. }
            | TypeErrorKind::LoopVarWidened { .. } => "t-var",
            TypeErrorKind::IllegalUnion(..) => "t-cond",
            TypeErrorKind::UnguardedLoop(_) => "t-rec",
            TypeErrorKind::ParticipantMissing(_) | TypeErrorKind::Projection(_) => "t-sess",
        }
    }
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::Shape { expected, .. } => write!(f, "process does not fit `{expected}`"),
            TypeErrorKind::UncoveredLabel(l) => write!(f, "the type offers `{l}` but no summand receives it"),
            TypeErrorKind::DuplicateLabel(l) => write!(f, "two summands receive `{l}`"),
            TypeErrorKind::LabelNotAllowed(l) => write!(f, "the type does not allow sending `{l}`"),
            TypeErrorKind::PayloadSort { label, found, expected } => {
                write!(f, "payload of `{label}` has sort {found}, expected {expected}")
            }
            TypeErrorKind::Expr { error, .. } => write!(f, "{error}"),
            TypeErrorKind::UnboundProcVar(x) => write!(f, "unbound recursion variable `{x}`"),
            TypeErrorKind::LoopNotSubtype { var, bound, expected } => {
                write!(f, "`{var}` has type `{bound}`, which is not a subtype of `{expected}`")
            }
            TypeErrorKind::LoopVarWidened { var, now, before } => {
                write!(f, "loop reads `{var}` at {before} but it is now bound at {now}")
            }
            TypeErrorKind::NoSort(x) => write!(f, "no sort for `{x}` makes the body typable"),
            TypeErrorKind::IllegalUnion(a, b) => write!(f, "branches have types `{a}` and `{b}` with no join"),
            TypeErrorKind::IllegalIntersection(l) => write!(f, "label `{l}` is received twice"),
            TypeErrorKind::UnguardedLoop(x) => write!(f, "loop `{x}` has no communication before jumping"),
            TypeErrorKind::ParticipantMissing(p) => write!(f, "participant `{p}` of the protocol is missing"),
            TypeErrorKind::Projection(e) => write!(f, "{e}"),
        }
    }
}

/// A typing failure at a position in the checked term.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeError {
    /// Steps from the root: `@p`, prefixes, `then`, `else`, `mu X`.
    pub path: Vec<String>,
    pub kind: TypeErrorKind,
}

impl TypeError {
    fn new(kind: TypeErrorKind) -> Self {
        Self { path: Vec::new(), kind }
    }

    fn within(mut self, step: impl Into<String>) -> Self {
        self.path.insert(0, step.into());
        self
    }

    pub fn rule(&self) -> &'static str {
        self.kind.rule()
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() { "top".to_string() } else { self.path.join(" / ") };
        write!(f, "[{}] at {at}: {}", self.rule(), self.kind)
    }
}

fn step_of(p: &Process) -> String {
    match p {
        Process::Input { from, label, var, .. } => format!("{from}?{label}({var})"),
        Process::Output { to, label, .. } => format!("{to}!{label}"),
        Process::Rec(x, _) => format!("mu {x}"),
        _ => String::new(),
    }
}

fn expr_error(rule: &'static str, error: ExprError) -> TypeError {
    TypeError::new(TypeErrorKind::Expr { rule, error })
}

fn check_cond(env: &Env, cond: &Expr) -> Result<(), TypeError> {
    let found = infer_sort(env, cond).map_err(|e| expr_error("t-cond", e))?;
    if found != Sort::Bool {
        return Err(expr_error("t-cond", ExprError::SortMismatch { expr: cond.clone(), found, expected: Sort::Bool }));
    }
    Ok(())
}

fn check_jump<'a>(env: &'a Env, x: &ProcVar) -> Result<&'a LoopType, TypeError> {
    let binding = env.loops.get(x).ok_or_else(|| TypeError::new(TypeErrorKind::UnboundProcVar(x.clone())))?;
    for (v, before) in &binding.snapshot {
        if let Some(now) = env.sort_of(v) {
            if !subsort(now, *before) {
                return Err(TypeError::new(TypeErrorKind::LoopVarWidened { var: v.clone(), now, before: *before }));
            }
        }
    }
    Ok(&binding.ty)
}

/// Checks `env ⊢ p : t`.
pub fn check_process(env: &Env, p: &Process, t: &SessionType) -> Result<(), TypeError> {
    if !t.is_closed() || t.check_guarded().is_err() {
        return Err(TypeError::new(TypeErrorKind::Shape { rule: "t-var", expected: t.clone() }));
    }
    let mut graph = TypeGraph::new();
    let root = graph.add(t);
    Checker { graph }.check(env, p, root)
}

/// Checking against the nodes of one type graph, so that unfolding is
/// free and loop jumps compare nodes rather than unrolled terms.
struct Checker {
    graph: TypeGraph,
}

impl Checker {
    fn shape(&self, rule: &'static str, n: NodeId) -> TypeError {
        TypeError::new(TypeErrorKind::Shape { rule, expected: self.graph.term(n) })
    }

    fn check(&mut self, env: &Env, p: &Process, n: NodeId) -> Result<(), TypeError> {
        match p {
            Process::Inact => match self.graph.node(n) {
                Node::End => Ok(()),
                _ => Err(self.shape("t-0", n)),
            },
            Process::Input { .. } | Process::Choice(_) => self.check_inputs(env, p, n),
            Process::Output { to, label, payload, body } => {
                let step = || step_of(p);
                let Node::Comm { polarity: Polarity::Out, peer, branches } = self.graph.node(n) else {
                    return Err(self.shape("t-out", n));
                };
                if peer != to {
                    return Err(self.shape("t-out", n));
                }
                let Some(&(_, sort, cont)) = branches.iter().find(|(l, ..)| l == label) else {
                    return Err(TypeError::new(TypeErrorKind::LabelNotAllowed(label.clone())));
                };
                let found = infer_sort(env, payload).map_err(|e| expr_error("t-out", e).within(step()))?;
                if !subsort(found, sort) {
                    let kind = TypeErrorKind::PayloadSort { label: label.clone(), found, expected: sort };
                    return Err(TypeError::new(kind).within(step()));
                }
                self.check(env, body, cont).map_err(|e| e.within(step()))
            }
            Process::If { cond, then_branch, else_branch } => {
                check_cond(env, cond)?;
                self.check(env, then_branch, n).map_err(|e| e.within("then"))?;
                self.check(env, else_branch, n).map_err(|e| e.within("else"))
            }
            Process::Rec(x, body) => {
                let direct =
                    self.check(&env.with_loop(x, body, LoopType::Node(n)), body, n).map_err(|e| e.within(step_of(p)));
                // The loop may only fit `t` through a subtype that unrolls differently.
                match direct {
                    Err(e) => match Synth::within(&self.graph).run(env, p) {
                        Ok(found) if found.is_closed() => {
                            let m = self.graph.add(&found);
                            if sub_nodes(&self.graph, m, n) {
                                Ok(())
                            } else {
                                Err(e)
                            }
                        }
                        _ => Err(e),
                    },
                    ok => ok,
                }
            }
            Process::Var(x) => {
                let bound = match check_jump(env, x)? {
                    LoopType::Node(m) => *m,
                    LoopType::Type(ty) if ty.is_closed() => self.graph.add(ty),
                    LoopType::Type(ty) => {
                        let kind = TypeErrorKind::LoopNotSubtype {
                            var: x.clone(),
                            bound: ty.clone(),
                            expected: self.graph.term(n),
                        };
                        return Err(TypeError::new(kind));
                    }
                };
                if sub_nodes(&self.graph, bound, n) {
                    Ok(())
                } else {
                    let kind = TypeErrorKind::LoopNotSubtype {
                        var: x.clone(),
                        bound: self.graph.term(bound),
                        expected: self.graph.term(n),
                    };
                    Err(TypeError::new(kind))
                }
            }
        }
    }

    /// External choices and single inputs: every label of the type needs a
    /// summand, the remaining summands must be typable on their own.
    fn check_inputs(&mut self, env: &Env, p: &Process, n: NodeId) -> Result<(), TypeError> {
        let Node::Comm { polarity: Polarity::In, peer, branches } = self.graph.node(n) else {
            return Err(self.shape("t-in-choice", n));
        };
        let (peer, branches) = (peer.clone(), branches.clone());
        let mut seen = BTreeSet::new();
        for s in p.summands() {
            let Process::Input { from, label, .. } = s else { return Err(self.shape("t-in-choice", n)) };
            if *from != peer {
                return Err(self.shape("t-in-choice", n));
            }
            if !seen.insert(label.clone()) {
                return Err(TypeError::new(TypeErrorKind::DuplicateLabel(label.clone())));
            }
        }
        if let Some((l, ..)) = branches.iter().find(|(l, ..)| !seen.contains(l)) {
            return Err(TypeError::new(TypeErrorKind::UncoveredLabel(l.clone())));
        }
        for s in p.summands() {
            let Process::Input { label, var, body, .. } = s else { unreachable!() };
            match branches.iter().find(|(l, ..)| l == label) {
                Some(&(_, sort, cont)) => self.check(&env.with_var(var.clone(), sort), body, cont),
                None => Synth::within(&self.graph).input(env, var, body).map(|_| ()),
            }
            .map_err(|e| e.within(step_of(s)))?;
        }
        Ok(())
    }
}

/// A type `t` with `env ⊢ p : t`, as small as the search finds.
pub fn synthesize_process(env: &Env, p: &Process) -> Result<SessionType, TypeError> {
    Synth { counter: 0, graph: None }.run(env, p)
}

struct Synth<'g> {
    counter: usize,
    /// Resolves loops entered while checking.
    graph: Option<&'g TypeGraph>,
}

/// Input sorts tried during synthesis, widest first.
const INPUT_SORTS: [Sort; 3] = [Sort::Int, Sort::Bool, Sort::Nat];

impl<'g> Synth<'g> {
    fn within(graph: &'g TypeGraph) -> Self {
        Synth { counter: 0, graph: Some(graph) }
    }

    fn input(&mut self, env: &Env, var: &Var, body: &Process) -> Result<(Sort, SessionType), TypeError> {
        let mut first_error = None;
        for s in INPUT_SORTS {
            match self.run(&env.with_var(var.clone(), s), body) {
                Ok(t) => return Ok((s, t)),
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
        match first_error {
            Some(e) if !matches!(e.kind, TypeErrorKind::Expr { .. }) => Err(e),
            _ => Err(TypeError::new(TypeErrorKind::NoSort(var.clone()))),
        }
    }

    fn run(&mut self, env: &Env, p: &Process) -> Result<SessionType, TypeError> {
        match p {
            Process::Inact => Ok(SessionType::End),
            Process::Input { .. } | Process::Choice(_) => {
                let mut peer_of = None;
                let mut branches = Vec::new();
                for s in p.summands() {
                    let Process::Input { from, label, var, body } = s else {
                        let kind = TypeErrorKind::Shape { rule: "t-in-choice", expected: SessionType::End };
                        return Err(TypeError::new(kind));
                    };
                    if *peer_of.get_or_insert(from) != from {
                        let kind = TypeErrorKind::Shape { rule: "t-in-choice", expected: SessionType::End };
                        return Err(TypeError::new(kind));
                    }
                    if branches.iter().any(|b: &Branch<SessionType>| b.label == *label) {
                        return Err(TypeError::new(TypeErrorKind::IllegalIntersection(label.clone())));
                    }
                    let (sort, cont) = self.input(env, var, body).map_err(|e| e.within(step_of(s)))?;
                    branches.push(Branch::new(label.clone(), sort, cont));
                }
                let peer = peer_of.expect("choice has summands").clone();
                Ok(SessionType::intersection(peer, branches).expect("labels are distinct"))
            }
            Process::Output { to, label, payload, body } => {
                let sort = infer_sort(env, payload).map_err(|e| expr_error("t-out", e).within(step_of(p)))?;
                let cont = self.run(env, body).map_err(|e| e.within(step_of(p)))?;
                Ok(SessionType::output(to.clone(), label.clone(), sort, cont))
            }
            Process::If { cond, then_branch, else_branch } => {
                check_cond(env, cond)?;
                let a = self.run(env, then_branch).map_err(|e| e.within("then"))?;
                let b = self.run(env, else_branch).map_err(|e| e.within("else"))?;
                join_types(&a, &b).ok_or_else(|| TypeError::new(TypeErrorKind::IllegalUnion(a, b)))
            }
            Process::Rec(x, body) => {
                let t = TypeVar::new(format!("s{}", self.counter));
                self.counter += 1;
                let inner = self
                    .run(&env.with_loop(x, body, LoopType::Type(SessionType::Var(t.clone()))), body)
                    .map_err(|e| e.within(step_of(p)))?;
                if !inner.has_free(&t) {
                    return Ok(inner);
                }
                let ty = SessionType::rec(t, inner);
                match ty.check_guarded() {
                    Ok(()) => Ok(ty),
                    Err(_) => Err(TypeError::new(TypeErrorKind::UnguardedLoop(x.clone())).within(step_of(p))),
                }
            }
            Process::Var(x) => match check_jump(env, x)? {
                LoopType::Type(ty) => Ok(ty.clone()),
                LoopType::Node(n) => Ok(self.graph.expect("loop nodes come from a checked type").term(*n)),
            },
        }
    }
}

/// Least upper bound of two types: unions merge their labels, while
/// intersections keep the common ones.
pub fn join_types(a: &SessionType, b: &SessionType) -> Option<SessionType> {
    let mut avoid = a.free_vars();
    avoid.extend(b.free_vars());
    Joiner { memo: HashMap::new(), used: BTreeSet::new(), avoid }.join(a, b)
}

struct Joiner {
    memo: HashMap<(SessionType, SessionType), TypeVar>,
    used: BTreeSet<TypeVar>,
    avoid: BTreeSet<TypeVar>,
}

impl Joiner {
    fn join(&mut self, a: &SessionType, b: &SessionType) -> Option<SessionType> {
        if regular_tree_eq(a, b) {
            return Some(a.clone());
        }
        let (ua, ub) = (a.unfold_head(), b.unfold_head());
        let key = (ua.clone(), ub.clone());
        if let Some(v) = self.memo.get(&key) {
            self.used.insert(v.clone());
            return Some(SessionType::Var(v.clone()));
        }
        let var = TypeVar::new(fresh_name("j", |c| self.avoid.iter().any(|v| v.as_str() == c)));
        self.avoid.insert(var.clone());
        self.memo.insert(key.clone(), var.clone());
        let result = self.join_heads(&ua, &ub);
        self.memo.remove(&key);
        let result = result?;
        Some(if self.used.contains(&var) { SessionType::rec(var, result) } else { result })
    }

    fn join_heads(&mut self, a: &SessionType, b: &SessionType) -> Option<SessionType> {
        let (
            SessionType::Comm { polarity: pa, peer: qa, branches: xs },
            SessionType::Comm { polarity: pb, peer: qb, branches: ys },
        ) = (a, b)
        else {
            return (a.is_end() && b.is_end()).then_some(SessionType::End);
        };
        if pa != pb || qa != qb {
            return None;
        }
        let mut branches = Vec::new();
        match pa {
            Polarity::Out => {
                for x in xs {
                    match b.branch(&x.label) {
                        Some(y) => {
                            let cont = self.join(&x.cont, &y.cont)?;
                            branches.push(Branch::new(x.label.clone(), join(x.sort, y.sort)?, cont));
                        }
                        None => branches.push(x.clone()),
                    }
                }
                branches.extend(ys.iter().filter(|y| a.branch(&y.label).is_none()).cloned());
            }
            Polarity::In => {
                for x in xs {
                    if let Some(y) = b.branch(&x.label) {
                        let sort = if subsort(x.sort, y.sort) {
                            x.sort
                        } else if subsort(y.sort, x.sort) {
                            y.sort
                        } else {
                            return None;
                        };
                        let cont = self.join(&x.cont, &y.cont)?;
                        branches.push(Branch::new(x.label.clone(), sort, cont));
                    }
                }
            }
        }
        SessionType::comm(*pa, qa.clone(), branches).ok()
    }
}

/// Checks a session against a global type: every participant of the
/// protocol is present and each member has its projection as type.
pub fn check_session(m: &Session, g: &GlobalType) -> Result<(), TypeError> {
    for p in g.participants() {
        if m.get(&p).is_none() {
            return Err(TypeError::new(TypeErrorKind::ParticipantMissing(p)));
        }
    }
    for (p, proc_) in m.iter() {
        let step = format!("@{p}");
        let t = project(g, p).map_err(|e| TypeError::new(TypeErrorKind::Projection(e)).within(step.clone()))?;
        check_process(&Env::new(), proc_, &t).map_err(|e| e.within(step))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_global_type, parse_process, parse_session, parse_session_type};

    fn p(text: &str) -> Process {
        parse_process(text).unwrap()
    }

    fn t(text: &str) -> SessionType {
        parse_session_type(text).unwrap()
    }

    fn check(proc_: &str, ty: &str) -> Result<(), TypeError> {
        check_process(&Env::new(), &p(proc_), &t(ty))
    }

    #[test]
    fn basic_rules() {
        assert!(check("0", "end").is_ok());
        assert!(check("add!l1(5).add!l2(4).add?l3(x).0", "add!l1(int).add!l2(int).add?l3(int).end").is_ok());
        let err = check("add!l1(-5).0", "add!l1(nat).end").unwrap_err();
        assert_eq!(err.rule(), "t-out");
        assert!(check("q!a(5).0", "q!a(nat).end \\/ q!b(bool).end").is_ok());
        assert_eq!(check("0", "q!a(nat).end").unwrap_err().rule(), "t-0");
    }

    #[test]
    fn external_choice() {
        let ty = "q?l2(int).end & q?l1(int).q!l5(bool).end";
        assert!(check("q?l1(x).q!l5(true).0 + q?l2(x).0 + q?l3(x).q!l6(not x).0", ty).is_ok());
        let err = check("q?l1(x).0 + q?l2(x).0 + q?l1(x).q!l5(true).0", ty).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::DuplicateLabel(Label::new("l1")));
        let err = check("q?l1(x).q!l5(true).0", ty).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::UncoveredLabel(Label::new("l2")));
        // An uncovered summand that cannot be typed at all.
        assert!(check("q?l1(x).q!l5(true).0 + q?l2(x).0 + q?l3(x).q!l6(not (succ x)).0", ty).is_err());
    }

    #[test]
    fn input_sort_is_taken_from_the_type() {
        assert!(check("p?l(x).if succ x > 0 then 0 else 0", "p?l(nat).end").is_ok());
        let err = check("p?l(x).if succ x > 0 then 0 else 0", "p?l(int).end").unwrap_err();
        assert_eq!(err.path, ["p?l(x)"]);
    }

    #[test]
    fn recursion() {
        assert!(check("mu X. p!a(5).X", "mu t. p!a(int).t").is_ok());
        assert!(check("mu X. p!a(5).X", "mu t. p!a(nat).p!a(int).t").is_ok());
        assert!(check("mu X. p!a(true).X", "mu t. p!a(nat).t").is_err());
        assert!(check("mu X. q?a(x).q!b(x).X", "mu t. q?a(nat).q!b(nat).t").is_ok());
        let nested = "mu X. q!a(1). mu Y. q?b(x).Y + q?c(x).X";
        assert!(check(nested, "mu t. q!a(nat). mu s. q?b(int).s & q?c(int).t").is_ok());
        assert!(check(nested, "mu t. q!a(nat).(q?b(int).t & q?c(int).end)").is_err());
    }

    #[test]
    fn loop_variables_cannot_widen() {
        // The loop body reads `y`, which the inner input rebinds as an int.
        let proc_ = "q?a(y). mu X. q!b(y). q?c(y). X";
        assert!(check(proc_, "q?a(nat). mu t. q!b(nat). q?c(nat). t").is_ok());
        let err = check(proc_, "q?a(nat). mu t. q!b(nat). q?c(int). t").unwrap_err();
        assert_eq!(err.rule(), "t-var");
    }

    #[test]
    fn conditionals() {
        assert!(check("if true (+) false then p!a(5).0 else p!b(true).0", "p!a(nat).end \\/ p!b(bool).end").is_ok());
        assert!(check("if 5 then 0 else 0", "end").is_err());
    }

    #[test]
    fn synthesis() {
        let s = |text: &str| synthesize_process(&Env::new(), &p(text));
        assert_eq!(s("p!l(5).0").unwrap(), t("p!l(nat).end"));
        assert_eq!(s("p?l(x).if not x then 0 else 0").unwrap(), t("p?l(bool).end"));
        assert_eq!(s("p?l(x).0").unwrap(), t("p?l(int).end"));
        assert_eq!(
            s("if true (+) false then p!a(5).0 else p!a(-5).p!b(true).0 ").unwrap_err().rule(),
            "t-cond"
        );
        assert!(regular_tree_eq(
            &s("if true (+) false then p!a(5).0 else p!b(-5).0").unwrap(),
            &t("p!a(nat).end \\/ p!b(int).end")
        ));
        assert!(regular_tree_eq(&s("mu X. p!a(5).X").unwrap(), &t("mu t. p!a(nat).t")));
        assert_eq!(s("mu X. if true then X else X").unwrap_err().rule(), "t-rec");
        assert_eq!(s("q?a(x).0 + q?a(y).0").unwrap_err().rule(), "t-in-choice");
    }

    #[test]
    fn joins() {
        let j = |a: &str, b: &str| join_types(&t(a), &t(b));
        assert_eq!(j("p!a(nat).end", "p!a(int).end"), Some(t("p!a(int).end")));
        assert_eq!(j("p?a(nat).end & p?b(int).end", "p?a(int).end"), Some(t("p?a(nat).end")));
        assert_eq!(j("p?a(nat).end", "p?b(int).end"), None);
        assert_eq!(j("end", "p!a(nat).end"), None);
        let looped = j("mu t. p!a(nat).t", "mu t. p!a(nat).p!a(int).t").unwrap();
        assert!(regular_tree_eq(&looped, &t("mu t. p!a(nat).p!a(int).t")));
    }

    #[test]
    fn sessions() {
        let g = parse_global_type("p -> q : { l1(nat). q -> r : l3(int). end, l2(bool). q -> r : l5(nat). end }").unwrap();
        let m = parse_session("@p q!l1(5).0 || @q p?l1(x).r!l3(-2).0 + p?l2(x).r!l5(3).0 || @r q?l3(y).0 + q?l5(y).0")
            .unwrap();
        assert!(check_session(&m, &g).is_ok());
        let missing = parse_session("@p q!l1(5).0 || @q p?l1(x).r!l3(-2).0 + p?l2(x).r!l5(3).0").unwrap();
        assert_eq!(
            check_session(&missing, &g).unwrap_err().kind,
            TypeErrorKind::ParticipantMissing(Participant::new("r"))
        );
        let extra = parse_session("@p 0 || @s 0").unwrap();
        assert!(check_session(&extra, &GlobalType::End).is_ok());
        let bad = parse_session("@p 0 || @s t!a(1).0").unwrap();
        assert_eq!(check_session(&bad, &GlobalType::End).unwrap_err().path, ["@s"]);
    }
}
