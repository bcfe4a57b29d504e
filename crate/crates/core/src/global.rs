//! Projection of global types, the merge operator, consumption of
//! communications and the reduction of global types.
//!
//! Projection onto a third party merges its views of all branches. Inside
//! a recursion a view may be the bare variable `t` (the branch loops back
//! without involving the participant); such views are carried as pending
//! variables and resolved at the binder, so that `mu t. (T merged with t)`
//! projects to `mu t. T`. Merging two intersections from the same sender
//! also accepts shared labels whose branches coincide, which keeps
//! projection stable under unfolding of the global type.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    regular_tree_eq, Branch, GlobalType, Label, Participant, Polarity, Recursive, SessionType, TypeVar,
};

/// The communication `sender --label--> receiver`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CommAction {
    pub sender: Participant,
    pub label: Label,
    pub receiver: Participant,
}

impl CommAction {
    pub fn new(sender: impl Into<Participant>, label: impl Into<Label>, receiver: impl Into<Participant>) -> Self {
        Self { sender: sender.into(), label: label.into(), receiver: receiver.into() }
    }
}

impl fmt::Display for CommAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --{}--> {}", self.sender, self.label, self.receiver)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("merge of `{left}` and `{right}` is undefined")]
pub struct MergeUndefined {
    pub left: SessionType,
    pub right: SessionType,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("projection onto {participant} undefined at {}: {source}", show_path(path))]
    MergeUndefined {
        participant: Participant,
        path: Vec<Label>,
        source: MergeUndefined,
    },
    #[error("projection onto {participant} leaves `{var}` unguarded at {}", show_path(path))]
    UnguardedResult {
        participant: Participant,
        var: TypeVar,
        path: Vec<Label>,
    },
}

fn show_path(path: &[Label]) -> String {
    if path.is_empty() {
        "the root".to_string()
    } else {
        let labels: Vec<&str> = path.iter().map(Label::as_str).collect();
        format!("branch path {}", labels.join("."))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("consumption of {0} is undefined")]
pub struct ConsumeUndefined(pub CommAction);

/// The partial merge of two views of one participant: defined on equal
/// types, and on input intersections from one sender whose shared labels
/// carry equal branches.
pub fn merge(left: &SessionType, right: &SessionType) -> Result<SessionType, MergeUndefined> {
    if regular_tree_eq(left, right) {
        return Ok(left.clone());
    }
    let undefined = || MergeUndefined { left: left.clone(), right: right.clone() };
    let (a, b) = (left.unfold_head(), right.unfold_head());
    match (&a, &b) {
        (
            SessionType::Comm { polarity: Polarity::In, peer: p, branches: xs },
            SessionType::Comm { polarity: Polarity::In, peer: q, branches: ys },
        ) if p == q => {
            let mut branches = xs.clone();
            for y in ys {
                match a.branch(&y.label) {
                    Some(x) if x.sort == y.sort && regular_tree_eq(&x.cont, &y.cont) => {}
                    Some(_) => return Err(undefined()),
                    None => branches.push(y.clone()),
                }
            }
            SessionType::intersection(p.clone(), branches).map_err(|_| undefined())
        }
        _ => Err(undefined()),
    }
}

/// A projected view: the merge of `core` with the bare variables in
/// `pending`.
#[derive(Clone, Debug)]
struct View {
    core: Option<SessionType>,
    pending: BTreeSet<TypeVar>,
}

impl View {
    fn plain(t: SessionType) -> Self {
        Self { core: Some(t), pending: BTreeSet::new() }
    }
}

struct Projector<'a> {
    target: &'a Participant,
    path: Vec<Label>,
    /// Enclosing binders and whether the target occurs in their trees.
    binders: Vec<(TypeVar, bool)>,
}

impl Projector<'_> {
    fn merge_error(&self, source: MergeUndefined) -> ProjectionError {
        ProjectionError::MergeUndefined { participant: self.target.clone(), path: self.path.clone(), source }
    }

    /// Turns a view into a session type; a view with pending variables
    /// is only allowed when it is a lone variable.
    fn settle(&self, view: View) -> Result<SessionType, ProjectionError> {
        let mut pending = view.pending.into_iter();
        match (view.core, pending.next(), pending.next()) {
            (Some(core), None, _) => Ok(core),
            (None, Some(t), None) => Ok(SessionType::Var(t)),
            (core, Some(t), rest) => {
                let left = core.unwrap_or_else(|| SessionType::Var(rest.expect("two pending variables")));
                Err(self.merge_error(MergeUndefined { left, right: SessionType::Var(t) }))
            }
            (None, None, _) => unreachable!("views are never empty"),
        }
    }

    fn project(&mut self, g: &GlobalType) -> Result<View, ProjectionError> {
        match g {
            GlobalType::End => Ok(View::plain(SessionType::End)),
            GlobalType::Var(t) => Ok(View { core: None, pending: BTreeSet::from([t.clone()]) }),
            GlobalType::Rec(t, body) => {
                // The target occurs in the tree of `mu t. body` if it occurs
                // in `body` or in the tree of a binder `body` jumps back to.
                let occurs = body.participants().contains(self.target)
                    || body.free_vars().iter().any(|v| {
                        v != t && self.binders.iter().rev().find(|(w, _)| w == v).is_some_and(|(_, o)| *o)
                    });
                if !occurs {
                    return Ok(View::plain(SessionType::End));
                }
                self.binders.push((t.clone(), true));
                let view = self.project(body);
                self.binders.pop();
                let mut view = view?;
                view.pending.remove(t);
                match view.core {
                    Some(core) => {
                        let core = if core.has_free(t) { SessionType::Rec(t.clone(), Box::new(core)) } else { core };
                        Ok(View { core: Some(core), pending: view.pending })
                    }
                    None if view.pending.is_empty() => Err(ProjectionError::UnguardedResult {
                        participant: self.target.clone(),
                        var: t.clone(),
                        path: self.path.clone(),
                    }),
                    None => Ok(view),
                }
            }
            GlobalType::Comm { from, to, branches } => {
                if self.target == from || self.target == to {
                    let (polarity, peer) =
                        if self.target == from { (Polarity::Out, to) } else { (Polarity::In, from) };
                    let mut projected = Vec::with_capacity(branches.len());
                    for b in branches {
                        self.path.push(b.label.clone());
                        let view = self.project(&b.cont)?;
                        let cont = self.settle(view)?;
                        self.path.pop();
                        projected.push(Branch { label: b.label.clone(), sort: b.sort, cont });
                    }
                    return Ok(View::plain(SessionType::Comm { polarity, peer: peer.clone(), branches: projected }));
                }
                let mut merged: Option<View> = None;
                for b in branches {
                    self.path.push(b.label.clone());
                    let view = self.project(&b.cont)?;
                    self.path.pop();
                    merged = Some(match merged {
                        None => view,
                        Some(acc) => {
                            let core = match (acc.core, view.core) {
                                (Some(x), Some(y)) => Some(merge(&x, &y).map_err(|e| self.merge_error(e))?),
                                (x, y) => x.or(y),
                            };
                            let mut pending = acc.pending;
                            pending.extend(view.pending);
                            View { core, pending }
                        }
                    });
                }
                Ok(merged.expect("branch lists are nonempty"))
            }
        }
    }
}

/// The projection `g` restricted to `r`.
pub fn project(g: &GlobalType, r: &Participant) -> Result<SessionType, ProjectionError> {
    let mut projector = Projector { target: r, path: Vec::new(), binders: Vec::new() };
    let view = projector.project(g)?;
    projector.settle(view)
}

/// Projections onto every participant of `g`.
pub fn project_all(g: &GlobalType) -> Result<Vec<(Participant, SessionType)>, ProjectionError> {
    g.participants().into_iter().map(|p| project(g, &p).map(|t| (p, t))).collect()
}

pub fn is_projectable(g: &GlobalType) -> bool {
    project_all(g).is_ok()
}

/// The global type left after the communication `a`. A recursion is
/// unfolded before consuming; revisiting the same recursion on one path
/// without finding `a` makes the consumption undefined.
pub fn consume(g: &GlobalType, a: &CommAction) -> Result<GlobalType, ConsumeUndefined> {
    consume_in(g, a, &mut Vec::new())
}

fn consume_in(g: &GlobalType, a: &CommAction, seen: &mut Vec<GlobalType>) -> Result<GlobalType, ConsumeUndefined> {
    match g {
        GlobalType::Comm { from, to, branches } => {
            if *from == a.sender && *to == a.receiver {
                if let Some(b) = g.branch(&a.label) {
                    return Ok(b.cont.clone());
                }
            }
            let mut out = Vec::with_capacity(branches.len());
            for b in branches {
                out.push(Branch { label: b.label.clone(), sort: b.sort, cont: consume_in(&b.cont, a, seen)? });
            }
            Ok(GlobalType::Comm { from: from.clone(), to: to.clone(), branches: out })
        }
        GlobalType::Rec(..) => {
            if seen.contains(g) {
                return Err(ConsumeUndefined(a.clone()));
            }
            seen.push(g.clone());
            let result = consume_in(&g.unfold(), a, seen);
            seen.pop();
            result
        }
        GlobalType::Var(_) | GlobalType::End => Err(ConsumeUndefined(a.clone())),
    }
}

/// Every reduction `g => g \ a`. The candidate actions are those on the
/// frontier of `g`: communications not preceded, on their path, by
/// another communication of the same sender or receiver.
pub fn global_step(g: &GlobalType) -> Vec<(CommAction, GlobalType)> {
    let mut actions = BTreeSet::new();
    frontier(g, &mut Vec::new(), &mut Vec::new(), &mut actions);
    actions
        .into_iter()
        .filter_map(|a| consume(g, &a).ok().map(|next| (a, next)))
        .collect()
}

fn frontier(g: &GlobalType, busy: &mut Vec<Participant>, seen: &mut Vec<GlobalType>, out: &mut BTreeSet<CommAction>) {
    match g {
        GlobalType::Comm { from, to, branches } => {
            let free = !busy.contains(from) && !busy.contains(to);
            if free {
                for b in branches {
                    out.insert(CommAction { sender: from.clone(), label: b.label.clone(), receiver: to.clone() });
                }
            }
            let before = busy.len();
            busy.push(from.clone());
            busy.push(to.clone());
            for b in branches {
                frontier(&b.cont, busy, seen, out);
            }
            busy.truncate(before);
        }
        GlobalType::Rec(..) => {
            if !seen.contains(g) {
                seen.push(g.clone());
                frontier(&g.unfold(), busy, seen, out);
                seen.pop();
            }
        }
        GlobalType::Var(_) | GlobalType::End => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_global_type, parse_session_type};
    use crate::syntax::Sort;

    fn g(text: &str) -> GlobalType {
        parse_global_type(text).unwrap()
    }

    fn t(text: &str) -> SessionType {
        parse_session_type(text).unwrap()
    }

    fn p(name: &str) -> Participant {
        Participant::new(name)
    }

    #[test]
    fn inner_loops_that_return_to_outer_ones_involve_their_participants() {
        // `p` is absent from the inner body but reached again through `t0`.
        let global = g("mu t0. p -> s : l2(int). q -> s : l2(int). \
                        mu t1. q -> r : { l1(nat). end, l2(int). t1, l3(int). t0 }");
        assert!(project(&global, &Participant::new("p")).is_err());
        let global = g("mu t0. p -> s : l2(int). mu t1. q -> r : { l1(nat). t1, l3(int). t0 }");
        assert_eq!(project(&global, &Participant::new("p")).unwrap(), t("mu t0. s!l2(int).t0"));
        let global = g("mu t0. p -> q : l1(int). mu t1. q -> r : l1(nat). t0");
        assert_eq!(project(&global, &Participant::new("p")).unwrap(), t("mu t0. q!l1(int).t0"));
    }

    #[test]
    fn merge_cases() {
        assert_eq!(merge(&SessionType::End, &SessionType::End), Ok(SessionType::End));
        assert_eq!(
            merge(&t("q?l3(int).end"), &t("q?l5(nat).end")),
            Ok(t("q?l3(int).end & q?l5(nat).end"))
        );
        assert!(merge(&t("q!l(int).end"), &SessionType::End).is_err());
        assert!(merge(&t("q?l(int).end"), &t("q?l(nat).end")).is_err());
        assert!(merge(&t("q?a(int).end"), &t("r?b(int).end")).is_err());
        // Shared labels with equal branches are absorbed.
        assert_eq!(
            merge(&t("q?a(int).end & q?b(nat).end"), &t("q?a(int).end")),
            Ok(t("q?a(int).end & q?b(nat).end"))
        );
    }

    #[test]
    fn third_party_projection() {
        let global = g("p -> q : { l1(nat). q -> r : l3(int). end, l2(bool). q -> r : l5(nat). end }");
        assert_eq!(project(&global, &p("r")), Ok(t("q?l3(int).end & q?l5(nat).end")));
        assert_eq!(project(&global, &p("p")), Ok(t("q!l1(nat).end \\/ q!l2(bool).end")));
        assert_eq!(project(&GlobalType::End, &p("p")), Ok(SessionType::End));
    }

    #[test]
    fn merge_failure_reports_path() {
        let global = g("p -> q : { a(nat). r -> p : b(int). end, c(int). end }");
        match project(&global, &p("r")) {
            Err(ProjectionError::MergeUndefined { path, .. }) => assert!(path.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
        let nested = g("s -> p : x(nat). p -> q : { a(nat). r -> p : b(int). end, c(int). end }");
        let err = project(&nested, &p("r")).unwrap_err();
        assert!(err.to_string().contains("branch path x"), "{err}");
    }

    #[test]
    fn recursion_projection() {
        let global = g("mu t. p -> q : l(nat). t");
        assert_eq!(project(&global, &p("p")), Ok(t("mu t. q!l(nat).t")));
        assert_eq!(project(&global, &p("r")), Ok(SessionType::End));
    }

    #[test]
    fn loop_exit_seen_by_a_third_party() {
        let global = g("mu t. p -> q : { stop(nat). q -> r : done(int). end, more(nat). t }");
        assert_eq!(project(&global, &p("r")), Ok(t("q?done(int).end")));
        // Unfolded once, the projection is the same tree.
        let unfolded = global.unfold();
        assert_eq!(project(&unfolded, &p("r")), project(&global, &p("r")));
    }

    #[test]
    fn pending_variable_under_a_prefix_is_rejected() {
        let global = g("mu t. p -> q : a(nat). q -> r : x(int). p -> q : { b(nat). t, c(nat). q -> r : y(int). end }");
        assert!(project(&global, &p("r")).is_err());
    }

    #[test]
    fn consumption() {
        let global = g("p -> q : { l1(nat). q -> r : a(int). end, l2(bool). end }");
        assert_eq!(
            consume(&global, &CommAction::new("p", "l1", "q")),
            Ok(g("q -> r : a(int). end"))
        );
        assert!(consume(&GlobalType::End, &CommAction::new("p", "l", "q")).is_err());
        let independent = g("r -> s : l(nat). p -> q : m(int). end");
        assert_eq!(
            consume(&independent, &CommAction::new("p", "m", "q")),
            Ok(GlobalType::message("r", "s", "l", Sort::Nat, GlobalType::End))
        );
        let looping = g("mu t. p -> q : l(nat). t");
        assert_eq!(consume(&looping, &CommAction::new("p", "l", "q")), Ok(looping.clone()));
        assert!(consume(&looping, &CommAction::new("q", "l", "p")).is_err());
    }

    #[test]
    fn global_steps() {
        assert!(global_step(&GlobalType::End).is_empty());
        let single = g("p -> q : l1(nat). end");
        assert_eq!(global_step(&single), vec![(CommAction::new("p", "l1", "q"), GlobalType::End)]);
        let seq = g("cl -> add : l1(int). cl -> add : l2(int). end");
        let steps = global_step(&seq);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, CommAction::new("cl", "l1", "add"));
        let par = g("p -> q : a(nat). r -> s : b(nat). end");
        assert_eq!(global_step(&par).len(), 2);
    }
}
