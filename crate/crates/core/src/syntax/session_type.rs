use std::collections::BTreeSet;

use super::{
    canonical_branches, find_branch, fresh_name, Branch, Label, Participant, Recursive, Shape, Sort, SyntaxError,
    TypeVar,
};

/// Direction of a communication prefix: `In` builds intersections of
/// inputs, `Out` builds unions of outputs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Polarity {
    In,
    Out,
}

impl Polarity {
    pub fn symbol(self) -> char {
        match self {
            Polarity::In => '?',
            Polarity::Out => '!',
        }
    }

    pub fn connective(self) -> &'static str {
        match self {
            Polarity::In => "&",
            Polarity::Out => "\\/",
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Polarity::In => Polarity::Out,
            Polarity::Out => Polarity::In,
        }
    }
}

/// Local session types. A `Comm` with one branch is a plain prefix; with
/// several it is an intersection (`In`) or union (`Out`). Branches are
/// sorted by label and labels are unique.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SessionType {
    Comm {
        polarity: Polarity,
        peer: Participant,
        branches: Vec<Branch<SessionType>>,
    },
    Rec(TypeVar, Box<SessionType>),
    Var(TypeVar),
    End,
}

impl SessionType {
    pub fn comm(
        polarity: Polarity,
        peer: impl Into<Participant>,
        branches: Vec<Branch<SessionType>>,
    ) -> Result<Self, SyntaxError> {
        Ok(SessionType::Comm {
            polarity,
            peer: peer.into(),
            branches: canonical_branches(branches)?,
        })
    }

    pub fn intersection(peer: impl Into<Participant>, branches: Vec<Branch<SessionType>>) -> Result<Self, SyntaxError> {
        Self::comm(Polarity::In, peer, branches)
    }

    pub fn union(peer: impl Into<Participant>, branches: Vec<Branch<SessionType>>) -> Result<Self, SyntaxError> {
        Self::comm(Polarity::Out, peer, branches)
    }

    pub fn input(peer: impl Into<Participant>, label: impl Into<Label>, sort: Sort, cont: SessionType) -> Self {
        SessionType::Comm {
            polarity: Polarity::In,
            peer: peer.into(),
            branches: vec![Branch::new(label, sort, cont)],
        }
    }

    pub fn output(peer: impl Into<Participant>, label: impl Into<Label>, sort: Sort, cont: SessionType) -> Self {
        SessionType::Comm {
            polarity: Polarity::Out,
            peer: peer.into(),
            branches: vec![Branch::new(label, sort, cont)],
        }
    }

    pub fn rec(var: impl Into<TypeVar>, body: SessionType) -> Self {
        SessionType::Rec(var.into(), Box::new(body))
    }

    pub fn var(var: impl Into<TypeVar>) -> Self {
        SessionType::Var(var.into())
    }

    pub fn is_end(&self) -> bool {
        matches!(self, SessionType::End)
    }

    pub fn branch(&self, label: &Label) -> Option<&Branch<SessionType>> {
        match self {
            SessionType::Comm { branches, .. } => find_branch(branches, label),
            _ => None,
        }
    }

    /// The single-branch prefixes of an intersection or union.
    pub fn components(&self) -> Vec<SessionType> {
        match self {
            SessionType::Comm { polarity, peer, branches } => branches
                .iter()
                .map(|b| SessionType::Comm {
                    polarity: *polarity,
                    peer: peer.clone(),
                    branches: vec![b.clone()],
                })
                .collect(),
            other => vec![other.clone()],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<TypeVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<TypeVar>, out: &mut BTreeSet<TypeVar>) {
        match self {
            SessionType::Comm { branches, .. } => {
                for b in branches {
                    b.cont.collect_free(bound, out);
                }
            }
            SessionType::Rec(t, body) => {
                bound.push(t.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            SessionType::Var(t) => {
                if !bound.contains(t) {
                    out.insert(t.clone());
                }
            }
            SessionType::End => {}
        }
    }

    pub fn has_free(&self, var: &TypeVar) -> bool {
        match self {
            SessionType::Comm { branches, .. } => branches.iter().any(|b| b.cont.has_free(var)),
            SessionType::Rec(t, body) => t != var && body.has_free(var),
            SessionType::Var(t) => t == var,
            SessionType::End => false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Checks that every bound variable occurs under a prefix and that no
    /// variable is free.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        if let Some(t) = self.free_vars().into_iter().next() {
            return Err(SyntaxError::UnboundVariable(t.to_string()));
        }
        self.check_guarded()
    }

    pub fn check_guarded(&self) -> Result<(), SyntaxError> {
        match self {
            SessionType::Comm { branches, .. } => branches.iter().try_for_each(|b| b.cont.check_guarded()),
            SessionType::Rec(t, body) => {
                if body.head_vars().contains(t) {
                    return Err(SyntaxError::UnguardedRecursion(t.to_string()));
                }
                body.check_guarded()
            }
            SessionType::Var(_) | SessionType::End => Ok(()),
        }
    }

    /// Variables reachable from the root without crossing a prefix.
    pub(crate) fn head_vars(&self) -> Vec<TypeVar> {
        match self {
            SessionType::Var(t) => vec![t.clone()],
            SessionType::Rec(s, body) => body.head_vars().into_iter().filter(|t| t != s).collect(),
            _ => Vec::new(),
        }
    }

    /// Participants occurring in the type.
    pub fn participants(&self) -> BTreeSet<Participant> {
        let mut out = BTreeSet::new();
        self.collect_participants(&mut out);
        out
    }

    fn collect_participants(&self, out: &mut BTreeSet<Participant>) {
        match self {
            SessionType::Comm { peer, branches, .. } => {
                out.insert(peer.clone());
                for b in branches {
                    b.cont.collect_participants(out);
                }
            }
            SessionType::Rec(_, body) => body.collect_participants(out),
            SessionType::Var(_) | SessionType::End => {}
        }
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            SessionType::Comm { branches, .. } => 1 + branches.iter().map(|b| b.cont.size()).sum::<usize>(),
            SessionType::Rec(_, body) => 1 + body.size(),
            SessionType::Var(_) | SessionType::End => 1,
        }
    }

    /// Renames bound variables to `t0, t1, ...` in binding order, so that
    /// alpha-equivalent types compare equal.
    pub fn canonical_binders(&self) -> SessionType {
        fn go(ty: &SessionType, env: &mut Vec<(TypeVar, TypeVar)>, next: &mut usize) -> SessionType {
            match ty {
                SessionType::Comm { polarity, peer, branches } => SessionType::Comm {
                    polarity: *polarity,
                    peer: peer.clone(),
                    branches: branches
                        .iter()
                        .map(|b| Branch { label: b.label.clone(), sort: b.sort, cont: go(&b.cont, env, next) })
                        .collect(),
                },
                SessionType::Rec(t, body) => {
                    let fresh = TypeVar::new(format!("t{next}"));
                    *next += 1;
                    env.push((t.clone(), fresh.clone()));
                    let body = go(body, env, next);
                    env.pop();
                    SessionType::Rec(fresh, Box::new(body))
                }
                SessionType::Var(t) => match env.iter().rev().find(|(old, _)| old == t) {
                    Some((_, new)) => SessionType::Var(new.clone()),
                    None => ty.clone(),
                },
                SessionType::End => SessionType::End,
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }

    fn all_vars(&self, out: &mut BTreeSet<TypeVar>) {
        match self {
            SessionType::Comm { branches, .. } => branches.iter().for_each(|b| b.cont.all_vars(out)),
            SessionType::Rec(t, body) => {
                out.insert(t.clone());
                body.all_vars(out);
            }
            SessionType::Var(t) => {
                out.insert(t.clone());
            }
            SessionType::End => {}
        }
    }
}

impl Recursive for SessionType {
    type Head = (Option<(Polarity, Participant)>, Vec<(Label, Sort)>);

    fn shape(&self) -> Shape<'_, Self> {
        match self {
            SessionType::Comm { polarity, peer, branches } => Shape::Node(
                (Some((*polarity, peer.clone())), branches.iter().map(|b| (b.label.clone(), b.sort)).collect()),
                branches.iter().map(|b| &b.cont).collect(),
            ),
            SessionType::Rec(t, body) => Shape::Rec(t, body),
            SessionType::Var(t) => Shape::Var(t),
            SessionType::End => Shape::Node((None, Vec::new()), Vec::new()),
        }
    }

    fn as_rec(&self) -> Option<(&TypeVar, &Self)> {
        match self {
            SessionType::Rec(t, body) => Some((t, body)),
            _ => None,
        }
    }

    fn substitute(&self, var: &TypeVar, replacement: &Self) -> Self {
        match self {
            SessionType::Comm { polarity, peer, branches } => SessionType::Comm {
                polarity: *polarity,
                peer: peer.clone(),
                branches: branches
                    .iter()
                    .map(|b| Branch {
                        label: b.label.clone(),
                        sort: b.sort,
                        cont: b.cont.substitute(var, replacement),
                    })
                    .collect(),
            },
            SessionType::Rec(t, body) => {
                if t == var || !body.has_free(var) {
                    return self.clone();
                }
                if replacement.has_free(t) {
                    let mut avoid = BTreeSet::new();
                    body.all_vars(&mut avoid);
                    replacement.all_vars(&mut avoid);
                    avoid.insert(var.clone());
                    let fresh = TypeVar::new(fresh_name(t.as_str(), |c| avoid.iter().any(|v| v.as_str() == c)));
                    let renamed = body.substitute(t, &SessionType::Var(fresh.clone()));
                    return SessionType::Rec(fresh, Box::new(renamed.substitute(var, replacement)));
                }
                SessionType::Rec(t.clone(), Box::new(body.substitute(var, replacement)))
            }
            SessionType::Var(t) if t == var => replacement.clone(),
            SessionType::Var(_) | SessionType::End => self.clone(),
        }
    }

    fn rec_count(&self) -> usize {
        match self {
            SessionType::Comm { branches, .. } => branches.iter().map(|b| b.cont.rec_count()).sum(),
            SessionType::Rec(_, body) => 1 + body.rec_count(),
            SessionType::Var(_) | SessionType::End => 0,
        }
    }
}

impl std::fmt::Debug for SessionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::regular_tree_eq;

    fn loop_in() -> SessionType {
        SessionType::rec("t", SessionType::input("p", "l", Sort::Nat, SessionType::var("t")))
    }

    #[test]
    fn unfold_one_step() {
        let t = loop_in();
        let expected = SessionType::input("p", "l", Sort::Nat, loop_in());
        assert_eq!(t.unfold(), expected);
        assert_eq!(SessionType::End.unfold(), SessionType::End);
    }

    #[test]
    fn unfold_drops_vacuous_binder() {
        let inner = SessionType::rec("s", SessionType::output("p", "l", Sort::Int, SessionType::var("s")));
        let t = SessionType::rec("t", inner.clone());
        assert_eq!(t.unfold(), inner);
        assert!(t.unfold().is_closed());
    }

    #[test]
    fn substitution_avoids_capture() {
        // (mu s. p!l(int).t)[s / t] must not capture the free s.
        let body = SessionType::rec("s", SessionType::output("p", "l", Sort::Int, SessionType::var("t")));
        let result = body.substitute(&TypeVar::new("t"), &SessionType::var("s"));
        assert!(result.has_free(&TypeVar::new("s")));
    }

    #[test]
    fn regular_tree_equality() {
        assert!(regular_tree_eq(&loop_in(), &loop_in().unfold()));
        assert!(!regular_tree_eq(&SessionType::End, &loop_in()));
        let twice = SessionType::rec(
            "t",
            SessionType::output("p", "l", Sort::Int, SessionType::output("p", "l", Sort::Int, SessionType::var("t"))),
        );
        let once = SessionType::rec("t", SessionType::output("p", "l", Sort::Int, SessionType::var("t")));
        assert!(regular_tree_eq(&twice, &once));
        let open = |v: &str| SessionType::output("p", "l", Sort::Int, SessionType::var(v));
        assert!(regular_tree_eq(&open("s"), &open("s")));
        assert!(!regular_tree_eq(&open("s"), &open("u")));
        assert!(!regular_tree_eq(&open("s"), &once.unfold()));
    }

    #[test]
    fn guardedness() {
        let bad = SessionType::rec("t", SessionType::var("t"));
        assert!(matches!(bad.validate(), Err(SyntaxError::UnguardedRecursion(_))));
        let nested = SessionType::rec("t", SessionType::rec("s", SessionType::var("t")));
        assert!(nested.validate().is_err());
        assert!(loop_in().validate().is_ok());
        assert!(SessionType::var("t").validate().is_err());
    }

    #[test]
    fn branches_are_canonical() {
        let t = SessionType::intersection(
            "p",
            vec![Branch::new("b", Sort::Nat, SessionType::End), Branch::new("a", Sort::Int, SessionType::End)],
        )
        .unwrap();
        assert_eq!(t.components().len(), 2);
        assert!(t.branch(&Label::new("a")).is_some());
        let dup = SessionType::union(
            "p",
            vec![Branch::new("a", Sort::Nat, SessionType::End), Branch::new("a", Sort::Int, SessionType::End)],
        );
        assert_eq!(dup, Err(SyntaxError::DuplicateLabel(Label::new("a"))));
    }

    #[test]
    fn participants_of_example_type() {
        let t = SessionType::union(
            "q",
            vec![
                Branch::new("l1", Sort::Nat, SessionType::input("r", "l2", Sort::Int, SessionType::End)),
                Branch::new("l3", Sort::Int, SessionType::End),
            ],
        )
        .unwrap();
        let names: Vec<_> = t.participants().into_iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["q", "r"]);
        assert!(SessionType::End.participants().is_empty());
    }
}
