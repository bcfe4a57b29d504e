use std::collections::BTreeSet;

use super::{
    canonical_branches, find_branch, fresh_name, Branch, Label, Participant, Recursive, Shape, Sort, SyntaxError,
    TypeVar,
};

/// Global types: `p -> q : { l_i(S_i). G_i }`, recursion and `end`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GlobalType {
    Comm {
        from: Participant,
        to: Participant,
        branches: Vec<Branch<GlobalType>>,
    },
    Rec(TypeVar, Box<GlobalType>),
    Var(TypeVar),
    End,
}

impl GlobalType {
    pub fn comm(
        from: impl Into<Participant>,
        to: impl Into<Participant>,
        branches: Vec<Branch<GlobalType>>,
    ) -> Result<Self, SyntaxError> {
        let (from, to) = (from.into(), to.into());
        if from == to {
            return Err(SyntaxError::SelfCommunication(from));
        }
        Ok(GlobalType::Comm { from, to, branches: canonical_branches(branches)? })
    }

    /// A single-branch communication. Panics if `from == to`.
    pub fn message(
        from: impl Into<Participant>,
        to: impl Into<Participant>,
        label: impl Into<Label>,
        sort: Sort,
        cont: GlobalType,
    ) -> Self {
        Self::comm(from, to, vec![Branch::new(label, sort, cont)]).expect("sender equals receiver")
    }

    pub fn rec(var: impl Into<TypeVar>, body: GlobalType) -> Self {
        GlobalType::Rec(var.into(), Box::new(body))
    }

    pub fn var(var: impl Into<TypeVar>) -> Self {
        GlobalType::Var(var.into())
    }

    pub fn branch(&self, label: &Label) -> Option<&Branch<GlobalType>> {
        match self {
            GlobalType::Comm { branches, .. } => find_branch(branches, label),
            _ => None,
        }
    }

    /// Participants of the global type: the union over all branches.
    pub fn participants(&self) -> BTreeSet<Participant> {
        let mut out = BTreeSet::new();
        self.collect_participants(&mut out);
        out
    }

    fn collect_participants(&self, out: &mut BTreeSet<Participant>) {
        match self {
            GlobalType::Comm { from, to, branches } => {
                out.insert(from.clone());
                out.insert(to.clone());
                for b in branches {
                    b.cont.collect_participants(out);
                }
            }
            GlobalType::Rec(_, body) => body.collect_participants(out),
            GlobalType::Var(_) | GlobalType::End => {}
        }
    }

    /// Communication nodes whose branches disagree on their participant
    /// sets, as `(label path, participants per branch)`. Projectable types
    /// have none.
    pub fn participant_discrepancies(&self) -> Vec<(Vec<Label>, Vec<BTreeSet<Participant>>)> {
        let mut out = Vec::new();
        self.collect_discrepancies(&mut Vec::new(), &mut out);
        out
    }

    fn collect_discrepancies(&self, path: &mut Vec<Label>, out: &mut Vec<(Vec<Label>, Vec<BTreeSet<Participant>>)>) {
        match self {
            GlobalType::Comm { branches, .. } => {
                let sets: Vec<_> = branches.iter().map(|b| b.cont.participants()).collect();
                if sets.windows(2).any(|w| w[0] != w[1]) {
                    out.push((path.clone(), sets));
                }
                for b in branches {
                    path.push(b.label.clone());
                    b.cont.collect_discrepancies(path, out);
                    path.pop();
                }
            }
            GlobalType::Rec(_, body) => body.collect_discrepancies(path, out),
            GlobalType::Var(_) | GlobalType::End => {}
        }
    }

    pub fn free_vars(&self) -> BTreeSet<TypeVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<TypeVar>, out: &mut BTreeSet<TypeVar>) {
        match self {
            GlobalType::Comm { branches, .. } => branches.iter().for_each(|b| b.cont.collect_free(bound, out)),
            GlobalType::Rec(t, body) => {
                bound.push(t.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            GlobalType::Var(t) => {
                if !bound.contains(t) {
                    out.insert(t.clone());
                }
            }
            GlobalType::End => {}
        }
    }

    pub fn has_free(&self, var: &TypeVar) -> bool {
        match self {
            GlobalType::Comm { branches, .. } => branches.iter().any(|b| b.cont.has_free(var)),
            GlobalType::Rec(t, body) => t != var && body.has_free(var),
            GlobalType::Var(t) => t == var,
            GlobalType::End => false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn validate(&self) -> Result<(), SyntaxError> {
        if let Some(t) = self.free_vars().into_iter().next() {
            return Err(SyntaxError::UnboundVariable(t.to_string()));
        }
        self.check_guarded()
    }

    pub fn check_guarded(&self) -> Result<(), SyntaxError> {
        match self {
            GlobalType::Comm { branches, .. } => branches.iter().try_for_each(|b| b.cont.check_guarded()),
            GlobalType::Rec(t, body) => {
                if body.head_vars().contains(t) {
                    return Err(SyntaxError::UnguardedRecursion(t.to_string()));
                }
                body.check_guarded()
            }
            GlobalType::Var(_) | GlobalType::End => Ok(()),
        }
    }

    pub(crate) fn head_vars(&self) -> Vec<TypeVar> {
        match self {
            GlobalType::Var(t) => vec![t.clone()],
            GlobalType::Rec(s, body) => body.head_vars().into_iter().filter(|t| t != s).collect(),
            _ => Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GlobalType::Comm { branches, .. } => 1 + branches.iter().map(|b| b.cont.size()).sum::<usize>(),
            GlobalType::Rec(_, body) => 1 + body.size(),
            GlobalType::Var(_) | GlobalType::End => 1,
        }
    }

    fn all_vars(&self, out: &mut BTreeSet<TypeVar>) {
        match self {
            GlobalType::Comm { branches, .. } => branches.iter().for_each(|b| b.cont.all_vars(out)),
            GlobalType::Rec(t, body) => {
                out.insert(t.clone());
                body.all_vars(out);
            }
            GlobalType::Var(t) => {
                out.insert(t.clone());
            }
            GlobalType::End => {}
        }
    }
}

impl Recursive for GlobalType {
    type Head = (Option<(Participant, Participant)>, Vec<(Label, Sort)>);

    fn shape(&self) -> Shape<'_, Self> {
        match self {
            GlobalType::Comm { from, to, branches } => Shape::Node(
                (Some((from.clone(), to.clone())), branches.iter().map(|b| (b.label.clone(), b.sort)).collect()),
                branches.iter().map(|b| &b.cont).collect(),
            ),
            GlobalType::Rec(t, body) => Shape::Rec(t, body),
            GlobalType::Var(t) => Shape::Var(t),
            GlobalType::End => Shape::Node((None, Vec::new()), Vec::new()),
        }
    }

    fn as_rec(&self) -> Option<(&TypeVar, &Self)> {
        match self {
            GlobalType::Rec(t, body) => Some((t, body)),
            _ => None,
        }
    }

    fn substitute(&self, var: &TypeVar, replacement: &Self) -> Self {
        match self {
            GlobalType::Comm { from, to, branches } => GlobalType::Comm {
                from: from.clone(),
                to: to.clone(),
                branches: branches
                    .iter()
                    .map(|b| Branch {
                        label: b.label.clone(),
                        sort: b.sort,
                        cont: b.cont.substitute(var, replacement),
                    })
                    .collect(),
            },
            GlobalType::Rec(t, body) => {
                if t == var || !body.has_free(var) {
                    return self.clone();
                }
                if replacement.has_free(t) {
                    let mut avoid = BTreeSet::new();
                    body.all_vars(&mut avoid);
                    replacement.all_vars(&mut avoid);
                    avoid.insert(var.clone());
                    let fresh = TypeVar::new(fresh_name(t.as_str(), |c| avoid.iter().any(|v| v.as_str() == c)));
                    let renamed = body.substitute(t, &GlobalType::Var(fresh.clone()));
                    return GlobalType::Rec(fresh, Box::new(renamed.substitute(var, replacement)));
                }
                GlobalType::Rec(t.clone(), Box::new(body.substitute(var, replacement)))
            }
            GlobalType::Var(t) if t == var => replacement.clone(),
            GlobalType::Var(_) | GlobalType::End => self.clone(),
        }
    }

    fn rec_count(&self) -> usize {
        match self {
            GlobalType::Comm { branches, .. } => branches.iter().map(|b| b.cont.rec_count()).sum(),
            GlobalType::Rec(_, body) => 1 + body.rec_count(),
            GlobalType::Var(_) | GlobalType::End => 0,
        }
    }
}

impl std::fmt::Debug for GlobalType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_communication_rejected() {
        let err = GlobalType::comm("p", "p", vec![Branch::new("l", Sort::Nat, GlobalType::End)]);
        assert_eq!(err, Err(SyntaxError::SelfCommunication(Participant::new("p"))));
    }

    #[test]
    fn participants_are_a_union_over_branches() {
        let g = GlobalType::comm(
            "p",
            "q",
            vec![
                Branch::new("a", Sort::Nat, GlobalType::message("q", "r", "b", Sort::Int, GlobalType::End)),
                Branch::new("c", Sort::Bool, GlobalType::End),
            ],
        )
        .unwrap();
        assert_eq!(g.participants().len(), 3);
        let gaps = g.participant_discrepancies();
        assert_eq!(gaps.len(), 1);
        assert!(gaps[0].0.is_empty());
        assert!(GlobalType::End.participants().is_empty());
    }

    #[test]
    fn unguarded_global_recursion() {
        let g = GlobalType::rec("t", GlobalType::var("t"));
        assert!(matches!(g.validate(), Err(SyntaxError::UnguardedRecursion(_))));
    }
}
