use std::collections::BTreeSet;

use super::{Expr, Label, Participant, ProcVar, SyntaxError, Var};

/// Processes. `Choice` holds at least two summands, none of them a
/// `Choice`; use [`Process::sum`] to build one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Input {
        from: Participant,
        label: Label,
        var: Var,
        body: Box<Process>,
    },
    Output {
        to: Participant,
        label: Label,
        payload: Expr,
        body: Box<Process>,
    },
    Choice(Vec<Process>),
    If {
        cond: Expr,
        then_branch: Box<Process>,
        else_branch: Box<Process>,
    },
    Rec(ProcVar, Box<Process>),
    Var(ProcVar),
    Inact,
}

impl Process {
    pub fn input(from: impl Into<Participant>, label: impl Into<Label>, var: impl Into<Var>, body: Process) -> Self {
        Process::Input { from: from.into(), label: label.into(), var: var.into(), body: Box::new(body) }
    }

    pub fn output(to: impl Into<Participant>, label: impl Into<Label>, payload: Expr, body: Process) -> Self {
        Process::Output { to: to.into(), label: label.into(), payload, body: Box::new(body) }
    }

    /// External choice of the given summands, flattened. A single summand
    /// is returned as is. Panics on an empty list.
    pub fn sum(summands: impl IntoIterator<Item = Process>) -> Self {
        let mut flat = Vec::new();
        for p in summands {
            match p {
                Process::Choice(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => panic!("external choice needs at least one summand"),
            1 => flat.pop().unwrap(),
            _ => Process::Choice(flat),
        }
    }

    pub fn cond(cond: Expr, then_branch: Process, else_branch: Process) -> Self {
        Process::If { cond, then_branch: Box::new(then_branch), else_branch: Box::new(else_branch) }
    }

    pub fn rec(var: impl Into<ProcVar>, body: Process) -> Self {
        Process::Rec(var.into(), Box::new(body))
    }

    pub fn var(var: impl Into<ProcVar>) -> Self {
        Process::Var(var.into())
    }

    pub fn is_inact(&self) -> bool {
        matches!(self, Process::Inact)
    }

    /// The summands of an external choice; a singleton for other processes.
    pub fn summands(&self) -> &[Process] {
        match self {
            Process::Choice(items) => items,
            other => std::slice::from_ref(other),
        }
    }

    /// Every communication partner mentioned in the process.
    pub fn participants(&self) -> BTreeSet<Participant> {
        let mut out = BTreeSet::new();
        self.collect_participants(&mut out);
        out
    }

    fn collect_participants(&self, out: &mut BTreeSet<Participant>) {
        match self {
            Process::Input { from, body, .. } => {
                out.insert(from.clone());
                body.collect_participants(out);
            }
            Process::Output { to, body, .. } => {
                out.insert(to.clone());
                body.collect_participants(out);
            }
            Process::Choice(items) => items.iter().for_each(|p| p.collect_participants(out)),
            Process::If { then_branch, else_branch, .. } => {
                then_branch.collect_participants(out);
                else_branch.collect_participants(out);
            }
            Process::Rec(_, body) => body.collect_participants(out),
            Process::Var(_) | Process::Inact => {}
        }
    }

    pub fn free_proc_vars(&self) -> BTreeSet<ProcVar> {
        let mut out = BTreeSet::new();
        self.collect_free_proc(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_proc(&self, bound: &mut Vec<ProcVar>, out: &mut BTreeSet<ProcVar>) {
        match self {
            Process::Input { body, .. } | Process::Output { body, .. } => body.collect_free_proc(bound, out),
            Process::Choice(items) => items.iter().for_each(|p| p.collect_free_proc(bound, out)),
            Process::If { then_branch, else_branch, .. } => {
                then_branch.collect_free_proc(bound, out);
                else_branch.collect_free_proc(bound, out);
            }
            Process::Rec(x, body) => {
                bound.push(x.clone());
                body.collect_free_proc(bound, out);
                bound.pop();
            }
            Process::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Process::Inact => {}
        }
    }

    /// Free expression variables.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |e: &Expr, bound: &Vec<Var>| {
            out.extend(e.free_vars().into_iter().filter(|x| !bound.contains(x)));
        };
        match self {
            Process::Input { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free_vars(bound, out);
                bound.pop();
            }
            Process::Output { payload, body, .. } => {
                add(payload, bound);
                body.collect_free_vars(bound, out);
            }
            Process::If { cond, then_branch, else_branch } => {
                add(cond, bound);
                then_branch.collect_free_vars(bound, out);
                else_branch.collect_free_vars(bound, out);
            }
            Process::Choice(items) => items.iter().for_each(|p| p.collect_free_vars(bound, out)),
            Process::Rec(_, body) => body.collect_free_vars(bound, out),
            Process::Var(_) | Process::Inact => {}
        }
    }

    pub fn has_free_var(&self, x: &Var) -> bool {
        match self {
            Process::Input { var, body, .. } => var != x && body.has_free_var(x),
            Process::Output { payload, body, .. } => payload.mentions(x) || body.has_free_var(x),
            Process::If { cond, then_branch, else_branch } => {
                cond.mentions(x) || then_branch.has_free_var(x) || else_branch.has_free_var(x)
            }
            Process::Choice(items) => items.iter().any(|p| p.has_free_var(x)),
            Process::Rec(_, body) => body.has_free_var(x),
            Process::Var(_) | Process::Inact => false,
        }
    }

    /// Checks that recursion variables are bound and guarded. A variable is
    /// guarded once it sits under a prefix or a conditional.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        if let Some(x) = self.free_proc_vars().into_iter().next() {
            return Err(SyntaxError::UnboundVariable(x.to_string()));
        }
        self.check_guarded()
    }

    pub fn check_guarded(&self) -> Result<(), SyntaxError> {
        match self {
            Process::Input { body, .. } | Process::Output { body, .. } => body.check_guarded(),
            Process::Choice(items) => items.iter().try_for_each(Process::check_guarded),
            Process::If { then_branch, else_branch, .. } => {
                then_branch.check_guarded()?;
                else_branch.check_guarded()
            }
            Process::Rec(x, body) => {
                if body.head_vars().contains(x) {
                    return Err(SyntaxError::UnguardedRecursion(x.to_string()));
                }
                body.check_guarded()
            }
            Process::Var(_) | Process::Inact => Ok(()),
        }
    }

    fn head_vars(&self) -> Vec<ProcVar> {
        match self {
            Process::Var(x) => vec![x.clone()],
            Process::Rec(y, body) => body.head_vars().into_iter().filter(|x| x != y).collect(),
            Process::Choice(items) => items.iter().flat_map(Process::head_vars).collect(),
            _ => Vec::new(),
        }
    }

    /// `mu X. B` becomes `B[mu X. B / X]`. Process recursion unfolds
    /// textually; the binders of `B` are not renamed.
    pub fn unfold(&self) -> Process {
        match self {
            Process::Rec(x, body) => body.replace_proc_var(x, self),
            other => other.clone(),
        }
    }

    pub(crate) fn replace_proc_var(&self, x: &ProcVar, replacement: &Process) -> Process {
        match self {
            Process::Input { from, label, var, body } => Process::Input {
                from: from.clone(),
                label: label.clone(),
                var: var.clone(),
                body: Box::new(body.replace_proc_var(x, replacement)),
            },
            Process::Output { to, label, payload, body } => Process::Output {
                to: to.clone(),
                label: label.clone(),
                payload: payload.clone(),
                body: Box::new(body.replace_proc_var(x, replacement)),
            },
            Process::Choice(items) => Process::sum(items.iter().map(|p| p.replace_proc_var(x, replacement))),
            Process::If { cond, then_branch, else_branch } => Process::cond(
                cond.clone(),
                then_branch.replace_proc_var(x, replacement),
                else_branch.replace_proc_var(x, replacement),
            ),
            Process::Rec(y, _) if y == x => self.clone(),
            Process::Rec(y, body) => Process::rec(y.clone(), body.replace_proc_var(x, replacement)),
            Process::Var(y) if y == x => replacement.clone(),
            Process::Var(_) | Process::Inact => self.clone(),
        }
    }

    /// Substitutes the literal `value` for the free occurrences of `x`.
    ///
    /// Inside `mu X. B` the result stays a finite term that denotes the
    /// substituted infinite unfolding: occurrences of `X` that sit under a
    /// rebinding of `x` are replaced by the original `mu X. B`, since from
    /// there on the unfolding no longer sees `value`.
    pub fn substitute(&self, x: &Var, value: &Expr) -> Process {
        let mut frames = Vec::new();
        self.subst_in(x, value, &mut frames, false)
    }

    fn subst_in(&self, x: &Var, value: &Expr, frames: &mut Vec<(ProcVar, Option<Process>)>, shadowed: bool) -> Process {
        if shadowed && frames.iter().all(|(_, orig)| orig.is_none()) {
            return self.clone();
        }
        match self {
            Process::Input { from, label, var, body } => Process::Input {
                from: from.clone(),
                label: label.clone(),
                var: var.clone(),
                body: Box::new(body.subst_in(x, value, frames, shadowed || var == x)),
            },
            Process::Output { to, label, payload, body } => Process::Output {
                to: to.clone(),
                label: label.clone(),
                payload: if shadowed { payload.clone() } else { payload.substitute(x, value) },
                body: Box::new(body.subst_in(x, value, frames, shadowed)),
            },
            Process::Choice(items) => {
                Process::sum(items.iter().map(|p| p.subst_in(x, value, frames, shadowed)).collect::<Vec<_>>())
            }
            Process::If { cond, then_branch, else_branch } => Process::cond(
                if shadowed { cond.clone() } else { cond.substitute(x, value) },
                then_branch.subst_in(x, value, frames, shadowed),
                else_branch.subst_in(x, value, frames, shadowed),
            ),
            Process::Rec(y, body) => {
                if !shadowed && !self.has_free_var(x) && !frames.iter().any(|(_, o)| o.is_some()) {
                    return self.clone();
                }
                // Before a rebinding of x, occurrences of y past a later
                // rebinding must refer back to this unsubstituted term.
                // After one, y just shadows outer frames.
                let orig = (!shadowed).then(|| self.clone());
                frames.push((y.clone(), orig));
                let body = body.subst_in(x, value, frames, shadowed);
                frames.pop();
                Process::rec(y.clone(), body)
            }
            Process::Var(y) => {
                if shadowed {
                    if let Some((_, Some(orig))) = frames.iter().rev().find(|(name, _)| name == y) {
                        return orig.clone();
                    }
                }
                self.clone()
            }
            Process::Inact => Process::Inact,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Process::Input { body, .. } | Process::Output { body, .. } => 1 + body.size(),
            Process::Choice(items) => 1 + items.iter().map(Process::size).sum::<usize>(),
            Process::If { then_branch, else_branch, .. } => 1 + then_branch.size() + else_branch.size(),
            Process::Rec(_, body) => 1 + body.size(),
            Process::Var(_) | Process::Inact => 1,
        }
    }
}

impl std::fmt::Debug for Process {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_flattens() {
        let a = Process::input("p", "a", "x", Process::Inact);
        let b = Process::input("p", "b", "x", Process::Inact);
        let c = Process::input("p", "c", "x", Process::Inact);
        let nested = Process::sum([Process::sum([a.clone(), b.clone()]), c.clone()]);
        assert_eq!(nested, Process::Choice(vec![a.clone(), b, c]));
        assert_eq!(Process::sum([a.clone()]), a);
    }

    #[test]
    fn guarded_by_conditional_but_not_by_choice() {
        let ok = Process::rec("X", Process::cond(Expr::Bool(true), Process::var("X"), Process::Inact));
        assert!(ok.validate().is_ok());
        let bad = Process::rec("X", Process::sum([Process::var("X"), Process::input("p", "l", "x", Process::Inact)]));
        assert!(matches!(bad.validate(), Err(SyntaxError::UnguardedRecursion(_))));
        assert!(matches!(Process::var("X").validate(), Err(SyntaxError::UnboundVariable(_))));
    }

    #[test]
    fn substitution_stops_at_rebinding() {
        let p = Process::output("q", "a", Expr::var("x"), Process::input("q", "b", "x", Process::output("q", "c", Expr::var("x"), Process::Inact)));
        let s = p.substitute(&Var::new("x"), &Expr::Nat(1));
        let expected = Process::output("q", "a", Expr::Nat(1), Process::input("q", "b", "x", Process::output("q", "c", Expr::var("x"), Process::Inact)));
        assert_eq!(s, expected);
    }

    #[test]
    fn substitution_through_recursion_restores_loop_after_rebinding() {
        // mu X. q!a(x). q?b(x). X   with x := 1
        let body = Process::output("q", "a", Expr::var("x"), Process::input("q", "b", "x", Process::var("X")));
        let rec = Process::rec("X", body);
        let s = rec.substitute(&Var::new("x"), &Expr::Nat(1));
        let expected = Process::rec(
            "X",
            Process::output("q", "a", Expr::Nat(1), Process::input("q", "b", "x", rec.clone())),
        );
        assert_eq!(s, expected);
        // Unfolding the result sends 1, then re-enters the original loop.
        let Process::Output { payload, body, .. } = s.unfold() else { panic!() };
        assert_eq!(payload, Expr::Nat(1));
        let Process::Input { body, .. } = *body else { panic!() };
        assert_eq!(*body, rec);
    }

    #[test]
    fn substitution_leaves_closed_loops_alone() {
        let rec = Process::rec("X", Process::input("q", "b", "y", Process::var("X")));
        assert_eq!(rec.substitute(&Var::new("x"), &Expr::Nat(3)), rec);
    }
}
