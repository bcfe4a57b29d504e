//! Canonical states, the reduction relation and breadth-first stuck-state
//! search.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::expr::{eval_all, Value};
use crate::global::CommAction;
use crate::syntax::{Label, Participant, ProcVar, Process, Session};

/// A session in canonical form: head recursion entered, external choices
/// flattened and sorted, terminated members dropped. Congruent sessions
/// have equal states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SessionState {
    members: BTreeMap<Participant, Member>,
}

/// A member process kept folded: free recursion variables of `term` stand
/// for the loops in `defs`. A loop is entered only once it reaches the
/// head, so its body closes over every expression variable and a jump
/// resumes the stored body.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Member {
    term: Process,
    defs: BTreeMap<ProcVar, Process>,
}

impl Member {
    /// The canonical member for `term`, or `None` once it is `0`.
    fn new(term: &Process, defs: &BTreeMap<ProcVar, Process>) -> Option<Member> {
        let mut defs = reachable(&term.free_proc_vars(), defs);
        let term = enter(term, &mut defs);
        let term = lift(&term, &mut Vec::new(), &mut defs);
        if term.is_inact() {
            return None;
        }
        let defs = reachable(&term.free_proc_vars(), &defs);
        Some(Member { term, defs })
    }

    /// The closed process this member stands for.
    fn close(&self) -> Process {
        let mut closed = BTreeMap::new();
        let mut term = self.term.clone();
        for x in self.term.free_proc_vars() {
            let loop_ = close_def(&x, &self.defs, &mut closed, 0);
            term = term.replace_proc_var(&x, &loop_);
        }
        term
    }
}

/// The definitions reachable from `roots`.
fn reachable(roots: &BTreeSet<ProcVar>, defs: &BTreeMap<ProcVar, Process>) -> BTreeMap<ProcVar, Process> {
    let mut out = BTreeMap::new();
    let mut todo: Vec<ProcVar> = roots.iter().cloned().collect();
    while let Some(x) = todo.pop() {
        if out.contains_key(&x) {
            continue;
        }
        if let Some(body) = defs.get(&x) {
            todo.extend(body.free_proc_vars());
            out.insert(x, body.clone());
        }
    }
    out
}

/// `mu x. defs[x]` with the loops it refers to closed as well.
fn close_def(
    x: &ProcVar,
    defs: &BTreeMap<ProcVar, Process>,
    closed: &mut BTreeMap<ProcVar, Process>,
    depth: usize,
) -> Process {
    if let Some(p) = closed.get(x) {
        return p.clone();
    }
    assert!(depth <= defs.len(), "cyclic loop definitions");
    let body = &defs[x];
    let mut out = body.clone();
    for y in body.free_proc_vars() {
        if &y != x {
            let inner = close_def(&y, defs, closed, depth + 1);
            out = out.replace_proc_var(&y, &inner);
        }
    }
    let out = Process::rec(x.clone(), out);
    closed.insert(x.clone(), out.clone());
    out
}

/// Enters head recursion, recording each loop in `defs`, and normalizes
/// external choices throughout.
fn enter(p: &Process, defs: &mut BTreeMap<ProcVar, Process>) -> Process {
    match p {
        Process::Rec(x, body) => {
            let body = canonical_inner(body);
            let x = bind(x, &body, defs);
            let body = defs[&x].clone();
            enter(&body, defs)
        }
        Process::Var(x) => match defs.get(x) {
            Some(body) => {
                let body = body.clone();
                enter(&body, defs)
            }
            None => p.clone(),
        },
        Process::Choice(items) => {
            let mut flat: Vec<Process> = Vec::new();
            for item in items {
                match enter(item, defs) {
                    Process::Choice(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            flat.sort();
            Process::sum(flat)
        }
        Process::Input { .. } | Process::Output { .. } | Process::If { .. } | Process::Inact => canonical_inner(p),
    }
}

/// Records the loop `mu x. body` and returns its name: `x` unless another
/// live loop already holds that name.
fn bind(x: &ProcVar, body: &Process, defs: &mut BTreeMap<ProcVar, Process>) -> ProcVar {
    let candidates = std::iter::once(x.clone()).chain((1..).map(|k| ProcVar::new(format!("{x}_{k}"))));
    for y in candidates {
        let renamed = if &y == x { body.clone() } else { body.replace_proc_var(x, &Process::var(y.clone())) };
        match defs.get(&y) {
            Some(existing) if *existing == renamed => return y,
            Some(_) => continue,
            None if &y != x && mentions(body, &y) => continue,
            None => {
                defs.insert(y.clone(), renamed);
                return y;
            }
        }
    }
    unreachable!("unbounded supply of names")
}

/// Moves loops below prefixes into `defs` when they close over nothing
/// but `defs`, so partially unfolded terms meet their folded forms.
fn lift(p: &Process, bound: &mut Vec<ProcVar>, defs: &mut BTreeMap<ProcVar, Process>) -> Process {
    match p {
        Process::Rec(x, body) => {
            let free = p.free_proc_vars();
            if p.free_vars().is_empty() && free.iter().all(|y| !bound.contains(y) && defs.contains_key(y)) {
                return Process::var(bind(x, body, defs));
            }
            bound.push(x.clone());
            let body = lift(body, bound, defs);
            bound.pop();
            Process::rec(x.clone(), body)
        }
        Process::Choice(items) => {
            let mut items: Vec<Process> = items.iter().map(|q| lift(q, bound, defs)).collect();
            items.sort();
            Process::sum(items)
        }
        Process::Input { from, label, var, body } => {
            Process::input(from.clone(), label.clone(), var.clone(), lift(body, bound, defs))
        }
        Process::Output { to, label, payload, body } => {
            Process::output(to.clone(), label.clone(), payload.clone(), lift(body, bound, defs))
        }
        Process::If { cond, then_branch, else_branch } => {
            Process::cond(cond.clone(), lift(then_branch, bound, defs), lift(else_branch, bound, defs))
        }
        Process::Var(_) | Process::Inact => p.clone(),
    }
}

/// Whether `x` occurs in `p`, bound or free.
fn mentions(p: &Process, x: &ProcVar) -> bool {
    match p {
        Process::Input { body, .. } | Process::Output { body, .. } => mentions(body, x),
        Process::Choice(items) => items.iter().any(|q| mentions(q, x)),
        Process::If { then_branch, else_branch, .. } => mentions(then_branch, x) || mentions(else_branch, x),
        Process::Rec(y, body) => y == x || mentions(body, x),
        Process::Var(y) => y == x,
        Process::Inact => false,
    }
}

impl SessionState {
    pub fn new(session: &Session) -> Self {
        let none = BTreeMap::new();
        let members =
            session.iter().filter_map(|(p, proc_)| Some((p.clone(), Member::new(proc_, &none)?))).collect();
        Self { members }
    }

    /// The session this state stands for, loops folded back into terms.
    pub fn session(&self) -> Session {
        Session::from_map_unchecked(self.members.iter().map(|(p, m)| (p.clone(), m.close())).collect())
    }

    pub fn get(&self, p: &Participant) -> Option<Process> {
        self.members.get(p).map(Member::close)
    }

    /// Every member is `0`.
    pub fn is_terminated(&self) -> bool {
        self.members.is_empty()
    }

    fn update(&self, changes: impl IntoIterator<Item = (Participant, Option<Member>)>) -> Self {
        let mut members = self.members.clone();
        for (p, m) in changes {
            match m {
                Some(m) => members.insert(p, m),
                None => members.remove(&p),
            };
        }
        Self { members }
    }
}

impl fmt::Display for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.session())
    }
}

impl fmt::Debug for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Below a prefix recursion stays folded; only choices are sorted.
fn canonical_inner(p: &Process) -> Process {
    match p {
        Process::Rec(x, body) => Process::rec(x.clone(), canonical_inner(body)),
        Process::Choice(_) => {
            let mut items: Vec<Process> = p.summands().iter().map(canonical_inner).collect();
            items.sort();
            Process::sum(items)
        }
        Process::Input { from, label, var, body } => {
            Process::input(from.clone(), label.clone(), var.clone(), canonical_inner(body))
        }
        Process::Output { to, label, payload, body } => {
            Process::output(to.clone(), label.clone(), payload.clone(), canonical_inner(body))
        }
        Process::If { cond, then_branch, else_branch } => {
            Process::cond(cond.clone(), canonical_inner(then_branch), canonical_inner(else_branch))
        }
        Process::Var(_) | Process::Inact => p.clone(),
    }
}

/// One reduction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Step {
    /// `sender` sends `value` on `label` to `receiver`.
    Comm { sender: Participant, receiver: Participant, label: Label, value: Value },
    /// `participant` takes a conditional branch.
    Cond { participant: Participant, branch: bool },
}

impl Step {
    pub fn rule(&self) -> &'static str {
        match self {
            Step::Comm { .. } => "r-comm",
            Step::Cond { branch: true, .. } => "t-conditional",
            Step::Cond { branch: false, .. } => "f-conditional",
        }
    }

    /// The global action of a communication step.
    pub fn action(&self) -> Option<CommAction> {
        match self {
            Step::Comm { sender, receiver, label, .. } => {
                Some(CommAction::new(sender.clone(), label.clone(), receiver.clone()))
            }
            Step::Cond { .. } => None,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Comm { sender, receiver, label, value } => write!(f, "{sender} --{label}({value})--> {receiver}"),
            Step::Cond { participant, branch } => write!(f, "{participant} --if({branch})"),
        }
    }
}

/// Every successor of `state`, in a deterministic order.
pub fn step_all(state: &SessionState) -> Vec<(Step, SessionState)> {
    let mut out = Vec::new();
    for (p, m) in &state.members {
        if let Process::If { cond, then_branch, else_branch } = &m.term {
            for v in eval_all(cond) {
                let Value::Bool(b) = v else { continue };
                let next = if b { then_branch } else { else_branch };
                let succ = state.update([(p.clone(), Member::new(next, &m.defs))]);
                out.push((Step::Cond { participant: p.clone(), branch: b }, succ));
            }
            continue;
        }
        for summand in m.term.summands() {
            let Process::Input { from: q, label, var, body } = summand else { continue };
            let Some(sender) = state.members.get(q) else { continue };
            let Process::Output { to, label: sent, payload, body: rest } = &sender.term else { continue };
            if to != p || sent != label {
                continue;
            }
            for v in eval_all(payload) {
                let succ = state.update([
                    (p.clone(), Member::new(&body.substitute(var, &v.to_expr()), &m.defs)),
                    (q.clone(), Member::new(rest, &sender.defs)),
                ]);
                let step = Step::Comm { sender: q.clone(), receiver: p.clone(), label: label.clone(), value: v };
                out.push((step, succ));
            }
        }
    }
    out
}

/// A path through the state graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionTrace {
    pub initial: SessionState,
    pub steps: Vec<(Step, SessionState)>,
}

impl ReductionTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &SessionState {
        self.steps.last().map(|(_, s)| s).unwrap_or(&self.initial)
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (step, _)) in self.steps.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SearchVerdict {
    /// Every maximal path ends with all members terminated.
    Terminated,
    /// A reachable state is stuck; the trace is a shortest path to one.
    StuckFound(ReductionTrace),
    /// The whole state graph was explored: no stuck state, but cycles.
    NoStuckWithinFuel { explored: usize },
    /// The state budget ran out before the graph was exhausted.
    Diverged { fuel: usize },
}

impl SearchVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            SearchVerdict::Terminated => "terminated",
            SearchVerdict::StuckFound(_) => "stuckFound",
            SearchVerdict::NoStuckWithinFuel { .. } => "noStuckWithinFuel",
            SearchVerdict::Diverged { .. } => "diverged",
        }
    }

    pub fn is_stuck(&self) -> bool {
        matches!(self, SearchVerdict::StuckFound(_))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StuckReport {
    pub verdict: SearchVerdict,
    /// Distinct states visited.
    pub explored: usize,
    /// A shortest path to a terminated state, if one was reached.
    pub completion: Option<ReductionTrace>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Error)]
#[error("fuel must be positive")]
pub struct FuelMisuse;

/// Breadth-first search of the states reachable from `start`, visiting at
/// most `fuel` distinct states.
pub fn stuck_search(start: &SessionState, fuel: usize) -> Result<StuckReport, FuelMisuse> {
    if fuel == 0 {
        return Err(FuelMisuse);
    }
    let mut states = vec![start.clone()];
    let mut index = HashMap::from([(start.clone(), 0usize)]);
    let mut parent: Vec<Option<(usize, Step)>> = vec![None];
    let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    let mut completion = None;
    let trace_to = |states: &[SessionState], parent: &[Option<(usize, Step)>], mut i: usize| {
        let mut steps = Vec::new();
        while let Some((prev, step)) = &parent[i] {
            steps.push((step.clone(), states[i].clone()));
            i = *prev;
        }
        steps.reverse();
        ReductionTrace { initial: states[0].clone(), steps }
    };
    while let Some(i) = queue.pop_front() {
        if states[i].is_terminated() {
            if completion.is_none() {
                completion = Some(trace_to(&states, &parent, i));
            }
            continue;
        }
        let successors = step_all(&states[i]);
        if successors.is_empty() {
            let witness = trace_to(&states, &parent, i);
            return Ok(StuckReport { verdict: SearchVerdict::StuckFound(witness), explored: states.len(), completion });
        }
        for (step, next) in successors {
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if states.len() >= fuel {
                        let verdict = SearchVerdict::Diverged { fuel };
                        return Ok(StuckReport { verdict, explored: states.len(), completion });
                    }
                    let j = states.len();
                    index.insert(next.clone(), j);
                    states.push(next);
                    parent.push(Some((i, step)));
                    edges.push(Vec::new());
                    queue.push_back(j);
                    j
                }
            };
            edges[i].push(j);
        }
    }
    let verdict = if has_cycle(&edges) {
        SearchVerdict::NoStuckWithinFuel { explored: states.len() }
    } else {
        SearchVerdict::Terminated
    };
    Ok(StuckReport { verdict, explored: states.len(), completion })
}

fn has_cycle(edges: &[Vec<usize>]) -> bool {
    let mut indegree = vec![0usize; edges.len()];
    for targets in edges {
        for &j in targets {
            indegree[j] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..edges.len()).filter(|&i| indegree[i] == 0).collect();
    let mut removed = 0;
    while let Some(i) = ready.pop() {
        removed += 1;
        for &j in &edges[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(j);
            }
        }
    }
    removed < edges.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_session;

    fn state(text: &str) -> SessionState {
        SessionState::new(&parse_session(text).unwrap())
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(state("@p q?b(x).0 + q?a(x).0 || @q 0"), state("@q 0 || @p q?a(x).0 + q?b(x).0"));
        assert_eq!(state("@p 0 || @q 0"), state("@r 0"));
        assert!(state("@p 0 || @q 0").is_terminated());
        assert!(!state("@p q!l(5).0").is_terminated());
        assert_eq!(state("@p mu X. q!a(1).X"), state("@p q!a(1). mu X. q!a(1).X"));
    }

    #[test]
    fn single_communication() {
        let steps = step_all(&state("@p q?l(x).0 || @q p!l(5).0"));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0.to_string(), "q --l(5)--> p");
        assert!(steps[0].1.is_terminated());
    }

    #[test]
    fn stuck_guard_has_no_step() {
        assert!(step_all(&state("@p if succ -5 > 0 then 0 else 0")).is_empty());
        assert!(step_all(&state("@cl add!l1(5).0 || @add cl?l2(x).0")).is_empty());
    }

    #[test]
    fn choices_fork() {
        let steps = step_all(&state("@p q?l(x).0 || @q p!l(5 (+) 6).0"));
        assert_eq!(steps.len(), 2);
        let steps = step_all(&state("@p if true (+) false then 0 else q!a(1).0"));
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].0.rule(), "f-conditional");
        assert_eq!(steps[1].0.rule(), "t-conditional");
    }

    #[test]
    fn search_verdicts() {
        let report = stuck_search(&state("@p 0"), 10).unwrap();
        assert_eq!(report.verdict, SearchVerdict::Terminated);
        let report = stuck_search(&state("@p q?l(x).r!m(x).0 || @q p!l(5).0"), 10).unwrap();
        let SearchVerdict::StuckFound(trace) = report.verdict else { panic!() };
        assert_eq!(trace.len(), 1);
        let report = stuck_search(&state("@p mu X. q!a(1).X || @q mu Y. p?a(x).Y"), 10).unwrap();
        assert_eq!(report.verdict.name(), "noStuckWithinFuel");
        let report = stuck_search(&state("@p mu X. q!a(1).q!a(2).X || @q mu Y. p?a(x).Y"), 1).unwrap();
        assert_eq!(report.verdict, SearchVerdict::Diverged { fuel: 1 });
        assert_eq!(stuck_search(&state("@p 0"), 0), Err(FuelMisuse));
    }

    #[test]
    fn values_flow_into_loops() {
        // The loop rebinds `x` each round and sends it back.
        let s = state("@p mu X. q?a(x). q!b(x). X || @q p!a(1). p?b(y). p!a(succ y). p?b(z). 0");
        let report = stuck_search(&s, 100).unwrap();
        let SearchVerdict::StuckFound(trace) = report.verdict else { panic!("{:?}", report.verdict) };
        assert_eq!(trace.to_string(), "q --a(1)--> p\np --b(1)--> q\nq --a(2)--> p\np --b(2)--> q");
    }

    #[test]
    fn shadowed_loop_names_stay_apart() {
        // The inner `Y` must not capture the jump back to the outer one.
        let s = state("@p mu Y. q!a(1). mu Z. (q?b(x).Y + q?c(x). mu Y. q!d(2).Z) || @q p?a(x). p!c(1). p?d(y). p!b(1). p?a(z). 0");
        let SearchVerdict::StuckFound(trace) = stuck_search(&s, 100).unwrap().verdict else { panic!() };
        assert_eq!(trace.len(), 5);
        assert_eq!(trace.to_string().lines().last(), Some("p --a(1)--> q"));
    }
}
