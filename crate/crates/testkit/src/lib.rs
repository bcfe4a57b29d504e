//! Seeded generators of session types, global types and well-typed
//! processes for property tests.

use mpst::{
    check_session, consume, is_projectable, project_all, step_all, SessionState, Branch, Expr, GlobalType, Label, Participant, Polarity, ProcVar, Process, Session,
    SessionType, Sort, TypeVar, Var,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as TestRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size bounds for generated types.
#[derive(Clone, Debug)]
pub struct Shape {
    pub participants: Vec<Participant>,
    pub labels: Vec<Label>,
    /// Maximum nesting of communications.
    pub depth: usize,
    /// Chance of introducing a recursion binder at a position.
    pub rec_chance: f64,
}

impl Shape {
    pub fn new(participants: usize, labels: usize, depth: usize) -> Self {
        let names = ["p", "q", "r", "s", "u"];
        assert!(participants <= names.len());
        Self {
            participants: names[..participants].iter().map(|n| Participant::new(n)).collect(),
            labels: (1..=labels).map(|i| Label::new(format!("l{i}"))).collect(),
            depth,
            rec_chance: 0.2,
        }
    }

    pub fn with_rec_chance(mut self, chance: f64) -> Self {
        self.rec_chance = chance;
        self
    }
}

fn sort(rng: &mut impl Rng) -> Sort {
    *Sort::ALL.choose(rng).unwrap()
}

fn label_subset(rng: &mut impl Rng, labels: &[Label]) -> Vec<Label> {
    let k = rng.gen_range(1..=labels.len());
    let mut chosen: Vec<Label> = labels.choose_multiple(rng, k).cloned().collect();
    chosen.sort();
    chosen
}

/// A closed guarded session type within `shape`.
pub fn session_type(rng: &mut impl Rng, shape: &Shape) -> SessionType {
    let mut vars = Vec::new();
    stype(rng, shape, shape.depth, &mut vars, false)
}

/// `guarded`: a communication separates this position from the binders
/// in `vars`.
fn stype(rng: &mut impl Rng, shape: &Shape, depth: usize, vars: &mut Vec<TypeVar>, guarded: bool) -> SessionType {
    if depth == 0 || rng.gen_bool(0.12) {
        return match vars.choose(rng) {
            Some(v) if guarded && rng.gen_bool(0.6) => SessionType::Var(v.clone()),
            _ => SessionType::End,
        };
    }
    if guarded && !vars.is_empty() && rng.gen_bool(0.15) {
        return SessionType::Var(vars.choose(rng).unwrap().clone());
    }
    if rng.gen_bool(shape.rec_chance) {
        let v = TypeVar::new(format!("t{}", vars.len()));
        vars.push(v.clone());
        let body = stype(rng, shape, depth, vars, false);
        vars.pop();
        return SessionType::rec(v, body);
    }
    let polarity = if rng.gen_bool(0.5) { Polarity::In } else { Polarity::Out };
    let peer = shape.participants.choose(rng).unwrap().clone();
    let branches = label_subset(rng, &shape.labels)
        .into_iter()
        .map(|l| Branch::new(l, sort(rng), stype(rng, shape, depth - 1, vars, true)))
        .collect();
    SessionType::comm(polarity, peer, branches).unwrap()
}

/// A supertype of `t`: inputs may lose branches and narrow their sorts,
/// outputs may gain branches and widen theirs.
pub fn widen(rng: &mut impl Rng, shape: &Shape, t: &SessionType) -> SessionType {
    match t {
        SessionType::Comm { polarity, peer, branches } => {
            let mut out: Vec<Branch<SessionType>> = Vec::new();
            for b in branches {
                if *polarity == Polarity::In && out.len() + 1 < branches.len() && rng.gen_bool(0.2) {
                    continue;
                }
                let sort = match (polarity, b.sort) {
                    (Polarity::In, Sort::Int) if rng.gen_bool(0.3) => Sort::Nat,
                    (Polarity::Out, Sort::Nat) if rng.gen_bool(0.3) => Sort::Int,
                    (_, s) => s,
                };
                out.push(Branch::new(b.label.clone(), sort, widen(rng, shape, &b.cont)));
            }
            if *polarity == Polarity::In && out.is_empty() {
                let b = &branches[0];
                out.push(Branch::new(b.label.clone(), b.sort, widen(rng, shape, &b.cont)));
            }
            if *polarity == Polarity::Out && rng.gen_bool(0.2) {
                if let Some(l) = shape.labels.iter().find(|l| !out.iter().any(|b| b.label == **l)) {
                    out.push(Branch::new(l.clone(), sort(rng), SessionType::End));
                }
            }
            SessionType::comm(*polarity, peer.clone(), out).unwrap()
        }
        SessionType::Rec(v, body) => SessionType::rec(v.clone(), widen(rng, shape, body)),
        other => other.clone(),
    }
}

/// One local change somewhere in `t`; the result is still closed and
/// guarded but usually unrelated by subtyping.
pub fn mutate(rng: &mut impl Rng, shape: &Shape, t: &SessionType) -> SessionType {
    let mut positions = 0;
    count_comms(t, &mut positions);
    if positions == 0 {
        let mut vars = Vec::new();
        return stype(rng, shape, 2, &mut vars, false);
    }
    let target = rng.gen_range(0..positions);
    let mut seen = 0;
    mutate_at(rng, shape, t, target, &mut seen)
}

fn count_comms(t: &SessionType, n: &mut usize) {
    match t {
        SessionType::Comm { branches, .. } => {
            *n += 1;
            branches.iter().for_each(|b| count_comms(&b.cont, n));
        }
        SessionType::Rec(_, body) => count_comms(body, n),
        _ => {}
    }
}

fn mutate_at(rng: &mut impl Rng, shape: &Shape, t: &SessionType, target: usize, seen: &mut usize) -> SessionType {
    match t {
        SessionType::Comm { polarity, peer, branches } => {
            let here = *seen == target;
            *seen += 1;
            let mut branches: Vec<Branch<SessionType>> = branches
                .iter()
                .map(|b| Branch::new(b.label.clone(), b.sort, mutate_at(rng, shape, &b.cont, target, seen)))
                .collect();
            let (mut polarity, mut peer) = (*polarity, peer.clone());
            if here {
                match rng.gen_range(0..6) {
                    0 => polarity = polarity.dual(),
                    1 => peer = shape.participants.choose(rng).unwrap().clone(),
                    2 => {
                        let i = rng.gen_range(0..branches.len());
                        branches[i].sort = sort(rng);
                    }
                    3 if branches.len() > 1 => {
                        let i = rng.gen_range(0..branches.len());
                        branches.remove(i);
                    }
                    4 => {
                        if let Some(l) = shape.labels.iter().find(|l| !branches.iter().any(|b| b.label == **l)) {
                            branches.push(Branch::new(l.clone(), sort(rng), SessionType::End));
                        }
                    }
                    _ => {
                        let i = rng.gen_range(0..branches.len());
                        branches[i].cont = SessionType::End;
                    }
                }
            }
            SessionType::comm(polarity, peer, branches).unwrap()
        }
        SessionType::Rec(v, body) => SessionType::rec(v.clone(), mutate_at(rng, shape, body, target, seen)),
        other => other.clone(),
    }
}

/// A pair of closed guarded types: independent, a supertype, or a
/// mutation of a supertype, in roughly equal parts.
pub fn type_pair(rng: &mut impl Rng, shape: &Shape) -> (SessionType, SessionType) {
    let t = session_type(rng, shape);
    let u = match rng.gen_range(0..3) {
        0 => session_type(rng, shape),
        1 => widen(rng, shape, &t),
        _ => {
            let w = widen(rng, shape, &t);
            mutate(rng, shape, &w)
        }
    };
    if rng.gen_bool(0.5) {
        (t, u)
    } else {
        (u, t)
    }
}

/// A closed guarded global type within `shape`; not necessarily
/// projectable.
pub fn global_type(rng: &mut impl Rng, shape: &Shape) -> GlobalType {
    let mut vars = Vec::new();
    gtype(rng, shape, shape.depth, &mut vars, false)
}

fn gtype(rng: &mut impl Rng, shape: &Shape, depth: usize, vars: &mut Vec<TypeVar>, guarded: bool) -> GlobalType {
    if depth == 0 || rng.gen_bool(0.1) {
        return match vars.choose(rng) {
            Some(v) if guarded && rng.gen_bool(0.6) => GlobalType::Var(v.clone()),
            _ => GlobalType::End,
        };
    }
    if rng.gen_bool(shape.rec_chance) {
        let v = TypeVar::new(format!("t{}", vars.len()));
        vars.push(v.clone());
        let body = gtype(rng, shape, depth, vars, false);
        vars.pop();
        return GlobalType::rec(v, body);
    }
    let mut ends = shape.participants.choose_multiple(rng, 2);
    let (from, to) = (ends.next().unwrap().clone(), ends.next().unwrap().clone());
    let labels = if rng.gen_bool(0.6) { vec![shape.labels.choose(rng).unwrap().clone()] } else { label_subset(rng, &shape.labels) };
    let branches = labels.into_iter().map(|l| Branch::new(l, sort(rng), gtype(rng, shape, depth - 1, vars, true))).collect();
    GlobalType::comm(from, to, branches).unwrap()
}

/// A projectable global type with at least one communication, by
/// rejection sampling.
pub fn projectable_global(rng: &mut impl Rng, shape: &Shape) -> GlobalType {
    loop {
        let g = global_type(rng, shape);
        if !g.participants().is_empty() && is_projectable(&g) {
            return g;
        }
    }
}

/// A process of type `t`, with extra untyped-by-`t` summands, branch
/// subsets for unions and payloads of smaller sorts.
pub fn inhabitant(rng: &mut impl Rng, t: &SessionType, literal_payloads: bool) -> Process {
    let mut scope = Vec::new();
    let mut counter = 0;
    inhabit(rng, t, literal_payloads, &mut scope, &mut counter)
}

fn literal(rng: &mut impl Rng, s: Sort) -> Expr {
    match s {
        Sort::Nat => Expr::Nat(rng.gen_range(0..10)),
        Sort::Int => {
            if rng.gen_bool(0.5) {
                Expr::Int(-rng.gen_range(1..10))
            } else {
                Expr::neg(Expr::Nat(rng.gen_range(0..10)))
            }
        }
        Sort::Bool => Expr::Bool(rng.gen_bool(0.5)),
    }
}

fn payload(rng: &mut impl Rng, s: Sort, literal_only: bool, scope: &[(String, Sort)]) -> Expr {
    let usable: Vec<&String> = scope
        .iter()
        .filter(|(_, v)| *v == s || (*v == Sort::Nat && s == Sort::Int))
        .map(|(x, _)| x)
        .collect();
    if !literal_only && !usable.is_empty() && rng.gen_bool(0.5) {
        let x = Expr::var(usable.choose(rng).unwrap().as_str());
        return match s {
            Sort::Nat if rng.gen_bool(0.3) => Expr::succ(x),
            _ => x,
        };
    }
    let narrow = if s == Sort::Int && rng.gen_bool(0.3) { Sort::Nat } else { s };
    literal(rng, narrow)
}

fn inhabit(
    rng: &mut impl Rng,
    t: &SessionType,
    literal_only: bool,
    scope: &mut Vec<(String, Sort)>,
    counter: &mut usize,
) -> Process {
    match t {
        SessionType::Comm { polarity: Polarity::In, peer, branches } => {
            let mut summands: Vec<Process> = branches
                .iter()
                .map(|b| {
                    let x = format!("x{}", *counter);
                    *counter += 1;
                    scope.push((x.clone(), b.sort));
                    let body = inhabit(rng, &b.cont, literal_only, scope, counter);
                    scope.pop();
                    Process::input(peer.clone(), b.label.clone(), x.as_str(), body)
                })
                .collect();
            if rng.gen_bool(0.2) {
                summands.push(Process::input(peer.clone(), "extra", "z", Process::Inact));
            }
            summands.shuffle(rng);
            Process::sum(summands)
        }
        SessionType::Comm { polarity: Polarity::Out, peer, branches } => {
            let k = rng.gen_range(1..=branches.len());
            let chosen: Vec<&Branch<SessionType>> = branches.choose_multiple(rng, k).collect();
            let mut outputs = chosen.into_iter().map(|b| {
                let e = payload(rng, b.sort, literal_only, scope);
                Process::output(peer.clone(), b.label.clone(), e, inhabit(rng, &b.cont, literal_only, scope, counter))
            });
            let first = outputs.next().unwrap();
            let rest: Vec<Process> = outputs.collect();
            rest.into_iter().fold(first, |acc, p| Process::cond(Expr::choice(Expr::Bool(true), Expr::Bool(false)), acc, p))
        }
        SessionType::Rec(v, body) => {
            Process::rec(ProcVar::new(format!("X_{v}")), inhabit(rng, body, literal_only, scope, counter))
        }
        SessionType::Var(v) => Process::var(ProcVar::new(format!("X_{v}"))),
        SessionType::End => Process::Inact,
    }
}

/// An arbitrary expression over `vars`; usually ill-typed.
pub fn expr(rng: &mut impl Rng, depth: usize, vars: &[Var]) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 if !vars.is_empty() => Expr::Var(vars.choose(rng).unwrap().clone()),
            0 | 1 => Expr::Nat(rng.gen_range(0..10)),
            2 => Expr::Int(-rng.gen_range(1..10)),
            _ => Expr::Bool(rng.gen_bool(0.5)),
        };
    }
    let sub = |rng: &mut _| expr(rng, depth - 1, vars);
    match rng.gen_range(0..5) {
        0 => Expr::succ(sub(rng)),
        1 => Expr::neg(sub(rng)),
        2 => Expr::not(sub(rng)),
        3 => Expr::choice(sub(rng), sub(rng)),
        _ => Expr::gt(sub(rng), sub(rng)),
    }
}

/// An expression whose sort is below `sort` under `scope`.
pub fn typed_expr(rng: &mut impl Rng, sort: Sort, depth: usize, scope: &[(Var, Sort)]) -> Expr {
    let usable: Vec<&Var> = scope.iter().filter(|(_, s)| mpst::subsort(*s, sort)).map(|(x, _)| x).collect();
    if depth == 0 || rng.gen_bool(0.25) {
        if !usable.is_empty() && rng.gen_bool(0.4) {
            return Expr::Var((*usable.choose(rng).unwrap()).clone());
        }
        let narrow = if sort == Sort::Int && rng.gen_bool(0.4) { Sort::Nat } else { sort };
        return literal(rng, narrow);
    }
    let d = depth - 1;
    if rng.gen_bool(0.25) {
        return Expr::choice(typed_expr(rng, sort, d, scope), typed_expr(rng, sort, d, scope));
    }
    match sort {
        Sort::Nat => Expr::succ(typed_expr(rng, Sort::Nat, d, scope)),
        Sort::Int => Expr::neg(typed_expr(rng, Sort::Int, d, scope)),
        Sort::Bool => {
            if rng.gen_bool(0.5) {
                Expr::not(typed_expr(rng, Sort::Bool, d, scope))
            } else {
                Expr::gt(typed_expr(rng, Sort::Int, d, scope), typed_expr(rng, Sort::Int, d, scope))
            }
        }
    }
}

/// A session typed by `g`: one inhabitant of each projection. Panics if
/// `g` is not projectable.
pub fn session_for(rng: &mut impl Rng, g: &GlobalType, literal_payloads: bool) -> Session {
    let members = project_all(g)
        .expect("projectable global type")
        .into_iter()
        .map(|(p, t)| (p, inhabitant(rng, &t, literal_payloads)));
    Session::new(members).expect("inhabitants form a session")
}

/// `p` with the summands of every external choice reordered.
pub fn shuffle_summands(rng: &mut impl Rng, p: &Process) -> Process {
    match p {
        Process::Choice(items) => {
            let mut items: Vec<Process> = items.iter().map(|q| shuffle_summands(rng, q)).collect();
            items.shuffle(rng);
            Process::sum(items)
        }
        Process::Input { from, label, var, body } => {
            Process::input(from.clone(), label.clone(), var.clone(), shuffle_summands(rng, body))
        }
        Process::Output { to, label, payload, body } => {
            Process::output(to.clone(), label.clone(), payload.clone(), shuffle_summands(rng, body))
        }
        Process::If { cond, then_branch, else_branch } => {
            Process::cond(cond.clone(), shuffle_summands(rng, then_branch), shuffle_summands(rng, else_branch))
        }
        Process::Rec(x, body) => Process::rec(x.clone(), shuffle_summands(rng, body)),
        Process::Var(_) | Process::Inact => p.clone(),
    }
}

/// The concrete syntax of `m` with its members in random order.
pub fn shuffled_session_text(rng: &mut impl Rng, m: &Session) -> String {
    let mut parts: Vec<String> =
        m.iter().map(|(p, proc)| format!("@{p} {}", shuffle_summands(rng, proc))).collect();
    parts.shuffle(rng);
    parts.join(" || ")
}

/// Statistics of a typed exploration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Explored {
    pub pairs: usize,
    pub steps: usize,
    pub terminated: usize,
}

/// Explores the states reachable from `m` together with the global type
/// each one should follow. Every state must type against its global
/// type (subject reduction) and every non-terminated state must have a
/// step (progress). Stops after `fuel` distinct pairs.
pub fn explore_typed(m: &Session, g: &GlobalType, fuel: usize) -> Result<Explored, String> {
    use std::collections::{HashSet, VecDeque};
    check_session(m, g).map_err(|e| format!("initial state: {e}"))?;
    let start = SessionState::new(m);
    let mut seen = HashSet::from([(start.clone(), g.clone())]);
    let mut queue = VecDeque::from([(start, g.clone())]);
    let mut stats = Explored::default();
    while let Some((state, g)) = queue.pop_front() {
        stats.pairs += 1;
        if stats.pairs > fuel {
            break;
        }
        let next = step_all(&state);
        if next.is_empty() {
            if state.is_terminated() {
                stats.terminated += 1;
                continue;
            }
            return Err(format!("stuck state {state} following {g}"));
        }
        for (step, successor) in next {
            stats.steps += 1;
            let g_next = match step.action() {
                Some(a) => consume(&g, &a).map_err(|e| format!("{state} --{step}: {e} in {g}"))?,
                None => g.clone(),
            };
            if !successor.is_terminated() {
                check_session(&successor.session(), &g_next)
                    .map_err(|e| format!("after {step} from {state}: {e}\nstate {successor}\nglobal {g_next}"))?;
            }
            if seen.insert((successor.clone(), g_next.clone())) {
                queue.push_back((successor, g_next));
            }
        }
    }
    Ok(stats)
}
