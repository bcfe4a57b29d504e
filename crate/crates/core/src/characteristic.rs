//! Characteristic global types and processes, and the harnesses that turn
//! a subtyping verdict into an executable safety or stuckness check.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::global::{project, ProjectionError};
use crate::runtime::{stuck_search, FuelMisuse, SearchVerdict, SessionState, StuckReport};
use crate::subtype::{decide, sub, InternalError, NsubDerivation, Verdict};
use crate::syntax::{
    Branch, Expr, GlobalType, Participant, Polarity, ProcVar, Process, Session, SessionType, Sort, SyntaxError,
    TypeVar,
};
use crate::typing::{check_process, check_session, Env, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("participant `{0}` already occurs in the type")]
    ParticipantClash(Participant),
    #[error("internal error: {0}")]
    Projection(#[from] ProjectionError),
    #[error("internal error: {0}")]
    Session(#[from] SyntaxError),
    #[error(transparent)]
    Decide(#[from] InternalError),
    #[error(transparent)]
    Fuel(#[from] FuelMisuse),
}

/// The global type whose projection on `p` is `t`. After each exchange
/// with some `q`, a round of `bool` messages carrying the same label runs
/// through the participants of `t`, starting at `q`.
pub fn char_global(t: &SessionType, p: &Participant) -> Result<GlobalType, CharError> {
    let ring: Vec<Participant> = t.participants().into_iter().collect();
    if ring.contains(p) {
        return Err(CharError::ParticipantClash(p.clone()));
    }
    Ok(char_global_with(t, p, &ring, true))
}

/// Like [`char_global`], optionally without the cyclic rounds.
pub fn char_global_with(t: &SessionType, p: &Participant, ring: &[Participant], cyclic: bool) -> GlobalType {
    match t {
        SessionType::Comm { polarity, peer, branches } => {
            let start = ring.iter().position(|q| q == peer).expect("peer is a participant of the type");
            let branches = branches
                .iter()
                .map(|b| {
                    let mut cont = char_global_with(&b.cont, p, ring, cyclic);
                    if cyclic && ring.len() > 1 {
                        // Built back to front: the last hop returns to the start.
                        for k in (0..ring.len()).rev() {
                            let from = &ring[(start + k) % ring.len()];
                            let to = &ring[(start + k + 1) % ring.len()];
                            cont = GlobalType::message(from.clone(), to.clone(), b.label.clone(), Sort::Bool, cont);
                        }
                    }
                    Branch::new(b.label.clone(), b.sort, cont)
                })
                .collect();
            let (from, to) = match polarity {
                Polarity::In => (peer.clone(), p.clone()),
                Polarity::Out => (p.clone(), peer.clone()),
            };
            GlobalType::comm(from, to, branches).expect("p is not a participant of the type")
        }
        SessionType::Rec(v, body) => GlobalType::rec(v.clone(), char_global_with(body, p, ring, cyclic)),
        SessionType::Var(v) => GlobalType::Var(v.clone()),
        SessionType::End => GlobalType::End,
    }
}

/// Recursion variable of the characteristic process for type variable `t`.
pub fn loop_var(t: &TypeVar) -> ProcVar {
    ProcVar::new(format!("X_{t}"))
}

/// The canonical inhabitant of `t`: inputs test the received value with
/// a guard that is stuck on values of a wider sort, outputs send `5`,
/// `-5` or `true`, unions choose nondeterministically.
pub fn char_proc(t: &SessionType) -> Process {
    match t {
        SessionType::Comm { polarity: Polarity::In, peer, branches } => Process::sum(branches.iter().map(|b| {
            let x = Expr::var("x");
            let guard = match b.sort {
                Sort::Nat => Expr::gt(Expr::succ(x), Expr::Nat(0)),
                Sort::Int => Expr::gt(Expr::neg(x), Expr::Nat(0)),
                Sort::Bool => Expr::not(x),
            };
            let cont = char_proc(&b.cont);
            Process::input(peer.clone(), b.label.clone(), "x", Process::cond(guard, cont.clone(), cont))
        })),
        SessionType::Comm { polarity: Polarity::Out, peer, branches } => {
            let mut outputs = branches.iter().map(|b| {
                let value = match b.sort {
                    Sort::Nat => Expr::Nat(5),
                    Sort::Int => Expr::Int(-5),
                    Sort::Bool => Expr::Bool(true),
                };
                Process::output(peer.clone(), b.label.clone(), value, char_proc(&b.cont))
            });
            let last = outputs.next_back().expect("unions are non-empty");
            outputs.rev().fold(last, |rest, first| {
                Process::cond(Expr::choice(Expr::Bool(true), Expr::Bool(false)), first, rest)
            })
        }
        SessionType::Rec(v, body) => Process::rec(loop_var(v), char_proc(body)),
        SessionType::Var(v) => Process::var(loop_var(v)),
        SessionType::End => Process::Inact,
    }
}

/// The first of `_c0`, `_c1`, ... not among the participants of `types`.
pub fn fresh_participant<'a>(types: impl IntoIterator<Item = &'a SessionType>) -> Participant {
    let taken: BTreeSet<Participant> = types.into_iter().flat_map(SessionType::participants).collect();
    (0..)
        .map(|i| Participant::new(format!("_c{i}")))
        .find(|p| !taken.contains(p))
        .expect("infinitely many candidates")
}

/// The characteristic processes of the projections of `G(t_prime, p)`
/// on the participants of `t_prime`.
fn environment(t_prime: &SessionType, p: &Participant) -> Result<(GlobalType, Vec<(Participant, Process)>), CharError> {
    let g = char_global(t_prime, p)?;
    let members = t_prime
        .participants()
        .into_iter()
        .map(|q| Ok((q.clone(), char_proc(&project(&g, &q)?))))
        .collect::<Result<Vec<_>, CharError>>()?;
    Ok((g, members))
}

/// `p` running `P(t)` against the characteristic environment of
/// `t_prime`.
pub fn counterexample_session(t: &SessionType, t_prime: &SessionType, p: &Participant) -> Result<Session, CharError> {
    if t.participants().contains(p) {
        return Err(CharError::ParticipantClash(p.clone()));
    }
    let (_, mut members) = environment(t_prime, p)?;
    members.push((p.clone(), char_proc(t)));
    Ok(Session::new(members)?)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    /// The run agrees with the subtyping verdict.
    Confirmed,
    /// The run contradicts it.
    Violated,
    /// The search ran out of fuel.
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct PrecisenessReport {
    pub participant: Participant,
    pub verdict: Verdict,
    pub session: Session,
    /// For `leq`: the environment typed with `P(t_prime)` in place.
    pub typed: Option<Result<(), TypeError>>,
    pub search: StuckReport,
}

impl PrecisenessReport {
    pub fn derivation(&self) -> Option<&NsubDerivation> {
        match &self.verdict {
            Verdict::Nleq(d) => Some(d),
            Verdict::Leq => None,
        }
    }

    pub fn outcome(&self) -> Outcome {
        match (&self.verdict, &self.search.verdict) {
            (_, SearchVerdict::Diverged { .. }) => Outcome::FuelExhausted,
            (Verdict::Leq, v) => {
                if v.is_stuck() || matches!(self.typed, Some(Err(_))) {
                    Outcome::Violated
                } else {
                    Outcome::Confirmed
                }
            }
            (Verdict::Nleq(_), v) => {
                if v.is_stuck() {
                    Outcome::Confirmed
                } else {
                    Outcome::Violated
                }
            }
        }
    }
}

/// Runs `P(t)` in the characteristic environment of `t_prime`. When
/// `t <= t_prime` the session must never get stuck; otherwise it must.
pub fn preciseness_check(t: &SessionType, t_prime: &SessionType, fuel: usize) -> Result<PrecisenessReport, CharError> {
    let verdict = decide(t, t_prime)?;
    let p = fresh_participant([t, t_prime]);
    let session = counterexample_session(t, t_prime, &p)?;
    let typed = match verdict {
        Verdict::Leq => {
            let (g, mut members) = environment(t_prime, &p)?;
            members.push((p.clone(), char_proc(t_prime)));
            Some(check_session(&Session::new(members)?, &g))
        }
        Verdict::Nleq(_) => None,
    };
    let search = stuck_search(&SessionState::new(&session), fuel)?;
    Ok(PrecisenessReport { participant: p, verdict, session, typed, search })
}

/// `⊢ P(t) : t_prime` implies `t <= t_prime`.
pub fn denotational_probe(t: &SessionType, t_prime: &SessionType) -> bool {
    check_process(&Env::new(), &char_proc(t), t_prime).is_err() || sub(t, t_prime)
}
