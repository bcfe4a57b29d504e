use std::collections::BTreeMap;

use super::{Participant, Process, SyntaxError};

/// A multiparty session: participants paired with their processes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Session {
    members: BTreeMap<Participant, Process>,
}

impl Session {
    /// Builds a session, rejecting duplicate participants, empty sessions,
    /// self-communication and ill-formed recursion.
    pub fn new(entries: impl IntoIterator<Item = (Participant, Process)>) -> Result<Self, SyntaxError> {
        let mut members = BTreeMap::new();
        for (p, proc) in entries {
            proc.validate()?;
            if proc.participants().contains(&p) {
                return Err(SyntaxError::SelfCommunication(p));
            }
            if members.insert(p.clone(), proc).is_some() {
                return Err(SyntaxError::DuplicateParticipant(p));
            }
        }
        if members.is_empty() {
            return Err(SyntaxError::EmptySession);
        }
        Ok(Self { members })
    }

    /// Builds a session without validation; used by the runtime for
    /// states derived from a valid session (possibly empty).
    pub(crate) fn from_map_unchecked(members: BTreeMap<Participant, Process>) -> Self {
        Self { members }
    }

    pub fn get(&self, p: &Participant) -> Option<&Process> {
        self.members.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Participant, &Process)> {
        self.members.iter()
    }

    pub fn participants(&self) -> impl Iterator<Item = &Participant> {
        self.members.keys()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &BTreeMap<Participant, Process> {
        &self.members
    }

    pub fn into_members(self) -> BTreeMap<Participant, Process> {
        self.members
    }
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Expr;

    #[test]
    fn rejects_self_communication_and_duplicates() {
        let p = Participant::new("p");
        let talk = Process::output("p", "l", Expr::Nat(1), Process::Inact);
        assert_eq!(
            Session::new([(p.clone(), talk)]),
            Err(SyntaxError::SelfCommunication(p.clone()))
        );
        assert_eq!(
            Session::new([(p.clone(), Process::Inact), (p.clone(), Process::Inact)]),
            Err(SyntaxError::DuplicateParticipant(p))
        );
        assert_eq!(Session::new([]), Err(SyntaxError::EmptySession));
    }
}
