//! Abstract syntax of the calculus: expressions, processes, multiparty
//! sessions, session types and global types.
//!
//! Recursion uses named binders. Types are equi-recursive: two types are
//! considered equal when they unfold to the same regular tree, which is
//! decided by [`regular_tree_eq`]. All semantic algorithms work on demand
//! through [`Recursive::unfold_head`]; infinite trees are never built.

mod expr;
mod global_type;
pub mod names;
mod process;
mod session;
mod session_type;

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

pub use expr::Expr;
pub use global_type::GlobalType;
pub use names::{Label, Participant, ProcVar, TypeVar, Var};
pub use process::Process;
pub use session::Session;
pub use session_type::{Polarity, SessionType};

/// Ground sorts of message payloads.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sort {
    Nat,
    Int,
    Bool,
}

impl Sort {
    pub const ALL: [Sort; 3] = [Sort::Nat, Sort::Int, Sort::Bool];
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Nat => "nat",
            Sort::Int => "int",
            Sort::Bool => "bool",
        })
    }
}

/// One labelled alternative of a session or global type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Branch<K> {
    pub label: Label,
    pub sort: Sort,
    pub cont: K,
}

impl<K> Branch<K> {
    pub fn new(label: impl Into<Label>, sort: Sort, cont: K) -> Self {
        Self { label: label.into(), sort, cont }
    }
}

/// Violations of the well-formedness invariants of syntax values.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("duplicate label `{0}` in one branch list")]
    DuplicateLabel(Label),
    #[error("empty branch list")]
    EmptyBranches,
    #[error("unguarded recursion on `{0}`")]
    UnguardedRecursion(String),
    #[error("unbound recursion variable `{0}`")]
    UnboundVariable(String),
    #[error("participant `{0}` communicates with itself")]
    SelfCommunication(Participant),
    #[error("participant `{0}` appears twice in the session")]
    DuplicateParticipant(Participant),
    #[error("a session needs at least one participant")]
    EmptySession,
}

/// Sorts a branch list by label and rejects duplicates.
pub(crate) fn canonical_branches<K>(mut branches: Vec<Branch<K>>) -> Result<Vec<Branch<K>>, SyntaxError> {
    if branches.is_empty() {
        return Err(SyntaxError::EmptyBranches);
    }
    branches.sort_by(|a, b| a.label.cmp(&b.label));
    if let Some(w) = branches.windows(2).find(|w| w[0].label == w[1].label) {
        return Err(SyntaxError::DuplicateLabel(w[0].label.clone()));
    }
    Ok(branches)
}

pub(crate) fn find_branch<'a, K>(branches: &'a [Branch<K>], label: &Label) -> Option<&'a Branch<K>> {
    branches
        .binary_search_by(|b| b.label.cmp(label))
        .ok()
        .map(|i| &branches[i])
}

/// The outermost constructor of a term.
pub enum Shape<'a, T: Recursive> {
    Rec(&'a TypeVar, &'a T),
    Var(&'a TypeVar),
    /// Everything but the children, and the children in order.
    Node(T::Head, Vec<&'a T>),
}

/// Operations shared by the two equi-recursive type languages.
pub trait Recursive: Clone + Eq + Hash {
    /// A constructor with its labels and sorts, children left out.
    type Head: Eq;

    fn as_rec(&self) -> Option<(&TypeVar, &Self)>;

    fn shape(&self) -> Shape<'_, Self>;

    /// Capture-avoiding substitution of `replacement` for the free
    /// occurrences of `var`.
    fn substitute(&self, var: &TypeVar, replacement: &Self) -> Self;

    /// Number of `Rec` nodes; bounds the unfoldings needed to expose a head.
    fn rec_count(&self) -> usize;

    /// One unfolding step: `mu t. B` becomes `B[mu t. B / t]`; identity on
    /// every other constructor.
    fn unfold(&self) -> Self {
        match self.as_rec() {
            Some((var, body)) => body.substitute(var, self),
            None => self.clone(),
        }
    }

    /// Unfolds until the head is not a binder.
    ///
    /// Panics on unguarded recursion such as `mu t. t`.
    fn unfold_head(&self) -> Self {
        if self.as_rec().is_none() {
            return self.clone();
        }
        let limit = self.rec_count() + 1;
        let mut current = self.clone();
        for _ in 0..=limit {
            if current.as_rec().is_none() {
                return current;
            }
            current = current.unfold();
        }
        panic!("unguarded recursion while unfolding a type");
    }
}

/// Decides whether two guarded terms denote the same regular tree. Both
/// are compiled to graphs whose nodes are their constructor positions,
/// with bound variables as edges back to the binder; free variables are
/// leaves. Bisimilar roots are equal trees.
pub fn regular_tree_eq<T: Recursive>(a: &T, b: &T) -> bool {
    if a == b {
        return true;
    }
    let mut graph = HeadGraph::default();
    let x = graph.add(a);
    let y = graph.add(b);
    let mut seen = HashSet::new();
    let mut pending = vec![(x, y)];
    while let Some((x, y)) = pending.pop() {
        if x == y || !seen.insert((x, y)) {
            continue;
        }
        let ((hx, cx), (hy, cy)) = (&graph.nodes[x], &graph.nodes[y]);
        if hx != hy || cx.len() != cy.len() {
            return false;
        }
        pending.extend(cx.iter().copied().zip(cy.iter().copied()));
    }
    true
}

enum HeadNode<T: Recursive> {
    Leaf(TypeVar),
    Node(T::Head),
}

impl<T: Recursive> PartialEq for HeadNode<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (HeadNode::Leaf(a), HeadNode::Leaf(b)) => a == b,
            (HeadNode::Node(a), HeadNode::Node(b)) => a == b,
            _ => false,
        }
    }
}

struct HeadGraph<T: Recursive> {
    /// Each node's head, for comparison, and its children.
    nodes: Vec<(HeadNode<T>, Vec<usize>)>,
}

impl<T: Recursive> Default for HeadGraph<T> {
    fn default() -> Self {
        Self { nodes: Vec::new() }
    }
}

impl<T: Recursive> HeadGraph<T> {
    fn add(&mut self, t: &T) -> usize {
        // Slots are nodes or links to the node a binder stands for.
        let mut slots: Vec<Result<(HeadNode<T>, Vec<usize>), Option<usize>>> = Vec::new();
        let root = Self::build(t, &mut Vec::new(), &mut slots);
        let resolve = |mut i: usize| {
            for _ in 0..=slots.len() {
                match &slots[i] {
                    Err(Some(j)) => i = *j,
                    Err(None) => break,
                    Ok(_) => return i,
                }
            }
            panic!("unguarded recursion in a type")
        };
        let targets: Vec<usize> = (0..slots.len()).map(resolve).collect();
        let mut index = vec![usize::MAX; slots.len()];
        let mut next = self.nodes.len();
        for (i, slot) in slots.iter().enumerate() {
            if slot.is_ok() {
                index[i] = next;
                next += 1;
            }
        }
        for slot in slots.into_iter().flatten() {
            let (head, children) = slot;
            let children = children.into_iter().map(|c| index[targets[c]]).collect();
            self.nodes.push((head, children));
        }
        index[targets[root]]
    }

    fn build(
        t: &T,
        env: &mut Vec<(TypeVar, usize)>,
        slots: &mut Vec<Result<(HeadNode<T>, Vec<usize>), Option<usize>>>,
    ) -> usize {
        match t.shape() {
            Shape::Var(v) => match env.iter().rev().find(|(w, _)| w == v) {
                Some((_, slot)) => *slot,
                None => {
                    slots.push(Ok((HeadNode::Leaf(v.clone()), Vec::new())));
                    slots.len() - 1
                }
            },
            Shape::Rec(v, body) => {
                let slot = slots.len();
                slots.push(Err(None));
                env.push((v.clone(), slot));
                let target = Self::build(body, env, slots);
                env.pop();
                slots[slot] = Err(Some(target));
                slot
            }
            Shape::Node(head, children) => {
                let slot = slots.len();
                slots.push(Err(None));
                let children = children.into_iter().map(|c| Self::build(c, env, slots)).collect();
                slots[slot] = Ok((HeadNode::Node(head), children));
                slot
            }
        }
    }
}

/// Fresh name derived from `base` that is not in `avoid`.
pub(crate) fn fresh_name(base: &str, avoid: impl Fn(&str) -> bool) -> String {
    (0..)
        .map(|i| format!("{base}_{i}"))
        .find(|candidate| !avoid(candidate))
        .expect("unbounded name supply")
}
