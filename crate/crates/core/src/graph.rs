//! Session types compiled to finite graphs: one node per communication or
//! `end`, recursion variables resolved to edges back to their binder.

use std::collections::HashMap;
use std::rc::Rc;

use crate::syntax::{Label, Participant, Polarity, Recursive, SessionType, Sort, TypeVar};

pub(crate) type NodeId = usize;

#[derive(Clone, Debug)]
pub(crate) enum Node {
    End,
    Comm { polarity: Polarity, peer: Participant, branches: Vec<(Label, Sort, NodeId)> },
}

/// Where a node comes from: a root term and the branch indices leading
/// to its subterm, recursion binders skipped.
#[derive(Debug)]
struct Origin {
    root: usize,
    path: Rc<[usize]>,
}

enum Raw {
    Link(Option<usize>),
    Node(Node, Origin),
}

#[derive(Debug, Default)]
pub(crate) struct TypeGraph {
    nodes: Vec<Node>,
    origins: Vec<Origin>,
    roots: Vec<SessionType>,
}

impl TypeGraph {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    /// Adds a closed guarded type and returns its root.
    pub(crate) fn add(&mut self, t: &SessionType) -> NodeId {
        let mut raw = Vec::new();
        let origin = self.roots.len();
        self.roots.push(t.clone());
        let root = build(t, &mut Vec::new(), &mut Vec::new(), origin, &mut raw);
        let resolve = |mut i: usize| loop {
            match &raw[i] {
                Raw::Link(Some(j)) => i = *j,
                Raw::Link(None) => panic!("unguarded or open type `{t}`"),
                Raw::Node(..) => return i,
            }
        };
        let mut index = vec![usize::MAX; raw.len()];
        let mut next = self.nodes.len();
        for (i, r) in raw.iter().enumerate() {
            if matches!(r, Raw::Node(..)) {
                index[i] = next;
                next += 1;
            }
        }
        let targets: Vec<usize> = (0..raw.len()).map(|i| index[resolve(i)]).collect();
        for r in raw {
            if let Raw::Node(node, origin) = r {
                let node = match node {
                    Node::End => Node::End,
                    Node::Comm { polarity, peer, branches } => Node::Comm {
                        polarity,
                        peer,
                        branches: branches.into_iter().map(|(l, s, c)| (l, s, targets[c])).collect(),
                    },
                };
                self.nodes.push(node);
                self.origins.push(origin);
            }
        }
        targets[root]
    }

    pub(crate) fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    /// The closed type the node stands for.
    pub(crate) fn term(&self, id: NodeId) -> SessionType {
        let origin = &self.origins[id];
        let mut t = &self.roots[origin.root];
        let mut binders = Vec::new();
        let mut path = origin.path.iter();
        loop {
            match t {
                SessionType::Rec(v, body) => {
                    binders.push((v, t));
                    t = body;
                }
                SessionType::Comm { branches, .. } => match path.next() {
                    Some(&k) => t = &branches[k].cont,
                    None => break,
                },
                _ => break,
            }
        }
        let mut closed = t.clone();
        for (v, rec) in binders.into_iter().rev() {
            closed = closed.substitute(v, rec);
        }
        closed
    }
}

fn build(
    t: &SessionType,
    env: &mut Vec<(TypeVar, usize)>,
    path: &mut Vec<usize>,
    root: usize,
    raw: &mut Vec<Raw>,
) -> usize {
    let origin = |path: &[usize]| Origin { root, path: Rc::from(path) };
    match t {
        SessionType::End => {
            raw.push(Raw::Node(Node::End, origin(path)));
            raw.len() - 1
        }
        SessionType::Var(v) => match env.iter().rev().find(|(w, _)| w == v) {
            Some((_, slot)) => *slot,
            None => panic!("unbound type variable `{v}`"),
        },
        SessionType::Rec(v, body) => {
            let slot = raw.len();
            raw.push(Raw::Link(None));
            env.push((v.clone(), slot));
            let target = build(body, env, path, root, raw);
            env.pop();
            raw[slot] = Raw::Link(Some(target));
            slot
        }
        SessionType::Comm { polarity, peer, branches } => {
            let slot = raw.len();
            raw.push(Raw::Link(None));
            let mut children = Vec::with_capacity(branches.len());
            for (k, b) in branches.iter().enumerate() {
                path.push(k);
                children.push((b.label.clone(), b.sort, build(&b.cont, env, path, root, raw)));
                path.pop();
            }
            let node = Node::Comm { polarity: *polarity, peer: peer.clone(), branches: children };
            raw[slot] = Raw::Node(node, origin(path));
            slot
        }
    }
}

/// Memoized closed terms of graph nodes.
pub(crate) struct Terms<'g> {
    graph: &'g TypeGraph,
    cache: HashMap<NodeId, SessionType>,
}

impl<'g> Terms<'g> {
    pub(crate) fn new(graph: &'g TypeGraph) -> Self {
        Self { graph, cache: HashMap::new() }
    }

    pub(crate) fn get(&mut self, id: NodeId) -> SessionType {
        if let Some(t) = self.cache.get(&id) {
            return t.clone();
        }
        let t = self.graph.term(id);
        self.cache.insert(id, t.clone());
        t
    }
}
