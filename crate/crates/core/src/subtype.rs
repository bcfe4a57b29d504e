//! The coinductive subtyping procedure and the inductive negation of
//! subtyping, with derivations as evidence.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::expr::subsort;
use crate::graph::{Node, NodeId, Terms, TypeGraph};
use crate::syntax::{regular_tree_eq, Label, Participant, Polarity, Recursive, SessionType, Sort};

/// Decides `left <= right`.
pub fn sub(left: &SessionType, right: &SessionType) -> bool {
    left == right || sub_stats(left, right).holds
}

/// Outcome of one subtyping query with the size of its assumption set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubStats {
    pub holds: bool,
    /// Pairs of graph nodes assumed related.
    pub assumed: usize,
    /// Distinct head-unfolded subterms of each side.
    pub left_nodes: usize,
    pub right_nodes: usize,
}

/// Decides `left <= right`, reporting how many pairs were assumed.
pub fn sub_stats(left: &SessionType, right: &SessionType) -> SubStats {
    let mut graph = TypeGraph::new();
    let a = graph.add(left);
    let left_nodes = graph.len();
    let b = graph.add(right);
    let mut checker = SubChecker { graph: &graph, assumed: HashSet::new() };
    let holds = checker.check(a, b);
    SubStats { holds, assumed: checker.assumed.len(), left_nodes, right_nodes: graph.len() - left_nodes }
}

/// Decides `a <= b` for two nodes of one graph.
pub(crate) fn sub_nodes(graph: &TypeGraph, a: NodeId, b: NodeId) -> bool {
    SubChecker { graph, assumed: HashSet::new() }.check(a, b)
}

/// The memoized subtyping procedure over graph nodes. Identical nodes are
/// equal regular trees and related outright. The assumption set holds the
/// pairs visited so far; since the procedure only conjoins premises, a
/// single failure decides the whole query and it never needs rolling back.
struct SubChecker<'g> {
    graph: &'g TypeGraph,
    assumed: HashSet<(NodeId, NodeId)>,
}

impl SubChecker<'_> {
    fn check(&mut self, a: NodeId, b: NodeId) -> bool {
        if a == b || !self.assumed.insert((a, b)) {
            return true;
        }
        match (self.graph.node(a), self.graph.node(b)) {
            (Node::End, Node::End) => true,
            (
                Node::Comm { polarity: Polarity::In, peer: p, branches: xs },
                Node::Comm { polarity: Polarity::In, peer: q, branches: ys },
            ) if p == q => ys.iter().all(|(label, sort, y)| match find(xs, label) {
                Some((_, xsort, x)) => subsort(*sort, *xsort) && self.check(*x, *y),
                None => false,
            }),
            (
                Node::Comm { polarity: Polarity::Out, peer: p, branches: xs },
                Node::Comm { polarity: Polarity::Out, peer: q, branches: ys },
            ) if p == q => xs.iter().all(|(label, sort, x)| match find(ys, label) {
                Some((_, ysort, y)) => subsort(*sort, *ysort) && self.check(*x, *y),
                None => false,
            }),
            _ => false,
        }
    }
}

fn find<'a>(branches: &'a [(Label, Sort, NodeId)], label: &Label) -> Option<&'a (Label, Sort, NodeId)> {
    branches.binary_search_by(|b| b.0.cmp(label)).ok().map(|i| &branches[i])
}

/// Rules of the negation of subtyping.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum NsubRule {
    EndL,
    EndR,
    DiffPart,
    OutIn,
    InOut,
    InIn,
    OutOut,
    IntR,
    UniL,
    IntLUniR,
}

impl NsubRule {
    pub fn name(self) -> &'static str {
        match self {
            NsubRule::EndL => "nsub-endL",
            NsubRule::EndR => "nsub-endR",
            NsubRule::DiffPart => "nsub-diff-part",
            NsubRule::OutIn => "nsub-out-in",
            NsubRule::InOut => "nsub-in-out",
            NsubRule::InIn => "nsub-in-in",
            NsubRule::OutOut => "nsub-out-out",
            NsubRule::IntR => "nsub-intR",
            NsubRule::UniL => "nsub-uniL",
            NsubRule::IntLUniR => "nsub-intL-uniR",
        }
    }
}

impl fmt::Display for NsubRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which premise justifies an `in-in` or `out-out` node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Mismatch {
    /// The label of the single prefix is missing on the other side.
    Label(Label),
    /// Sorts are incomparable in the required direction.
    Sort { label: Label, found: Sort, required: Sort },
    /// The continuations are not related; the node has one child.
    Continuation(Label),
}

/// A finite derivation of `left ⋬ right`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NsubDerivation {
    pub rule: NsubRule,
    pub left: SessionType,
    pub right: SessionType,
    pub mismatch: Option<Mismatch>,
    pub children: Vec<NsubDerivation>,
}

impl NsubDerivation {
    #[cfg(test)]
    fn leaf(rule: NsubRule, left: &SessionType, right: &SessionType) -> Self {
        Self { rule, left: left.clone(), right: right.clone(), mismatch: None, children: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(NsubDerivation::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(NsubDerivation::size).sum::<usize>()
    }

    /// Re-checks every node against the premises of its rule.
    pub fn verify(&self) -> Result<(), String> {
        let fail = |why: &str| Err(format!("{} at `{}` vs `{}`: {why}", self.rule, self.left, self.right));
        let (a, b) = (self.left.unfold_head(), self.right.unfold_head());
        let comm = |t: &SessionType| match t {
            SessionType::Comm { polarity, peer, branches } => Some((*polarity, peer.clone(), branches.len())),
            _ => None,
        };
        let child_count = self.children.len();
        match self.rule {
            NsubRule::EndL => {
                if !b.is_end() || a.is_end() || child_count > 0 {
                    return fail("needs a non-end left and end right");
                }
            }
            NsubRule::EndR => {
                if !a.is_end() || b.is_end() || child_count > 0 {
                    return fail("needs end left and a non-end right");
                }
            }
            NsubRule::DiffPart | NsubRule::OutIn | NsubRule::InOut => {
                let (Some((pa, qa, _)), Some((pb, qb, _))) = (comm(&a), comm(&b)) else {
                    return fail("needs two prefixes");
                };
                let ok = match self.rule {
                    NsubRule::DiffPart => qa != qb,
                    NsubRule::OutIn => qa == qb && pa == Polarity::Out && pb == Polarity::In,
                    _ => qa == qb && pa == Polarity::In && pb == Polarity::Out,
                };
                if !ok || child_count > 0 {
                    return fail("participants or directions do not fit the rule");
                }
            }
            NsubRule::InIn | NsubRule::OutOut => {
                let (Some((pa, qa, na)), Some((pb, qb, nb))) = (comm(&a), comm(&b)) else {
                    return fail("needs two prefixes");
                };
                let polarity = if self.rule == NsubRule::InIn { Polarity::In } else { Polarity::Out };
                // The single prefix is on the right for inputs and on the left for outputs.
                let (single, wide, single_len) = if polarity == Polarity::In { (&b, &a, nb) } else { (&a, &b, na) };
                if pa != polarity || pb != polarity || qa != qb || single_len != 1 {
                    return fail("shape does not fit the rule");
                }
                let SessionType::Comm { branches, .. } = single else { unreachable!() };
                let s = &branches[0];
                match (&self.mismatch, wide.branch(&s.label)) {
                    (Some(Mismatch::Label(l)), None) if *l == s.label && child_count == 0 => {}
                    (Some(Mismatch::Sort { label, .. }), Some(w)) if *label == s.label && child_count == 0 => {
                        let related = if polarity == Polarity::In { subsort(s.sort, w.sort) } else { subsort(s.sort, w.sort) };
                        if related {
                            return fail("sorts are related");
                        }
                    }
                    (Some(Mismatch::Continuation(label)), Some(w)) if *label == s.label && child_count == 1 => {
                        let c = &self.children[0];
                        let (l, r) = if polarity == Polarity::In { (&w.cont, &s.cont) } else { (&s.cont, &w.cont) };
                        if !regular_tree_eq(&c.left, l) || !regular_tree_eq(&c.right, r) {
                            return fail("child does not relate the continuations");
                        }
                    }
                    _ => return fail("premise does not hold"),
                }
            }
            NsubRule::IntR | NsubRule::UniL => {
                let (target, polarity) = if self.rule == NsubRule::IntR { (&b, Polarity::In) } else { (&a, Polarity::Out) };
                match comm(target) {
                    Some((p, _, n)) if p == polarity && n >= 2 => {}
                    _ => return fail("needs an intersection on the right or a union on the left"),
                }
                let [c] = self.children.as_slice() else { return fail("needs exactly one child") };
                let components = target.components();
                let ok = if self.rule == NsubRule::IntR {
                    regular_tree_eq(&c.left, &self.left) && components.iter().any(|t| regular_tree_eq(&c.right, t))
                } else {
                    regular_tree_eq(&c.right, &self.right) && components.iter().any(|t| regular_tree_eq(&c.left, t))
                };
                if !ok {
                    return fail("child is not a component");
                }
            }
            NsubRule::IntLUniR => {
                match (comm(&a), comm(&b)) {
                    (Some((Polarity::In, _, _)), Some((Polarity::Out, _, _))) => {}
                    _ => return fail("needs an intersection left and a union right"),
                }
                let (ls, rs) = (a.components(), b.components());
                if child_count != ls.len() * rs.len() {
                    return fail("needs one child per pair of components");
                }
                for (k, c) in self.children.iter().enumerate() {
                    let (i, j) = (k / rs.len(), k % rs.len());
                    if !regular_tree_eq(&c.left, &ls[i]) || !regular_tree_eq(&c.right, &rs[j]) {
                        return fail("children do not enumerate the component pairs");
                    }
                }
            }
        }
        self.children.iter().try_for_each(NsubDerivation::verify)
    }

    fn write_tree(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        write!(f, "{:indent$}{}: {}  ⋬  {}", "", self.rule, self.left, self.right, indent = indent)?;
        match &self.mismatch {
            Some(Mismatch::Label(l)) => write!(f, "  [label {l} unmatched]")?,
            Some(Mismatch::Sort { label, found, required }) => {
                write!(f, "  [{label}: {found} is not a subsort of {required}]")?
            }
            Some(Mismatch::Continuation(l)) => write!(f, "  [continuation of {l}]")?,
            None => {}
        }
        for c in &self.children {
            writeln!(f)?;
            c.write_tree(f, indent + 2)?;
        }
        Ok(())
    }
}

impl fmt::Display for NsubDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_tree(f, 0)
    }
}

/// Searches for a derivation of `left ⋬ right`; `None` means
/// `left <= right`.
///
/// Every pair reachable through rule premises is collected first. Each
/// applicable rule instance is a clause "pair holds if all children
/// hold"; derivable pairs are then the least fixed point, computed by
/// propagating from premise-free instances. A pair records the instance
/// that first made it derivable, so the extracted tree is well-founded.
pub fn nsub(left: &SessionType, right: &SessionType) -> Option<NsubDerivation> {
    let mut graph = TypeGraph::new();
    let a = View::whole(graph.add(left));
    let b = View::whole(graph.add(right));
    let tree = NsubSearch::new(&graph).derive((a, b))?;
    let mut d = tree.materialize(&mut Terms::new(&graph));
    // The root reports the types as given rather than their graph nodes.
    (d.left, d.right) = (left.clone(), right.clone());
    Some(d)
}

/// A node, or one branch of it read as a single prefix.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct View {
    id: NodeId,
    only: Option<usize>,
}

impl View {
    fn whole(id: NodeId) -> Self {
        View { id, only: None }
    }
}

type Pair = (View, View);

/// A derivation over views, turned into closed types once found.
struct Tree {
    rule: NsubRule,
    left: View,
    right: View,
    mismatch: Option<Mismatch>,
    children: Vec<Rc<Tree>>,
}

impl Tree {
    fn materialize(&self, terms: &mut Terms<'_>) -> NsubDerivation {
        NsubDerivation {
            rule: self.rule,
            left: view_term(terms, self.left),
            right: view_term(terms, self.right),
            mismatch: self.mismatch.clone(),
            children: self.children.iter().map(|c| c.materialize(terms)).collect(),
        }
    }
}

fn view_term(terms: &mut Terms<'_>, view: View) -> SessionType {
    let t = terms.get(view.id);
    match view.only {
        Some(k) => t.components().swap_remove(k),
        None => t,
    }
}

/// One rule instance: the pair holds if every child does.
struct Instance {
    rule: NsubRule,
    mismatch: Option<Mismatch>,
    children: Vec<Pair>,
}

impl Instance {
    fn new(rule: NsubRule, mismatch: Option<Mismatch>, children: Vec<Pair>) -> Self {
        Instance { rule, mismatch, children }
    }

    fn leaf(rule: NsubRule) -> Self {
        Instance::new(rule, None, Vec::new())
    }
}

/// A view's head: `None` for `end`.
type Head<'g> = Option<(Polarity, &'g Participant, &'g [(Label, Sort, NodeId)])>;

struct NsubSearch<'g> {
    graph: &'g TypeGraph,
    index: HashMap<Pair, usize>,
    pairs: Vec<Pair>,
    instances: Vec<Vec<Instance>>,
}

impl<'g> NsubSearch<'g> {
    fn new(graph: &'g TypeGraph) -> Self {
        NsubSearch { graph, index: HashMap::new(), pairs: Vec::new(), instances: Vec::new() }
    }

    fn head(&self, view: View) -> Head<'g> {
        match self.graph.node(view.id) {
            Node::End => None,
            Node::Comm { polarity, peer, branches } => {
                let branches = match view.only {
                    Some(k) => &branches[k..=k],
                    None => &branches[..],
                };
                Some((*polarity, peer, branches))
            }
        }
    }

    fn intern(&mut self, pair: Pair) -> usize {
        if let Some(&i) = self.index.get(&pair) {
            return i;
        }
        let i = self.pairs.len();
        self.index.insert(pair, i);
        self.pairs.push(pair);
        i
    }

    fn derive(mut self, root: Pair) -> Option<Rc<Tree>> {
        self.intern(root);
        let mut next = 0;
        while next < self.pairs.len() {
            let (a, b) = self.pairs[next];
            let instances = self.rules(a, b);
            for inst in &instances {
                for child in &inst.children {
                    self.intern(*child);
                }
            }
            self.instances.push(instances);
            next += 1;
        }
        // Premises still missing per instance, and who waits on each pair.
        let mut missing: Vec<Vec<usize>> =
            self.instances.iter().map(|is| is.iter().map(|i| i.children.len()).collect()).collect();
        let mut waiting: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.pairs.len()];
        let mut chosen: Vec<Option<usize>> = vec![None; self.pairs.len()];
        let mut ready = Vec::new();
        for (p, instances) in self.instances.iter().enumerate() {
            for (k, inst) in instances.iter().enumerate() {
                for child in &inst.children {
                    waiting[self.index[child]].push((p, k));
                }
                if inst.children.is_empty() && chosen[p].is_none() {
                    chosen[p] = Some(k);
                    ready.push(p);
                }
            }
        }
        while let Some(c) = ready.pop() {
            for &(p, k) in &waiting[c] {
                missing[p][k] -= 1;
                if missing[p][k] == 0 && chosen[p].is_none() {
                    chosen[p] = Some(k);
                    ready.push(p);
                }
            }
        }
        chosen[0]?;
        Some(self.extract(0, &chosen, &mut HashMap::new()))
    }

    fn extract(&self, p: usize, chosen: &[Option<usize>], built: &mut HashMap<usize, Rc<Tree>>) -> Rc<Tree> {
        if let Some(t) = built.get(&p) {
            return t.clone();
        }
        let inst = &self.instances[p][chosen[p].expect("derived pair")];
        let children = inst.children.iter().map(|c| self.extract(self.index[c], chosen, built)).collect();
        let (left, right) = self.pairs[p];
        let tree = Rc::new(Tree { rule: inst.rule, left, right, mismatch: inst.mismatch.clone(), children });
        built.insert(p, tree.clone());
        tree
    }

    /// The rule instances that apply to a pair, in the order: `end`
    /// rules; rules on two single prefixes; `intR`; `uniL`; `intL-uniR`;
    /// and the remaining shapes with the wider side read n-ary.
    fn rules(&self, a: View, b: View) -> Vec<Instance> {
        let (Some((pa, qa, xs)), Some((pb, qb, ys))) = (self.head(a), self.head(b)) else {
            return match (self.head(a), self.head(b)) {
                (None, None) => Vec::new(),
                (_, None) => vec![Instance::leaf(NsubRule::EndL)],
                _ => vec![Instance::leaf(NsubRule::EndR)],
            };
        };
        let components = |v: View, n: usize| (0..n).map(move |k| View { id: v.id, only: Some(k) });
        if xs.len() == 1 && ys.len() == 1 {
            if qa != qb {
                return vec![Instance::leaf(NsubRule::DiffPart)];
            }
            return match (pa, pb) {
                (Polarity::Out, Polarity::In) => vec![Instance::leaf(NsubRule::OutIn)],
                (Polarity::In, Polarity::Out) => vec![Instance::leaf(NsubRule::InOut)],
                _ => vec![self.prefix_rule(pa, a, b)],
            };
        }
        if pb == Polarity::In && ys.len() > 1 {
            return components(b, ys.len()).map(|c| Instance::new(NsubRule::IntR, None, vec![(a, c)])).collect();
        }
        if pa == Polarity::Out && xs.len() > 1 {
            return components(a, xs.len()).map(|c| Instance::new(NsubRule::UniL, None, vec![(c, b)])).collect();
        }
        if pa == Polarity::In && pb == Polarity::Out {
            let children =
                components(a, xs.len()).flat_map(|l| components(b, ys.len()).map(move |r| (l, r))).collect();
            return vec![Instance::new(NsubRule::IntLUniR, None, children)];
        }
        // Left: an intersection or a single output. Right: a single input
        // or a union. The wider side is read n-ary.
        if qa != qb {
            return vec![Instance::leaf(NsubRule::DiffPart)];
        }
        match (pa, pb) {
            (Polarity::Out, Polarity::In) => vec![Instance::leaf(NsubRule::OutIn)],
            _ => vec![self.prefix_rule(pa, a, b)],
        }
    }

    /// `in-in` (single input on the right) or `out-out` (single output on
    /// the left).
    fn prefix_rule(&self, polarity: Polarity, a: View, b: View) -> Instance {
        let (rule, single, wide) = match polarity {
            Polarity::In => (NsubRule::InIn, b, a),
            Polarity::Out => (NsubRule::OutOut, a, b),
        };
        let (Some((_, _, singles)), Some((_, _, wides))) = (self.head(single), self.head(wide)) else {
            unreachable!("prefixes expected")
        };
        let (label, sort, s_cont) = &singles[0];
        let Some((_, w_sort, w_cont)) = find(wides, label) else {
            return Instance::new(rule, Some(Mismatch::Label(label.clone())), Vec::new());
        };
        // Inputs are contravariant: the right sort must be below the left.
        // Outputs are covariant: the left sort must be below the right.
        if !subsort(*sort, *w_sort) {
            let mismatch = Mismatch::Sort { label: label.clone(), found: *sort, required: *w_sort };
            return Instance::new(rule, Some(mismatch), Vec::new());
        }
        let (l, r) = match polarity {
            Polarity::In => (*w_cont, *s_cont),
            Polarity::Out => (*s_cont, *w_cont),
        };
        Instance::new(rule, Some(Mismatch::Continuation(label.clone())), vec![(View::whole(l), View::whole(r))])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Leq,
    Nleq(NsubDerivation),
}

impl Verdict {
    pub fn is_leq(&self) -> bool {
        matches!(self, Verdict::Leq)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("internal error: subtyping and its negation {0} for `{1}` and `{2}`")]
pub struct InternalError(pub &'static str, pub SessionType, pub SessionType);

/// Exactly one of `left <= right` and `left ⋬ right`, with evidence for
/// the latter.
pub fn decide(left: &SessionType, right: &SessionType) -> Result<Verdict, InternalError> {
    let holds = sub(left, right);
    match (holds, nsub(left, right)) {
        (true, None) => Ok(Verdict::Leq),
        (false, Some(d)) => Ok(Verdict::Nleq(d)),
        (true, Some(_)) => Err(InternalError("both hold", left.clone(), right.clone())),
        (false, None) => Err(InternalError("both fail", left.clone(), right.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_session_type;

    fn t(text: &str) -> SessionType {
        parse_session_type(text).unwrap()
    }

    fn nleq_rule(a: &str, b: &str) -> NsubRule {
        match decide(&t(a), &t(b)).unwrap() {
            Verdict::Nleq(d) => {
                d.verify().unwrap();
                d.rule
            }
            Verdict::Leq => panic!("{a} <= {b}"),
        }
    }

    #[test]
    fn subtyping_examples() {
        assert!(sub(&SessionType::End, &SessionType::End));
        assert!(sub(
            &t("add!l1(nat).add!l2(nat).add?l3(int).end"),
            &t("add!l1(int).add!l2(int).add?l3(int).end")
        ));
        assert!(sub(&t("p?l1(int).end & p?l2(bool).end"), &t("p?l1(nat).end")));
        assert!(sub(&t("mu t. p!l(nat).t"), &t("mu t. p!l(int).p!l(int).t")));
        assert!(!sub(&t("p?l1(nat).end"), &t("p?l1(int).end")));
        assert!(sub(&t("p!a(nat).end"), &t("p!a(int).end \\/ p!b(bool).end")));
        assert!(!sub(&t("p!a(nat).end \\/ p!b(bool).end"), &t("p!a(int).end")));
    }

    #[test]
    fn negation_examples() {
        assert_eq!(nleq_rule("p?l(nat).end", "p?l(int).end"), NsubRule::InIn);
        assert_eq!(nleq_rule("add!l1(int).add!l2(int).end", "add!l2(int).add!l1(int).end"), NsubRule::OutOut);
        assert!(nsub(&SessionType::End, &SessionType::End).is_none());
        assert_eq!(nleq_rule("end", "mu t. p?l(nat).t"), NsubRule::EndR);
        assert_eq!(nleq_rule("q!l(nat).end", "p?l(nat).end"), NsubRule::DiffPart);
        assert_eq!(nleq_rule("p!l(nat).end", "end"), NsubRule::EndL);
        assert_eq!(nleq_rule("p!l(nat).end", "p?l(nat).end"), NsubRule::OutIn);
        assert_eq!(nleq_rule("p?l(nat).end", "p!l(nat).end"), NsubRule::InOut);
        assert_eq!(nleq_rule("p?a(nat).end", "p?a(nat).end & p?b(nat).end"), NsubRule::IntR);
        assert_eq!(nleq_rule("p!a(nat).end \\/ p!b(nat).end", "p!a(nat).end"), NsubRule::UniL);
        assert_eq!(nleq_rule("p?a(nat).end & p?b(nat).end", "p!a(nat).end \\/ p!b(nat).end"), NsubRule::IntLUniR);
        assert_eq!(nleq_rule("p?a(nat).end & p?b(nat).end", "p?c(nat).end"), NsubRule::InIn);
    }

    #[test]
    fn continuation_mismatch_nests() {
        let Verdict::Nleq(d) = decide(&t("p?l(nat).q!m(nat).end"), &t("p?l(nat).q!m(bool).end")).unwrap() else {
            panic!()
        };
        assert_eq!(d.rule, NsubRule::InIn);
        assert_eq!(d.children[0].rule, NsubRule::OutOut);
        assert_eq!(d.depth(), 2);
        assert!(d.to_string().contains("nsub-out-out"));
    }

    #[test]
    fn recursive_types() {
        let a = t("mu t. p!l(nat).t");
        let b = t("mu t. p!l(int).t");
        assert!(decide(&a, &b).unwrap().is_leq());
        assert!(!decide(&b, &a).unwrap().is_leq());
        let eventually = t("mu t. p?a(nat).t & p?b(nat).end");
        assert!(decide(&eventually, &t("mu t. p?a(nat).t")).unwrap().is_leq());
        assert!(!decide(&t("mu t. p?a(nat).t"), &eventually).unwrap().is_leq());
    }

    #[test]
    fn verify_rejects_forged_nodes() {
        let forged = NsubDerivation::leaf(NsubRule::EndL, &SessionType::End, &SessionType::End);
        assert!(forged.verify().is_err());
        let forged = NsubDerivation::leaf(NsubRule::DiffPart, &t("p?a(nat).end"), &t("p?a(nat).end"));
        assert!(forged.verify().is_err());
    }
}
