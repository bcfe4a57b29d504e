use std::collections::BTreeSet;

use super::Var;

/// Expressions. `Choice` is the nondeterministic `e1 (+) e2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(Var),
    Nat(u64),
    Int(i64),
    Bool(bool),
    Succ(Box<Expr>),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Choice(Box<Expr>, Box<Expr>),
    Gt(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<Var>) -> Self {
        Expr::Var(name.into())
    }

    /// Literal for an integer, tagged `Nat` when non-negative.
    pub fn number(n: i64) -> Self {
        if n >= 0 {
            Expr::Nat(n as u64)
        } else {
            Expr::Int(n)
        }
    }

    pub fn succ(e: Expr) -> Self {
        Expr::Succ(Box::new(e))
    }

    pub fn neg(e: Expr) -> Self {
        Expr::Neg(Box::new(e))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn choice(a: Expr, b: Expr) -> Self {
        Expr::Choice(Box::new(a), Box::new(b))
    }

    pub fn gt(a: Expr, b: Expr) -> Self {
        Expr::Gt(Box::new(a), Box::new(b))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Expr::Nat(_) | Expr::Int(_) | Expr::Bool(_))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Nat(_) | Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Succ(e) | Expr::Neg(e) | Expr::Not(e) => e.collect_vars(out),
            Expr::Choice(a, b) | Expr::Gt(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn mentions(&self, x: &Var) -> bool {
        match self {
            Expr::Var(y) => y == x,
            Expr::Nat(_) | Expr::Int(_) | Expr::Bool(_) => false,
            Expr::Succ(e) | Expr::Neg(e) | Expr::Not(e) => e.mentions(x),
            Expr::Choice(a, b) | Expr::Gt(a, b) => a.mentions(x) || b.mentions(x),
        }
    }

    /// Replaces every occurrence of `x` by `value`.
    pub fn substitute(&self, x: &Var, value: &Expr) -> Expr {
        match self {
            Expr::Var(y) if y == x => value.clone(),
            Expr::Var(_) | Expr::Nat(_) | Expr::Int(_) | Expr::Bool(_) => self.clone(),
            Expr::Succ(e) => Expr::succ(e.substitute(x, value)),
            Expr::Neg(e) => Expr::neg(e.substitute(x, value)),
            Expr::Not(e) => Expr::not(e.substitute(x, value)),
            Expr::Choice(a, b) => Expr::choice(a.substitute(x, value), b.substitute(x, value)),
            Expr::Gt(a, b) => Expr::gt(a.substitute(x, value), b.substitute(x, value)),
        }
    }

    /// Number of `(+)` nodes.
    pub fn choice_count(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Nat(_) | Expr::Int(_) | Expr::Bool(_) => 0,
            Expr::Succ(e) | Expr::Neg(e) | Expr::Not(e) => e.choice_count(),
            Expr::Choice(a, b) => 1 + a.choice_count() + b.choice_count(),
            Expr::Gt(a, b) => a.choice_count() + b.choice_count(),
        }
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}
