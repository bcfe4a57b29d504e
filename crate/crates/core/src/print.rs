//! ASCII printer for the concrete grammar. Output parses back to the same
//! value; parentheses are emitted only where the grammar needs them.

use std::fmt::{self, Display, Formatter, Write};

use crate::syntax::{Expr, GlobalType, Process, Session, SessionType};

/// Where a term is printed. `Top` allows everything bare, `Tail` is a
/// prefix continuation (a bare choice would capture later summands), and
/// `Closed` is a summand, where a bare binder or conditional would swallow
/// the rest of the sum.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Tail,
    Closed,
}

impl Ctx {
    fn continuation(self) -> Ctx {
        if self == Ctx::Closed {
            Ctx::Closed
        } else {
            Ctx::Tail
        }
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

/// Levels: 0 comparison, 1 choice, 2 unary, 3 atom.
fn write_expr(f: &mut Formatter<'_>, e: &Expr, level: u8) -> fmt::Result {
    let own = match e {
        Expr::Gt(..) => 0,
        Expr::Choice(..) => 1,
        Expr::Succ(_) | Expr::Neg(_) | Expr::Not(_) => 2,
        _ => 3,
    };
    if own < level {
        f.write_char('(')?;
        write_expr(f, e, 0)?;
        return f.write_char(')');
    }
    match e {
        Expr::Var(x) => write!(f, "{x}"),
        Expr::Nat(n) => write!(f, "{n}"),
        Expr::Int(i) => write!(f, "{i}"),
        Expr::Bool(b) => write!(f, "{b}"),
        Expr::Succ(a) => {
            f.write_str("succ ")?;
            write_expr(f, a, 2)
        }
        Expr::Neg(a) => {
            f.write_str("neg ")?;
            write_expr(f, a, 2)
        }
        Expr::Not(a) => {
            f.write_str("not ")?;
            write_expr(f, a, 2)
        }
        Expr::Choice(a, b) => {
            write_expr(f, a, 1)?;
            f.write_str(" (+) ")?;
            write_expr(f, b, 2)
        }
        Expr::Gt(a, b) => {
            write_expr(f, a, 1)?;
            f.write_str(" > ")?;
            write_expr(f, b, 1)
        }
    }
}

impl Display for Process {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_process(f, self, Ctx::Top)
    }
}

fn write_process(f: &mut Formatter<'_>, p: &Process, ctx: Ctx) -> fmt::Result {
    let open = matches!(p, Process::Rec(..) | Process::If { .. }) && ctx == Ctx::Closed
        || matches!(p, Process::Choice(_)) && ctx != Ctx::Top;
    if open {
        f.write_char('(')?;
        write_process(f, p, Ctx::Top)?;
        return f.write_char(')');
    }
    match p {
        Process::Input { from, label, var, body } => {
            write!(f, "{from}?{label}({var}).")?;
            write_process(f, body, ctx.continuation())
        }
        Process::Output { to, label, payload, body } => {
            write!(f, "{to}!{label}({payload}).")?;
            write_process(f, body, ctx.continuation())
        }
        Process::Choice(items) => {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(" + ")?;
                }
                write_process(f, item, Ctx::Closed)?;
            }
            Ok(())
        }
        Process::If { cond, then_branch, else_branch } => {
            write!(f, "if {cond} then ")?;
            write_process(f, then_branch, Ctx::Top)?;
            f.write_str(" else ")?;
            write_process(f, else_branch, Ctx::Top)
        }
        Process::Rec(x, body) => {
            write!(f, "mu {x}. ")?;
            write_process(f, body, Ctx::Top)
        }
        Process::Var(x) => write!(f, "{x}"),
        Process::Inact => f.write_char('0'),
    }
}

impl Display for Session {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("@_ 0");
        }
        for (i, (p, proc)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            write!(f, "@{p} {proc}")?;
        }
        Ok(())
    }
}

impl Display for SessionType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_stype(f, self, Ctx::Top)
    }
}

fn write_stype(f: &mut Formatter<'_>, t: &SessionType, ctx: Ctx) -> fmt::Result {
    let open = match t {
        SessionType::Rec(..) => ctx == Ctx::Closed,
        SessionType::Comm { branches, .. } => branches.len() > 1 && ctx != Ctx::Top,
        _ => false,
    };
    if open {
        f.write_char('(')?;
        write_stype(f, t, Ctx::Top)?;
        return f.write_char(')');
    }
    match t {
        SessionType::Comm { polarity, peer, branches } => {
            let inner = if branches.len() > 1 { Ctx::Closed } else { ctx.continuation() };
            for (i, b) in branches.iter().enumerate() {
                if i > 0 {
                    write!(f, " {} ", polarity.connective())?;
                }
                write!(f, "{peer}{}{}({}).", polarity.symbol(), b.label, b.sort)?;
                write_stype(f, &b.cont, inner)?;
            }
            Ok(())
        }
        SessionType::Rec(var, body) => {
            write!(f, "mu {var}. ")?;
            write_stype(f, body, Ctx::Top)
        }
        SessionType::Var(var) => write!(f, "{var}"),
        SessionType::End => f.write_str("end"),
    }
}

impl Display for GlobalType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            GlobalType::Comm { from, to, branches } => {
                write!(f, "{from} -> {to} : ")?;
                if let [b] = branches.as_slice() {
                    return write!(f, "{}({}). {}", b.label, b.sort, b.cont);
                }
                f.write_str("{ ")?;
                for (i, b) in branches.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}({}). {}", b.label, b.sort, b.cont)?;
                }
                f.write_str(" }")
            }
            GlobalType::Rec(var, body) => write!(f, "mu {var}. {body}"),
            GlobalType::Var(var) => write!(f, "{var}"),
            GlobalType::End => f.write_str("end"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Branch, Sort};

    #[test]
    fn expression_parentheses() {
        let e = Expr::gt(Expr::succ(Expr::var("x")), Expr::Nat(0));
        assert_eq!(e.to_string(), "succ x > 0");
        let c = Expr::choice(Expr::Bool(true), Expr::choice(Expr::Bool(false), Expr::Bool(true)));
        assert_eq!(c.to_string(), "true (+) (false (+) true)");
        assert_eq!(Expr::neg(Expr::Int(-5)).to_string(), "neg -5");
    }

    #[test]
    fn choice_continuations_are_parenthesized() {
        let inner = Process::sum([
            Process::input("p", "a", "x", Process::Inact),
            Process::input("p", "b", "x", Process::Inact),
        ]);
        let p = Process::output("p", "c", Expr::Nat(1), inner);
        assert_eq!(p.to_string(), "p!c(1).(p?a(x).0 + p?b(x).0)");
        let sum = Process::sum([
            Process::input("p", "a", "x", Process::rec("X", Process::output("p", "d", Expr::Nat(1), Process::var("X")))),
            Process::input("p", "b", "x", Process::Inact),
        ]);
        assert_eq!(sum.to_string(), "p?a(x).(mu X. p!d(1).X) + p?b(x).0");
    }

    #[test]
    fn session_type_connectives() {
        let t = SessionType::union(
            "q",
            vec![
                Branch::new("l1", Sort::Nat, SessionType::input("r", "l2", Sort::Int, SessionType::End)),
                Branch::new("l3", Sort::Int, SessionType::End),
            ],
        )
        .unwrap();
        assert_eq!(t.to_string(), "q!l1(nat).r?l2(int).end \\/ q!l3(int).end");
        let nested = SessionType::input("p", "l", Sort::Bool, t);
        assert!(nested.to_string().starts_with("p?l(bool).(q!l1"));
    }

    #[test]
    fn global_braces() {
        let g = GlobalType::comm(
            "p",
            "q",
            vec![Branch::new("a", Sort::Nat, GlobalType::End), Branch::new("b", Sort::Bool, GlobalType::End)],
        )
        .unwrap();
        assert_eq!(g.to_string(), "p -> q : { a(nat). end, b(bool). end }");
    }
}
