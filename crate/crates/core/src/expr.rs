//! Values, the set-valued evaluation of expressions, subsorting and
//! expression typing.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Expr, Sort, Var};
use crate::typing::Env;

/// Runtime values. Literals keep their tag; numeric results of operators
/// are tagged `Nat` when non-negative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Value {
    Nat(u64),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn from_number(n: i128) -> Option<Value> {
        if n >= 0 {
            u64::try_from(n).ok().map(Value::Nat)
        } else {
            i64::try_from(n).ok().map(Value::Int)
        }
    }

    /// The most precise sort of the value.
    pub fn sort(self) -> Sort {
        match self {
            Value::Nat(_) => Sort::Nat,
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
        }
    }

    pub fn as_number(self) -> Option<i128> {
        match self {
            Value::Nat(n) => Some(n as i128),
            Value::Int(i) => Some(i as i128),
            Value::Bool(_) => None,
        }
    }

    pub fn to_expr(self) -> Expr {
        match self {
            Value::Nat(n) => Expr::Nat(n),
            Value::Int(i) => Expr::Int(i),
            Value::Bool(b) => Expr::Bool(b),
        }
    }

    /// Whether the value may be used at sort `s`.
    pub fn has_sort(self, s: Sort) -> bool {
        subsort(self.sort(), s)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Every value `e` can evaluate to. The empty set means `e` is stuck:
/// `succ` of a negative number, `not` of a number, a free variable, or
/// arithmetic overflow.
pub fn eval_all(e: &Expr) -> BTreeSet<Value> {
    match e {
        Expr::Var(_) => BTreeSet::new(),
        Expr::Nat(n) => BTreeSet::from([Value::Nat(*n)]),
        Expr::Int(i) => BTreeSet::from([Value::Int(*i)]),
        Expr::Bool(b) => BTreeSet::from([Value::Bool(*b)]),
        Expr::Succ(a) => eval_all(a)
            .into_iter()
            .filter_map(|v| v.as_number().filter(|n| *n >= 0).and_then(|n| Value::from_number(n + 1)))
            .collect(),
        Expr::Neg(a) => eval_all(a)
            .into_iter()
            .filter_map(|v| v.as_number().and_then(|n| Value::from_number(-n)))
            .collect(),
        Expr::Not(a) => eval_all(a)
            .into_iter()
            .filter_map(|v| match v {
                Value::Bool(b) => Some(Value::Bool(!b)),
                _ => None,
            })
            .collect(),
        Expr::Choice(a, b) => {
            let mut out = eval_all(a);
            out.extend(eval_all(b));
            out
        }
        Expr::Gt(a, b) => {
            let left: Vec<i128> = eval_all(a).into_iter().filter_map(Value::as_number).collect();
            let right: Vec<i128> = eval_all(b).into_iter().filter_map(Value::as_number).collect();
            left.iter()
                .flat_map(|x| right.iter().map(move |y| Value::Bool(x > y)))
                .collect()
        }
    }
}

/// `nat <: int`, reflexively.
pub fn subsort(a: Sort, b: Sort) -> bool {
    a == b || (a == Sort::Nat && b == Sort::Int)
}

/// Least upper bound under subsorting, if any.
pub fn join(a: Sort, b: Sort) -> Option<Sort> {
    if subsort(a, b) {
        Some(b)
    } else if subsort(b, a) {
        Some(a)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Var),
    #[error("`{expr}` has sort {found}, expected {expected}")]
    SortMismatch { expr: Expr, found: Sort, expected: Sort },
    #[error("the arms of `{expr}` have incompatible sorts {left} and {right}")]
    IncompatibleChoice { expr: Expr, left: Sort, right: Sort },
}

/// The minimal sort of `e` under `env`.
pub fn infer_sort(env: &Env, e: &Expr) -> Result<Sort, ExprError> {
    let expect = |inner: &Expr, expected: Sort| -> Result<(), ExprError> {
        let found = infer_sort(env, inner)?;
        if subsort(found, expected) {
            Ok(())
        } else {
            Err(ExprError::SortMismatch { expr: inner.clone(), found, expected })
        }
    };
    match e {
        Expr::Var(x) => env.sort_of(x).ok_or_else(|| ExprError::UnboundVariable(x.clone())),
        Expr::Nat(_) => Ok(Sort::Nat),
        Expr::Int(_) => Ok(Sort::Int),
        Expr::Bool(_) => Ok(Sort::Bool),
        Expr::Succ(a) => expect(a, Sort::Nat).map(|_| Sort::Nat),
        Expr::Neg(a) => expect(a, Sort::Int).map(|_| Sort::Int),
        Expr::Not(a) => expect(a, Sort::Bool).map(|_| Sort::Bool),
        Expr::Gt(a, b) => {
            expect(a, Sort::Int)?;
            expect(b, Sort::Int)?;
            Ok(Sort::Bool)
        }
        Expr::Choice(a, b) => {
            let (left, right) = (infer_sort(env, a)?, infer_sort(env, b)?);
            join(left, right).ok_or_else(|| ExprError::IncompatibleChoice { expr: e.clone(), left, right })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    fn eval(text: &str) -> Vec<Value> {
        eval_all(&parse_expr(text).unwrap()).into_iter().collect()
    }

    #[test]
    fn evaluation_table() {
        assert_eq!(eval("succ 5"), [Value::Nat(6)]);
        assert!(eval("succ -5").is_empty());
        assert_eq!(eval("true (+) false"), [Value::Bool(false), Value::Bool(true)]);
        assert_eq!(eval("neg -5 > 0"), [Value::Bool(true)]);
        assert_eq!(eval("neg 5"), [Value::Int(-5)]);
        assert!(eval("not 3").is_empty());
        assert!(eval("succ true").is_empty());
        assert_eq!(eval("succ (neg -5)"), [Value::Nat(6)]);
    }

    #[test]
    fn overflow_is_stuck() {
        assert!(eval_all(&Expr::succ(Expr::Nat(u64::MAX))).is_empty());
        assert!(eval_all(&Expr::neg(Expr::Nat(u64::MAX))).is_empty());
        assert_eq!(eval_all(&Expr::neg(Expr::Int(i64::MIN))).len(), 1);
    }

    #[test]
    fn subsorting() {
        assert!(subsort(Sort::Nat, Sort::Int));
        assert!(subsort(Sort::Bool, Sort::Bool));
        assert!(!subsort(Sort::Int, Sort::Nat));
        assert_eq!(join(Sort::Nat, Sort::Int), Some(Sort::Int));
        assert_eq!(join(Sort::Bool, Sort::Int), None);
    }

    #[test]
    fn sort_inference() {
        let empty = Env::new();
        assert_eq!(infer_sort(&empty, &Expr::Nat(5)), Ok(Sort::Nat));
        assert_eq!(infer_sort(&empty, &Expr::neg(Expr::Nat(5))), Ok(Sort::Int));
        let env = Env::new().with_var(Var::new("x"), Sort::Bool);
        assert!(matches!(
            infer_sort(&env, &Expr::succ(Expr::var("x"))),
            Err(ExprError::SortMismatch { .. })
        ));
        assert_eq!(infer_sort(&empty, &parse_expr("5 (+) -3").unwrap()), Ok(Sort::Int));
        assert!(infer_sort(&empty, &parse_expr("5 (+) true").unwrap()).is_err());
        assert_eq!(infer_sort(&empty, &Expr::var("y")), Err(ExprError::UnboundVariable(Var::new("y"))));
    }
}
