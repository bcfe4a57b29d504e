use std::fmt;
use std::sync::Arc;

/// Words reserved by the concrete grammar; none of them is a valid identifier.
pub const KEYWORDS: &[&str] = &[
    "mu", "end", "if", "then", "else", "succ", "neg", "not", "true", "false", "nat", "int", "bool",
];

/// Checks `[A-Za-z_][A-Za-z0-9_]*` and rejects keywords.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            /// Panics if `name` is not a valid identifier.
            pub fn new(name: impl AsRef<str>) -> Self {
                let name = name.as_ref();
                assert!(is_identifier(name), "invalid identifier {name:?}");
                Self(Arc::from(name))
            }

            pub fn try_new(name: impl AsRef<str>) -> Option<Self> {
                let name = name.as_ref();
                is_identifier(name).then(|| Self(Arc::from(name)))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", &self.0)
            }
        }

        impl From<&str> for $name {
            fn from(name: &str) -> Self {
                Self::new(name)
            }
        }
    };
}

identifier! {
    /// A session participant (`p`, `q`, `cl`, ...).
    Participant
}
identifier! {
    /// A message label.
    Label
}
identifier! {
    /// An expression variable bound by an input prefix.
    Var
}
identifier! {
    /// A process recursion variable.
    ProcVar
}
identifier! {
    /// A recursion variable of session or global types.
    TypeVar
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_grammar() {
        assert!(is_identifier("p"));
        assert!(is_identifier("_c0"));
        assert!(is_identifier("l_3"));
        assert!(!is_identifier("3p"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("mu"));
        assert!(!is_identifier("a-b"));
        assert!(Participant::try_new("end").is_none());
    }
}
