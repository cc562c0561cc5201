use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

/// How a system relates to its dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Duality {
    /// `A* = A`.
    SelfDual,
    /// `A*` is a distinct formal system with `A** = A`.
    Formal,
    /// No dual declared; cups, caps and transposes on `A` are errors.
    Missing,
}

/// A wire type. Equality ignores the duality flag, which is fixed per system name.
#[derive(Clone, Debug)]
pub struct SystemType {
    name: String,
    starred: bool,
    duality: Duality,
}

impl SystemType {
    pub fn new(name: impl Into<String>, duality: Duality) -> Self {
        Self { name: name.into(), starred: false, duality }
    }

    pub fn self_dual(name: impl Into<String>) -> Self {
        Self::new(name, Duality::SelfDual)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_starred(&self) -> bool {
        self.starred
    }

    pub fn duality(&self) -> Duality {
        self.duality
    }

    /// `A*`; `None` when the system has no declared dual.
    pub fn dual(&self) -> Option<SystemType> {
        match self.duality {
            Duality::SelfDual => Some(self.clone()),
            Duality::Formal => Some(Self { starred: !self.starred, ..self.clone() }),
            Duality::Missing => None,
        }
    }
}

impl PartialEq for SystemType {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.starred == other.starred
    }
}

impl Eq for SystemType {}

impl Hash for SystemType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.starred.hash(state);
    }
}

impl PartialOrd for SystemType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SystemType {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.name, self.starred).cmp(&(&other.name, other.starred))
    }
}

impl fmt::Display for SystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.starred { "*" } else { "" })
    }
}

/// Renders a type list, with `I` for the empty list.
pub fn fmt_types(ts: &[SystemType]) -> String {
    if ts.is_empty() {
        "I".into()
    } else {
        ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ⊗ ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duals_are_involutive() {
        let a = SystemType::new("A", Duality::Formal);
        let a_star = a.dual().unwrap();
        assert_ne!(a, a_star);
        assert_eq!(a_star.to_string(), "A*");
        assert_eq!(a_star.dual().unwrap(), a);
        let q = SystemType::self_dual("Q");
        assert_eq!(q.dual().unwrap(), q);
        assert!(SystemType::new("B", Duality::Missing).dual().is_none());
    }
}
