//! Identifiers shared by every analysis stage.

use core::fmt;

use crate::symbol::Symbol;

/// `C.m` for a method owned by class `C`, plain `m` for a free method.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MethodId {
    pub owner: Option<Symbol>,
    pub name: Symbol,
}

impl MethodId {
    pub fn free(name: &str) -> Self {
        MethodId { owner: None, name: Symbol::new(name) }
    }

    pub fn owned(owner: &str, name: &str) -> Self {
        MethodId { owner: Some(Symbol::new(owner)), name: Symbol::new(name) }
    }

    /// Parses the rendered form (`m` or `C.m`).
    pub fn parse(s: &str) -> Self {
        match s.split_once('.') {
            Some((owner, name)) => MethodId::owned(owner, name),
            None => MethodId::free(s),
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.owner {
            Some(owner) => write!(f, "{}.{}", owner, self.name),
            None => write!(f, "{}", self.name),
        }
    }
}

/// A method-qualified scalar variable. `ret` is the return pseudo-variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId {
    pub method: MethodId,
    pub name: Symbol,
}

impl VarId {
    pub fn new(method: &MethodId, name: &str) -> Self {
        VarId { method: method.clone(), name: Symbol::new(name) }
    }

    pub fn is_ret(&self) -> bool {
        &*self.name == crate::lang::RET
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.method, self.name)
    }
}

/// Identifier of an array alias partition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PartId(pub u32);

/// Canonical alias class of an l-value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Representative {
    Scalar(VarId),
    /// Field `field` of the highest class in the hierarchy declaring it.
    TypeField { class: Symbol, field: Symbol },
    ArrayPart(PartId),
    Bottom,
}

impl Representative {
    pub fn type_field(class: &str, field: &str) -> Self {
        Representative::TypeField { class: Symbol::new(class), field: Symbol::new(field) }
    }

    pub fn scalar(method: &MethodId, name: &str) -> Self {
        Representative::Scalar(VarId::new(method, name))
    }

    /// Field and array-part representatives name heap cells visible to any caller.
    pub fn is_heap(&self) -> bool {
        matches!(self, Representative::TypeField { .. } | Representative::ArrayPart(_))
    }

    /// Renders the representative as it appears inside method `ctx`: scalars
    /// local to `ctx` drop their method prefix.
    pub fn display_in<'a>(&'a self, ctx: Option<&'a MethodId>) -> impl fmt::Display + 'a {
        ReprIn { repr: self, ctx }
    }
}

struct ReprIn<'a> {
    repr: &'a Representative,
    ctx: Option<&'a MethodId>,
}

impl fmt::Display for ReprIn<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Representative::Scalar(v) if Some(&v.method) == self.ctx => write!(f, "{}", v.name),
            other => fmt::Display::fmt(other, f),
        }
    }
}

impl fmt::Display for Representative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representative::Scalar(v) => write!(f, "{v}"),
            Representative::TypeField { class, field } => write!(f, "{class}.{field}"),
            Representative::ArrayPart(p) => write!(f, "part#{}", p.0),
            Representative::Bottom => f.write_str("⊥"),
        }
    }
}

/// Why a `⊥` was introduced.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DivergenceCause {
    Api,
    Loop,
    Recursion,
}

impl DivergenceCause {
    pub const ALL: [DivergenceCause; 3] =
        [DivergenceCause::Api, DivergenceCause::Loop, DivergenceCause::Recursion];

    pub fn keyword(self) -> &'static str {
        match self {
            DivergenceCause::Api => "api",
            DivergenceCause::Loop => "loop",
            DivergenceCause::Recursion => "recursion",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        DivergenceCause::ALL.into_iter().find(|c| c.keyword() == s)
    }
}

impl fmt::Display for DivergenceCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}
