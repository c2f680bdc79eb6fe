use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::Span;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{span}: syntax error: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub span: Span,
    pub expected: Vec<String>,
    pub found: String,
}

impl SyntaxError {
    pub fn new(span: Span, expected: Vec<String>, found: &str) -> Self {
        SyntaxError { span, expected, found: found.to_string() }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum LangError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{span}: unresolved name `{name}`")]
    UnresolvedName { span: Span, name: String },
    #[error("{span}: unknown type `{name}`")]
    UnknownType { span: Span, name: String },
    #[error("{span}: inheritance cycle through `{name}`")]
    InheritanceCycle { span: Span, name: String },
    #[error("{span}: duplicate definition of `{name}`")]
    Duplicate { span: Span, name: String },
    #[error("{span}: type error: {msg}")]
    Type { span: Span, msg: String },
    #[error("{span}: method `{method}` does not return on every path")]
    MissingReturn { span: Span, method: String },
    #[error("{span}: unreachable statement after return")]
    Unreachable { span: Span },
    #[error("{span}: `return` inside a loop body")]
    ReturnInLoop { span: Span },
    #[error("{span}: `bottom` assignments only appear in transformed programs")]
    BottomInSource { span: Span },
}

impl LangError {
    pub fn span(&self) -> Span {
        match self {
            LangError::Syntax(e) => e.span,
            LangError::UnresolvedName { span, .. }
            | LangError::UnknownType { span, .. }
            | LangError::InheritanceCycle { span, .. }
            | LangError::Duplicate { span, .. }
            | LangError::Type { span, .. }
            | LangError::MissingReturn { span, .. }
            | LangError::Unreachable { span }
            | LangError::ReturnInLoop { span }
            | LangError::BottomInSource { span } => *span,
        }
    }
}
