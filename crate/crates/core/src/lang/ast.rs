use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::repr::{DivergenceCause, MethodId, Representative};
use crate::symbol::Symbol;

/// Name of the return-value pseudo-variable.
pub const RET: &str = "ret";

/// 1-based source position. Generated or synthesized nodes use `0:0`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Elem {
    Int,
    Ref(Symbol),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Type {
    Int,
    /// A class or interface.
    Ref(Symbol),
    Array(Elem),
}

impl Type {
    pub fn is_array(&self) -> bool {
        matches!(self, Type::Array(_))
    }

    pub fn is_reference(&self) -> bool {
        !matches!(self, Type::Int)
    }

    pub fn ref_name(&self) -> Option<&Symbol> {
        match self {
            Type::Ref(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Ref(n) => write!(f, "{n}"),
            Type::Array(Elem::Int) => f.write_str("int[]"),
            Type::Array(Elem::Ref(n)) => write!(f, "{n}[]"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Program {
    pub interfaces: Vec<InterfaceDecl>,
    pub classes: Vec<ClassDecl>,
    pub methods: Vec<Method>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InterfaceDecl {
    pub name: Symbol,
    pub extends: Vec<Symbol>,
    pub span: Span,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassDecl {
    pub name: Symbol,
    pub superclass: Option<Symbol>,
    pub interfaces: Vec<Symbol>,
    pub fields: Vec<Field>,
    pub span: Span,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Field {
    pub name: Symbol,
    pub ty: Type,
    pub span: Span,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Param {
    pub name: Symbol,
    pub ty: Type,
    pub span: Span,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Method {
    pub owner: Option<Symbol>,
    pub name: Symbol,
    pub formals: Vec<Param>,
    pub locals: Vec<Param>,
    pub ret_ty: Type,
    /// `None` for `extern` (API) methods.
    pub body: Option<Block>,
    pub span: Span,
}

impl Method {
    pub fn id(&self) -> MethodId {
        MethodId { owner: self.owner.clone(), name: self.name.clone() }
    }

    pub fn is_extern(&self) -> bool {
        self.body.is_none()
    }

    pub fn var_type(&self, name: &str) -> Option<&Type> {
        if name == RET {
            return Some(&self.ret_ty);
        }
        self.formals.iter().chain(&self.locals).find(|p| &*p.name == name).map(|p| &p.ty)
    }

    pub fn body_stmts(&self) -> &[Stmt] {
        self.body.as_deref().unwrap_or(&[])
    }
}

/// A statement sequence; the empty block is `skip`.
pub type Block = Vec<Stmt>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt { kind, span: Span::default() }
    }

    pub fn at(kind: StmtKind, span: Span) -> Self {
        Stmt { kind, span }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StmtKind {
    Assign(Assign),
    If { cond: Cond, then_branch: Block, else_branch: Block },
    While { cond: Cond, body: Block },
    Call(Call),
    Return(Atom),
    /// Parallel assignment of `⊥`; only introduced by the transform.
    Bottom(BottomAssign),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Call {
    pub target: Symbol,
    pub callee: Symbol,
    pub args: Vec<Symbol>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BottomAssign {
    pub targets: Vec<Representative>,
    pub cause: DivergenceCause,
}

/// Identifier or literal operand.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Var(Symbol),
    Int(i64),
    Null,
}

impl Atom {
    pub fn var(&self) -> Option<&Symbol> {
        match self {
            Atom::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Const {
    Int(i64),
    Null,
    New(Symbol),
    NewArray(Elem, u32),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub fn negate(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Ge,
            RelOp::Le => RelOp::Gt,
            RelOp::Gt => RelOp::Le,
            RelOp::Ge => RelOp::Lt,
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
        }
    }

    /// The relation with operands swapped: `a op b` iff `b op.flip() a`.
    pub fn flip(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Gt,
            RelOp::Le => RelOp::Ge,
            RelOp::Gt => RelOp::Lt,
            RelOp::Ge => RelOp::Le,
            RelOp::Eq => RelOp::Eq,
            RelOp::Ne => RelOp::Ne,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            RelOp::Lt => a < b,
            RelOp::Le => a <= b,
            RelOp::Gt => a > b,
            RelOp::Ge => a >= b,
            RelOp::Eq => a == b,
            RelOp::Ne => a != b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    And,
    Or,
    Xor,
    Shl,
    Shr,
    Rel(RelOp),
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Xor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Rel(r) => r.symbol(),
        }
    }

    /// Evaluates with 64-bit wraparound; `None` on division by zero.
    pub fn eval(self, a: i64, b: i64) -> Option<i64> {
        Some(match self {
            BinOp::Add => a.wrapping_add(b),
            BinOp::Sub => a.wrapping_sub(b),
            BinOp::Mul => a.wrapping_mul(b),
            BinOp::Div => {
                if b == 0 {
                    return None;
                }
                a.wrapping_div(b)
            }
            BinOp::Rem => {
                if b == 0 {
                    return None;
                }
                a.wrapping_rem(b)
            }
            BinOp::And => a & b,
            BinOp::Or => a | b,
            BinOp::Xor => a ^ b,
            BinOp::Shl => a.wrapping_shl((b & 63) as u32),
            BinOp::Shr => a.wrapping_shr((b & 63) as u32),
            BinOp::Rel(r) => r.holds(a, b) as i64,
        })
    }
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Neg => "-",
            UnOp::Not => "!",
        }
    }

    pub fn eval(self, a: i64) -> i64 {
        match self {
            UnOp::Neg => a.wrapping_neg(),
            UnOp::Not => (a == 0) as i64,
        }
    }
}

/// `lhs op rhs`, the only condition form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cond {
    pub lhs: Atom,
    pub op: RelOp,
    pub rhs: Atom,
}

/// The eight assignment forms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Assign {
    Const { dst: Symbol, value: Const },
    Copy { dst: Symbol, src: Symbol },
    Unary { dst: Symbol, op: UnOp, src: Symbol },
    Binary { dst: Symbol, op: BinOp, lhs: Atom, rhs: Atom },
    FieldRead { dst: Symbol, obj: Symbol, field: Symbol },
    FieldWrite { obj: Symbol, field: Symbol, src: Atom },
    ArrayRead { dst: Symbol, array: Symbol, index: Symbol },
    ArrayWrite { array: Symbol, index: Symbol, src: Atom },
}

impl Assign {
    /// The scalar variable assigned, for the forms that assign one.
    pub fn scalar_dst(&self) -> Option<&Symbol> {
        match self {
            Assign::Const { dst, .. }
            | Assign::Copy { dst, .. }
            | Assign::Unary { dst, .. }
            | Assign::Binary { dst, .. }
            | Assign::FieldRead { dst, .. }
            | Assign::ArrayRead { dst, .. } => Some(dst),
            Assign::FieldWrite { .. } | Assign::ArrayWrite { .. } => None,
        }
    }
}

fn insert_atom(out: &mut BTreeSet<Symbol>, a: &Atom) {
    if let Atom::Var(v) = a {
        out.insert(v.clone());
    }
}

/// Identifiers occurring syntactically in a right-hand side or condition.
pub trait FreeVars {
    fn free_vars(&self) -> BTreeSet<Symbol>;
}

impl FreeVars for Cond {
    fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        insert_atom(&mut out, &self.lhs);
        insert_atom(&mut out, &self.rhs);
        out
    }
}

impl FreeVars for Atom {
    fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        insert_atom(&mut out, self);
        out
    }
}

impl FreeVars for Const {
    fn free_vars(&self) -> BTreeSet<Symbol> {
        BTreeSet::new()
    }
}

/// For assignments this is fv of the right-hand side; for writes through a
/// reference it also includes the base and index, which are read.
impl FreeVars for Assign {
    fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        match self {
            Assign::Const { .. } => {}
            Assign::Copy { src, .. } | Assign::Unary { src, .. } => {
                out.insert(src.clone());
            }
            Assign::Binary { lhs, rhs, .. } => {
                insert_atom(&mut out, lhs);
                insert_atom(&mut out, rhs);
            }
            Assign::FieldRead { obj, .. } => {
                out.insert(obj.clone());
            }
            Assign::FieldWrite { obj, src, .. } => {
                out.insert(obj.clone());
                insert_atom(&mut out, src);
            }
            Assign::ArrayRead { array, index, .. } => {
                out.insert(array.clone());
                out.insert(index.clone());
            }
            Assign::ArrayWrite { array, index, src } => {
                out.insert(array.clone());
                out.insert(index.clone());
                insert_atom(&mut out, src);
            }
        }
        out
    }
}

/// Convenience free function mirroring `fv(e)`.
pub fn free_vars<T: FreeVars + ?Sized>(e: &T) -> BTreeSet<Symbol> {
    e.free_vars()
}

/// Path from a method body to a nested statement: indexes into successive
/// blocks, with branch selectors for `if` (0 = then, 1 = else).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct StmtPath(pub Vec<u32>);

impl StmtPath {
    pub fn child(&self, step: u32) -> StmtPath {
        let mut v = self.0.clone();
        v.push(step);
        StmtPath(v)
    }
}

impl fmt::Display for StmtPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Program {
    pub fn method(&self, id: &MethodId) -> Option<&Method> {
        self.methods.iter().find(|m| m.owner == id.owner && m.name == id.name)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| &*c.name == name)
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        self.interfaces.iter().find(|i| &*i.name == name)
    }

    /// Appends another compilation unit.
    pub fn extend(&mut self, other: Program) {
        self.interfaces.extend(other.interfaces);
        self.classes.extend(other.classes);
        self.methods.extend(other.methods);
    }

    /// Resets every source location to `0:0`, for structural comparison.
    pub fn erase_spans(&mut self) {
        for i in &mut self.interfaces {
            i.span = Span::default();
        }
        for c in &mut self.classes {
            c.span = Span::default();
            for f in &mut c.fields {
                f.span = Span::default();
            }
        }
        for m in &mut self.methods {
            m.span = Span::default();
            for p in m.formals.iter_mut().chain(m.locals.iter_mut()) {
                p.span = Span::default();
            }
            if let Some(body) = &mut m.body {
                erase_block(body);
            }
        }
    }

    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        p.erase_spans();
        p
    }
}

fn erase_block(block: &mut Block) {
    for s in block {
        s.span = Span::default();
        match &mut s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                erase_block(then_branch);
                erase_block(else_branch);
            }
            StmtKind::While { body, .. } => erase_block(body),
            _ => {}
        }
    }
}

/// The statement at `path` below `block`.
pub fn stmt_at<'a>(block: &'a [Stmt], path: &StmtPath) -> Option<&'a Stmt> {
    let (first, rest) = path.0.split_first()?;
    let mut s = block.get(*first as usize)?;
    let mut steps = rest;
    while let [sel, idx, tail @ ..] = steps {
        let inner = match (&s.kind, sel) {
            (StmtKind::If { then_branch, .. }, 0) => then_branch,
            (StmtKind::If { else_branch, .. }, 1) => else_branch,
            (StmtKind::While { body, .. }, 0) => body,
            _ => return None,
        };
        s = inner.get(*idx as usize)?;
        steps = tail;
    }
    steps.is_empty().then_some(s)
}

/// Visits every statement of a block depth-first, pre-order.
pub fn walk_stmts<'a>(block: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in block {
        f(s);
        match &s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                walk_stmts(then_branch, f);
                walk_stmts(else_branch, f);
            }
            StmtKind::While { body, .. } => walk_stmts(body, f),
            _ => {}
        }
    }
}

/// True when every execution of the block ends in a `return`.
pub fn always_returns(block: &[Stmt]) -> bool {
    match block.last().map(|s| &s.kind) {
        Some(StmtKind::Return(_)) => true,
        Some(StmtKind::If { then_branch, else_branch, .. }) => {
            always_returns(then_branch) && always_returns(else_branch)
        }
        _ => false,
    }
}
