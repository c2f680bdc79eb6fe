use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::error::SyntaxError;
use super::lexer::{lex, Tok, Token};
use crate::repr::{DivergenceCause, MethodId, PartId, Representative, VarId};
use crate::symbol::Symbol;

pub const KEYWORDS: &[&str] = &[
    "class", "interface", "extends", "implements", "method", "extern", "var", "if", "then", "else",
    "while", "do", "return", "null", "new", "int", "bottom", "ret",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Whether `bottom` statements are accepted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParseMode {
    Source,
    Transformed,
}

/// Parses one compilation unit without name resolution.
pub fn parse_unit(src: &str, mode: ParseMode) -> Result<Program, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, mode, current: None };
    p.unit()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    mode: ParseMode,
    current: Option<MethodId>,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(SyntaxError::new(
            self.span(),
            expected.iter().map(|s| s.to_string()).collect(),
            &self.peek().to_string(),
        ))
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(&[&format!("`{kw}`")])
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(&[&t.to_string()])
        }
    }

    fn name(&mut self) -> PResult<Symbol> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = Symbol::new(s);
                self.bump();
                Ok(s)
            }
            _ => self.err(&["identifier"]),
        }
    }

    fn unit(&mut self) -> PResult<Program> {
        let mut prog = Program::default();
        loop {
            if *self.peek() == Tok::Eof {
                return Ok(prog);
            }
            if self.is_kw("interface") {
                prog.interfaces.push(self.interface()?);
            } else if self.is_kw("class") {
                prog.classes.push(self.class()?);
            } else if self.is_kw("method") || self.is_kw("extern") {
                prog.methods.push(self.method()?);
            } else {
                return self.err(&["`class`", "`interface`", "`method`", "`extern`"]);
            }
        }
    }

    fn name_list(&mut self) -> PResult<Vec<Symbol>> {
        let mut v = vec![self.name()?];
        while self.eat(&Tok::Comma) {
            v.push(self.name()?);
        }
        Ok(v)
    }

    fn interface(&mut self) -> PResult<InterfaceDecl> {
        let span = self.span();
        self.expect_kw("interface")?;
        let name = self.name()?;
        let extends = if self.eat_kw("extends") { self.name_list()? } else { Vec::new() };
        self.expect(Tok::LBrace)?;
        self.expect(Tok::RBrace)?;
        Ok(InterfaceDecl { name, extends, span })
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        let span = self.span();
        self.expect_kw("class")?;
        let name = self.name()?;
        let superclass = if self.eat_kw("extends") { Some(self.name()?) } else { None };
        let interfaces = if self.eat_kw("implements") { self.name_list()? } else { Vec::new() };
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        while *self.peek() != Tok::RBrace {
            let fspan = self.span();
            let fname = self.name()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(Tok::Semi)?;
            fields.push(Field { name: fname, ty, span: fspan });
        }
        self.expect(Tok::RBrace)?;
        Ok(ClassDecl { name, superclass, interfaces, fields, span })
    }

    fn ty(&mut self) -> PResult<Type> {
        let elem = if self.eat_kw("int") {
            Elem::Int
        } else if matches!(self.peek(), Tok::Ident(s) if !is_keyword(s)) {
            Elem::Ref(self.name()?)
        } else {
            return self.err(&["type"]);
        };
        if self.eat(&Tok::LBracket) {
            self.expect(Tok::RBracket)?;
            return Ok(Type::Array(elem));
        }
        Ok(match elem {
            Elem::Int => Type::Int,
            Elem::Ref(n) => Type::Ref(n),
        })
    }

    fn param(&mut self) -> PResult<Param> {
        let span = self.span();
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        Ok(Param { name, ty, span })
    }

    fn method(&mut self) -> PResult<Method> {
        let span = self.span();
        let is_extern = self.eat_kw("extern");
        self.expect_kw("method")?;
        let first = self.name()?;
        let (owner, name) = if self.eat(&Tok::Dot) { (Some(first), self.name()?) } else { (None, first) };
        self.expect(Tok::LParen)?;
        let mut formals = Vec::new();
        if *self.peek() != Tok::RParen {
            formals.push(self.param()?);
            while self.eat(&Tok::Comma) {
                formals.push(self.param()?);
            }
        }
        self.expect(Tok::RParen)?;
        let ret_ty = if self.eat(&Tok::Colon) { self.ty()? } else { Type::Int };
        if is_extern {
            self.expect(Tok::Semi)?;
            return Ok(Method { owner, name, formals, locals: Vec::new(), ret_ty, body: None, span });
        }
        self.current = Some(MethodId { owner: owner.clone(), name: name.clone() });
        self.expect(Tok::LBrace)?;
        let mut locals = Vec::new();
        while self.eat_kw("var") {
            locals.push(self.param()?);
            while self.eat(&Tok::Comma) {
                locals.push(self.param()?);
            }
            self.expect(Tok::Semi)?;
        }
        let body = self.stmts_until_rbrace()?;
        Ok(Method { owner, name, formals, locals, ret_ty, body: Some(body), span })
    }

    fn stmts_until_rbrace(&mut self) -> PResult<Block> {
        let mut out = Vec::new();
        while *self.peek() != Tok::RBrace {
            out.push(self.stmt()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect(Tok::LBrace)?;
        self.stmts_until_rbrace()
    }

    fn int_lit(&mut self, negative: bool) -> PResult<i64> {
        let span = self.span();
        match self.bump() {
            Tok::Int(n) => {
                if negative {
                    if n > i64::MAX as u64 + 1 {
                        return Err(SyntaxError::new(span, vec!["integer literal in range".into()], "overflowing literal"));
                    }
                    Ok((n as i64).wrapping_neg())
                } else if n > i64::MAX as u64 {
                    Err(SyntaxError::new(span, vec!["integer literal in range".into()], "overflowing literal"))
                } else {
                    Ok(n as i64)
                }
            }
            _ => Err(SyntaxError::new(span, vec!["integer literal".into()], "something else")),
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        match self.peek().clone() {
            Tok::Int(_) => Ok(Atom::Int(self.int_lit(false)?)),
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                Ok(Atom::Int(self.int_lit(true)?))
            }
            Tok::Ident(s) if s == "null" => {
                self.bump();
                Ok(Atom::Null)
            }
            Tok::Ident(s) if !is_keyword(&s) => Ok(Atom::Var(self.name()?)),
            _ => self.err(&["identifier", "integer literal", "`null`"]),
        }
    }

    fn relop(&mut self) -> PResult<RelOp> {
        let op = match self.peek() {
            Tok::Lt => RelOp::Lt,
            Tok::Le => RelOp::Le,
            Tok::Gt => RelOp::Gt,
            Tok::Ge => RelOp::Ge,
            Tok::EqEq => RelOp::Eq,
            Tok::Ne => RelOp::Ne,
            _ => return self.err(&["relational operator"]),
        };
        self.bump();
        Ok(op)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Rem,
            Tok::Amp => BinOp::And,
            Tok::Pipe => BinOp::Or,
            Tok::Caret => BinOp::Xor,
            Tok::Shl => BinOp::Shl,
            Tok::Shr => BinOp::Shr,
            Tok::Lt => BinOp::Rel(RelOp::Lt),
            Tok::Le => BinOp::Rel(RelOp::Le),
            Tok::Gt => BinOp::Rel(RelOp::Gt),
            Tok::Ge => BinOp::Rel(RelOp::Ge),
            Tok::EqEq => BinOp::Rel(RelOp::Eq),
            Tok::Ne => BinOp::Rel(RelOp::Ne),
            _ => return None,
        })
    }

    fn cond(&mut self) -> PResult<Cond> {
        let lhs = self.atom()?;
        let op = self.relop()?;
        let rhs = self.atom()?;
        Ok(Cond { lhs, op, rhs })
    }

    /// True when the statement at the cursor is `targets := bottom(..)`.
    fn at_bottom_stmt(&self) -> bool {
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::Assign => return matches!(self.peek_at(k + 1), Tok::Ident(s) if s == "bottom"),
                Tok::Semi | Tok::Eof | Tok::LBrace | Tok::RBrace => return false,
                _ => k += 1,
            }
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        if self.eat_kw("if") {
            let cond = self.cond()?;
            self.expect_kw("then")?;
            let then_branch = self.block()?;
            let else_branch = if self.eat_kw("else") { self.block()? } else { Vec::new() };
            return Ok(Stmt::at(StmtKind::If { cond, then_branch, else_branch }, span));
        }
        if self.eat_kw("while") {
            let cond = self.cond()?;
            self.expect_kw("do")?;
            let body = self.block()?;
            return Ok(Stmt::at(StmtKind::While { cond, body }, span));
        }
        if self.eat_kw("return") {
            let a = self.atom()?;
            self.expect(Tok::Semi)?;
            return Ok(Stmt::at(StmtKind::Return(a), span));
        }
        if self.at_bottom_stmt() {
            if self.mode == ParseMode::Source {
                return Err(SyntaxError::new(span, vec!["statement".into()], "`bottom` assignment in source program"));
            }
            let b = self.bottom()?;
            return Ok(Stmt::at(StmtKind::Bottom(b), span));
        }
        let dst = self.name()?;
        let kind = if self.eat(&Tok::Dot) {
            let field = self.name()?;
            self.expect(Tok::Assign)?;
            let src = self.atom()?;
            StmtKind::Assign(Assign::FieldWrite { obj: dst, field, src })
        } else if self.eat(&Tok::LBracket) {
            let index = self.name()?;
            self.expect(Tok::RBracket)?;
            self.expect(Tok::Assign)?;
            let src = self.atom()?;
            StmtKind::Assign(Assign::ArrayWrite { array: dst, index, src })
        } else {
            self.expect(Tok::Assign)?;
            self.rhs(dst)?
        };
        self.expect(Tok::Semi)?;
        Ok(Stmt::at(kind, span))
    }

    fn rhs(&mut self, dst: Symbol) -> PResult<StmtKind> {
        let assign = |a| Ok(StmtKind::Assign(a));
        if self.eat_kw("new") {
            if self.eat_kw("int") {
                self.expect(Tok::LBracket)?;
                let n = self.array_len()?;
                self.expect(Tok::RBracket)?;
                return assign(Assign::Const { dst, value: Const::NewArray(Elem::Int, n) });
            }
            let cls = self.name()?;
            if self.eat(&Tok::LBracket) {
                let n = self.array_len()?;
                self.expect(Tok::RBracket)?;
                return assign(Assign::Const { dst, value: Const::NewArray(Elem::Ref(cls), n) });
            }
            return assign(Assign::Const { dst, value: Const::New(cls) });
        }
        match self.peek().clone() {
            Tok::Minus if matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.bump();
                let src = self.name()?;
                return assign(Assign::Unary { dst, op: UnOp::Neg, src });
            }
            Tok::Bang => {
                self.bump();
                let src = self.name()?;
                return assign(Assign::Unary { dst, op: UnOp::Not, src });
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                if matches!(self.peek_at(1), Tok::LParen) {
                    let callee = self.name()?;
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.name()?);
                        while self.eat(&Tok::Comma) {
                            args.push(self.name()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(StmtKind::Call(Call { target: dst, callee, args }));
                }
                if matches!(self.peek_at(1), Tok::Dot) {
                    let obj = self.name()?;
                    self.bump();
                    let field = self.name()?;
                    return assign(Assign::FieldRead { dst, obj, field });
                }
                if matches!(self.peek_at(1), Tok::LBracket) {
                    let array = self.name()?;
                    self.bump();
                    let index = self.name()?;
                    self.expect(Tok::RBracket)?;
                    return assign(Assign::ArrayRead { dst, array, index });
                }
            }
            _ => {}
        }
        let lhs = self.atom()?;
        if let Some(op) = self.binop() {
            self.bump();
            let rhs = self.atom()?;
            return assign(Assign::Binary { dst, op, lhs, rhs });
        }
        assign(match lhs {
            Atom::Var(src) => Assign::Copy { dst, src },
            Atom::Int(n) => Assign::Const { dst, value: Const::Int(n) },
            Atom::Null => Assign::Const { dst, value: Const::Null },
        })
    }

    fn array_len(&mut self) -> PResult<u32> {
        let span = self.span();
        let n = self.int_lit(false)?;
        u32::try_from(n).map_err(|_| SyntaxError::new(span, vec!["array length".into()], "oversized length"))
    }

    fn bottom(&mut self) -> PResult<BottomAssign> {
        // an empty target list marks divergence that writes nothing
        let mut targets = Vec::new();
        if *self.peek() != Tok::Assign {
            targets.push(self.bottom_target()?);
            while self.eat(&Tok::Comma) {
                targets.push(self.bottom_target()?);
            }
        }
        self.expect(Tok::Assign)?;
        self.expect_kw("bottom")?;
        self.expect(Tok::LParen)?;
        let cause = match self.peek().clone() {
            Tok::Ident(s) => match DivergenceCause::from_keyword(&s) {
                Some(c) => {
                    self.bump();
                    c
                }
                None => return self.err(&["`api`", "`loop`", "`recursion`"]),
            },
            _ => return self.err(&["`api`", "`loop`", "`recursion`"]),
        };
        self.expect(Tok::RParen)?;
        self.expect(Tok::Semi)?;
        Ok(BottomAssign { targets, cause })
    }

    fn bottom_target(&mut self) -> PResult<Representative> {
        let current = self.current.clone().expect("bottom statements only occur in method bodies");
        if self.eat_kw("ret") {
            return Ok(Representative::Scalar(VarId::new(&current, RET)));
        }
        if matches!(self.peek(), Tok::Ident(s) if s == "part") && matches!(self.peek_at(1), Tok::Hash) {
            self.bump();
            self.bump();
            let span = self.span();
            let n = self.int_lit(false)?;
            let id = u32::try_from(n).map_err(|_| SyntaxError::new(span, vec!["partition id".into()], "oversized id"))?;
            return Ok(Representative::ArrayPart(PartId(id)));
        }
        let first = self.name()?;
        if self.eat(&Tok::ColonColon) {
            let var = self.scalar_name()?;
            return Ok(Representative::Scalar(VarId { method: MethodId { owner: None, name: first }, name: var }));
        }
        if self.eat(&Tok::Dot) {
            let second = self.name()?;
            if self.eat(&Tok::ColonColon) {
                let var = self.scalar_name()?;
                return Ok(Representative::Scalar(VarId {
                    method: MethodId { owner: Some(first), name: second },
                    name: var,
                }));
            }
            return Ok(Representative::TypeField { class: first, field: second });
        }
        Ok(Representative::Scalar(VarId { method: current, name: first }))
    }

    fn scalar_name(&mut self) -> PResult<Symbol> {
        if self.eat_kw("ret") {
            return Ok(Symbol::new(RET));
        }
        self.name()
    }
}
