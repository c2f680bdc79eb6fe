use alloc::collections::BTreeSet;
use alloc::string::String;

use super::*;
use crate::repr::{DivergenceCause, MethodId, Representative};
use crate::symbol::Symbol;

const FIG_A: &str = "
method foo() {
    var x: int;
    x := 5;
    x := bar();
    return x;
}

method bar() {
    var y: int;
    y := 1;
    return y;
}
";

fn syms(xs: &[&str]) -> BTreeSet<Symbol> {
    xs.iter().map(|s| Symbol::new(s)).collect()
}

#[test]
fn fig_a_has_two_methods_and_no_classes() {
    let p = parse(FIG_A).unwrap();
    assert_eq!(p.methods.len(), 2);
    assert_eq!(p.classes.len(), 0);
}

#[test]
fn empty_file_is_empty_program() {
    let p = parse("").unwrap();
    assert!(p.methods.is_empty() && p.classes.is_empty() && p.interfaces.is_empty());
    let p = parse("// only a comment\n").unwrap();
    assert!(p.methods.is_empty());
}

#[test]
fn spans_are_recorded() {
    let p = parse(FIG_A).unwrap();
    let body = p.methods[0].body_stmts();
    assert_eq!(body[0].span, Span::new(4, 5));
    assert_eq!(body[2].span, Span::new(6, 5));
    assert_eq!(p.methods[1].span, Span::new(9, 1));
}

#[test]
fn empty_body_method_pretty_prints_default_return() {
    let p = Program {
        methods: alloc::vec![Method {
            owner: None,
            name: "m".into(),
            formals: alloc::vec![],
            locals: alloc::vec![],
            ret_ty: Type::Int,
            body: Some(alloc::vec![Stmt::new(StmtKind::Return(Atom::Int(0)))]),
            span: Span::default(),
        }],
        ..Program::default()
    };
    assert_eq!(pretty(&p), "method m() {\n    return 0;\n}\n");
}

#[test]
fn pretty_is_deterministic_and_round_trips() {
    let src = "interface I {}

interface J extends I {}

class A implements J {
    f: int;
    next: A;
}

class B extends A {
    arr: int[];
}

method A.get(self: A) {
    var t: int;
    t := self.f;
    return t;
}

method work(o: A, a: int[], n: int): A {
    var i: int, x: int, b: int[], q: A;
    i := 0;
    b := a;
    while i < n do {
        x := b[i];
        if x != 0 then {
            a[i] := -3;
        } else {
            x := -x;
        }
        i := i + 1;
    }
    if o == null then {
        q := new B;
    }
    x := get(o);
    o.next := null;
    b := new int[4];
    x := !x;
    x := 7 << i;
    return o;
}

extern method api(x: int);
";
    let p = parse(src).unwrap();
    let text = pretty(&p);
    assert_eq!(text, src);
    assert_eq!(pretty(&p), pretty(&p.clone()));
    assert_eq!(parse(&text).unwrap().without_spans(), p.without_spans());
}

#[test]
fn omitted_return_type_is_int() {
    let p = parse("method m() { return 1; }").unwrap();
    assert_eq!(p.methods[0].ret_ty, Type::Int);
}

#[test]
fn negative_literals_and_unary_minus() {
    let p = parse("method m(y: int) { var x: int; x := -5; x := -y; x := -5 - y; x := y - -5; return x; }").unwrap();
    let b = p.methods[0].body_stmts();
    assert!(matches!(&b[0].kind, StmtKind::Assign(Assign::Const { value: Const::Int(-5), .. })));
    assert!(matches!(&b[1].kind, StmtKind::Assign(Assign::Unary { op: UnOp::Neg, .. })));
    assert!(matches!(&b[2].kind, StmtKind::Assign(Assign::Binary { lhs: Atom::Int(-5), .. })));
    assert!(matches!(&b[3].kind, StmtKind::Assign(Assign::Binary { rhs: Atom::Int(-5), .. })));
    let p = parse("method m() { var x: int; x := -9223372036854775808; return x; }").unwrap();
    assert!(matches!(
        &p.methods[0].body_stmts()[0].kind,
        StmtKind::Assign(Assign::Const { value: Const::Int(i64::MIN), .. })
    ));
    assert!(parse("method m() { var x: int; x := 9223372036854775808; return x; }").is_err());
}

#[test]
fn nested_dereference_is_a_syntax_error() {
    let src = "class A { f: A; g: int; } method m(o: A) { var x: int; x := o.f.g; return x; }";
    assert!(matches!(parse(src), Err(LangError::Syntax(_))));
    let src = "class A { f: A; g: int; } method m(o: A) { o.f.g := 1; return 0; }";
    assert!(matches!(parse(src), Err(LangError::Syntax(_))));
    let src = "method m(a: int[], i: int) { var x: int; x := a[a[i]]; return x; }";
    assert!(matches!(parse(src), Err(LangError::Syntax(_))));
}

#[test]
fn syntax_error_reports_position_and_expectation() {
    let err = parse("method m() {\n  return\n}").unwrap_err();
    let LangError::Syntax(e) = err else { panic!("{err:?}") };
    assert_eq!(e.span, Span::new(3, 1));
    assert!(!e.expected.is_empty());
}

#[test]
fn name_and_type_errors() {
    assert!(matches!(
        parse("method m() { x := 1; return 0; }"),
        Err(LangError::UnresolvedName { .. })
    ));
    assert!(matches!(parse("method m(o: Nope) { return 0; }"), Err(LangError::UnknownType { .. })));
    assert!(matches!(parse("class A extends B {} class B extends A {}"), Err(LangError::InheritanceCycle { .. })));
    assert!(matches!(parse("interface I extends J {} interface J extends I {}"), Err(LangError::InheritanceCycle { .. })));
    assert!(matches!(parse("class A {} class A {}"), Err(LangError::Duplicate { .. })));
    assert!(matches!(parse("class A { f: int; } class B extends A { f: int; }"), Err(LangError::Duplicate { .. })));
    assert!(matches!(parse("method m(x: int) { var x: int; return 0; }"), Err(LangError::Duplicate { .. })));
    assert!(matches!(parse("method m() { return 0; } method m() { return 1; }"), Err(LangError::Duplicate { .. })));
    assert!(matches!(parse("class A implements A {}"), Err(LangError::UnknownType { .. })));
    assert!(matches!(parse("method m() { var o: A; return 0; } class A {} method n() { var x: int; x := q(); return x; }"), Err(LangError::UnresolvedName { .. })));
}

#[test]
fn type_errors() {
    assert!(matches!(parse("class A {} method m() { var x: int; x := new A; return 0; }"), Err(LangError::Type { .. })));
    assert!(matches!(parse("class A {} method m() { var o: A; o := 3; return 0; }"), Err(LangError::Type { .. })));
    assert!(matches!(parse("method m(a: int[]) { var x: int; x := a.f; return 0; }"), Err(LangError::Type { .. })));
    assert!(matches!(parse("class A {} method m(o: A): int { return o; }"), Err(LangError::Type { .. })));
    assert!(parse("class A {} class B extends A {} method m(o: B): A { var a: A; a := o; return a; }").is_ok());
    assert!(matches!(parse("class A {} class B extends A {} method m(o: A): B { return o; }"), Err(LangError::Type { .. })));
    assert!(parse("class A {} method m(o: A) { var x: int; if o == null then { x := 1; } return 0; }").is_ok());
    assert!(matches!(parse("method n(x: int) { return x; } method m() { var x: int; x := n(); return x; }"), Err(LangError::Type { .. })));
}

#[test]
fn return_discipline() {
    assert!(matches!(parse("method m() { var x: int; x := 1; }"), Err(LangError::MissingReturn { .. })));
    assert!(matches!(
        parse("method m(x: int) { if x < 0 then { return 1; } }"),
        Err(LangError::MissingReturn { .. })
    ));
    assert!(parse("method m(x: int) { if x < 0 then { return 1; } else { return 2; } }").is_ok());
    assert!(matches!(
        parse("method m() { var x: int; return 0; x := 1; }"),
        Err(LangError::Unreachable { .. })
    ));
    assert!(matches!(
        parse("method m(x: int) { while x < 3 do { if x < 1 then { return 1; } } return 0; }"),
        Err(LangError::ReturnInLoop { .. })
    ));
}

#[test]
fn ret_is_reserved() {
    assert!(parse("method m() { var ret: int; return 0; }").is_err());
    assert!(parse("method m() { ret := 1; return 0; }").is_err());
}

#[test]
fn bottom_only_in_transformed_programs() {
    let src = "class A { f: int; } method m(x: int) { var y: int; y, A.f, part#2, ret := bottom(loop); return y; }";
    assert!(matches!(parse(src), Err(LangError::Syntax(_))));
    let p = parse_transformed(src).unwrap();
    let me = MethodId::free("m");
    let StmtKind::Bottom(b) = &p.methods[0].body_stmts()[0].kind else { panic!() };
    assert_eq!(b.cause, DivergenceCause::Loop);
    assert_eq!(
        b.targets,
        alloc::vec![
            Representative::scalar(&me, "y"),
            Representative::type_field("A", "f"),
            Representative::ArrayPart(crate::repr::PartId(2)),
            Representative::scalar(&me, "ret"),
        ]
    );
    assert_eq!(pretty(&p), String::from("class A {\n    f: int;\n}\n\nmethod m(x: int) {\n    var y: int;\n    y, A.f, part#2, ret := bottom(loop);\n    return y;\n}\n"));
    let q = parse_transformed("method m() { other::x, C.k::ret := bottom(recursion); return 0; }").unwrap();
    let text = pretty(&q);
    assert!(text.contains("other::x, C.k::ret := bottom(recursion);"));
    assert_eq!(parse_transformed(&text).unwrap().without_spans(), q.without_spans());
    let e = parse_transformed("method m() { := bottom(loop); return 0; }").unwrap();
    let StmtKind::Bottom(b) = &e.methods[0].body_stmts()[0].kind else { panic!() };
    assert!(b.targets.is_empty());
    assert!(pretty(&e).contains("    := bottom(loop);\n"));
}

#[test]
fn free_vars_examples() {
    let binary = Assign::Binary {
        dst: "x".into(),
        op: BinOp::Add,
        lhs: Atom::Var("y".into()),
        rhs: Atom::Var("z".into()),
    };
    assert_eq!(free_vars(&binary), syms(&["y", "z"]));
    assert!(free_vars(&Const::Int(5)).is_empty());
    assert!(free_vars(&Assign::Const { dst: "x".into(), value: Const::Int(5) }).is_empty());
    let read = Assign::ArrayRead { dst: "x".into(), array: "a".into(), index: "i".into() };
    assert_eq!(free_vars(&read), syms(&["a", "i"]));
    let cond = Cond { lhs: Atom::Var("i".into()), op: RelOp::Lt, rhs: Atom::Int(3) };
    assert_eq!(free_vars(&cond), syms(&["i"]));
}

#[test]
fn virtual_calls_type_check_receivers() {
    let src = "class A {} class B extends A {}
        method A.m(self: A) { return 1; }
        method B.m(self: B) { return 2; }
        method main(o: A) { var x: int; x := m(o); return x; }";
    assert!(parse(src).is_ok());
    let bad = "class A {} class B extends A {}
        method A.m(self: A) { return 1; }
        method B.m(self: A, k: int) { return 2; }
        method main(o: A) { var x: int; x := m(o); return x; }";
    assert!(matches!(parse(bad), Err(LangError::Type { .. })));
}
