//! Class/interface tables: subtyping, field and method lookup, runtime types.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::lang::ast::{Elem, Program, Type};
use crate::repr::MethodId;
use crate::symbol::Symbol;

#[derive(Clone, Debug, Default)]
pub struct ClassInfo {
    pub superclass: Option<Symbol>,
    pub interfaces: Vec<Symbol>,
    pub fields: Vec<(Symbol, Type)>,
    /// Methods declared directly in the class.
    pub methods: BTreeMap<Symbol, MethodId>,
}

/// The subclass relation ⊇ and interface implementations of a program.
///
/// Construction assumes the `extends` relations are acyclic.
#[derive(Clone, Debug, Default)]
pub struct Hierarchy {
    pub classes: BTreeMap<Symbol, ClassInfo>,
    pub interfaces: BTreeMap<Symbol, Vec<Symbol>>,
    pub free_methods: BTreeMap<Symbol, MethodId>,
    /// Direct subclasses.
    children: BTreeMap<Symbol, Vec<Symbol>>,
}

impl Hierarchy {
    pub fn new(p: &Program) -> Self {
        let mut h = Hierarchy::default();
        for i in &p.interfaces {
            h.interfaces.insert(i.name.clone(), i.extends.clone());
        }
        for c in &p.classes {
            h.classes.insert(
                c.name.clone(),
                ClassInfo {
                    superclass: c.superclass.clone(),
                    interfaces: c.interfaces.clone(),
                    fields: c.fields.iter().map(|f| (f.name.clone(), f.ty.clone())).collect(),
                    methods: BTreeMap::new(),
                },
            );
            if let Some(s) = &c.superclass {
                h.children.entry(s.clone()).or_default().push(c.name.clone());
            }
        }
        for m in &p.methods {
            match &m.owner {
                Some(o) => {
                    if let Some(ci) = h.classes.get_mut(o) {
                        ci.methods.insert(m.name.clone(), m.id());
                    }
                }
                None => {
                    h.free_methods.insert(m.name.clone(), m.id());
                }
            }
        }
        h
    }

    pub fn is_class(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn is_interface(&self, name: &str) -> bool {
        self.interfaces.contains_key(name)
    }

    /// The superclass chain starting at `class` itself.
    pub fn ancestors<'a>(&'a self, class: &'a Symbol) -> impl Iterator<Item = &'a Symbol> + 'a {
        let mut cur = Some(class);
        core::iter::from_fn(move || {
            let c = cur?;
            cur = self.classes.get(c).and_then(|ci| ci.superclass.as_ref());
            Some(c)
        })
    }

    /// `sup ⊇ sub`, reflexive.
    pub fn is_subclass(&self, sub: &Symbol, sup: &str) -> bool {
        self.ancestors(sub).any(|c| &**c == sup)
    }

    /// All interfaces `iface` extends, including itself.
    pub fn super_interfaces(&self, iface: &Symbol) -> BTreeSet<Symbol> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![iface.clone()];
        while let Some(i) = stack.pop() {
            if seen.insert(i.clone()) {
                if let Some(sup) = self.interfaces.get(&i) {
                    stack.extend(sup.iter().cloned());
                }
            }
        }
        seen
    }

    pub fn implements(&self, class: &Symbol, iface: &str) -> bool {
        self.ancestors(class).any(|c| {
            self.classes[c].interfaces.iter().any(|i| self.super_interfaces(i).contains(iface))
        })
    }

    /// Reference subtyping between class/interface names.
    pub fn is_ref_subtype(&self, sub: &Symbol, sup: &Symbol) -> bool {
        if sub == sup {
            return true;
        }
        if self.is_class(sub) {
            if self.is_class(sup) {
                self.is_subclass(sub, sup)
            } else {
                self.implements(sub, sup)
            }
        } else {
            self.is_interface(sup) && self.super_interfaces(sub).contains(&**sup)
        }
    }

    pub fn is_subtype(&self, sub: &Type, sup: &Type) -> bool {
        match (sub, sup) {
            (Type::Int, Type::Int) => true,
            (Type::Ref(a), Type::Ref(b)) => self.is_ref_subtype(a, b),
            (Type::Array(a), Type::Array(b)) => a == b,
            _ => false,
        }
    }

    /// Classes reachable downward from `class`, including itself.
    pub fn subclasses(&self, class: &Symbol) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut stack = alloc::vec![class.clone()];
        while let Some(c) = stack.pop() {
            if out.insert(c.clone()) {
                if let Some(ch) = self.children.get(&c) {
                    stack.extend(ch.iter().cloned());
                }
            }
        }
        out
    }

    /// rt(T): the classes an object of declared type `ty` may have at runtime.
    pub fn runtime_types(&self, ty: &Symbol) -> BTreeSet<Symbol> {
        if self.is_class(ty) {
            return self.subclasses(ty);
        }
        let mut out = BTreeSet::new();
        for (name, ci) in &self.classes {
            if ci.interfaces.iter().any(|i| self.super_interfaces(i).contains(&**ty)) {
                out.extend(self.subclasses(name));
            }
        }
        out
    }

    /// The class declaring `field` on the chain of `class`, with its type.
    /// Fields are never redeclared along a chain, so this is also the highest
    /// declaring class.
    pub fn field<'a>(&'a self, class: &'a Symbol, field: &str) -> Option<(&'a Symbol, &'a Type)> {
        self.ancestors(class).find_map(|c| {
            self.classes[c].fields.iter().find(|(f, _)| &**f == field).map(|(_, t)| (c, t))
        })
    }

    /// Every field of `class`, inherited ones included, with its declaring class.
    pub fn all_fields(&self, class: &Symbol) -> Vec<(Symbol, Symbol, Type)> {
        let mut out = Vec::new();
        for c in self.ancestors(class) {
            for (f, t) in &self.classes[c].fields {
                out.push((c.clone(), f.clone(), t.clone()));
            }
        }
        out
    }

    /// Method `name` as found up the superclass chain of `class`.
    pub fn lookup_method<'a>(&'a self, class: &'a Symbol, name: &str) -> Option<&'a MethodId> {
        self.ancestors(class).find_map(|c| self.classes[c].methods.get(name))
    }

    pub fn elem_type(elem: &Elem) -> Type {
        match elem {
            Elem::Int => Type::Int,
            Elem::Ref(n) => Type::Ref(n.clone()),
        }
    }
}

/// How a call site was bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Dispatch {
    /// Dispatch on the dynamic class of the first actual.
    Virtual,
    Static,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CallTargets {
    pub dispatch: Dispatch,
    /// Distinct possible callees, sorted.
    pub targets: Vec<MethodId>,
}

impl Hierarchy {
    /// Resolves `callee(args)` inside a method owned by `current`, where the
    /// first actual has static type `recv`. Returns `None` if nothing matches.
    pub fn resolve_call(&self, current: Option<&Symbol>, callee: &str, recv: Option<&Type>) -> Option<CallTargets> {
        if let Some(Type::Ref(t)) = recv {
            let targets: BTreeSet<MethodId> =
                self.runtime_types(t).iter().filter_map(|c| self.lookup_method(c, callee)).cloned().collect();
            if !targets.is_empty() {
                return Some(CallTargets { dispatch: Dispatch::Virtual, targets: targets.into_iter().collect() });
            }
        }
        if let Some(c) = current {
            if let Some(m) = self.lookup_method(c, callee) {
                return Some(CallTargets { dispatch: Dispatch::Static, targets: alloc::vec![m.clone()] });
            }
        }
        self.free_methods
            .get(callee)
            .map(|m| CallTargets { dispatch: Dispatch::Static, targets: alloc::vec![m.clone()] })
    }

    /// Dynamic dispatch target for a receiver of runtime class `class`.
    pub fn dispatch<'a>(&'a self, class: &'a Symbol, callee: &str) -> Option<&'a MethodId> {
        self.lookup_method(class, callee)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn h(src: &str) -> Hierarchy {
        Hierarchy::new(&parse(src).unwrap())
    }

    fn set(xs: &[&str]) -> BTreeSet<Symbol> {
        xs.iter().map(|s| Symbol::new(s)).collect()
    }

    #[test]
    fn rt_of_leaf_class_is_itself() {
        let h = h("class C {}");
        assert_eq!(h.runtime_types(&"C".into()), set(&["C"]));
    }

    #[test]
    fn rt_of_interface_includes_subclasses_of_implementors() {
        let h = h("interface I {} class A implements I {} class B extends A {} class Z {}");
        assert_eq!(h.runtime_types(&"I".into()), set(&["A", "B"]));
    }

    #[test]
    fn rt_through_subinterface() {
        let h = h("interface I {} interface J extends I {} class A implements J {} class B extends A {}");
        assert_eq!(h.runtime_types(&"I".into()), set(&["A", "B"]));
        assert_eq!(h.runtime_types(&"J".into()), set(&["A", "B"]));
    }

    #[test]
    fn rt_matches_brute_force_closure_on_four_levels() {
        let src = "interface I {} interface J extends I {}
            class A {} class B extends A implements J {} class C extends B {} class D extends C {}
            class E extends A {} class F extends E implements I {}";
        let h = h(src);
        let classes = ["A", "B", "C", "D", "E", "F"];
        // Brute force: C' ∈ rt(T) iff some ancestor of C' (reflexive) is T or implements T.
        let parent = |c: &str| match c {
            "B" | "E" => Some("A"),
            "C" => Some("B"),
            "D" => Some("C"),
            "F" => Some("E"),
            _ => None,
        };
        let direct_ifaces = |c: &str| match c {
            "B" => alloc::vec!["J", "I"],
            "F" => alloc::vec!["I"],
            _ => alloc::vec![],
        };
        for t in ["A", "B", "C", "D", "E", "F", "I", "J"] {
            let mut expect = BTreeSet::new();
            for c in classes {
                let mut cur = Some(c);
                while let Some(x) = cur {
                    if x == t || direct_ifaces(x).contains(&t) {
                        expect.insert(Symbol::new(c));
                    }
                    cur = parent(x);
                }
            }
            assert_eq!(h.runtime_types(&t.into()), expect, "rt({t})");
        }
    }

    #[test]
    fn field_resolves_to_declaring_class() {
        let h = h("class A { f: int; } class B extends A { g: int; }");
        assert_eq!(h.field(&"B".into(), "f").unwrap().0.as_str(), "A");
        assert_eq!(h.field(&"B".into(), "g").unwrap().0.as_str(), "B");
        assert!(h.field(&"A".into(), "g").is_none());
    }
}
