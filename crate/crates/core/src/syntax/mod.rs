//! Abstract syntax of the source and target languages.
//!
//! Binders are explicit [`Name`]s with unique stamps. Equality of terms is
//! [`Syntax::alpha_eq`]; the derived `PartialEq` is structural and only useful
//! when names are known to coincide.

mod src;
mod tgt;
mod types;

pub use src::SrcTerm;
pub use tgt::TgtTerm;
pub use types::{SrcType, TgtType};

use std::collections::HashSet;

use crate::name::Name;

/// Operations every term language provides.
pub trait Syntax: Clone + std::fmt::Debug {
    fn var(name: Name) -> Self;

    fn as_var(&self) -> Option<&Name>;

    /// Free variables in order of first occurrence (leftmost, outside-in),
    /// without duplicates.
    fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut seen, &mut out);
        out
    }

    #[doc(hidden)]
    fn collect_free(&self, bound: &mut Vec<Name>, seen: &mut HashSet<Name>, out: &mut Vec<Name>);

    fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Simultaneous capture-avoiding substitution.
    fn subst(&self, bindings: &Subst<Self>) -> Self {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut avoid = HashSet::new();
        for (_, t) in bindings.iter() {
            avoid.extend(t.free_vars());
        }
        self.subst_with(&mut Scope {
            subst: bindings,
            avoid: &avoid,
            binders: Vec::new(),
        })
    }

    #[doc(hidden)]
    fn subst_with(&self, scope: &mut Scope<'_, Self>) -> Self;

    fn alpha_eq(&self, other: &Self) -> bool {
        let mut env = Vec::new();
        self.alpha_eq_in(other, &mut env)
    }

    #[doc(hidden)]
    fn alpha_eq_in(&self, other: &Self, env: &mut Vec<(Name, Name)>) -> bool;

    fn is_value(&self) -> bool;

    /// Number of AST nodes.
    fn size(&self) -> usize;
}

/// A simultaneous substitution, kept in insertion order.
#[derive(Clone, Debug, Default)]
pub struct Subst<T> {
    entries: Vec<(Name, T)>,
}

/// Substitutions of closed values, as used by the evaluators and the
/// logical relations.
pub type ValueSubst<T> = Subst<T>;

impl<T> Subst<T> {
    pub fn new() -> Self {
        Subst {
            entries: Vec::new(),
        }
    }

    pub fn single(name: Name, term: T) -> Self {
        Subst {
            entries: vec![(name, term)],
        }
    }

    /// Adds a binding; a later binding for the same name replaces the earlier one.
    pub fn insert(&mut self, name: Name, term: T) {
        self.entries.retain(|(n, _)| n != &name);
        self.entries.push((name, term));
    }

    pub fn with(mut self, name: Name, term: T) -> Self {
        self.insert(name, term);
        self
    }

    pub fn get(&self, name: &Name) -> Option<&T> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, T)> {
        self.entries.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(n, _)| n)
    }
}

/// A substitution being pushed under binders. Binders met on the way down
/// shadow the substitution and are renamed when they would capture a free
/// variable of its range; the range itself is never copied until it is used.
#[doc(hidden)]
pub struct Scope<'a, T> {
    subst: &'a Subst<T>,
    avoid: &'a HashSet<Name>,
    binders: Vec<(Name, Name)>,
}

impl<T: Syntax> Scope<'_, T> {
    pub(crate) fn lookup(&self, x: &Name) -> T {
        match self.binders.iter().rev().find(|(n, _)| n == x) {
            Some((_, emitted)) => T::var(emitted.clone()),
            None => self
                .subst
                .get(x)
                .cloned()
                .unwrap_or_else(|| T::var(x.clone())),
        }
    }

    /// Enters binder `name`, returning the name to emit for it.
    pub(crate) fn bind(&mut self, name: &Name) -> Name {
        let emitted = if self.avoid.contains(name) {
            name.refresh()
        } else {
            name.clone()
        };
        self.binders.push((name.clone(), emitted.clone()));
        emitted
    }

    pub(crate) fn unbind(&mut self, count: usize) {
        self.binders.truncate(self.binders.len() - count);
    }
}

impl<T> FromIterator<(Name, T)> for Subst<T> {
    fn from_iter<I: IntoIterator<Item = (Name, T)>>(iter: I) -> Self {
        let mut s = Subst::new();
        for (n, t) in iter {
            s.entries.retain(|(m, _)| m != &n);
            s.entries.push((n, t));
        }
        s
    }
}

pub(crate) fn lookup_bound(env: &[(Name, Name)], a: &Name, b: &Name) -> bool {
    let left = env.iter().rposition(|(l, _)| l == a);
    let right = env.iter().rposition(|(_, r)| r == b);
    match (left, right) {
        (None, None) => a == b,
        (Some(i), Some(j)) => i == j,
        _ => false,
    }
}

pub(crate) fn note_free(
    name: &Name,
    bound: &[Name],
    seen: &mut HashSet<Name>,
    out: &mut Vec<Name>,
) {
    if !bound.contains(name) && seen.insert(name.clone()) {
        out.push(name.clone());
    }
}
