use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use crate::hoist::HoistedProgram;
use crate::name::Name;
use crate::syntax::{SrcTerm, Syntax, TgtTerm};

/// Assigns every distinct [`Name`] a distinct printable identifier. Free
/// names keep their base; bound names take their base when it is unused and
/// a numbered variant otherwise. The result depends only on the order in
/// which names occur, never on stamp values.
struct Display {
    names: HashMap<Name, String>,
    taken: HashSet<String>,
}

impl Display {
    fn new(free: &[Name]) -> Self {
        let mut d = Display {
            names: HashMap::new(),
            taken: HashSet::new(),
        };
        for n in free {
            d.assign(n);
        }
        d
    }

    fn assign(&mut self, n: &Name) {
        if self.names.contains_key(n) {
            return;
        }
        let mut candidate = n.base().to_string();
        let mut i = 1;
        while self.taken.contains(&candidate) {
            candidate = format!("{}_{}", n.base(), i);
            i += 1;
        }
        self.taken.insert(candidate.clone());
        self.names.insert(n.clone(), candidate);
    }

    fn get(&self, n: &Name) -> &str {
        &self.names[n]
    }
}

fn src_binders(m: &SrcTerm, d: &mut Display) {
    match m {
        SrcTerm::Num(_) | SrcTerm::Unit => {}
        SrcTerm::Var(x) => d.assign(x),
        SrcTerm::Pred(a) | SrcTerm::Fst(a) | SrcTerm::Snd(a) => src_binders(a, d),
        SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) => {
            src_binders(a, d);
            src_binders(b, d);
        }
        SrcTerm::Ifz(a, b, c) => {
            src_binders(a, d);
            src_binders(b, d);
            src_binders(c, d);
        }
        SrcTerm::Let(a, x, b) => {
            src_binders(a, d);
            d.assign(x);
            src_binders(b, d);
        }
        SrcTerm::Fix { fun, arg, body, .. } => {
            d.assign(fun);
            d.assign(arg);
            src_binders(body, d);
        }
    }
}

fn tgt_binders(m: &TgtTerm, d: &mut Display) {
    match m {
        TgtTerm::Num(_) | TgtTerm::Unit => {}
        TgtTerm::Var(x) => d.assign(x),
        TgtTerm::Pred(a) | TgtTerm::Fst(a) | TgtTerm::Snd(a) => tgt_binders(a, d),
        TgtTerm::Plus(a, b) | TgtTerm::Pair(a, b) | TgtTerm::App(a, b) | TgtTerm::Clos(a, b) => {
            tgt_binders(a, d);
            tgt_binders(b, d);
        }
        TgtTerm::Ifz(a, b, c) => {
            tgt_binders(a, d);
            tgt_binders(b, d);
            tgt_binders(c, d);
        }
        TgtTerm::Let(a, x, b) => {
            tgt_binders(a, d);
            d.assign(x);
            tgt_binders(b, d);
        }
        TgtTerm::Abs { param, body, .. } => {
            d.assign(param);
            tgt_binders(body, d);
        }
        TgtTerm::Open {
            scrut,
            fun,
            env,
            body,
        } => {
            tgt_binders(scrut, d);
            d.assign(fun);
            d.assign(env);
            tgt_binders(body, d);
        }
    }
}

fn write_src(m: &SrcTerm, d: &Display, out: &mut String) {
    match m {
        SrcTerm::Num(n) => write!(out, "{n}").unwrap(),
        SrcTerm::Var(x) => out.push_str(d.get(x)),
        SrcTerm::Unit => out.push_str("()"),
        SrcTerm::Pred(a) => unary("pred", &**a, d, out, write_src),
        SrcTerm::Fst(a) => unary("fst", &**a, d, out, write_src),
        SrcTerm::Snd(a) => unary("snd", &**a, d, out, write_src),
        SrcTerm::Plus(a, b) => binary("plus", &**a, &**b, d, out, write_src),
        SrcTerm::Pair(a, b) => binary("pair", &**a, &**b, d, out, write_src),
        SrcTerm::App(a, b) => {
            out.push('(');
            write_src(a, d, out);
            out.push(' ');
            write_src(b, d, out);
            out.push(')');
        }
        SrcTerm::Ifz(a, b, c) => {
            out.push_str("(ifz ");
            write_src(a, d, out);
            out.push(' ');
            write_src(b, d, out);
            out.push(' ');
            write_src(c, d, out);
            out.push(')');
        }
        SrcTerm::Let(a, x, b) => {
            write!(out, "(let (({} ", d.get(x)).unwrap();
            write_src(a, d, out);
            out.push_str(")) ");
            write_src(b, d, out);
            out.push(')');
        }
        SrcTerm::Fix {
            fun_ty,
            arg_ty,
            fun,
            arg,
            body,
        } => {
            write!(
                out,
                "(fix ({} : {fun_ty}) ({} : {arg_ty}) ",
                d.get(fun),
                d.get(arg)
            )
            .unwrap();
            write_src(body, d, out);
            out.push(')');
        }
    }
}

fn write_tgt(m: &TgtTerm, d: &Display, out: &mut String) {
    match m {
        TgtTerm::Num(n) => write!(out, "{n}").unwrap(),
        TgtTerm::Var(x) => out.push_str(d.get(x)),
        TgtTerm::Unit => out.push_str("()"),
        TgtTerm::Pred(a) => unary("pred", &**a, d, out, write_tgt),
        TgtTerm::Fst(a) => unary("fst", &**a, d, out, write_tgt),
        TgtTerm::Snd(a) => unary("snd", &**a, d, out, write_tgt),
        TgtTerm::Plus(a, b) => binary("plus", &**a, &**b, d, out, write_tgt),
        TgtTerm::Pair(a, b) => binary("pair", &**a, &**b, d, out, write_tgt),
        TgtTerm::Clos(a, b) => binary("clos", &**a, &**b, d, out, write_tgt),
        TgtTerm::App(a, b) => {
            out.push('(');
            write_tgt(a, d, out);
            out.push(' ');
            write_tgt(b, d, out);
            out.push(')');
        }
        TgtTerm::Ifz(a, b, c) => {
            out.push_str("(ifz ");
            write_tgt(a, d, out);
            out.push(' ');
            write_tgt(b, d, out);
            out.push(' ');
            write_tgt(c, d, out);
            out.push(')');
        }
        TgtTerm::Let(a, x, b) => {
            write!(out, "(let (({} ", d.get(x)).unwrap();
            write_tgt(a, d, out);
            out.push_str(")) ");
            write_tgt(b, d, out);
            out.push(')');
        }
        TgtTerm::Abs {
            param_ty,
            param,
            body,
        } => {
            write!(out, "(abs ({} : {param_ty}) ", d.get(param)).unwrap();
            write_tgt(body, d, out);
            out.push(')');
        }
        TgtTerm::Open {
            scrut,
            fun,
            env,
            body,
        } => {
            out.push_str("(open ");
            write_tgt(scrut, d, out);
            write!(out, " ({} {}) ", d.get(fun), d.get(env)).unwrap();
            write_tgt(body, d, out);
            out.push(')');
        }
    }
}

fn unary<T>(kw: &str, a: &T, d: &Display, out: &mut String, w: fn(&T, &Display, &mut String)) {
    write!(out, "({kw} ").unwrap();
    w(a, d, out);
    out.push(')');
}

fn binary<T>(
    kw: &str,
    a: &T,
    b: &T,
    d: &Display,
    out: &mut String,
    w: fn(&T, &Display, &mut String),
) {
    write!(out, "({kw} ").unwrap();
    w(a, d, out);
    out.push(' ');
    w(b, d, out);
    out.push(')');
}

pub fn print_src(m: &SrcTerm) -> String {
    let mut d = Display::new(&m.free_vars());
    src_binders(m, &mut d);
    let mut out = String::new();
    write_src(m, &d, &mut out);
    out
}

pub fn print_tgt(m: &TgtTerm) -> String {
    let mut d = Display::new(&m.free_vars());
    tgt_binders(m, &mut d);
    let mut out = String::new();
    write_tgt(m, &d, &mut out);
    out
}

/// Prints a hoisted program as `(letfun ((f1 M1) ...) M)`; with no
/// functions only the main term is printed.
pub fn print_hoisted(p: &HoistedProgram) -> String {
    if p.funs.is_empty() {
        return print_tgt(&p.main);
    }
    let reified = p.reify();
    let mut d = Display::new(&reified.free_vars());
    for (f, body) in &p.funs {
        tgt_binders(body, &mut d);
        d.assign(f);
    }
    tgt_binders(&p.main, &mut d);
    let mut out = String::from("(letfun (");
    for (i, (f, body)) in p.funs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "({} ", d.get(f)).unwrap();
        write_tgt(body, &d, &mut out);
        out.push(')');
    }
    out.push_str(") ");
    write_tgt(&p.main, &d, &mut out);
    out.push(')');
    out
}
