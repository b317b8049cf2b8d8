use num_bigint::BigUint;

use super::sexp::{read_one, Sexp};
use super::{SyntaxError, KEYWORDS};
use crate::name::Name;
use crate::syntax::{SrcTerm, SrcType, TgtTerm, TgtType};

pub fn parse_src(text: &str) -> Result<SrcTerm, SyntaxError> {
    let e = read_one(text)?;
    Scope::default().src(&e)
}

pub fn parse_tgt(text: &str) -> Result<TgtTerm, SyntaxError> {
    let e = read_one(text)?;
    Scope::default().tgt(&e)
}

pub fn parse_src_type(text: &str) -> Result<SrcType, SyntaxError> {
    src_type(&read_one(text)?)
}

pub fn parse_tgt_type(text: &str) -> Result<TgtType, SyntaxError> {
    tgt_type(&read_one(text)?)
}

fn err<T>(e: &Sexp, msg: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError::new(e.pos(), msg))
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'') && !KEYWORDS.contains(&s)
}

fn ident(e: &Sexp) -> Result<&str, SyntaxError> {
    match e.atom() {
        Some(s) if is_ident(s) => Ok(s),
        Some(s) => err(e, format!("expected identifier, found `{s}`")),
        None => err(e, "expected identifier, found list"),
    }
}

fn numeral(s: &str) -> Option<BigUint> {
    if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

fn list<'a>(e: &'a Sexp, len: usize, what: &str) -> Result<&'a [Sexp], SyntaxError> {
    match e {
        Sexp::List(items, _) if items.len() == len => Ok(items),
        _ => err(e, format!("malformed {what}")),
    }
}

/// `(x : T)`
fn typed_binder(e: &Sexp) -> Result<(&str, &Sexp), SyntaxError> {
    let items = list(e, 3, "binder, expected (x : T)")?;
    if items[1].atom() != Some(":") {
        return err(&items[1], "expected `:`");
    }
    Ok((ident(&items[0])?, &items[2]))
}

fn src_type(e: &Sexp) -> Result<SrcType, SyntaxError> {
    match e {
        Sexp::Atom(s, _) => match s.as_str() {
            "nat" => Ok(SrcType::Nat),
            "unit" => Ok(SrcType::Unit),
            _ => err(e, format!("unknown type `{s}`")),
        },
        Sexp::List(items, _) => {
            let head = items.first().and_then(Sexp::atom);
            match (head, items.len()) {
                (Some("*"), 3) => Ok(SrcType::prod(src_type(&items[1])?, src_type(&items[2])?)),
                (Some("->"), 3) => Ok(SrcType::arr(src_type(&items[1])?, src_type(&items[2])?)),
                _ => err(e, "malformed source type"),
            }
        }
    }
}

fn tgt_type(e: &Sexp) -> Result<TgtType, SyntaxError> {
    match e {
        Sexp::Atom(s, _) => match s.as_str() {
            "nat" => Ok(TgtType::Nat),
            "unit" => Ok(TgtType::Unit),
            _ => err(e, format!("unknown type `{s}`")),
        },
        Sexp::List(items, _) => {
            let head = items.first().and_then(Sexp::atom);
            match (head, items.len()) {
                (Some("*"), 3) => Ok(TgtType::prod(tgt_type(&items[1])?, tgt_type(&items[2])?)),
                (Some("->"), 3) => Ok(TgtType::arr(tgt_type(&items[1])?, tgt_type(&items[2])?)),
                (Some("=>"), 3) => Ok(TgtType::code(tgt_type(&items[1])?, tgt_type(&items[2])?)),
                (Some("rigid"), 2) => match items[1].atom().and_then(|s| s.parse().ok()) {
                    Some(k) => Ok(TgtType::Rigid(k)),
                    None => err(&items[1], "expected rigid type id"),
                },
                _ => err(e, "malformed target type"),
            }
        }
    }
}

#[derive(Default)]
struct Scope {
    bound: Vec<(String, Name)>,
}

impl Scope {
    fn lookup(&self, s: &str) -> Name {
        self.bound
            .iter()
            .rev()
            .find(|(k, _)| k == s)
            .map(|(_, n)| n.clone())
            .unwrap_or_else(|| Name::global(s))
    }

    fn bind(&mut self, s: &str) -> Name {
        let n = Name::fresh(s);
        self.bound.push((s.to_string(), n.clone()));
        n
    }

    fn unbind(&mut self, k: usize) {
        self.bound.truncate(self.bound.len() - k);
    }

    /// `((x M) ...)` followed by a body; sequential bindings.
    fn let_bindings(e: &Sexp) -> Result<Vec<(&str, &Sexp)>, SyntaxError> {
        let items = match e {
            Sexp::List(items, _) if !items.is_empty() => items,
            _ => return err(e, "malformed bindings, expected ((x M) ...)"),
        };
        items
            .iter()
            .map(|b| {
                let pair = list(b, 2, "binding, expected (x M)")?;
                Ok((ident(&pair[0])?, &pair[1]))
            })
            .collect()
    }

    fn src(&mut self, e: &Sexp) -> Result<SrcTerm, SyntaxError> {
        let items = match e {
            Sexp::Atom(s, _) => {
                if let Some(n) = numeral(s) {
                    return Ok(SrcTerm::Num(n));
                }
                if s == "unit" {
                    return Ok(SrcTerm::Unit);
                }
                return Ok(SrcTerm::Var(self.lookup(ident(e)?)));
            }
            Sexp::List(items, _) => items,
        };
        if items.is_empty() {
            return Ok(SrcTerm::Unit);
        }
        let kw = items[0].atom().filter(|s| KEYWORDS.contains(s));
        let arity = |n: usize| -> Result<(), SyntaxError> {
            if items.len() == n + 1 {
                Ok(())
            } else {
                err(
                    e,
                    format!("`{}` expects {n} argument(s)", kw.unwrap_or("app")),
                )
            }
        };
        match kw {
            Some("pred") => {
                arity(1)?;
                Ok(SrcTerm::pred(self.src(&items[1])?))
            }
            Some("fst") => {
                arity(1)?;
                Ok(SrcTerm::fst(self.src(&items[1])?))
            }
            Some("snd") => {
                arity(1)?;
                Ok(SrcTerm::snd(self.src(&items[1])?))
            }
            Some("plus") => {
                arity(2)?;
                Ok(SrcTerm::plus(self.src(&items[1])?, self.src(&items[2])?))
            }
            Some("pair") => {
                arity(2)?;
                Ok(SrcTerm::pair(self.src(&items[1])?, self.src(&items[2])?))
            }
            Some("app") => {
                arity(2)?;
                Ok(SrcTerm::app(self.src(&items[1])?, self.src(&items[2])?))
            }
            Some("ifz") => {
                arity(3)?;
                Ok(SrcTerm::ifz(
                    self.src(&items[1])?,
                    self.src(&items[2])?,
                    self.src(&items[3])?,
                ))
            }
            Some("unit") => {
                arity(0)?;
                Ok(SrcTerm::Unit)
            }
            Some("let") => {
                arity(2)?;
                let binds = Self::let_bindings(&items[1])?;
                let mut names = Vec::new();
                for (x, m) in &binds {
                    let m = self.src(m)?;
                    names.push((self.bind(x), m));
                }
                let body = self.src(&items[2])?;
                self.unbind(names.len());
                Ok(names
                    .into_iter()
                    .rev()
                    .fold(body, |acc, (x, m)| SrcTerm::let_(x, m, acc)))
            }
            Some("fix") => {
                arity(3)?;
                let (f, fty) = typed_binder(&items[1])?;
                let (x, xty) = typed_binder(&items[2])?;
                let fun_ty = src_type(fty)?;
                let arg_ty = src_type(xty)?;
                let fun = self.bind(f);
                let arg = self.bind(x);
                let body = self.src(&items[3])?;
                self.unbind(2);
                Ok(SrcTerm::Fix {
                    fun_ty,
                    arg_ty,
                    fun,
                    arg,
                    body: Box::new(body),
                })
            }
            Some(k @ ("abs" | "clos" | "open" | "letfun" | "cps")) => err(
                &items[0],
                format!("`{k}` is not part of the source language"),
            ),
            Some(k) => err(&items[0], format!("unexpected keyword `{k}`")),
            None => self.implicit_app(items, |s, x| s.src(x), SrcTerm::app),
        }
    }

    fn implicit_app<T>(
        &mut self,
        items: &[Sexp],
        mut term: impl FnMut(&mut Self, &Sexp) -> Result<T, SyntaxError>,
        app: impl Fn(T, T) -> T,
    ) -> Result<T, SyntaxError> {
        if items.len() < 2 {
            return err(&items[0], "application needs an argument");
        }
        let mut acc = term(self, &items[0])?;
        for a in &items[1..] {
            let a = term(self, a)?;
            acc = app(acc, a);
        }
        Ok(acc)
    }

    fn tgt(&mut self, e: &Sexp) -> Result<TgtTerm, SyntaxError> {
        let items = match e {
            Sexp::Atom(s, _) => {
                if let Some(n) = numeral(s) {
                    return Ok(TgtTerm::Num(n));
                }
                if s == "unit" {
                    return Ok(TgtTerm::Unit);
                }
                return Ok(TgtTerm::Var(self.lookup(ident(e)?)));
            }
            Sexp::List(items, _) => items,
        };
        if items.is_empty() {
            return Ok(TgtTerm::Unit);
        }
        let kw = items[0].atom().filter(|s| KEYWORDS.contains(s));
        let arity = |n: usize| -> Result<(), SyntaxError> {
            if items.len() == n + 1 {
                Ok(())
            } else {
                err(
                    e,
                    format!("`{}` expects {n} argument(s)", kw.unwrap_or("app")),
                )
            }
        };
        match kw {
            Some("pred") => {
                arity(1)?;
                Ok(TgtTerm::pred(self.tgt(&items[1])?))
            }
            Some("fst") => {
                arity(1)?;
                Ok(TgtTerm::fst(self.tgt(&items[1])?))
            }
            Some("snd") => {
                arity(1)?;
                Ok(TgtTerm::snd(self.tgt(&items[1])?))
            }
            Some("plus") => {
                arity(2)?;
                Ok(TgtTerm::plus(self.tgt(&items[1])?, self.tgt(&items[2])?))
            }
            Some("pair") => {
                arity(2)?;
                Ok(TgtTerm::pair(self.tgt(&items[1])?, self.tgt(&items[2])?))
            }
            Some("app") => {
                arity(2)?;
                Ok(TgtTerm::app(self.tgt(&items[1])?, self.tgt(&items[2])?))
            }
            Some("clos") => {
                arity(2)?;
                Ok(TgtTerm::clos(self.tgt(&items[1])?, self.tgt(&items[2])?))
            }
            Some("ifz") => {
                arity(3)?;
                Ok(TgtTerm::ifz(
                    self.tgt(&items[1])?,
                    self.tgt(&items[2])?,
                    self.tgt(&items[3])?,
                ))
            }
            Some("unit") => {
                arity(0)?;
                Ok(TgtTerm::Unit)
            }
            Some(k @ ("let" | "letfun")) => {
                arity(2)?;
                let binds = Self::let_bindings(&items[1])?;
                if k == "letfun" && binds.is_empty() {
                    return err(&items[1], "empty letfun");
                }
                let mut names = Vec::new();
                for (x, m) in &binds {
                    let m = self.tgt(m)?;
                    names.push((self.bind(x), m));
                }
                let body = self.tgt(&items[2])?;
                self.unbind(names.len());
                Ok(names
                    .into_iter()
                    .rev()
                    .fold(body, |acc, (x, m)| TgtTerm::let_(x, m, acc)))
            }
            Some("abs") => {
                arity(2)?;
                let (x, ty) = typed_binder(&items[1])?;
                let param_ty = tgt_type(ty)?;
                let param = self.bind(x);
                let body = self.tgt(&items[2])?;
                self.unbind(1);
                Ok(TgtTerm::Abs {
                    param_ty,
                    param,
                    body: Box::new(body),
                })
            }
            Some("open") => {
                arity(3)?;
                let scrut = self.tgt(&items[1])?;
                let names = list(&items[2], 2, "open binders, expected (f e)")?;
                let (f, env) = (ident(&names[0])?, ident(&names[1])?);
                let fun = self.bind(f);
                let env = self.bind(env);
                let body = self.tgt(&items[3])?;
                self.unbind(2);
                Ok(TgtTerm::open(scrut, fun, env, body))
            }
            Some(k @ ("fix" | "cps")) => err(
                &items[0],
                format!("`{k}` is not part of the target language"),
            ),
            Some(k) => err(&items[0], format!("unexpected keyword `{k}`")),
            None => self.implicit_app(items, |s, x| s.tgt(x), TgtTerm::app),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Syntax;

    #[test]
    fn parses_plus() {
        assert_eq!(
            parse_src("(plus 1 2)").unwrap(),
            SrcTerm::plus(SrcTerm::num(1), SrcTerm::num(2))
        );
    }

    #[test]
    fn ill_typed_terms_still_parse() {
        assert_eq!(parse_src("(fst ())").unwrap(), SrcTerm::fst(SrcTerm::Unit));
    }

    #[test]
    fn running_example() {
        let m = parse_src(
            "(let ((x 2)) (let ((y 3)) (fix (f : (-> nat nat)) (z : nat) (plus z (plus x y)))))",
        )
        .unwrap();
        let x = Name::fresh("x");
        let y = Name::fresh("y");
        let f = Name::fresh("f");
        let z = Name::fresh("z");
        let v = |n: &Name| SrcTerm::Var(n.clone());
        let expected = SrcTerm::let_(
            x.clone(),
            SrcTerm::num(2),
            SrcTerm::let_(
                y.clone(),
                SrcTerm::num(3),
                SrcTerm::fix(
                    f,
                    z.clone(),
                    SrcType::Nat,
                    SrcType::Nat,
                    SrcTerm::plus(v(&z), SrcTerm::plus(v(&x), v(&y))),
                ),
            ),
        );
        assert!(m.alpha_eq(&expected));
        assert!(m.is_closed());
    }

    #[test]
    fn open_terms_are_legal() {
        let m = parse_src("(plus x 1)").unwrap();
        assert_eq!(m.free_vars(), vec![Name::global("x")]);
    }

    #[test]
    fn implicit_application() {
        let m = parse_src("(f 1 2)").unwrap();
        let f = SrcTerm::Var(Name::global("f"));
        assert_eq!(
            m,
            SrcTerm::app(SrcTerm::app(f, SrcTerm::num(1)), SrcTerm::num(2))
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_src("(plus 1\n  (fix (f nat) (x : nat) x))").unwrap_err();
        assert_eq!((e.line, e.col), (2, 8));
        let e = parse_src("(abs (x : nat) x)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 2));
        assert!(parse_src("(pred 1 2)").is_err());
        assert!(parse_tgt("(fix (f : nat) (x : nat) x)").is_err());
    }

    #[test]
    fn target_forms() {
        let m = parse_tgt("(clos (abs (p : nat) p) ())").unwrap();
        assert!(m.is_value());
        let m = parse_tgt("(open c (f e) (f e))").unwrap();
        assert_eq!(m.free_vars(), vec![Name::global("c")]);
        let m = parse_tgt("(letfun ((g (abs (u : unit) 1))) (g ()))").unwrap();
        assert!(matches!(m, TgtTerm::Let(..)));
    }

    #[test]
    fn types() {
        assert_eq!(
            parse_src_type("(-> (* nat unit) nat)").unwrap(),
            SrcType::arr(SrcType::prod(SrcType::Nat, SrcType::Unit), SrcType::Nat)
        );
        assert!(parse_src_type("(=> nat nat)").is_err());
        assert_eq!(
            parse_tgt_type("(=> nat (rigid 4))").unwrap(),
            TgtType::code(TgtType::Nat, TgtType::Rigid(4))
        );
    }
}
