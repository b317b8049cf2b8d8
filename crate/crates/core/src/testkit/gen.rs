use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::name::Name;
use crate::syntax::{SrcTerm, SrcType};
use crate::typing::SrcCtx;

#[derive(Clone, Debug)]
pub struct GenCfg {
    pub seed: u64,
    /// Rough bound on the number of nodes in a generated term.
    pub max_size: usize,
    /// Type of every generated term; a random type per case when `None`.
    pub target: Option<SrcType>,
    /// Step budget used when running generated programs.
    pub fuel: u64,
}

impl Default for GenCfg {
    fn default() -> Self {
        GenCfg {
            seed: 0,
            max_size: 40,
            target: Some(SrcType::Nat),
            fuel: 500,
        }
    }
}

/// A typing-derivation-directed term generator.
pub struct Generator {
    rng: ChaCha8Rng,
    env: Vec<(Name, SrcType)>,
}

impl Generator {
    /// Generator for case `index` of a run seeded with `seed`. Each case has
    /// its own stream, so cases can be produced in any order.
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Generator {
            rng,
            env: Vec::new(),
        }
    }

    /// A random type; `depth` bounds nesting of products and arrows.
    pub fn ty(&mut self, depth: u32) -> SrcType {
        let roll = if depth == 0 {
            self.rng.gen_range(0..7)
        } else {
            self.rng.gen_range(0..10)
        };
        match roll {
            0..=5 => SrcType::Nat,
            6 => SrcType::Unit,
            7 | 8 => SrcType::prod(self.ty(depth - 1), self.ty(depth - 1)),
            _ => SrcType::arr(self.ty(depth - 1), self.ty(depth - 1)),
        }
    }

    fn numeral(&mut self) -> SrcTerm {
        if self.rng.gen_bool(0.9) {
            SrcTerm::num(self.rng.gen_range(0..10))
        } else {
            SrcTerm::num(self.rng.gen_range(10..1000))
        }
    }

    fn var_of(&mut self, ty: &SrcType) -> Option<SrcTerm> {
        let found: Vec<&Name> = self
            .env
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(x, _)| x)
            .collect();
        if found.is_empty() {
            None
        } else {
            let i = self.rng.gen_range(0..found.len());
            Some(SrcTerm::Var(found[i].clone()))
        }
    }

    fn bind<R>(&mut self, x: &Name, ty: &SrcType, f: impl FnOnce(&mut Self) -> R) -> R {
        self.env.push((x.clone(), ty.clone()));
        let r = f(self);
        self.env.pop();
        r
    }

    /// A smallest-effort term of `ty`.
    fn leaf(&mut self, ty: &SrcType) -> SrcTerm {
        if self.rng.gen_bool(0.5) {
            if let Some(v) = self.var_of(ty) {
                return v;
            }
        }
        match ty {
            SrcType::Nat => self.numeral(),
            SrcType::Unit => SrcTerm::Unit,
            SrcType::Prod(a, b) => SrcTerm::pair(self.leaf(a), self.leaf(b)),
            SrcType::Arr(a, b) => {
                let f = Name::fresh("f");
                let x = Name::fresh("x");
                let body = self.bind(&x, a, |g| g.leaf(b));
                SrcTerm::fix(f, x, a.as_ref().clone(), b.as_ref().clone(), body)
            }
        }
    }

    /// A term of type `ty` with about `size` nodes, well typed in the
    /// current environment.
    pub fn term(&mut self, ty: &SrcType, size: usize) -> SrcTerm {
        if size <= 1 {
            return self.leaf(ty);
        }
        let rest = size - 1;
        match self.rng.gen_range(0..100) {
            0..=29 => self.intro(ty, rest),
            30..=39 => {
                let c = self.term(&SrcType::Nat, rest / 3);
                let z = self.term(ty, rest / 3);
                let s = self.term(ty, rest / 3);
                SrcTerm::ifz(c, z, s)
            }
            40..=54 => {
                let t = self.ty(1);
                let bound = self.term(&t, rest / 3);
                let x = Name::fresh("x");
                let body = self.bind(&x, &t, |g| g.term(ty, rest - rest / 3));
                SrcTerm::let_(x, bound, body)
            }
            55..=62 => self.recursion(ty, rest),
            63..=71 => {
                let t = self.ty(1);
                let f = self.term(&SrcType::arr(t.clone(), ty.clone()), rest / 2);
                let a = self.term(&t, rest / 2);
                SrcTerm::app(f, a)
            }
            72..=79 => {
                let other = self.ty(1);
                if self.rng.gen_bool(0.5) {
                    SrcTerm::fst(self.term(&SrcType::prod(ty.clone(), other), rest))
                } else {
                    SrcTerm::snd(self.term(&SrcType::prod(other, ty.clone()), rest))
                }
            }
            _ => match self.var_of(ty) {
                Some(v) => v,
                None => self.intro(ty, rest),
            },
        }
    }

    fn intro(&mut self, ty: &SrcType, rest: usize) -> SrcTerm {
        match ty {
            SrcType::Nat => match self.rng.gen_range(0..5) {
                0 => self.numeral(),
                1 => SrcTerm::pred(self.term(ty, rest)),
                _ => {
                    let l = self.rng.gen_range(0..=rest);
                    SrcTerm::plus(self.term(ty, l), self.term(ty, rest - l))
                }
            },
            SrcType::Unit => SrcTerm::Unit,
            SrcType::Prod(a, b) => {
                let l = self.rng.gen_range(0..=rest);
                SrcTerm::pair(self.term(a, l), self.term(b, rest - l))
            }
            SrcType::Arr(a, b) => {
                let f = Name::fresh("f");
                let x = Name::fresh("x");
                // occasionally unguarded self-reference, which may diverge
                let recursive = self.rng.gen_bool(0.1);
                let fun_ty = ty.clone();
                let body = self.bind(&x, a, |g| {
                    if recursive {
                        g.bind(&f, &fun_ty, |g| g.term(b, rest))
                    } else {
                        g.term(b, rest)
                    }
                });
                SrcTerm::fix(f, x, a.as_ref().clone(), b.as_ref().clone(), body)
            }
        }
    }

    /// `(fix f (n : nat) (ifz n base (let r = f (pred n) in step))) arg`,
    /// which always terminates.
    fn recursion(&mut self, ty: &SrcType, rest: usize) -> SrcTerm {
        let f = Name::fresh("f");
        let n = Name::fresh("n");
        let r = Name::fresh("r");
        let base = self.bind(&n, &SrcType::Nat, |g| g.term(ty, rest / 3));
        let step = self.bind(&n, &SrcType::Nat, |g| {
            g.bind(&r, ty, |g| g.term(ty, rest / 2))
        });
        let body = SrcTerm::ifz(
            SrcTerm::Var(n.clone()),
            base,
            SrcTerm::let_(
                r,
                SrcTerm::app(
                    SrcTerm::Var(f.clone()),
                    SrcTerm::pred(SrcTerm::Var(n.clone())),
                ),
                step,
            ),
        );
        let arg = if self.rng.gen_bool(0.8) {
            SrcTerm::num(self.rng.gen_range(0..6))
        } else {
            self.term(&SrcType::Nat, rest / 4)
        };
        SrcTerm::app(SrcTerm::fix(f, n, SrcType::Nat, ty.clone(), body), arg)
    }
}

/// Case `index` of the run described by `cfg`.
pub fn gen_case(cfg: &GenCfg, index: u64) -> (SrcTerm, SrcType) {
    let mut g = Generator::new(cfg.seed, index);
    let ty = match &cfg.target {
        Some(t) => t.clone(),
        None => g.ty(2),
    };
    let size = g.rng.gen_range(1..=cfg.max_size.max(1));
    (g.term(&ty, size), ty)
}

/// The stream of closed, well-typed cases for `cfg`.
pub fn gen_typed(cfg: &GenCfg) -> impl Iterator<Item = (SrcTerm, SrcType)> + '_ {
    (0..).map(move |i| gen_case(cfg, i))
}

/// An open typing instance `Γ ⊢ M : T`; `Γ` may bind variables that `M`
/// does not use.
pub fn gen_open(cfg: &GenCfg, index: u64) -> (SrcCtx, SrcTerm, SrcType) {
    let mut g = Generator::new(cfg.seed, index);
    let n = g.rng.gen_range(1..=4);
    for _ in 0..n {
        let t = g.ty(1);
        g.env.push((Name::fresh("v"), t));
    }
    let ty = match &cfg.target {
        Some(t) => t.clone(),
        None => g.ty(2),
    };
    let size = g.rng.gen_range(1..=cfg.max_size.max(1));
    let m = g.term(&ty, size);
    let ctx = g.env.into_iter().collect();
    (ctx, m, ty)
}
