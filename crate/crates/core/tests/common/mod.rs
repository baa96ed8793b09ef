//! Helpers shared by the integration tests: a first-order term language with
//! an independent most-general-unifier oracle, and random problem generators.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;

use schematic::syntax::{Term, Ty};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

pub fn wf_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("wf")
}

/// Declarations of the first-order signature used by the oracle problems.
pub const FO_DECLS: &str = "Kind i type.
Type a i.
Type b i.
Type c i.
Type g i -> i.
Type f i -> i -> i.
Type h i -> i -> i.
";

/// Constant symbols and their arities.
pub const FO_SYMBOLS: [(&str, usize); 6] = [("a", 0), ("b", 0), ("c", 0), ("g", 1), ("f", 2), ("h", 2)];

pub const FO_VARS: [&str; 3] = ["X", "Y", "Z"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fo {
    Var(String),
    Fn(String, Vec<Fo>),
}

pub type FoSubst = BTreeMap<String, Fo>;

impl Fo {
    pub fn apply(&self, s: &FoSubst) -> Fo {
        match self {
            Fo::Var(v) => match s.get(v) {
                Some(t) => t.apply(s),
                None => self.clone(),
            },
            Fo::Fn(c, args) => Fo::Fn(c.clone(), args.iter().map(|a| a.apply(s)).collect()),
        }
    }

    fn occurs(&self, v: &str) -> bool {
        match self {
            Fo::Var(w) => w == v,
            Fo::Fn(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Fo::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Fo::Fn(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn to_term(&self) -> Term {
        let i = Ty::sort("i");
        match self {
            Fo::Var(v) => Term::meta(v, i),
            Fo::Fn(c, args) if args.is_empty() => Term::constant(c, vec![]),
            Fo::Fn(c, args) => Term::app(Term::constant(c, vec![]), args.iter().map(Fo::to_term).collect()),
        }
    }

    /// Reads back a first-order term; metas become variables.
    pub fn of_term(t: &Term) -> Option<Fo> {
        match t {
            Term::Meta(n, _) => Some(Fo::Var(n.to_string())),
            Term::Const(c, _) => Some(Fo::Fn(c.to_string(), Vec::new())),
            Term::App(h, args) => match &**h {
                Term::Const(c, _) => Some(Fo::Fn(c.to_string(), args.iter().map(Fo::of_term).collect::<Option<_>>()?)),
                _ => None,
            },
            _ => None,
        }
    }
}

impl std::fmt::Display for Fo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fo::Var(v) => write!(f, "{v}"),
            Fo::Fn(c, args) if args.is_empty() => write!(f, "{c}"),
            Fo::Fn(c, args) => {
                write!(f, "({c}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Robinson's algorithm with occurs check. The result is triangular; use
/// [`Fo::apply`] to read it.
pub fn mgu(s: &Fo, t: &Fo) -> Option<FoSubst> {
    let mut subst = FoSubst::new();
    let mut work = vec![(s.clone(), t.clone())];
    while let Some((l, r)) = work.pop() {
        let (l, r) = (l.apply(&subst), r.apply(&subst));
        match (l, r) {
            (Fo::Var(x), Fo::Var(y)) if x == y => {}
            (Fo::Var(x), t) | (t, Fo::Var(x)) => {
                if t.occurs(&x) {
                    return None;
                }
                subst.insert(x, t);
            }
            (Fo::Fn(c, xs), Fo::Fn(d, ys)) => {
                if c != d || xs.len() != ys.len() {
                    return None;
                }
                work.extend(xs.into_iter().zip(ys));
            }
        }
    }
    Some(subst)
}

/// Whether `xs` and `ys` are equal up to a bijective renaming of variables.
pub fn equal_up_to_renaming(xs: &[Fo], ys: &[Fo]) -> bool {
    fn go(a: &Fo, b: &Fo, fwd: &mut BTreeMap<String, String>, back: &mut BTreeMap<String, String>) -> bool {
        match (a, b) {
            (Fo::Var(x), Fo::Var(y)) => {
                let f = fwd.entry(x.clone()).or_insert_with(|| y.clone()).clone();
                let g = back.entry(y.clone()).or_insert_with(|| x.clone()).clone();
                &f == y && &g == x
            }
            (Fo::Fn(c, xs), Fo::Fn(d, ys)) => c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fwd, back)),
            _ => false,
        }
    }
    let (mut fwd, mut back) = (BTreeMap::new(), BTreeMap::new());
    xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, &mut fwd, &mut back))
}

/// A random term of depth at most `depth`.
pub fn random_fo(rng: &mut impl Rng, depth: usize) -> Fo {
    if depth == 0 || rng.gen_bool(0.3) {
        if rng.gen_bool(0.5) {
            return Fo::Var(FO_VARS[rng.gen_range(0..FO_VARS.len())].to_string());
        }
        let consts: Vec<_> = FO_SYMBOLS.iter().filter(|(_, n)| *n == 0).collect();
        return Fo::Fn(consts[rng.gen_range(0..consts.len())].0.to_string(), Vec::new());
    }
    let funs: Vec<_> = FO_SYMBOLS.iter().filter(|(_, n)| *n > 0).collect();
    let (c, n) = funs[rng.gen_range(0..funs.len())];
    Fo::Fn(c.to_string(), (0..*n).map(|_| random_fo(rng, depth - 1)).collect())
}

/// Replaces random subterms by variables, so that the result is often but
/// not always unifiable with another generalization of the same term.
pub fn generalize(rng: &mut impl Rng, t: &Fo) -> Fo {
    if rng.gen_bool(0.2) {
        return Fo::Var(FO_VARS[rng.gen_range(0..FO_VARS.len())].to_string());
    }
    match t {
        Fo::Var(_) => t.clone(),
        Fo::Fn(c, args) => Fo::Fn(c.clone(), args.iter().map(|a| generalize(rng, a)).collect()),
    }
}

/// A pair of terms of depth at most 4: half are unrelated, half are two
/// generalizations of one term.
pub fn random_problem(rng: &mut impl Rng) -> (Fo, Fo) {
    if rng.gen_bool(0.5) {
        (random_fo(rng, 4), random_fo(rng, 4))
    } else {
        let base = random_fo(rng, 4);
        (generalize(rng, &base), generalize(rng, &base))
    }
}

/// A list literal over `a`, `b`, `c` in concrete syntax.
pub fn list_text(items: &[&str]) -> String {
    let mut s = String::new();
    for x in items {
        s.push_str(x);
        s.push_str(" :: ");
    }
    s.push_str("nil");
    if items.is_empty() {
        s
    } else {
        format!("({s})")
    }
}

pub fn random_list(rng: &mut impl Rng, max_len: usize) -> Vec<&'static str> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| ["a", "b", "c"][rng.gen_range(0..3)]).collect()
}
