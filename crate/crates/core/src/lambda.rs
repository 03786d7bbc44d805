//! Lambda terms with address constants, and their translation into machines.
//!
//! Under a context `x₁…xₙ` a term compiles to a machine that first reads `n`
//! arguments from its tape:
//!
//! * `xᵢ` becomes [`pr`]`(i, n)`, which keeps the `i`-th argument and calls it;
//! * a constant `a` becomes [`cons`]`(a, n)`, which drops every argument and calls `a`;
//! * `λy.M` is `M` compiled under `x₁…xₙ y`;
//! * `M N` stores `#⦅M⦆` and `#⦅N⦆` in registers `n` and `n + 1` and runs
//!   [`apply_prog`]`(n)`, which feeds the arguments to both and applies the results.
//!
//! Compiled subterms are interned, so equal subterms share an address.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::machine::{Address, Machine};
use crate::program::{Instruction, Program};
use crate::table::{AddressTable, DanglingAddress};

#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    Const(Address),
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
}

pub fn var(x: &str) -> Term {
    Term::Var(x.to_string())
}

pub fn abs(x: &str, body: Term) -> Term {
    Term::Abs(x.to_string(), Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

/// Equality is α-equivalence.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        fn go<'a>(l: &'a Term, r: &'a Term, bl: &mut Vec<&'a str>, br: &mut Vec<&'a str>) -> bool {
            match (l, r) {
                (Term::Var(x), Term::Var(y)) => {
                    let ix = bl.iter().rposition(|b| b == x);
                    let iy = br.iter().rposition(|b| b == y);
                    match (ix, iy) {
                        (None, None) => x == y,
                        (i, j) => i == j,
                    }
                }
                (Term::Const(a), Term::Const(b)) => a == b,
                (Term::Abs(x, m), Term::Abs(y, n)) => {
                    bl.push(x);
                    br.push(y);
                    let eq = go(m, n, bl, br);
                    bl.pop();
                    br.pop();
                    eq
                }
                (Term::App(m1, n1), Term::App(m2, n2)) => go(m1, m2, bl, br) && go(n1, n2, bl, br),
                _ => false,
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

impl Eq for Term {}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Const(a) => write!(f, "@{a}"),
            Term::Abs(x, b) => write!(f, "\\{x}.{b}"),
            Term::App(m, n) => {
                match **m {
                    Term::Abs(..) => write!(f, "({m})")?,
                    _ => write!(f, "{m}")?,
                }
                match **n {
                    Term::Abs(..) | Term::App(..) => write!(f, " ({n})"),
                    _ => write!(f, " {n}"),
                }
            }
        }
    }
}

impl Term {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Term::Const(_) => {}
            Term::Abs(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(m, n) => {
                m.collect_free(bound, out);
                n.collect_free(bound, out);
            }
        }
    }

    fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::Const(_) => false,
            Term::Abs(y, b) => y != x && b.occurs_free(x),
            Term::App(m, n) => m.occurs_free(x) || n.occurs_free(x),
        }
    }

    /// Capture-avoiding `self[x := s]`. Bound variables that would capture a
    /// free variable of `s` are renamed by appending primes.
    pub fn substitute(&self, x: &str, s: &Term) -> Term {
        match self {
            Term::Var(y) if y == x => s.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Abs(y, _) if y == x => self.clone(),
            Term::Abs(y, b) => {
                if !b.occurs_free(x) {
                    return self.clone();
                }
                if s.occurs_free(y) {
                    let mut fresh = y.clone();
                    while fresh == x || s.occurs_free(&fresh) || b.occurs_free(&fresh) {
                        fresh.push('\'');
                    }
                    let renamed = b.substitute(y, &Term::Var(fresh.clone()));
                    Term::Abs(fresh, Box::new(renamed.substitute(x, s)))
                } else {
                    Term::Abs(y.clone(), Box::new(b.substitute(x, s)))
                }
            }
            Term::App(m, n) => app(m.substitute(x, s), n.substitute(x, s)),
        }
    }

    /// One leftmost-outermost β-step.
    fn beta_step(&self) -> Option<Term> {
        match self {
            Term::App(m, n) => {
                if let Term::Abs(x, b) = &**m {
                    return Some(b.substitute(x, n));
                }
                if let Some(m2) = m.beta_step() {
                    return Some(app(m2, (**n).clone()));
                }
                n.beta_step().map(|n2| app((**m).clone(), n2))
            }
            Term::Abs(x, b) => b.beta_step().map(|b2| Term::Abs(x.clone(), Box::new(b2))),
            _ => None,
        }
    }

    /// The β-normal form, if leftmost-outermost reduction reaches it within
    /// `fuel` steps.
    pub fn beta_normalize(&self, fuel: usize) -> Option<Term> {
        let mut t = self.clone();
        for _ in 0..=fuel {
            match t.beta_step() {
                None => return Some(t),
                Some(next) => t = next,
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: &'static str },
    #[error("unknown constant @{name} at byte {offset}")]
    UnknownConstant { offset: usize, name: String },
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'s, F> {
    src: &'s str,
    pos: usize,
    resolve: F,
}

impl<F: FnMut(&str) -> Option<Address>> Parser<'_, F> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn err(&self, message: &'static str) -> TermError {
        TermError::Syntax { offset: self.pos, message }
    }

    fn name(&mut self, allow: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !allow(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn term(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        if let Some(c @ ('\\' | 'λ')) = self.peek() {
            self.pos += c.len_utf8();
            let mut binders = Vec::new();
            loop {
                self.skip_ws();
                match self.peek() {
                    Some('.') if !binders.is_empty() => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) if is_ident(c) => binders.push(self.name(is_ident).to_string()),
                    _ => return Err(self.err("expected a binder or '.'")),
                }
            }
            let body = self.term()?;
            return Ok(binders.into_iter().rev().fold(body, |b, x| Term::Abs(x, Box::new(b))));
        }
        let mut acc = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')') => return Ok(acc),
                Some('\\' | 'λ') => return Ok(app(acc, self.term()?)),
                _ => acc = app(acc, self.atom()?),
            }
        }
    }

    fn atom(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some('@') => {
                let offset = self.pos;
                self.pos += 1;
                let name = self.name(|c| is_ident(c) || c == '#').to_string();
                if name.is_empty() {
                    return Err(self.err("expected a constant name after '@'"));
                }
                match (self.resolve)(&name) {
                    Some(a) => Ok(Term::Const(a)),
                    None => Err(TermError::UnknownConstant { offset, name }),
                }
            }
            Some(c) if is_ident(c) => Ok(Term::Var(self.name(is_ident).to_string())),
            None => Err(self.err("unexpected end of input")),
            Some(_) => Err(self.err("unexpected character")),
        }
    }
}

/// Parses `\x y.M` or `λx y.M` abstractions, left-associative juxtaposition,
/// parentheses and `@name` constants, which `resolve` maps to addresses.
pub fn parse_term(text: &str, resolve: impl FnMut(&str) -> Option<Address>) -> Result<Term, TermError> {
    let mut p = Parser { src: text, pos: 0, resolve };
    let t = p.term()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("unexpected input after term"));
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("variable {0} is not bound by the context")]
    UnboundVariable(String),
    #[error(transparent)]
    Dangling(#[from] DanglingAddress),
}

fn discards(n: usize, r: usize) -> impl Iterator<Item = Instruction> {
    core::iter::repeat_n(Instruction::Load(r), n)
}

/// `Prᵢⁿ` for `1 ≤ i ≤ n`: reads `n` arguments, keeps the `i`-th and calls it.
pub fn pr(i: usize, n: usize) -> Machine {
    assert!(1 <= i && i <= n, "projection index out of range");
    let instrs = discards(i - 1, 1)
        .chain([Instruction::Load(0)])
        .chain(discards(n - i, 1))
        .chain([Instruction::Call(0)])
        .collect();
    Machine::from_parts(vec![None], Program::new(instrs).expect("loads then call"), Vec::new())
}

/// `Consₐⁿ`: drops `n` arguments and calls `a`.
pub fn cons(a: Address, n: usize) -> Machine {
    let instrs = discards(n, 1).chain([Instruction::Call(0)]).collect();
    Machine::from_parts(vec![Some(a)], Program::new(instrs).expect("loads then call"), Vec::new())
}

/// `Applyₙ`, run with the arguments in registers `0..n`, `#M` in `n`, `#N` in
/// `n + 1`, and `n + 2` free.
pub fn apply_prog(n: usize) -> Program {
    let (m, nn, out) = (n, n + 1, n + 2);
    let instrs = (0..n)
        .map(Instruction::Load)
        .chain((0..n).map(|k| Instruction::App(m, k, m)))
        .chain((0..n).map(|k| Instruction::App(nn, k, nn)))
        .chain([Instruction::App(m, nn, out), Instruction::Call(out)])
        .collect();
    Program::new(instrs).expect("loads, apps, call")
}

/// `⦅t⦆` under the context `ctx`. A variable bound more than once in the
/// context refers to its last occurrence.
pub fn compile(table: &AddressTable, t: &Term, ctx: &[String]) -> Result<Machine, CompileError> {
    let n = ctx.len();
    match t {
        Term::Var(x) => match ctx.iter().rposition(|y| y == x) {
            Some(i) => Ok(pr(i + 1, n)),
            None => Err(CompileError::UnboundVariable(x.clone())),
        },
        Term::Const(a) => {
            if !table.is_issued(*a) {
                return Err(DanglingAddress(*a).into());
            }
            Ok(cons(*a, n))
        }
        Term::Abs(y, body) => {
            let mut inner = ctx.to_vec();
            inner.push(y.clone());
            compile(table, body, &inner)
        }
        Term::App(p, q) => {
            let pa = table.intern(&compile(table, p, ctx)?)?;
            let qa = table.intern(&compile(table, q, ctx)?)?;
            let mut regs = vec![None; n + 3];
            regs[n] = Some(pa);
            regs[n + 1] = Some(qa);
            Ok(Machine::from_parts(regs, apply_prog(n), Vec::new()))
        }
    }
}

/// A representative of `⟦t⟧ρ`: `⦅t⦆` under the free variables of `t` in
/// lexicographic order, applied to their values.
pub fn interpret(table: &AddressTable, t: &Term, rho: &BTreeMap<String, Address>) -> Result<Address, CompileError> {
    let fv: Vec<String> = t.free_vars().into_iter().collect();
    let args = fv
        .iter()
        .map(|x| rho.get(x).copied().ok_or_else(|| CompileError::UnboundVariable(x.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(&bad) = args.iter().find(|a| !table.is_issued(**a)) {
        return Err(DanglingAddress(bad).into());
    }
    let m = compile(table, t, &fv)?;
    Ok(table.intern(&m.append_tape(&args))?)
}
