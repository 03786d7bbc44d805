//! Elaboration of session files against an address table.
//!
//! Definitions are processed in order and may only mention earlier ones. The
//! prelude names `K`, `S`, `I`, `D`, `O`, `K'`, `1` and the indeterminates
//! `x0`, `x1`, ... are interned the first time they are used, so a session
//! that never mentions them leaves the table untouched.

use std::collections::BTreeMap;

use addrvm_core::context::{ExtAddress, ExtDangling, ExtMachine, ExtTable};
use addrvm_core::lambda::{self, CompileError, Term, TermError};
use addrvm_core::{combinators, Address, AddressTable, DanglingAddress, Machine, ValidityError};
use thiserror::Error;

use crate::format::{is_name_char, Document, Fields, Item, Ref};

pub const PRELUDE: [&str; 7] = ["K", "S", "I", "D", "O", "K'", "1"];

/// The name the bare hole goes by inside contexts.
pub const HOLE: &str = "xi";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DefError {
    #[error("{0} is already defined")]
    Duplicate(String),
    #[error("{0} is a reserved name")]
    Reserved(String),
    #[error("unknown name @{0}")]
    UnknownName(String),
    #[error("address #{0} was never issued")]
    Dangling(usize),
    #[error("@{0} is a context, not a machine")]
    NotAMachine(String),
    #[error("the hole @xi may only appear in contexts")]
    HoleOutsideContext,
    #[error(transparent)]
    Invalid(#[from] ValidityError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("free variable {0}")]
    FreeVariable(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

impl From<DanglingAddress> for DefError {
    fn from(d: DanglingAddress) -> Self {
        DefError::Dangling(d.0.id())
    }
}

impl From<ExtDangling> for DefError {
    fn from(d: ExtDangling) -> Self {
        match d.0 {
            ExtAddress::Base(a) => DefError::Dangling(a.id()),
            ExtAddress::Ext(_) => unreachable!("extended addresses only come from the session's own table"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Machine(Address),
    Context(ExtMachine),
}

/// Outcome of one definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub result: Result<(), DefError>,
}

pub struct Session<'t> {
    table: &'t AddressTable,
    ext: ExtTable<'t>,
    bindings: BTreeMap<String, Binding>,
    order: Vec<String>,
}

fn indeterminate_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

fn is_reserved(name: &str) -> bool {
    name == HOLE || PRELUDE.contains(&name) || indeterminate_index(name).is_some()
}

impl<'t> Session<'t> {
    pub fn new(table: &'t AddressTable) -> Self {
        Session { table, ext: ExtTable::new(table), bindings: BTreeMap::new(), order: Vec::new() }
    }

    pub fn table(&self) -> &'t AddressTable {
        self.table
    }

    pub fn ext(&self) -> &ExtTable<'t> {
        &self.ext
    }

    /// User definitions in the order they were made.
    pub fn definitions(&self) -> impl Iterator<Item = (&str, &Binding)> {
        self.order.iter().map(|n| (n.as_str(), &self.bindings[n]))
    }

    pub fn binding(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }

    fn prelude(&self, name: &str) -> Option<Address> {
        let t = self.table;
        let m = match name {
            "K" => combinators::k(),
            "S" => combinators::s(),
            "I" => combinators::i(t),
            "D" => combinators::d(),
            "O" => combinators::o(t),
            "K'" => combinators::k_prime(),
            "1" => combinators::one(),
            _ => Machine::indeterminate(indeterminate_index(name)?),
        };
        Some(t.intern(&m).expect("prelude machines only mention interned addresses"))
    }

    /// Whether `name` denotes a machine, without interning anything.
    pub fn names_machine(&self, name: &str) -> bool {
        match self.bindings.get(name) {
            Some(b) => matches!(b, Binding::Machine(_)),
            None => PRELUDE.contains(&name) || indeterminate_index(name).is_some(),
        }
    }

    pub fn machine(&self, name: &str) -> Result<Address, DefError> {
        match self.bindings.get(name) {
            Some(Binding::Machine(a)) => Ok(*a),
            Some(Binding::Context(_)) => Err(DefError::NotAMachine(name.to_string())),
            None if name == HOLE => Err(DefError::HoleOutsideContext),
            None => self.prelude(name).ok_or_else(|| DefError::UnknownName(name.to_string())),
        }
    }

    fn raw(&self, id: usize) -> Result<Address, DefError> {
        let a = Address::from_id(id);
        if self.table.is_issued(a) {
            Ok(a)
        } else {
            Err(DefError::Dangling(id))
        }
    }

    fn base_ref(&self, r: &Ref) -> Result<Address, DefError> {
        match r {
            Ref::Name(n) => self.machine(n),
            Ref::Raw(id) => self.raw(*id),
        }
    }

    fn ext_ref(&self, r: &Ref) -> Result<ExtAddress, DefError> {
        match r {
            Ref::Name(n) if n == HOLE && !self.bindings.contains_key(n) => Ok(self.ext.intern(&ExtMachine::hole())?),
            Ref::Name(n) => match self.bindings.get(n) {
                Some(Binding::Context(c)) => Ok(self.ext.intern(c)?),
                _ => Ok(ExtAddress::Base(self.machine(n)?)),
            },
            Ref::Raw(id) => Ok(ExtAddress::Base(self.raw(*id)?)),
        }
    }

    fn elaborate(&self, item: &Item) -> Result<Binding, DefError> {
        match item {
            Item::Machine { fields: Fields { regs, prog, tape }, .. } => {
                let regs =
                    regs.iter().map(|r| r.as_ref().map(|r| self.base_ref(r)).transpose()).collect::<Result<_, _>>()?;
                let tape = tape.iter().map(|r| self.base_ref(r)).collect::<Result<_, _>>()?;
                let m = Machine::new(regs, prog.clone(), tape)?;
                Ok(Binding::Machine(self.table.intern(&m)?))
            }
            Item::Context { fields: Fields { regs, prog, tape }, .. } => {
                let regs =
                    regs.iter().map(|r| r.as_ref().map(|r| self.ext_ref(r)).transpose()).collect::<Result<_, _>>()?;
                let tape = tape.iter().map(|r| self.ext_ref(r)).collect::<Result<_, _>>()?;
                Ok(Binding::Context(ExtMachine::plain(regs, prog.clone(), tape)?))
            }
            Item::Hole { tape, .. } => {
                let tape = tape.iter().map(|r| self.ext_ref(r)).collect::<Result<_, _>>()?;
                Ok(Binding::Context(ExtMachine::Hole { tape }))
            }
            Item::Term { source, .. } => {
                let t = self.parse_term(source)?;
                if let Some(x) = t.free_vars().into_iter().next() {
                    return Err(DefError::FreeVariable(x));
                }
                Ok(Binding::Machine(lambda::interpret(self.table, &t, &BTreeMap::new())?))
            }
        }
    }

    /// Parses a term whose `@name` and `@#n` constants refer to this session.
    pub fn parse_term(&self, source: &str) -> Result<Term, DefError> {
        let mut failure = None;
        let t = lambda::parse_term(source, |name| {
            let r = match name.strip_prefix('#') {
                Some(id) => id.parse().map_err(|_| DefError::UnknownName(name.to_string())).and_then(|id| self.raw(id)),
                None => self.machine(name),
            };
            r.map_err(|e| failure = Some(e)).ok()
        });
        match (t, failure) {
            (Ok(t), _) => Ok(t),
            (Err(_), Some(e)) => Err(e),
            (Err(e), None) => Err(e.into()),
        }
    }

    /// Adds one definition.
    pub fn define(&mut self, item: &Item) -> Result<(), DefError> {
        let name = item.name();
        if is_reserved(name) {
            return Err(DefError::Reserved(name.to_string()));
        }
        if self.bindings.contains_key(name) {
            return Err(DefError::Duplicate(name.to_string()));
        }
        let b = self.elaborate(item)?;
        self.bindings.insert(name.to_string(), b);
        self.order.push(name.to_string());
        Ok(())
    }

    /// Adds every definition of `doc`, skipping the ones that fail.
    pub fn load(&mut self, doc: &Document) -> Vec<Report> {
        doc.items.iter().map(|item| Report { name: item.name().to_string(), result: self.define(item) }).collect()
    }

    /// Adds every definition of `doc`, stopping at the first failure.
    pub fn load_all(&mut self, doc: &Document) -> Result<(), (String, DefError)> {
        for item in &doc.items {
            self.define(item).map_err(|e| (item.name().to_string(), e))?;
        }
        Ok(())
    }

    /// Splits a run of name characters into machine names, longest first.
    fn split_names(&self, word: &str) -> Option<Vec<String>> {
        if word.is_empty() {
            return Some(Vec::new());
        }
        let ends: Vec<usize> = word.char_indices().map(|(i, c)| i + c.len_utf8()).collect();
        ends.iter().rev().find_map(|&end| {
            let head = &word[..end];
            if !self.names_machine(head) {
                return None;
            }
            let mut rest = self.split_names(&word[end..])?;
            rest.insert(0, head.to_string());
            Some(rest)
        })
    }

    /// Resolves a command-line operand: `#n`, a machine name, or a closed
    /// term in which bare identifiers naming machines act as constants.
    /// An identifier such as `KI` that is not itself a name is read as the
    /// application of the names it splits into.
    pub fn operand(&self, text: &str) -> Result<Address, DefError> {
        let text = text.trim();
        if let Some(id) = text.strip_prefix('#').and_then(|d| d.parse().ok()) {
            return self.raw(id);
        }
        if !text.is_empty() && text.chars().all(is_name_char) && self.names_machine(text) {
            return self.machine(text);
        }
        let mut t = self.parse_term(text)?;
        for x in t.free_vars() {
            let names =
                self.split_names(&x).filter(|v| !v.is_empty()).ok_or_else(|| DefError::FreeVariable(x.clone()))?;
            let mut consts = names.iter().map(|n| self.machine(n).map(Term::Const));
            let first = consts.next().expect("non-empty")?;
            let value = consts.try_fold(first, |f, a| Ok::<_, DefError>(lambda::app(f, a?)))?;
            t = t.substitute(&x, &value);
        }
        Ok(lambda::interpret(self.table, &t, &BTreeMap::new())?)
    }

    /// The context named `name`.
    pub fn context(&self, name: &str) -> Option<&ExtMachine> {
        match self.bindings.get(name) {
            Some(Binding::Context(c)) => Some(c),
            _ => None,
        }
    }
}
