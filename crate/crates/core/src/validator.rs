//! Program syntax and the validity judgment `I ⊨^r P`.
//!
//! Program text is a `;`-separated list of `Load i`, `App i j k` and `Call i`.
//! Whitespace is insignificant, keywords are case-sensitive, indices are
//! decimal naturals and a single trailing `;` is tolerated.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::machine::RegisterCell;
use crate::program::{Instruction, Program};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Load,
    App,
    Call,
    Num(usize),
    Semi,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
        } else if c == b';' {
            toks.push((pos, Tok::Semi));
            pos += 1;
        } else if c.is_ascii_digit() {
            let start = pos;
            let mut value: usize = 0;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(usize::from(bytes[pos] - b'0')))
                    .ok_or(SyntaxError { offset: start, message: "register index too large" })?;
                pos += 1;
            }
            toks.push((start, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_alphabetic() {
                pos += 1;
            }
            let tok = match &text[start..pos] {
                "Load" => Tok::Load,
                "App" => Tok::App,
                "Call" => Tok::Call,
                _ => return Err(SyntaxError { offset: start, message: "unknown instruction" }),
            };
            toks.push((start, tok));
        } else {
            return Err(SyntaxError { offset: pos, message: "unexpected character" });
        }
    }
    Ok(toks)
}

/// Parses program text, enforcing the `Load* App* Call?` grammar.
pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    let toks = tokenize(text)?;
    let mut instrs = Vec::new();
    let mut starts = Vec::new();
    let mut it = toks.into_iter().peekable();
    let end = text.len();

    let index = |it: &mut core::iter::Peekable<alloc::vec::IntoIter<(usize, Tok)>>| match it.next() {
        Some((_, Tok::Num(n))) => Ok(n),
        Some((offset, _)) => Err(SyntaxError { offset, message: "expected a register index" }),
        None => Err(SyntaxError { offset: end, message: "expected a register index" }),
    };

    while let Some((offset, tok)) = it.next() {
        let ins = match tok {
            Tok::Load => Instruction::Load(index(&mut it)?),
            Tok::App => {
                let i = index(&mut it)?;
                let j = index(&mut it)?;
                let k = index(&mut it)?;
                Instruction::App(i, j, k)
            }
            Tok::Call => Instruction::Call(index(&mut it)?),
            Tok::Num(_) | Tok::Semi => return Err(SyntaxError { offset, message: "expected Load, App or Call" }),
        };
        instrs.push(ins);
        starts.push(offset);
        match it.next() {
            None => break,
            Some((_, Tok::Semi)) => {}
            Some((offset, _)) => return Err(SyntaxError { offset, message: "expected `;`" }),
        }
    }

    Program::new(instrs).map_err(|e| SyntaxError {
        offset: starts[e.index],
        message: match e.found {
            Instruction::Load(_) => "Load after App or Call",
            Instruction::App(..) => "App after Call",
            Instruction::Call(_) => "instruction after Call",
        },
    })
}

/// The set `I` of initialized register indices, all below the register count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitializedSet {
    registers: usize,
    indices: BTreeSet<usize>,
}

impl InitializedSet {
    /// `None` if some index is not below `registers`.
    pub fn new(registers: usize, indices: impl IntoIterator<Item = usize>) -> Option<Self> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if indices.iter().any(|&i| i >= registers) {
            return None;
        }
        Some(InitializedSet { registers, indices })
    }

    /// `{ i | R_i ≠ ∅ }`.
    pub fn of_registers(regs: &[RegisterCell]) -> Self {
        InitializedSet {
            registers: regs.len(),
            indices: regs.iter().enumerate().filter(|(_, r)| r.is_some()).map(|(i, _)| i).collect(),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn register_count(&self) -> usize {
        self.registers
    }

    fn insert(&mut self, i: usize) {
        if i < self.registers {
            self.indices.insert(i);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvalidRead {
    Uninitialized,
    Nonexistent,
}

impl fmt::Display for InvalidRead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvalidRead::Uninitialized => "uninitialized",
            InvalidRead::Nonexistent => "nonexistent",
        })
    }
}

/// A read of a register that is not guaranteed to hold an address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("instruction {instr}: register {register} {reason}")]
pub struct ValidityError {
    pub instr: usize,
    pub register: usize,
    pub reason: InvalidRead,
}

/// Decides `init ⊨^r p` in one left-to-right pass.
pub fn validate(p: &Program, r: usize, init: &InitializedSet) -> Result<(), ValidityError> {
    let mut set = InitializedSet { registers: r, indices: init.indices.clone() };
    let read = |set: &InitializedSet, instr: usize, register: usize| {
        if register >= r {
            Err(ValidityError { instr, register, reason: InvalidRead::Nonexistent })
        } else if !set.contains(register) {
            Err(ValidityError { instr, register, reason: InvalidRead::Uninitialized })
        } else {
            Ok(())
        }
    };
    for (n, ins) in p.instructions().iter().enumerate() {
        match *ins {
            Instruction::Load(i) => set.insert(i),
            Instruction::App(i, j, k) => {
                read(&set, n, i)?;
                read(&set, n, j)?;
                set.insert(k);
            }
            Instruction::Call(i) => read(&set, n, i)?,
        }
    }
    Ok(())
}
