//! Instructions and programs.
//!
//! A program is a (possibly empty) run of `Load`s, followed by a run of
//! `App`s, optionally terminated by a single `Call`. [`Program::new`] enforces
//! that shape; validity with respect to a register bank is a separate judgment
//! (see [`crate::validator`]).

use alloc::vec::Vec;
use core::fmt;

/// One instruction. Register indices are plain naturals; an index at or past
/// the register count names a non-existing register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Instruction {
    /// Pop the first tape item into register `i` (discarded if `i` does not exist).
    Load(usize),
    /// `R[k] := R[i] · R[j]` (discarded if `k` does not exist).
    App(usize, usize, usize),
    /// Transfer control to the machine addressed by `R[i]`, handing over the tape.
    Call(usize),
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Instruction::Load(i) => write!(f, "Load {i}"),
            Instruction::App(i, j, k) => write!(f, "App {i} {j} {k}"),
            Instruction::Call(i) => write!(f, "Call {i}"),
        }
    }
}

/// Position of an instruction that breaks the `Load* App* Call?` shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("instruction {index} ({found}) is out of place: programs are Load* App* Call?")]
pub struct ShapeError {
    pub index: usize,
    pub found: Instruction,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Phase {
    Loads,
    Apps,
    Done,
}

/// A grammatical program.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Program {
    instrs: Vec<Instruction>,
}

impl Program {
    /// The empty program ε.
    pub const fn empty() -> Self {
        Program { instrs: Vec::new() }
    }

    pub fn new(instrs: Vec<Instruction>) -> Result<Self, ShapeError> {
        check_shape(&instrs)?;
        Ok(Program { instrs })
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instrs
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn first(&self) -> Option<Instruction> {
        self.instrs.first().copied()
    }

    /// The program without its first instruction. Suffixes of grammatical
    /// programs are grammatical.
    pub fn tail(&self) -> Program {
        Program { instrs: self.instrs.get(1..).unwrap_or_default().to_vec() }
    }

    /// Number of leading `Load`s.
    pub fn leading_loads(&self) -> usize {
        self.instrs.iter().take_while(|i| matches!(i, Instruction::Load(_))).count()
    }
}

fn check_shape(instrs: &[Instruction]) -> Result<(), ShapeError> {
    let mut phase = Phase::Loads;
    for (index, &found) in instrs.iter().enumerate() {
        let next = match found {
            Instruction::Load(_) => Phase::Loads,
            Instruction::App(..) => Phase::Apps,
            Instruction::Call(_) => Phase::Done,
        };
        // Done is terminal: nothing may follow a Call, not even another Call.
        if next < phase || phase == Phase::Done {
            return Err(ShapeError { index, found });
        }
        phase = next;
    }
    Ok(())
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, ins) in self.instrs.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}
