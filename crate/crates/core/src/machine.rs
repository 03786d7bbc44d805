//! Addresses, registers, tapes and machines.

use alloc::vec::Vec;
use core::fmt;

use crate::program::{Instruction, Program};
use crate::validator::{validate, InitializedSet, ValidityError};

/// Opaque name of exactly one interned machine. Ids are handed out by an
/// [`AddressTable`](crate::table::AddressTable) in allocation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(pub(crate) usize);

impl Address {
    pub fn id(self) -> usize {
        self.0
    }

    /// Rebuilds an address from a raw id. The result is only meaningful for
    /// the table that issued the id; tables reject ids they never issued.
    pub fn from_id(id: usize) -> Self {
        Address(id)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// `None` is the null value ∅ of an uninitialized register.
pub type RegisterCell = Option<Address>;

/// Finite input tape; the head of the tape is index 0.
pub type Tape = Vec<Address>;

/// An addressing machine: registers, a program valid for them, and a tape.
///
/// Machines are immutable values. Every constructor that accepts an arbitrary
/// program checks validity, so a `Machine` always has a valid program.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Machine {
    registers: Vec<RegisterCell>,
    program: Program,
    tape: Tape,
}

impl Machine {
    pub fn new(registers: Vec<RegisterCell>, program: Program, tape: Tape) -> Result<Self, ValidityError> {
        validate(&program, registers.len(), &InitializedSet::of_registers(&registers))?;
        Ok(Machine { registers, program, tape })
    }

    /// Skips the validity check. Callers must only use this for machines
    /// derived from valid ones by operations that preserve validity.
    pub(crate) fn from_parts(registers: Vec<RegisterCell>, program: Program, tape: Tape) -> Self {
        Machine { registers, program, tape }
    }

    /// The indeterminate machine `x_n`: `n + 1` empty registers, no program, empty tape.
    pub fn indeterminate(n: usize) -> Self {
        Machine::from_parts(alloc::vec![None; n + 1], Program::empty(), Vec::new())
    }

    pub fn registers(&self) -> &[RegisterCell] {
        &self.registers
    }

    pub fn register_count(&self) -> usize {
        self.registers.len()
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn tape(&self) -> &[Address] {
        &self.tape
    }

    pub fn into_parts(self) -> (Vec<RegisterCell>, Program, Tape) {
        (self.registers, self.program, self.tape)
    }

    /// `M ++ T`: the same machine with `t` appended to its tape.
    pub fn append_tape(&self, t: &[Address]) -> Machine {
        let mut tape = self.tape.clone();
        tape.extend_from_slice(t);
        Machine::from_parts(self.registers.clone(), self.program.clone(), tape)
    }

    /// Consuming variant of [`Machine::append_tape`].
    pub fn with_appended(mut self, t: &[Address]) -> Machine {
        self.tape.extend_from_slice(t);
        self
    }

    /// Waiting for input: the program starts with `Load` and the tape is empty.
    pub fn is_stuck(&self) -> bool {
        matches!(self.program.first(), Some(Instruction::Load(_))) && self.tape.is_empty()
    }

    /// No head step applies: the program is empty or the machine is stuck.
    pub fn is_final(&self) -> bool {
        self.program.is_empty() || self.is_stuck()
    }

    /// Matches `x_n` for some `n`, returning `n`.
    pub fn as_indeterminate(&self) -> Option<usize> {
        let blank = !self.registers.is_empty()
            && self.registers.iter().all(Option::is_none)
            && self.program.is_empty()
            && self.tape.is_empty();
        blank.then(|| self.registers.len() - 1)
    }

    /// Every address stored in a register or on the tape, registers first.
    pub fn addresses(&self) -> impl Iterator<Item = Address> + '_ {
        self.registers.iter().flatten().copied().chain(self.tape.iter().copied())
    }

    pub(crate) fn set_register(&mut self, i: usize, a: Address) {
        if let Some(cell) = self.registers.get_mut(i) {
            *cell = Some(a);
        }
    }

    pub(crate) fn set_tape(&mut self, i: usize, a: Address) {
        self.tape[i] = a;
    }
}

/// Writes `regs=[_, #3] prog="Load 0; Call 0" tape=[#1]`.
pub(crate) fn write_parts<A: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    regs: impl Iterator<Item = Option<A>>,
    program: &Program,
    tape: impl Iterator<Item = A>,
) -> fmt::Result {
    f.write_str("regs=[")?;
    for (i, r) in regs.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        match r {
            Some(a) => write!(f, "{a}")?,
            None => f.write_str("_")?,
        }
    }
    write!(f, "] prog=\"{program}\" tape=[")?;
    for (i, a) in tape.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str("]")
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, self.registers.iter().copied(), &self.program, self.tape.iter().copied())
    }
}
