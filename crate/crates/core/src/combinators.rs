//! Standard machines: the combinators `K`, `S`, `I`, the self-application
//! machine `D`, the looping machine `O = D ++ [#D]`, an alternative
//! implementation `K'` of `K`, and `1` (which behaves as `λxy.xy`).
//!
//! A `Load` into a non-existing register uses the register count itself as
//! the index.

use alloc::vec;
use alloc::vec::Vec;

use crate::machine::Machine;
use crate::program::{Instruction::*, Program};
use crate::table::AddressTable;

fn prog(instrs: Vec<crate::program::Instruction>) -> Program {
    Program::new(instrs).expect("library programs are grammatical")
}

/// `⟨∅, Load 0; Load −; Call 0, []⟩`
pub fn k() -> Machine {
    Machine::from_parts(vec![None], prog(vec![Load(0), Load(1), Call(0)]), vec![])
}

fn s_program() -> Program {
    prog(vec![Load(0), Load(1), Load(2), App(0, 2, 0), App(1, 2, 1), App(0, 1, 2), Call(2)])
}

/// `⟨∅³, Load (0,1,2); App 0 2 0; App 1 2 1; App 0 1 2; Call 2, []⟩`
pub fn s() -> Machine {
    Machine::from_parts(vec![None; 3], s_program(), vec![])
}

/// `I = S ++ [#K, #K]`.
pub fn i(table: &AddressTable) -> Machine {
    let k = table.intern(&k()).expect("fresh machine");
    s().append_tape(&[k, k])
}

/// `⟨∅, Load 0; App 0 0 0; Call 0, []⟩`
pub fn d() -> Machine {
    Machine::from_parts(vec![None], prog(vec![Load(0), App(0, 0, 0), Call(0)]), vec![])
}

/// `O = D ++ [#D]`, which head-reduces back to itself in three steps.
pub fn o(table: &AddressTable) -> Machine {
    let d = d();
    let da = table.intern(&d).expect("fresh machine");
    d.append_tape(&[da])
}

/// `K' = ⟨∅, ∅, Load (0, 1); Call 0, []⟩`
pub fn k_prime() -> Machine {
    Machine::from_parts(vec![None; 2], prog(vec![Load(0), Load(1), Call(0)]), vec![])
}

/// `1 = ⟨∅², Load (0, 1); App 0 1 0; Call 0, []⟩`
pub fn one() -> Machine {
    Machine::from_parts(vec![None; 2], prog(vec![Load(0), Load(1), App(0, 1, 0), Call(0)]), vec![])
}
