//! Addressing machines.
//!
//! An addressing machine is a bank of registers holding addresses (or nothing),
//! a program over three instructions (`Load`, `App`, `Call`) and an input tape
//! of addresses. Machines never manipulate data other than addresses of other
//! machines; the only external operation is the application map, which maps a
//! pair of addresses to the address of the first machine with the second
//! address appended to its tape.
//!
//! This crate is `no_std` (it needs `alloc`) and contains every algorithm:
//!
//! * [`machine`], [`program`], [`validator`]: the data model and the validity judgment.
//! * [`table`]: an incremental, structurally interning address table.
//! * [`vm`]: head reduction, big-step evaluation, runs with fuel and cycle detection.
//! * [`reduction`]: inner reduction, deep normal forms and evaluation equivalence.
//! * [`lambda`]: lambda terms, the compiler into machines and the model interpretation.
//! * [`ae`]: a bounded checker for applicative equivalence.
//! * [`context`]: machines with holes, plugging and underlined reduction.
//!
//! Textual formats, session files and the command-line driver live in the
//! `addrvm` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod ae;
pub mod combinators;
pub mod context;
pub mod lambda;
pub mod machine;
pub mod program;
pub mod reduction;
pub mod table;
pub mod validator;
pub mod vm;

pub use ae::{ae_check, AeConfig, AeVerdict};
pub use machine::{Address, Machine, RegisterCell, Tape};
pub use program::{Instruction, Program};
pub use reduction::{eval_equiv, DeepForm, EquivVerdict};
pub use table::{AddressTable, DanglingAddress};
pub use validator::{parse_program, validate, InitializedSet, SyntaxError, ValidityError};
pub use vm::{bigstep, run, step, trace, Outcome};
