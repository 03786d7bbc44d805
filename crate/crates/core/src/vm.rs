//! Head reduction.
//!
//! [`step`] is the small-step relation `→h`; [`run`] and [`trace`] iterate it
//! under a step budget, and [`bigstep`] evaluates the big-step rules
//! (Stuck), (End), (Load), (App), (Call) recursively. Both drivers intern
//! every state they visit and report [`Outcome::Cycle`] as soon as an address
//! repeats: head reduction is deterministic, so a repeated state proves
//! divergence.
//!
//! All functions panic if the machine mentions an address that `table` never
//! issued.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::machine::{Address, Machine};
use crate::program::Instruction;
use crate::table::AddressTable;

/// Default step budget for runs started from the command line.
pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Reached a machine with the empty program.
    Final(Machine),
    /// Reached a machine waiting for input.
    Stuck(Machine),
    /// The budget ran out; carries the last state reached.
    OutOfFuel(Machine),
    /// The state repeated; carries the repeated state and its address.
    Cycle(Machine, Address),
}

impl Outcome {
    /// The final state, for `Final` and `Stuck`.
    pub fn terminal(&self) -> Option<&Machine> {
        match self {
            Outcome::Final(m) | Outcome::Stuck(m) => Some(m),
            _ => None,
        }
    }

    pub fn machine(&self) -> &Machine {
        match self {
            Outcome::Final(m) | Outcome::Stuck(m) | Outcome::OutOfFuel(m) | Outcome::Cycle(m, _) => m,
        }
    }

    pub fn terminated(&self) -> bool {
        self.terminal().is_some()
    }

    fn classify_final(m: Machine) -> Outcome {
        if m.program().is_empty() {
            Outcome::Final(m)
        } else {
            Outcome::Stuck(m)
        }
    }
}

const DANGLING: &str = "machine mentions an address this table never issued";

fn reg(m: &Machine, i: usize) -> Address {
    m.registers()[i].expect("valid programs only read initialized registers")
}

/// One head step, or `None` if `m` is final.
pub fn step(table: &AddressTable, m: &Machine) -> Option<Machine> {
    let ins = m.program().first()?;
    match ins {
        Instruction::Load(i) => {
            let (&a, rest) = m.tape().split_first()?;
            let mut regs = m.registers().to_vec();
            if let Some(cell) = regs.get_mut(i) {
                *cell = Some(a);
            }
            Some(Machine::from_parts(regs, m.program().tail(), rest.to_vec()))
        }
        Instruction::App(i, j, k) => {
            let c = table.apply(reg(m, i), reg(m, j)).expect(DANGLING);
            let mut next = Machine::from_parts(m.registers().to_vec(), m.program().tail(), m.tape().to_vec());
            next.set_register(k, c);
            Some(next)
        }
        Instruction::Call(i) => {
            let callee = table.get(reg(m, i)).expect(DANGLING);
            Some(callee.append_tape(m.tape()))
        }
    }
}

/// The head-reduction sequence from a machine, cut off by fuel or a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// Every visited state, starting with the initial one. A repeated state
    /// is not listed a second time.
    pub states: Vec<Machine>,
    pub outcome: Outcome,
}

impl Trace {
    /// Number of head steps performed (including the one that closed a cycle).
    pub fn steps(&self) -> usize {
        match self.outcome {
            Outcome::Cycle(..) => self.states.len(),
            _ => self.states.len() - 1,
        }
    }
}

fn drive(table: &AddressTable, m: &Machine, fuel: usize, mut visit: impl FnMut(&Machine)) -> Outcome {
    let mut seen = BTreeSet::new();
    seen.insert(table.intern(m).expect(DANGLING));
    let mut cur = m.clone();
    let mut steps = 0;
    loop {
        visit(&cur);
        if cur.is_final() {
            return Outcome::classify_final(cur);
        }
        if steps == fuel {
            return Outcome::OutOfFuel(cur);
        }
        cur = step(table, &cur).expect("non-final machines step");
        steps += 1;
        let a = table.intern(&cur).expect(DANGLING);
        if !seen.insert(a) {
            return Outcome::Cycle(cur, a);
        }
    }
}

/// Iterates [`step`] for at most `fuel` steps.
pub fn run(table: &AddressTable, m: &Machine, fuel: usize) -> Outcome {
    drive(table, m, fuel, |_| {})
}

pub fn trace(table: &AddressTable, m: &Machine, fuel: usize) -> Trace {
    let mut states = Vec::new();
    let outcome = drive(table, m, fuel, |s| states.push(s.clone()));
    Trace { states, outcome }
}

/// Big-step evaluation `M ⇓ V`.
///
/// `fuel` bounds the number of (Load), (App) and (Call) rules in the
/// derivation; the axioms (Stuck) and (End) are free, so a budget of `n`
/// admits exactly the machines that head-normalize in at most `n` steps.
/// Recursion depth equals the number of rules used.
pub fn bigstep(table: &AddressTable, m: &Machine, fuel: usize) -> Outcome {
    let mut seen = BTreeSet::new();
    derive(table, m.clone(), fuel, &mut seen)
}

fn derive(table: &AddressTable, m: Machine, fuel: usize, seen: &mut BTreeSet<Address>) -> Outcome {
    let a = table.intern(&m).expect(DANGLING);
    if !seen.insert(a) {
        return Outcome::Cycle(m, a);
    }
    let Some(ins) = m.program().first() else {
        // (End)
        return Outcome::Final(m);
    };
    if let (Instruction::Load(_), []) = (ins, m.tape()) {
        // (Stuck)
        return Outcome::Stuck(m);
    }
    if fuel == 0 {
        return Outcome::OutOfFuel(m);
    }
    let premise = match ins {
        // (Load): ⟨R[i := a], P', T'⟩ ⇓ V
        Instruction::Load(i) => {
            let (regs, prog, tape) = m.into_parts();
            let mut next = Machine::from_parts(regs, prog.tail(), tape[1..].to_vec());
            next.set_register(i, tape[0]);
            next
        }
        // (App): a = R_i · R_j and ⟨R[k := a], P', T⟩ ⇓ V
        Instruction::App(i, j, k) => {
            let c = table.apply(reg(&m, i), reg(&m, j)).expect(DANGLING);
            let (regs, prog, tape) = m.into_parts();
            let mut next = Machine::from_parts(regs, prog.tail(), tape);
            next.set_register(k, c);
            next
        }
        // (Call): #⁻¹(R_i) ++ T ⇓ V
        Instruction::Call(i) => table.get(reg(&m, i)).expect(DANGLING).append_tape(m.tape()),
    };
    derive(table, premise, fuel - 1, seen)
}
