//! Extended machines, which may mention a hole `ξ`, and contexts.
//!
//! Extended machines get their own ids from an [`ExtTable`] layered over a
//! base [`AddressTable`]. An extended machine that mentions no extended id is
//! an ordinary machine and is interned in the base table, so base addresses
//! keep their meaning and the two id spaces never overlap.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use spin::RwLock;

use crate::machine::{write_parts, Address, Machine};
use crate::program::{Instruction, Program};
use crate::table::{AddressTable, DanglingAddress};
use crate::validator::{validate, InitializedSet, ValidityError};
use crate::vm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtAddress {
    Base(Address),
    Ext(usize),
}

impl fmt::Display for ExtAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtAddress::Base(a) => write!(f, "{a}"),
            ExtAddress::Ext(e) => write!(f, "${e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtMachine {
    /// `ξ ++ tape`.
    Hole {
        tape: Vec<ExtAddress>,
    },
    Plain {
        registers: Vec<Option<ExtAddress>>,
        program: Program,
        tape: Vec<ExtAddress>,
    },
}

impl fmt::Display for ExtMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtMachine::Hole { tape } => {
                f.write_str("hole tape=[")?;
                for (i, a) in tape.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
            ExtMachine::Plain { registers, program, tape } => {
                write_parts(f, registers.iter().copied(), program, tape.iter().copied())
            }
        }
    }
}

impl From<&Machine> for ExtMachine {
    fn from(m: &Machine) -> Self {
        ExtMachine::Plain {
            registers: m.registers().iter().map(|r| r.map(ExtAddress::Base)).collect(),
            program: m.program().clone(),
            tape: m.tape().iter().map(|&a| ExtAddress::Base(a)).collect(),
        }
    }
}

impl ExtMachine {
    /// The bare hole `ξ`.
    pub fn hole() -> Self {
        ExtMachine::Hole { tape: Vec::new() }
    }

    /// Checks the program against the registers.
    pub fn plain(
        registers: Vec<Option<ExtAddress>>,
        program: Program,
        tape: Vec<ExtAddress>,
    ) -> Result<Self, ValidityError> {
        let init = InitializedSet::new(
            registers.len(),
            registers.iter().enumerate().filter(|(_, r)| r.is_some()).map(|(i, _)| i),
        )
        .expect("indices are in range");
        validate(&program, registers.len(), &init)?;
        Ok(ExtMachine::Plain { registers, program, tape })
    }

    pub fn tape(&self) -> &[ExtAddress] {
        match self {
            ExtMachine::Hole { tape } | ExtMachine::Plain { tape, .. } => tape,
        }
    }

    pub fn append_tape(&self, more: &[ExtAddress]) -> Self {
        let mut x = self.clone();
        match &mut x {
            ExtMachine::Hole { tape } | ExtMachine::Plain { tape, .. } => tape.extend_from_slice(more),
        }
        x
    }

    pub fn addresses(&self) -> impl Iterator<Item = ExtAddress> + '_ {
        let regs: &[Option<ExtAddress>] = match self {
            ExtMachine::Plain { registers, .. } => registers,
            ExtMachine::Hole { .. } => &[],
        };
        regs.iter().flatten().copied().chain(self.tape().iter().copied())
    }

    /// The ordinary machine, if nothing refers to an extended id.
    pub fn as_base(&self) -> Option<Machine> {
        let ExtMachine::Plain { registers, program, tape } = self else { return None };
        let base = |a: &ExtAddress| match a {
            ExtAddress::Base(b) => Some(*b),
            ExtAddress::Ext(_) => None,
        };
        let regs = registers
            .iter()
            .map(|r| match r {
                None => Some(None),
                Some(a) => base(a).map(Some),
            })
            .collect::<Option<Vec<_>>>()?;
        let tape = tape.iter().map(base).collect::<Option<Vec<_>>>()?;
        Some(Machine::from_parts(regs, program.clone(), tape))
    }

    /// Final for underlined reduction: the hole always steps.
    pub fn is_final(&self) -> bool {
        match self {
            ExtMachine::Hole { .. } => false,
            ExtMachine::Plain { program, tape, .. } => match program.first() {
                None => true,
                Some(Instruction::Load(_)) => tape.is_empty(),
                Some(_) => false,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("extended address {0} was never issued")]
pub struct ExtDangling(pub ExtAddress);

impl From<DanglingAddress> for ExtDangling {
    fn from(d: DanglingAddress) -> Self {
        ExtDangling(ExtAddress::Base(d.0))
    }
}

#[derive(Default)]
struct ExtInner {
    forward: Vec<Arc<ExtMachine>>,
    backward: BTreeMap<Arc<ExtMachine>, usize>,
}

/// Interner for extended machines, layered over a base table.
pub struct ExtTable<'b> {
    base: &'b AddressTable,
    inner: RwLock<ExtInner>,
}

impl<'b> ExtTable<'b> {
    pub fn new(base: &'b AddressTable) -> Self {
        ExtTable { base, inner: RwLock::new(ExtInner::default()) }
    }

    pub fn base(&self) -> &'b AddressTable {
        self.base
    }

    /// Number of issued extended ids.
    pub fn len(&self) -> usize {
        self.inner.read().forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn intern(&self, x: &ExtMachine) -> Result<ExtAddress, ExtDangling> {
        if let Some(m) = x.as_base() {
            return Ok(ExtAddress::Base(self.base.intern(&m)?));
        }
        if let Some(&e) = self.inner.read().backward.get(x) {
            return Ok(ExtAddress::Ext(e));
        }
        let mut inner = self.inner.write();
        if let Some(&e) = inner.backward.get(x) {
            return Ok(ExtAddress::Ext(e));
        }
        let issued = inner.forward.len();
        for a in x.addresses() {
            let ok = match a {
                ExtAddress::Base(b) => self.base.is_issued(b),
                ExtAddress::Ext(e) => e < issued,
            };
            if !ok {
                return Err(ExtDangling(a));
            }
        }
        let x = Arc::new(x.clone());
        inner.forward.push(x.clone());
        inner.backward.insert(x, issued);
        Ok(ExtAddress::Ext(issued))
    }

    pub fn lookup(&self, a: ExtAddress) -> Result<ExtMachine, ExtDangling> {
        match a {
            ExtAddress::Base(b) => Ok(ExtMachine::from(&*self.base.get(b)?)),
            ExtAddress::Ext(e) => self.inner.read().forward.get(e).map(|x| (**x).clone()).ok_or(ExtDangling(a)),
        }
    }

    /// `a · b` over extended addresses.
    pub fn apply(&self, a: ExtAddress, b: ExtAddress) -> Result<ExtAddress, ExtDangling> {
        self.intern(&self.lookup(a)?.append_tape(&[b]))
    }

    /// Number of occurrences of the hole, following stored addresses.
    pub fn occ(&self, x: &ExtMachine) -> Result<usize, ExtDangling> {
        let mut memo = BTreeMap::new();
        self.occ_in(x, &mut memo)
    }

    fn occ_in(&self, x: &ExtMachine, memo: &mut BTreeMap<usize, usize>) -> Result<usize, ExtDangling> {
        let own = usize::from(matches!(x, ExtMachine::Hole { .. }));
        x.addresses().try_fold(own, |n, a| Ok(n + self.occ_addr(a, memo)?))
    }

    fn occ_addr(&self, a: ExtAddress, memo: &mut BTreeMap<usize, usize>) -> Result<usize, ExtDangling> {
        let ExtAddress::Ext(e) = a else { return Ok(0) };
        if let Some(&n) = memo.get(&e) {
            return Ok(n);
        }
        let n = self.occ_in(&self.lookup(a)?, memo)?;
        memo.insert(e, n);
        Ok(n)
    }

    /// `c⟦m⟧`: every hole replaced by `m`, recursively through stored
    /// addresses. Intermediate results are interned in the base table.
    pub fn plug(&self, c: &ExtMachine, m: &Machine) -> Result<Machine, ExtDangling> {
        self.plug_in(c, m, &mut BTreeMap::new())
    }

    fn plug_in(
        &self,
        c: &ExtMachine,
        m: &Machine,
        memo: &mut BTreeMap<usize, Address>,
    ) -> Result<Machine, ExtDangling> {
        let mut addr = |a: ExtAddress| -> Result<Address, ExtDangling> {
            match a {
                ExtAddress::Base(b) => Ok(b),
                ExtAddress::Ext(e) => {
                    if let Some(&b) = memo.get(&e) {
                        return Ok(b);
                    }
                    let plugged = self.plug_in(&self.lookup(a)?, m, memo)?;
                    let b = self.base.intern(&plugged)?;
                    memo.insert(e, b);
                    Ok(b)
                }
            }
        };
        match c {
            ExtMachine::Hole { tape } => {
                let tape = tape.iter().map(|&a| addr(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(m.append_tape(&tape))
            }
            ExtMachine::Plain { registers, program, tape } => {
                let regs = registers.iter().map(|r| r.map(&mut addr).transpose()).collect::<Result<Vec<_>, _>>()?;
                let tape = tape.iter().map(|&a| addr(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(Machine::from_parts(regs, program.clone(), tape))
            }
        }
    }

    /// One step of `m`-underlined head reduction, or `None` if `c` is final.
    /// The hole steps to `m` with the hole's tape appended; everything else is
    /// an ordinary head step over extended addresses.
    pub fn underlined_step(&self, c: &ExtMachine, m: &Machine) -> Result<Option<ExtMachine>, ExtDangling> {
        let (registers, program, tape) = match c {
            ExtMachine::Hole { tape } => return Ok(Some(ExtMachine::from(m).append_tape(tape))),
            ExtMachine::Plain { registers, program, tape } => (registers, program, tape),
        };
        let reg = |i: usize| registers[i].expect("valid programs only read initialized registers");
        let Some(ins) = program.first() else { return Ok(None) };
        Ok(Some(match ins {
            Instruction::Load(i) => {
                let Some((&a, rest)) = tape.split_first() else { return Ok(None) };
                let mut regs = registers.clone();
                if let Some(cell) = regs.get_mut(i) {
                    *cell = Some(a);
                }
                ExtMachine::Plain { registers: regs, program: program.tail(), tape: rest.to_vec() }
            }
            Instruction::App(i, j, k) => {
                let c = self.apply(reg(i), reg(j))?;
                let mut regs = registers.clone();
                if let Some(cell) = regs.get_mut(k) {
                    *cell = Some(c);
                }
                ExtMachine::Plain { registers: regs, program: program.tail(), tape: tape.clone() }
            }
            Instruction::Call(i) => self.lookup(reg(i))?.append_tape(tape),
        }))
    }

    /// Runs `m`-underlined reduction from `c` next to head reduction from
    /// `c⟦m⟧`, pairing each underlined state with the plugged state it should
    /// correspond to.
    pub fn correspondence(&self, c: &ExtMachine, m: &Machine, fuel: usize) -> Result<Correspondence, ExtDangling> {
        let table = self.base;
        let mut pairs = Vec::new();
        let mut u = c.clone();
        let mut p = self.plug(c, m)?;
        // Each hole step is followed by an ordinary step, so the underlined
        // side needs at most twice as many steps.
        let budget = 2 * fuel + 1;
        let mut head_steps = 0;
        for _ in 0..budget {
            let agrees = self.plug(&u, m)? == p;
            pairs.push((u.clone(), p.clone()));
            if !agrees {
                return Ok(Correspondence { pairs, agrees: false, finished: false });
            }
            let hole = matches!(u, ExtMachine::Hole { .. });
            match self.underlined_step(&u, m)? {
                None => {
                    let finished = vm::step(table, &p).is_none();
                    return Ok(Correspondence { pairs, agrees: finished, finished });
                }
                Some(next) => u = next,
            }
            if !hole {
                if head_steps == fuel {
                    break;
                }
                match vm::step(table, &p) {
                    Some(next) => p = next,
                    None => return Ok(Correspondence { pairs, agrees: false, finished: false }),
                }
                head_steps += 1;
            }
        }
        Ok(Correspondence { pairs, agrees: true, finished: false })
    }

    /// Whether the two reductions correspond step for step within `fuel`
    /// head steps.
    pub fn correspondence_check(&self, c: &ExtMachine, m: &Machine, fuel: usize) -> bool {
        self.correspondence(c, m, fuel).map(|r| r.agrees).unwrap_or(false)
    }
}

/// Paired traces produced by [`ExtTable::correspondence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    /// Underlined states with the head-reduction state they were compared to.
    pub pairs: Vec<(ExtMachine, Machine)>,
    /// No disagreement was found.
    pub agrees: bool,
    /// Both sides reached final states.
    pub finished: bool,
}
