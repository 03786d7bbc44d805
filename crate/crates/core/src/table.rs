//! The address table: an incremental, structurally interning bijection
//! between the machines built so far and their addresses.
//!
//! Addresses are allocated lazily, in order, and never reused. A machine can
//! only mention addresses that were issued before it was interned, so every
//! reference points to a strictly smaller id and recursive dereferencing
//! always terminates. Consequently machines that refer to each other (or
//! infinite descending chains of machines) cannot be built with this table.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use spin::RwLock;

use crate::machine::{Address, Machine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("address {0} was never issued by this table")]
pub struct DanglingAddress(pub Address);

#[derive(Default)]
struct Inner {
    forward: Vec<Arc<Machine>>,
    backward: BTreeMap<Arc<Machine>, Address>,
    max_registers: usize,
}

/// Shared handle to the address table. All methods take `&self` and are safe
/// to call from several threads; ids are stable once issued.
#[derive(Default)]
pub struct AddressTable {
    inner: RwLock<Inner>,
}

impl AddressTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of issued addresses.
    pub fn len(&self) -> usize {
        self.inner.read().forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_issued(&self, a: Address) -> bool {
        a.0 < self.len()
    }

    /// `#M`: the address of `m`, allocating one if `m` is new.
    pub fn intern(&self, m: &Machine) -> Result<Address, DanglingAddress> {
        if let Some(&a) = self.inner.read().backward.get(m) {
            return Ok(a);
        }
        let mut inner = self.inner.write();
        if let Some(&a) = inner.backward.get(m) {
            return Ok(a);
        }
        let issued = inner.forward.len();
        if let Some(bad) = m.addresses().find(|a| a.0 >= issued) {
            return Err(DanglingAddress(bad));
        }
        let a = Address(issued);
        let m = Arc::new(m.clone());
        inner.max_registers = inner.max_registers.max(m.register_count());
        inner.forward.push(m.clone());
        inner.backward.insert(m, a);
        Ok(a)
    }

    /// `#⁻¹(a)`.
    pub fn lookup(&self, a: Address) -> Result<Machine, DanglingAddress> {
        self.get(a).map(|m| (*m).clone())
    }

    /// Shared view of `#⁻¹(a)` without copying the machine.
    pub fn get(&self, a: Address) -> Result<Arc<Machine>, DanglingAddress> {
        self.inner.read().forward.get(a.0).cloned().ok_or(DanglingAddress(a))
    }

    /// The application map `a · b = #(#⁻¹(a) ++ [b])`. Never runs anything.
    pub fn apply(&self, a: Address, b: Address) -> Result<Address, DanglingAddress> {
        if !self.is_issued(b) {
            return Err(DanglingAddress(b));
        }
        let m = self.get(a)?.append_tape(&[b]);
        self.intern(&m)
    }

    /// Left-nested application `a · b₁ · … · bₙ`.
    pub fn apply_all(&self, a: Address, args: &[Address]) -> Result<Address, DanglingAddress> {
        args.iter().try_fold(a, |acc, &b| self.apply(acc, b))
    }

    /// Largest register count of any interned machine.
    pub fn max_registers(&self) -> usize {
        self.inner.read().max_registers
    }

    /// Interns `x_n` for the smallest `n` whose register count exceeds every
    /// machine interned so far. The result is guaranteed to be a new address
    /// that no existing machine mentions.
    pub fn fresh_indeterminate(&self) -> Address {
        let mut inner = self.inner.write();
        let n = inner.max_registers;
        let m = Arc::new(Machine::indeterminate(n));
        let a = Address(inner.forward.len());
        inner.max_registers = n + 1;
        inner.forward.push(m.clone());
        inner.backward.insert(m, a);
        a
    }

    /// Snapshot of all machines in allocation order.
    pub fn entries(&self) -> Vec<(Address, Arc<Machine>)> {
        let inner = self.inner.read();
        inner.forward.iter().enumerate().map(|(i, m)| (Address(i), m.clone())).collect()
    }
}
