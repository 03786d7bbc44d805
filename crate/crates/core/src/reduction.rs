//! Full reduction `→c`, deep normal forms and evaluation equivalence.
//!
//! `→c` extends head reduction with inner steps: any `→c` step of the machine
//! stored in a register or on the tape may be performed in place. It is
//! confluent, so two machines are evaluation equivalent exactly when they
//! have a common reduct. We decide that by normalization: head-run to a final
//! state, then recursively normalize every stored address. Final states keep
//! their program, register count and tape length under inner steps, so a
//! shape mismatch between two fully head-normalized positions is a proof of
//! inequivalence even when other positions could not be normalized.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use spin::Mutex;

use crate::machine::{Address, Machine};
use crate::table::{AddressTable, DanglingAddress};
use crate::vm::{self, Outcome};

/// Nested normalization deeper than this is reported as truncated.
pub const NESTING_LIMIT: usize = 200;

/// A position inside a machine: a register or a tape cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Register(usize),
    Tape(usize),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Register(i) => write!(f, "R{i}"),
            Slot::Tape(i) => write!(f, "T{i}"),
        }
    }
}

/// Path from the top machine down through stored addresses.
pub type Path = Vec<Slot>;

/// One `→c` step: `path` is empty for the head step of the machine itself,
/// otherwise it names the stored address whose machine took a head step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub path: Path,
    pub result: Machine,
}

impl Redex {
    pub fn is_inner(&self) -> bool {
        !self.path.is_empty()
    }
}

/// All one-step `→c` reducts of `m`, each labelled with its position. Inner
/// positions are explored recursively; the table's acyclicity keeps this finite.
pub fn c_redexes(table: &AddressTable, m: &Machine) -> Vec<Redex> {
    let mut memo = BTreeMap::new();
    let mut out = Vec::new();
    if let Some(result) = vm::step(table, m) {
        out.push(Redex { path: Vec::new(), result });
    }
    for (slot, a) in slots(m) {
        for (mut path, b) in address_redexes(table, a, &mut memo) {
            path.insert(0, slot);
            out.push(Redex { path, result: replace(m, slot, b) });
        }
    }
    out
}

/// The reducts of [`c_redexes`] without their labels.
pub fn c_successors(table: &AddressTable, m: &Machine) -> Vec<Machine> {
    c_redexes(table, m).into_iter().map(|r| r.result).collect()
}

/// Inner steps only.
pub fn inner_successors(table: &AddressTable, m: &Machine) -> Vec<Machine> {
    c_redexes(table, m).into_iter().filter(Redex::is_inner).map(|r| r.result).collect()
}

fn slots(m: &Machine) -> impl Iterator<Item = (Slot, Address)> + '_ {
    let regs = m.registers().iter().enumerate().filter_map(|(i, r)| r.map(|a| (Slot::Register(i), a)));
    let tape = m.tape().iter().enumerate().map(|(i, &a)| (Slot::Tape(i), a));
    regs.chain(tape)
}

fn replace(m: &Machine, slot: Slot, a: Address) -> Machine {
    let mut n = m.clone();
    match slot {
        Slot::Register(i) => n.set_register(i, a),
        Slot::Tape(i) => n.set_tape(i, a),
    }
    n
}

fn address_redexes(
    table: &AddressTable,
    a: Address,
    memo: &mut BTreeMap<Address, Vec<(Path, Address)>>,
) -> Vec<(Path, Address)> {
    if let Some(hit) = memo.get(&a) {
        return hit.clone();
    }
    let m = table.get(a).expect("machine mentions an address this table never issued");
    let mut out = Vec::new();
    if let Some(n) = vm::step(table, &m) {
        out.push((Vec::new(), intern(table, &n)));
    }
    for (slot, b) in slots(&m) {
        for (mut path, c) in address_redexes(table, b, memo) {
            path.insert(0, slot);
            out.push((path, intern(table, &replace(&m, slot, c))));
        }
    }
    memo.insert(a, out.clone());
    out
}

fn intern(table: &AddressTable, m: &Machine) -> Address {
    table.intern(m).expect("reducts only mention issued addresses")
}

/// Why a normalization stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Truncation {
    /// A head run used up its budget.
    Fuel,
    /// A head run revisited a state, or normalization re-entered an address
    /// it was already normalizing.
    Cycle,
    /// Nested normalization exceeded [`NESTING_LIMIT`].
    Nesting,
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truncation::Fuel => "fuel",
            Truncation::Cycle => "cycle",
            Truncation::Nesting => "nesting",
        })
    }
}

/// Result of deep normalization: a `→c` reduct of the input together with
/// the normal forms of everything it stores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeepForm {
    /// The reduct, with every stored address replaced by the address of its
    /// own deep form.
    pub machine: Machine,
    pub address: Address,
    /// Whether this machine's own head run reached a final state.
    pub head_final: bool,
    /// First truncation anywhere in this subtree, `None` if complete.
    pub truncated: Option<Truncation>,
    pub registers: Vec<Option<Arc<DeepForm>>>,
    pub tape: Vec<Arc<DeepForm>>,
}

impl DeepForm {
    /// A complete deep form is a `→c` normal form.
    pub fn is_complete(&self) -> bool {
        self.truncated.is_none()
    }

    fn child(&self, slot: Slot) -> Option<&Arc<DeepForm>> {
        match slot {
            Slot::Register(i) => self.registers.get(i).and_then(Option::as_ref),
            Slot::Tape(i) => self.tape.get(i),
        }
    }

    /// The deep form reached by following `path`.
    pub fn at(&self, path: &[Slot]) -> Option<&DeepForm> {
        match path.split_first() {
            None => Some(self),
            Some((&slot, rest)) => self.child(slot)?.at(rest),
        }
    }
}

/// Deep normalizer with a per-address cache. The cache is shared by every
/// query made through the same normalizer and is safe to use from several
/// threads.
pub struct Normalizer<'t> {
    table: &'t AddressTable,
    fuel: usize,
    cache: Mutex<BTreeMap<Address, Arc<DeepForm>>>,
}

impl<'t> Normalizer<'t> {
    /// `fuel` bounds every individual head run.
    pub fn new(table: &'t AddressTable, fuel: usize) -> Self {
        Normalizer { table, fuel, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn table(&self) -> &'t AddressTable {
        self.table
    }

    pub fn fuel(&self) -> usize {
        self.fuel
    }

    pub fn normalize(&self, m: &Machine) -> Result<Arc<DeepForm>, DanglingAddress> {
        let a = self.table.intern(m)?;
        Ok(self.normalize_address(a))
    }

    /// Deep form of `#⁻¹(a)`. Panics if `a` was not issued by the table.
    pub fn normalize_address(&self, a: Address) -> Arc<DeepForm> {
        self.walk(a, &mut BTreeSet::new()).0
    }

    /// Returns the form and whether it depends on the in-progress set (and so
    /// must not be cached).
    fn walk(&self, a: Address, active: &mut BTreeSet<Address>) -> (Arc<DeepForm>, bool) {
        if let Some(hit) = self.cache.lock().get(&a) {
            return (hit.clone(), false);
        }
        let stop = |why| {
            let machine = self.table.lookup(a).expect("issued address");
            let form = DeepForm {
                machine,
                address: a,
                head_final: false,
                truncated: Some(why),
                registers: Vec::new(),
                tape: Vec::new(),
            };
            Arc::new(form)
        };
        if active.contains(&a) {
            return (stop(Truncation::Cycle), true);
        }
        if active.len() >= NESTING_LIMIT {
            return (stop(Truncation::Nesting), true);
        }

        let start = self.table.lookup(a).expect("issued address");
        let head = match vm::run(self.table, &start, self.fuel) {
            Outcome::Final(m) | Outcome::Stuck(m) => m,
            Outcome::OutOfFuel(m) => {
                let form = Arc::new(DeepForm {
                    address: intern(self.table, &m),
                    machine: m,
                    head_final: false,
                    truncated: Some(Truncation::Fuel),
                    registers: Vec::new(),
                    tape: Vec::new(),
                });
                self.cache.lock().insert(a, form.clone());
                return (form, false);
            }
            Outcome::Cycle(m, at) => {
                let form = Arc::new(DeepForm {
                    machine: m,
                    address: at,
                    head_final: false,
                    truncated: Some(Truncation::Cycle),
                    registers: Vec::new(),
                    tape: Vec::new(),
                });
                self.cache.lock().insert(a, form.clone());
                return (form, false);
            }
        };

        active.insert(a);
        let mut tentative = false;
        let mut truncated = None;
        let mut sub = |b: Address, tentative: &mut bool, truncated: &mut Option<Truncation>| {
            let (form, t) = self.walk(b, active);
            *tentative |= t;
            if truncated.is_none() {
                *truncated = form.truncated;
            }
            form
        };
        let registers: Vec<Option<Arc<DeepForm>>> =
            head.registers().iter().map(|r| r.map(|b| sub(b, &mut tentative, &mut truncated))).collect();
        let tape: Vec<Arc<DeepForm>> = head.tape().iter().map(|&b| sub(b, &mut tentative, &mut truncated)).collect();
        active.remove(&a);

        let (_, program, _) = head.into_parts();
        let machine = Machine::from_parts(
            registers.iter().map(|r| r.as_ref().map(|f| f.address)).collect(),
            program,
            tape.iter().map(|f| f.address).collect(),
        );
        let form = Arc::new(DeepForm {
            address: intern(self.table, &machine),
            machine,
            head_final: true,
            truncated,
            registers,
            tape,
        });
        if !tentative {
            self.cache.lock().insert(a, form.clone());
        }
        (form, tentative)
    }

    /// Evaluation equivalence of `#⁻¹(a)` and `#⁻¹(b)`.
    pub fn eval_equiv(&self, a: Address, b: Address) -> Result<EquivVerdict, DanglingAddress> {
        for x in [a, b] {
            if !self.table.is_issued(x) {
                return Err(DanglingAddress(x));
            }
        }
        if a == b {
            return Ok(EquivVerdict::Equiv);
        }
        let (fa, fb) = (self.normalize_address(a), self.normalize_address(b));
        Ok(match compare(&fa, &fb, &mut Vec::new()) {
            Comparison::Same => EquivVerdict::Equiv,
            Comparison::Differ(w) => EquivVerdict::Distinct(w),
            Comparison::Undecided(why) => EquivVerdict::Unknown(why),
        })
    }

    /// Head-runs `m` like [`vm::run`], but after every step replaces each
    /// stored address by the address of its deep form before checking for a
    /// repeated state.
    ///
    /// The replacements are inner reductions, and inner reductions never
    /// lengthen the head path to a final state while every head step shortens
    /// it; so a repeated state here still proves that `m` head-diverges. This
    /// catches loops such as compiled `Ω`, whose plain head reduction never
    /// repeats an address because its argument grows by an evaluation
    /// equivalent wrapper on every round.
    pub fn run_modulo_inner(&self, m: &Machine) -> Outcome {
        let canon = |s: &Machine| {
            let regs = s.registers().iter().map(|r| r.map(|b| self.normalize_address(b).address)).collect();
            let tape = s.tape().iter().map(|&b| self.normalize_address(b).address).collect();
            Machine::from_parts(regs, s.program().clone(), tape)
        };
        let mut seen = BTreeSet::new();
        let mut cur = canon(m);
        seen.insert(intern(self.table, &cur));
        let mut steps = 0;
        loop {
            if cur.program().is_empty() {
                return Outcome::Final(cur);
            }
            if cur.is_stuck() {
                return Outcome::Stuck(cur);
            }
            if steps == self.fuel {
                return Outcome::OutOfFuel(cur);
            }
            cur = canon(&vm::step(self.table, &cur).expect("non-final machines step"));
            steps += 1;
            let a = intern(self.table, &cur);
            if !seen.insert(a) {
                return Outcome::Cycle(cur, a);
            }
        }
    }
}

/// What differs between two head-normalized positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    RegisterCount(usize, usize),
    Program,
    TapeLength(usize, usize),
    /// The register is empty on one side only.
    NullRegister(usize),
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::RegisterCount(l, r) => write!(f, "register count {l} vs {r}"),
            Mismatch::Program => f.write_str("different programs"),
            Mismatch::TapeLength(l, r) => write!(f, "tape length {l} vs {r}"),
            Mismatch::NullRegister(i) => write!(f, "register {i} empty on one side only"),
        }
    }
}

/// A position at which two deep forms provably disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub path: Path,
    pub mismatch: Mismatch,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str("top")?;
        }
        for (n, s) in self.path.iter().enumerate() {
            if n > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ": {}", self.mismatch)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    Equiv,
    Distinct(Witness),
    Unknown(Truncation),
}

enum Comparison {
    Same,
    Differ(Witness),
    Undecided(Truncation),
}

fn shape_mismatch(l: &Machine, r: &Machine) -> Option<Mismatch> {
    if l.register_count() != r.register_count() {
        return Some(Mismatch::RegisterCount(l.register_count(), r.register_count()));
    }
    if l.program() != r.program() {
        return Some(Mismatch::Program);
    }
    if l.tape().len() != r.tape().len() {
        return Some(Mismatch::TapeLength(l.tape().len(), r.tape().len()));
    }
    l.registers().iter().zip(r.registers()).position(|(x, y)| x.is_some() != y.is_some()).map(Mismatch::NullRegister)
}

fn compare(l: &DeepForm, r: &DeepForm, path: &mut Path) -> Comparison {
    if l.address == r.address {
        return Comparison::Same;
    }
    if !l.head_final || !r.head_final {
        let why = l.truncated.or(r.truncated).unwrap_or(Truncation::Fuel);
        return Comparison::Undecided(why);
    }
    if let Some(mismatch) = shape_mismatch(&l.machine, &r.machine) {
        return Comparison::Differ(Witness { path: path.clone(), mismatch });
    }
    let mut undecided = None;
    let children = l
        .registers
        .iter()
        .zip(&r.registers)
        .enumerate()
        .filter_map(|(i, (x, y))| Some((Slot::Register(i), x.as_ref()?, y.as_ref()?)))
        .chain(l.tape.iter().zip(&r.tape).enumerate().map(|(i, (x, y))| (Slot::Tape(i), x, y)));
    for (slot, x, y) in children {
        path.push(slot);
        let c = compare(x, y, path);
        path.pop();
        match c {
            Comparison::Same => {}
            Comparison::Differ(w) => return Comparison::Differ(w),
            Comparison::Undecided(why) => {
                undecided.get_or_insert(why);
            }
        }
    }
    match undecided {
        Some(why) => Comparison::Undecided(why),
        // identical shapes and identical children would have identical addresses
        None => Comparison::Same,
    }
}

/// Every position at which two deep forms provably disagree, outermost first.
pub fn differences(l: &DeepForm, r: &DeepForm) -> Vec<Witness> {
    fn go(l: &DeepForm, r: &DeepForm, path: &mut Path, out: &mut Vec<Witness>) {
        if l.address == r.address || !l.head_final || !r.head_final {
            return;
        }
        if let Some(mismatch) = shape_mismatch(&l.machine, &r.machine) {
            out.push(Witness { path: path.clone(), mismatch });
            return;
        }
        for (i, (x, y)) in l.registers.iter().zip(&r.registers).enumerate() {
            if let (Some(x), Some(y)) = (x, y) {
                path.push(Slot::Register(i));
                go(x, y, path, out);
                path.pop();
            }
        }
        for (i, (x, y)) in l.tape.iter().zip(&r.tape).enumerate() {
            path.push(Slot::Tape(i));
            go(x, y, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(l, r, &mut Vec::new(), &mut out);
    out
}

/// Deep normal form of `m`, with `fuel` bounding each head run.
pub fn deep_normalize(table: &AddressTable, m: &Machine, fuel: usize) -> Result<Arc<DeepForm>, DanglingAddress> {
    Normalizer::new(table, fuel).normalize(m)
}

/// Evaluation equivalence, decided by comparing deep normal forms.
pub fn eval_equiv(table: &AddressTable, a: Address, b: Address, fuel: usize) -> Result<EquivVerdict, DanglingAddress> {
    Normalizer::new(table, fuel).eval_equiv(a, b)
}
