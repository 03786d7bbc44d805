//! Shared generators and search oracles for the integration tests.
#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use addrvm_core::combinators;
use addrvm_core::reduction::{c_successors, inner_successors};
use addrvm_core::{step, Address, AddressTable, Instruction, Machine, Program};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn intern(t: &AddressTable, m: &Machine) -> Address {
    t.intern(m).unwrap()
}

/// Library machines, indeterminates and a few applied combinators, some of
/// which can still take head steps.
pub fn pool(t: &AddressTable) -> Vec<Address> {
    let k = intern(t, &combinators::k());
    let s = intern(t, &combinators::s());
    let i = intern(t, &combinators::i(t));
    let d = intern(t, &combinators::d());
    let kp = intern(t, &combinators::k_prime());
    let one = intern(t, &combinators::one());
    let x: Vec<Address> = (0..4).map(|n| intern(t, &Machine::indeterminate(n))).collect();
    let mut out = vec![k, s, i, d, kp, one];
    out.extend(&x);
    out.push(t.apply(k, x[1]).unwrap());
    out.push(t.apply_all(k, &[x[1], x[2]]).unwrap());
    out.push(t.apply(i, x[2]).unwrap());
    out.push(t.apply_all(s, &[k, k, x[3]]).unwrap());
    out.push(t.apply_all(one, &[i, x[0]]).unwrap());
    out.push(t.apply_all(kp, &[i]).unwrap());
    out
}

/// Random valid machine parts over `pool`: at most 4 registers, 6
/// instructions and 4 tape items.
pub fn random_parts<A: Copy, R: Rng>(rng: &mut R, pool: &[A]) -> (Vec<Option<A>>, Program, Vec<A>) {
    let r = rng.gen_range(0..=4);
    let regs: Vec<Option<A>> = (0..r).map(|_| rng.gen_bool(0.6).then(|| pool[rng.gen_range(0..pool.len())])).collect();
    let mut init: BTreeSet<usize> = regs.iter().enumerate().filter(|(_, x)| x.is_some()).map(|(i, _)| i).collect();
    let budget = rng.gen_range(0..=6);
    let mut instrs = Vec::new();
    let loads = rng.gen_range(0..=budget.min(4));
    for _ in 0..loads {
        let i = rng.gen_range(0..=r);
        if i < r {
            init.insert(i);
        }
        instrs.push(Instruction::Load(i));
    }
    let pick = |rng: &mut R, init: &BTreeSet<usize>| *init.iter().nth(rng.gen_range(0..init.len())).unwrap();
    while instrs.len() < budget {
        if init.is_empty() {
            break;
        }
        if rng.gen_bool(0.3) {
            instrs.push(Instruction::Call(pick(rng, &init)));
            break;
        }
        let (i, j) = (pick(rng, &init), pick(rng, &init));
        let k = rng.gen_range(0..=r);
        if k < r {
            init.insert(k);
        }
        instrs.push(Instruction::App(i, j, k));
    }
    let tape_len = rng.gen_range(0..=4);
    let tape = (0..tape_len).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
    (regs, Program::new(instrs).unwrap(), tape)
}

pub fn random_machine<R: Rng>(rng: &mut R, pool: &[Address]) -> Machine {
    let (regs, p, tape) = random_parts(rng, pool);
    Machine::new(regs, p, tape).expect("generator only builds valid machines")
}

/// Memoized successor relation on addresses.
pub struct Successors<'t> {
    t: &'t AddressTable,
    inner_only: bool,
    memo: RefCell<BTreeMap<Address, Vec<Address>>>,
}

impl<'t> Successors<'t> {
    pub fn c(t: &'t AddressTable) -> Self {
        Successors { t, inner_only: false, memo: RefCell::new(BTreeMap::new()) }
    }

    pub fn inner(t: &'t AddressTable) -> Self {
        Successors { t, inner_only: true, memo: RefCell::new(BTreeMap::new()) }
    }

    pub fn of(&self, a: Address) -> Vec<Address> {
        if let Some(v) = self.memo.borrow().get(&a) {
            return v.clone();
        }
        let m = self.t.lookup(a).unwrap();
        let next = if self.inner_only { inner_successors(self.t, &m) } else { c_successors(self.t, &m) };
        let v: Vec<Address> = next.iter().map(|n| intern(self.t, n)).collect();
        self.memo.borrow_mut().insert(a, v.clone());
        v
    }

    /// Everything reachable from `a` in at most `depth` steps, with distances.
    pub fn reach(&self, a: Address, depth: usize) -> BTreeMap<Address, usize> {
        let mut dist = BTreeMap::from([(a, 0)]);
        let mut queue = VecDeque::from([(a, 0)]);
        while let Some((x, d)) = queue.pop_front() {
            if d == depth {
                continue;
            }
            for y in self.of(x) {
                dist.entry(y).or_insert_with(|| {
                    queue.push_back((y, d + 1));
                    d + 1
                });
            }
        }
        dist
    }
}

/// Smallest total number of `→c` steps joining `a` and `b`, if at most `max`.
pub fn join_within(s: &Successors<'_>, a: Address, b: Address, max: usize) -> Option<usize> {
    let meet = |da: usize, db: usize| {
        let (ra, rb) = (s.reach(a, da), s.reach(b, db));
        ra.iter().filter_map(|(x, da)| rb.get(x).map(|db| da + db)).min()
    };
    // grow both sides alternately; the first meeting point is the closest
    (0..=max).find_map(|n| meet(n.div_ceil(2), n / 2))
}

/// Whether `target` is reachable from `from` by at most `max` inner steps.
pub fn inner_reaches(s: &Successors<'_>, from: &Machine, target: &Machine, max: usize) -> bool {
    s.reach(intern(s.t, from), max).contains_key(&intern(s.t, target))
}

/// Whether `target` is reachable from `m` by one head step followed by at
/// most `max_inner` inner steps.
pub fn postponed(s: &Successors<'_>, m: &Machine, target: &Machine, max_inner: usize) -> bool {
    step(s.t, m).is_some_and(|m1| inner_reaches(s, &m1, target, max_inner))
}

/// Whether `target` is reachable from `m` by at most `max_head` (at least
/// one) head steps followed by at most `max_inner` inner steps.
pub fn postponed_multi(s: &Successors<'_>, m: &Machine, target: &Machine, max_head: usize, max_inner: usize) -> bool {
    let mut cur = m.clone();
    for _ in 0..max_head {
        match step(s.t, &cur) {
            Some(next) => cur = next,
            None => return false,
        }
        if inner_reaches(s, &cur, target, max_inner) {
            return true;
        }
    }
    false
}
