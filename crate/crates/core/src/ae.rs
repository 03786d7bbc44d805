//! Bounded applicative equivalence.
//!
//! Two machines are compared by head-running both. Runs ending in
//! indeterminates decide the question outright. Runs ending in stuck machines
//! are fed the same fresh indeterminate and compared again, up to a depth
//! bound. A `Distinct` verdict is always sound and carries the arguments that
//! expose the difference; `EquivUpTo` only says no difference was found with
//! that many fresh arguments.

use alloc::vec::Vec;
use core::fmt;

use crate::machine::{Address, Machine};
use crate::reduction::{EquivVerdict, Normalizer};
use crate::table::{AddressTable, DanglingAddress};
use crate::vm::{self, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AeConfig {
    /// Budget of each head run.
    pub fuel: usize,
    /// How many fresh arguments may be applied.
    pub depth: usize,
    /// Report a stuck machine against a divergent one as `Distinct`.
    pub strict_distinct: bool,
}

impl Default for AeConfig {
    fn default() -> Self {
        AeConfig { fuel: vm::DEFAULT_FUEL, depth: 3, strict_distinct: false }
    }
}

/// How a head run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observation {
    /// Reached the indeterminate `x_n`.
    Indeterminate(usize),
    /// Reached a machine waiting for input.
    Stuck,
    /// Reached some other machine with the empty program.
    Final,
    /// Provably diverges.
    Diverges,
    /// Ran out of fuel.
    OutOfFuel,
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Indeterminate(n) => write!(f, "x{n}"),
            Observation::Stuck => f.write_str("stuck"),
            Observation::Final => f.write_str("final"),
            Observation::Diverges => f.write_str("diverges"),
            Observation::OutOfFuel => f.write_str("out of fuel"),
        }
    }
}

/// Head-runs `m`. A run that exhausts its fuel is retried modulo inner
/// normalization, which can still prove divergence.
pub fn observe(norm: &Normalizer<'_>, m: &Machine) -> Observation {
    let mut outcome = vm::run(norm.table(), m, norm.fuel());
    if let Outcome::OutOfFuel(_) = outcome {
        outcome = norm.run_modulo_inner(m);
    }
    match outcome {
        Outcome::Final(m) => match m.as_indeterminate() {
            Some(n) => Observation::Indeterminate(n),
            None => Observation::Final,
        },
        Outcome::Stuck(_) => Observation::Stuck,
        Outcome::Cycle(..) => Observation::Diverges,
        Outcome::OutOfFuel(_) => Observation::OutOfFuel,
    }
}

/// Arguments applied to both sides, and what each side did afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AeWitness {
    pub args: Vec<Address>,
    pub left: Observation,
    pub right: Observation,
}

impl AeWitness {
    /// Re-applies the arguments and checks that both observations recur.
    pub fn replay(&self, table: &AddressTable, a: Address, b: Address, fuel: usize) -> Result<bool, DanglingAddress> {
        let norm = Normalizer::new(table, fuel);
        let l = table.lookup(table.apply_all(a, &self.args)?)?;
        let r = table.lookup(table.apply_all(b, &self.args)?)?;
        Ok(observe(&norm, &l) == self.left && observe(&norm, &r) == self.right)
    }
}

impl fmt::Display for AeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("applied to [")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]: {} vs {}", self.left, self.right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Undecided {
    /// A run used up its fuel.
    Fuel,
    /// Both sides still wait for input after `depth` arguments.
    Depth,
    /// Both sides diverge.
    BothDiverge,
    /// The observations differ but that does not decide the question.
    Inconclusive,
}

impl fmt::Display for Undecided {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Undecided::Fuel => "fuel exhausted",
            Undecided::Depth => "depth exhausted",
            Undecided::BothDiverge => "both sides diverge",
            Undecided::Inconclusive => "inconclusive observations",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AeVerdict {
    EquivUpTo(usize),
    Distinct(AeWitness),
    Unknown(Undecided),
}

/// Bounded check of applicative equivalence between `#⁻¹(a)` and `#⁻¹(b)`.
/// Allocates fresh indeterminates in `table`.
pub fn ae_check(table: &AddressTable, a: Address, b: Address, cfg: AeConfig) -> Result<AeVerdict, DanglingAddress> {
    for x in [a, b] {
        if !table.is_issued(x) {
            return Err(DanglingAddress(x));
        }
    }
    let norm = Normalizer::new(table, cfg.fuel);
    let mut args = Vec::new();
    check(&norm, a, b, cfg, cfg.depth, &mut args)
}

fn check(
    norm: &Normalizer<'_>,
    a: Address,
    b: Address,
    cfg: AeConfig,
    depth: usize,
    args: &mut Vec<Address>,
) -> Result<AeVerdict, DanglingAddress> {
    use Observation::*;
    let table = norm.table();
    if a == b {
        return Ok(AeVerdict::EquivUpTo(cfg.depth));
    }
    let (l, r) = (observe(norm, &table.lookup(a)?), observe(norm, &table.lookup(b)?));
    let distinct = |args: &Vec<Address>| Ok(AeVerdict::Distinct(AeWitness { args: args.clone(), left: l, right: r }));
    match (l, r) {
        (Indeterminate(m), Indeterminate(n)) if m == n => Ok(AeVerdict::EquivUpTo(cfg.depth)),
        (Indeterminate(_), Indeterminate(_)) => distinct(args),
        (Indeterminate(_), OutOfFuel) | (OutOfFuel, Indeterminate(_)) => Ok(AeVerdict::Unknown(Undecided::Fuel)),
        (Indeterminate(_), _) | (_, Indeterminate(_)) => distinct(args),
        (OutOfFuel, _) | (_, OutOfFuel) => Ok(AeVerdict::Unknown(Undecided::Fuel)),
        (Diverges, Diverges) => Ok(AeVerdict::Unknown(Undecided::BothDiverge)),
        (Diverges, Stuck) | (Stuck, Diverges) if cfg.strict_distinct => distinct(args),
        (Diverges, _) | (_, Diverges) => Ok(AeVerdict::Unknown(Undecided::Inconclusive)),
        (Stuck | Final, Stuck | Final) => {
            if norm.eval_equiv(a, b)? == EquivVerdict::Equiv {
                return Ok(AeVerdict::EquivUpTo(cfg.depth));
            }
            if l != Stuck || r != Stuck {
                return Ok(AeVerdict::Unknown(Undecided::Inconclusive));
            }
            if depth == 0 {
                return Ok(AeVerdict::Unknown(Undecided::Depth));
            }
            let x = table.fresh_indeterminate();
            args.push(x);
            let v = check(norm, table.apply(a, x)?, table.apply(b, x)?, cfg, depth - 1, args);
            args.pop();
            v
        }
    }
}
