mod common;

use std::collections::BTreeMap;

use addrvm_core::ae::{ae_check, AeConfig, AeVerdict};
use addrvm_core::context::{ExtAddress, ExtMachine, ExtTable};
use addrvm_core::lambda::{interpret, parse_term, Term};
use addrvm_core::reduction::{c_successors, Normalizer};
use addrvm_core::{bigstep, eval_equiv, parse_program, run, step, AddressTable, EquivVerdict, Machine, Outcome};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn programs_print_and_parse_back(seed in any::<u64>()) {
        let t = AddressTable::new();
        let m = random_machine(&mut rng(seed), &pool(&t));
        let text = m.program().to_string();
        prop_assert_eq!(&parse_program(&text).unwrap(), m.program());
    }

    #[test]
    fn interning_is_a_bijection(seeds in proptest::collection::vec(any::<u64>(), 1..20)) {
        let t = AddressTable::new();
        let p = pool(&t);
        let ms: Vec<Machine> = seeds.iter().map(|&s| random_machine(&mut rng(s), &p)).collect();
        for a in &ms {
            for b in &ms {
                prop_assert_eq!(a == b, intern(&t, a) == intern(&t, b));
            }
            prop_assert_eq!(&t.lookup(intern(&t, a)).unwrap(), a);
        }
        for (a, m) in t.entries() {
            prop_assert!(m.addresses().all(|r| r < a));
        }
    }

    #[test]
    fn run_and_bigstep_agree(seed in any::<u64>(), fuel in 0usize..40) {
        let t = AddressTable::new();
        let m = random_machine(&mut rng(seed), &pool(&t));
        let (small, big) = (run(&t, &m, fuel), bigstep(&t, &m, fuel));
        match (&small, &big) {
            (Outcome::OutOfFuel(_), Outcome::OutOfFuel(_)) | (Outcome::Cycle(..), Outcome::Cycle(..)) => {}
            _ => prop_assert_eq!(small, big),
        }
    }

    #[test]
    fn head_step_is_one_of_the_c_successors(seed in any::<u64>()) {
        let t = AddressTable::new();
        let m = random_machine(&mut rng(seed), &pool(&t));
        let succ = c_successors(&t, &m);
        match step(&t, &m) {
            Some(n) => prop_assert_eq!(&succ[0], &n),
            None => prop_assert!(succ.iter().all(|n| n.program() == m.program())),
        }
    }

    #[test]
    fn reductions_preserve_evaluation_class(seed in any::<u64>()) {
        let t = AddressTable::new();
        let m = random_machine(&mut rng(seed), &pool(&t));
        let norm = Normalizer::new(&t, 500);
        let a = intern(&t, &m);
        for n in c_successors(&t, &m) {
            let v = norm.eval_equiv(a, intern(&t, &n)).unwrap();
            prop_assert!(!matches!(v, EquivVerdict::Distinct(_)), "{} vs {}: {:?}", m, n, v);
        }
    }

    #[test]
    fn eval_equiv_is_symmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = AddressTable::new();
        let p = pool(&t);
        let a = intern(&t, &random_machine(&mut rng(s1), &p));
        let b = intern(&t, &random_machine(&mut rng(s2), &p));
        let ab = eval_equiv(&t, a, b, 300).unwrap();
        let ba = eval_equiv(&t, b, a, 300).unwrap();
        prop_assert_eq!(ab == EquivVerdict::Equiv, ba == EquivVerdict::Equiv);
        prop_assert_eq!(matches!(ab, EquivVerdict::Distinct(_)), matches!(ba, EquivVerdict::Distinct(_)));
        prop_assert_eq!(eval_equiv(&t, a, a, 300).unwrap(), EquivVerdict::Equiv);
    }

    #[test]
    fn eval_equivalence_implies_no_ae_distinction(s1 in any::<u64>()) {
        let t = AddressTable::new();
        let p = pool(&t);
        let m = random_machine(&mut rng(s1), &p);
        let a = intern(&t, &m);
        if let Outcome::Final(n) | Outcome::Stuck(n) = run(&t, &m, 200) {
            let b = intern(&t, &n);
            let cfg = AeConfig { fuel: 300, depth: 2, strict_distinct: true };
            let v = ae_check(&t, a, b, cfg).unwrap();
            prop_assert!(matches!(v, AeVerdict::EquivUpTo(_)), "{:?}", v);
        }
    }

    #[test]
    fn ae_distinct_witnesses_replay(s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = AddressTable::new();
        let p = pool(&t);
        let a = intern(&t, &random_machine(&mut rng(s1), &p));
        let b = intern(&t, &random_machine(&mut rng(s2), &p));
        let cfg = AeConfig { fuel: 300, depth: 2, strict_distinct: false };
        if let AeVerdict::Distinct(w) = ae_check(&t, a, b, cfg).unwrap() {
            prop_assert!(w.replay(&t, a, b, cfg.fuel).unwrap());
        }
    }

    #[test]
    fn plug_commutes_with_append(seed in any::<u64>()) {
        let t = AddressTable::new();
        let base = pool(&t);
        let e = ExtTable::new(&t);
        let h = e.intern(&ExtMachine::hole()).unwrap();
        let mut ext: Vec<ExtAddress> = base.iter().map(|&a| ExtAddress::Base(a)).collect();
        ext.push(h);
        let mut r = rng(seed);
        let (regs, prog, tape) = random_parts(&mut r, &ext);
        let c = ExtMachine::plain(regs, prog, tape).unwrap();
        let m = random_machine(&mut r, &base);
        let a = base[seed as usize % base.len()];
        let lhs = e.plug(&c.append_tape(&[ExtAddress::Base(a)]), &m).unwrap();
        prop_assert_eq!(lhs, e.plug(&c, &m).unwrap().append_tape(&[a]));
        if e.occ(&c).unwrap() == 0 {
            prop_assert_eq!(Some(e.plug(&c, &m).unwrap()), c.as_base());
        }
    }
}

#[test]
fn interpretation_ignores_variable_order() {
    let t = AddressTable::new();
    let p = pool(&t);
    let tm = parse_term("\\w.x (w y) z", |_| None).unwrap();
    let rho: BTreeMap<String, _> =
        [("x", p[0]), ("y", p[1]), ("z", p[6])].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let sorted = interpret(&t, &tm, &rho).unwrap();
    let cfg = AeConfig { fuel: 1_000, depth: 3, strict_distinct: false };
    for order in [["z", "y", "x"], ["y", "x", "z"], ["x", "z", "y"]] {
        let ctx: Vec<String> = order.iter().map(|s| s.to_string()).collect();
        let args: Vec<_> = order.iter().map(|v| rho[*v]).collect();
        let m = addrvm_core::lambda::compile(&t, &tm, &ctx).unwrap().append_tape(&args);
        let v = ae_check(&t, sorted, intern(&t, &m), cfg).unwrap();
        assert!(matches!(v, AeVerdict::EquivUpTo(_)), "{order:?}: {v:?}");
    }
}

#[test]
fn beta_equal_closed_terms_are_ae_equivalent() {
    let t = AddressTable::new();
    let k = intern(&t, &addrvm_core::combinators::k());
    let x1 = intern(&t, &Machine::indeterminate(1));
    let consts = |n: &str| match n {
        "k" => Some(k),
        "a" => Some(x1),
        _ => None,
    };
    let pairs = [
        ("(\\x y.x) @a @k", "@a"),
        ("(\\f.f @a) (\\x.x)", "@a"),
        ("(\\x y z.x z (y z)) (\\x y.x) (\\x y.x) @a", "@a"),
        ("(\\x.x x) (\\y.y) @k", "@k"),
    ];
    for (l, r) in pairs {
        let (lt, rt) = (parse_term(l, consts).unwrap(), parse_term(r, consts).unwrap());
        assert_eq!(lt.beta_normalize(100), rt.beta_normalize(100));
        let none = BTreeMap::new();
        let (a, b) = (interpret(&t, &lt, &none).unwrap(), interpret(&t, &rt, &none).unwrap());
        let v = ae_check(&t, a, b, AeConfig::default()).unwrap();
        assert!(matches!(v, AeVerdict::EquivUpTo(_)), "{l}: {v:?}");
        assert!(matches!(rt, Term::Const(_)));
    }
}
