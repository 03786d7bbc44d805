use std::collections::BTreeMap;

use addrvm_core::lambda::{apply_prog, compile, cons, interpret, parse_term, pr, CompileError};
use addrvm_core::reduction::{deep_normalize, Truncation};
use addrvm_core::{combinators, run, AddressTable, Machine, Outcome};

fn xs(t: &AddressTable, n: usize) -> Vec<addrvm_core::Address> {
    (1..=n).map(|i| t.intern(&Machine::indeterminate(i)).unwrap()).collect()
}

#[test]
fn projection_constant_and_apply() {
    let t = AddressTable::new();
    let a = xs(&t, 3);
    assert_eq!(run(&t, &pr(2, 3).append_tape(&a), 100).terminal(), Some(&t.lookup(a[1]).unwrap()));
    let b = t.intern(&combinators::s()).unwrap();
    assert_eq!(run(&t, &cons(b, 2).append_tape(&a[..2]), 100).terminal(), Some(&combinators::s()));

    // ⟨∅ⁿ, #M, #N, ∅, Applyₙ, T⟩ ↠ M ++ T ++ [#(N ++ T)]
    let n = 2;
    let (m, nn) = (combinators::k(), combinators::one());
    let (ma, na) = (t.intern(&m).unwrap(), t.intern(&nn).unwrap());
    let mut regs = vec![None; n + 3];
    regs[n] = Some(ma);
    regs[n + 1] = Some(na);
    let machine = Machine::new(regs, apply_prog(n), a[..n].to_vec()).unwrap();
    let nt = t.intern(&nn.append_tape(&a[..n])).unwrap();
    let expect = m.append_tape(&a[..n]).append_tape(&[nt]);
    let tr = addrvm_core::trace(&t, &machine, 100);
    assert!(tr.states.contains(&expect));
}

#[test]
fn compiled_shapes() {
    let t = AddressTable::new();
    let ctx: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    for src in ["x", "\\w.w y", "x (y z)", "@k"] {
        let tm = parse_term(src, |_| t.intern(&combinators::k()).ok()).unwrap();
        let m = compile(&t, &tm, &ctx).unwrap();
        assert!(m.program().leading_loads() >= 3, "{src}");
        // under-application gets stuck
        let a = xs(&t, 2);
        assert!(matches!(run(&t, &m.append_tape(&a), 100), Outcome::Stuck(_)), "{src}");
    }
    let k = t.intern(&combinators::k()).unwrap();
    let c = compile(&t, &parse_term("@k", |_| Some(k)).unwrap(), &[]).unwrap();
    assert_eq!(c, cons(k, 0));
    assert_eq!(compile(&t, &parse_term("x", |_| None).unwrap(), &[]), Err(CompileError::UnboundVariable("x".into())));
}

#[test]
fn interpretation_examples() {
    let t = AddressTable::new();
    let s = t.intern(&combinators::s()).unwrap();
    let rho = BTreeMap::from([("x".to_string(), s)]);
    let x = interpret(&t, &parse_term("x", |_| None).unwrap(), &rho).unwrap();
    assert_eq!(run(&t, &t.lookup(x).unwrap(), 100).terminal(), Some(&combinators::s()));
    let c = interpret(&t, &parse_term("@s", |_| Some(s)).unwrap(), &BTreeMap::new()).unwrap();
    assert_eq!(run(&t, &t.lookup(c).unwrap(), 100).terminal(), Some(&combinators::s()));
}

#[test]
fn deep_normal_form_of_o_holder_is_truncated() {
    let t = AddressTable::new();
    let o = t.intern(&combinators::o(&t)).unwrap();
    let holder = Machine::new(vec![Some(o)], addrvm_core::Program::empty(), vec![]).unwrap();
    let nf = deep_normalize(&t, &holder, 1_000).unwrap();
    assert_eq!(nf.truncated, Some(Truncation::Cycle));
}
