use std::fs;

use addrvm::format::{self, Document, Fields, Item, Ref};
use addrvm::session::Session;
use addrvm_core::{AddressTable, Instruction, Program};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_']{0,5}"
}

fn reference() -> impl Strategy<Value = Ref> {
    prop_oneof![name().prop_map(Ref::Name), (0usize..50).prop_map(Ref::Raw)]
}

fn program() -> impl Strategy<Value = Program> {
    (
        prop::collection::vec(0usize..6, 0..4),
        prop::collection::vec((0usize..6, 0usize..6, 0usize..6), 0..4),
        prop::option::of(0usize..6),
    )
        .prop_map(|(loads, apps, call)| {
            let instrs = loads
                .into_iter()
                .map(Instruction::Load)
                .chain(apps.into_iter().map(|(i, j, k)| Instruction::App(i, j, k)))
                .chain(call.map(Instruction::Call))
                .collect();
            Program::new(instrs).unwrap()
        })
}

fn fields() -> impl Strategy<Value = Fields> {
    (prop::collection::vec(prop::option::of(reference()), 0..4), program(), prop::collection::vec(reference(), 0..4))
        .prop_map(|(regs, prog, tape)| Fields { regs, prog, tape })
}

fn item() -> impl Strategy<Value = Item> {
    prop_oneof![
        (name(), fields()).prop_map(|(name, fields)| Item::Machine { name, fields }),
        (name(), fields()).prop_map(|(name, fields)| Item::Context { name, fields }),
        (name(), prop::collection::vec(reference(), 0..4)).prop_map(|(name, tape)| Item::Hole { name, tape }),
        (name(), "[ -~\\\\\"λ]{0,12}").prop_map(|(name, source)| Item::Term { name, source }),
    ]
}

fn document() -> impl Strategy<Value = Document> {
    prop::collection::vec(item(), 0..6).prop_map(|items| Document { items })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(doc in document()) {
        let text = format::print(&doc);
        let back = format::parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(format::print(&back), text);
    }

    #[test]
    fn files_round_trip_through_disk(doc in document()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.am");
        fs::write(&path, format::print(&doc)).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        prop_assert_eq!(format::parse(&text).unwrap(), doc);
    }

    #[test]
    fn loading_is_deterministic(doc in document()) {
        let (t1, t2) = (AddressTable::new(), AddressTable::new());
        let (mut s1, mut s2) = (Session::new(&t1), Session::new(&t2));
        prop_assert_eq!(s1.load(&doc), s2.load(&doc));
        prop_assert_eq!(t1.entries(), t2.entries());
    }
}
