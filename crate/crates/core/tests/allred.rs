use std::collections::BTreeSet;

use aspv::analysis::InterfaceDecl;
use aspv::fol::{GroundAtom, Value};
use aspv::oracle::{crosscheck, Domain, OracleLimits};
use aspv::syntax::{parse_program, Predicate};

#[test]
fn allred_family() {
    let program = parse_program("allred :- red(X) : vertex(X).").unwrap();
    let decl = InterfaceDecl::new([Predicate::new("red", 1), Predicate::new("vertex", 1)], []).unwrap();
    for n in 0..=3i64 {
        let domain = Domain::new(Vec::<String>::new(), (n > 0).then_some((1, n)));
        for mask in 0..1u32 << n {
            let mut facts: BTreeSet<GroundAtom> = (1..=n).map(|v| GroundAtom::new("vertex", vec![Value::Int(v)])).collect();
            let red: Vec<i64> = (1..=n).filter(|v| mask & (1 << (v - 1)) != 0).collect();
            facts.extend(red.iter().map(|&v| GroundAtom::new("red", vec![Value::Int(v)])));
            let report = crosscheck(&program, &decl, &domain, &facts, OracleLimits::default()).unwrap();
            assert!(report.equal, "n={n} red={red:?}");
            let mut expected = facts.clone();
            if red.len() as i64 == n {
                expected.insert(GroundAtom::new("allred", vec![]));
            }
            assert_eq!(report.stable_models, BTreeSet::from([expected]), "n={n} red={red:?}");
        }
    }
}
