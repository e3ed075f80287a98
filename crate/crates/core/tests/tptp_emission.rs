mod common;

use aspv::analysis::InterfaceDecl;
use aspv::fol::{emit_tptp, Dialect, EmitError, EmitOptions};
use aspv::translation::{complete, CompletionOptions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn options(dialect: Dialect) -> EmitOptions {
    EmitOptions {
        dialect,
        int_range: Some((-3, 3)),
    }
}

#[test]
fn checker_self_test() {
    common::tptp_syntax::self_test();
}

#[test]
fn transitive_closure_completion() {
    let program = aspv::syntax::parse_program("t(X,Y) :- e(X,Y).\nt(X,Z) :- t(X,Y), e(Y,Z).").unwrap();
    let decl = InterfaceDecl::new([aspv::syntax::Predicate::new("e", 2)], []).unwrap();
    let theory = complete(&program, &decl, CompletionOptions { force: true, simplify: true }).unwrap();
    for (dialect, count) in [(Dialect::Tff, 4), (Dialect::Fof, 22)] {
        let text = emit_tptp(&theory.named_formulas(), &options(dialect)).unwrap();
        assert_eq!(common::tptp_syntax::check(&text).unwrap(), count, "{text}");
        assert!(text.contains("compdef_t, axiom"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_completions_are_valid_tptp(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::programs::random_tight_program(&mut rng);
        let decl = InterfaceDecl::new(g.inputs.iter().cloned(), []).unwrap();
        let theory = complete(&g.program, &decl, CompletionOptions::default()).unwrap();
        for dialect in [Dialect::Tff, Dialect::Fof] {
            let text = emit_tptp(&theory.named_formulas(), &options(dialect)).unwrap();
            if let Err(e) = common::tptp_syntax::check(&text) {
                panic!("{e}\n{}\n{text}", g.source);
            }
        }
    }

    // Fuzzed programs may be ill-sorted; whatever is emitted must parse.
    #[test]
    fn fuzzed_completions_emit_valid_tptp_or_sort_errors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let source = common::fuzz::random_program_text(&mut rng, 4);
        let program = aspv::syntax::parse_program(&source).unwrap();
        let decl = InterfaceDecl::new([], []).unwrap();
        let theory = complete(&program, &decl, CompletionOptions { force: true, simplify: true }).unwrap();
        for dialect in [Dialect::Tff, Dialect::Fof] {
            match emit_tptp(&theory.named_formulas(), &options(dialect)) {
                Ok(text) => {
                    if let Err(e) = common::tptp_syntax::check(&text) {
                        panic!("{e}\n{source}\n{text}");
                    }
                }
                Err(EmitError::Sort(_) | EmitError::MixedEquality(_)) => {}
                Err(e) => panic!("{e}\n{source}"),
            }
        }
    }
}
