mod common;

use common::{build, spec};
use cuspforge::surface::check_blowup_laws;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn blow_down_inverts_blow_up(s in spec()) {
        let Some(cfg) = build(&s) else { return Ok(()) };
        for p in cfg.points().keys() {
            let up = cfg.blow_up(p, "E").unwrap();
            prop_assert_eq!(check_blowup_laws(&cfg, p, &up, "E"), Ok(()));
            let down = up.blow_down("E").unwrap();
            prop_assert_eq!(&down, &cfg, "round trip at {}", p);
            prop_assert_eq!(up.adjunction_ledger(), cfg.adjunction_ledger());
        }
    }
}

#[test]
fn generated_configurations_are_nontrivial() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = spec();
    let mut with_shared_tangent = 0;
    for _ in 0..200 {
        let s = strategy.new_tree(&mut runner).unwrap().current();
        if let Some(cfg) = build(&s) {
            with_shared_tangent += cfg
                .points()
                .values()
                .filter(|p| p.pairs().any(|(a, b, m)| m > p.multiplicity(a).unwrap() * p.multiplicity(b).unwrap()))
                .count();
        }
    }
    assert!(with_shared_tangent > 20);
}
