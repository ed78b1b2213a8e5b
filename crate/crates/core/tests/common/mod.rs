//! Random generators shared by the integration tests.
#![allow(dead_code)]

use cuspforge::invariants::{CharacteristicExponents, MultiplicitySequence};
use cuspforge::surface::Configuration;
use proptest::prelude::*;

#[derive(Debug, Clone)]
pub struct PointSpec {
    /// Which owners pass through: index 0 is the tracked curve.
    pub present: Vec<bool>,
    pub curve_seq: Vec<u64>,
    /// Owners with equal class share a tangent direction.
    pub class: Vec<u8>,
    pub extra: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct Spec {
    pub p2: bool,
    pub curve_self_int: i64,
    pub curve_k_dot: i64,
    pub divisors: Vec<i64>,
    pub points: Vec<PointSpec>,
}

fn multseq() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(2u64..6, 0..4).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    })
}

pub fn spec() -> impl Strategy<Value = Spec> {
    (any::<bool>(), -20i64..40, -20i64..20, prop::collection::vec(-4i64..3, 0..4)).prop_flat_map(
        |(p2, curve_self_int, curve_k_dot, divisors)| {
            let owners = divisors.len() + 1;
            let point = (
                prop::collection::vec(any::<bool>(), owners),
                multseq(),
                prop::collection::vec(0u8..3, owners),
                prop::collection::vec(1u64..4, owners * owners),
            )
                .prop_map(|(present, curve_seq, class, extra)| PointSpec { present, curve_seq, class, extra });
            prop::collection::vec(point, 1..5).prop_map(move |points| Spec {
                p2,
                curve_self_int,
                curve_k_dot,
                divisors: divisors.clone(),
                points,
            })
        },
    )
}

pub fn owner_name(i: usize) -> String {
    if i == 0 { "C".to_string() } else { format!("D{i}") }
}

pub fn build(s: &Spec) -> Option<Configuration> {
    let mut cfg = Configuration::new(s.p2);
    cfg.add_tracked("C", s.curve_self_int, s.curve_k_dot).unwrap();
    for (i, &si) in s.divisors.iter().enumerate() {
        cfg.add_divisor(&owner_name(i + 1), si).unwrap();
    }
    let mut added = 0;
    for (pi, p) in s.points.iter().enumerate() {
        let owners: Vec<usize> = (0..p.present.len()).filter(|&i| p.present[i]).collect();
        if owners.is_empty() {
            continue;
        }
        let seq = |i: usize| {
            if i == 0 {
                MultiplicitySequence::new(p.curve_seq.clone()).unwrap()
            } else {
                MultiplicitySequence::smooth()
            }
        };
        let germs: Vec<(String, MultiplicitySequence)> = owners.iter().map(|&i| (owner_name(i), seq(i))).collect();
        let mut meets = Vec::new();
        for (x, &a) in owners.iter().enumerate() {
            for &b in &owners[x + 1..] {
                let prod = seq(a).multiplicity() * seq(b).multiplicity();
                let shared = if p.class[a] == p.class[b] { p.extra[a * p.present.len() + b] } else { 0 };
                meets.push((owner_name(a), owner_name(b), prod + shared));
            }
        }
        cfg.add_point(&format!("P{pi}"), germs, meets).unwrap();
        added += 1;
    }
    (added > 0).then_some(cfg)
}

/// Valid characteristic exponents with `a <= 30`: strictly increasing
/// exponents, each strictly lowering the gcd chain.
pub fn char_exponents() -> impl Strategy<Value = CharacteristicExponents> {
    (2u64..=30, prop::collection::vec(1u64..15, 1..5)).prop_map(|(a, steps)| {
        let mut b = Vec::new();
        let (mut g, mut last) = (a, a);
        for s in steps {
            if g == 1 {
                break;
            }
            let mut next = last + s;
            while num_integer::gcd(g, next) == g {
                next += 1;
            }
            g = num_integer::gcd(g, next);
            last = next;
            b.push(next);
        }
        while g != 1 {
            let mut next = last + 1;
            while num_integer::gcd(g, next) == g {
                next += 1;
            }
            g = num_integer::gcd(g, next);
            last = next;
            b.push(next);
        }
        CharacteristicExponents::new(a, b).unwrap()
    })
}
