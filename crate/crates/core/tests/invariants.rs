//! Randomized structural invariants of the word algebra, the sum container,
//! and single-gate application.

use pauli_prop::circuits::Circuit;
use pauli_prop::propagation::propagate;
use pauli_prop::{PauliWord, Sum, Truncation, Word};
use proptest::prelude::*;

const N: usize = 12;

fn word_strategy() -> impl Strategy<Value = Word> {
    (0..(1u128 << (2 * N))).prop_map(|v| Word::from_value(N, v))
}

proptest! {
    #[test]
    fn set_get_round_trip(w in word_strategy(), site in 1..=N, code in 0u8..=3) {
        let w2 = w.with_code(site, code);
        prop_assert_eq!(w2.code(site), code);
        for s in 1..=N {
            if s != site {
                prop_assert_eq!(w2.code(s), w.code(s));
            }
        }
    }

    #[test]
    fn parse_display_round_trip(w in word_strategy()) {
        let text = w.to_string();
        prop_assert_eq!(PauliWord::parse(&text).unwrap(), w);
    }

    #[test]
    fn product_is_xor_with_composing_phase(a in word_strategy(), b in word_strategy()) {
        let (ab, pab) = a.product(&b).unwrap();
        let (ba, pba) = b.product(&a).unwrap();
        prop_assert_eq!(ab.value().unwrap(), a.value().unwrap() ^ b.value().unwrap());
        prop_assert_eq!(ab, ba);
        // commuting words share the phase, anticommuting words differ by i^2
        let delta = (4 + pab.exponent() - pba.exponent()) % 4;
        if a.commutes(&b).unwrap() {
            prop_assert_eq!(delta, 0);
        } else {
            prop_assert_eq!(delta, 2);
        }
        // P^2 = I with no phase
        let (sq, psq) = a.product(&a).unwrap();
        prop_assert!(sq.is_identity());
        prop_assert_eq!(psq.exponent(), 0);
    }

    #[test]
    fn weight_identities(w in word_strategy()) {
        let ys = (1..=N).filter(|&s| w.code(s) == 2).count() as u32;
        prop_assert_eq!(w.xy_weight() + w.yz_weight(), w.weight() + ys);
        prop_assert!(w.weight() <= N as u32);
        prop_assert_eq!(w.weight() == 0, w.is_identity());
    }

    #[test]
    fn sum_merging_and_truncation_bookkeeping(
        entries in proptest::collection::vec(
            ((0..(1u128 << (2 * N))), -1.0f64..1.0), 1..40),
        floor in 0.0f64..0.5,
    ) {
        let mut s = Sum::new(N);
        for (v, c) in &entries {
            s.add(Word::from_value(N, *v), *c).unwrap();
        }
        // no exact zeros survive merging
        for (_, c) in s.iter() {
            prop_assert!(*c != 0.0);
        }
        let before = s.norms();
        let cfg = Truncation::none().with_min_abs_coeff(floor);
        let (l1, l2sq) = s.truncate(&cfg).unwrap();
        let after = s.norms();
        prop_assert!((after.l1 + l1 - before.l1).abs() < 1e-12);
        prop_assert!((after.l2sq + l2sq - before.l2sq).abs() < 1e-12);
        for (_, c) in s.iter() {
            prop_assert!(c.abs() >= floor);
        }
    }

    #[test]
    fn unitary_gates_preserve_l2(
        v in 1..(1u128 << 8),
        theta in -3.0f64..3.0,
        clifford in 0usize..4,
    ) {
        let n = 4;
        let mut circ = Circuit::new(n);
        circ.push_clifford(["H", "S", "CNOT", "SWAP"][clifford],
            if clifford < 2 { vec![2] } else { vec![2, 3] }).unwrap();
        circ.push_fixed_rotation(vec![1, 3], vec![1, 2], theta).unwrap();
        let init = Sum::single(Word::from_value(n, v), 1.0);
        let (out, report) = propagate(&circ, init, &[], &Truncation::none()).unwrap();
        prop_assert!((out.norms().l2sq - 1.0).abs() < 1e-12);
        prop_assert_eq!(report.delta_l1, 0.0);
    }

    #[test]
    fn rotation_angle_periodicity(v in 1..(1u128 << 8), theta in -3.0f64..3.0) {
        let n = 4;
        let mut circ = Circuit::new(n);
        circ.push_rotation(vec![1], vec![2]).unwrap();
        circ.push_rotation(vec![3, 3], vec![2, 4]).unwrap();
        let init = Sum::single(Word::from_value(n, v), 1.0);
        let (a, _) = propagate(&circ, init.clone(), &[theta, 0.5 * theta], &Truncation::none()).unwrap();
        let shifted = [theta + 2.0 * std::f64::consts::PI, 0.5 * theta];
        let (b, _) = propagate(&circ, init, &shifted, &Truncation::none()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (w, c) in a.iter() {
            prop_assert!((b.get_coeff(w) - c).abs() < 1e-12);
        }
    }
}
