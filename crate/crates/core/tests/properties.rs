use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use qpsi_core::density::{average_density, DensityMatrix};
use qpsi_core::encoding::{gcd, mask_set, BinaryMask, PrivateSet};
use qpsi_core::engine::{run_multi_party, run_two_party, Overrides, ProtocolConfig};
use qpsi_core::keygen::{acceptance_probability, KeygenConfig};
use qpsi_core::qotp::{cnot_key_update, decrypt_pauli, encrypt, KeyPair2, PauliKey};
use qpsi_core::state::{Basis, Gate, StateVector, TOLERANCE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let raw: Vec<Complex64> =
        (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    (0..4u8, 0..n, 0..n).prop_filter_map("distinct wires", move |(k, t, c)| match k {
        0 => Some(Gate::x(t)),
        1 => Some(Gate::z(t)),
        2 => Some(Gate::h(t)),
        _ if c != t => Some(Gate::cnot(c, t)),
        _ => None,
    })
}

/// Oracle: plain fold over sets.
fn oracle(sets: &[BTreeSet<u64>]) -> (usize, usize) {
    let inter = sets[1..].iter().fold(sets[0].clone(), |acc, s| acc.intersection(s).copied().collect());
    let union: BTreeSet<u64> = sets.iter().flatten().copied().collect();
    (inter.len(), union.len())
}

fn set_strategy(q: u64) -> impl Strategy<Value = BTreeSet<u64>> {
    proptest::collection::btree_set(0..q, 0..=q as usize)
}

proptest! {
    #[test]
    fn gates_preserve_norm_and_are_involutions(n in 2usize..5, seed in any::<u64>(), g in gate_strategy(2)) {
        let s = random_state(n, seed);
        let once = s.apply_gate(g).unwrap();
        prop_assert!((once.norm_sqr() - 1.0).abs() < TOLERANCE);
        let twice = once.apply_gate(g).unwrap();
        prop_assert!(twice.max_deviation(&s) < TOLERANCE);
    }

    #[test]
    fn masking_is_a_bijection_preserving_cardinalities(
        q in prop::sample::select(vec![5u64, 7, 11, 13, 16, 21]),
        k_raw in 1u64..64,
        a in set_strategy(21),
        b in set_strategy(21),
    ) {
        prop_assume!(gcd(k_raw % q, q) == 1);
        let k = k_raw % q;
        let a: BTreeSet<u64> = a.into_iter().filter(|&x| x < q).collect();
        let b: BTreeSet<u64> = b.into_iter().filter(|&x| x < q).collect();
        let full = PrivateSet::new(q, 0..q).unwrap();
        prop_assert_eq!(mask_set(&full, k).unwrap().len(), q as usize);
        let ma = mask_set(&PrivateSet::new(q, a.clone()).unwrap(), k).unwrap();
        let mb = mask_set(&PrivateSet::new(q, b.clone()).unwrap(), k).unwrap();
        prop_assert_eq!(oracle(&[a, b]), oracle(&[ma.elements().clone(), mb.elements().clone()]));
    }

    #[test]
    fn non_units_are_rejected(q in 4u64..40, k in 0u64..40) {
        prop_assume!(gcd(k % q, q) != 1);
        prop_assert!(mask_set(&PrivateSet::new(q, [1]).unwrap(), k % q).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_party_matches_oracle(q in prop::sample::select(vec![5u64, 7, 11]), a in set_strategy(11), b in set_strategy(11), seed in any::<u64>()) {
        let a: BTreeSet<u64> = a.into_iter().filter(|&x| x < q).collect();
        let b: BTreeSet<u64> = b.into_iter().filter(|&x| x < q).collect();
        let pa = PrivateSet::new(q, a.clone()).unwrap();
        let pb = PrivateSet::new(q, b.clone()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let r = run_two_party(&pa, &pb, &ProtocolConfig::default(), &mut rng).unwrap();
        prop_assert_eq!((r.intersection_cardinality, r.union_cardinality), oracle(&[a, b]));
        prop_assert_eq!(r.counts.groups[0].total(), q as usize);
        prop_assert_eq!(r.xor_mismatches(), 0);
    }

    #[test]
    fn multi_party_matches_oracle(m in 2usize..7, seed in any::<u64>(), raw in proptest::collection::vec(set_strategy(7), 6)) {
        let sets: Vec<BTreeSet<u64>> = raw.into_iter().take(m).collect();
        let private: Vec<PrivateSet> = sets.iter().map(|s| PrivateSet::new(7, s.clone()).unwrap()).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let r = run_multi_party(&private, &ProtocolConfig::default(), &mut rng).unwrap();
        prop_assert_eq!((r.intersection_cardinality, r.union_cardinality), oracle(&sets));
        prop_assert_eq!(r.groups.len(), m.div_ceil(2));
    }

    #[test]
    fn multi_party_with_two_users_is_the_two_party_protocol(a in set_strategy(7), b in set_strategy(7), seed in any::<u64>()) {
        let pa = PrivateSet::new(7, a).unwrap();
        let pb = PrivateSet::new(7, b).unwrap();
        let two = run_two_party(&pa, &pb, &ProtocolConfig::default(), &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        let multi = run_multi_party(&[pa, pb], &ProtocolConfig::default(), &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(two.intersection_cardinality, multi.intersection_cardinality);
        prop_assert_eq!(two.union_cardinality, multi.union_cardinality);
        prop_assert_eq!(two.counts, multi.counts);
    }

    #[test]
    fn counts_do_not_depend_on_mask_or_pads(
        a in set_strategy(7), b in set_strategy(7),
        mask_bits in proptest::collection::vec(any::<bool>(), 14),
        pad_bits in proptest::collection::vec(any::<bool>(), 56),
        seed in any::<u64>(),
    ) {
        let pa = PrivateSet::new(7, a).unwrap();
        let pb = PrivateSet::new(7, b).unwrap();
        let pads = |off: usize| -> Vec<KeyPair2> { (0..7).map(|j| KeyPair2::new(pad_bits[off + 2 * j], pad_bits[off + 2 * j + 1])).collect() };
        let run = |mask: BinaryMask, pa_: Vec<KeyPair2>, pb_: Vec<KeyPair2>, s: u64| {
            let config = ProtocolConfig {
                overrides: Overrides { multiplier: Some(3), masks: Some(vec![mask]), pads: Some(vec![(pa_, pb_)]) },
                ..ProtocolConfig::default()
            };
            run_two_party(&pa, &pb, &config, &mut ChaCha20Rng::seed_from_u64(s)).unwrap().counts
        };
        let first = run(BinaryMask::new(mask_bits[..7].to_vec()), pads(0), pads(14), seed);
        let second = run(BinaryMask::new(mask_bits[7..].to_vec()), pads(28), pads(42), seed.wrapping_add(1));
        prop_assert_eq!(first, second);
    }
}

fn basis_states() -> Vec<StateVector> {
    [[false, false], [false, true], [true, false], [true, true]]
        .iter()
        .map(|b| StateVector::from_bits(b).unwrap())
        .collect()
}

#[test]
fn cnot_key_update_matches_direct_simulation() {
    let mut worst: f64 = 0.0;
    for n in 0..16u8 {
        let kc = PauliKey::new(n & 1 != 0, n & 2 != 0);
        let kt = PauliKey::new(n & 4 != 0, n & 8 != 0);
        let (uc, ut) = cnot_key_update(kc, kt);
        for plain in basis_states() {
            let enc = encrypt(&plain, &[kc, kt], &[0, 1]).unwrap();
            let evaluated = enc.apply_gate(Gate::cnot(0, 1)).unwrap();
            let dec = decrypt_pauli(&evaluated, &[uc, ut], &[0, 1]).unwrap();
            let want = plain.apply_gate(Gate::cnot(0, 1)).unwrap();
            worst = worst.max(dec.max_deviation(&want));
        }
    }
    assert!(worst < TOLERANCE, "max deviation {worst}");
}

#[test]
fn encrypted_basis_states_are_maximally_mixed() {
    let quarter = DensityMatrix::maximally_mixed(4);
    for plain in basis_states() {
        let x_only: Vec<(f64, StateVector)> = (0..4u8)
            .map(|n| (0.25, encrypt(&plain, &KeyPair2::new(n & 1 != 0, n & 2 != 0).as_pauli(), &[0, 1]).unwrap()))
            .collect();
        assert!(average_density(&x_only).unwrap().max_deviation(&quarter) < TOLERANCE);

        let full: Vec<(f64, StateVector)> = (0..16u8)
            .map(|n| {
                let keys = [PauliKey::new(n & 1 != 0, n & 2 != 0), PauliKey::new(n & 4 != 0, n & 8 != 0)];
                (1.0 / 16.0, encrypt(&plain, &keys, &[0, 1]).unwrap())
            })
            .collect();
        assert!(average_density(&full).unwrap().max_deviation(&quarter) < TOLERANCE);
    }
}

#[test]
fn sampled_frequencies_stay_within_three_sigma() {
    let shots = 4096;
    let mut rng = ChaCha20Rng::seed_from_u64(2048);
    for seed in 0..4 {
        let s = random_state(3, seed);
        for basis in [Basis::Z, Basis::X] {
            let exact = s.measurement_distribution(&[0, 2], basis).unwrap();
            let mut seen = std::collections::BTreeMap::new();
            for _ in 0..shots {
                let (o, _) = s.measure(&[0, 2], basis, &mut rng).unwrap();
                *seen.entry(o).or_insert(0usize) += 1;
            }
            for (o, p) in &exact {
                let got = *seen.get(o).unwrap_or(&0) as f64 / shots as f64;
                let sigma = (p * (1.0 - p) / shots as f64).sqrt();
                assert!((got - p).abs() <= 3.0 * sigma + 1e-9, "{o:?}: {got} vs {p}");
            }
            assert!(seen.keys().all(|o| exact.contains_key(o)));
        }
    }
}

#[test]
fn substituted_sources_are_rejected_given_enough_test_rounds() {
    // the weakest 10% deviation hits only one of the two same-basis cases
    let deviations = [(0.1, 0.0), (0.0, 0.1), (0.1, 0.1), (0.0, 0.5)];
    for q in [5usize, 7, 11, 13] {
        let mut cfg = KeygenConfig::new(q);
        assert_eq!(cfg.test_fraction, 0.125);
        // 0.975^T <= 1e-6 needs T >= 546 test rounds
        cfg.delta = 8 * 546 - 4 * q;
        assert!(cfg.test_rounds() >= 546);
        for (zz, xx) in deviations {
            let rejected = 1.0 - acceptance_probability(&cfg, zz, xx);
            assert!(rejected >= 1.0 - 1e-6, "q={q} zz={zz} xx={xx}: {rejected}");
        }
        // the default budget still rejects the |000> substitution most of the time
        let default = KeygenConfig::new(q);
        assert!(1.0 - acceptance_probability(&default, 0.0, 0.5) > 0.97);
    }
}
