use proptest::prelude::*;

use twoelec::ci::apply_operator;
use twoelec::entanglement::{partial_trace_terms, von_neumann_entropy};
use twoelec::spinmodel::{ground_state_entropy, ground_state_entropy_closed_form, SpinPairParams};

/// Sign and result of `ops` applied right to left.
fn apply_string(det: u64, ops: &[(usize, bool)]) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    let mut d = det;
    for &(p, create) in ops.iter().rev() {
        let (s, next) = apply_operator(d, p, create)?;
        sign *= s;
        d = next;
    }
    Some((sign, d))
}

fn two_electron_state(n_modes: usize) -> impl Strategy<Value = Vec<(u64, f64)>> {
    let pairs: Vec<u64> = (0..n_modes)
        .flat_map(|a| ((a + 1)..n_modes).map(move |b| (1u64 << a) | (1u64 << b)))
        .collect();
    let n = pairs.len();
    proptest::collection::vec(-1.0..1.0f64, n)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            pairs
                .iter()
                .copied()
                .zip(v.iter().map(|x| x / norm))
                .collect()
        })
}

proptest! {
    #[test]
    fn canonical_anticommutation(det in 0u64..256, p in 0usize..8, q in 0usize..8) {
        // {a_p, a†_q} |det⟩ = δ_pq |det⟩
        let mut total = std::collections::BTreeMap::new();
        for ops in [[(p, false), (q, true)], [(q, true), (p, false)]] {
            if let Some((s, d)) = apply_string(det, &ops) {
                *total.entry(d).or_insert(0.0) += s;
            }
        }
        total.retain(|_, v: &mut f64| *v != 0.0);
        if p == q {
            prop_assert_eq!(total.len(), 1);
            prop_assert_eq!(total.get(&det).copied(), Some(1.0));
        } else {
            prop_assert!(total.is_empty());
        }
    }

    #[test]
    fn reduced_densities_are_states(terms in two_electron_state(6), a in 0usize..6, b in 0usize..6) {
        let keep: Vec<usize> = if a == b { vec![a] } else { vec![a, b] };
        let rdm = partial_trace_terms(6, terms.iter().copied(), &keep).unwrap();
        prop_assert!((rdm.trace() - 1.0).abs() < 1e-12);
        let s = von_neumann_entropy(&rdm.matrix).unwrap();
        prop_assert!(s >= 0.0 && s <= keep.len() as f64 + 1e-12);
        // the complement of a pure state carries the same entropy
        let rest: Vec<usize> = (0..6).filter(|m| !keep.contains(m)).collect();
        let other = partial_trace_terms(6, terms.iter().copied(), &rest).unwrap();
        prop_assert!((von_neumann_entropy(&other.matrix).unwrap() - s).abs() < 1e-9);
    }

    #[test]
    fn ising_entropy_depends_only_on_ratio(j in -5.0..5.0f64, b in 0.01..5.0f64, scale in 0.1..10.0f64) {
        let s = ground_state_entropy_closed_form(j / b);
        prop_assert!((0.0..=1.0).contains(&s));
        let scaled = ground_state_entropy(&SpinPairParams::ising(j * scale, b * scale)).unwrap();
        prop_assert!((scaled - s).abs() < 1e-9);
    }
}
