use std::collections::HashMap;

use qhe_core::scheme::{keygen, keygen_for_columns, SecretKey};
use qhe_core::Gamma;

#[test]
fn permutations_are_uniform_at_q3() {
    let draws = 6000u64;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for seed in 0..draws {
        *counts.entry(keygen_for_columns(3, seed).permutation().images().to_vec()).or_default() += 1;
    }
    assert_eq!(counts.len(), 6);
    let expected = draws as f64 / 6.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99.9% quantile of chi-square with 5 degrees of freedom.
    assert!(chi2 < 20.515, "chi2 = {chi2}");
}

#[test]
fn single_column_key_is_identity() {
    for seed in 0..10 {
        assert!(keygen_for_columns(1, seed).permutation().is_identity());
    }
}

#[test]
fn keys_are_seed_deterministic_and_serializable() {
    let g = Gamma::new(1, 1, 0, 5, 2).unwrap();
    let a = keygen(&g, 99);
    assert_eq!(a.permutation().len(), 7);
    assert_eq!(a.to_json(), keygen(&g, 99).to_json());
    let back = SecretKey::from_json(&a.to_json()).unwrap();
    assert_eq!(back.permutation(), a.permutation());
    assert!(SecretKey::from_json(r#"{"q":3,"perm":[0,0,1]}"#).is_err());
}
