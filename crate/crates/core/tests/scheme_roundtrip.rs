use num_complex::Complex64;
use qhe_core::backend::{Backend, CipherState, MixturePolicy};
use qhe_core::circuit::{parse_circuit, random_clifford_circuit, random_clifford_t_circuit, Circuit};
use qhe_core::density::{trace_norm_distance, DensityMatrix};
use qhe_core::pauli::GridIndex;
use qhe_core::permutation::ColumnPermutation;
use qhe_core::scheme::{
    assemble_input, decrypt, encrypt, encrypt_with, evaluate, gate_counts, keygen, keygen_for_columns, magic_density,
    DecryptMode, PlainState, SecretKey,
};
use qhe_core::{Error, Gamma};

const BACKENDS: [Backend; 2] = [Backend::Oracle, Backend::Pauli];

fn run(gamma: &Gamma, key: &SecretKey, psi: &PlainState, circuit: &Circuit, backend: Backend) -> qhe_core::scheme::Decryption {
    let block = assemble_input(psi, gamma).unwrap();
    let ct = encrypt(key, &block, backend).unwrap();
    let ct = evaluate(circuit, &ct).unwrap();
    decrypt(key, &ct, DecryptMode::Exact).unwrap()
}

fn dist(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    trace_norm_distance(a, b).unwrap()
}

#[test]
fn empty_circuit_round_trip_every_key() {
    let g = Gamma::new(1, 1, 0, 5, 1).unwrap();
    let psi = PlainState::random_pure(1, 17);
    for perm in ColumnPermutation::all(g.q()) {
        let key = SecretKey::from_permutation(perm);
        let dec = run(&g, &key, &psi, &Circuit::empty(1), Backend::Pauli);
        assert_eq!(dec.branches.len(), 1);
        assert_eq!(dec.primary().f, 1);
        assert!(dist(&dec.primary().rho_out, psi.density()) < 1e-9);
    }
    for seed in 0..20 {
        let key = keygen(&g, seed);
        let dec = run(&g, &key, &psi, &Circuit::empty(1), Backend::Oracle);
        assert!(dist(&dec.primary().rho_out, psi.density()) < 1e-9);
    }
}

#[test]
fn hadamard_and_cnot_examples() {
    let g = Gamma::new(1, 1, 0, 5, 1).unwrap();
    let plus = PlainState::preset("plus", 1).unwrap();
    for backend in BACKENDS {
        let dec = run(&g, &keygen(&g, 4), &PlainState::preset("zero", 1).unwrap(), &parse_circuit("H 0", 1).unwrap(), backend);
        assert_eq!(dec.primary().f, 1);
        assert!(dist(&dec.primary().rho_out, plus.density()) < 1e-9);
    }
    let g2 = Gamma::new(1, 2, 0, 5, 1).unwrap();
    // qubit 0 set: |10> in qubit order is basis index 1
    let one_zero = PlainState::from_density(DensityMatrix::basis_state(2, 1).unwrap()).unwrap();
    let one_one = DensityMatrix::basis_state(2, 3).unwrap();
    for backend in BACKENDS {
        let dec = run(&g2, &keygen(&g2, 8), &one_zero, &parse_circuit("CNOT 0 1", 2).unwrap(), backend);
        assert!(dist(&dec.primary().rho_out, &one_one) < 1e-9);
    }
}

#[test]
fn clifford_output_independent_of_key() {
    let g = Gamma::new(1, 1, 0, 5, 1).unwrap();
    let psi = PlainState::random_pure(1, 3);
    let c = random_clifford_circuit(1, 12, 5);
    let expected = c.apply_to(psi.density()).unwrap();
    for perm in ColumnPermutation::all(g.q()) {
        let dec = run(&g, &SecretKey::from_permutation(perm), &psi, &c, Backend::Pauli);
        assert!(dist(&dec.primary().rho_out, &expected) < 1e-9);
    }
}

#[test]
fn clifford_completeness_small_corpus() {
    for r in 1..=2 {
        let g = Gamma::new(1, r, 0, 5, 1).unwrap();
        for seed in 0..6 {
            let psi = PlainState::random_pure(r, 100 + seed);
            let c = random_clifford_circuit(r, (seed as usize * 3) % 21, seed);
            let expected = c.apply_to(psi.density()).unwrap();
            for backend in BACKENDS {
                if backend == Backend::Oracle && r == 2 && seed > 1 {
                    continue;
                }
                let dec = run(&g, &keygen(&g, seed), &psi, &c, backend);
                assert!(dist(&dec.primary().rho_out, &expected) < 1e-9, "r={r} seed={seed} {backend}");
            }
        }
    }
}

#[test]
fn t_gate_teleportation_is_heralded() {
    let g = Gamma::new(1, 1, 1, 5, 1).unwrap();
    let plus = PlainState::preset("plus", 1).unwrap();
    let c = parse_circuit("T 0", 1).unwrap();
    for backend in BACKENDS {
        let dec = run(&g, &keygen(&g, 2), &plus, &c, backend);
        assert_eq!(dec.branches.len(), 2);
        assert!((dec.success_probability() - 0.5).abs() < 1e-12);
        let out = dec.conditional_output().unwrap().unwrap();
        assert!(dist(&out, &magic_density()) < 1e-9);
        let fail = dec.branches.iter().find(|b| b.result.f == 0).unwrap();
        assert_eq!(fail.result.failures, vec![1]);
        assert_eq!(fail.result.selected_copy, None);
    }
}

#[test]
fn two_t_gates_succeed_with_probability_one_quarter() {
    let g = Gamma::new(1, 1, 2, 5, 1).unwrap();
    let psi = PlainState::random_pure(1, 31);
    let c = parse_circuit("H 0\nT 0\nS 0\nT 0\nH 0", 1).unwrap();
    let expected = c.apply_to(psi.density()).unwrap();
    let dec = run(&g, &keygen(&g, 9), &psi, &c, Backend::Pauli);
    assert!((dec.success_probability() - 0.25).abs() < 1e-12);
    assert!(dist(&dec.conditional_output().unwrap().unwrap(), &expected) < 1e-9);
}

#[test]
fn copies_amplify_success() {
    let c = parse_circuit("T 0", 1).unwrap();
    let psi = PlainState::random_pure(1, 2);
    let expected = c.apply_to(psi.density()).unwrap();
    for b in 1..=3 {
        let g = Gamma::new(b, 1, 1, 5, 1).unwrap();
        let dec = run(&g, &keygen(&g, b as u64), &psi, &c, Backend::Pauli);
        assert!((dec.failure_probability() - 0.5f64.powi(b as i32)).abs() < 1e-12);
        assert!(dist(&dec.conditional_output().unwrap().unwrap(), &expected) < 1e-9);
        for branch in &dec.branches {
            if let Some(alpha) = branch.result.selected_copy {
                assert_eq!(branch.result.failures[alpha], 0);
                assert!(branch.result.failures[..alpha].iter().all(|&c| c >= 1));
            }
        }
    }
}

#[test]
fn sampled_decryption_is_reproducible() {
    let g = Gamma::new(2, 1, 1, 5, 1).unwrap();
    let block = assemble_input(&PlainState::preset("plus", 1).unwrap(), &g).unwrap();
    let key = keygen(&g, 3);
    let ct = evaluate(&parse_circuit("T 0", 1).unwrap(), &encrypt(&key, &block, Backend::Pauli).unwrap()).unwrap();
    let a = decrypt(&key, &ct, DecryptMode::Sampled { seed: 5 }).unwrap();
    let b = decrypt(&key, &ct, DecryptMode::Sampled { seed: 5 }).unwrap();
    assert_eq!(a.branches.len(), 1);
    assert_eq!(a.primary().outcomes, b.primary().outcomes);
    let mut successes = 0;
    for seed in 0..400 {
        successes += decrypt(&key, &ct, DecryptMode::Sampled { seed }).unwrap().primary().f as usize;
    }
    // P(f = 1) = 3/4; 3 sigma over 400 draws is about 0.065
    assert!((successes as f64 / 400.0 - 0.75).abs() < 0.065);
}

#[test]
fn backends_agree_on_random_runs() {
    let cases = [(1, 1, 0, 5, 1), (1, 1, 1, 5, 1), (1, 2, 0, 5, 1), (1, 1, 0, 5, 3), (2, 1, 0, 5, 1)];
    for (i, &(b, r, t, n, m)) in cases.iter().enumerate() {
        let g = Gamma::new(b, r, t, n, m).unwrap();
        let psi = PlainState::random_pure(r, i as u64);
        let c = random_clifford_t_circuit(r, 6, t, i as u64);
        let key = keygen(&g, 40 + i as u64);
        let dense = run(&g, &key, &psi, &c, Backend::Oracle);
        let pauli = run(&g, &key, &psi, &c, Backend::Pauli);
        assert_eq!(dense.branches.len(), pauli.branches.len());
        for (x, y) in dense.branches.iter().zip(&pauli.branches) {
            assert!((x.probability - y.probability).abs() < 1e-9);
            assert_eq!(x.result.outcomes, y.result.outcomes);
            assert!(dist(&x.result.rho_out, &y.result.rho_out) < 1e-9);
        }
    }
}

#[test]
fn ancillas_stay_maximally_mixed() {
    let g = Gamma::new(1, 1, 1, 5, 2).unwrap();
    let block = assemble_input(&PlainState::random_pure(1, 6), &g).unwrap();
    let key = keygen(&g, 12);
    let code = key.code_columns(g.n());
    let c = parse_circuit("H 0\nT 0\nS 0", 1).unwrap();
    for backend in BACKENDS {
        let ct = evaluate(&c, &encrypt(&key, &block, backend).unwrap()).unwrap();
        let mut sets = Vec::new();
        for y in (0..g.q()).filter(|y| !code.contains(y)) {
            sets.extend((0..g.p()).map(|x| vec![GridIndex::new(x, y)]));
            sets.push((0..g.p()).map(|x| GridIndex::new(x, y)).collect());
        }
        for (set, red) in sets.iter().zip(ct.reduced_states(&sets).unwrap()) {
            let expected = DensityMatrix::maximally_mixed(set.len()).unwrap();
            assert!(dist(&red, &expected) < 1e-9);
        }
    }
}

#[test]
fn fresh_ciphertext_columns_are_mixed() {
    let g = Gamma::new(1, 1, 0, 5, 2).unwrap();
    let block = assemble_input(&PlainState::preset("zero", 1).unwrap(), &g).unwrap();
    let half = DensityMatrix::maximally_mixed(1).unwrap();
    for seed in 0..5 {
        let key = keygen(&g, seed);
        for backend in BACKENDS {
            let ct = encrypt(&key, &block, backend).unwrap();
            let sets: Vec<Vec<GridIndex>> = (0..g.q()).map(|y| vec![GridIndex::new(0, y)]).collect();
            for red in ct.reduced_states(&sets).unwrap() {
                assert!(dist(&red, &half) < 1e-9);
            }
        }
    }
}

#[test]
fn wrong_key_breaks_decryption() {
    let g = Gamma::new(1, 1, 0, 5, 2).unwrap();
    let zero = PlainState::preset("zero", 1).unwrap();
    let plus = PlainState::preset("plus", 1).unwrap();
    let key = keygen(&g, 1);
    let block = assemble_input(&zero, &g).unwrap();
    let c = parse_circuit("H 0", 1).unwrap();
    let ct = evaluate(&c, &encrypt(&key, &block, Backend::Pauli).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for perm in ColumnPermutation::all(g.q()) {
        let other = SecretKey::from_permutation(perm);
        let out = decrypt(&other, &ct, DecryptMode::Exact).unwrap();
        worst = worst.max(dist(&out.primary().rho_out, plus.density()));
    }
    assert!(worst > 0.5);
    let dense = evaluate(&c, &encrypt(&key, &block, Backend::Oracle).unwrap()).unwrap();
    let wrong = SecretKey::from_permutation(ColumnPermutation::from_images(vec![5, 6, 0, 1, 2, 3, 4]).unwrap());
    let out = decrypt(&wrong, &dense, DecryptMode::Exact).unwrap();
    assert!(dist(&out.primary().rho_out, plus.density()) > 0.5);
}

#[test]
fn evaluation_is_key_blind_and_deterministic() {
    let g = Gamma::new(1, 1, 1, 5, 1).unwrap();
    let block = assemble_input(&PlainState::random_pure(1, 2), &g).unwrap();
    let c = random_clifford_t_circuit(1, 8, 1, 3);
    for backend in BACKENDS {
        let ct = encrypt(&keygen(&g, 7), &block, backend).unwrap();
        let bytes = ct.to_bytes().unwrap();
        let a = evaluate(&c, &CipherState::from_bytes(&bytes).unwrap()).unwrap().to_bytes().unwrap();
        let b = evaluate(&c, &CipherState::from_bytes(&bytes).unwrap()).unwrap().to_bytes().unwrap();
        assert_eq!(a, b);
    }
    let g0 = Gamma::new(1, 1, 0, 5, 1).unwrap();
    let block = assemble_input(&PlainState::random_pure(1, 2), &g0).unwrap();
    for backend in BACKENDS {
        let bytes = encrypt(&keygen(&g0, 7), &block, backend).unwrap().to_bytes().unwrap();
        let unchanged = evaluate(&Circuit::empty(1), &CipherState::from_bytes(&bytes).unwrap()).unwrap();
        assert_eq!(unchanged.to_bytes().unwrap(), bytes);
    }
}

#[test]
fn serialized_ciphertexts_decrypt_identically() {
    let g = Gamma::new(1, 1, 1, 5, 1).unwrap();
    let psi = PlainState::random_pure(1, 8);
    let c = parse_circuit("H 0\nT 0", 1).unwrap();
    let key = keygen(&g, 3);
    for backend in BACKENDS {
        let ct = evaluate(&c, &encrypt(&key, &assemble_input(&psi, &g).unwrap(), backend).unwrap()).unwrap();
        let back = CipherState::from_bytes(&ct.to_bytes().unwrap()).unwrap();
        let x = decrypt(&key, &ct, DecryptMode::Exact).unwrap();
        let y = decrypt(&key, &back, DecryptMode::Exact).unwrap();
        for (a, b) in x.branches.iter().zip(&y.branches) {
            assert!(a.result.rho_out.max_abs_diff(&b.result.rho_out).unwrap() < 1e-12);
        }
    }
}

#[test]
fn mismatched_circuit_is_rejected() {
    let g = Gamma::new(1, 1, 1, 5, 1).unwrap();
    let block = assemble_input(&PlainState::preset("zero", 1).unwrap(), &g).unwrap();
    let ct = encrypt(&keygen(&g, 0), &block, Backend::Pauli).unwrap();
    assert!(matches!(evaluate(&Circuit::empty(1), &ct), Err(Error::CircuitMismatch(_))));
    let wrong_key = keygen_for_columns(5, 0);
    assert!(matches!(decrypt(&wrong_key, &ct, DecryptMode::Exact), Err(Error::InvalidKey(_))));
}

#[test]
fn decode_cost_is_independent_of_depth() {
    let g = Gamma::new(1, 2, 1, 5, 2).unwrap();
    let counts = gate_counts(&g);
    assert_eq!((counts.u_dagger_cnots, counts.permutation_swaps_max), (24, 18));
    let key = keygen(&g, 5);
    let block = assemble_input(&PlainState::random_pure(2, 1), &g).unwrap();
    let ct = encrypt(&key, &block, Backend::Pauli).unwrap();
    let mut costs = Vec::new();
    for d in [1, 50] {
        let c = random_clifford_t_circuit(2, d - 1, 1, d as u64);
        let dec = decrypt(&key, &evaluate(&c, &ct).unwrap(), DecryptMode::Exact).unwrap();
        costs.push(dec.cost);
        assert_eq!(dec.cost.u_dagger_cnots, counts.u_dagger_cnots);
        assert!(dec.cost.permutation_swaps <= counts.permutation_swaps_max);
    }
    assert_eq!(costs[0], costs[1]);
}

#[test]
fn sampled_mixture_tracks_enumeration() {
    let g = Gamma::new(1, 1, 0, 5, 1).unwrap();
    let psi = PlainState::random_pure(1, 11);
    let block = assemble_input(&psi, &g).unwrap();
    let key = keygen(&g, 2);
    let ct = encrypt_with(&key, &block, Backend::Oracle, MixturePolicy::Sample { samples: 8, seed: 1 }).unwrap();
    // the ancillas never reach column 0 under the correct key, so any sample decodes exactly
    let dec = decrypt(&key, &ct, DecryptMode::Exact).unwrap();
    assert!(dist(&dec.primary().rho_out, psi.density()) < 1e-9);
    let fresh = ct.reduced_state(&[GridIndex::new(0, key.permutation().apply(g.n()))]).unwrap();
    let z = fresh.get(0, 0).re - fresh.get(1, 1).re;
    assert!(z.abs() <= 1.0);
}

#[test]
fn pure_state_presets_are_normalized() {
    for name in ["zero", "one", "plus", "ghz", "magic", "random:3"] {
        let s = PlainState::preset(name, 2).unwrap();
        assert!((s.density().trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
