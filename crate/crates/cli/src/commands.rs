use std::fs;
use std::path::Path;
use std::thread;
use std::time::Instant;

use qhe_core::audit::{audit_pair, default_input_pairs, AuditShape};
use qhe_core::backend::MixturePolicy;
use qhe_core::bounds::{delta_region, sweep, sweep_csv, ReliabilityReport};
use qhe_core::circuit::parse_circuit;
use qhe_core::density::trace_norm_distance;
use qhe_core::scheme::{
    assemble_input, decrypt as decrypt_ct, encrypt_with, evaluate as evaluate_ct, keygen as make_key, DecryptMode,
    Decryption, PlainState,
};
use qhe_core::{Backend, CipherState, Circuit, DensityMatrix, Gamma, SecretKey};
use qhe_net::{client_delegate, Server, ServerConfig};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::output::Format;
use crate::{CircuitArg, ParamsArg};

pub enum Outcome {
    Report(Value),
    Text(String),
    /// A report whose checks failed; exits with the violation code.
    Failed(Value, String),
}

type CmdResult = Result<Outcome, CliError>;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn gamma_json(g: &Gamma) -> Value {
    json!({"b": g.b(), "r": g.r(), "t": g.t(), "n": g.n(), "m": g.m(), "p": g.p(), "q": g.q()})
}

/// Adds tool version, parameters, seed and backend to a report.
fn stamp(body: Value, gamma: Option<&Gamma>, seed: Option<u64>, backend: Option<Backend>) -> Value {
    let mut map = Map::new();
    map.insert("tool".into(), json!({"name": "qhe", "version": VERSION}));
    map.insert("gamma".into(), gamma.map(gamma_json).unwrap_or(Value::Null));
    map.insert("seed".into(), json!(seed));
    map.insert("backend".into(), json!(backend.map(|b| b.to_string())));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    Value::Object(map)
}

fn load_params(arg: &ParamsArg) -> Result<Gamma, CliError> {
    let path = Path::new(&arg.params);
    if path.is_file() {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    } else {
        Ok(arg.params.parse()?)
    }
}

fn load_circuit(arg: &CircuitArg, r: usize) -> Result<Circuit, CliError> {
    let text = match (&arg.circuit, &arg.gates) {
        (Some(path), _) => fs::read_to_string(path)?,
        (None, Some(inline)) => inline.replace(';', "\n"),
        (None, None) => String::new(),
    };
    Ok(parse_circuit(&text, r)?)
}

fn load_key(path: &Path) -> Result<SecretKey, CliError> {
    Ok(SecretKey::from_json(&fs::read_to_string(path)?)?)
}

fn load_ciphertext(path: &Path) -> Result<CipherState, CliError> {
    Ok(CipherState::from_bytes(&fs::read(path)?)?)
}

fn matrix_json(rho: &DensityMatrix) -> Value {
    let d = rho.dim();
    Value::Array(
        (0..d)
            .map(|i| Value::Array((0..d).map(|j| json!([rho.get(i, j).re, rho.get(i, j).im])).collect()))
            .collect(),
    )
}

fn decryption_json(dec: &Decryption) -> Result<Value, CliError> {
    let primary = dec.primary();
    let conditional = dec.conditional_output()?;
    Ok(json!({
        "f": primary.f,
        "failures": primary.failures,
        "selected_copy": primary.selected_copy,
        "outcomes": primary.outcomes,
        "branches": dec.branches.len(),
        "success_probability": dec.success_probability(),
        "failure_probability": dec.failure_probability(),
        "decode_cost": dec.cost,
        "rho_out": matrix_json(&primary.rho_out),
        "conditional_output": conditional.as_ref().map(matrix_json),
    }))
}

pub fn keygen(params: &ParamsArg, seed: u64, out: &Path) -> CmdResult {
    let gamma = load_params(params)?;
    let key = make_key(&gamma, seed);
    fs::write(out, key.to_json())?;
    Ok(Outcome::Report(stamp(
        json!({"key_file": out.display().to_string(), "q": key.q()}),
        Some(&gamma),
        Some(seed),
        None,
    )))
}

pub fn encrypt(
    params: &ParamsArg,
    key: &Path,
    state: &str,
    backend: Backend,
    samples: Option<usize>,
    seed: u64,
    out: &Path,
) -> CmdResult {
    let gamma = load_params(params)?;
    let key = load_key(key)?;
    key.check_gamma(&gamma)?;
    let psi = PlainState::preset(state, gamma.r())?;
    let block = assemble_input(&psi, &gamma)?;
    let policy = match samples {
        Some(samples) => MixturePolicy::Sample { samples, seed },
        None => MixturePolicy::Enumerate,
    };
    let ct = encrypt_with(&key, &block, backend, policy)?;
    let bytes = ct.to_bytes()?;
    fs::write(out, &bytes)?;
    Ok(Outcome::Report(stamp(
        json!({"state": state, "ciphertext_file": out.display().to_string(), "bytes": bytes.len()}),
        Some(&gamma),
        Some(seed),
        Some(backend),
    )))
}

pub fn evaluate(circuit: &CircuitArg, input: &Path, out: &Path) -> CmdResult {
    let ct = load_ciphertext(input)?;
    let gamma = *ct.gamma();
    let circuit = load_circuit(circuit, gamma.r())?;
    let start = Instant::now();
    let evaluated = evaluate_ct(&circuit, &ct)?;
    let bytes = evaluated.to_bytes()?;
    fs::write(out, &bytes)?;
    Ok(Outcome::Report(stamp(
        json!({
            "gates": circuit.len(),
            "t_gates": circuit.t_count(),
            "ciphertext_file": out.display().to_string(),
            "bytes": bytes.len(),
            "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        }),
        Some(&gamma),
        None,
        Some(ct.backend()),
    )))
}

pub fn decrypt(key: &Path, input: &Path, seed: Option<u64>, out: Option<&Path>) -> CmdResult {
    let key = load_key(key)?;
    let ct = load_ciphertext(input)?;
    key.check_gamma(ct.gamma())?;
    let mode = match seed {
        Some(seed) => DecryptMode::Sampled { seed },
        None => DecryptMode::Exact,
    };
    let dec = decrypt_ct(&key, &ct, mode)?;
    let body = decryption_json(&dec)?;
    if let Some(out) = out {
        fs::write(out, serde_json::to_string_pretty(&body["rho_out"])?)?;
    }
    Ok(Outcome::Report(stamp(body, Some(ct.gamma()), seed, Some(ct.backend()))))
}

pub fn roundtrip(params: &ParamsArg, circuit: &CircuitArg, state: &str, backend: Backend, seed: u64) -> CmdResult {
    let gamma = load_params(params)?;
    let circuit = load_circuit(circuit, gamma.r())?;
    circuit.validate_for_gamma(&gamma).map_err(|v| CliError::from(qhe_core::Error::CircuitMismatch(v)))?;
    let psi = PlainState::preset(state, gamma.r())?;
    let key = make_key(&gamma, seed);
    let expected = circuit.apply_to(psi.density())?;

    let t0 = Instant::now();
    let ct = encrypt_with(&key, &assemble_input(&psi, &gamma)?, backend, MixturePolicy::Enumerate)?;
    let t1 = Instant::now();
    let ct = evaluate_ct(&circuit, &ct)?;
    let t2 = Instant::now();
    let dec = decrypt_ct(&key, &ct, DecryptMode::Exact)?;
    let t3 = Instant::now();

    let distance = match dec.conditional_output()? {
        Some(rho) => Some(trace_norm_distance(&rho, &expected)?),
        None => None,
    };
    let body = json!({
        "state": state,
        "circuit": circuit.to_text(),
        "f": dec.primary().f,
        "success_probability": dec.success_probability(),
        "distance": distance,
        "timings_ms": {
            "encrypt": (t1 - t0).as_secs_f64() * 1e3,
            "evaluate": (t2 - t1).as_secs_f64() * 1e3,
            "decrypt": (t3 - t2).as_secs_f64() * 1e3,
        },
    });
    let report = stamp(body, Some(&gamma), Some(seed), Some(backend));
    match distance {
        Some(d) if d > 1e-9 => Ok(Outcome::Failed(report, format!("decrypted output is {d:e} from the plaintext result"))),
        _ => Ok(Outcome::Report(report)),
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| CliError::Validation(format!("bad range '{s}'")))?;
        let hi: usize = hi.trim().parse().map_err(|_| CliError::Validation(format!("bad range '{s}'")))?;
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| CliError::Validation(format!("'{p}' is not an integer"))))
        .collect()
}

pub fn audit_security(
    params: Option<&str>,
    shape: Option<&str>,
    inputs: Option<&str>,
    pairs: usize,
    seed: u64,
) -> CmdResult {
    let (gamma, shape) = match (params, shape) {
        (Some(p), _) => {
            let g: Gamma = p.parse()?;
            (Some(g), AuditShape::from_gamma(&g)?)
        }
        (None, Some(s)) => {
            let v = parse_list(s)?;
            if v.len() != 3 {
                return Err(CliError::Validation(format!("expected p,n,m, got '{s}'")));
            }
            (None, AuditShape::new(v[0], v[1], v[2])?)
        }
        (None, None) => return Err(CliError::Validation("one of --params or --shape is required".into())),
    };
    let input_pairs = match inputs {
        Some(pair) => {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| CliError::Validation(format!("expected two presets, got '{pair}'")))?;
            vec![(
                format!("{a} vs {b}"),
                PlainState::preset(a.trim(), shape.p)?.density().clone(),
                PlainState::preset(b.trim(), shape.p)?.density().clone(),
            )]
        }
        None => default_input_pairs(shape.p, seed, pairs)?,
    };
    let mut reports = Vec::new();
    for (label, a, b) in &input_pairs {
        reports.push(audit_pair(&shape, label, a, b)?);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    let report = stamp(json!({"shape": shape, "audits": reports}), gamma.as_ref(), Some(seed), None);
    if failed > 0 {
        Ok(Outcome::Failed(report, format!("{failed} input pair(s) exceed the bound")))
    } else {
        Ok(Outcome::Report(report))
    }
}

pub fn audit_reliability(b: usize, t: usize, delta: f64, trials: u64, seed: u64) -> CmdResult {
    let mut report = ReliabilityReport::new(b, t, delta)?;
    if trials > 0 {
        report = report.with_monte_carlo(trials, seed)?;
    }
    let mut problems = Vec::new();
    if let Some(h) = report.hoeffding_bound {
        if report.exact_failure > h {
            problems.push(format!("exact failure {:e} exceeds the Hoeffding bound {h:e}", report.exact_failure));
        }
    }
    let region = (t >= 1).then(|| delta_region(t, b.max(5000)));
    let in_region = region.as_ref().map(|r| r.contains(b));
    if in_region == Some(true) && report.exact_failure > report.theorem_delta {
        problems.push("exact failure exceeds delta inside the mapped region".into());
    }
    let body = json!({
        "report": report,
        "delta_region": region.map(|r| json!({"t": r.t, "b_max": r.b_max, "holds_from": r.holds_from})),
        "delta_dominates_here": in_region,
    });
    let out = stamp(body, None, Some(seed), None);
    if problems.is_empty() {
        Ok(Outcome::Report(out))
    } else {
        Ok(Outcome::Failed(out, problems.join("; ")))
    }
}

pub fn bounds(t: &str, b: &str, format: Format) -> CmdResult {
    let rows = sweep(&parse_list(t)?, &parse_list(b)?);
    match format {
        Format::Csv => Ok(Outcome::Text(sweep_csv(&rows))),
        Format::Table => {
            let mut out = format!("{:>3} {:>6} {:>12} {:>12} {:>12}\n", "t", "b", "exact", "hoeffding", "delta");
            for r in &rows {
                let h = r.hoeffding.map(|h| format!("{h:.4e}")).unwrap_or_else(|| "-".into());
                out.push_str(&format!(
                    "{:>3} {:>6} {:>12.4e} {:>12} {:>12.4e}\n",
                    r.t, r.b, r.exact, h, r.theorem_delta
                ));
            }
            Ok(Outcome::Text(out))
        }
        Format::Json => Ok(Outcome::Report(stamp(json!({"rows": rows}), None, None, None))),
    }
}

pub fn demo(seed: u64) -> CmdResult {
    let gamma = Gamma::new(1, 1, 1, 5, 1)?;
    let key = make_key(&gamma, seed);
    let psi = PlainState::preset("plus", 1)?;
    let circuit = parse_circuit("H 0\nS 0\nT 0\nH 0\n", 1)?;
    let expected = circuit.apply_to(psi.density())?;

    let server = Server::bind("127.0.0.1:0", ServerConfig::default())?;
    let addr = server.local_addr()?;
    let stop = server.shutdown_handle()?;
    let worker = thread::spawn(move || server.run());
    let remote = client_delegate(addr, &key, &psi, &circuit, &gamma, Backend::Pauli, DecryptMode::Exact);
    stop.shutdown();
    let _ = worker.join();
    let remote = remote?;

    let local_ct = evaluate_ct(&circuit, &encrypt_with(&key, &assemble_input(&psi, &gamma)?, Backend::Oracle, MixturePolicy::Enumerate)?)?;
    let local = decrypt_ct(&key, &local_ct, DecryptMode::Exact)?;
    let remote_out = remote.conditional_output()?.ok_or_else(|| CliError::Violation("no successful branch".into()))?;
    let local_out = local.conditional_output()?.ok_or_else(|| CliError::Violation("no successful branch".into()))?;
    let d_expected = trace_norm_distance(&remote_out, &expected)?;
    let d_local = trace_norm_distance(&remote_out, &local_out)?;
    let body = json!({
        "server": addr.to_string(),
        "circuit": circuit.to_text(),
        "remote_success_probability": remote.success_probability(),
        "local_success_probability": local.success_probability(),
        "distance_to_plaintext": d_expected,
        "distance_remote_vs_local_oracle": d_local,
    });
    let report = stamp(body, Some(&gamma), Some(seed), Some(Backend::Pauli));
    if d_expected > 1e-9 || d_local > 1e-9 {
        Ok(Outcome::Failed(report, "delegated output differs".into()))
    } else {
        Ok(Outcome::Report(report))
    }
}

pub fn serve(listen: &str, backend: Option<Backend>, max_payload: usize) -> CmdResult {
    let server = Server::bind(listen, ServerConfig { max_payload, backend })?;
    eprintln!("qhe {VERSION} listening on {}", server.local_addr()?);
    server.run()?;
    Ok(Outcome::Text(String::new()))
}

pub fn delegate(
    server: &str,
    params: &ParamsArg,
    circuit: &CircuitArg,
    key: Option<&Path>,
    state: &str,
    backend: Backend,
    seed: u64,
) -> CmdResult {
    let gamma = load_params(params)?;
    let circuit = load_circuit(circuit, gamma.r())?;
    let key = match key {
        Some(path) => load_key(path)?,
        None => make_key(&gamma, seed),
    };
    key.check_gamma(&gamma)?;
    let psi = PlainState::preset(state, gamma.r())?;
    let dec = client_delegate(server, &key, &psi, &circuit, &gamma, backend, DecryptMode::Exact)?;
    let expected = circuit.apply_to(psi.density())?;
    let distance = match dec.conditional_output()? {
        Some(rho) => Some(trace_norm_distance(&rho, &expected)?),
        None => None,
    };
    let mut body = decryption_json(&dec)?;
    body["distance"] = json!(distance);
    body["server"] = json!(server);
    Ok(Outcome::Report(stamp(body, Some(&gamma), Some(seed), Some(backend))))
}
