//! Delegating client: encrypts and decrypts locally, ships only ciphertexts.

use std::net::{TcpStream, ToSocketAddrs};

use qhe_core::scheme::{assemble_input, decrypt, encrypt, DecryptMode, Decryption, PlainState};
use qhe_core::{Backend, CipherState, Circuit, Gamma, SecretKey};

use crate::error::ClientError;
use crate::frame::{read_frame, write_frame, FrameType, DEFAULT_MAX_PAYLOAD};
use crate::message::{EvalRequest, EvalResponse};

/// Sends one evaluation request and returns the evaluated ciphertext.
pub fn request_evaluation<A: ToSocketAddrs>(
    addr: A,
    circuit: &Circuit,
    ct: &CipherState,
    max_payload: usize,
) -> Result<CipherState, ClientError> {
    let req = EvalRequest {
        gamma: *ct.gamma(),
        circuit: circuit.to_text(),
        ciphertext: ct.to_bytes()?,
    };
    let mut stream = TcpStream::connect(addr)?;
    write_frame(&mut stream, &req.to_frame())?;
    let frame = read_frame(&mut stream, max_payload)?;
    match frame.kind {
        FrameType::EvalResponse => {
            let resp = EvalResponse::from_frame(&frame)?;
            let out = CipherState::from_bytes(&resp.ciphertext)?;
            if out.gamma() != ct.gamma() {
                return Err(ClientError::Protocol("response parameters differ from request".into()));
            }
            Ok(out)
        }
        FrameType::Error => Err(ClientError::Server(String::from_utf8_lossy(&frame.payload).into_owned())),
        FrameType::EvalRequest => Err(ClientError::Protocol("server sent a request frame".into())),
    }
}

/// Full round trip: encrypt, delegate evaluation, decrypt.
pub fn client_delegate<A: ToSocketAddrs>(
    addr: A,
    key: &SecretKey,
    state: &PlainState,
    circuit: &Circuit,
    gamma: &Gamma,
    backend: Backend,
    mode: DecryptMode,
) -> Result<Decryption, ClientError> {
    let block = assemble_input(state, gamma)?;
    let ct = encrypt(key, &block, backend)?;
    let evaluated = request_evaluation(addr, circuit, &ct, DEFAULT_MAX_PAYLOAD)?;
    Ok(decrypt(key, &evaluated, mode)?)
}
