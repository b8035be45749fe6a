//! Evaluation server. It never sees a key.

use std::io;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use qhe_core::circuit::parse_circuit;
use qhe_core::{evaluate, Backend, CipherState};

use crate::error::FrameError;
use crate::frame::{read_frame, write_frame, Frame, FrameType, DEFAULT_MAX_PAYLOAD};
use crate::message::{EvalRequest, EvalResponse};

#[derive(Clone, Debug)]
pub struct ServerConfig {
    pub max_payload: usize,
    /// Reject ciphertexts of any other backend when set.
    pub backend: Option<Backend>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            max_payload: DEFAULT_MAX_PAYLOAD,
            backend: None,
        }
    }
}

pub struct Server {
    listener: TcpListener,
    config: ServerConfig,
    stop: Arc<AtomicBool>,
}

#[derive(Clone)]
pub struct ShutdownHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
}

impl ShutdownHandle {
    pub fn shutdown(&self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the blocking accept.
        let _ = TcpStream::connect(self.addr);
    }
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(addr: A, config: ServerConfig) -> io::Result<Server> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            config,
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn shutdown_handle(&self) -> io::Result<ShutdownHandle> {
        Ok(ShutdownHandle {
            addr: self.local_addr()?,
            stop: Arc::clone(&self.stop),
        })
    }

    /// Accepts connections until shut down, one thread per connection.
    pub fn run(self) -> io::Result<()> {
        let mut workers = Vec::new();
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(_) => continue,
            };
            let config = self.config.clone();
            workers.push(thread::spawn(move || handle_connection(stream, &config)));
            workers.retain(|w| !w.is_finished());
        }
        for w in workers {
            let _ = w.join();
        }
        Ok(())
    }
}

pub fn serve<A: ToSocketAddrs>(addr: A, backend: Option<Backend>) -> io::Result<()> {
    Server::bind(
        addr,
        ServerConfig {
            backend,
            ..ServerConfig::default()
        },
    )?
    .run()
}

/// Serves one request on `stream`, then closes it.
pub fn handle_connection(mut stream: TcpStream, config: &ServerConfig) {
    let reply = match read_frame(&mut stream, config.max_payload) {
        Ok(frame) => match frame.kind {
            FrameType::EvalRequest => match process(&frame, config) {
                Ok(resp) => resp.to_frame(),
                Err(msg) => Frame::error(&msg),
            },
            other => Frame::error(&format!("unexpected frame {other:?}")),
        },
        Err(FrameError::Io(_)) => return,
        Err(e) => Frame::error(&e.to_string()),
    };
    let _ = write_frame(&mut stream, &reply);
    let _ = stream.shutdown(std::net::Shutdown::Both);
}

/// Runs the evaluation for one request payload.
pub fn process(frame: &Frame, config: &ServerConfig) -> Result<EvalResponse, String> {
    let req = EvalRequest::from_frame(frame).map_err(|e| e.to_string())?;
    let ct = CipherState::from_bytes(&req.ciphertext).map_err(|e| e.to_string())?;
    if ct.gamma() != &req.gamma {
        return Err(format!("ciphertext parameters {} differ from request {}", ct.gamma(), req.gamma));
    }
    if let Some(b) = config.backend {
        if ct.backend() != b {
            return Err(format!("server accepts {b} ciphertexts, got {}", ct.backend()));
        }
    }
    let circuit = parse_circuit(&req.circuit, req.gamma.r()).map_err(|e| e.to_string())?;
    let out = evaluate(&circuit, &ct).map_err(|e| e.to_string())?;
    if out.gamma() != &req.gamma {
        return Err("evaluation changed the ciphertext shape".into());
    }
    Ok(EvalResponse {
        ciphertext: out.to_bytes().map_err(|e| e.to_string())?,
    })
}
