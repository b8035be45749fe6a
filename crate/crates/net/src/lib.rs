//! One-shot TCP delegation of encrypted circuit evaluation.
//!
//! The client keeps the key, sends the circuit in the clear together with the
//! ciphertext, and decrypts the single response it gets back.

pub mod client;
pub mod error;
pub mod frame;
pub mod message;
pub mod server;

pub use client::{client_delegate, request_evaluation};
pub use error::{ClientError, FrameError};
pub use frame::{read_frame, write_frame, Frame, FrameType, DEFAULT_MAX_PAYLOAD};
pub use message::{EvalRequest, EvalResponse};
pub use server::{serve, Server, ServerConfig, ShutdownHandle};
