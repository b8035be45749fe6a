use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("unknown frame type 0x{0:02x}")]
    UnknownType(u8),
    #[error("payload of {len} bytes exceeds cap of {cap}")]
    Oversize { len: usize, cap: usize },
    #[error("malformed frame: {0}")]
    Malformed(String),
}

/// Failures seen by the delegating client. Transport and protocol problems
/// are kept apart from errors raised by the scheme itself.
#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transport: {0}")]
    Transport(#[from] io::Error),
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("server reported: {0}")]
    Server(String),
    #[error("scheme: {0}")]
    Scheme(#[from] qhe_core::Error),
}

impl From<FrameError> for ClientError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::Io(e) => ClientError::Transport(e),
            other => ClientError::Protocol(other.to_string()),
        }
    }
}
