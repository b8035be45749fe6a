//! Length-prefixed frames.
//!
//! ```text
//! length u32 BE (payload + 1) | type u8 | payload
//! ```

use std::io::{self, Read, Write};

use crate::error::FrameError;

pub const DEFAULT_MAX_PAYLOAD: usize = 64 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FrameType {
    EvalRequest = 0x01,
    EvalResponse = 0x02,
    Error = 0x7F,
}

impl TryFrom<u8> for FrameType {
    type Error = FrameError;

    fn try_from(b: u8) -> Result<Self, FrameError> {
        match b {
            0x01 => Ok(FrameType::EvalRequest),
            0x02 => Ok(FrameType::EvalResponse),
            0x7F => Ok(FrameType::Error),
            other => Err(FrameError::UnknownType(other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: FrameType, payload: Vec<u8>) -> Self {
        Frame { kind, payload }
    }

    pub fn error(message: &str) -> Self {
        Frame::new(FrameType::Error, message.as_bytes().to_vec())
    }

    pub fn encode(&self) -> Result<Vec<u8>, FrameError> {
        let len = u32::try_from(self.payload.len() + 1).map_err(|_| FrameError::Oversize {
            len: self.payload.len(),
            cap: u32::MAX as usize - 1,
        })?;
        let mut out = Vec::with_capacity(5 + self.payload.len());
        out.extend_from_slice(&len.to_be_bytes());
        out.push(self.kind as u8);
        out.extend_from_slice(&self.payload);
        Ok(out)
    }

    /// Parses exactly one frame from `bytes`.
    pub fn decode(bytes: &[u8], max_payload: usize) -> Result<Frame, FrameError> {
        let mut cursor = bytes;
        let frame = read_frame(&mut cursor, max_payload)?;
        if !cursor.is_empty() {
            return Err(FrameError::Malformed(format!("{} trailing bytes", cursor.len())));
        }
        Ok(frame)
    }
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> Result<(), FrameError> {
    w.write_all(&frame.encode()?)?;
    w.flush()?;
    Ok(())
}

pub fn read_frame<R: Read>(r: &mut R, max_payload: usize) -> Result<Frame, FrameError> {
    let mut head = [0u8; 5];
    r.read_exact(&mut head[..4])?;
    let len = u32::from_be_bytes([head[0], head[1], head[2], head[3]]) as usize;
    if len == 0 {
        return Err(FrameError::Malformed("zero frame length".into()));
    }
    if len - 1 > max_payload {
        return Err(FrameError::Oversize {
            len: len - 1,
            cap: max_payload,
        });
    }
    r.read_exact(&mut head[4..])?;
    let kind = FrameType::try_from(head[4])?;
    let mut payload = vec![0u8; len - 1];
    r.read_exact(&mut payload).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FrameError::Malformed("payload shorter than declared length".into()),
        _ => FrameError::Io(e),
    })?;
    Ok(Frame { kind, payload })
}
