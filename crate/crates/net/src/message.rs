//! Request and response payloads.
//!
//! ```text
//! EVAL_REQUEST:  b r t n m as u32 BE | circuit length u32 BE | circuit text | ciphertext
//! EVAL_RESPONSE: ciphertext
//! ERROR:         UTF-8 message
//! ```
//! The ciphertext bytes are the core binary ciphertext format.

use qhe_core::Gamma;

use crate::error::FrameError;
use crate::frame::{Frame, FrameType};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRequest {
    pub gamma: Gamma,
    pub circuit: String,
    pub ciphertext: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResponse {
    pub ciphertext: Vec<u8>,
}

fn take<'a>(bytes: &mut &'a [u8], n: usize) -> Result<&'a [u8], FrameError> {
    if bytes.len() < n {
        return Err(FrameError::Malformed("request truncated".into()));
    }
    let (head, rest) = bytes.split_at(n);
    *bytes = rest;
    Ok(head)
}

fn take_u32(bytes: &mut &[u8]) -> Result<u32, FrameError> {
    let b = take(bytes, 4)?;
    Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

impl EvalRequest {
    pub fn to_frame(&self) -> Frame {
        let g = &self.gamma;
        let mut out = Vec::with_capacity(24 + self.circuit.len() + self.ciphertext.len());
        for v in [g.b(), g.r(), g.t(), g.n(), g.m()] {
            out.extend_from_slice(&(v as u32).to_be_bytes());
        }
        out.extend_from_slice(&(self.circuit.len() as u32).to_be_bytes());
        out.extend_from_slice(self.circuit.as_bytes());
        out.extend_from_slice(&self.ciphertext);
        Frame::new(FrameType::EvalRequest, out)
    }

    pub fn from_frame(frame: &Frame) -> Result<Self, FrameError> {
        if frame.kind != FrameType::EvalRequest {
            return Err(FrameError::Malformed(format!("expected EVAL_REQUEST, got {:?}", frame.kind)));
        }
        let mut rest = frame.payload.as_slice();
        let mut v = [0usize; 5];
        for slot in &mut v {
            *slot = take_u32(&mut rest)? as usize;
        }
        let gamma = Gamma::new(v[0], v[1], v[2], v[3], v[4]).map_err(|e| FrameError::Malformed(e.to_string()))?;
        let len = take_u32(&mut rest)? as usize;
        let circuit = std::str::from_utf8(take(&mut rest, len)?)
            .map_err(|_| FrameError::Malformed("circuit text is not UTF-8".into()))?
            .to_string();
        Ok(EvalRequest {
            gamma,
            circuit,
            ciphertext: rest.to_vec(),
        })
    }
}

impl EvalResponse {
    pub fn to_frame(&self) -> Frame {
        Frame::new(FrameType::EvalResponse, self.ciphertext.clone())
    }

    pub fn from_frame(frame: &Frame) -> Result<Self, FrameError> {
        if frame.kind != FrameType::EvalResponse {
            return Err(FrameError::Malformed(format!("expected EVAL_RESPONSE, got {:?}", frame.kind)));
        }
        Ok(EvalResponse {
            ciphertext: frame.payload.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_round_trip() {
        let req = EvalRequest {
            gamma: Gamma::new(2, 1, 1, 5, 3).unwrap(),
            circuit: "H 0\nT 0\n".into(),
            ciphertext: vec![1, 2, 3, 4],
        };
        let frame = req.to_frame();
        assert_eq!(&frame.payload[..4], &[0, 0, 0, 2]);
        assert_eq!(EvalRequest::from_frame(&frame).unwrap(), req);
        let mut cut = frame.clone();
        cut.payload.truncate(10);
        assert!(EvalRequest::from_frame(&cut).is_err());
    }
}
