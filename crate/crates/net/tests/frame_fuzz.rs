use proptest::prelude::*;
use qhe_net::{Frame, FrameType};

fn kind() -> impl Strategy<Value = FrameType> {
    prop_oneof![
        Just(FrameType::EvalRequest),
        Just(FrameType::EvalResponse),
        Just(FrameType::Error)
    ]
}

proptest! {
    #[test]
    fn encode_decode_identity(k in kind(), payload in proptest::collection::vec(any::<u8>(), 0..4096)) {
        let frame = Frame::new(k, payload);
        let bytes = frame.encode().unwrap();
        prop_assert_eq!(u32::from_be_bytes(bytes[..4].try_into().unwrap()) as usize, frame.payload.len() + 1);
        prop_assert_eq!(Frame::decode(&bytes, 1 << 20).unwrap(), frame);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let _ = Frame::decode(&bytes, 1 << 10);
    }

    #[test]
    fn unknown_types_rejected(t in any::<u8>().prop_filter("known", |t| ![1u8, 2, 0x7F].contains(t))) {
        prop_assert!(Frame::decode(&[0, 0, 0, 1, t], 16).is_err());
    }
}
