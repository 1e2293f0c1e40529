use gravlab_core::protocol::{MessageType, ProtocolMessage, Role, RESERVED_FIELDS};
use proptest::prelude::*;
use serde_json::{Map, Number, Value};

fn leaf() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i64>().prop_map(Value::from),
        any::<u64>().prop_map(Value::from),
        any::<f64>()
            .prop_filter("finite", |f| f.is_finite())
            .prop_map(|f| Value::Number(Number::from_f64(f).unwrap())),
        ".{0,12}".prop_map(Value::String),
    ]
}

fn json_value() -> impl Strategy<Value = Value> {
    leaf().prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Array),
            prop::collection::btree_map("[a-z_]{1,8}", inner, 0..4)
                .prop_map(|m| Value::Object(m.into_iter().collect())),
        ]
    })
}

fn object(keys: &'static str) -> impl Strategy<Value = Map<String, Value>> {
    prop::collection::btree_map(keys, json_value(), 0..4).prop_map(|m| m.into_iter().collect())
}

fn message() -> impl Strategy<Value = ProtocolMessage> {
    (
        0u32..4,
        any::<u64>(),
        any::<u64>(),
        prop::sample::select(vec![Role::Teacher, Role::Student, Role::Server]),
        prop::sample::select(MessageType::ALL.to_vec()),
        object("[a-z_]{1,10}"),
        object("x_[a-z]{1,6}"),
    )
        .prop_map(|(v, seq, ts_ms, role, msg_type, payload, extra)| {
            let mut m = ProtocolMessage::new(v, seq, ts_ms, role, msg_type);
            m.payload = payload;
            m.extra = extra;
            m
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn valid_messages_round_trip(m in message()) {
        let line = m.encode();
        prop_assert!(line.ends_with('\n'));
        prop_assert_eq!(line.matches('\n').count(), 1);
        prop_assert!(m.extra.keys().all(|k| !RESERVED_FIELDS.contains(&k.as_str())));
        prop_assert_eq!(ProtocolMessage::decode(line.as_bytes()).unwrap(), m);
    }
}

#[derive(Debug, Clone)]
enum Mutation {
    Flip(usize, u8),
    Insert(usize, u8),
    Delete(usize),
    Truncate(usize),
}

fn mutate(bytes: &mut Vec<u8>, muts: &[Mutation]) {
    for m in muts {
        if bytes.is_empty() {
            return;
        }
        match *m {
            Mutation::Flip(i, b) => {
                let i = i % bytes.len();
                bytes[i] ^= b.max(1);
            }
            Mutation::Insert(i, b) => {
                let i = i % (bytes.len() + 1);
                bytes.insert(i, b);
            }
            Mutation::Delete(i) => {
                let i = i % bytes.len();
                bytes.remove(i);
            }
            Mutation::Truncate(i) => {
                let i = i % bytes.len();
                bytes.truncate(i);
            }
        }
    }
}

fn mutation() -> impl Strategy<Value = Mutation> {
    prop_oneof![
        (any::<usize>(), any::<u8>()).prop_map(|(i, b)| Mutation::Flip(i, b)),
        (any::<usize>(), any::<u8>()).prop_map(|(i, b)| Mutation::Insert(i, b)),
        any::<usize>().prop_map(Mutation::Delete),
        any::<usize>().prop_map(Mutation::Truncate),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn mutated_lines_never_crash(m in message(), muts in prop::collection::vec(mutation(), 1..6)) {
        let mut bytes = m.encode().into_bytes();
        mutate(&mut bytes, &muts);
        if let Err(e) = ProtocolMessage::decode(&bytes) {
            prop_assert!(e.offset() <= bytes.len());
        }
    }

    #[test]
    fn arbitrary_bytes_never_crash(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = ProtocolMessage::decode(&bytes);
    }
}
