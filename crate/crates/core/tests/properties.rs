use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use wgz::byte_code::{ByteCode, CodeReader, CodeVariant};
use wgz::lm::{self, FlagEncoding, LmParams};
use wgz::ssl::{FlagCount, SslParams};
use wgz::{parse_text, to_text, Codec, CompressedGraph, Graph, NodeId};

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        vec(btree_set(0..n as NodeId, 0..12), n).prop_map(|lists| {
            Graph::from_lists(lists.into_iter().map(|s| s.into_iter().collect::<Vec<_>>())).unwrap()
        })
    })
}

fn arb_code() -> impl Strategy<Value = ByteCode> {
    (
        prop_oneof![Just(CodeVariant::A), Just(CodeVariant::B)],
        3u8..=6,
    )
        .prop_map(|(variant, b)| ByteCode::new(variant, b).unwrap())
}

fn arb_codec() -> impl Strategy<Value = Codec> {
    let ssl = (
        prop_oneof![Just(FlagCount::Two), Just(FlagCount::Four)],
        prop_oneof![Just(CodeVariant::A), Just(CodeVariant::B)],
        1u32..200,
    )
        .prop_map(|(f, c, bsize)| Codec::Ssl(SslParams::new(f, c, bsize).unwrap()));
    let lm = (
        prop_oneof![Just(8u32), Just(16), Just(32), Just(64), Just(128)],
        prop_oneof![Just(FlagEncoding::Bitmap), Just(FlagEncoding::Diff)],
        prop_oneof![Just(CodeVariant::A), Just(CodeVariant::B)],
    )
        .prop_map(|(h, f, c)| Codec::Lm(LmParams::with_code(h, f, c).unwrap()));
    prop_oneof![ssl, lm]
}

proptest! {
    #[test]
    fn text_round_trip(g in arb_graph(60)) {
        prop_assert_eq!(parse_text(&to_text(&g)).unwrap(), g);
    }

    #[test]
    fn codewords_are_prefix_free(code in arb_code(), seeds in vec(any::<u64>(), 0..40)) {
        let values: Vec<u64> = seeds.iter().map(|s| (s % (code.max_value() + 1)) >> (s % 61)).collect();
        let mut bytes = Vec::new();
        for &v in &values {
            let len = code.encode(v, &mut bytes).unwrap();
            prop_assert!(len == 1 || len == code.width() as usize || (len == 2 && code.variant() == CodeVariant::B));
        }
        let mut reader = CodeReader::new(code, &bytes);
        for &v in &values {
            prop_assert_eq!(reader.next_value().unwrap(), v);
        }
        prop_assert!(reader.is_empty());
    }

    #[test]
    fn merge_split_identity(h in prop_oneof![Just(8usize), Just(16), Just(32)], lists in vec(btree_set(0u32..100, 0..10), 32)) {
        let lists: Vec<Vec<NodeId>> = lists.into_iter().take(h).map(|s| s.into_iter().collect()).collect();
        let (values, windows) = lm::merge_block(&lists);
        prop_assert!(windows.windows().all(|w| w.iter().any(|&b| b != 0)));
        for (r, list) in lists.iter().enumerate() {
            prop_assert_eq!(&lm::split_line(&values, &windows, r), list);
        }
    }

    #[test]
    fn container_round_trip(g in arb_graph(300), codec in arb_codec()) {
        let cg = CompressedGraph::compress(&g, codec).unwrap();
        prop_assert_eq!(cg.decompress().unwrap(), g.clone());
        let bytes = cg.to_bytes();
        let back = CompressedGraph::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        for node in 0..g.num_nodes() {
            prop_assert_eq!(back.successors(node as u64).unwrap(), g.successors(node));
        }
    }
}
