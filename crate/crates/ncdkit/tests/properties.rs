use std::num::NonZeroUsize;

use ncdkit::codec::Codecs;
use ncdkit::Engine;
use ncdkit_core::combiner::ncd_shuffle;
use ncdkit_core::ncd::NCD_SANITY_CEILING;
use ncdkit_core::{ncd, CombinerSpec, CompressorSpec};
use proptest::prelude::*;

fn specs() -> [CompressorSpec; 3] {
    [
        CompressorSpec::deflate(),
        CompressorSpec::bzip2(),
        CompressorSpec::lzma(),
    ]
}

/// Bytes `|C(empty)|` may exceed `|C(X)|` by.
const HEADER_FLOOR_SLACK: u64 = 0;

fn bytes() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        prop::collection::vec(any::<u8>(), 0..3000),
        prop::collection::vec(0u8..4, 0..3000),
    ]
}

fn sorted(mut v: Vec<u8>) -> Vec<u8> {
    v.sort_unstable();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn length_ignores_how_input_is_split(data in bytes(), a in 0usize..3000, b in 0usize..3000) {
        let c = Codecs::new();
        let (a, b) = (a.min(data.len()), b.min(data.len()));
        let (lo, hi) = (a.min(b), a.max(b));
        for spec in specs() {
            let whole = c.compressed_size(&spec, &data).unwrap().byte_count;
            let parts = c.concat_compressed_size(&spec, &[&data[..lo], &data[lo..hi], &data[hi..]]).unwrap().byte_count;
            prop_assert_eq!(whole, parts, "{}", spec.label());
        }
    }

    #[test]
    fn empty_input_is_the_floor(data in bytes()) {
        let c = Codecs::new();
        for spec in specs() {
            let empty = c.compressed_size(&spec, b"").unwrap().byte_count;
            let full = c.compressed_size(&spec, &data).unwrap().byte_count;
            prop_assert!(empty <= full + HEADER_FLOOR_SLACK, "{}: {} > {}", spec.label(), empty, full);
        }
    }

    #[test]
    fn concat_distance_is_in_range(x in bytes(), y in bytes()) {
        let e = Engine::uncached();
        for spec in specs() {
            let d = ncd(&e, &spec, &CombinerSpec::Concat, &x, &y).unwrap();
            prop_assert!((0.0..=NCD_SANITY_CEILING).contains(&d), "{}: {}", spec.label(), d);
        }
    }

    #[test]
    fn shuffle_with_real_scorer_conserves_bytes(x in bytes(), y in bytes(), b in 64usize..1024) {
        let e = Engine::uncached();
        let b = NonZeroUsize::new(b).unwrap();
        let out = ncd_shuffle(&e, &x, &y, b, &CompressorSpec::deflate()).unwrap();
        let mut both = x.clone();
        both.extend_from_slice(&y);
        prop_assert_eq!(sorted(out), sorted(both));
    }
}
