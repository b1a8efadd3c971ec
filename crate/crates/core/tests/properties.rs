use std::collections::HashSet;

use proptest::prelude::*;
use slp_core::builders::{build_via_ctph, repair_build, CtphParams};
use slp_core::corpus::gen_corpus;
use slp_core::shaped::QueryObserver;
use slp_core::{EncodeOptions, NaiveSlpEncoding, ShapedSlpEncoding, Slp, TextAccess};

#[derive(Default)]
struct Recorder {
    sizes: Vec<u64>,
    steps: u64,
    pushes: u64,
}

impl QueryObserver for Recorder {
    fn on_size_hash(&mut self, size: u64) {
        self.sizes.push(size);
    }
    fn on_descent_step(&mut self) {
        self.steps += 1;
    }
    fn on_frame_push(&mut self) {
        self.pushes += 1;
    }
}

fn text_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        prop::collection::vec(prop::sample::select(b"ab".to_vec()), 1..300),
        prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), 1..300),
        (prop::collection::vec(any::<u8>(), 1..20), 1usize..30).prop_map(|(b, k)| b.repeat(k)),
        (1usize..200, 1usize..10, 0.0f64..0.2, any::<u64>())
            .prop_map(|(m, c, e, s)| gen_corpus(m, c, e, s).unwrap()),
    ]
}

fn check_encodings(slp: &Slp, text: &[u8]) -> Result<(), TestCaseError> {
    let shaped = ShapedSlpEncoding::encode(slp, &EncodeOptions::default()).unwrap();
    let naive = NaiveSlpEncoding::encode(slp);
    shaped.verify().unwrap();
    let genuine: HashSet<u64> = slp.expansion_lengths().into_iter().collect();
    let h = slp.height();
    let n = text.len() as u64;
    for i in 1..=n {
        let want = text[(i - 1) as usize];
        let mut rec = Recorder::default();
        prop_assert_eq!(shaped.access_observed(i, &mut rec).unwrap(), want);
        prop_assert_eq!(naive.access(i).unwrap(), want);
        prop_assert!(rec.steps <= h + 1, "{} steps, height {}", rec.steps, h);
        prop_assert!(rec.sizes.iter().all(|s| genuine.contains(s)));
    }
    prop_assert_eq!(shaped.extract(1, n).unwrap(), text);
    prop_assert_eq!(naive.extract(1, n).unwrap(), text);
    let mut rec = Recorder::default();
    let mut out = Vec::new();
    shaped.extract_observed(1, n, &mut out, &mut rec).unwrap();
    prop_assert!(rec.sizes.iter().all(|s| genuine.contains(s)));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repair_encodings_agree_with_text(text in text_strategy()) {
        let slp = repair_build(&text).unwrap();
        prop_assert_eq!(slp.decompress(), text.clone());
        check_encodings(&slp, &text)?;
    }

    #[test]
    fn ctph_encodings_agree_with_text(text in text_strategy(), w in 1usize..8, p in 2u64..12) {
        let slp = build_via_ctph(&text, &CtphParams::new(w, p).unwrap()).unwrap();
        prop_assert_eq!(slp.decompress(), text.clone());
        check_encodings(&slp, &text)?;
    }

    #[test]
    fn extract_ranges(text in text_strategy(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let slp = repair_build(&text).unwrap();
        let shaped = ShapedSlpEncoding::encode(&slp, &EncodeOptions::default()).unwrap();
        let naive = NaiveSlpEncoding::encode(&slp);
        let n = text.len();
        let i = a.index(n);
        let len = b.index(n - i + 1);
        let want = &text[i..i + len];
        prop_assert_eq!(shaped.extract(i as u64 + 1, len as u64).unwrap(), want);
        prop_assert_eq!(naive.extract(i as u64 + 1, len as u64).unwrap(), want);
    }

    #[test]
    fn extract_work_is_amortized(text in text_strategy(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let slp = repair_build(&text).unwrap();
        let shaped = ShapedSlpEncoding::encode(&slp, &EncodeOptions::default()).unwrap();
        let n = text.len();
        let i = a.index(n);
        let len = b.index(n - i + 1) as u64;
        let mut rec = Recorder::default();
        let mut out = Vec::new();
        shaped.extract_observed(i as u64 + 1, len, &mut out, &mut rec).unwrap();
        prop_assert!(rec.pushes <= 2 * (len + slp.height()), "{} pushes for {len} chars", rec.pushes);
    }

    #[test]
    fn serialization_round_trips(text in text_strategy(), seed in any::<u64>(), keep in any::<bool>()) {
        let slp = repair_build(&text).unwrap();
        let bytes = slp.to_bytes();
        prop_assert_eq!(Slp::from_bytes(&bytes).unwrap().to_bytes(), bytes);

        let options = EncodeOptions { seed, keep_size_table: keep, ..Default::default() };
        let shaped = ShapedSlpEncoding::encode(&slp, &options).unwrap();
        let bytes = shaped.to_bytes();
        prop_assert_eq!(bytes.len() as u64, shaped.size_report().total);
        let back = ShapedSlpEncoding::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(back.extract(1, text.len() as u64).unwrap(), text.clone());

        let naive = NaiveSlpEncoding::encode(&slp);
        let bytes = naive.to_bytes();
        prop_assert_eq!(NaiveSlpEncoding::from_bytes(&bytes).unwrap().to_bytes(), bytes);
    }

    #[test]
    fn group_invariants(text in text_strategy()) {
        let slp = repair_build(&text).unwrap();
        let e = ShapedSlpEncoding::encode(&slp, &EncodeOptions::default()).unwrap();
        let stats = slp.stats();
        prop_assert_eq!(e.num_sizes(), stats.d);
        prop_assert!(stats.d <= stats.r);
        let total: u64 = (0..e.num_sizes()).map(|g| e.group_len(g)).sum();
        prop_assert_eq!(total, stats.r);
        prop_assert_eq!(e.start_bitvector().count_ones(), stats.s);
        prop_assert_eq!(e.start_bitvector().len(), stats.n);
    }
}

#[test]
fn seeds_change_group_order_not_content() {
    let text = gen_corpus(3000, 10, 0.01, 5).unwrap();
    let slp = repair_build(&text).unwrap();
    let a = ShapedSlpEncoding::encode(&slp, &EncodeOptions::default()).unwrap();
    let b = ShapedSlpEncoding::encode(
        &slp,
        &EncodeOptions {
            seed: 99,
            ..Default::default()
        },
    )
    .unwrap();
    let again = ShapedSlpEncoding::encode(&slp, &EncodeOptions::default()).unwrap();
    assert_eq!(a.to_bytes(), again.to_bytes());
    assert_eq!(a.extract(1, text.len() as u64).unwrap(), text);
    assert_eq!(b.extract(1, text.len() as u64).unwrap(), text);
}

#[test]
fn repetitive_corpus_compresses() {
    let text = gen_corpus(100_000, 20, 0.001, 11).unwrap();
    let slp = repair_build(&text).unwrap();
    let stats = slp.stats();
    assert!(stats.r < stats.n / 50, "{stats:?}");
    let shaped = ShapedSlpEncoding::encode(&slp, &EncodeOptions::default()).unwrap();
    let naive = NaiveSlpEncoding::encode(&slp);
    assert!(shaped.size_bytes() < naive.size_bytes());
}
