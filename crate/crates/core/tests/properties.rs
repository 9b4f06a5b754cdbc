//! Property-based invariants over random corpora and matrices.

use std::collections::BTreeSet;

use ndarray::Array2;
use nmf_forge_core::*;
use proptest::prelude::*;

const ALPHABET: &[&str] = &["alpha", "beta", "gamma", "delta", "echo", "foxtrot"];

fn doc_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(0..ALPHABET.len(), 0..12)
        .prop_map(|ids| ids.into_iter().map(|i| ALPHABET[i]).collect::<Vec<_>>().join(" "))
}

fn corpus_strategy(min_docs: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(doc_strategy(), min_docs..8).prop_map(|texts| {
        let docs = texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| (format!("d{i:03}"), t))
            .collect();
        Corpus::from_documents(docs, "prop").unwrap()
    })
}

fn nonneg_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(0.0f64..2.0, rows * cols)
        .prop_map(move |v| Array2::from_shape_vec((rows, cols), v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tokenize_is_idempotent_over_join(text in "\\PC{0,60}") {
        let once = tokenize(&text);
        let twice = tokenize(&once.join(" "));
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn tokens_contain_only_word_characters(text in "\\PC{0,60}") {
        for token in tokenize(&text) {
            prop_assert!(!token.is_empty());
            prop_assert!(token
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'));
        }
    }

    #[test]
    fn unpruned_vocabulary_is_exactly_the_distinct_token_set(corpus in corpus_strategy(1)) {
        let distinct: BTreeSet<String> = corpus
            .texts()
            .flat_map(tokenize)
            .collect();
        match build_vocabulary(&corpus, &VectorizerParams::keep_all()) {
            Ok(vocab) => {
                let got: BTreeSet<String> = vocab.terms().iter().cloned().collect();
                prop_assert_eq!(got, distinct);
            }
            Err(Error::EmptyVocabulary) => prop_assert!(distinct.is_empty()),
            Err(other) => return Err(TestCaseError::fail(format!("{other}"))),
        }
    }

    #[test]
    fn tfidf_columns_are_nonneg_with_unit_or_zero_norm(corpus in corpus_strategy(1)) {
        let Ok(vocab) = build_vocabulary(&corpus, &VectorizerParams::keep_all()) else {
            return Ok(());
        };
        let x = tfidf_matrix(&corpus, &vocab);
        prop_assert!(x.values.iter().all(|&v| v >= 0.0));
        for col in x.values.columns() {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(norm.abs() < 1e-9 || (norm - 1.0).abs() < 1e-9, "norm {}", norm);
        }
    }

    #[test]
    fn context_and_sppmi_matrices_are_symmetric_nonneg(
        corpus in corpus_strategy(1),
        window in 1usize..4,
        shift in 0.5f64..8.0,
    ) {
        let Ok(vocab) = build_vocabulary(&corpus, &VectorizerParams::keep_all()) else {
            return Ok(());
        };
        let ctx = count_cooccurrences(&corpus, &vocab, window).unwrap();
        let d = vocab.len();
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(ctx.counts[[i, j]], ctx.counts[[j, i]]);
            }
        }
        if ctx.total() == 0 {
            return Ok(());
        }
        let m = sppmi(&ctx, shift).unwrap();
        for i in 0..d {
            for j in 0..d {
                prop_assert!(m.values[[i, j]] >= 0.0);
                prop_assert!((m.values[[i, j]] - m.values[[j, i]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sppmi_entries_do_not_increase_with_shift(
        corpus in corpus_strategy(2),
        window in 1usize..4,
    ) {
        let Ok(vocab) = build_vocabulary(&corpus, &VectorizerParams::keep_all()) else {
            return Ok(());
        };
        let ctx = count_cooccurrences(&corpus, &vocab, window).unwrap();
        if ctx.total() == 0 {
            return Ok(());
        }
        let low = sppmi(&ctx, 2.0).unwrap();
        let high = sppmi(&ctx, 6.0).unwrap();
        for (a, b) in high.values.iter().zip(low.values.iter()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn nmf_iterates_stay_nonneg_and_descend(
        x in nonneg_matrix(6, 5),
        seed in 0u64..1000,
    ) {
        prop_assume!(x.iter().any(|&v| v > 0.0));
        let opts = SolverOptions::new(2).with_seed(seed).with_max_iters(40).with_tol(0.0);
        let f = nmf(&x, &opts).unwrap();
        prop_assert!(f.w.iter().all(|&v| v >= 0.0));
        prop_assert!(f.h.iter().all(|&v| v >= 0.0));
        for pair in f.objective_trace.windows(2) {
            let allowed = pair[0] + 1e-10 * pair[0].abs().max(f64::MIN_POSITIVE);
            prop_assert!(pair[1] <= allowed, "{} then {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn ssnmf_reconstruction_vanishes_on_known_columns(
        x in nonneg_matrix(5, 6),
        known in prop::collection::vec(any::<bool>(), 6),
        seed in 0u64..1000,
    ) {
        prop_assume!(x.iter().any(|&v| v > 0.0));
        prop_assume!(known.iter().any(|&k| k));
        let mut y = Array2::<f64>::zeros((2, 6));
        for j in 0..6 {
            y[[j % 2, j]] = 1.0;
        }
        let mask = MaskMatrix::new(known, 2);
        let opts = SolverOptions::new(2).with_seed(seed).with_max_iters(30);
        let (_, y_prime) = ssnmf(&x, &y, &mask, 1.0, &opts).unwrap();
        let l = mask.to_dense();
        for (v, flag) in y_prime.iter().zip(l.iter()) {
            if *flag == 1.0 {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn binarized_predictions_are_one_hot(scores in nonneg_matrix(4, 7)) {
        let shifted = &scores - 1.0; // allow negative scores too
        let out = binarize_prediction(&shifted);
        for col in out.matrix.columns() {
            prop_assert_eq!(col.iter().filter(|&&v| v == 1.0).count(), 1);
            prop_assert!(col.iter().all(|&v| v == 0.0 || v == 1.0));
        }
    }

    #[test]
    fn highlight_changes_only_named_rows_and_keeps_nonnegativity(
        corpus in corpus_strategy(1),
        pick in 0usize..ALPHABET.len(),
        factor in 0.25f64..4.0,
    ) {
        let Ok(vocab) = build_vocabulary(&corpus, &VectorizerParams::keep_all()) else {
            return Ok(());
        };
        let x = tfidf_matrix(&corpus, &vocab);
        let keyword = ALPHABET[pick].to_string();
        let out = highlight_keywords(&x, &[keyword.clone()], factor).unwrap();
        prop_assert!(out.matrix.values.iter().all(|&v| v >= 0.0));
        for i in 0..x.num_terms() {
            let scaled = vocab.term(i) == keyword;
            for j in 0..x.num_docs() {
                let expected = if scaled { x.values[[i, j]] * factor } else { x.values[[i, j]] };
                prop_assert!((out.matrix.values[[i, j]] - expected).abs() < 1e-12);
            }
        }
    }
}
