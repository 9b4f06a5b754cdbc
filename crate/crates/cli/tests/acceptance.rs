//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measurements. Run with
//! `cargo test -p nmf-forge-cli --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nmf_forge_core::synth::permutation_accuracy;
use nmf_forge_core::*;

fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| 1.0 - rng.random::<f64>())
}

fn assert_non_increasing(trace: &[f64], rel_slack: f64, what: &str) {
    for (i, pair) in trace.windows(2).enumerate() {
        let allowed = pair[0] + rel_slack * pair[0].abs().max(f64::MIN_POSITIVE);
        assert!(
            pair[1] <= allowed,
            "{what}: trace rose at step {i}: {} -> {}",
            pair[0],
            pair[1]
        );
    }
}

/// Criterion 1: monotone descent for all four solvers on 20 random
/// seeded instances each (d,n <= 50, r <= 5), 1e-8 relative slack,
/// under 10 seconds total.
#[test]
fn c01_monotone_descent() {
    let start = Instant::now();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(5..=50);
        let n = rng.random_range(5..=50);
        let r = rng.random_range(1..=5);
        let x = uniform(&mut rng, d, n);
        let opts = SolverOptions::new(r).with_seed(seed).with_tol(0.0).with_max_iters(100);

        let f = nmf(&x, &opts).unwrap();
        assert_non_increasing(&f.objective_trace, 1e-8, "nmf");

        let raw = uniform(&mut rng, d, d);
        let m = cooccurrence::SppmiMatrix {
            values: (&raw + &raw.t()) / 2.0,
            shift: 5.0,
        };
        let f = semantic_nmf(&x, &m, &opts).unwrap();
        assert_non_increasing(&f.objective_trace, 1e-8, "semantic");

        let p = 3;
        let mut y = Array2::<f64>::zeros((p, n));
        for j in 0..n {
            y[[rng.random_range(0..p), j]] = 1.0;
        }
        let model = snmf_train(&x, &y, 1.0, &opts).unwrap();
        assert_non_increasing(&model.objective_trace, 1e-8, "snmf");

        let mut known: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.7).collect();
        known[0] = true;
        let mask = MaskMatrix::new(known, p);
        let (model, _) = ssnmf(&x, &y, &mask, 1.0, &opts).unwrap();
        assert_non_increasing(&model.objective_trace, 1e-8, "ssnmf");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("PASS c01 monotone descent (4 solvers x 20 instances, {elapsed:?})");
}

/// Criterion 2: exact recovery of rank-1 and planted-block instances
/// within 500 iterations, under 1 second.
#[test]
fn c02_exact_recovery() {
    let start = Instant::now();
    let x = ndarray::arr2(&[[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]);
    let f = nmf(&x, &SolverOptions::new(1).with_seed(0)).unwrap();
    assert!(
        f.final_objective() < 1e-8,
        "rank-1 objective {}",
        f.final_objective()
    );

    let blocks = ndarray::arr2(&[
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, 1.0],
    ]);
    let f = nmf(&blocks, &SolverOptions::new(2).with_seed(1)).unwrap();
    assert!(
        f.final_objective() < 1e-6,
        "block objective {}",
        f.final_objective()
    );
    let assign = assign_documents(&f.h).topics;
    assert_eq!(assign[0], assign[1]);
    assert_eq!(assign[2], assign[3]);
    assert_ne!(assign[0], assign[2]);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("PASS c02 exact recovery (rank-1 {:.2e}, {elapsed:?})", f.final_objective());
}

/// Criterion 3: co-occurrence counts and SPPMI match an independent
/// brute-force pair-enumeration oracle entrywise to 1e-12 on 5 random
/// tiny corpora; M symmetric and non-negative; under 1 second.
#[test]
fn c03_sppmi_oracle() {
    let start = Instant::now();
    let words = ["dna", "court", "trial", "blood", "witness", "gun"];
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 300);
        let n_docs = rng.random_range(2..=4);
        let mut texts = Vec::new();
        let mut budget = 30usize;
        for _ in 0..n_docs {
            let len = rng.random_range(1..=budget.min(10));
            budget -= len;
            let tokens: Vec<&str> = (0..len)
                .map(|_| words[rng.random_range(0..words.len())])
                .collect();
            texts.push(tokens.join(" "));
        }
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| (format!("d{i}"), t.clone()))
            .collect();
        let corpus = Corpus::from_documents(docs, "oracle").unwrap();
        let vocab = build_vocabulary(&corpus, &VectorizerParams::keep_all()).unwrap();
        let window = rng.random_range(1..=3);
        let shift = 1.0 + rng.random::<f64>() * 5.0;

        // brute-force oracle: enumerate every ordered position pair
        let d = vocab.len();
        let mut oracle = vec![vec![0u64; d]; d];
        for text in corpus.texts() {
            let filtered: Vec<usize> = tokenize(text)
                .into_iter()
                .filter_map(|t| vocab.index_of(&t))
                .collect();
            for i in 0..filtered.len() {
                for j in 0..filtered.len() {
                    if i != j && i.abs_diff(j) <= window {
                        oracle[filtered[i]][filtered[j]] += 1;
                    }
                }
            }
        }
        let total: u64 = oracle.iter().flatten().sum();

        let ctx = count_cooccurrences(&corpus, &vocab, window).unwrap();
        for i in 0..d {
            for j in 0..d {
                assert_eq!(ctx.counts[[i, j]], oracle[i][j], "count ({i},{j}) seed {seed}");
            }
        }
        if total == 0 {
            continue;
        }
        let m = sppmi(&ctx, shift).unwrap();
        for i in 0..d {
            let row: u64 = oracle[i].iter().sum();
            for j in 0..d {
                let col: u64 = oracle.iter().map(|r| r[j]).sum();
                let expected = if oracle[i][j] == 0 {
                    0.0
                } else {
                    ((oracle[i][j] as f64 * total as f64) / (row as f64 * col as f64)).ln()
                        - shift.ln()
                };
                let expected = expected.max(0.0);
                assert!(
                    (m.values[[i, j]] - expected).abs() < 1e-12,
                    "sppmi ({i},{j}) seed {seed}: {} vs {}",
                    m.values[[i, j]],
                    expected
                );
                assert!(m.values[[i, j]] >= 0.0);
                assert!((m.values[[i, j]] - m.values[[j, i]]).abs() < 1e-12);
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("PASS c03 sppmi oracle (5 corpora, {elapsed:?})");
}

/// Criterion 4: full pipeline recovers planted topics (4 x 15 x 60,
/// noise 0.1) with permutation-matched accuracy >= 0.9 on at least 9 of
/// 10 seeds, under 30 seconds.
#[test]
fn c04_planted_topic_recovery() {
    let start = Instant::now();
    let mut good = 0;
    let mut accuracies = Vec::new();
    for seed in 0..10u64 {
        let spec = PlantedSpec::new(4, 15, 60)
            .with_vocab_per_topic(10)
            .with_noise(0.1)
            .with_seed(seed);
        let (corpus, _, truth) = generate(&spec).unwrap();
        let vocab = build_vocabulary(&corpus, &VectorizerParams::keep_all()).unwrap();
        let x = tfidf_matrix(&corpus, &vocab);
        let f = nmf(&x.values, &SolverOptions::new(4).with_seed(seed)).unwrap();
        let assigned = assign_documents(&f.h).topics;
        let truth_vec: Vec<usize> = x.doc_ids.iter().map(|id| truth[id]).collect();
        let accuracy = permutation_accuracy(&assigned, &truth_vec, 4);
        accuracies.push(accuracy);
        if accuracy >= 0.9 {
            good += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(good >= 9, "only {good}/10 seeds reached 0.9: {accuracies:?}");
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("PASS c04 planted-topic recovery ({good}/10 seeds, {elapsed:?})");
}

/// Matches each planted sub-topic to the layer-0 dictionary column
/// holding most of its vocabulary block; None unless one-to-one.
fn match_planted_topics(
    w0: &Array2<f64>,
    vocab: &Vocabulary,
    n_topics: usize,
) -> Option<Vec<usize>> {
    let block_weight = |topic: usize, col: usize| -> f64 {
        let prefix = format!("t{topic:02}w");
        (0..vocab.len())
            .filter(|&i| vocab.term(i).starts_with(&prefix))
            .map(|i| w0[[i, col]])
            .sum()
    };
    let map: Vec<usize> = (0..n_topics)
        .map(|s| {
            (0..w0.ncols())
                .max_by(|&a, &b| block_weight(s, a).partial_cmp(&block_weight(s, b)).unwrap())
                .unwrap()
        })
        .collect();
    let mut dedup = map.clone();
    dedup.sort_unstable();
    dedup.dedup();
    (dedup.len() == n_topics).then_some(map)
}

/// Criterion 5: with a planted 4 -> 2 merge, bottom-up [4,2] recovers
/// the merge map exactly on >= 8 of 10 seeds and top-down [2,2] splits
/// the two super-groups at level 0 on >= 8 of 10 seeds, under 60 s.
#[test]
fn c05_hierarchy_recovery() {
    let start = Instant::now();
    let mut bottomup_good = 0;
    let mut topdown_good = 0;
    for seed in 0..10u64 {
        let spec = PlantedSpec::new(4, 20, 80)
            .with_vocab_per_topic(8)
            .with_noise(0.05)
            .with_contiguous_supers(2)
            .with_seed(seed);
        let (corpus, _, truth) = generate(&spec).unwrap();
        let vocab = build_vocabulary(&corpus, &VectorizerParams::keep_all()).unwrap();
        let x = tfidf_matrix(&corpus, &vocab);

        let opts = SolverOptions::new(4).with_seed(seed).with_tol(1e-7);
        let chain = bottomup_hnmf(&x.values, &[4, 2], &opts).unwrap();
        if let Some(topic_of) = match_planted_topics(&chain.w_layers[0], &vocab, 4) {
            let w1 = &chain.w_layers[1];
            let super_of = |t: usize| usize::from(w1.row(t)[1] > w1.row(t)[0]);
            let g: Vec<usize> = (0..4).map(|s| super_of(topic_of[s])).collect();
            if g[0] == g[1] && g[2] == g[3] && g[0] != g[2] {
                bottomup_good += 1;
            }
        }

        let tree = topdown_hnmf(&x.values, &[2, 2], &SolverOptions::new(2).with_seed(seed)).unwrap();
        let groups: Vec<Vec<usize>> = tree
            .root
            .children
            .iter()
            .map(|c| {
                c.doc_indices
                    .iter()
                    .map(|&j| truth[&x.doc_ids[j]] / 2)
                    .collect()
            })
            .filter(|g: &Vec<usize>| !g.is_empty())
            .collect();
        if groups.len() == 2
            && groups.iter().all(|g| g.iter().all(|&s| s == g[0]))
            && groups[0][0] != groups[1][0]
        {
            topdown_good += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(bottomup_good >= 8, "bottom-up merge recovered on {bottomup_good}/10");
    assert!(topdown_good >= 8, "top-down partition on {topdown_good}/10");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "PASS c05 hierarchy recovery (bottom-up {bottomup_good}/10, top-down {topdown_good}/10, {elapsed:?})"
    );
}

/// Criterion 6: disjoint-vocabulary 3-class corpus (15 docs/class),
/// 75/25 split, lambda = 1, r = 3: SNMF and SSNMF both reach mean LAS
/// 1.0 over 10 trials, under 60 s.
#[test]
fn c06_supervised_separability() {
    let start = Instant::now();
    let spec = PlantedSpec::new(3, 15, 40)
        .with_vocab_per_topic(8)
        .with_class_per_topic()
        .with_seed(0);
    let (corpus, labels, _) = generate(&spec).unwrap();
    let vocab = build_vocabulary(&corpus, &VectorizerParams::keep_all()).unwrap();
    let x = tfidf_matrix(&corpus, &vocab);
    let y = LabelMatrix::from_label_set(&labels, &x.doc_ids);
    let n = x.values.ncols();
    let mut snmf_scores = Vec::new();
    let mut ssnmf_scores = Vec::new();
    for trial in 0..10u64 {
        let seed = trial;
        let split = split_train_test(n, 0.75, seed).unwrap();
        let opts = SolverOptions::new(3).with_seed(seed);
        let y_test = TrainTestSplit::select(&y.y, &split.test);

        let x_train = TrainTestSplit::select(&x.values, &split.train);
        let y_train = TrainTestSplit::select(&y.y, &split.train);
        let x_test = TrainTestSplit::select(&x.values, &split.test);
        let model = snmf_train(&x_train, &y_train, 1.0, &opts).unwrap();
        let pred = snmf_predict(&model, &x_test).unwrap();
        snmf_scores.push(las(&binarize_prediction(&pred.scores).matrix, &y_test).unwrap());

        let mask = split.mask(y.num_classes());
        let (_, y_prime) = ssnmf(&x.values, &y.y, &mask, 1.0, &opts).unwrap();
        let scores = TrainTestSplit::select(&y_prime, &split.test);
        ssnmf_scores.push(las(&binarize_prediction(&scores).matrix, &y_test).unwrap());
    }
    let snmf_mean = snmf_scores.iter().sum::<f64>() / 10.0;
    let ssnmf_mean = ssnmf_scores.iter().sum::<f64>() / 10.0;
    let elapsed = start.elapsed();
    assert_eq!(snmf_mean, 1.0, "snmf trials {snmf_scores:?}");
    assert_eq!(ssnmf_mean, 1.0, "ssnmf trials {ssnmf_scores:?}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("PASS c06 supervised separability (snmf 1.0, ssnmf 1.0 over 10 trials, {elapsed:?})");
}

/// Criterion 7: Y' .* L = 0 exactly on every semi-supervised run, and an
/// all-ones mask yields Y' = 0.
#[test]
fn c07_mask_algebra() {
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 700);
        let d = rng.random_range(4..=12);
        let n = rng.random_range(4..=12);
        let p = rng.random_range(2..=4);
        let x = uniform(&mut rng, d, n);
        let mut y = Array2::<f64>::zeros((p, n));
        for j in 0..n {
            y[[rng.random_range(0..p), j]] = 1.0;
        }
        let mut known: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.6).collect();
        known[n - 1] = true;
        let mask = MaskMatrix::new(known, p);
        let opts = SolverOptions::new(2).with_seed(seed).with_max_iters(60);
        let (_, y_prime) = ssnmf(&x, &y, &mask, 1.0, &opts).unwrap();
        let l = mask.to_dense();
        let masked = &y_prime * &l;
        assert!(masked.iter().all(|&v| v == 0.0), "Y' .* L != 0 at seed {seed}");

        let all_known = MaskMatrix::new(vec![true; n], p);
        let (_, y_prime) = ssnmf(&x, &y, &all_known, 1.0, &opts).unwrap();
        assert!(y_prime.iter().all(|&v| v == 0.0), "all-ones mask must zero Y'");
    }
    println!("PASS c07 mask algebra (Y' .* L = 0 exact; all-ones mask zeroes Y')");
}

/// Criterion 8: on a corpus where "saliva" sits at rank 11 in every
/// topic of a baseline rank-3 factorization, highlighting it by factor 5
/// and re-solving with the same seed strictly improves its best
/// within-topic rank.
#[test]
fn c08_keyword_highlight_promotes_term() {
    let mut docs = Vec::new();
    for topic in 0..3 {
        for j in 0..15 {
            let mut words = Vec::new();
            for w in 0..10 {
                let reps = if w == j % 10 { 3 } else { 2 };
                for _ in 0..reps {
                    words.push(format!("k{topic}{}", (b'a' + w as u8) as char));
                }
            }
            words.push("saliva".to_string());
            docs.push((format!("t{topic}d{j:02}"), words.join(" ")));
        }
    }
    let corpus = Corpus::from_documents(docs, "mem").unwrap();
    let vocab = build_vocabulary(&corpus, &VectorizerParams::keep_all()).unwrap();
    let x = tfidf_matrix(&corpus, &vocab);
    let rank_of_saliva = |w: &Array2<f64>| -> Vec<usize> {
        let row = vocab.index_of("saliva").unwrap();
        (0..w.ncols())
            .map(|c| {
                let col = w.column(c);
                1 + (0..vocab.len())
                    .filter(|&i| {
                        col[i] > col[row] || (col[i] == col[row] && vocab.term(i) < "saliva")
                    })
                    .count()
            })
            .collect()
    };
    let opts = SolverOptions::new(3).with_seed(0);
    let baseline = nmf(&x.values, &opts).unwrap();
    let base_ranks = rank_of_saliva(&baseline.w);
    assert!(
        base_ranks.iter().all(|&r| r == 11),
        "baseline ranks {base_ranks:?}"
    );
    let highlighted = highlight_keywords(&x, &["saliva".into()], 5.0).unwrap();
    let resolved = nmf(&highlighted.matrix.values, &opts).unwrap();
    let high_ranks = rank_of_saliva(&resolved.w);
    let best_before = *base_ranks.iter().min().unwrap();
    let best_after = *high_ranks.iter().min().unwrap();
    assert!(
        best_after < best_before,
        "best rank {best_before} -> {best_after}"
    );
    println!("PASS c08 keyword highlight (best rank {best_before} -> {best_after})");
}

/// Criterion 9: every CLI command re-run with an identical config and
/// seed produces byte-identical JSON reports.
#[test]
fn c09_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_nmf-forge");
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    let run = |args: &[&str]| {
        let output = Command::new(bin)
            .args(args)
            .current_dir(dir.path())
            .output()
            .expect("binary runs");
        assert!(
            output.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    };
    let synth_args = [
        "synth", "--topics", "3", "--docs-per-topic", "8", "--words-per-doc", "40",
        "--vocab-per-topic", "6", "--noise", "0.1", "--supers", "2", "--seed", "17",
        "--out", "corpus",
    ];
    run(&synth_args);
    let first_doc = std::fs::read(corpus_dir.join("t00d000.txt")).unwrap();
    run(&synth_args);
    assert_eq!(
        first_doc,
        std::fs::read(corpus_dir.join("t00d000.txt")).unwrap(),
        "synth must be deterministic"
    );

    let labels = "corpus/labels.csv";
    let commands: Vec<Vec<&str>> = vec![
        vec!["nmf", "--corpus", "corpus", "--rank", "3", "--seed", "5", "--out", "o-nmf"],
        vec!["semantic", "--corpus", "corpus", "--rank", "3", "--window", "3", "--seed", "5", "--out", "o-sem"],
        vec!["hnmf-topdown", "--corpus", "corpus", "--ranks", "2,2", "--seed", "5", "--out", "o-td"],
        vec!["hnmf-bottomup", "--corpus", "corpus", "--ranks", "3,2", "--seed", "5", "--out", "o-bu"],
        vec!["snmf", "--corpus", "corpus", "--labels", labels, "--rank", "3", "--trials", "3", "--seed", "5", "--out", "o-snmf"],
        vec!["ssnmf", "--corpus", "corpus", "--labels", labels, "--rank", "3", "--trials", "3", "--seed", "5", "--out", "o-ssnmf"],
    ];
    for args in &commands {
        run(args);
        let out_dir = dir.path().join(args.last().unwrap());
        let first = std::fs::read(out_dir.join("report.json")).unwrap();
        run(args);
        let second = std::fs::read(out_dir.join("report.json")).unwrap();
        assert_eq!(first, second, "report.json differs across reruns of {args:?}");
    }
    println!("PASS c09 CLI determinism (6 commands + synth byte-identical on rerun)");
}

/// Criterion 10: prediction is unchanged under the factorization's
/// diagonal rescaling. The rescaling preserving the model (WH and BH,
/// with H -> D^-1 H) scales W and B by the same positive diagonal:
/// W -> WD, B -> BD; that leaves B (W'W)^-1 W' invariant.
#[test]
fn c10_prediction_scale_invariance() {
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        let d = rng.random_range(4..=10);
        let r = rng.random_range(2..=4);
        let p = rng.random_range(2..=4);
        let k = rng.random_range(1..=6);
        let w = uniform(&mut rng, d, r);
        let b = uniform(&mut rng, p, r);
        let x_test = uniform(&mut rng, d, k);
        let scales: Vec<f64> = (0..r).map(|_| 0.1 + 2.9 * rng.random::<f64>()).collect();
        let mut wd = w.clone();
        let mut bd = b.clone();
        for (c, &s) in scales.iter().enumerate() {
            wd.column_mut(c).mapv_inplace(|v| v * s);
            bd.column_mut(c).mapv_inplace(|v| v * s);
        }
        let model = |w: Array2<f64>, b: Array2<f64>| SupervisedModel {
            w,
            b,
            h: Array2::zeros((r, 1)),
            lambda: 1.0,
            objective_trace: vec![0.0],
            iterations_run: 0,
        };
        let base = snmf_predict(&model(w, b), &x_test).unwrap();
        let scaled = snmf_predict(&model(wd, bd), &x_test).unwrap();
        for (a, b) in base.scores.iter().zip(scaled.scores.iter()) {
            assert!((a - b).abs() < 1e-8, "seed {seed}: {a} vs {b}");
        }
    }
    println!("PASS c10 prediction scale invariance (|delta| < 1e-8 under diagonal rescaling)");
}

/// The label round-trip invariant behind the supervised pipeline: a
/// label set written to a matrix and read back is unchanged.
#[test]
fn label_matrix_roundtrip_via_synth() {
    let spec = PlantedSpec::new(3, 4, 10).with_class_per_topic().with_seed(2);
    let (corpus, labels, _) = generate(&spec).unwrap();
    let matrix = LabelMatrix::from_label_set(&labels, &corpus.doc_ids());
    let back = matrix.to_assignments();
    let expected: Vec<std::collections::BTreeSet<usize>> = corpus
        .doc_ids()
        .iter()
        .map(|id| labels.labels_of(id))
        .collect();
    assert_eq!(back, expected);
    let _ = BTreeMap::<String, usize>::new();
}
