//! Oracles and end-to-end checks for the cross-corpus machinery.

use approx::assert_relative_eq;
use corpusbias::crosscorpus::{
    empirical_quantile, generate_reference_corpora, mean_pairwise_difference, normalized_stat,
    pairwise_differences, reference_distribution, significance, CrossCorpusReport, NormalizedStat,
    SyntheticCorpusSpec,
};
use corpusbias::embedding::TrainConfig;
use corpusbias::pipeline::{make_reference, shard_weat, train_shard};
use corpusbias::synthgen::{generate, BiasSpec};
use corpusbias::weat::{StatisticKind, WeatConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_train() -> TrainConfig {
    TrainConfig {
        dimension: 16,
        iterations: 8,
        min_count: 5,
        window: 8,
        seed: 7,
        ..TrainConfig::default()
    }
}

fn small_weat() -> WeatConfig {
    WeatConfig {
        shuffles: 150,
        alpha: 0.05,
        seed: 7,
        ..WeatConfig::default()
    }
}

fn null_spec(seed: u64) -> BiasSpec {
    BiasSpec {
        beta: 0.0,
        documents: 500,
        doc_len: (10, 20),
        background_vocab: 150,
        seed,
        ..BiasSpec::default()
    }
}

#[test]
fn normalized_stat_matches_independent_two_pass_stdev() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let spec = BiasSpec {
        beta: 0.4,
        seed: 12,
        ..null_spec(12)
    };
    let shard = generate(&spec).unwrap();
    let result = shard_weat(&shard, &spec.word_sets().unwrap(), &small_train(), &small_weat()).unwrap();

    // independent two-pass stdev over the stored randomized sample
    let n = result.randomized.len() as f64;
    let mean: f64 = result.randomized.iter().fold(0.0, |acc, x| acc + x) / n;
    let var: f64 = result
        .randomized
        .iter()
        .fold(0.0, |acc, x| acc + (x - mean).powi(2))
        / n;
    let oracle = result.observed / var.sqrt();

    let norm = normalized_stat(&result).unwrap();
    assert_relative_eq!(norm.value, oracle, epsilon = 1e-12);
    assert_relative_eq!(norm.value, result.normalized.unwrap(), epsilon = 1e-12);

    // a random perturbed sample agrees too
    let fake: Vec<f64> = (0..500).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut perturbed = result.clone();
    perturbed.randomized = fake.clone();
    let m: f64 = fake.iter().sum::<f64>() / 500.0;
    let v: f64 = fake.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 500.0;
    assert_relative_eq!(
        normalized_stat(&perturbed).unwrap().value,
        perturbed.observed / v.sqrt(),
        epsilon = 1e-12
    );
}

#[test]
fn three_corpus_reference_enumerates_signed_differences() {
    let diffs = pairwise_differences(&[1.0, 2.0, 4.0]);
    assert_eq!(diffs, vec![-1.0, -3.0, -2.0]);
    let mut magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(magnitudes, vec![1.0, 2.0, 3.0]);
}

#[test]
fn twenty_values_give_190_differences() {
    let values: Vec<f64> = (0..20).map(f64::from).collect();
    assert_eq!(pairwise_differences(&values).len(), 190);
}

fn report_with_reference(reference: Vec<f64>) -> CrossCorpusReport {
    let threshold = empirical_quantile(&reference, 0.95);
    CrossCorpusReport {
        level: 0.05,
        shuffles: 100,
        statistic: StatisticKind::Sums,
        corpora: Vec::new(),
        excluded: Vec::new(),
        reference,
        threshold,
        observed: Vec::new(),
        manifest: None,
    }
}

#[test]
fn significance_rule_boundary_matches_rank_oracle() {
    // 190 sorted values 1..=190: ceil(0.95 * 190) = 181, so the threshold
    // is the 181st smallest value.
    let reference: Vec<f64> = (1..=190).map(f64::from).collect();
    let report = report_with_reference(reference);
    assert_eq!(report.threshold, 181.0);
    assert!(!significance(180.5, &report, 0.05).unwrap());
    assert!(significance(181.5, &report, 0.05).unwrap());
    assert!(!significance(181.0, &report, 0.05).unwrap(), "strictly exceeds");
    assert!(significance(400.0, &report, 0.05).unwrap(), "above the maximum");
    let median = empirical_quantile(&report.reference, 0.5);
    assert!(!significance(median, &report, 0.05).unwrap());
}

#[test]
fn shuffled_corpus_order_yields_identical_reports() {
    let sources = vec![
        generate(&null_spec(1)).unwrap(),
        generate(&null_spec(2)).unwrap(),
    ];
    let spec = SyntheticCorpusSpec {
        count: 5,
        min_bytes: 8_000,
        max_bytes: 16_000,
        segment_docs: 10,
        seed: 3,
    };
    let corpora = generate_reference_corpora(&sources, &spec).unwrap();
    let sets = null_spec(0).word_sets().unwrap();
    let train_cfg = small_train();
    let trained: Vec<(String, corpusbias::embedding::EmbeddingSet)> = corpora
        .iter()
        .map(|s| (s.name.clone(), train_shard(s, &train_cfg).unwrap()))
        .collect();
    let forward = reference_distribution(&trained, &sets, &small_weat()).unwrap();
    let mut reversed_input = trained;
    reversed_input.reverse();
    let reversed = reference_distribution(&reversed_input, &sets, &small_weat()).unwrap();
    assert_eq!(forward.reference, reversed.reference);
    assert_eq!(forward.threshold, reversed.threshold);
    assert_eq!(
        forward.corpora.len() * (forward.corpora.len() - 1) / 2,
        forward.reference.len()
    );
}

#[test]
fn generated_sizes_stay_in_range_with_mean_near_midpoint() {
    let sources = vec![
        generate(&null_spec(5)).unwrap(),
        generate(&null_spec(6)).unwrap(),
    ];
    let mut sizes = Vec::new();
    for seed in 0..100 {
        let spec = SyntheticCorpusSpec {
            count: 2,
            min_bytes: 30_000,
            max_bytes: 60_000,
            segment_docs: 10,
            seed,
        };
        for corpus in generate_reference_corpora(&sources, &spec).unwrap() {
            let size = corpus.byte_size();
            assert!(
                (30_000..=60_000).contains(&size),
                "size {size} outside range"
            );
            sizes.push(size as f64);
        }
    }
    let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
    let midpoint = 45_000.0;
    assert!(
        (mean - midpoint).abs() / midpoint <= 0.05,
        "mean size {mean} more than 5% from midpoint"
    );
}

#[test]
fn unbiased_pipeline_flags_at_most_ten_percent() {
    // Reference distribution from one pool of unbiased synthetic text. The
    // reference corpora are sized to match the corpora being compared; the
    // procedure presumes comparable scales, as mismatched sizes change how
    // many terms resolve and how noisy each normalized statistic is.
    let sources: Vec<corpusbias::corpus::CorpusShard> = (21..25)
        .map(|seed| {
            generate(&BiasSpec {
                documents: 600,
                ..null_spec(seed)
            })
            .unwrap()
        })
        .collect();
    let spec = SyntheticCorpusSpec {
        count: 8,
        min_bytes: 40_000,
        max_bytes: 60_000,
        segment_docs: 10,
        seed: 77,
    };
    let sets = null_spec(0).word_sets().unwrap();
    let report = make_reference(&sources, &spec, &sets, &small_train(), &small_weat()).unwrap();
    assert_eq!(report.reference.len(), 28);

    // fresh unbiased corpora at the same scale, compared pairwise
    let trials = 100;
    let mut flagged = 0usize;
    for trial in 0..trials {
        let left = generate(&null_spec(1000 + 2 * trial)).unwrap();
        let right = generate(&null_spec(1001 + 2 * trial)).unwrap();
        let norm = |shard: &corpusbias::corpus::CorpusShard| {
            let result = shard_weat(shard, &sets, &small_train(), &small_weat()).unwrap();
            normalized_stat(&result).unwrap()
        };
        let difference = norm(&left).value - norm(&right).value;
        if significance(difference, &report, 0.05).unwrap() {
            flagged += 1;
        }
    }
    let rate = flagged as f64 / trials as f64;
    assert!(rate <= 0.10, "false-flag rate {rate} above 10%");
}

#[test]
fn mean_pairwise_difference_absolute_variant() {
    let a = vec![
        NormalizedStat { corpus: "R_p1".into(), value: 1.0 },
        NormalizedStat { corpus: "R_p2".into(), value: -3.0 },
    ];
    let b = vec![
        NormalizedStat { corpus: "S_p1".into(), value: 2.0 },
        NormalizedStat { corpus: "S_p2".into(), value: 1.0 },
    ];
    assert_eq!(mean_pairwise_difference(&a, &b, false).unwrap(), -2.5);
    assert_eq!(mean_pairwise_difference(&a, &b, true).unwrap(), 2.5);
}

#[test]
fn excluded_corpora_shrink_the_reference() {
    // one corpus with a degenerate embedding (all vectors identical) is
    // excluded: its randomized sample has zero stdev
    let good_sources = vec![generate(&null_spec(31)).unwrap()];
    let spec = SyntheticCorpusSpec {
        count: 3,
        min_bytes: 8_000,
        max_bytes: 12_000,
        segment_docs: 10,
        seed: 5,
    };
    let corpora = generate_reference_corpora(&good_sources, &spec).unwrap();
    let sets = null_spec(0).word_sets().unwrap();
    let train_cfg = small_train();
    let mut trained: Vec<(String, corpusbias::embedding::EmbeddingSet)> = corpora
        .iter()
        .map(|s| (s.name.clone(), train_shard(s, &train_cfg).unwrap()))
        .collect();
    // degenerate corpus: every term shares one vector
    let degenerate_terms: Vec<(String, u64)> = sets
        .x_targets
        .iter()
        .chain(&sets.y_targets)
        .chain(&sets.a_attributes)
        .chain(&sets.b_attributes)
        .map(|t| (t.clone(), 1))
        .collect();
    let n = degenerate_terms.len();
    let vocab = corpusbias::embedding::Vocabulary::from_ordered_terms(degenerate_terms).unwrap();
    let combined: Vec<f64> = (0..n).flat_map(|_| [0.5, 0.25]).collect();
    let degenerate =
        corpusbias::embedding::EmbeddingSet::from_combined(vocab, 2, combined).unwrap();
    trained.push(("zz-degenerate".into(), degenerate));

    let report = reference_distribution(&trained, &sets, &small_weat()).unwrap();
    assert_eq!(report.excluded, vec!["zz-degenerate".to_string()]);
    assert_eq!(report.corpora.len(), 3);
    assert_eq!(report.reference.len(), 3);
}
