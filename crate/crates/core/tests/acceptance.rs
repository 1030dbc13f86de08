//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Criteria marked full-scale require the real monthly dumps and run only
//! when explicitly requested (see `full_scale_regeneration`).

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::time::Instant;

use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vforge_core::analytics::{clique_size_stats, ArtistCountMode};
use vforge_core::artist_graph::ArtistGraph;
use vforge_core::clique::{
    build_cliques, collect_occurrences, extract_occurrences, Clique, TrackOccurrence, Version,
};
use vforge_core::config::{MatchConfig, SplitConfig};
use vforge_core::ids::{ArtistId, ReleaseId};
use vforge_core::ingest::{collect_stream, parse_artists, parse_releases, DumpFormat};
use vforge_core::matcher::{dedupe_urls, MatchReason, Matcher, VideoCandidate};
use vforge_core::metrics::{evaluate, EvalInstance};
use vforge_core::normalize::Normalizer;
use vforge_core::splitter::{find_reserved, make_splits, SplitSet};
use vforge_core::{fixtures, NormalizedTitle};

use common::{oracle_metrics, oracle_partition, pipeline_shape, NaiveDsu, PartitionShape};

fn occurrence(
    release: u64,
    title: &str,
    performers: &[u64],
    writers: &[u64],
) -> TrackOccurrence {
    TrackOccurrence {
        release_id: ReleaseId(release),
        position: "1".into(),
        raw_title: title.to_string(),
        normalized_title: NormalizedTitle::from_canonical(title.to_string()),
        performer_ids: performers.iter().copied().map(ArtistId).collect(),
        featuring_ids: BTreeSet::new(),
        writer_ids_expanded: writers.iter().copied().map(ArtistId).collect(),
        genres: vec![],
        styles: vec![],
        year: None,
        country: None,
    }
}

/// Criterion 1: the full desk-scale dump fixture, fed through ingest (gzip +
/// XML), must produce exactly the partition computed by the exhaustive
/// pairwise oracle, in under five seconds.
#[test]
fn fixture_pipeline_matches_bruteforce_oracle() {
    let started = Instant::now();
    let corpus = fixtures::corpus(42);

    let track_count: usize = corpus.releases.iter().map(|r| r.tracks.len()).sum();
    assert!(
        (50..=80).contains(&corpus.artists.len()),
        "artist count {} outside fixture envelope",
        corpus.artists.len()
    );
    assert!(
        (100..=170).contains(&corpus.releases.len()),
        "release count {} outside fixture envelope",
        corpus.releases.len()
    );
    assert!(
        (330..=470).contains(&track_count),
        "track count {track_count} outside fixture envelope"
    );

    // Round-trip the fixture through the wire formats: artists gzipped XML,
    // releases plain XML.
    let artists_xml = fixtures::artists_xml(&corpus);
    let mut encoder = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    encoder.write_all(artists_xml.as_bytes()).unwrap();
    let artists_gz = encoder.finish().unwrap();
    let releases_xml = fixtures::releases_xml(&corpus);

    let artists = collect_stream(parse_artists(artists_gz.as_slice(), DumpFormat::XmlDump).unwrap())
        .unwrap();
    let releases =
        collect_stream(parse_releases(releases_xml.as_bytes(), DumpFormat::XmlDump).unwrap())
            .unwrap();
    assert_eq!(artists.records, corpus.artists, "artist ingest round-trip");
    assert_eq!(releases.records, corpus.releases, "release ingest round-trip");

    let normalizer = Normalizer::default();
    let graph = ArtistGraph::from_records(artists.records.clone());
    let (occurrences, counters) = collect_occurrences(extract_occurrences(
        releases.records.iter().cloned(),
        &graph,
        &normalizer,
    ));
    assert!(counters.reconciles());
    assert!(counters.no_writer >= 20, "the no-writer tracks must be dropped");
    assert!(counters.empty_title >= 6, "empty normalized titles must be dropped");

    let (cliques, stats) = build_cliques(occurrences.clone(), &graph, false);
    assert!(stats.reconciles());

    let got: PartitionShape = pipeline_shape(&cliques);
    let expected = oracle_partition(&artists.records, &releases.records, &normalizer);
    assert_eq!(got, expected, "pipeline partition differs from oracle");

    // Designed structures must be present: a merged clique can only exist if
    // alias- and membership-mediated writer sharing worked.
    assert!(cliques.iter().any(|c| c.normalized_title.as_str() == "silver morning"
        && c.versions.len() == 3));
    assert!(cliques.iter().any(|c| c.normalized_title.as_str() == "paper boats"
        && c.versions.len() == 3));
    assert!(cliques.iter().any(|c| c.normalized_title.as_str() == "glass river"
        && c.versions.len() == 3));
    assert_eq!(
        cliques
            .iter()
            .filter(|c| c.normalized_title.as_str() == "night letter")
            .count(),
        2,
        "disjoint writers under one title must stay two cliques"
    );
    assert!(
        !cliques.iter().any(|c| c.normalized_title.as_str() == "lone signal"),
        "single-version works are discarded"
    );
    // Title variability limitation: same writers, different titles.
    assert!(cliques.iter().any(|c| c.normalized_title.as_str() == "moon over naples"));
    assert!(cliques.iter().any(|c| c.normalized_title.as_str() == "spanish eyes"));

    // Determinism under input shuffling.
    let mut shuffled = occurrences;
    shuffled.reverse();
    let (again, _) = build_cliques(shuffled, &graph, false);
    assert_eq!(cliques, again, "clique output must not depend on input order");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "fixture pipeline took {elapsed:?}");
    println!("ACCEPTANCE fixture-pipeline-oracle: PASS ({} cliques in {elapsed:?})", cliques.len());
}

/// Criterion 2: on 200 random fixtures the clique builder equals a
/// brute-force pairwise union-find partition, and shuffling the input never
/// changes the output.
#[test]
fn clique_builder_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let graph = ArtistGraph::from_records([]); // no edges: writer sets are pre-expanded
    for fixture in 0..200 {
        let n = rng.random_range(2..=500);
        let titles = ["t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"];
        let occurrences: Vec<TrackOccurrence> = (0..n)
            .map(|i| {
                let title = titles[rng.random_range(0..titles.len())];
                let writer_count = rng.random_range(1..=3);
                let writers: Vec<u64> =
                    (0..writer_count).map(|_| rng.random_range(0..30)).collect();
                let performer_count = rng.random_range(1..=2);
                let performers: Vec<u64> =
                    (0..performer_count).map(|_| rng.random_range(0..20)).collect();
                occurrence(i as u64 + 1, title, &performers, &writers)
            })
            .collect();

        let (cliques, stats) = build_cliques(occurrences.clone(), &graph, false);
        assert!(stats.reconciles(), "fixture {fixture}: counters do not reconcile");

        // Brute force: pairwise union over (title equal && writers intersect).
        let mut dsu = NaiveDsu::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if occurrences[i].normalized_title == occurrences[j].normalized_title
                    && !occurrences[i]
                        .writer_ids_expanded
                        .is_disjoint(&occurrences[j].writer_ids_expanded)
                {
                    dsu.union(i, j);
                }
            }
        }
        let mut components: BTreeMap<usize, Vec<&TrackOccurrence>> = BTreeMap::new();
        for (i, occ) in occurrences.iter().enumerate() {
            components.entry(dsu.find(i)).or_default().push(occ);
        }
        let mut expected = PartitionShape::new();
        for members in components.into_values() {
            let mut versions: BTreeMap<Vec<ArtistId>, BTreeSet<(u64, String)>> = BTreeMap::new();
            for occ in members {
                versions
                    .entry(occ.artist_key())
                    .or_default()
                    .insert((occ.release_id.0, occ.position.clone()));
            }
            if versions.len() >= 2 {
                expected.insert(versions.into_values().collect());
            }
        }
        assert_eq!(
            pipeline_shape(&cliques),
            expected,
            "fixture {fixture}: partition differs from brute force"
        );

        let mut shuffled = occurrences;
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut rng);
        let (again, _) = build_cliques(shuffled, &graph, false);
        assert_eq!(cliques, again, "fixture {fixture}: shuffle changed output");
    }
    println!("ACCEPTANCE clique-property-suite: PASS (200 fixtures)");
}

fn random_string(rng: &mut ChaCha8Rng) -> String {
    const POOLS: [&str; 9] = [
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789",
        "()[]&.,!?'\"-:;_/+*%$#@^{}",
        " \t\n  ",
        "àéîõüçñÅØßÆœİı",
        "\u{300}\u{301}\u{308}\u{327}",
        "歌曲音楽の夜",
        "песня ночи",
        "🎵🎸🌙",
        "the a an The An A THE ",
    ];
    let length = rng.random_range(0..40);
    let mut out = String::new();
    if rng.random_range(0..4) == 0 {
        out.push_str(["The ", "A ", "An ", "the "][rng.random_range(0..4)]);
    }
    for _ in 0..length {
        let pool: Vec<char> = POOLS[rng.random_range(0..POOLS.len())].chars().collect();
        out.push(*pool.choose(rng).unwrap());
    }
    out
}

/// Criterion 3: idempotence and the reduction law on 10,000 random strings,
/// plus the exact rule examples.
#[test]
fn normalization_suite() {
    let normalizer = Normalizer::default();
    assert_eq!(normalizer.full("Love Theme (Radio Edit)").as_str(), "love theme");
    assert_eq!(normalizer.full("Café & Crème").as_str(), "cafe and creme");
    assert_eq!(normalizer.full("").as_str(), "");
    assert_eq!(normalizer.full("The Long Road").as_str(), "long road");
    assert_eq!(
        normalizer.matching("Love Theme (Radio Edit)").as_str(),
        "love theme (radio edit)"
    );
    assert_eq!(normalizer.matching("The Song").as_str(), "song");
    assert_eq!(normalizer.matching("SONG").as_str(), "song");

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..10_000 {
        let s = random_string(&mut rng);
        let full = normalizer.full(&s);
        let matching = normalizer.matching(&s);
        assert_eq!(
            normalizer.full(full.as_str()),
            full,
            "case {i}: full not idempotent on {s:?}"
        );
        assert_eq!(
            normalizer.matching(matching.as_str()),
            matching,
            "case {i}: matching not idempotent on {s:?}"
        );
        assert_eq!(
            normalizer.reduce_matching_to_full(&matching),
            full,
            "case {i}: reduction law broken on {s:?}"
        );
    }
    println!("ACCEPTANCE normalization-suite: PASS (10000 strings)");
}

/// Criterion 4: 25 hand-built candidates covering every gate produce the
/// expected decision reasons.
#[test]
fn matcher_truth_table() {
    use vforge_core::ingest::ArtistRecord;
    let mk = |id: u64, name: &str| ArtistRecord {
        id: ArtistId(id),
        name: name.to_string(),
        name_variations: vec![],
        alias_ids: vec![],
        member_ids: vec![],
        group_ids: vec![],
    };
    let graph = ArtistGraph::from_records([mk(1, "Alpha"), mk(2, "Beta"), mk(3, "Gamma")]);
    let matcher = Matcher::new(&graph, Normalizer::default(), MatchConfig::default());

    let version = |performers: &[u64], featuring: &[u64]| {
        let occ = TrackOccurrence {
            release_id: ReleaseId(1),
            position: "A1".into(),
            raw_title: "Song".into(),
            normalized_title: Normalizer::default().full("Song"),
            performer_ids: performers.iter().copied().map(ArtistId).collect(),
            featuring_ids: featuring.iter().copied().map(ArtistId).collect(),
            writer_ids_expanded: [ArtistId(9)].into_iter().collect(),
            genres: vec![],
            styles: vec![],
            year: None,
            country: None,
        };
        Version {
            version_id: "v".into(),
            artist_key: occ.artist_key(),
            occurrences: vec![occ],
            urls: vec![],
        }
    };
    let solo = version(&[1], &[]);
    let duo = version(&[1, 2], &[]);
    let feat = version(&[1], &[3]);

    struct Case {
        name: &'static str,
        version: &'static str,
        title: &'static str,
        uploader: &'static str,
        topic: bool,
        description: &'static str,
        duration: u32,
        categories: &'static [&'static str],
        artist_field: Option<&'static str>,
        expect: MatchReason,
    }
    let base = |name, title, expect| Case {
        name,
        version: "solo",
        title,
        uploader: "Alpha - Topic",
        topic: true,
        description: "",
        duration: 210,
        categories: &["Music"],
        artist_field: None,
        expect,
    };

    let cases = vec![
        // Category gate.
        Case { categories: &["Entertainment"], ..base("wrong category", "Song", MatchReason::NotMusicCategory) },
        Case { categories: &[], ..base("no categories", "Song", MatchReason::NotMusicCategory) },
        Case { categories: &["music"], ..base("case-insensitive category", "Song", MatchReason::AcceptedExact) },
        // Officiality gate: the three conditions and a failure.
        Case { uploader: "Random Fan Uploads", topic: false, ..base("unofficial", "Song", MatchReason::NotOfficial) },
        Case { uploader: "Big Label", topic: false, description: "Provided to YouTube by Big Label", ..base("official via description marker", "Song", MatchReason::ArtistMismatch) },
        Case { uploader: "Big Label", topic: false, description: "Provided to YouTube by Big Label", artist_field: Some("Alpha"), ..base("marker official + artist field", "Song", MatchReason::AcceptedExact) },
        Case { uploader: "Alpha - Topic", topic: true, ..base("topic channel official", "Song", MatchReason::AcceptedExact) },
        Case { uploader: "Alpha", topic: false, ..base("uploader equals artist name", "Song", MatchReason::AcceptedExact) },
        Case { uploader: "Alpha - Topic", topic: false, ..base("uploader with topic suffix", "Song", MatchReason::AcceptedExact) },
        Case { uploader: "Alpha Official", topic: false, ..base("uploader with official suffix", "Song", MatchReason::AcceptedExact) },
        // Duration gate boundary.
        Case { duration: 1200, ..base("duration at limit", "Song", MatchReason::AcceptedExact) },
        Case { duration: 1201, ..base("duration over limit", "Song", MatchReason::TooLong) },
        Case { duration: 0, ..base("zero duration", "Song", MatchReason::AcceptedExact) },
        // Exact level.
        base("bare exact title", "Song", MatchReason::AcceptedExact),
        base("query-form exact", "Alpha - Song", MatchReason::AcceptedExact),
        base("article variant", "The Song", MatchReason::AcceptedExact),
        base("case variant", "SONG", MatchReason::AcceptedExact),
        // Stripped level.
        base("decorated bare title", "Song (Official Video)", MatchReason::AcceptedStripped),
        base("decorated query title", "Alpha - Song (Official Video)", MatchReason::AcceptedStripped),
        base("bracketed remaster", "Song [Remastered]", MatchReason::AcceptedStripped),
        // Version markers are kept: a different edit is a different version.
        base("edit marker no match", "Song (Radio Edit)", MatchReason::TitleMismatch),
        base("unrelated title", "Completely Different Tune", MatchReason::TitleMismatch),
        // Permutation level.
        Case { version: "duo", ..base("reordered duo", "Beta, Alpha - Song", MatchReason::AcceptedPermutation) },
        Case { version: "feat", ..base("featuring rendered", "Alpha - Song (featuring Gamma)", MatchReason::AcceptedExact) },
        Case { version: "feat", ..base("featuring omitted", "Alpha - Song", MatchReason::AcceptedPermutation) },
    ];
    assert_eq!(cases.len(), 25);

    for case in &cases {
        let version = match case.version {
            "duo" => &duo,
            "feat" => &feat,
            _ => &solo,
        };
        let candidate = VideoCandidate {
            video_id: "v1".into(),
            title: case.title.to_string(),
            uploader: case.uploader.to_string(),
            channel_is_topic: case.topic,
            description: case.description.to_string(),
            duration_s: case.duration,
            categories: case.categories.iter().map(|s| s.to_string()).collect(),
            artist_field: case.artist_field.map(String::from),
        };
        let outcome = matcher.match_version(version, std::slice::from_ref(&candidate));
        assert_eq!(
            outcome.decisions[0].reason, case.expect,
            "case {:?}: got {:?}, expected {:?}",
            case.name, outcome.decisions[0].reason, case.expect
        );
        assert_eq!(outcome.decisions[0].verdict == vforge_core::matcher::Verdict::Accept,
            case.expect.is_accept(), "case {:?} verdict", case.name);
    }
    println!("ACCEPTANCE matcher-truth-table: PASS (25 cases)");
}

/// Criterion 5: after deduplication no intra-clique duplicate video id
/// remains, every surviving clique has at least two url-bearing versions,
/// and all counters reconcile.
#[test]
fn dedupe_invariants_on_adversarial_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let build_version = |clique: usize, index: usize, occs: usize, urls: Vec<String>| Version {
        version_id: format!("c{clique}-v{index}"),
        artist_key: vec![ArtistId(index as u64 + 1)],
        occurrences: vec![
            TrackOccurrence {
                release_id: ReleaseId((clique * 100 + index) as u64 + 1),
                position: "1".into(),
                raw_title: "w".into(),
                normalized_title: NormalizedTitle::from_canonical("w".into()),
                performer_ids: [ArtistId(index as u64 + 1)].into_iter().collect(),
                featuring_ids: BTreeSet::new(),
                writer_ids_expanded: [ArtistId(9)].into_iter().collect(),
                genres: vec![],
                styles: vec![],
                year: None,
                country: None,
            };
            occs
        ],
        urls,
    };

    for round in 0..60 {
        let clique_count = rng.random_range(1..=6);
        let mut cliques = Vec::new();
        for c in 0..clique_count {
            let version_count = rng.random_range(2..=6);
            let versions: Vec<Version> = (0..version_count)
                .map(|v| {
                    let url_count = rng.random_range(0..=3);
                    // A pool of six ids per clique makes collisions frequent.
                    let mut urls: Vec<String> = Vec::new();
                    for _ in 0..url_count {
                        let candidate = format!("u{}", rng.random_range(0..6));
                        if !urls.contains(&candidate) {
                            urls.push(candidate);
                        }
                    }
                    build_version(round * 10 + c, v, rng.random_range(1..=3), urls)
                })
                .collect();
            cliques.push(Clique {
                clique_id: format!("r{round}-c{c}"),
                normalized_title: NormalizedTitle::from_canonical("w".into()),
                versions,
            });
        }

        let urls_before: u64 = cliques
            .iter()
            .flat_map(|c| c.versions.iter())
            .map(|v| v.urls.len() as u64)
            .sum();
        let (kept, stats) = dedupe_urls(cliques);
        assert_eq!(stats.urls_in, urls_before);
        assert!(stats.reconciles(), "round {round}: counters do not reconcile: {stats:?}");

        for clique in &kept {
            assert!(clique.versions.len() >= 2, "round {round}: clique below two versions");
            let mut seen = BTreeSet::new();
            for version in &clique.versions {
                assert!(!version.urls.is_empty(), "round {round}: url-less version kept");
                for url in &version.urls {
                    assert!(
                        seen.insert(url.clone()),
                        "round {round}: duplicate url {url} within clique"
                    );
                }
            }
        }
    }

    // Winner selection: most occurrences, ties by smallest version id.
    let clique = Clique {
        clique_id: "hand".into(),
        normalized_title: NormalizedTitle::from_canonical("w".into()),
        versions: vec![
            build_version(999, 0, 1, vec!["shared".into(), "solo0".into()]),
            build_version(999, 1, 3, vec!["shared".into()]),
            build_version(999, 2, 3, vec!["shared".into(), "solo2".into()]),
        ],
    };
    let (kept, _) = dedupe_urls(vec![clique]);
    assert_eq!(kept.len(), 1);
    let holder: Vec<&str> = kept[0]
        .versions
        .iter()
        .filter(|v| v.urls.iter().any(|u| u == "shared"))
        .map(|v| v.version_id.as_str())
        .collect();
    assert_eq!(holder, vec!["c999-v1"], "tie must break to the smallest version id");
    println!("ACCEPTANCE dedupe-invariants: PASS (60 rounds)");
}

fn random_instance(rng: &mut ChaCha8Rng) -> EvalInstance {
    let noise = "NOISE".to_string();
    let square = rng.random_range(0..2) == 0;
    let labels = ["c0", "c1", "c2", "c3", "c4", "c5"];
    if square {
        // Square with diagonal mask: every non-noise label appears at least
        // twice so each query stays answerable after self-masking.
        let n = rng.random_range(4..=50);
        let mut candidate_labels = vec![String::new(); n];
        let mut free: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        free.shuffle(rng);
        let mut index = 0;
        while index + 1 < free.len() {
            let label = labels[rng.random_range(0..labels.len())];
            candidate_labels[free[index]] = label.to_string();
            candidate_labels[free[index + 1]] = label.to_string();
            index += 2;
        }
        for &slot in &free[index..] {
            candidate_labels[slot] = noise.clone();
        }
        // Sprinkle extra noise columns by converting whole label groups.
        let similarity: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| random_score(rng)).collect())
            .collect();
        EvalInstance {
            similarity,
            query_labels: candidate_labels.clone(),
            candidate_labels,
            noise_label: Some(noise),
            self_mask: EvalInstance::diagonal_mask(n),
        }
    } else {
        // Rectangular, no mask: queries drawn from labels present among
        // candidates; noise rows added on top.
        let columns = rng.random_range(1..=50);
        let candidate_labels: Vec<String> = (0..columns)
            .map(|_| {
                if rng.random_range(0..6) == 0 {
                    noise.clone()
                } else {
                    labels[rng.random_range(0..labels.len())].to_string()
                }
            })
            .collect();
        let present: Vec<&String> = candidate_labels.iter().filter(|l| **l != noise).collect();
        let rows = rng.random_range(1..=50);
        let query_labels: Vec<String> = (0..rows)
            .map(|_| {
                if present.is_empty() || rng.random_range(0..5) == 0 {
                    noise.clone()
                } else {
                    present[rng.random_range(0..present.len())].clone()
                }
            })
            .collect();
        let similarity: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..columns).map(|_| random_score(rng)).collect())
            .collect();
        EvalInstance {
            similarity,
            query_labels,
            candidate_labels,
            noise_label: Some(noise),
            self_mask: vec![],
        }
    }
}

fn random_score(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_range(0..3) == 0 {
        // Quantized scores force ties, exercising the index tiebreak.
        [0.0, 0.25, 0.5, 0.75, 1.0][rng.random_range(0..5)]
    } else {
        rng.random_range(0.0..1.0)
    }
}

/// Criterion 6: MAP and MR1 equal the brute-force oracle exactly on 1,000
/// random instances; the noise fixture pair shows the corrected handling;
/// the worked example holds to 1e-9.
#[test]
fn metrics_match_bruteforce_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut evaluated = 0;
    while evaluated < 1000 {
        let instance = random_instance(&mut rng);
        let all_noise = instance
            .query_labels
            .iter()
            .all(|l| Some(l.as_str()) == instance.noise_label.as_deref());
        if all_noise {
            continue;
        }
        let report = evaluate(&instance).unwrap_or_else(|e| {
            panic!("instance {evaluated}: unexpected error {e}");
        });
        let (map, mr1) = oracle_metrics(&instance);
        assert_eq!(report.map, map, "instance {evaluated}: MAP differs from oracle");
        assert_eq!(report.mr1, mr1, "instance {evaluated}: MR1 differs from oracle");
        assert!((0.0..=1.0).contains(&report.map));
        assert!(report.mr1 >= 1.0 && report.mr1 <= instance.candidate_labels.len() as f64);
        evaluated += 1;
    }

    // Noise fixture pair: a noise query row changes nothing; a noise
    // distractor column pushes MR1 up.
    let base = EvalInstance {
        similarity: vec![vec![0.0, 0.5]],
        query_labels: vec!["c".into()],
        candidate_labels: vec!["c".into(), "c".into()],
        noise_label: Some("NOISE".into()),
        self_mask: vec![(0, 0)],
    };
    let with_noise_query = EvalInstance {
        similarity: vec![vec![0.0, 0.5], vec![0.9, 0.9]],
        query_labels: vec!["c".into(), "NOISE".into()],
        candidate_labels: vec!["c".into(), "c".into()],
        noise_label: Some("NOISE".into()),
        self_mask: vec![(0, 0)],
    };
    let with_noise_distractor = EvalInstance {
        similarity: vec![vec![0.0, 0.5, 0.8]],
        query_labels: vec!["c".into()],
        candidate_labels: vec!["c".into(), "c".into(), "NOISE".into()],
        noise_label: Some("NOISE".into()),
        self_mask: vec![(0, 0)],
    };
    let a = evaluate(&base).unwrap();
    let b = evaluate(&with_noise_query).unwrap();
    let c = evaluate(&with_noise_distractor).unwrap();
    assert_eq!(a.mr1, b.mr1, "noise query row must not change MR1");
    assert_eq!(a.map, b.map, "noise query row must not change MAP");
    assert!(c.mr1 > a.mr1, "noise distractor column must increase MR1");

    // Worked example: relevant at ranks 1 and 3.
    let worked = EvalInstance {
        similarity: vec![vec![0.9, 0.5, 0.1]],
        query_labels: vec!["q".into()],
        candidate_labels: vec!["q".into(), "x".into(), "q".into()],
        noise_label: None,
        self_mask: vec![],
    };
    let report = evaluate(&worked).unwrap();
    assert!((report.map - 0.833333333333).abs() < 1e-9);
    println!("ACCEPTANCE metrics-oracle: PASS (1000 instances)");
}

fn split_fixture(rng: &mut ChaCha8Rng, fixture: usize) -> Vec<Clique> {
    let clique_count = rng.random_range(10..=120);
    (0..clique_count)
        .map(|i| {
            let version_count = rng.random_range(2..=9);
            Clique {
                clique_id: format!("f{fixture}-c{i:03}"),
                normalized_title: NormalizedTitle::from_canonical(format!("work {i}")),
                versions: (0..version_count)
                    .map(|v| Version {
                        version_id: format!("f{fixture}-c{i:03}-v{v}"),
                        artist_key: vec![ArtistId(v as u64 + 1)],
                        occurrences: vec![TrackOccurrence {
                            release_id: ReleaseId((i * 10 + v) as u64 + 1),
                            position: "1".into(),
                            raw_title: format!("work {i}"),
                            normalized_title: NormalizedTitle::from_canonical(format!("work {i}")),
                            performer_ids: [ArtistId(v as u64 + 1)].into_iter().collect(),
                            featuring_ids: BTreeSet::new(),
                            writer_ids_expanded: [ArtistId(9)].into_iter().collect(),
                            genres: vec![],
                            styles: vec![],
                            year: None,
                            country: None,
                        }],
                        urls: vec![],
                    })
                    .collect(),
            }
        })
        .collect()
}

/// Criterion 7: partition, leakage, and ratio invariants over 100 random
/// clique sets; reserved pinning; seed determinism.
#[test]
fn split_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for fixture in 0..100 {
        let cliques = split_fixture(&mut rng, fixture);
        let reserved: BTreeSet<String> = cliques
            .iter()
            .filter(|_| rng.random_range(0..10) == 0)
            .map(|c| c.clique_id.clone())
            .collect();
        let config = SplitConfig {
            seed: rng.random_range(0..1_000_000),
            ..SplitConfig::default()
        };
        let plan = make_splits(&cliques, &reserved, &config).unwrap();

        // Partition: every clique exactly once.
        assert_eq!(plan.assignments.len(), cliques.len());
        for clique in &cliques {
            assert!(plan.assignments.contains_key(&clique.clique_id));
        }
        // Reserved pinned to test.
        for id in &reserved {
            assert_eq!(plan.assignments[id], SplitSet::Test, "fixture {fixture}");
        }
        // Sampled test cliques within the size range.
        let sizes: BTreeMap<&str, usize> = cliques
            .iter()
            .map(|c| (c.clique_id.as_str(), c.version_count()))
            .collect();
        for (id, set) in &plan.assignments {
            if *set == SplitSet::Test && !reserved.contains(id) {
                let size = sizes[id.as_str()];
                assert!((2..=6).contains(&size), "fixture {fixture}: sampled size {size}");
            }
        }
        // Train/validation ratio within one clique of 90/10.
        let dev = plan.count(SplitSet::Train) + plan.count(SplitSet::Validation);
        let expected = (dev as f64 * 0.10).round() as isize;
        assert!(
            (plan.count(SplitSet::Validation) as isize - expected).abs() <= 1,
            "fixture {fixture}: validation ratio"
        );
        // Version-level leakage: a version id maps to exactly one split.
        let mut version_split: BTreeMap<&str, SplitSet> = BTreeMap::new();
        for clique in &cliques {
            let set = plan.assignments[&clique.clique_id];
            for version in &clique.versions {
                let previous = version_split.insert(version.version_id.as_str(), set);
                assert!(previous.is_none(), "fixture {fixture}: duplicate version id");
            }
        }
        // Identical seed, identical plan; input order immaterial.
        let mut reversed = cliques.clone();
        reversed.reverse();
        let again = make_splits(&reversed, &reserved, &config).unwrap();
        assert_eq!(plan, again, "fixture {fixture}: order or rerun changed the plan");
    }
    println!("ACCEPTANCE split-properties: PASS (100 fixtures)");
}

/// Criterion 8: statistics parity — recount oracle on the fixture corpus and
/// exact values on a synthetic set with known size distribution.
#[test]
fn statistics_parity() {
    // Synthetic set: sizes 2..=11.
    let synthetic: Vec<Clique> = (0..10)
        .map(|i| {
            let size = i + 2;
            Clique {
                clique_id: format!("s{i}"),
                normalized_title: NormalizedTitle::from_canonical(format!("w{i}")),
                versions: (0..size)
                    .map(|v| Version {
                        version_id: format!("s{i}-v{v}"),
                        artist_key: vec![ArtistId(v as u64 + 1)],
                        occurrences: vec![],
                        urls: vec![],
                    })
                    .collect(),
            }
        })
        .collect();
    let stats = clique_size_stats(&synthetic).unwrap();
    assert_eq!(stats.clique_count, 10);
    assert_eq!(stats.version_count, 65); // 2+3+…+11
    assert_eq!(stats.max_size, 11);
    assert!((stats.mean_size - 6.5).abs() < 1e-12);
    assert_eq!(stats.mean_size_rounded, 7);
    assert_eq!(stats.median_size, 6); // lower middle of 2..=11

    // Recount oracle over the fixture corpus pipeline output.
    let corpus = fixtures::corpus(42);
    let graph = ArtistGraph::from_records(corpus.artists.clone());
    let normalizer = Normalizer::default();
    let (occurrences, _) = collect_occurrences(extract_occurrences(
        corpus.releases.iter().cloned(),
        &graph,
        &normalizer,
    ));
    let (cliques, _) = build_cliques(occurrences, &graph, false);
    let stats = clique_size_stats(&cliques).unwrap();

    let mut sizes: Vec<u64> = cliques.iter().map(|c| c.versions.len() as u64).collect();
    sizes.sort_unstable();
    assert_eq!(stats.clique_count as usize, sizes.len());
    assert_eq!(stats.version_count, sizes.iter().sum::<u64>());
    assert_eq!(stats.max_size, *sizes.last().unwrap());
    let mean = sizes.iter().sum::<u64>() as f64 / sizes.len() as f64;
    assert_eq!(stats.mean_size, mean);
    let median_index = if sizes.len().is_multiple_of(2) {
        sizes.len() / 2 - 1
    } else {
        sizes.len() / 2
    };
    assert_eq!(stats.median_size, sizes[median_index]);

    // Artist count: recount one-per-version firsts independently.
    let firsts: BTreeSet<ArtistId> = cliques
        .iter()
        .flat_map(|c| c.versions.iter())
        .map(|v| v.artist_key[0])
        .collect();
    assert_eq!(
        vforge_core::analytics::artist_count(&cliques, ArtistCountMode::OnePerVersion),
        firsts.len() as u64
    );
    println!("ACCEPTANCE statistics-parity: PASS");
}

/// Optional full-scale regeneration against real monthly dumps. Point
/// VFORGE_ARTISTS_DUMP and VFORGE_RELEASES_DUMP at the gzipped XML dumps and
/// run with `cargo test --release -- --ignored full_scale`. Expect hours.
#[test]
#[ignore = "requires real dumps; set VFORGE_ARTISTS_DUMP and VFORGE_RELEASES_DUMP"]
fn full_scale_regeneration() {
    let artists_path = std::env::var("VFORGE_ARTISTS_DUMP").expect("VFORGE_ARTISTS_DUMP not set");
    let releases_path =
        std::env::var("VFORGE_RELEASES_DUMP").expect("VFORGE_RELEASES_DUMP not set");

    let normalizer = Normalizer::default();
    let artists_file = std::fs::File::open(&artists_path).unwrap();
    let mut graph_builder = vforge_core::artist_graph::ArtistGraphBuilder::new();
    for item in parse_artists(artists_file, DumpFormat::XmlDump).unwrap() {
        if let vforge_core::ingest::Parsed::Record(record) = item.unwrap() {
            graph_builder.add_record(record);
        }
    }
    let graph = graph_builder.build();

    let releases_file = std::fs::File::open(&releases_path).unwrap();
    let releases = parse_releases(releases_file, DumpFormat::XmlDump)
        .unwrap()
        .filter_map(|item| match item.unwrap() {
            vforge_core::ingest::Parsed::Record(record) => Some(record),
            vforge_core::ingest::Parsed::Rejected(_) => None,
        });
    let (occurrences, _) = collect_occurrences(extract_occurrences(releases, &graph, &normalizer));
    let (cliques, stats) = build_cliques(occurrences, &graph, false);

    let within = |value: f64, target: f64| (value - target).abs() <= target * 0.05;
    assert!(
        within(stats.cliques as f64, 348_796.0),
        "clique count {} not within 5% of 348796",
        stats.cliques
    );
    assert!(
        within(stats.versions as f64, 1_911_611.0),
        "version count {} not within 5% of 1911611",
        stats.versions
    );
    let artists = vforge_core::analytics::artist_count(&cliques, ArtistCountMode::OnePerVersion);
    assert!(
        within(artists as f64, 239_949.0),
        "artist count {artists} not within 5% of 239949"
    );
    println!("ACCEPTANCE full-scale-regeneration: PASS");
}

/// The reserved-clique lookup must work on the fixture corpus end to end.
#[test]
fn fixture_reserved_refs_resolve() {
    let corpus = fixtures::corpus(42);
    let graph = ArtistGraph::from_records(corpus.artists.clone());
    let normalizer = Normalizer::default();
    let (occurrences, _) = collect_occurrences(extract_occurrences(
        corpus.releases.iter().cloned(),
        &graph,
        &normalizer,
    ));
    let (cliques, _) = build_cliques(occurrences, &graph, false);
    let matched = find_reserved(&cliques, &corpus.external_refs, &graph, &normalizer);
    assert_eq!(matched.unmatched.len(), 1, "exactly the absent work stays unmatched");
    assert!(matched.reserved.len() >= 3, "three refs must resolve");
    println!("ACCEPTANCE fixture-reserved-refs: PASS");
}
