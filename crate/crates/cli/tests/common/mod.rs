//! Shared helpers for driving the `vforge` binary against the fixture corpus.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const FIXTURE_SEED: u64 = 42;

pub const PIPELINE_TOML: &str = r#"[paths]
artists = "inputs/artists.xml.gz"
releases = "inputs/releases.xml"
candidates = "inputs/candidates.jsonl"
external_refs = "inputs/refs.jsonl"
out_dir = "out"

[split]
seed = 42
"#;

/// Writes the fixture input tree (gzipped artists XML, plain releases XML,
/// candidates and external refs JSONL, pipeline config) into `dir`.
pub fn write_fixture_tree(dir: &Path) {
    let corpus = vforge_core::fixtures::corpus(FIXTURE_SEED);
    let inputs = dir.join("inputs");
    std::fs::create_dir_all(&inputs).unwrap();

    let artists_xml = vforge_core::fixtures::artists_xml(&corpus);
    let mut encoder =
        flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    encoder.write_all(artists_xml.as_bytes()).unwrap();
    std::fs::write(inputs.join("artists.xml.gz"), encoder.finish().unwrap()).unwrap();

    std::fs::write(
        inputs.join("releases.xml"),
        vforge_core::fixtures::releases_xml(&corpus),
    )
    .unwrap();
    std::fs::write(
        inputs.join("candidates.jsonl"),
        vforge_core::fixtures::candidates_jsonl(&corpus),
    )
    .unwrap();
    std::fs::write(
        inputs.join("refs.jsonl"),
        vforge_core::fixtures::external_refs_jsonl(&corpus),
    )
    .unwrap();
    std::fs::write(dir.join("pipeline.toml"), PIPELINE_TOML).unwrap();
}

pub fn vforge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vforge"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("vforge runs")
}

pub fn run_ok(dir: &Path, args: &[&str]) -> String {
    let output = vforge(dir, args);
    assert!(
        output.status.success(),
        "vforge {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}

pub const DATA_STAGES: [&str; 8] = [
    "parse",
    "occurrences",
    "cliques",
    "queries",
    "match",
    "dedupe",
    "split",
    "stats",
];

pub fn run_pipeline(dir: &Path) {
    for stage in DATA_STAGES {
        run_ok(dir, &[stage]);
    }
}

/// All data files a full pipeline run produces, relative to the work dir.
/// Manifests are excluded: they record input paths of the run directory.
#[allow(dead_code)] // used by the golden test target only
pub fn golden_files() -> Vec<PathBuf> {
    [
        "out/parse/artists.jsonl",
        "out/parse/releases.jsonl",
        "out/parse/rejects.jsonl",
        "out/occurrences/occurrences.jsonl",
        "out/cliques/cliques.jsonl",
        "out/cliques/cliques.stats.json",
        "out/queries/queries.txt",
        "out/match/matches.jsonl",
        "out/match/match.stats.json",
        "out/dedupe/cliques.jsonl",
        "out/dedupe/dedupe.stats.json",
        "out/split/splits.json",
        "out/stats/summary.json",
        "out/stats/genres.json",
        "out/stats/genres.csv",
        "out/stats/styles.json",
        "out/stats/styles.csv",
        "out/stats/durations.json",
        "out/stats/durations.csv",
    ]
    .iter()
    .map(PathBuf::from)
    .collect()
}
