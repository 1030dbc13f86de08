//! Stage implementations.
//!
//! Every stage follows the same shape: resolve and checksum its inputs
//! (missing input = exit code 2), compare against the stored manifest
//! (matching manifest = cached no-op), otherwise produce its outputs into
//! `out/<stage>/` and store a fresh manifest recording input checksums, the
//! config hash, output checksums, and counters. Stages only ever write into
//! their own directory, so deleting a downstream artifact never corrupts an
//! upstream one.

use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use vforge_core::analytics;
use vforge_core::artist_graph::{ArtistGraph, ArtistGraphBuilder};
use vforge_core::clique::{
    build_cliques, extract_occurrences, Clique, Extracted, ExtractCounters, TrackOccurrence,
};
use vforge_core::ingest::{self, DumpFormat, Parsed};
use vforge_core::matcher::{CandidateSet, Matcher, VersionMatches, VideoCandidate};
use vforge_core::metrics::StreamingEvaluator;
use vforge_core::normalize::Normalizer;
use vforge_core::splitter::{find_reserved, make_splits, ExternalRef};

use crate::config::{CliqueSource, Counters, PipelineConfig};
use crate::error::CliError;
use crate::manifest::{checksum_inputs, file_sha256, Manifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "lower")]
pub enum Stage {
    Parse,
    Occurrences,
    Cliques,
    Queries,
    Match,
    Dedupe,
    Split,
    Stats,
    Eval,
}

pub struct StageContext {
    pub config: PipelineConfig,
    pub config_hash: String,
    pub out_dir: PathBuf,
    pub force: bool,
    pub graph_cache_override: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub cached: bool,
    pub counters: Counters,
}

pub fn run_stage(stage: Stage, ctx: &StageContext) -> Result<StageReport, CliError> {
    match stage {
        Stage::Parse => stage_parse(ctx),
        Stage::Occurrences => stage_occurrences(ctx),
        Stage::Cliques => stage_cliques(ctx),
        Stage::Queries => stage_queries(ctx),
        Stage::Match => stage_match(ctx),
        Stage::Dedupe => stage_dedupe(ctx),
        Stage::Split => stage_split(ctx),
        Stage::Stats => stage_stats(ctx),
        Stage::Eval => stage_eval(ctx),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn counter(value: impl Serialize) -> serde_json::Value {
    serde_json::to_value(value).expect("counter serializes")
}

/// Runs a stage body under the manifest protocol.
fn with_manifest(
    ctx: &StageContext,
    stage: &'static str,
    inputs: &[(&str, &Path)],
    missing_hint: &str,
    produce: impl FnOnce(&Path) -> Result<(Vec<String>, Counters), CliError>,
) -> Result<StageReport, CliError> {
    let input_checksums = checksum_inputs(inputs, missing_hint)?;
    let stage_dir = ctx.out_dir.join(stage);
    if !ctx.force {
        if let Some(manifest) = Manifest::load(&stage_dir) {
            if manifest.is_fresh(&stage_dir, &ctx.config_hash, &input_checksums) {
                return Ok(StageReport {
                    stage,
                    cached: true,
                    counters: manifest.counters,
                });
            }
        }
    }
    std::fs::create_dir_all(&stage_dir)?;
    let (outputs, counters) = produce(&stage_dir)?;
    let mut output_checksums = BTreeMap::new();
    for name in outputs {
        let checksum = file_sha256(&stage_dir.join(&name))?;
        output_checksums.insert(name, checksum);
    }
    Manifest {
        stage: stage.to_string(),
        config_hash: ctx.config_hash.clone(),
        inputs: input_checksums,
        outputs: output_checksums,
        counters: counters.clone(),
    }
    .store(&stage_dir)?;
    Ok(StageReport {
        stage,
        cached: false,
        counters,
    })
}

fn dump_format(path: &Path) -> DumpFormat {
    let name = path.to_string_lossy();
    if name.contains(".jsonl") {
        DumpFormat::Jsonl
    } else {
        DumpFormat::XmlDump
    }
}

fn open(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::open(path).map_err(|e| CliError::internal(format!("{}: {e}", path.display())))
}

/// Reads a canonical JSONL artifact produced by an upstream stage. Any bad
/// line here is an internal error, not user input.
fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let reader = std::io::BufReader::new(open(path)?);
    let mut records = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| {
            CliError::internal(format!("{} line {}: {e}", path.display(), index + 1))
        })?;
        records.push(record);
    }
    Ok(records)
}

fn write_json_file(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn artists_jsonl(ctx: &StageContext) -> PathBuf {
    ctx.out_dir.join("parse").join("artists.jsonl")
}

fn releases_jsonl(ctx: &StageContext) -> PathBuf {
    ctx.out_dir.join("parse").join("releases.jsonl")
}

fn occurrences_jsonl(ctx: &StageContext) -> PathBuf {
    ctx.out_dir.join("occurrences").join("occurrences.jsonl")
}

fn cliques_jsonl(ctx: &StageContext) -> PathBuf {
    ctx.out_dir.join("cliques").join("cliques.jsonl")
}

fn matches_jsonl(ctx: &StageContext) -> PathBuf {
    ctx.out_dir.join("match").join("matches.jsonl")
}

fn clique_source_path(ctx: &StageContext, source: CliqueSource) -> PathBuf {
    match source {
        CliqueSource::Dedupe => ctx.out_dir.join("dedupe").join("cliques.jsonl"),
        CliqueSource::Cliques => cliques_jsonl(ctx),
    }
}

/// Builds (or loads from the binary cache) the artist graph from the parsed
/// artists file.
fn load_graph(ctx: &StageContext) -> Result<ArtistGraph, CliError> {
    let artists_path = artists_jsonl(ctx);
    let key = file_sha256(&artists_path)?;
    let cache_path = ctx
        .graph_cache_override
        .clone()
        .or_else(|| ctx.config.paths.artist_graph_cache.clone())
        .or_else(|| {
            std::env::var_os("VFORGE_CACHE_DIR")
                .map(|dir| PathBuf::from(dir).join("artist-graph.bin"))
        });

    if let Some(path) = &cache_path {
        if let Some(graph) = ArtistGraph::load_cache(path, &key) {
            log::info!("artist graph loaded from cache {}", path.display());
            return Ok(graph);
        }
    }

    let mut builder = ArtistGraphBuilder::new();
    for item in ingest::parse_artists(open(&artists_path)?, DumpFormat::Jsonl)
        .map_err(CliError::internal)?
    {
        if let Parsed::Record(record) = item.map_err(CliError::internal)? {
            builder.add_record(record);
        }
    }
    let graph = builder.build();
    if let Some(path) = &cache_path {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).ok();
        }
        if let Err(e) = graph.save_cache(path, &key) {
            log::warn!("could not write graph cache {}: {e}", path.display());
        }
    }
    Ok(graph)
}

// ---------------------------------------------------------------------------
// parse
// ---------------------------------------------------------------------------

fn stage_parse(ctx: &StageContext) -> Result<StageReport, CliError> {
    let artists_dump = ctx.config.require_path("paths.artists")?.to_path_buf();
    let releases_dump = ctx.config.require_path("paths.releases")?.to_path_buf();
    let inputs: Vec<(&str, &Path)> =
        vec![("artists", &artists_dump), ("releases", &releases_dump)];

    with_manifest(ctx, "parse", &inputs, "configured dump file not found", |dir| {
        let mut counters = Counters::new();
        let mut rejects_out = BufWriter::new(std::fs::File::create(dir.join("rejects.jsonl"))?);

        let mut artist_records = 0u64;
        let mut artist_rejects: BTreeMap<String, u64> = BTreeMap::new();
        {
            let stream =
                ingest::parse_artists(open(&artists_dump)?, dump_format(&artists_dump))
                    .map_err(CliError::internal)?;
            let mut out = BufWriter::new(std::fs::File::create(dir.join("artists.jsonl"))?);
            for item in stream {
                match item.map_err(CliError::internal)? {
                    Parsed::Record(record) => {
                        serde_json::to_writer(&mut out, &record)?;
                        out.write_all(b"\n")?;
                        artist_records += 1;
                    }
                    Parsed::Rejected(reject) => {
                        *artist_rejects.entry(reject.reason.to_string()).or_default() += 1;
                        serde_json::to_writer(
                            &mut rejects_out,
                            &serde_json::json!({"source": "artists", "reason": reject.reason, "detail": reject.detail}),
                        )?;
                        rejects_out.write_all(b"\n")?;
                    }
                }
            }
            out.flush()?;
        }

        let mut release_records = 0u64;
        let mut release_rejects: BTreeMap<String, u64> = BTreeMap::new();
        {
            let stream =
                ingest::parse_releases(open(&releases_dump)?, dump_format(&releases_dump))
                    .map_err(CliError::internal)?;
            let mut out = BufWriter::new(std::fs::File::create(dir.join("releases.jsonl"))?);
            for item in stream {
                match item.map_err(CliError::internal)? {
                    Parsed::Record(record) => {
                        serde_json::to_writer(&mut out, &record)?;
                        out.write_all(b"\n")?;
                        release_records += 1;
                    }
                    Parsed::Rejected(reject) => {
                        *release_rejects.entry(reject.reason.to_string()).or_default() += 1;
                        serde_json::to_writer(
                            &mut rejects_out,
                            &serde_json::json!({"source": "releases", "reason": reject.reason, "detail": reject.detail}),
                        )?;
                        rejects_out.write_all(b"\n")?;
                    }
                }
            }
            out.flush()?;
        }
        rejects_out.flush()?;

        counters.insert("artist_records".into(), counter(artist_records));
        counters.insert("artist_rejects".into(), counter(&artist_rejects));
        counters.insert("release_records".into(), counter(release_records));
        counters.insert("release_rejects".into(), counter(&release_rejects));
        Ok((
            vec!["artists.jsonl".into(), "releases.jsonl".into(), "rejects.jsonl".into()],
            counters,
        ))
    })
}

// ---------------------------------------------------------------------------
// occurrences
// ---------------------------------------------------------------------------

fn stage_occurrences(ctx: &StageContext) -> Result<StageReport, CliError> {
    let artists = artists_jsonl(ctx);
    let releases = releases_jsonl(ctx);
    let inputs: Vec<(&str, &Path)> = vec![("artists", &artists), ("releases", &releases)];

    with_manifest(ctx, "occurrences", &inputs, "run the parse stage first", |dir| {
        let graph = load_graph(ctx)?;
        let normalizer = Normalizer::new(&ctx.config.normalize);

        let release_stream = ingest::parse_releases(open(&releases)?, DumpFormat::Jsonl)
            .map_err(CliError::internal)?
            .filter_map(|item| match item {
                Ok(Parsed::Record(record)) => Some(record),
                _ => None,
            });

        let mut out = BufWriter::new(std::fs::File::create(dir.join("occurrences.jsonl"))?);
        let mut extract = ExtractCounters::default();
        for item in extract_occurrences(release_stream, &graph, &normalizer) {
            extract.tracks_seen += 1;
            match item {
                Extracted::Occurrence(occ) => {
                    extract.emitted += 1;
                    serde_json::to_writer(&mut out, &*occ)?;
                    out.write_all(b"\n")?;
                }
                Extracted::Dropped(reason) => match reason {
                    vforge_core::clique::DropReason::EmptyTitle => extract.empty_title += 1,
                    vforge_core::clique::DropReason::NoWriter => extract.no_writer += 1,
                    vforge_core::clique::DropReason::NoPerformer => extract.no_performer += 1,
                },
            }
        }
        out.flush()?;

        let mut counters = Counters::new();
        counters.insert("extract".into(), counter(extract));
        counters.insert("dangling_graph_refs".into(), counter(graph.dangling_refs().len()));
        Ok((vec!["occurrences.jsonl".into()], counters))
    })
}

// ---------------------------------------------------------------------------
// cliques
// ---------------------------------------------------------------------------

fn stage_cliques(ctx: &StageContext) -> Result<StageReport, CliError> {
    let occurrences = occurrences_jsonl(ctx);
    let artists = artists_jsonl(ctx);
    let inputs: Vec<(&str, &Path)> =
        vec![("occurrences", &occurrences), ("artists", &artists)];

    with_manifest(ctx, "cliques", &inputs, "run the occurrences stage first", |dir| {
        let graph = load_graph(ctx)?;
        let records: Vec<TrackOccurrence> = read_jsonl(&occurrences)?;
        let (cliques, stats) =
            build_cliques(records, &graph, ctx.config.cliques.merge_overlapping);

        let mut out = BufWriter::new(std::fs::File::create(dir.join("cliques.jsonl"))?);
        for clique in &cliques {
            serde_json::to_writer(&mut out, clique)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        write_json_file(&dir.join("cliques.stats.json"), &stats)?;

        let mut counters = Counters::new();
        counters.insert("cliques".into(), counter(stats));
        Ok((vec!["cliques.jsonl".into(), "cliques.stats.json".into()], counters))
    })
}

// ---------------------------------------------------------------------------
// queries
// ---------------------------------------------------------------------------

fn stage_queries(ctx: &StageContext) -> Result<StageReport, CliError> {
    let cliques_path = cliques_jsonl(ctx);
    let artists = artists_jsonl(ctx);
    let inputs: Vec<(&str, &Path)> = vec![("cliques", &cliques_path), ("artists", &artists)];

    with_manifest(ctx, "queries", &inputs, "run the cliques stage first", |dir| {
        let graph = load_graph(ctx)?;
        let matcher = Matcher::new(
            &graph,
            Normalizer::new(&ctx.config.normalize),
            ctx.config.matching.clone(),
        );
        let cliques: Vec<Clique> = read_jsonl(&cliques_path)?;
        let mut out = BufWriter::new(std::fs::File::create(dir.join("queries.txt"))?);
        let mut lines = 0u64;
        for clique in &cliques {
            for version in &clique.versions {
                writeln!(out, "{}\t{}", version.version_id, matcher.build_query(version))?;
                lines += 1;
            }
        }
        out.flush()?;
        let mut counters = Counters::new();
        counters.insert("queries".into(), counter(lines));
        Ok((vec!["queries.txt".into()], counters))
    })
}

// ---------------------------------------------------------------------------
// match
// ---------------------------------------------------------------------------

/// Reads a user-provided candidates file tolerantly: bad lines and invalid
/// candidates are counted, not fatal.
fn read_candidates(
    path: &Path,
) -> Result<(BTreeMap<String, Vec<VideoCandidate>>, Counters), CliError> {
    let reader = std::io::BufReader::new(open(path)?);
    let mut by_version: BTreeMap<String, Vec<VideoCandidate>> = BTreeMap::new();
    let mut invalid_lines = 0u64;
    let mut invalid_candidates = 0u64;
    let mut duplicate_versions = 0u64;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CandidateSet>(&line) {
            Ok(set) => {
                let mut kept = Vec::new();
                for candidate in set.candidates {
                    if candidate.video_id.trim().is_empty() {
                        invalid_candidates += 1;
                    } else {
                        kept.push(candidate);
                    }
                }
                if by_version.insert(set.version_id, kept).is_some() {
                    duplicate_versions += 1;
                }
            }
            Err(_) => invalid_lines += 1,
        }
    }
    let mut counters = Counters::new();
    counters.insert("candidate_invalid_lines".into(), counter(invalid_lines));
    counters.insert("candidate_invalid_entries".into(), counter(invalid_candidates));
    counters.insert("candidate_duplicate_versions".into(), counter(duplicate_versions));
    Ok((by_version, counters))
}

fn stage_match(ctx: &StageContext) -> Result<StageReport, CliError> {
    let cliques_path = cliques_jsonl(ctx);
    let artists = artists_jsonl(ctx);
    let candidates_path = ctx.config.require_path("paths.candidates")?.to_path_buf();
    let inputs: Vec<(&str, &Path)> = vec![
        ("cliques", &cliques_path),
        ("artists", &artists),
        ("candidates", &candidates_path),
    ];

    with_manifest(ctx, "match", &inputs, "run the cliques stage first", |dir| {
        let graph = load_graph(ctx)?;
        let matcher = Matcher::new(
            &graph,
            Normalizer::new(&ctx.config.normalize),
            ctx.config.matching.clone(),
        );
        let cliques: Vec<Clique> = read_jsonl(&cliques_path)?;
        let (candidates, mut counters) = read_candidates(&candidates_path)?;

        let work: Vec<(&vforge_core::clique::Version, &[VideoCandidate])> = cliques
            .iter()
            .flat_map(|c| c.versions.iter())
            .filter_map(|v| {
                candidates
                    .get(&v.version_id)
                    .map(|list| (v, list.as_slice()))
            })
            .collect();

        use rayon::prelude::*;
        let outcomes: Vec<VersionMatches> = work
            .par_iter()
            .map(|(version, list)| {
                let outcome = matcher.match_version(version, list);
                VersionMatches {
                    version_id: version.version_id.clone(),
                    accepted: outcome.accepted,
                    decisions: outcome.decisions,
                }
            })
            .collect();

        let mut out = BufWriter::new(std::fs::File::create(dir.join("matches.jsonl"))?);
        let mut by_reason: BTreeMap<String, u64> = BTreeMap::new();
        let mut matched_versions = 0u64;
        for matches in &outcomes {
            for decision in &matches.decisions {
                let key = serde_json::to_value(decision.reason)?
                    .as_str()
                    .unwrap_or("unknown")
                    .to_string();
                *by_reason.entry(key).or_default() += 1;
            }
            if !matches.accepted.is_empty() {
                matched_versions += 1;
            }
            serde_json::to_writer(&mut out, matches)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;

        let versions_total: usize = cliques.iter().map(|c| c.versions.len()).sum();
        counters.insert("versions_total".into(), counter(versions_total));
        counters.insert("versions_with_candidates".into(), counter(work.len()));
        counters.insert(
            "versions_no_candidates".into(),
            counter(versions_total - work.len()),
        );
        counters.insert("versions_matched".into(), counter(matched_versions));
        counters.insert("decisions_by_reason".into(), counter(&by_reason));
        write_json_file(&dir.join("match.stats.json"), &counters)?;
        Ok((vec!["matches.jsonl".into(), "match.stats.json".into()], counters))
    })
}

// ---------------------------------------------------------------------------
// dedupe
// ---------------------------------------------------------------------------

fn stage_dedupe(ctx: &StageContext) -> Result<StageReport, CliError> {
    let cliques_path = cliques_jsonl(ctx);
    let matches_path = matches_jsonl(ctx);
    let inputs: Vec<(&str, &Path)> =
        vec![("cliques", &cliques_path), ("matches", &matches_path)];

    with_manifest(ctx, "dedupe", &inputs, "run the match stage first", |dir| {
        let mut cliques: Vec<Clique> = read_jsonl(&cliques_path)?;
        let matches: Vec<VersionMatches> = read_jsonl(&matches_path)?;
        let accepted: BTreeMap<&str, &Vec<String>> = matches
            .iter()
            .map(|m| (m.version_id.as_str(), &m.accepted))
            .collect();
        for clique in &mut cliques {
            for version in &mut clique.versions {
                if let Some(urls) = accepted.get(version.version_id.as_str()) {
                    version.urls = (*urls).clone();
                }
            }
        }
        let (deduped, stats) = vforge_core::matcher::dedupe_urls(cliques);

        let mut out = BufWriter::new(std::fs::File::create(dir.join("cliques.jsonl"))?);
        for clique in &deduped {
            serde_json::to_writer(&mut out, clique)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        write_json_file(&dir.join("dedupe.stats.json"), &stats)?;

        let mut counters = Counters::new();
        counters.insert("dedupe".into(), counter(stats));
        Ok((vec!["cliques.jsonl".into(), "dedupe.stats.json".into()], counters))
    })
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

fn stage_split(ctx: &StageContext) -> Result<StageReport, CliError> {
    let source = clique_source_path(ctx, ctx.config.split.input);
    let artists = artists_jsonl(ctx);
    let refs_path = ctx.config.paths.external_refs.clone();
    let mut inputs: Vec<(&str, &Path)> = vec![("cliques", &source), ("artists", &artists)];
    if let Some(path) = &refs_path {
        inputs.push(("external_refs", path));
    }

    with_manifest(ctx, "split", &inputs, "run the upstream clique stages first", |dir| {
        let graph = load_graph(ctx)?;
        let normalizer = Normalizer::new(&ctx.config.normalize);
        let cliques: Vec<Clique> = read_jsonl(&source)?;

        let refs: Vec<ExternalRef> = match &refs_path {
            Some(path) => {
                let reader = std::io::BufReader::new(open(path)?);
                let mut refs = Vec::new();
                for line in reader.lines() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    if let Ok(reference) = serde_json::from_str::<ExternalRef>(&line) {
                        refs.push(reference);
                    }
                }
                refs
            }
            None => Vec::new(),
        };

        let reserved = find_reserved(&cliques, &refs, &graph, &normalizer);
        let plan = make_splits(&cliques, &reserved.reserved, &ctx.config.split.params)
            .map_err(CliError::internal)?;
        write_json_file(&dir.join("splits.json"), &plan)?;

        let mut counters = Counters::new();
        counters.insert("reserved_matched".into(), counter(reserved.reserved.len()));
        counters.insert("refs_unmatched".into(), counter(&reserved.unmatched));
        counters.insert(
            "test".into(),
            counter(plan.count(vforge_core::splitter::SplitSet::Test)),
        );
        counters.insert(
            "validation".into(),
            counter(plan.count(vforge_core::splitter::SplitSet::Validation)),
        );
        counters.insert(
            "train".into(),
            counter(plan.count(vforge_core::splitter::SplitSet::Train)),
        );
        Ok((vec!["splits.json".into()], counters))
    })
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

fn stage_stats(ctx: &StageContext) -> Result<StageReport, CliError> {
    let source = clique_source_path(ctx, ctx.config.stats.input);
    let candidates_path = ctx.config.paths.candidates.clone();
    let mut inputs: Vec<(&str, &Path)> = vec![("cliques", &source)];
    if let Some(path) = &candidates_path {
        inputs.push(("candidates", path));
    }

    with_manifest(ctx, "stats", &inputs, "run the upstream clique stages first", |dir| {
        let cliques: Vec<Clique> = read_jsonl(&source)?;
        let size_stats = analytics::clique_size_stats(&cliques).map_err(CliError::internal)?;
        let versions = || cliques.iter().flat_map(|c| c.versions.iter());

        let genres = analytics::genre_distribution(versions());
        let styles = analytics::style_distribution(versions());

        // Durations come from the primary matched candidate of each version.
        let durations: Vec<i64> = match &candidates_path {
            Some(path) => {
                let (candidates, _) = read_candidates(path)?;
                let duration_of: BTreeMap<&str, i64> = candidates
                    .values()
                    .flatten()
                    .map(|c| (c.video_id.as_str(), c.duration_s as i64))
                    .collect();
                versions()
                    .filter_map(|v| v.primary_url())
                    .filter_map(|url| duration_of.get(url).copied())
                    .collect()
            }
            None => Vec::new(),
        };
        let histogram =
            analytics::duration_histogram(durations, ctx.config.stats.params.duration_bin_width_s)
                .map_err(CliError::internal)?;
        let artist_count =
            analytics::artist_count(&cliques, analytics::ArtistCountMode::OnePerVersion);

        let summary = serde_json::json!({
            "note": "genre and style annotations are release-level and approximated onto tracks",
            "cliques": size_stats,
            "artist_count_one_per_version": artist_count,
        });
        write_json_file(&dir.join("summary.json"), &summary)?;
        write_json_file(&dir.join("genres.json"), &genres)?;
        write_json_file(&dir.join("styles.json"), &styles)?;
        write_json_file(&dir.join("durations.json"), &histogram)?;

        let mut genres_csv = Vec::new();
        analytics::write_label_csv(&genres, ("genre", "versions"), &mut genres_csv)
            .map_err(CliError::internal)?;
        std::fs::write(dir.join("genres.csv"), genres_csv)?;
        let mut styles_csv = Vec::new();
        analytics::write_label_csv(&styles, ("style", "versions"), &mut styles_csv)
            .map_err(CliError::internal)?;
        std::fs::write(dir.join("styles.csv"), styles_csv)?;
        let mut durations_csv = Vec::new();
        analytics::write_duration_csv(&histogram, &mut durations_csv)
            .map_err(CliError::internal)?;
        std::fs::write(dir.join("durations.csv"), durations_csv)?;

        let mut counters = Counters::new();
        counters.insert("cliques".into(), counter(size_stats));
        counters.insert("artist_count".into(), counter(artist_count));
        counters.insert("durations_counted".into(), counter(histogram.counted));
        Ok((
            vec![
                "summary.json".into(),
                "genres.json".into(),
                "genres.csv".into(),
                "styles.json".into(),
                "styles.csv".into(),
                "durations.json".into(),
                "durations.csv".into(),
            ],
            counters,
        ))
    })
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct EmbeddingRow {
    label: String,
    vector: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct SimilarityRow {
    label: String,
    scores: Vec<f64>,
}

fn stage_eval(ctx: &StageContext) -> Result<StageReport, CliError> {
    let eval = &ctx.config.eval;
    let self_mask = eval.self_mask.unwrap_or(true);
    let noise = eval.noise_label.clone();

    if let Some(embeddings_path) = &eval.embeddings {
        let inputs: Vec<(&str, &Path)> = vec![("embeddings", embeddings_path)];
        with_manifest(ctx, "eval", &inputs, "embeddings file not found", |dir| {
            let rows: Vec<EmbeddingRow> = read_jsonl(embeddings_path)?;
            let labels: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
            let mask = if self_mask {
                vforge_core::metrics::EvalInstance::diagonal_mask(rows.len())
            } else {
                Vec::new()
            };
            let mut evaluator = StreamingEvaluator::new(labels, noise.clone(), mask);
            for row in &rows {
                let scores: Vec<f64> = rows
                    .iter()
                    .map(|other| vforge_core::metrics::cosine_similarity(&row.vector, &other.vector))
                    .collect();
                evaluator
                    .push_row(&row.label, &scores)
                    .map_err(CliError::internal)?;
            }
            let report = evaluator.finish().map_err(CliError::internal)?;
            write_json_file(&dir.join("metrics.json"), &report)?;
            let mut counters = Counters::new();
            counters.insert("metrics".into(), counter(&report));
            Ok((vec!["metrics.json".into()], counters))
        })
    } else if let Some(similarity_path) = &eval.similarity {
        let labels_path = eval.candidate_labels.clone().ok_or_else(|| CliError::Config {
            field: "eval.candidate_labels".into(),
            message: "similarity mode requires a candidate labels file".into(),
        })?;
        let inputs: Vec<(&str, &Path)> = vec![
            ("similarity", similarity_path),
            ("candidate_labels", &labels_path),
        ];
        with_manifest(ctx, "eval", &inputs, "similarity inputs not found", |dir| {
            let labels: Vec<String> = std::io::BufReader::new(open(&labels_path)?)
                .lines()
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .filter(|l| !l.trim().is_empty())
                .collect();
            let mask = if self_mask {
                vforge_core::metrics::EvalInstance::diagonal_mask(labels.len())
            } else {
                Vec::new()
            };
            let mut evaluator = StreamingEvaluator::new(labels, noise.clone(), mask);
            let reader = std::io::BufReader::new(open(similarity_path)?);
            for (index, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let row: SimilarityRow = serde_json::from_str(&line).map_err(|e| {
                    CliError::internal(format!(
                        "{} line {}: {e}",
                        similarity_path.display(),
                        index + 1
                    ))
                })?;
                evaluator
                    .push_row(&row.label, &row.scores)
                    .map_err(CliError::internal)?;
            }
            let report = evaluator.finish().map_err(CliError::internal)?;
            write_json_file(&dir.join("metrics.json"), &report)?;
            let mut counters = Counters::new();
            counters.insert("metrics".into(), counter(&report));
            Ok((vec!["metrics.json".into()], counters))
        })
    } else {
        Err(CliError::Config {
            field: "eval.embeddings".into(),
            message: "set eval.embeddings or eval.similarity".into(),
        })
    }
}
