//! Rule-based matching of versions against captured video candidate
//! metadata, plus query-string generation and URL-collision deduplication.
//!
//! Candidates pass through ordered gates: category, officialness, duration,
//! then title matching at three levels — exact, decoration-stripped, and
//! artist-name permutations — each followed by an artist check. A decision
//! records the first failing gate, so rejection reasons are monotone in the
//! gate order. Matching is a pure function of the version and its candidate
//! list; candidate order only determines rank.
//!
//! Live search is out of scope: candidates arrive as captured metadata keyed
//! by version id.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::artist_graph::ArtistGraph;
use crate::clique::{Clique, Version};
use crate::config::MatchConfig;
use crate::ids::ArtistId;
use crate::normalize::Normalizer;

/// Captured metadata of one search-result video.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoCandidate {
    pub video_id: String,
    pub title: String,
    #[serde(default)]
    pub uploader: String,
    /// Auto-generated artist topic channel.
    #[serde(default)]
    pub channel_is_topic: bool,
    #[serde(default)]
    pub description: String,
    pub duration_s: u32,
    #[serde(default)]
    pub categories: Vec<String>,
    #[serde(default)]
    pub artist_field: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Decision reason; accepts carry the title-match level that fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchReason {
    NotMusicCategory,
    NotOfficial,
    TooLong,
    TitleMismatch,
    ArtistMismatch,
    AcceptedExact,
    AcceptedStripped,
    AcceptedPermutation,
}

impl MatchReason {
    pub fn is_accept(&self) -> bool {
        matches!(
            self,
            MatchReason::AcceptedExact
                | MatchReason::AcceptedStripped
                | MatchReason::AcceptedPermutation
        )
    }
}

/// Audit record for one candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub video_id: String,
    pub verdict: Verdict,
    pub reason: MatchReason,
    /// 1-based search-result rank.
    pub candidate_rank: usize,
}

/// Accepted ids in rank order plus the full decision trail.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOutcome {
    pub accepted: Vec<String>,
    pub decisions: Vec<MatchDecision>,
}

/// One line of a captured-candidates file: the search results for a version,
/// in result order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub version_id: String,
    pub candidates: Vec<VideoCandidate>,
}

/// One line of a match-results file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionMatches {
    pub version_id: String,
    pub accepted: Vec<String>,
    pub decisions: Vec<MatchDecision>,
}

/// Upper bound on generated permutation strings per version; beyond this the
/// permutation level degrades to whatever was generated first.
const PERMUTATION_CAP: usize = 2000;

pub struct Matcher<'g> {
    graph: &'g ArtistGraph,
    normalizer: Normalizer,
    config: MatchConfig,
    /// Lower-cased marker phrases.
    markers: Vec<String>,
    /// Lower-cased decoration tokens, longest (in words) first.
    tokens: Vec<String>,
}

impl<'g> Matcher<'g> {
    pub fn new(graph: &'g ArtistGraph, normalizer: Normalizer, config: MatchConfig) -> Self {
        let markers = config
            .official_markers
            .iter()
            .map(|m| m.to_lowercase())
            .collect();
        let mut tokens: Vec<String> = config
            .decoration_tokens
            .iter()
            .map(|t| t.to_lowercase())
            .filter(|t| !t.trim().is_empty())
            .collect();
        tokens.sort_by_key(|t| std::cmp::Reverse((t.split_whitespace().count(), t.len())));
        Matcher {
            graph,
            normalizer,
            config,
            markers,
            tokens,
        }
    }

    fn display_name(&self, id: ArtistId) -> String {
        match self.graph.node(id) {
            Some(record) => record.name.clone(),
            None => format!("#{id}"),
        }
    }

    /// Search query for a version: performers in canonical key order joined
    /// by ", ", then " - ", then the raw title; featuring artists appended
    /// as " (featuring …)".
    pub fn build_query(&self, version: &Version) -> String {
        let occurrence = &version.occurrences[0];
        let performers = occurrence
            .performer_ids
            .iter()
            .map(|&id| self.display_name(id))
            .join(", ");
        let mut query = format!("{performers} - {}", occurrence.raw_title);
        if !occurrence.featuring_ids.is_empty() {
            let featuring = occurrence
                .featuring_ids
                .iter()
                .map(|&id| self.display_name(id))
                .join(", ");
            query.push_str(&format!(" (featuring {featuring})"));
        }
        query
    }

    /// A candidate counts as official when its description carries a
    /// distributor marker, its uploader is an auto-generated topic channel,
    /// or its uploader name equals one of the artist name forms.
    pub fn is_official(&self, candidate: &VideoCandidate, artist_names: &BTreeSet<String>) -> bool {
        if candidate.channel_is_topic {
            return true;
        }
        let description = candidate.description.to_lowercase();
        if self.markers.iter().any(|m| description.contains(m)) {
            return true;
        }
        artist_names.contains(&self.normalize_uploader(&candidate.uploader))
    }

    /// Matching-normalizes an uploader name and strips the trailing
    /// " - topic" suffix and trailing "official" tokens.
    fn normalize_uploader(&self, uploader: &str) -> String {
        let mut name = self.normalizer.matching(uploader).into_string();
        loop {
            let trimmed = name.trim_end().to_string();
            if let Some(rest) = trimmed.strip_suffix("- topic") {
                name = rest.trim_end().to_string();
            } else if let Some(rest) = trimmed.strip_suffix("official") {
                if rest.is_empty() || rest.ends_with(' ') {
                    name = rest.trim_end().to_string();
                } else {
                    return trimmed;
                }
            } else {
                return trimmed;
            }
        }
    }

    /// Runs the gates over every candidate in rank order.
    pub fn match_version(&self, version: &Version, candidates: &[VideoCandidate]) -> MatchOutcome {
        let context = self.version_context(version);
        let mut outcome = MatchOutcome::default();
        for (index, candidate) in candidates.iter().enumerate() {
            let reason = self.evaluate(&context, candidate);
            let verdict = if reason.is_accept() {
                outcome.accepted.push(candidate.video_id.clone());
                Verdict::Accept
            } else {
                Verdict::Reject
            };
            outcome.decisions.push(MatchDecision {
                video_id: candidate.video_id.clone(),
                verdict,
                reason,
                candidate_rank: index + 1,
            });
        }
        outcome
    }

    fn evaluate(&self, context: &VersionContext, candidate: &VideoCandidate) -> MatchReason {
        if !candidate
            .categories
            .iter()
            .any(|c| c.trim().eq_ignore_ascii_case("music"))
        {
            return MatchReason::NotMusicCategory;
        }
        if !self.is_official(candidate, &context.performer_forms) {
            return MatchReason::NotOfficial;
        }
        if candidate.duration_s > self.config.max_duration_s {
            return MatchReason::TooLong;
        }

        let raw = self.normalizer.matching(&candidate.title).into_string();
        let stripped = self.strip_decorations(&raw);
        let level = if context.exact_targets.contains(&raw) {
            Some(MatchReason::AcceptedExact)
        } else if context.stripped_targets.contains(&stripped) {
            Some(MatchReason::AcceptedStripped)
        } else if context.permutation_targets.contains(&stripped) {
            Some(MatchReason::AcceptedPermutation)
        } else {
            None
        };
        match level {
            None => MatchReason::TitleMismatch,
            Some(level) => {
                if self.artist_check(context, candidate, &raw, &stripped) {
                    level
                } else {
                    MatchReason::ArtistMismatch
                }
            }
        }
    }

    /// At least one performer name form must appear in the uploader, the
    /// artist field, or the video-title prefix (the part before " - ").
    fn artist_check(
        &self,
        context: &VersionContext,
        candidate: &VideoCandidate,
        raw_title: &str,
        stripped_title: &str,
    ) -> bool {
        let mut fields: Vec<String> = vec![self.normalize_uploader(&candidate.uploader)];
        if let Some(artist) = &candidate.artist_field {
            fields.push(self.normalizer.matching(artist).into_string());
        }
        for title in [raw_title, stripped_title] {
            if let Some(prefix) = title.split_once(" - ").map(|(p, _)| p) {
                fields.push(prefix.to_string());
            }
        }
        context
            .performer_forms
            .iter()
            .any(|form| !form.is_empty() && fields.iter().any(|field| field.contains(form)))
    }

    /// Removes decoration noise from a matching-normalized title: bracketed
    /// spans consisting only of decoration tokens, then trailing bare tokens
    /// with their dangling separators. Never strips a title to nothing.
    pub fn strip_decorations(&self, title: &str) -> String {
        let mut current = remove_decorative_spans(title, &self.tokens);
        loop {
            let trimmed = trim_separators(&current);
            let mut removed = false;
            for token in &self.tokens {
                if let Some(rest) = trimmed.strip_suffix(token.as_str()) {
                    let boundary = rest
                        .chars()
                        .next_back()
                        .is_none_or(|c| !c.is_alphanumeric());
                    if boundary {
                        current = rest.to_string();
                        removed = true;
                        break;
                    }
                }
            }
            if !removed {
                current = trimmed;
                break;
            }
        }
        let result = self.normalizer.matching(&current).into_string();
        if result.is_empty() {
            title.to_string()
        } else {
            result
        }
    }

    fn version_context(&self, version: &Version) -> VersionContext {
        let occurrence = &version.occurrences[0];
        let performer_ids: Vec<ArtistId> = occurrence.performer_ids.iter().copied().collect();
        let featuring_ids: Vec<ArtistId> = occurrence.featuring_ids.iter().copied().collect();

        let mut performer_forms: BTreeSet<String> = BTreeSet::new();
        for &id in &performer_ids {
            performer_forms.extend(self.graph.name_forms(id, &self.normalizer));
            if self.graph.node(id).is_none() {
                performer_forms.insert(self.normalizer.matching(&self.display_name(id)).into_string());
            }
        }

        let titles: BTreeSet<String> = version
            .occurrences
            .iter()
            .map(|o| self.normalizer.matching(&o.raw_title).into_string())
            .collect();

        let mut exact_targets = titles.clone();
        exact_targets.insert(self.normalizer.matching(&self.build_query(version)).into_string());

        let stripped_targets: BTreeSet<String> = exact_targets
            .iter()
            .map(|t| self.strip_decorations(t))
            .collect();

        let permutation_targets =
            self.permutation_targets(&performer_ids, &featuring_ids, &titles);

        VersionContext {
            performer_forms,
            exact_targets,
            stripped_targets,
            permutation_targets,
        }
    }

    /// All "a1, a2 - title (featuring a3)" renderings over performer
    /// orderings and name-form choices, with and without the featuring
    /// suffix, capped to keep pathological credit lists bounded.
    fn permutation_targets(
        &self,
        performer_ids: &[ArtistId],
        featuring_ids: &[ArtistId],
        titles: &BTreeSet<String>,
    ) -> BTreeSet<String> {
        let mut targets = BTreeSet::new();
        let performer_forms = self.forms_per_artist(performer_ids);
        if performer_forms.is_empty() {
            return targets;
        }
        let featuring_forms = self.forms_per_artist(featuring_ids);

        let mut featuring_renderings: Vec<Option<String>> = vec![None];
        if !featuring_forms.is_empty() {
            for ordering in featuring_forms.iter().permutations(featuring_forms.len()) {
                for choice in ordering
                    .iter()
                    .map(|forms| forms.iter())
                    .multi_cartesian_product()
                {
                    featuring_renderings.push(Some(choice.into_iter().join(", ")));
                }
            }
        }

        'outer: for ordering in performer_forms.iter().permutations(performer_forms.len()) {
            for choice in ordering
                .iter()
                .map(|forms| forms.iter())
                .multi_cartesian_product()
            {
                let artists = choice.into_iter().join(", ");
                for title in titles {
                    for featuring in &featuring_renderings {
                        let rendered = match featuring {
                            None => format!("{artists} - {title}"),
                            Some(f) => format!("{artists} - {title} (featuring {f})"),
                        };
                        targets
                            .insert(self.normalizer.matching(&rendered).into_string());
                        if targets.len() >= PERMUTATION_CAP {
                            break 'outer;
                        }
                    }
                }
            }
        }
        targets
    }

    fn forms_per_artist(&self, ids: &[ArtistId]) -> Vec<Vec<String>> {
        ids.iter()
            .map(|&id| {
                let mut forms: Vec<String> =
                    self.graph.name_forms(id, &self.normalizer).into_iter().collect();
                if forms.is_empty() {
                    forms.push(self.normalizer.matching(&self.display_name(id)).into_string());
                }
                forms
            })
            .collect()
    }
}

struct VersionContext {
    performer_forms: BTreeSet<String>,
    exact_targets: BTreeSet<String>,
    stripped_targets: BTreeSet<String>,
    permutation_targets: BTreeSet<String>,
}

/// Removes `(...)` / `[...]` spans whose content consists only of decoration
/// tokens.
fn remove_decorative_spans(s: &str, tokens: &[String]) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut keep = vec![true; chars.len()];
    let mut stack: Vec<(char, usize)> = Vec::new();
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '(' | '[' => stack.push((c, i)),
            ')' | ']' => {
                let opener = if c == ')' { '(' } else { '[' };
                if let Some(&(kind, start)) = stack.last() {
                    if kind == opener {
                        stack.pop();
                        // Only top-level spans are candidates for removal.
                        if stack.is_empty() {
                            let content: String = chars[start + 1..i].iter().collect();
                            if is_decoration_only(&content, tokens) {
                                for flag in keep.iter_mut().take(i + 1).skip(start) {
                                    *flag = false;
                                }
                            }
                        }
                    }
                }
            }
            _ => {}
        }
    }
    chars
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// True when every word of `content` is covered by a greedy longest-first
/// match over the token list.
fn is_decoration_only(content: &str, tokens: &[String]) -> bool {
    let words: Vec<&str> = content
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect();
    if words.is_empty() {
        return false;
    }
    let token_words: Vec<Vec<&str>> = tokens
        .iter()
        .map(|t| t.split_whitespace().collect())
        .collect();
    let mut i = 0;
    'cover: while i < words.len() {
        for tw in &token_words {
            if !tw.is_empty() && words[i..].starts_with(tw) {
                i += tw.len();
                continue 'cover;
            }
        }
        return false;
    }
    true
}

fn trim_separators(s: &str) -> String {
    s.trim_end_matches(|c: char| {
        c.is_whitespace() || matches!(c, '-' | '–' | '—' | '|' | ':' | '~' | ',' | '.')
    })
    .to_string()
}

/// Deduplication counters. `urls_in == urls_kept + urls_removed +
/// urls_dropped` and `versions_in == versions_kept + versions_dropped`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupeStats {
    pub cliques_in: u64,
    pub cliques_kept: u64,
    pub cliques_dropped: u64,
    pub versions_in: u64,
    pub versions_kept: u64,
    pub versions_dropped: u64,
    pub urls_in: u64,
    pub urls_kept: u64,
    /// Removed as intra-clique collisions.
    pub urls_removed: u64,
    /// Lost with versions of dropped cliques.
    pub urls_dropped: u64,
}

impl DedupeStats {
    pub fn reconciles(&self) -> bool {
        self.urls_in == self.urls_kept + self.urls_removed + self.urls_dropped
            && self.versions_in == self.versions_kept + self.versions_dropped
            && self.cliques_in == self.cliques_kept + self.cliques_dropped
    }
}

/// Resolves intra-clique video-id collisions: each contested video stays on
/// the version with the most occurrences (ties: lexicographically smallest
/// version id) and is removed from the rest. Versions left without urls are
/// dropped; cliques falling below two url-bearing versions are dropped.
/// Collisions across different cliques are untouched.
pub fn dedupe_urls(cliques: Vec<Clique>) -> (Vec<Clique>, DedupeStats) {
    let mut stats = DedupeStats {
        cliques_in: cliques.len() as u64,
        ..DedupeStats::default()
    };
    let mut kept = Vec::new();

    for mut clique in cliques {
        stats.versions_in += clique.versions.len() as u64;
        stats.urls_in += clique.versions.iter().map(|v| v.urls.len() as u64).sum::<u64>();

        let mut holders: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, version) in clique.versions.iter().enumerate() {
            for url in &version.urls {
                holders.entry(url.clone()).or_default().push(idx);
            }
        }

        for (url, indices) in holders {
            if indices.len() < 2 {
                continue;
            }
            let winner = indices
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let va = &clique.versions[a];
                    let vb = &clique.versions[b];
                    vb.occurrences
                        .len()
                        .cmp(&va.occurrences.len())
                        .then_with(|| va.version_id.cmp(&vb.version_id))
                })
                .expect("collision list is non-empty");
            for idx in indices {
                if idx != winner {
                    clique.versions[idx].urls.retain(|u| u != &url);
                    stats.urls_removed += 1;
                }
            }
        }

        let before = clique.versions.len();
        clique.versions.retain(|v| !v.urls.is_empty());
        stats.versions_dropped += (before - clique.versions.len()) as u64;

        if clique.versions.len() >= 2 {
            stats.versions_kept += clique.versions.len() as u64;
            stats.urls_kept += clique.versions.iter().map(|v| v.urls.len() as u64).sum::<u64>();
            stats.cliques_kept += 1;
            kept.push(clique);
        } else {
            stats.versions_dropped += clique.versions.len() as u64;
            stats.urls_dropped += clique.versions.iter().map(|v| v.urls.len() as u64).sum::<u64>();
            stats.cliques_dropped += 1;
        }
    }
    (kept, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::TrackOccurrence;
    use crate::ids::ReleaseId;
    use crate::ingest::ArtistRecord;

    fn graph() -> ArtistGraph {
        let mk = |id: u64, name: &str| ArtistRecord {
            id: ArtistId(id),
            name: name.to_string(),
            name_variations: vec![],
            alias_ids: vec![],
            member_ids: vec![],
            group_ids: vec![],
        };
        ArtistGraph::from_records([mk(1, "Alpha"), mk(2, "Beta"), mk(3, "Gamma")])
    }

    fn version(performers: &[u64], featuring: &[u64], title: &str) -> Version {
        let occurrence = TrackOccurrence {
            release_id: ReleaseId(1),
            position: "A1".into(),
            raw_title: title.to_string(),
            normalized_title: Normalizer::default().full(title),
            performer_ids: performers.iter().copied().map(ArtistId).collect(),
            featuring_ids: featuring.iter().copied().map(ArtistId).collect(),
            writer_ids_expanded: [ArtistId(9)].into_iter().collect(),
            genres: vec![],
            styles: vec![],
            year: None,
            country: None,
        };
        Version {
            version_id: "v-test".into(),
            artist_key: occurrence.artist_key(),
            occurrences: vec![occurrence],
            urls: vec![],
        }
    }

    fn candidate(title: &str) -> VideoCandidate {
        VideoCandidate {
            video_id: "vid1".into(),
            title: title.to_string(),
            uploader: "Alpha - Topic".into(),
            channel_is_topic: true,
            description: String::new(),
            duration_s: 210,
            categories: vec!["Music".into()],
            artist_field: None,
        }
    }

    fn matcher(g: &ArtistGraph) -> Matcher<'_> {
        Matcher::new(g, Normalizer::default(), MatchConfig::default())
    }

    #[test]
    fn query_format_examples() {
        let g = graph();
        let m = matcher(&g);
        assert_eq!(m.build_query(&version(&[1, 2], &[], "Song")), "Alpha, Beta - Song");
        assert_eq!(
            m.build_query(&version(&[1, 2], &[3], "Song")),
            "Alpha, Beta - Song (featuring Gamma)"
        );
        assert_eq!(m.build_query(&version(&[1], &[], "Song")), "Alpha - Song");
    }

    #[test]
    fn official_by_description_marker() {
        let g = graph();
        let m = matcher(&g);
        let mut c = candidate("Song");
        c.channel_is_topic = false;
        c.uploader = "Example Records".into();
        c.description = "Provided to YouTube by Example Records".into();
        assert!(m.is_official(&c, &BTreeSet::new()));
    }

    #[test]
    fn official_by_topic_channel() {
        let g = graph();
        let m = matcher(&g);
        let c = candidate("Song");
        assert!(m.is_official(&c, &BTreeSet::new()));
    }

    #[test]
    fn official_by_uploader_name() {
        let g = graph();
        let m = matcher(&g);
        let mut c = candidate("Song");
        c.channel_is_topic = false;
        c.uploader = "Alpha Official".into();
        let names = BTreeSet::from(["alpha".to_string()]);
        assert!(m.is_official(&c, &names));
        c.uploader = "Random Fan Channel".into();
        assert!(!m.is_official(&c, &names));
    }

    #[test]
    fn stripped_level_accepts_decorated_query_title() {
        let g = graph();
        let m = matcher(&g);
        let v = version(&[1], &[], "Song");
        let outcome = m.match_version(&v, &[candidate("Alpha - Song (Official Video)")]);
        assert_eq!(outcome.decisions[0].reason, MatchReason::AcceptedStripped);
        assert_eq!(outcome.accepted, vec!["vid1".to_string()]);
    }

    #[test]
    fn exact_level_accepts_bare_title() {
        let g = graph();
        let m = matcher(&g);
        let v = version(&[1], &[], "Song");
        let outcome = m.match_version(&v, &[candidate("Song")]);
        assert_eq!(outcome.decisions[0].reason, MatchReason::AcceptedExact);
    }

    #[test]
    fn permutation_level_accepts_reordered_artists() {
        let g = graph();
        let m = matcher(&g);
        let v = version(&[1, 2], &[], "Song");
        let outcome = m.match_version(&v, &[candidate("Beta, Alpha - Song")]);
        assert_eq!(outcome.decisions[0].reason, MatchReason::AcceptedPermutation);
    }

    #[test]
    fn duration_boundary_inclusive() {
        let g = graph();
        let m = matcher(&g);
        let v = version(&[1], &[], "Song");
        let mut at_limit = candidate("Song");
        at_limit.duration_s = 1200;
        let mut over = candidate("Song");
        over.duration_s = 1201;
        let outcome = m.match_version(&v, &[at_limit, over]);
        assert_eq!(outcome.decisions[0].reason, MatchReason::AcceptedExact);
        assert_eq!(outcome.decisions[1].reason, MatchReason::TooLong);
    }

    #[test]
    fn category_gate_first() {
        let g = graph();
        let m = matcher(&g);
        let v = version(&[1], &[], "Song");
        let mut c = candidate("Song");
        c.categories = vec!["Entertainment".into()];
        c.duration_s = 5000; // later gate must not be consulted
        let outcome = m.match_version(&v, &[c]);
        assert_eq!(outcome.decisions[0].reason, MatchReason::NotMusicCategory);
    }

    #[test]
    fn artist_mismatch_when_title_matches_but_no_artist_signal() {
        let g = graph();
        let m = matcher(&g);
        let v = version(&[1], &[], "Song");
        let mut c = candidate("Song");
        c.channel_is_topic = false;
        c.uploader = "Big Label".into();
        c.description = "Provided to YouTube by Big Label".into();
        let outcome = m.match_version(&v, &[c]);
        assert_eq!(outcome.decisions[0].reason, MatchReason::ArtistMismatch);
    }

    #[test]
    fn empty_candidate_list_yields_empty_outcome() {
        let g = graph();
        let m = matcher(&g);
        let v = version(&[1], &[], "Song");
        let outcome = m.match_version(&v, &[]);
        assert!(outcome.accepted.is_empty());
        assert!(outcome.decisions.is_empty());
    }

    #[test]
    fn strip_decorations_cases() {
        let g = graph();
        let m = matcher(&g);
        assert_eq!(m.strip_decorations("song (official video)"), "song");
        assert_eq!(m.strip_decorations("song (radio edit)"), "song (radio edit)");
        assert_eq!(m.strip_decorations("song - remastered"), "song");
        assert_eq!(m.strip_decorations("song hd"), "song");
        assert_eq!(m.strip_decorations("audio"), "audio"); // never strip to empty
    }

    fn url_version(id: &str, occurrences: usize, urls: &[&str]) -> Version {
        let occ = TrackOccurrence {
            release_id: ReleaseId(1),
            position: "A1".into(),
            raw_title: "x".into(),
            normalized_title: Normalizer::default().full("x"),
            performer_ids: [ArtistId(1)].into_iter().collect(),
            featuring_ids: BTreeSet::new(),
            writer_ids_expanded: [ArtistId(9)].into_iter().collect(),
            genres: vec![],
            styles: vec![],
            year: None,
            country: None,
        };
        Version {
            version_id: id.to_string(),
            artist_key: vec![ArtistId(1)],
            occurrences: vec![occ; occurrences],
            urls: urls.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn clique_of(id: &str, versions: Vec<Version>) -> Clique {
        Clique {
            clique_id: id.to_string(),
            normalized_title: Normalizer::default().full("x"),
            versions,
        }
    }

    #[test]
    fn dedupe_shared_url_drops_collapsed_clique() {
        let clique = clique_of(
            "c1",
            vec![url_version("v1", 2, &["dup"]), url_version("v2", 1, &["dup"])],
        );
        let (kept, stats) = dedupe_urls(vec![clique]);
        assert!(kept.is_empty());
        assert_eq!(stats.cliques_dropped, 1);
        assert_eq!(stats.urls_removed, 1);
    }

    #[test]
    fn dedupe_keeps_winner_with_most_occurrences() {
        let clique = clique_of(
            "c1",
            vec![
                url_version("v1", 1, &["dup", "own1"]),
                url_version("v2", 3, &["dup"]),
                url_version("v3", 1, &["own2"]),
            ],
        );
        let (kept, stats) = dedupe_urls(vec![clique]);
        assert_eq!(kept.len(), 1);
        let versions = &kept[0].versions;
        assert_eq!(versions.len(), 3);
        let v1 = versions.iter().find(|v| v.version_id == "v1").unwrap();
        assert_eq!(v1.urls, vec!["own1".to_string()]);
        let v2 = versions.iter().find(|v| v.version_id == "v2").unwrap();
        assert_eq!(v2.urls, vec!["dup".to_string()]);
        assert_eq!(stats.urls_in, stats.urls_kept + stats.urls_removed);
    }

    #[test]
    fn dedupe_cross_clique_duplicates_untouched() {
        let a = clique_of("c1", vec![url_version("v1", 1, &["same"]), url_version("v2", 1, &["u2"])]);
        let b = clique_of("c2", vec![url_version("v3", 1, &["same"]), url_version("v4", 1, &["u4"])]);
        let (kept, stats) = dedupe_urls(vec![a, b]);
        assert_eq!(kept.len(), 2);
        assert_eq!(stats.urls_removed, 0);
    }

    #[test]
    fn dedupe_no_duplicates_is_identity_on_url_bearing_cliques() {
        let clique = clique_of("c1", vec![url_version("v1", 1, &["u1"]), url_version("v2", 1, &["u2"])]);
        let (kept, _) = dedupe_urls(vec![clique.clone()]);
        assert_eq!(kept, vec![clique]);
    }
}
