//! Deterministic desk-scale fixture corpus.
//!
//! Generates a dump of ~60 artists / ~120 releases / ~400 tracks with known
//! structure: shared-writer merges across releases, alias- and
//! group-mediated writer links, disjoint-writer splits under one title,
//! singleton works, droppable tracks (no writer, empty normalized title),
//! decorated occurrence titles, plus captured video candidates and external
//! reference works. Everything is driven by a seeded ChaCha8 stream and
//! ordered collections, so the same seed always yields byte-identical
//! fixture files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artist_graph::ArtistGraph;
use crate::clique::{build_cliques, collect_occurrences, extract_occurrences};
use crate::config::MatchConfig;
use crate::ids::{ArtistId, ReleaseId};
use crate::ingest::{ArtistCredit, ArtistRecord, RawTrack, ReleaseRecord};
use crate::matcher::{CandidateSet, Matcher, VideoCandidate};
use crate::normalize::Normalizer;
use crate::splitter::ExternalRef;

/// Complete fixture inputs for an end-to-end pipeline run.
#[derive(Debug, Clone)]
pub struct FixtureCorpus {
    pub artists: Vec<ArtistRecord>,
    pub releases: Vec<ReleaseRecord>,
    pub candidates: Vec<CandidateSet>,
    pub external_refs: Vec<ExternalRef>,
}

const FIRST_NAMES: [&str; 20] = [
    "Mira", "Cobalt", "Juno", "Vesper", "Orla", "Tamsin", "Rhea", "Lorne", "Isolde", "Brann",
    "Sable", "Quill", "Petra", "Anselm", "Freya", "Dorian", "Ines", "Callum", "Zora", "Hollis",
];

const LAST_NAMES: [&str; 20] = [
    "Voss", "Ray", "Marsh", "Kline", "Ferro", "Lark", "Stone", "Aldair", "Finch", "Moreau",
    "Hale", "Nyx", "Varga", "Osei", "Brandt", "Leclair", "Soto", "Whitaker", "Iver", "Dunne",
];

const GROUP_NAMES: [&str; 8] = [
    "The Silver Owls",
    "Cobalt Assembly",
    "Quartet Nine",
    "Paper Lantern Trio",
    "Vesper Union",
    "The Long Coats",
    "Marble Arch Band",
    "Northern Relay",
];

const ALIAS_NAMES: [&str; 8] = [
    "Nightjar", "Redshift", "The Hollow", "Glasswing", "Ivory Gate", "Low Meridian",
    "Bellweather", "Arc Lamp",
];

const TITLE_POOL: [&str; 40] = [
    "Tin Roof Chorus",
    "Everglade Waltz",
    "Signal Fires",
    "Cardinal Directions",
    "Brick by Brick",
    "Afternoon Physics",
    "The Pale Harbor",
    "Iron Lullaby",
    "Second Skylight",
    "Weather for Strangers",
    "Ember Town",
    "Salt and Circuit",
    "Harbor Lights",
    "Violet Static",
    "Under the Yew",
    "Copper Veins",
    "Last Ferry Home",
    "Winter Arithmetic",
    "Café & Crème",
    "Über Allen Gipfeln",
    "A Short Walk North",
    "Thousand Paper Cranes",
    "Driftwood Letters",
    "The Orchard Line",
    "Half Past Nowhere",
    "Candle Arcade",
    "Meridian Blue",
    "Stray Voltage",
    "Gallery of Small Hours",
    "Borrowed Coastline",
    "The Quiet Engine",
    "Parallel Gardens",
    "Auburn Signal",
    "Two Rivers Crossing",
    "Lanterns for June",
    "Static Bloom",
    "Midnight Cartography",
    "Sleeper Train South",
    "Hundred Year Porch",
    "Opal Divide",
];

const GENRES: [&str; 6] = ["Rock", "Electronic", "Jazz", "Folk, World, & Country", "Pop", "Funk / Soul"];
const STYLES: [&str; 8] = [
    "Indie Rock", "Ambient", "Bebop", "Synth-pop", "Folk Rock", "Downtempo", "Hard Bop", "House",
];
const COUNTRIES: [&str; 5] = ["US", "UK", "Germany", "Spain", "Japan"];
const LABELS: [&str; 6] = [
    "Harbor Line Records",
    "Blue Attic",
    "Meridian Sound",
    "Paper Crane Music",
    "Veld Records",
    "Outward Recordings",
];
const FORMATS: [&str; 4] = ["Vinyl", "CD", "Cassette", "File"];

fn person_name(i: u64) -> String {
    let idx = i as usize;
    format!(
        "{} {}",
        FIRST_NAMES[idx % 20],
        LAST_NAMES[(idx * 3 + (idx / 20) * 7) % 20]
    )
}

struct VersionSpec {
    performers: Vec<u64>,
    featuring: Vec<u64>,
    occurrence_count: usize,
}

struct WorkSpec {
    title: String,
    /// Full writer pool; the first occurrence always carries all of it.
    writers: Vec<u64>,
    versions: Vec<VersionSpec>,
}

/// One planned track before packing into releases.
struct PlannedTrack {
    title: String,
    track_artists: Vec<u64>,
    featuring: Vec<u64>,
    writers: Vec<u64>,
    /// When set, the track relies on release-level credits.
    writers_at_release_level: bool,
    omit_track_artists: bool,
}

pub fn corpus(seed: u64) -> FixtureCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let artists = build_artists();
    let works = build_works(&mut rng);
    let tracks = plan_tracks(&works, &mut rng);
    let releases = pack_releases(tracks, &mut rng);
    let external_refs = build_external_refs();

    let graph = ArtistGraph::from_records(artists.clone());
    let candidates = build_candidates(&artists, &releases, &graph, &mut rng);

    FixtureCorpus {
        artists,
        releases,
        candidates,
        external_refs,
    }
}

fn build_artists() -> Vec<ArtistRecord> {
    let mut artists = Vec::new();
    // Individuals 1..=40; 1..=8 each have an alias entry at 41..=48.
    for i in 1..=40u64 {
        let mut record = ArtistRecord {
            id: ArtistId(i),
            name: person_name(i),
            name_variations: vec![],
            alias_ids: vec![],
            member_ids: vec![],
            group_ids: vec![],
        };
        if i % 5 == 0 {
            let name = record.name.clone();
            let (first, last) = name.split_once(' ').expect("two-part name");
            record.name_variations = vec![
                format!("{last}, {first}"),
                format!("{}. {last}", &first[..1]),
            ];
        }
        if i <= 8 {
            record.alias_ids = vec![ArtistId(40 + i)];
        }
        artists.push(record);
    }
    for i in 1..=8u64 {
        artists.push(ArtistRecord {
            id: ArtistId(40 + i),
            name: ALIAS_NAMES[(i - 1) as usize].to_string(),
            name_variations: vec![],
            alias_ids: vec![ArtistId(i)],
            member_ids: vec![],
            group_ids: vec![],
        });
    }
    // Groups 51..=58 with fixed member sets; members get back-references.
    let member_sets: [&[u64]; 8] = [
        &[5, 6],
        &[9, 10, 11],
        &[12, 13],
        &[14, 15, 16],
        &[17, 18],
        &[19, 20, 21],
        &[22, 23],
        &[30, 24],
    ];
    for (offset, members) in member_sets.iter().enumerate() {
        let group_id = 51 + offset as u64;
        artists.push(ArtistRecord {
            id: ArtistId(group_id),
            name: GROUP_NAMES[offset].to_string(),
            name_variations: vec![],
            alias_ids: vec![],
            member_ids: members.iter().map(|&m| ArtistId(m)).collect(),
            group_ids: vec![],
        });
        for &member in *members {
            let record = artists
                .iter_mut()
                .find(|a| a.id == ArtistId(member))
                .expect("member exists");
            record.group_ids.push(ArtistId(group_id));
        }
    }
    artists
}

fn build_works(rng: &mut ChaCha8Rng) -> Vec<WorkSpec> {
    let mut works = Vec::new();
    let version = |performers: Vec<u64>, occurrence_count: usize| VersionSpec {
        performers,
        featuring: vec![],
        occurrence_count,
    };

    // Shared-writer merge under one title.
    works.push(WorkSpec {
        title: "Silver Morning".into(),
        writers: vec![1, 2],
        versions: vec![version(vec![25], 2), version(vec![26], 1)],
    });
    works.push(WorkSpec {
        title: "Silver Morning".into(),
        writers: vec![2, 3],
        versions: vec![version(vec![27], 1)],
    });
    // Alias-mediated merge: 44 is an alias of 4.
    works.push(WorkSpec {
        title: "Paper Boats".into(),
        writers: vec![4],
        versions: vec![version(vec![28], 2), version(vec![29], 1)],
    });
    works.push(WorkSpec {
        title: "Paper Boats".into(),
        writers: vec![44],
        versions: vec![version(vec![31], 1)],
    });
    // Group-mediated merge: group 51 has members 5 and 6.
    works.push(WorkSpec {
        title: "Glass River".into(),
        writers: vec![51],
        versions: vec![version(vec![32], 1), version(vec![33], 1)],
    });
    works.push(WorkSpec {
        title: "Glass River".into(),
        writers: vec![5],
        versions: vec![version(vec![34], 2)],
    });
    // Disjoint writers under one title: two separate cliques.
    works.push(WorkSpec {
        title: "Night Letter".into(),
        writers: vec![7],
        versions: vec![version(vec![35], 1), version(vec![36], 1)],
    });
    works.push(WorkSpec {
        title: "Night Letter".into(),
        writers: vec![8],
        versions: vec![version(vec![37], 1), version(vec![38], 1)],
    });
    // Single-version work: its component is discarded.
    works.push(WorkSpec {
        title: "Lone Signal".into(),
        writers: vec![9],
        versions: vec![version(vec![39], 2)],
    });
    // Same writers, different titles: stays two cliques (title variability).
    works.push(WorkSpec {
        title: "Moon Over Naples".into(),
        writers: vec![10, 11],
        versions: vec![version(vec![24], 1), version(vec![25], 1)],
    });
    works.push(WorkSpec {
        title: "Spanish Eyes".into(),
        writers: vec![10, 11],
        versions: vec![version(vec![26], 1), version(vec![27], 1)],
    });
    // Solo-vs-group credit inside one clique (overlap-merge material:
    // performer 12 is a member of group 53).
    works.push(WorkSpec {
        title: "Ledger of Hours".into(),
        writers: vec![13],
        versions: vec![version(vec![12], 1), version(vec![53], 1)],
    });

    // Bulk works over the title pool.
    for (index, title) in TITLE_POOL.iter().enumerate() {
        let writer_count = 1 + index % 3;
        let writers: Vec<u64> = (0..writer_count)
            .map(|k| 1 + ((index * 5 + k * 11) % 40) as u64)
            .collect();
        let version_count = 1 + (index * 7 + 3) % 5;
        let mut versions = Vec::new();
        for v in 0..version_count {
            let mut performers = vec![1 + ((index * 3 + v * 13) % 40) as u64];
            if (index + v) % 4 == 0 {
                let second = 1 + ((index * 3 + v * 13 + 17) % 40) as u64;
                if !performers.contains(&second) {
                    performers.push(second);
                }
            }
            // Occasional group performer.
            if (index + v) % 9 == 0 {
                performers = vec![51 + ((index + v) % 8) as u64];
            }
            let featuring = if (index + v) % 7 == 3 {
                vec![1 + ((index + v * 5 + 23) % 40) as u64]
            } else {
                vec![]
            };
            let featuring = featuring
                .into_iter()
                .filter(|f| !performers.contains(f))
                .collect();
            versions.push(VersionSpec {
                performers,
                featuring,
                occurrence_count: 1 + rng.random_range(0..4),
            });
        }
        works.push(WorkSpec {
            title: title.to_string(),
            writers,
            versions,
        });
    }
    works
}

const DECORATIONS: [&str; 6] = [
    " (Radio Edit)",
    " (Live)",
    " [Remastered 2003]",
    " (Single Version)",
    " (Club Mix)",
    "",
];

fn plan_tracks(works: &[WorkSpec], rng: &mut ChaCha8Rng) -> Vec<PlannedTrack> {
    let mut tracks = Vec::new();
    for work in works {
        for (v_index, version) in work.versions.iter().enumerate() {
            for occurrence in 0..version.occurrence_count {
                // The first occurrence of a work's first version always
                // carries the full writer pool so intra-work chains connect;
                // later occurrences may credit a subset.
                let writers = if v_index == 0 && occurrence == 0 {
                    work.writers.clone()
                } else {
                    let keep = 1 + rng.random_range(0..work.writers.len());
                    work.writers[..keep].to_vec()
                };
                let title = if occurrence == 0 {
                    work.title.clone()
                } else if rng.random_range(0..4) == 0 {
                    format!("The {}", work.title)
                } else {
                    format!("{}{}", work.title, DECORATIONS[rng.random_range(0..DECORATIONS.len())])
                };
                tracks.push(PlannedTrack {
                    title,
                    track_artists: version.performers.clone(),
                    featuring: version.featuring.clone(),
                    writers,
                    writers_at_release_level: rng.random_range(0..12) == 0,
                    omit_track_artists: rng.random_range(0..6) == 0,
                });
            }
        }
    }
    // Tracks dropped by extraction: no writers anywhere.
    for i in 0..20 {
        tracks.push(PlannedTrack {
            title: format!("Untitled Sketch {i}"),
            track_artists: vec![1 + (i * 3 % 40) as u64],
            featuring: vec![],
            writers: vec![],
            writers_at_release_level: false,
            omit_track_artists: false,
        });
    }
    // Tracks whose normalized title is empty.
    for i in 0..6 {
        tracks.push(PlannedTrack {
            title: ["(Intro)", "(...)", "[Segue]"][i % 3].to_string(),
            track_artists: vec![1 + (i * 7 % 40) as u64],
            featuring: vec![],
            writers: vec![1 + (i % 40) as u64],
            writers_at_release_level: false,
            omit_track_artists: false,
        });
    }
    tracks
}

fn pack_releases(tracks: Vec<PlannedTrack>, rng: &mut ChaCha8Rng) -> Vec<ReleaseRecord> {
    // Tracks that keep their writers at release level become single-track
    // releases (release writers apply to every track, so mixing them into a
    // multi-track release would change their meaning).
    let (singles, mut tracks): (Vec<PlannedTrack>, Vec<PlannedTrack>) = tracks
        .into_iter()
        .partition(|t| t.writers_at_release_level && !t.writers.is_empty());

    // Deterministic shuffle so works spread across releases.
    use rand::seq::SliceRandom;
    tracks.shuffle(rng);

    let mut releases = Vec::new();
    let mut release_id = 100u64;
    let mut batches: Vec<Vec<PlannedTrack>> = singles.into_iter().map(|t| vec![t]).collect();
    let mut queue = tracks.into_iter().peekable();
    while queue.peek().is_some() {
        let track_count = 2 + rng.random_range(0..4);
        batches.push((0..track_count).filter_map(|_| queue.next()).collect());
    }

    for planned in batches {
        release_id += 1;

        // The release credits the first track's artists; tracks matching them
        // may omit their own credits to exercise the precedence rule.
        let release_artist_ids = planned[0].track_artists.clone();
        let single_release_writers = planned.len() == 1 && planned[0].writers_at_release_level;
        let mut release_writer_ids: Vec<ArtistId> = Vec::new();
        let mut raw_tracks = Vec::new();
        for (i, plan) in planned.iter().enumerate() {
            let omit = plan.omit_track_artists && plan.track_artists == release_artist_ids;
            if single_release_writers {
                release_writer_ids = plan.writers.iter().map(|&w| ArtistId(w)).collect();
            }
            raw_tracks.push(RawTrack {
                position: (i + 1).to_string(),
                title: plan.title.clone(),
                artist_ids: if omit {
                    vec![]
                } else {
                    plan.track_artists.iter().map(|&a| ArtistId(a)).collect()
                },
                featuring_ids: plan.featuring.iter().map(|&f| ArtistId(f)).collect(),
                writer_ids: if single_release_writers {
                    vec![]
                } else {
                    plan.writers.iter().map(|&w| ArtistId(w)).collect()
                },
            });
        }

        let genre_count = 1 + rng.random_range(0..2);
        let genres: Vec<String> = GENRES
            .choose_multiple(rng, genre_count)
            .map(|g| g.to_string())
            .collect();
        let style_count = rng.random_range(0..3);
        let styles: Vec<String> = STYLES
            .choose_multiple(rng, style_count)
            .map(|s| s.to_string())
            .collect();

        releases.push(ReleaseRecord {
            id: ReleaseId(release_id),
            title: format!("Collection {release_id}"),
            artists: release_artist_ids
                .iter()
                .map(|&id| ArtistCredit {
                    id: ArtistId(id),
                    name: person_name(id),
                })
                .collect(),
            writer_ids: release_writer_ids,
            tracks: raw_tracks,
            genres,
            styles,
            year: Some(1960 + rng.random_range(0..61)),
            country: Some(COUNTRIES[rng.random_range(0..COUNTRIES.len())].to_string()),
            label_names: vec![LABELS[rng.random_range(0..LABELS.len())].to_string()],
            formats: vec![FORMATS[rng.random_range(0..FORMATS.len())].to_string()],
            master_id: (rng.random_range(0..3) == 0).then(|| rng.random_range(1000..9999)),
        });
    }
    releases
}

fn build_external_refs() -> Vec<ExternalRef> {
    vec![
        // Plain title + writer name.
        ExternalRef {
            title: "Silver Morning".into(),
            writers: vec![person_name(2)],
        },
        // Writer referenced through an alias name (44 aliases 4).
        ExternalRef {
            title: "Paper Boats".into(),
            writers: vec![ALIAS_NAMES[3].to_string()],
        },
        // Decorated title normalizes to the clique title.
        ExternalRef {
            title: "Glass River (Radio Edit)".into(),
            writers: vec![person_name(5)],
        },
        // No such work.
        ExternalRef {
            title: "Completely Absent Work".into(),
            writers: vec![person_name(13)],
        },
    ]
}

fn build_candidates(
    artists: &[ArtistRecord],
    releases: &[ReleaseRecord],
    graph: &ArtistGraph,
    rng: &mut ChaCha8Rng,
) -> Vec<CandidateSet> {
    let normalizer = Normalizer::default();
    let (occurrences, _) =
        collect_occurrences(extract_occurrences(releases.iter().cloned(), graph, &normalizer));
    let (cliques, _) = build_cliques(occurrences, graph, false);
    let matcher = Matcher::new(graph, Normalizer::default(), MatchConfig::default());
    let names: BTreeMap<ArtistId, &str> =
        artists.iter().map(|a| (a.id, a.name.as_str())).collect();

    let mut sets: Vec<CandidateSet> = Vec::new();
    let mut vid = 0u64;
    let next_vid = |vid: &mut u64| {
        *vid += 1;
        format!("vid{vid:04}")
    };

    for (clique_index, clique) in cliques.iter().enumerate() {
        // Force one shared video id inside every eighth clique to exercise
        // URL deduplication.
        let force_collision = clique_index % 8 == 5 && clique.versions.len() >= 2;
        let collision_id = force_collision.then(|| next_vid(&mut vid));

        for (v_index, version) in clique.versions.iter().enumerate() {
            let occurrence = &version.occurrences[0];
            let performer_names: Vec<&str> = occurrence
                .performer_ids
                .iter()
                .map(|id| names.get(id).copied().unwrap_or("Unknown"))
                .collect();
            let uploader_topic = format!("{} - Topic", performer_names[0]);
            let query = matcher.build_query(version);
            let raw_title = &occurrence.raw_title;

            let mut candidates: Vec<VideoCandidate> = Vec::new();
            let accept_all = clique.versions.len() >= 3;
            let roll = rng.random_range(0..10);
            let make = |title: String, uploader: String, topic: bool, description: String,
                        duration: u32, categories: Vec<String>, id: String| VideoCandidate {
                video_id: id,
                title,
                uploader,
                channel_is_topic: topic,
                description,
                duration_s: duration,
                categories,
                artist_field: None,
            };

            if let (Some(collision), true) = (&collision_id, v_index < 2) {
                candidates.push(make(
                    raw_title.clone(),
                    uploader_topic.clone(),
                    true,
                    String::new(),
                    180 + rng.random_range(0..180),
                    vec!["Music".into()],
                    collision.clone(),
                ));
            } else if accept_all || roll < 5 {
                // One accepted candidate in one of the three title shapes.
                let shape = rng.random_range(0..4);
                let title = match shape {
                    0 => raw_title.clone(),
                    1 => query.clone(),
                    2 => format!("{query} (Official Video)"),
                    _ => {
                        if performer_names.len() >= 2 {
                            let mut reversed = performer_names.clone();
                            reversed.reverse();
                            format!("{} - {raw_title}", reversed.join(", "))
                        } else {
                            format!("{raw_title} [Lyric Video]")
                        }
                    }
                };
                candidates.push(make(
                    title,
                    uploader_topic.clone(),
                    true,
                    String::new(),
                    120 + rng.random_range(0..300),
                    vec!["Music".into()],
                    next_vid(&mut vid),
                ));
                if roll == 4 {
                    // A trailing rejected result after the accepted one.
                    candidates.push(make(
                        "Completely Different Song".into(),
                        uploader_topic.clone(),
                        true,
                        String::new(),
                        200,
                        vec!["Music".into()],
                        next_vid(&mut vid),
                    ));
                }
                if roll == 2 {
                    // A second acceptable url for the same version.
                    candidates.push(make(
                        format!("{raw_title} (Official Video)"),
                        format!("{} Official", performer_names[0]),
                        false,
                        "Provided to YouTube by Harbor Line Records".into(),
                        120 + rng.random_range(0..300),
                        vec!["Music".into()],
                        next_vid(&mut vid),
                    ));
                }
            } else if roll < 9 {
                // Rejected-only candidate lists, cycling the reject reasons.
                let candidate = match roll {
                    5 => make(
                        raw_title.clone(),
                        uploader_topic.clone(),
                        true,
                        String::new(),
                        1201 + rng.random_range(0..2000),
                        vec!["Music".into()],
                        next_vid(&mut vid),
                    ),
                    6 => make(
                        raw_title.clone(),
                        uploader_topic.clone(),
                        true,
                        String::new(),
                        210,
                        vec!["Entertainment".into()],
                        next_vid(&mut vid),
                    ),
                    7 => make(
                        raw_title.clone(),
                        "Random Fan Uploads".into(),
                        false,
                        "best concert ever".into(),
                        210,
                        vec!["Music".into()],
                        next_vid(&mut vid),
                    ),
                    _ => make(
                        raw_title.clone(),
                        "Harbor Line Records".into(),
                        false,
                        "Provided to YouTube by Harbor Line Records".into(),
                        210,
                        vec!["Music".into()],
                        next_vid(&mut vid),
                    ),
                };
                // roll == 8 gives title match + official label but no artist
                // signal anywhere: artist-mismatch.
                candidates.push(candidate);
            }
            // roll == 9 (and non-forced versions in collision cliques past
            // index 1): no captured candidates at all.

            if !candidates.is_empty() {
                sets.push(CandidateSet {
                    version_id: version.version_id.clone(),
                    candidates,
                });
            }
        }
    }
    sets.sort_by(|a, b| a.version_id.cmp(&b.version_id));
    sets
}

fn escape_xml(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders the artists as a subset-schema XML document.
pub fn artists_xml(corpus: &FixtureCorpus) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<artists>\n");
    for artist in &corpus.artists {
        writeln!(out, "  <artist>").unwrap();
        writeln!(out, "    <id>{}</id>", artist.id).unwrap();
        writeln!(out, "    <name>{}</name>", escape_xml(&artist.name)).unwrap();
        if !artist.name_variations.is_empty() {
            writeln!(out, "    <namevariations>").unwrap();
            for variation in &artist.name_variations {
                writeln!(out, "      <name>{}</name>", escape_xml(variation)).unwrap();
            }
            writeln!(out, "    </namevariations>").unwrap();
        }
        if !artist.alias_ids.is_empty() {
            writeln!(out, "    <aliases>").unwrap();
            for alias in &artist.alias_ids {
                writeln!(out, "      <name id=\"{alias}\">alias</name>").unwrap();
            }
            writeln!(out, "    </aliases>").unwrap();
        }
        if !artist.member_ids.is_empty() {
            writeln!(out, "    <members>").unwrap();
            for member in &artist.member_ids {
                writeln!(out, "      <name id=\"{member}\">member</name>").unwrap();
            }
            writeln!(out, "    </members>").unwrap();
        }
        if !artist.group_ids.is_empty() {
            writeln!(out, "    <groups>").unwrap();
            for group in &artist.group_ids {
                writeln!(out, "      <name id=\"{group}\">group</name>").unwrap();
            }
            writeln!(out, "    </groups>").unwrap();
        }
        writeln!(out, "  </artist>").unwrap();
    }
    out.push_str("</artists>\n");
    out
}

/// Renders the releases as a subset-schema XML document.
pub fn releases_xml(corpus: &FixtureCorpus) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<releases>\n");
    for release in &corpus.releases {
        writeln!(out, "  <release id=\"{}\">", release.id).unwrap();
        writeln!(out, "    <title>{}</title>", escape_xml(&release.title)).unwrap();
        writeln!(out, "    <artists>").unwrap();
        for credit in &release.artists {
            writeln!(
                out,
                "      <artist><id>{}</id><name>{}</name></artist>",
                credit.id,
                escape_xml(&credit.name)
            )
            .unwrap();
        }
        writeln!(out, "    </artists>").unwrap();
        if !release.writer_ids.is_empty() {
            writeln!(out, "    <extraartists>").unwrap();
            for writer in &release.writer_ids {
                writeln!(
                    out,
                    "      <artist role=\"Written-By\"><id>{writer}</id><name>{}</name></artist>",
                    escape_xml(&person_name(writer.0))
                )
                .unwrap();
            }
            writeln!(out, "    </extraartists>").unwrap();
        }
        for genre in &release.genres {
            writeln!(out, "    <genres><genre>{}</genre></genres>", escape_xml(genre)).unwrap();
        }
        for style in &release.styles {
            writeln!(out, "    <styles><style>{}</style></styles>", escape_xml(style)).unwrap();
        }
        if let Some(year) = release.year {
            writeln!(out, "    <released>{year}</released>").unwrap();
        }
        if let Some(country) = &release.country {
            writeln!(out, "    <country>{}</country>", escape_xml(country)).unwrap();
        }
        for label in &release.label_names {
            writeln!(out, "    <labels><label name=\"{}\"/></labels>", escape_xml(label)).unwrap();
        }
        for format in &release.formats {
            writeln!(out, "    <formats><format name=\"{}\"/></formats>", escape_xml(format))
                .unwrap();
        }
        if let Some(master) = release.master_id {
            writeln!(out, "    <master_id>{master}</master_id>").unwrap();
        }
        writeln!(out, "    <tracklist>").unwrap();
        for track in &release.tracks {
            writeln!(out, "      <track>").unwrap();
            writeln!(out, "        <position>{}</position>", escape_xml(&track.position)).unwrap();
            writeln!(out, "        <title>{}</title>", escape_xml(&track.title)).unwrap();
            if !track.artist_ids.is_empty() {
                writeln!(out, "        <artists>").unwrap();
                for id in &track.artist_ids {
                    writeln!(
                        out,
                        "          <artist><id>{id}</id><name>{}</name></artist>",
                        escape_xml(&person_name(id.0))
                    )
                    .unwrap();
                }
                writeln!(out, "        </artists>").unwrap();
            }
            if !track.featuring_ids.is_empty() || !track.writer_ids.is_empty() {
                writeln!(out, "        <extraartists>").unwrap();
                for id in &track.writer_ids {
                    writeln!(
                        out,
                        "          <artist role=\"Written-By\"><id>{id}</id><name>{}</name></artist>",
                        escape_xml(&person_name(id.0))
                    )
                    .unwrap();
                }
                for id in &track.featuring_ids {
                    writeln!(
                        out,
                        "          <artist role=\"Featuring\"><id>{id}</id><name>{}</name></artist>",
                        escape_xml(&person_name(id.0))
                    )
                    .unwrap();
                }
                writeln!(out, "        </extraartists>").unwrap();
            }
            writeln!(out, "      </track>").unwrap();
        }
        writeln!(out, "    </tracklist>").unwrap();
        writeln!(out, "  </release>").unwrap();
    }
    out.push_str("</releases>\n");
    out
}

/// One candidate set per line.
pub fn candidates_jsonl(corpus: &FixtureCorpus) -> String {
    let mut out = String::new();
    for set in &corpus.candidates {
        out.push_str(&serde_json::to_string(set).expect("serializable"));
        out.push('\n');
    }
    out
}

/// One external reference work per line.
pub fn external_refs_jsonl(corpus: &FixtureCorpus) -> String {
    let mut out = String::new();
    for reference in &corpus.external_refs {
        out.push_str(&serde_json::to_string(reference).expect("serializable"));
        out.push('\n');
    }
    out
}
