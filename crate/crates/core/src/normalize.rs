//! Deterministic track-title normalization.
//!
//! Two modes share one pipeline:
//!
//! - **full** — used when grouping tracks into cliques. Strips diacritics from
//!   Latin letters, lower-cases, replaces `&` with `and`, removes leading
//!   articles, deletes parenthesized/bracketed spans (mix and edit markers),
//!   removes punctuation and symbols, and collapses whitespace.
//! - **matching** — used when comparing against video titles. Same pipeline
//!   but parenthesized spans and punctuation are kept, so that edit markers
//!   still distinguish versions.
//!
//! Both modes are total, pure, and idempotent. Full-mode output is always
//! recoverable from matching-mode output via [`Normalizer::reduce_matching_to_full`].
//!
//! Two ordering details are deliberate: articles are stripped *before* span
//! deletion (so both modes see the same text at that step, which is what makes
//! the reduction law hold), and article stripping iterates until no leading
//! article remains (a single pass would not be idempotent on stacked
//! articles). "Punctuation" is interpreted as every character that is not a
//! letter, number, mark, or whitespace, which covers the Unicode punctuation
//! and symbol categories.

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::decompose_canonical;
use unicode_normalization::UnicodeNormalization;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::config::NormalizeConfig;

/// A normalized title: lower-case, single-spaced, possibly empty.
///
/// An empty value is legal and flags the track for exclusion from clique
/// building downstream.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct NormalizedTitle(String);

impl NormalizedTitle {
    /// Wraps a string that is already in normalized form, e.g. read back
    /// from a dataset file. No re-normalization is performed.
    pub fn from_canonical(value: String) -> Self {
        NormalizedTitle(value)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for NormalizedTitle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NormalizedTitle {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Title normalizer configured with an article list and bracket handling.
#[derive(Debug, Clone)]
pub struct Normalizer {
    articles: Vec<String>,
    strip_brackets: bool,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::new(&NormalizeConfig::default())
    }
}

impl Normalizer {
    pub fn new(cfg: &NormalizeConfig) -> Self {
        Normalizer {
            articles: cfg.articles.iter().map(|a| a.to_lowercase()).collect(),
            strip_brackets: cfg.strip_brackets,
        }
    }

    /// Full normalization: clique-grouping mode.
    ///
    /// Articles are stripped after span and punctuation deletion (which can
    /// expose a new leading article) and after whitespace collapsing (so a
    /// lone trailing article behaves the same whether or not trailing
    /// whitespace was present). This keeps repeated normalization a no-op.
    pub fn full(&self, raw: &str) -> NormalizedTitle {
        let s = self.shared_prefix(raw);
        let s = remove_spans(&s, self.strip_brackets);
        let s = remove_non_word(&s);
        NormalizedTitle(self.finish(&s))
    }

    /// Light normalization: video-matching mode. Keeps parenthesized spans
    /// and punctuation so edit markers still differentiate versions.
    pub fn matching(&self, raw: &str) -> NormalizedTitle {
        let s = self.shared_prefix(raw);
        NormalizedTitle(self.finish(&s))
    }

    /// Applies the full-mode-only steps (span deletion, punctuation removal,
    /// and the article re-strip those can expose) to a matching-mode title.
    /// For any input `x`, `reduce_matching_to_full(matching(x)) == full(x)`.
    pub fn reduce_matching_to_full(&self, m: &NormalizedTitle) -> NormalizedTitle {
        let s = remove_spans(m.as_str(), self.strip_brackets);
        let s = remove_non_word(&s);
        NormalizedTitle(self.finish(&s))
    }

    fn finish(&self, s: &str) -> String {
        let s = collapse_whitespace(s);
        let s = self.strip_leading_articles(&s);
        recompose(&collapse_whitespace(&s))
    }

    fn shared_prefix(&self, raw: &str) -> String {
        // Compatibility normalization folds fullwidth forms, ligatures, and
        // math-alphabet letters, which otherwise have no case mappings.
        let s: String = raw.nfkc().collect::<String>().to_lowercase();
        let s = strip_latin_diacritics(&s);
        s.replace('&', " and ")
    }

    /// Strips leading articles repeatedly. An article counts when followed
    /// by whitespace or the end of the string; a title that is nothing but
    /// articles normalizes to empty and is excluded downstream.
    fn strip_leading_articles(&self, s: &str) -> String {
        let mut rest = s.trim_start();
        loop {
            let mut stripped = false;
            for article in &self.articles {
                if rest.starts_with(article.as_str())
                    && rest[article.len()..]
                        .chars()
                        .next()
                        .is_none_or(char::is_whitespace)
                {
                    rest = rest[article.len()..].trim_start();
                    stripped = true;
                    break;
                }
            }
            if !stripped {
                return rest.to_string();
            }
        }
    }
}

/// Convenience wrapper over [`Normalizer::full`] with default configuration.
pub fn normalize_title_full(raw: &str) -> NormalizedTitle {
    Normalizer::default().full(raw)
}

/// Convenience wrapper over [`Normalizer::matching`] with default configuration.
pub fn normalize_title_matching(raw: &str) -> NormalizedTitle {
    Normalizer::default().matching(raw)
}

fn is_combining_mark(c: char) -> bool {
    c.general_category_group() == GeneralCategoryGroup::Mark
}

/// Replaces every character that canonically decomposes to an ASCII Latin
/// base letter with that base letter. Characters of other scripts pass
/// through unchanged. Stray combining marks following an ASCII letter
/// (e.g. produced by lower-casing U+0130) are dropped.
fn strip_latin_diacritics(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        let mut base = None;
        let mut parts = 0usize;
        decompose_canonical(ch, |c| {
            if parts == 0 {
                base = Some(c);
            }
            parts += 1;
        });
        match base {
            Some(b) if parts > 1 && b.is_ascii_alphabetic() => out.push(b),
            _ => {
                let after_ascii_letter =
                    out.chars().next_back().is_some_and(|p| p.is_ascii_alphabetic());
                if is_combining_mark(ch) && after_ascii_letter {
                    // mark on a Latin base that had no precomposed form
                } else {
                    out.push(ch);
                }
            }
        }
    }
    out
}

/// Deletes parenthesized (and optionally bracketed) spans, including nested
/// spans. An unclosed opener swallows everything to the end of the string.
/// A closer with no matching opener is kept (it is later removed as
/// punctuation in full mode).
fn remove_spans(s: &str, include_brackets: bool) -> String {
    let mut out = String::with_capacity(s.len());
    let mut stack: Vec<char> = Vec::new();
    for c in s.chars() {
        match c {
            '(' => stack.push('('),
            '[' if include_brackets => stack.push('['),
            ')' => {
                if stack.last() == Some(&'(') {
                    stack.pop();
                } else if stack.is_empty() {
                    out.push(c);
                }
            }
            ']' if include_brackets => {
                if stack.last() == Some(&'[') {
                    stack.pop();
                } else if stack.is_empty() {
                    out.push(c);
                }
            }
            _ if stack.is_empty() => out.push(c),
            _ => {}
        }
    }
    out
}

/// Keeps letters, numbers, combining marks, and whitespace; drops everything
/// else (punctuation, symbols, control and format characters). A mark whose
/// preceding kept character is an ASCII letter is dropped too: deleting a
/// symbol can put a stray mark next to a Latin base, and that pairing is
/// exactly what diacritic stripping removes.
fn remove_non_word(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        let kept = c.is_whitespace()
            || matches!(
                c.general_category_group(),
                GeneralCategoryGroup::Letter
                    | GeneralCategoryGroup::Number
                    | GeneralCategoryGroup::Mark
            );
        if !kept {
            continue;
        }
        if is_combining_mark(c)
            && out.chars().next_back().is_some_and(|p| p.is_ascii_alphabetic())
        {
            continue;
        }
        out.push(c);
    }
    out
}

/// Final canonical composition. Deleting characters can leave a base letter
/// and a combining mark newly adjacent; composing the result keeps the
/// output in one canonical form across repeated normalization.
fn recompose(s: &str) -> String {
    s.nfc().collect()
}

/// Single-spaces the string: every run of whitespace or control characters
/// becomes one space, leading/trailing runs are removed.
fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending = false;
    for c in s.chars() {
        if c.is_whitespace() || c.is_control() {
            if !out.is_empty() {
                pending = true;
            }
        } else {
            if pending {
                out.push(' ');
                pending = false;
            }
            out.push(c);
        }
    }
    out
}
