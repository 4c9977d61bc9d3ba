//! Lexicometric estimate of oral references to women, from first names
//! found in transcribed utterances.
//!
//! Counting rules:
//! - a token must start with an uppercase letter and contain a lowercase
//!   letter afterwards (common nouns and acronyms are skipped);
//! - its canonical form must be in the lexicon (and not stop-listed);
//! - in a run of such tokens separated only by whitespace, only the first
//!   one counts ("Gazi Mustafa Kemal" counts "Gazi"). Punctuation ends a run.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;

use crate::ingest::{canonical_name, NameLexicon};
use crate::model::{MetricKind, MetricValue, Utterance};

/// Transcriber hallucination pattern, matched case-insensitively at the start of the text.
pub const HALLUCINATION_PATTERN: &str = r"^\W*sous-titr(age|es par)";

fn hallucination_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(&format!("(?i){HALLUCINATION_PATTERN}")).expect("valid pattern"))
}

pub fn is_hallucination(text: &str) -> bool {
    hallucination_regex().is_match(text)
}

/// `true` if the utterance should be kept.
pub fn filter_hallucination(utterance: &Utterance) -> bool {
    !is_hallucination(&utterance.text)
}

/// A whitespace-delimited word with surrounding punctuation removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    /// Position of the first character, counted in chars.
    pub char_offset: usize,
}

/// Output of [`tokenize`]: words interleaved with punctuation separators,
/// in text order. Whitespace is implicit between pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece<'a> {
    Word(Token<'a>),
    Separator(Token<'a>),
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !unicode_normalization::char::is_combining_mark(c)
}

/// Splits on whitespace, then peels leading and trailing punctuation off
/// each chunk into separator pieces. Inner punctuation (hyphens,
/// apostrophes) stays in the word.
pub fn tokenize(text: &str) -> Vec<Piece<'_>> {
    let mut pieces = Vec::new();
    // (byte index, char index) for each char of the current chunk
    let mut byte_chars: Vec<(usize, usize)> = Vec::new();
    for (char_pos, (b, c)) in text.char_indices().enumerate() {
        if c.is_whitespace() {
            emit_chunk(text, &byte_chars, &mut pieces);
            byte_chars.clear();
        } else {
            byte_chars.push((b, char_pos));
        }
    }
    emit_chunk(text, &byte_chars, &mut pieces);
    pieces
}

fn emit_chunk<'a>(text: &'a str, chunk: &[(usize, usize)], pieces: &mut Vec<Piece<'a>>) {
    if chunk.is_empty() {
        return;
    }
    let char_at = |i: usize| text[chunk[i].0..].chars().next().unwrap();
    let end_byte = |i: usize| chunk[i].0 + char_at(i).len_utf8();
    let first_word = (0..chunk.len()).find(|&i| !is_punct(char_at(i)));
    let Some(lo) = first_word else {
        pieces.push(Piece::Separator(Token {
            text: &text[chunk[0].0..end_byte(chunk.len() - 1)],
            char_offset: chunk[0].1,
        }));
        return;
    };
    let hi = (0..chunk.len()).rev().find(|&i| !is_punct(char_at(i))).unwrap();
    if lo > 0 {
        pieces.push(Piece::Separator(Token {
            text: &text[chunk[0].0..chunk[lo].0],
            char_offset: chunk[0].1,
        }));
    }
    pieces.push(Piece::Word(Token {
        text: &text[chunk[lo].0..end_byte(hi)],
        char_offset: chunk[lo].1,
    }));
    if hi + 1 < chunk.len() {
        pieces.push(Piece::Separator(Token {
            text: &text[chunk[hi + 1].0..end_byte(chunk.len() - 1)],
            char_offset: chunk[hi + 1].1,
        }));
    }
}

/// Word tokens of `text`, without separators.
pub fn words(text: &str) -> Vec<Token<'_>> {
    tokenize(text)
        .into_iter()
        .filter_map(|p| match p {
            Piece::Word(t) => Some(t),
            Piece::Separator(_) => None,
        })
        .collect()
}

/// Capitalized with at least one lowercase letter after the first character.
pub fn has_name_shape(token: &str) -> bool {
    let mut chars = token.chars();
    match chars.next() {
        Some(first) if first.is_uppercase() => chars.any(char::is_lowercase),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NameHit {
    pub surface: String,
    pub female_prob: f64,
    pub char_offset: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UtteranceNameStats {
    pub hits: Vec<NameHit>,
}

impl UtteranceNameStats {
    /// Mean female attribution probability; `None` without hits.
    pub fn mean_female_prob(&self) -> Option<f64> {
        (!self.hits.is_empty())
            .then(|| self.hits.iter().map(|h| h.female_prob).sum::<f64>() / self.hits.len() as f64)
    }

    pub fn female_mass(&self) -> f64 {
        self.hits.iter().map(|h| h.female_prob).sum()
    }
}

/// First-name extractor over a lexicon, with an optional stop-list of
/// canonical names that are never counted.
#[derive(Debug, Clone)]
pub struct NameExtractor<'a> {
    lexicon: &'a NameLexicon,
    stop_list: BTreeSet<String>,
}

impl<'a> NameExtractor<'a> {
    pub fn new(lexicon: &'a NameLexicon) -> Self {
        NameExtractor {
            lexicon,
            stop_list: BTreeSet::new(),
        }
    }

    pub fn with_stop_list<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stop_list = names.into_iter().map(|n| canonical_name(n.as_ref())).collect();
        self
    }

    fn candidate_prob(&self, token: &str) -> Option<f64> {
        if !has_name_shape(token) {
            return None;
        }
        let canonical = canonical_name(token);
        if self.stop_list.contains(&canonical) {
            return None;
        }
        self.lexicon.get(&canonical).map(|r| r.female_prob)
    }

    pub fn extract_text(&self, text: &str) -> UtteranceNameStats {
        let mut hits = Vec::new();
        let mut in_run = false;
        for piece in tokenize(text) {
            match piece {
                Piece::Separator(_) => in_run = false,
                Piece::Word(tok) => match self.candidate_prob(tok.text) {
                    Some(p) => {
                        if !in_run {
                            hits.push(NameHit {
                                surface: tok.text.to_string(),
                                female_prob: p,
                                char_offset: tok.char_offset,
                            });
                        }
                        in_run = true;
                    }
                    None => in_run = false,
                },
            }
        }
        UtteranceNameStats { hits }
    }

    pub fn extract_names(&self, utterance: &Utterance) -> UtteranceNameStats {
        self.extract_text(&utterance.text)
    }
}

/// Per-media name statistics, parallel to the bundle's utterance lists.
/// `None` marks utterances dropped as transcriber hallucinations.
pub type CorpusNameStats = BTreeMap<String, Vec<Option<UtteranceNameStats>>>;

impl NameExtractor<'_> {
    pub fn extract_corpus(&self, utterances: &BTreeMap<String, Vec<Utterance>>) -> CorpusNameStats {
        utterances
            .iter()
            .map(|(media, list)| {
                let stats = list
                    .iter()
                    .map(|u| filter_hallucination(u).then(|| self.extract_names(u)))
                    .collect();
                (media.clone(), stats)
            })
            .collect()
    }
}

pub fn extract_names(utterance: &Utterance, lexicon: &NameLexicon) -> UtteranceNameStats {
    NameExtractor::new(lexicon).extract_names(utterance)
}

/// Quotation rate: mean female probability over hits, as a percentage
/// weighted by hit count.
pub fn wqr<'h>(hits: impl IntoIterator<Item = &'h NameHit>) -> MetricValue {
    let (mass, count) = hits
        .into_iter()
        .fold((0.0, 0usize), |(m, n), h| (m + h.female_prob, n + 1));
    if count == 0 {
        MetricValue::undefined(MetricKind::Wqr)
    } else {
        MetricValue::new(MetricKind::Wqr, mass, count as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeInterval;
    use proptest::prelude::*;

    fn lexicon() -> NameLexicon {
        NameLexicon::from_counts([
            ("Gazi", 100, 0),
            ("Mustafa", 100, 0),
            ("Kemal", 100, 0),
            ("Claude", 412_247, 56_215),
            ("Marie", 4_500, 2_245_500),
            ("Vladimir", 300, 0),
            ("Jean-Pierre", 1000, 0),
            ("Léa", 0, 500),
        ])
    }

    fn surfaces(text: &str) -> Vec<String> {
        NameExtractor::new(&lexicon())
            .extract_text(text)
            .hits
            .into_iter()
            .map(|h| h.surface)
            .collect()
    }

    #[test]
    fn hallucination_examples() {
        assert!(is_hallucination("Sous-titrage Société Radio-Canada"));
        assert!(is_hallucination("— sous-titres par la communauté"));
        assert!(!is_hallucination("Le sous-titrage est activé"));
    }

    #[test]
    fn tokenize_examples() {
        let pieces = tokenize("Bonjour, Marie !");
        let w: Vec<&str> = words("Bonjour, Marie !").iter().map(|t| t.text).collect();
        assert_eq!(w, ["Bonjour", "Marie"]);
        let seps: Vec<&str> = pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Separator(t) => Some(t.text),
                _ => None,
            })
            .collect();
        assert_eq!(seps, [",", "!"]);
        assert!(tokenize("").is_empty());
        assert_eq!(words("Jean-Pierre")[0].text, "Jean-Pierre");
        assert_eq!(words("« Léa »")[0].char_offset, 2);
        assert_eq!(words("l'été")[0].text, "l'été");
    }

    #[test]
    fn decomposed_accents_stay_in_the_word() {
        let nfd = "(Le\u{301}a)";
        assert_eq!(words(nfd)[0].text, "Le\u{301}a");
        assert_eq!(surfaces("avec Le\u{301}a, hier"), ["Le\u{301}a"]);
        assert_eq!(words("Andre\u{301}")[0].text, "Andre\u{301}");
    }

    #[test]
    fn name_rules() {
        assert_eq!(surfaces("Gazi Mustafa Kemal est arrivé"), ["Gazi"]);
        assert!(surfaces("CLAUDE est là").is_empty());
        assert!(surfaces("claude est là").is_empty());
        assert_eq!(surfaces("Marie, Vladimir"), ["Marie", "Vladimir"]);
        assert_eq!(surfaces("Marie Vladimir"), ["Marie"]);
        assert_eq!(surfaces("Jean-Pierre et Léa."), ["Jean-Pierre", "Léa"]);
        assert!(surfaces("Jean").is_empty());
        // A non-name word in between ends the run.
        assert_eq!(surfaces("Marie et Vladimir"), ["Marie", "Vladimir"]);
    }

    #[test]
    fn mean_of_marie_and_vladimir() {
        let lex = NameLexicon::from_counts([("Marie", 2, 998), ("Vladimir", 10, 0)]);
        let stats = NameExtractor::new(&lex).extract_text("Marie, Vladimir");
        assert!((stats.mean_female_prob().unwrap() - 0.499).abs() < 1e-12);
    }

    #[test]
    fn stop_list_removes_name() {
        let lex = lexicon();
        let ex = NameExtractor::new(&lex).with_stop_list(["VLADIMIR"]);
        let hits = ex.extract_text("Vladimir Marie").hits;
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].surface, "Marie");
    }

    #[test]
    fn extract_from_utterance() {
        let u = Utterance {
            media_id: "m".into(),
            span: TimeInterval::new(0, 1000).unwrap(),
            text: "Merci Claude.".into(),
        };
        let stats = extract_names(&u, &lexicon());
        assert_eq!(stats.hits[0].char_offset, 6);
        assert_eq!((stats.hits[0].female_prob * 100.0).round(), 12.0);
    }

    fn hit(p: f64) -> NameHit {
        NameHit {
            surface: "X".into(),
            female_prob: p,
            char_offset: 0,
        }
    }

    #[test]
    fn wqr_examples() {
        assert_eq!(wqr(&[hit(1.0), hit(0.0)]).female_pct(), Some(50.0));
        assert!((wqr(&[hit(0.12)]).female_pct().unwrap() - 12.0).abs() < 1e-12);
        let three = wqr(&[hit(1.0), hit(0.0), hit(0.12)]).female_pct().unwrap();
        assert!((three - 112.0 / 3.0).abs() < 1e-12);
        let none: [NameHit; 0] = [];
        assert!(!wqr(&none).is_defined());
    }

    proptest! {
        #[test]
        fn hits_are_bounded_and_idempotent(words in prop::collection::vec(
            prop::sample::select(vec!["Marie", "Vladimir", "Gazi", "CLAUDE", "claude", "et", ",", "Le", "Léa!", "Jean-Pierre", "?"]), 0..20)
        ) {
            let text = words.join(" ");
            let lex = lexicon();
            let ex = NameExtractor::new(&lex);
            let stats = ex.extract_text(&text);
            prop_assert!(stats.hits.len() <= self::words(&text).len());
            for h in &stats.hits {
                prop_assert!(h.surface.chars().next().unwrap().is_uppercase());
            }
            let rejoined: Vec<&str> = stats.hits.iter().map(|h| h.surface.as_str()).collect();
            let again = ex.extract_text(&rejoined.join(", "));
            prop_assert_eq!(
                again.hits.iter().map(|h| (&h.surface, h.female_prob)).collect::<Vec<_>>(),
                stats.hits.iter().map(|h| (&h.surface, h.female_prob)).collect::<Vec<_>>()
            );
        }
    }
}
