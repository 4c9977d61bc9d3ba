//! First-name lexicon built from the national birth-registration export
//! (`sexe;preusuel;annais;nombre`).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use unicode_normalization::UnicodeNormalization;

use super::IngestError;
use crate::model::NameRecord;

/// `preusuel` value grouping all rare names; carries no usable name.
pub const RARE_NAME_SENTINEL: &str = "_PRENOMS_RARES";
/// `annais` placeholder for rows with unknown birth year.
pub const UNKNOWN_YEAR: &str = "XXXX";

const NAME_DB_HEADER: [&str; 4] = ["sexe", "preusuel", "annais", "nombre"];

/// Canonical form of a first name: NFC, then in each hyphen-separated part
/// the first character uppercased and the rest lowercased.
///
/// ```
/// use wre_core::ingest::canonical_name;
/// assert_eq!(canonical_name("jean-PIERRE"), "Jean-Pierre");
/// assert_eq!(canonical_name("ZOÉ"), "Zoé");
/// ```
pub fn canonical_name(raw: &str) -> String {
    let nfc: String = raw.trim().nfc().collect();
    let mut out = String::with_capacity(nfc.len());
    for (i, part) in nfc.split('-').enumerate() {
        if i > 0 {
            out.push('-');
        }
        let mut chars = part.chars();
        if let Some(first) = chars.next() {
            out.extend(first.to_uppercase());
            for c in chars {
                out.extend(c.to_lowercase());
            }
        }
    }
    // Case mapping can produce decomposed sequences.
    out.nfc().collect()
}

/// Lookup from canonical first name to its population statistics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NameLexicon {
    records: BTreeMap<String, NameRecord>,
}

impl NameLexicon {
    /// Builds a lexicon from `(name, male_count, female_count)` triples.
    /// Names are canonicalized and counts for equal canonical forms summed.
    pub fn from_counts<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, u64, u64)>,
        S: AsRef<str>,
    {
        let mut acc: BTreeMap<String, (u64, u64)> = BTreeMap::new();
        for (name, male, female) in entries {
            let e = acc.entry(canonical_name(name.as_ref())).or_default();
            e.0 += male;
            e.1 += female;
        }
        Self::from_aggregated(acc)
    }

    fn from_aggregated(acc: BTreeMap<String, (u64, u64)>) -> Self {
        let records = acc
            .into_iter()
            .filter(|(_, (m, f))| m + f > 0)
            .map(|(name, (m, f))| (name.clone(), NameRecord::from_counts(name, m, f)))
            .collect();
        NameLexicon { records }
    }

    pub fn get(&self, canonical: &str) -> Option<&NameRecord> {
        self.records.get(canonical)
    }

    /// Looks up a surface form after canonicalization.
    pub fn lookup(&self, surface: &str) -> Option<&NameRecord> {
        self.records.get(&canonical_name(surface))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NameRecord> {
        self.records.values()
    }

    /// Writes the lexicon back in the export format, one row per sex with
    /// the unknown-year placeholder.
    pub fn write_name_db<W: Write>(&self, out: W) -> Result<(), IngestError> {
        let mut w = csv::WriterBuilder::new().delimiter(b';').from_writer(out);
        w.write_record(NAME_DB_HEADER)?;
        for rec in self.records.values() {
            for (sex, count) in [("1", rec.male_count()), ("2", rec.female_count)] {
                if count > 0 {
                    w.write_record([sex, rec.name.as_str(), UNKNOWN_YEAR, &count.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses the birth-registration export, aggregating years and sexes into
/// one record per canonical name. Rare-name sentinel rows are skipped.
pub fn parse_name_db<R: Read>(source: R) -> Result<NameLexicon, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    super::check_header(&mut reader, &NAME_DB_HEADER)?;
    let mut acc: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for result in reader.records() {
        let record = result?;
        let line = super::line_of(&record);
        if record.len() != 4 {
            return Err(IngestError::MalformedRecord {
                line,
                reason: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let name = record[1].trim();
        if name == RARE_NAME_SENTINEL {
            continue;
        }
        if name.is_empty() {
            return Err(IngestError::MalformedRecord {
                line,
                reason: "empty name".into(),
            });
        }
        let count: u64 = record[3].trim().parse().map_err(|_| IngestError::MalformedRecord {
            line,
            reason: format!("non-numeric count {:?}", &record[3]),
        })?;
        let year = record[2].trim();
        if year != UNKNOWN_YEAR && year.parse::<u16>().is_err() {
            return Err(IngestError::MalformedRecord {
                line,
                reason: format!("invalid birth year {year:?}"),
            });
        }
        let entry = acc.entry(canonical_name(name)).or_default();
        match record[0].trim() {
            "1" => entry.0 += count,
            "2" => entry.1 += count,
            other => {
                return Err(IngestError::MalformedRecord {
                    line,
                    reason: format!("unknown sex code {other:?}"),
                })
            }
        }
    }
    Ok(NameLexicon::from_aggregated(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical_name("CLAUDE"), "Claude");
        assert_eq!(canonical_name("jean-pierre"), "Jean-Pierre");
        assert_eq!(canonical_name("  marie "), "Marie");
        // Decomposed e + combining acute becomes the composed form.
        assert_eq!(canonical_name("le\u{301}a"), "Léa");
        assert_ne!(canonical_name("Léa"), canonical_name("Lea"));
        let c = canonical_name("ÉLODIE-anne");
        assert_eq!(canonical_name(&c), c);
    }

    #[test]
    fn claude_aggregates_across_years() {
        let db = "sexe;preusuel;annais;nombre\n\
                  1;CLAUDE;1950;400000\n\
                  1;CLAUDE;1960;12247\n\
                  2;CLAUDE;1950;56000\n\
                  2;CLAUDE;XXXX;215\n\
                  1;_PRENOMS_RARES;1950;99\n";
        let lex = parse_name_db(db.as_bytes()).unwrap();
        let claude = lex.get("Claude").unwrap();
        assert_eq!(claude.total_count, 468_462);
        assert_eq!((claude.female_prob * 100.0).round(), 12.0);
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn single_sex_and_symmetric() {
        let db = "sexe;preusuel;annais;nombre\n2;ZOÉ;1990;100\n1;X;2000;50\n2;X;2001;50\n";
        let lex = parse_name_db(db.as_bytes()).unwrap();
        assert_eq!(lex.get("Zoé").unwrap().female_prob, 1.0);
        assert_eq!(lex.get("X").unwrap().female_prob, 0.5);
    }

    #[test]
    fn malformed_rows_report_line() {
        let db = "sexe;preusuel;annais;nombre\n1;A;1990;1\n1;B;1990\n";
        match parse_name_db(db.as_bytes()) {
            Err(IngestError::MalformedRecord { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let db = "sexe;preusuel;annais;nombre\n1;A;1990;many\n";
        assert!(matches!(
            parse_name_db(db.as_bytes()),
            Err(IngestError::MalformedRecord { line: 2, .. })
        ));
        let db = "sexe;preusuel;annais;nombre\n3;A;1990;1\n";
        assert!(parse_name_db(db.as_bytes()).is_err());
    }

    #[test]
    fn wrong_header_rejected() {
        let db = "sex;name;year;count\n1;A;1990;1\n";
        assert!(matches!(
            parse_name_db(db.as_bytes()),
            Err(IngestError::BadHeader { .. })
        ));
    }

    #[test]
    fn aggregation_is_order_independent() {
        let mut rows: Vec<String> = (0..60)
            .map(|i| format!("{};{};{};{}", 1 + i % 2, ["ANNE", "LOUIS", "CAMILLE", "anne"][i % 4], 1950 + i, 10 + i))
            .collect();
        let build = |rows: &[String]| {
            let text = format!("sexe;preusuel;annais;nombre\n{}\n", rows.join("\n"));
            parse_name_db(text.as_bytes()).unwrap()
        };
        let reference = build(&rows);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            rows.shuffle(&mut rng);
            assert_eq!(build(&rows), reference);
        }
        for rec in reference.iter() {
            let expected = rec.female_count as f64 / rec.total_count as f64;
            assert!((rec.female_prob - expected).abs() <= 1e-12);
            assert!((0.0..=1.0).contains(&rec.female_prob));
        }
    }

    #[test]
    fn write_then_parse_is_identity() {
        let lex = NameLexicon::from_counts([("Marie", 10, 2000), ("Jean-Pierre", 700, 0), ("Camille", 40, 60)]);
        let mut buf = Vec::new();
        lex.write_name_db(&mut buf).unwrap();
        assert_eq!(parse_name_db(buf.as_slice()).unwrap(), lex);
    }
}
