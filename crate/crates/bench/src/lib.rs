//! Fixtures shared by the engine benchmarks.

use wre_core::namex::{CorpusNameStats, NameExtractor};
use wre_core::stats::AnalysisRow;
use wre_core::synthgen::{generate, generate_population, PopulationSpec, SynthSpec};
use wre_core::{CorpusBundle, TimeInterval};

/// A synthetic corpus with its extracted names.
pub struct BenchCorpus {
    pub bundle: CorpusBundle,
    pub names: CorpusNameStats,
}

pub fn corpus(programs_per_cell: usize) -> BenchCorpus {
    let (bundle, _) = generate(&SynthSpec::default_corpus(11, programs_per_cell)).expect("synth corpus");
    let names = NameExtractor::new(&bundle.lexicon).extract_corpus(&bundle.utterances);
    BenchCorpus { bundle, names }
}

pub fn population(rows: usize) -> Vec<AnalysisRow> {
    generate_population(&PopulationSpec::planted(11, rows, 0.369, 0.282)).expect("synth population")
}

/// `n` disjoint 1 s cuts spread over a one-hour base interval.
pub fn cuts(n: u64) -> (TimeInterval, Vec<TimeInterval>) {
    let base = TimeInterval::new(0, 3_600_000).expect("base");
    let step = 3_600_000 / (n + 1);
    let cuts = (1..=n)
        .rev()
        .map(|i| TimeInterval::new(i * step, i * step + 1_000).expect("cut"))
        .collect();
    (base, cuts)
}

/// Transcript-like text of roughly `words` words with a few names.
pub fn transcript(words: usize) -> String {
    const PIECES: [&str; 8] = ["bonjour", "Marie", "et", "Jean-Pierre", "ont", "parlé,", "avec", "Dupont."];
    PIECES.iter().cycle().take(words).copied().collect::<Vec<_>>().join(" ")
}
