use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};

use wre_bench::{corpus, cuts, population, transcript};
use wre_core::metrics::{aggregate, Dimension, Grouping, MetricsConfig, SpanMode};
use wre_core::model::interval_subtract;
use wre_core::namex::NameExtractor;
use wre_core::report::{build_table, to_aligned_text, to_delimited, ReportInputs, TableId};
use wre_core::stats::{effect_report, one_way_anova, Factor};

fn names(c: &mut Criterion) {
    let data = corpus(2);
    let extractor = NameExtractor::new(&data.bundle.lexicon);
    let text = transcript(200);
    c.bench_function("extract_text/200_words", |b| b.iter(|| extractor.extract_text(black_box(&text))));
    c.bench_function("extract_corpus", |b| b.iter(|| extractor.extract_corpus(black_box(&data.bundle.utterances))));
}

fn intervals(c: &mut Criterion) {
    let (base, cut_list) = cuts(500);
    c.bench_function("interval_subtract/500_cuts", |b| {
        b.iter(|| interval_subtract(black_box(base), black_box(&cut_list)))
    });
}

fn metrics(c: &mut Criterion) {
    let data = corpus(5);
    let config = MetricsConfig::default();
    let grouping = Grouping::by(&[Dimension::Medium, Dimension::Audience]);
    c.bench_function("aggregate/medium+audience", |b| {
        b.iter(|| aggregate(&data.bundle, &data.names, black_box(&grouping), SpanMode::ExcludeBreaks, &config))
    });
}

fn stats(c: &mut Criterion) {
    let rows = population(10_000);
    c.bench_function("one_way_anova/10k", |b| b.iter(|| one_way_anova(black_box(&rows), Factor::SpeakerGender)));
    c.bench_function("effect_report/10k", |b| b.iter(|| effect_report(black_box(&rows))));
}

fn reports(c: &mut Criterion) {
    let data = corpus(2);
    let rows = population(1_000);
    let config = MetricsConfig::default();
    let inputs = ReportInputs {
        bundle: &data.bundle,
        names: &data.names,
        population: &rows,
        mode: SpanMode::ExcludeBreaks,
        config: &config,
    };
    c.bench_function("build_table/all", |b| {
        b.iter(|| TableId::ALL.iter().map(|&id| build_table(id, &inputs)).collect::<Vec<_>>())
    });
    let table = build_table(TableId::Table2, &inputs);
    c.bench_function("render/delimited+aligned", |b| {
        b.iter_batched(
            || table.clone(),
            |t| (to_delimited(&t).expect("csv"), to_aligned_text(&t)),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, names, intervals, metrics, stats, reports);
criterion_main!(benches);
