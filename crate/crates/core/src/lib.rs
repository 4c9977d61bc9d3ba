//! Gender representation estimates for broadcast corpora.
//!
//! The engine reads precomputed descriptor streams (speech segments,
//! transcribed utterances, face observations), program schedules and
//! channel presence reports, and computes four women-representation rates:
//!
//! - **WPR**: share of women among characters reported by channels;
//! - **WSR**: share of gendered speech time uttered by women;
//! - **WQR**: mean female attribution probability of first names quoted;
//! - **WFR**: share of on-screen faces classified as women.
//!
//! It also models the factors influencing first-name quotation with
//! one-way ANOVA and an additive OLS fit.

pub mod align;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod namex;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synthgen;

pub use ingest::{CorpusBundle, NameLexicon};
pub use model::{
    AudienceSlot, ChannelReport, ChannelStatus, ConflictPeriod, CorpusCalendar, FaceObservation, Medium, MetricKind,
    MetricValue, NameRecord, Program, ProgramCategory, Role, SegmentLabel, SpeechSegment, TimeInterval, Utterance,
};
