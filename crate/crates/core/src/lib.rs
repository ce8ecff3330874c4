//! Sentiment classification for noisy marketplace reviews.
//!
//! The crate covers the whole classical pipeline:
//!
//! - [`corpus`]: CSV ingestion, text normalization, label canonicalization and
//!   seeded stratified splits.
//! - [`features`]: uni+bigram vocabulary fitting and sublinear TF-IDF vectors.
//! - [`models`]: class-weighted multinomial logistic regression, one-vs-rest
//!   squared-hinge linear SVM, and multinomial naive Bayes.
//! - [`metrics`]: confusion matrices, accuracy, macro and weighted F1.
//! - [`persistence`]: the versioned JSON model envelope.
//! - [`pipeline`]: a fitted vocabulary plus classifier, usable on raw text.
//! - [`cli`] and [`serve`]: the `ulasan` command line and HTTP service.
//!
//! ```
//! use ulasan::corpus::{clean_corpus, LabelMap, RawRecord};
//! use ulasan::features::FeatureConfig;
//! use ulasan::models::{ModelKind, TrainConfig};
//! use ulasan::pipeline::train_model;
//!
//! let raw: Vec<RawRecord> = [
//!     ("Barang bagus, mantap!", "positif"),
//!     ("bagus sekali mantap", "positif"),
//!     ("biasa saja, standar", "netral"),
//!     ("standar biasa", "netral"),
//!     ("rusak dan kecewa", "negatif"),
//!     ("kecewa, barang rusak", "negatif"),
//! ]
//! .iter()
//! .map(|(t, l)| RawRecord::new(*t, *l))
//! .collect();
//! let (reviews, _) = clean_corpus(&raw, &LabelMap::default()).unwrap();
//! let (model, _) = train_model(
//!     &reviews,
//!     ModelKind::LogReg,
//!     &FeatureConfig::default(),
//!     &TrainConfig::default(),
//! )
//! .unwrap();
//! let out = model.predict_text("Mantap, BAGUS!!");
//! assert_eq!(out.label.name(), "positif");
//! ```

pub mod cli;
pub mod corpus;
pub mod features;
pub mod metrics;
pub mod models;
pub mod persistence;
pub mod pipeline;
pub mod serve;

pub use corpus::{Review, SentimentLabel, NUM_CLASSES};
pub use features::{FeatureConfig, SparseVector, Vocabulary};
pub use models::{Classifier, ModelKind, TrainConfig, WeightMode};
pub use pipeline::SentimentModel;
