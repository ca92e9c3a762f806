//! Explosive-root ("bubble") tests for price series.
//!
//! The crate provides the right-tail ADF family (full-sample ADF, rolling
//! ADF, SADF, GSADF and the BSADF date-stamping sequence), Monte Carlo
//! critical values under a unit-root null, date-stamping of bubble episodes,
//! and generators for random-walk, explosive AR(1) and Evans collapsing-bubble
//! series.
//!
//! ```
//! use bubbletest::{gsadf, sadf, adf_full, gen_random_walk, NullSpec, TestConfig};
//!
//! let series = gen_random_walk(120, &NullSpec::default(), 1).unwrap();
//! let cfg = TestConfig::default();
//! let adf = adf_full(&series, &cfg).unwrap();
//! let (sadf, _) = sadf(&series, &cfg).unwrap();
//! let gsadf = gsadf(&series, &cfg).unwrap();
//! assert!(adf <= sadf && sadf <= gsadf);
//! ```

pub mod adf;
pub mod datestamp;
pub mod error;
pub mod fmt;
pub mod mc;
pub mod recursive;
pub mod series;
pub mod synth;

pub use adf::{adf_statistic, ols_fit, select_lag_bic, AdfSpec, Deterministic, LagPolicy, RegressionResult, Tail};
pub use datestamp::{attach_dates, default_min_duration, episode_coverage, stamp_episodes, BubbleEpisode};
pub use error::{Error, ErrorKind, Result};
pub use mc::{
    bsadf_cv_sequence, critical_values, simulate_bsadf, CacheDocument, CriticalValues, CvCache, CvSequence,
    NullSpec, TestKind,
};
pub use recursive::{adf_full, bsadf_sequence, gsadf, radf, sadf, MinWindow, SequenceKind, StatSequence, TestConfig};
pub use series::{load_csv, CsvOptions, TimeSeries, Transform};
pub use synth::{gen_evans_bubble, gen_explosive_ar1, gen_random_walk, Ar1Spec, EvansSample, EvansSpec};
