use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bubbletest::datestamp::{attach_dates, default_min_duration, episode_coverage, global_peak, stamp_episodes};
use bubbletest::mc::{config_digest, critical_values_at, level_key, parse_level, CacheDocument, CvCache, LEVELS};
use bubbletest::series::DEFAULT_DATE_FORMAT;
use bubbletest::{
    bsadf_cv_sequence, bsadf_sequence, gen_evans_bubble, gen_explosive_ar1, gen_random_walk, load_csv, Ar1Spec,
    BubbleEpisode, CriticalValues, CsvOptions, CvSequence, EvansSpec, NullSpec, TestConfig, TestKind, TimeSeries,
};
use chrono::{NaiveDate, Utc};
use serde::Serialize;
use serde_json::json;

use crate::args::{CvArgs, CvTest, DatestampArgs, Generator, InputArgs, McArgs, SimulateArgs, TestArgs, TestSelection};
use crate::error::CliError;
use crate::output::{RunManifest, Staged};

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn load_input(args: &InputArgs) -> Result<(TimeSeries, TimeSeries), CliError> {
    let opts = CsvOptions {
        date_column: args.date_col.clone(),
        value_column: args.value_col.clone(),
        date_format: args.date_format.clone(),
    };
    let raw = load_csv(&args.input, &opts)?;
    let tested = if args.use_log() { raw.to_log()? } else { raw.clone() };
    Ok((raw, tested))
}

fn parse_levels(text: &str) -> Result<Vec<f64>, CliError> {
    let mut levels = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_level)
        .collect::<Result<Vec<_>, _>>()?;
    if levels.is_empty() {
        return Err(CliError::config("no levels given"));
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    Ok(levels)
}

fn check_replications(mc: &McArgs) -> Result<(), CliError> {
    match mc.replications {
        0 => return Err(CliError::config("--replications must be at least 1")),
        n if n < 100 => eprintln!("warning: {n} replications is too few to quote quantiles (use at least 100)"),
        n if n < 1000 => eprintln!("warning: {n} replications gives noisy critical values (1000+ recommended)"),
        _ => {}
    }
    Ok(())
}

#[derive(Serialize)]
struct SeriesInfo {
    label: String,
    n_obs: usize,
    first_date: NaiveDate,
    last_date: NaiveDate,
    log: bool,
}

impl SeriesInfo {
    fn new(s: &TimeSeries, log: bool) -> Self {
        SeriesInfo {
            label: s.label().to_string(),
            n_obs: s.len(),
            first_date: s.dates()[0],
            last_date: *s.dates().last().expect("non-empty"),
            log,
        }
    }
}

#[derive(Serialize)]
struct TestResult {
    test: TestKind,
    statistic: f64,
    p_value: f64,
    critical_values: BTreeMap<String, f64>,
    rejects: BTreeMap<String, bool>,
    replications: usize,
    missing_replications: usize,
    config_digest: String,
}

#[derive(Serialize)]
struct TestReport {
    manifest: RunManifest,
    series: SeriesInfo,
    min_window: usize,
    rolling_width: Option<usize>,
    results: Vec<TestResult>,
}

pub fn run_test(args: &TestArgs) -> Result<(), CliError> {
    let started = Utc::now();
    let selection = match (args.all, args.test) {
        (true, _) => TestSelection::All,
        (false, Some(sel)) => sel,
        (false, None) => return Err(CliError::config("choose a test with --test or use --all")),
    };
    let tests: Vec<TestKind> = match selection {
        TestSelection::Adf => vec![TestKind::Adf],
        TestSelection::Radf => vec![TestKind::Radf],
        TestSelection::Sadf => vec![TestKind::Sadf],
        TestSelection::Gsadf => vec![TestKind::Gsadf],
        TestSelection::All => TestKind::ALL.to_vec(),
    };
    let levels = parse_levels(&args.levels)?;
    let cfg = args.config.test_config();
    let null = args.mc.null_spec()?;
    check_replications(&args.mc)?;
    if tests.contains(&TestKind::Radf) && cfg.rolling_width.is_none() {
        return Err(CliError::config("the rolling ADF test requires --rolling-width"));
    }

    let (_, series) = load_input(&args.input)?;
    let t = series.len();
    let w0 = cfg.resolve_min_window(t)?;
    if tests.contains(&TestKind::Radf) {
        let width = cfg.resolve_rolling_width(t)?;
        if tests.len() > 1 && width < w0 {
            return Err(CliError::config(format!(
                "--rolling-width {width} must be at least the minimum window {w0} when running several tests"
            )));
        }
    }
    let cache = args.cv_cache.as_ref().map(CvCache::new).transpose()?;

    let mut results = Vec::with_capacity(tests.len());
    for test in tests {
        let statistic = test.statistic(series.values(), &cfg)?;
        let cv: CriticalValues = match &cache {
            Some(cache) => cache.critical_values(test, t, &cfg, &null, args.mc.replications, args.mc.seed)?,
            None => critical_values_at(test, &levels, t, &cfg, &null, args.mc.replications, args.mc.seed)?,
        };
        let critical_values: BTreeMap<String, f64> =
            levels.iter().map(|&l| (level_key(l), cv.critical_value(l))).collect();
        let rejects = critical_values
            .iter()
            .map(|(k, &c)| (k.clone(), cfg.adf.tail.rejects(statistic, c)))
            .collect();
        results.push(TestResult {
            test,
            statistic,
            p_value: cv.p_value(statistic),
            critical_values,
            rejects,
            replications: cv.replications,
            missing_replications: cv.missing,
            config_digest: cv.config_digest.clone(),
        });
    }

    let mut manifest = RunManifest::new().with_input(&args.input.input)?;
    manifest.test_config = Some(cfg);
    manifest.null = Some(null);
    manifest.replications = Some(args.mc.replications);
    manifest.seed = Some(args.mc.seed);
    let report = TestReport {
        manifest,
        series: SeriesInfo::new(&series, args.input.use_log()),
        min_window: w0,
        rolling_width: cfg.rolling_width,
        results,
    };

    let mut staged = Staged::default();
    staged.add_json(&args.out, &report)?;
    staged.add_run_log(&args.out, started)?;
    staged.commit()?;

    print_test_table(&report, &levels);
    Ok(())
}

fn print_test_table(report: &TestReport, levels: &[f64]) {
    let mut header = format!("{:<8}{:>12}{:>10}", "test", "statistic", "p-value");
    for l in levels {
        header.push_str(&format!("{:>10}", format!("{:.0}%", l * 100.0)));
    }
    say!("{header}");
    for r in &report.results {
        let mut line = format!("{:<8}{:>12.4}{:>10.4}", r.test.name().to_uppercase(), r.statistic, r.p_value);
        for l in levels {
            line.push_str(&format!("{:>10.4}", r.critical_values[&level_key(*l)]));
        }
        say!("{line}");
    }
    say!(
        "T = {}, minimum window = {}, replications = {}",
        report.series.n_obs, report.min_window, report.results[0].replications
    );
}

#[derive(Serialize)]
struct PeakInfo {
    index: usize,
    date: Option<NaiveDate>,
    statistic: f64,
}

#[derive(Serialize)]
struct DatestampReport {
    manifest: RunManifest,
    series: SeriesInfo,
    level: f64,
    min_window: usize,
    min_duration: usize,
    gsadf: Option<f64>,
    effective_sample: usize,
    coverage: f64,
    coverage_line: String,
    global_peak: Option<PeakInfo>,
    cv_config_digest: String,
    episodes: Vec<BubbleEpisode>,
}

/// Loads a cached BSADF critical-value sequence and checks it was simulated
/// for this configuration.
fn load_cv_file(path: &Path, level: f64, t: usize, cfg: &TestConfig, null: &NullSpec) -> Result<CvSequence, CliError> {
    let doc = match CacheDocument::load(path)? {
        CacheDocument::CvSequence(doc) => doc,
        CacheDocument::CriticalValues(_) => {
            return Err(CliError::config(format!(
                "{} holds scalar critical values; date-stamping needs `cv --test bsadf` output",
                path.display()
            )))
        }
    };
    if doc.config_digest != doc.expected_digest() {
        return Err(CliError::config(format!(
            "{}: stored digest {} does not match its own contents ({})",
            path.display(),
            doc.config_digest,
            doc.expected_digest()
        )));
    }
    let expected = config_digest("bsadf", t, cfg, null, doc.replications, doc.seed);
    if doc.config_digest != expected {
        let mut diff = vec![format!("  digest: cache {} != run {}", doc.config_digest, expected)];
        if doc.t != t {
            diff.push(format!("  T: cache {} != run {}", doc.t, t));
        }
        if doc.test_config != *cfg {
            diff.push(format!(
                "  test_config: cache {} != run {}",
                serde_json::to_string(&doc.test_config)?,
                serde_json::to_string(cfg)?
            ));
        }
        if doc.null != *null {
            diff.push(format!(
                "  null: cache {} != run {}",
                serde_json::to_string(&doc.null)?,
                serde_json::to_string(null)?
            ));
        }
        return Err(CliError::config(format!(
            "critical-value cache {} was built for a different configuration:\n{}",
            path.display(),
            diff.join("\n")
        )));
    }
    if level_key(doc.level) != level_key(level) {
        return Err(CliError::config(format!(
            "cache level {} does not match requested level {}",
            level_key(doc.level),
            level_key(level)
        )));
    }
    Ok(doc)
}

pub fn run_datestamp(args: &DatestampArgs) -> Result<(), CliError> {
    let started = Utc::now();
    let level = parse_level(&args.level)?;
    if !LEVELS.iter().any(|l| level_key(*l) == level_key(level)) {
        return Err(CliError::config("--level must be 90, 95 or 99"));
    }
    let cfg = args.config.test_config();
    let null = args.mc.null_spec()?;
    if args.min_duration == Some(0) {
        return Err(CliError::config("--min-duration must be at least 1"));
    }

    let (raw, series) = load_input(&args.input)?;
    let t = series.len();
    let w0 = cfg.resolve_min_window(t)?;
    let stats = bsadf_sequence(&series, &cfg)?;

    let cvs = match &args.cv_cache {
        Some(p) if p.is_dir() => {
            check_replications(&args.mc)?;
            CvCache::new(p)?.cv_sequence(level, t, &cfg, &null, args.mc.replications, args.mc.seed)?
        }
        Some(p) => load_cv_file(p, level, t, &cfg, &null)?,
        None => {
            check_replications(&args.mc)?;
            bsadf_cv_sequence(level, t, &cfg, &null, args.mc.replications, args.mc.seed)?
        }
    };

    let min_duration = args.min_duration.unwrap_or_else(|| default_min_duration(t));
    let mut episodes = stamp_episodes(&stats, &cvs, min_duration)?;
    attach_dates(&mut episodes, &series);
    let coverage = episode_coverage(&episodes, stats.len())?;
    let peak = global_peak(&episodes).map(|e| PeakInfo {
        index: e.peak_index,
        date: e.peak_date,
        statistic: e.peak_stat,
    });

    let mut manifest = RunManifest::new().with_input(&args.input.input)?;
    manifest.test_config = Some(cfg);
    manifest.null = Some(null);
    manifest.replications = Some(cvs.replications);
    manifest.seed = Some(cvs.seed);
    let report = DatestampReport {
        manifest,
        series: SeriesInfo::new(&series, args.input.use_log()),
        level,
        min_window: w0,
        min_duration,
        gsadf: stats.sup(),
        effective_sample: stats.len(),
        coverage,
        coverage_line: coverage_line(coverage),
        global_peak: peak,
        cv_config_digest: cvs.config_digest.clone(),
        episodes,
    };

    let dir = &args.out;
    let mut staged = Staged::default();
    let report_path = dir.join("episodes.json");
    staged.add_json(&report_path, &report)?;
    staged.add(dir.join("episodes.csv"), episodes_csv(&report.episodes)?);
    staged.add(dir.join("plot.csv"), plot_csv(&raw, &stats, &cvs)?);
    staged.add_run_log(&report_path, started)?;
    staged.commit()?;

    say!("{:>4}  {:<12}{:<12}{:<12}{:>10}{:>10}", "#", "origin", "peak", "end", "peak stat", "length");
    for (i, e) in report.episodes.iter().enumerate() {
        let d = |x: Option<NaiveDate>| x.map_or_else(|| "ongoing".to_string(), |d| d.to_string());
        say!(
            "{:>4}  {:<12}{:<12}{:<12}{:>10.4}{:>10}",
            i + 1,
            d(e.origin_date),
            d(e.peak_date),
            d(e.end_date),
            e.peak_stat,
            e.duration
        );
    }
    say!("{}", report.coverage_line);
    Ok(())
}

fn coverage_line(coverage: f64) -> String {
    format!("bubbles in {:.1}% of the period", coverage * 100.0)
}

fn csv_bytes(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w).map_err(|e| CliError::config(format!("csv: {e}")))?;
    w.into_inner().map_err(|e| CliError::config(format!("csv: {e}")))
}

fn opt_date(d: Option<NaiveDate>) -> String {
    d.map(|d| d.format(DEFAULT_DATE_FORMAT).to_string()).unwrap_or_default()
}

fn episodes_csv(episodes: &[BubbleEpisode]) -> Result<Vec<u8>, CliError> {
    csv_bytes(|w| {
        w.write_record([
            "origin_index",
            "origin_date",
            "peak_index",
            "peak_date",
            "end_index",
            "end_date",
            "peak_stat",
            "duration",
            "ongoing",
        ])?;
        for e in episodes {
            w.write_record([
                e.origin_index.to_string(),
                opt_date(e.origin_date),
                e.peak_index.to_string(),
                opt_date(e.peak_date),
                e.end_index.map(|i| i.to_string()).unwrap_or_default(),
                opt_date(e.end_date),
                e.peak_stat.to_string(),
                e.duration.to_string(),
                e.is_ongoing().to_string(),
            ])?;
        }
        Ok(())
    })
}

/// `date, bsadf_stat, cv, value` per stamped observation.
fn plot_csv(raw: &TimeSeries, stats: &bubbletest::StatSequence, cvs: &CvSequence) -> Result<Vec<u8>, CliError> {
    csv_bytes(|w| {
        w.write_record(["date", "bsadf_stat", "cv", "value"])?;
        for ((&i, s), c) in stats.end_indices.iter().zip(&stats.stats).zip(&cvs.values) {
            w.write_record([
                raw.dates()[i].format(DEFAULT_DATE_FORMAT).to_string(),
                s.map(|v| v.to_string()).unwrap_or_default(),
                c.to_string(),
                raw.values()[i].to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn run_cv(args: &CvArgs) -> Result<(), CliError> {
    let started = Utc::now();
    let cfg = args.config.test_config();
    let null = args.mc.null_spec()?;
    check_replications(&args.mc)?;
    let (reps, seed, t) = (args.mc.replications, args.mc.seed, args.t);

    let kind = match args.test {
        CvTest::Adf => Some(TestKind::Adf),
        CvTest::Radf => Some(TestKind::Radf),
        CvTest::Sadf => Some(TestKind::Sadf),
        CvTest::Gsadf => Some(TestKind::Gsadf),
        CvTest::Bsadf => None,
    };
    let doc = match kind {
        Some(kind) => {
            let levels = match &args.levels {
                Some(text) => parse_levels(text)?,
                None => LEVELS.to_vec(),
            };
            CacheDocument::CriticalValues(critical_values_at(kind, &levels, t, &cfg, &null, reps, seed)?)
        }
        None => {
            let levels = parse_levels(args.levels.as_deref().unwrap_or("95"))?;
            let [level] = levels[..] else {
                return Err(CliError::config("--test bsadf takes exactly one level"));
            };
            CacheDocument::CvSequence(bsadf_cv_sequence(level, t, &cfg, &null, reps, seed)?)
        }
    };

    let test_name = format!("{:?}", args.test).to_lowercase();
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("cv-{test_name}-T{t}.json")));
    let mut staged = Staged::default();
    staged.add(&out, doc.to_json()?);
    staged.add_run_log(&out, started)?;
    staged.commit()?;

    match &doc {
        CacheDocument::CriticalValues(cv) => {
            say!("{:<8}{:>10}", "level", test_name.to_uppercase());
            for (k, v) in &cv.quantiles {
                say!("{:<8}{:>10.4}", k, v);
            }
        }
        CacheDocument::CvSequence(seq) => {
            let (lo, hi) = seq
                .values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            say!(
                "BSADF {} critical values for {} end points: min {:.4}, max {:.4}",
                level_key(seq.level),
                seq.values.len(),
                lo,
                hi
            );
        }
    }
    say!("T = {t}, replications = {reps}, seed = {seed}, digest = {}", doc.config_digest());
    Ok(())
}

pub fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let started = Utc::now();
    let (series, spec, mask, collapses) = match args.generator {
        Generator::Rw => {
            let null = NullSpec {
                drift_scale: args.drift_scale,
                drift_exponent: args.drift_exponent,
                innovation_sd: args.sigma,
            };
            let s = gen_random_walk(args.t, &null, args.seed)?;
            let mask = vec![false; s.len()];
            (s, serde_json::to_value(null)?, mask, None)
        }
        Generator::Ar1 => {
            let spec = Ar1Spec {
                t: args.t,
                rho: args.rho,
                sigma: args.sigma,
                regime_start: args.regime_start.unwrap_or(3 * args.t / 4),
                y0: args.y0,
            };
            let s = gen_explosive_ar1(&spec, args.seed)?;
            let mask = (0..s.len()).map(|i| i >= spec.regime_start).collect();
            (s, serde_json::to_value(spec)?, mask, None)
        }
        Generator::Evans => {
            let spec = EvansSpec {
                r: args.r,
                b_threshold: args.b_threshold,
                delta: args.delta,
                pi: args.pi,
                tau: args.tau,
                b0: args.b0.unwrap_or(args.delta),
                t: args.t,
            };
            let sample = gen_evans_bubble(&spec, args.seed)?;
            let fundamental = args.fundamental;
            if !fundamental.is_finite() {
                return Err(CliError::config("--fundamental must be finite"));
            }
            let price = sample.series.map_values(|b| fundamental + b)?;
            let mut value = serde_json::to_value(spec)?;
            value["fundamental"] = json!(fundamental);
            (price, value, sample.regime_mask, Some(sample.collapses))
        }
    };

    let mut csv = Vec::new();
    series.write_csv(&mut csv)?;
    let sidecar = args.out.with_extension("json");
    let meta = json!({
        "manifest": RunManifest::new(),
        "generator": format!("{:?}", args.generator).to_lowercase(),
        "seed": args.seed,
        "spec": spec,
        "regime_mask": mask,
        "collapses": collapses,
    });
    let mut staged = Staged::default();
    staged.add(&args.out, csv);
    staged.add_json(&sidecar, &meta)?;
    staged.add_run_log(&args.out, started)?;
    staged.commit()?;
    say!("wrote {} observations to {} (sidecar {})", series.len(), args.out.display(), sidecar.display());
    Ok(())
}
