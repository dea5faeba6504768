//! Experiment-log statistics: Student-t confidence intervals and video
//! rebuffer ratio.
//!
//! Two CSV schemas are accepted, told apart by their header:
//!
//! * `timestamp,value`: one numeric sample per row (a [`SampleSeries`]).
//! * `event,start,duration[,value]`: a [`VideoSession`]. `event` is
//!   `session` (exactly one row; its duration is the session length),
//!   `stall` (a playback stall) or `segment` (a downloaded segment whose
//!   `value` is its bitrate in Mbps). Times are seconds.

use std::io::Write;
use std::path::Path;

use log::warn;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    label: String,
    samples: Vec<f64>,
    run_count: u32,
}

impl SampleSeries {
    pub fn new(label: impl Into<String>, samples: Vec<f64>, run_count: u32) -> Result<Self> {
        let label = label.into();
        if run_count == 0 {
            return Err(Error::Config(format!("series `{label}`: run_count must be >= 1")));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("series `{label}`: sample {i} is not finite")));
        }
        Ok(Self {
            label,
            samples,
            run_count,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn run_count(&self) -> u32 {
        self.run_count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub n: usize,
    /// Set when the interval is degenerate.
    pub warning: Option<String>,
}

impl ConfidenceInterval {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

/// `mean ± t_{n-1,(1+level)/2} · s / √n` with the sample standard deviation.
/// A single sample gives `[mean, mean]` and a warning.
pub fn mean_ci(series: &SampleSeries, level: f64) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("confidence level must be in (0, 1), got {level}")));
    }
    let x = series.samples();
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptySeries(series.label().to_owned()));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    if n == 1 {
        let msg = format!("series `{}` has one sample; interval is degenerate", series.label());
        warn!("{msg}");
        return Ok(ConfidenceInterval {
            mean,
            lo: mean,
            hi: mean,
            level,
            n,
            warning: Some(msg),
        });
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("degrees of freedom >= 1")
        .inverse_cdf(0.5 + level / 2.0);
    let half = t * var.sqrt() / (n as f64).sqrt();
    Ok(ConfidenceInterval {
        mean,
        lo: mean - half,
        hi: mean + half,
        level,
        n,
        warning: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoSession {
    total_duration: f64,
    stall_durations: Vec<f64>,
    bitrate_samples: Vec<f64>,
}

impl VideoSession {
    /// Stalls must be non-negative and sum to at most the session length.
    pub fn new(total_duration: f64, stall_durations: Vec<f64>, bitrate_samples: Vec<f64>) -> Result<Self> {
        if !(total_duration.is_finite() && total_duration >= 0.0) {
            return Err(Error::Config(format!("session duration must be >= 0, got {total_duration}")));
        }
        if let Some(s) = stall_durations.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Config(format!("stall duration must be >= 0, got {s}")));
        }
        let stalled: f64 = stall_durations.iter().sum();
        if stalled > total_duration * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "stalls total {stalled} s exceed session duration {total_duration} s"
            )));
        }
        Ok(Self {
            total_duration,
            stall_durations,
            bitrate_samples,
        })
    }

    pub fn total_duration(&self) -> f64 {
        self.total_duration
    }

    pub fn stall_durations(&self) -> &[f64] {
        &self.stall_durations
    }

    pub fn bitrate_samples(&self) -> &[f64] {
        &self.bitrate_samples
    }
}

/// Fraction of the session spent stalled.
pub fn rebuffer_ratio(session: &VideoSession) -> Result<f64> {
    if session.total_duration <= 0.0 {
        return Err(Error::Config("rebuffer ratio of a zero-length session".into()));
    }
    Ok((session.stall_durations.iter().sum::<f64>() / session.total_duration).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ingested {
    Series(SampleSeries),
    Session(VideoSession),
}

pub fn ingest_csv(path: &Path) -> Result<Ingested> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path.file_stem().map_or_else(|| "series".into(), |s| s.to_string_lossy().into_owned());
    parse_csv(&text, &label, path)
}

/// Parses CSV text; `path` is only used in error messages.
pub fn parse_csv(text: &str, label: &str, path: &Path) -> Result<Ingested> {
    let schema_err = |row: usize, msg: String| Error::Schema {
        path: path.to_path_buf(),
        row,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| schema_err(1, e.to_string()))?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = rdr.records().map(|r| {
        let r = r.map_err(|e| schema_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = r.position().map_or(0, |p| p.line() as usize);
        Ok((line, r))
    });

    let num = |line: usize, field: Option<&str>, name: &str| -> Result<f64> {
        let f = field.ok_or_else(|| schema_err(line, format!("missing `{name}`")))?;
        let v: f64 = f.parse().map_err(|_| schema_err(line, format!("`{name}` is not a number: `{f}`")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(schema_err(line, format!("`{name}` is not finite")))
        }
    };

    match header.as_slice() {
        ["timestamp", "value"] => {
            let mut samples = Vec::new();
            for row in rows {
                let (line, r) = row?;
                num(line, r.get(0), "timestamp")?;
                samples.push(num(line, r.get(1), "value")?);
            }
            if samples.is_empty() {
                return Err(Error::EmptySeries(label.to_owned()));
            }
            Ok(Ingested::Series(SampleSeries::new(label, samples, 1)?))
        }
        ["event", "start", "duration"] | ["event", "start", "duration", "value"] => {
            let mut total = None;
            let mut stalls = Vec::new();
            let mut bitrates = Vec::new();
            let mut stalled = 0.0;
            for row in rows {
                let (line, r) = row?;
                let start = num(line, r.get(1), "start")?;
                let duration = num(line, r.get(2), "duration")?;
                if start < 0.0 || duration < 0.0 {
                    return Err(schema_err(line, "start and duration must be >= 0".into()));
                }
                match r.get(0).unwrap_or("") {
                    "session" if total.is_some() => return Err(schema_err(line, "second `session` row".into())),
                    "session" => total = Some(duration),
                    "stall" => {
                        stalled += duration;
                        stalls.push(duration);
                        if let Some(t) = total {
                            if stalled > t {
                                return Err(schema_err(line, format!("stalls total {stalled} s exceed session {t} s")));
                            }
                        }
                    }
                    "segment" => bitrates.push(num(line, r.get(3), "value")?),
                    other => return Err(schema_err(line, format!("unknown event `{other}`"))),
                }
            }
            let total = total.ok_or_else(|| schema_err(0, "no `session` row".into()))?;
            Ok(Ingested::Session(VideoSession::new(total, stalls, bitrates)?))
        }
        _ => Err(schema_err(
            1,
            format!("header `{}` is neither `timestamp,value` nor `event,start,duration[,value]`", header.join(",")),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub label: String,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl StatsRow {
    pub fn from_ci(label: impl Into<String>, ci: &ConfidenceInterval) -> Self {
        Self {
            label: label.into(),
            mean: ci.mean,
            ci_lo: ci.lo,
            ci_hi: ci.hi,
        }
    }
}

/// Summary row for an ingested file: the 95 % interval of a sample series, or
/// the rebuffer ratio of a session (reported as a degenerate interval).
pub fn summarize(label: &str, data: &Ingested) -> Result<StatsRow> {
    match data {
        Ingested::Series(s) => Ok(StatsRow::from_ci(label, &mean_ci(s, 0.95)?)),
        Ingested::Session(v) => {
            let r = rebuffer_ratio(v)?;
            Ok(StatsRow {
                label: format!("{label}:rebuffer_ratio"),
                mean: r,
                ci_lo: r,
                ci_hi: r,
            })
        }
    }
}

pub fn write_stats_csv<W: Write>(rows: &[StatsRow], mut w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(&mut w);
    out.write_record(["label", "mean", "ci_lo", "ci_hi"])?;
    for r in rows {
        out.write_record([r.label.clone(), r.mean.to_string(), r.ci_lo.to_string(), r.ci_hi.to_string()])?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(v: &[f64]) -> SampleSeries {
        SampleSeries::new("s", v.to_vec(), 1).unwrap()
    }

    #[test]
    fn constant_series_has_zero_width() {
        let ci = mean_ci(&series(&[5.0; 5]), 0.95).unwrap();
        assert_eq!((ci.mean, ci.lo, ci.hi), (5.0, 5.0, 5.0));
    }

    #[test]
    fn t_interval_oracle() {
        let ci = mean_ci(&series(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0.95).unwrap();
        assert_eq!(ci.mean, 3.0);
        assert!((ci.half_width() - 1.963_243_161_477_560_7).abs() < 1e-9);
        assert!((ci.lo - 1.036_756_838_522_439_3).abs() < 1e-9);
        assert!((ci.hi - 4.963_243_161_477_560_5).abs() < 1e-9);
        assert!(ci.warning.is_none());
    }

    #[test]
    fn single_sample_is_degenerate() {
        let ci = mean_ci(&series(&[7.0]), 0.95).unwrap();
        assert_eq!((ci.lo, ci.hi), (7.0, 7.0));
        assert!(ci.warning.is_some());
        assert!(matches!(mean_ci(&series(&[]), 0.95), Err(Error::EmptySeries(_))));
        assert!(mean_ci(&series(&[1.0, 2.0]), 1.0).is_err());
        assert!(SampleSeries::new("x", vec![f64::NAN], 1).is_err());
        assert!(SampleSeries::new("x", vec![1.0], 0).is_err());
    }

    #[test]
    fn rebuffer_cases() {
        assert_eq!(rebuffer_ratio(&VideoSession::new(60.0, vec![], vec![]).unwrap()).unwrap(), 0.0);
        assert_eq!(rebuffer_ratio(&VideoSession::new(180.0, vec![27.0], vec![]).unwrap()).unwrap(), 0.15);
        assert_eq!(rebuffer_ratio(&VideoSession::new(30.0, vec![10.0, 20.0], vec![]).unwrap()).unwrap(), 1.0);
        assert!(rebuffer_ratio(&VideoSession::new(0.0, vec![], vec![]).unwrap()).is_err());
        assert!(VideoSession::new(10.0, vec![-1.0], vec![]).is_err());
        assert!(VideoSession::new(10.0, vec![6.0, 6.0], vec![]).is_err());
    }

    #[test]
    fn ingest_series() {
        let p = Path::new("tput.csv");
        match parse_csv("timestamp,value\n0,10.5\n1,11.5\n", "tput", p).unwrap() {
            Ingested::Series(s) => assert_eq!(s.samples(), &[10.5, 11.5]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_csv("timestamp,value\n", "tput", p), Err(Error::EmptySeries(_))));
        match parse_csv("timestamp,value\n0,1\n1,abc\n", "tput", p) {
            Err(Error::Schema { row: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_csv("a,b\n1,2\n", "x", p), Err(Error::Schema { row: 1, .. })));
    }

    #[test]
    fn ingest_session() {
        let p = Path::new("video.csv");
        let text = "event,start,duration,value\nsession,0,180,\nsegment,0,4,12.5\nstall,10,20,\nstall,50,7,\n";
        match parse_csv(text, "video", p).unwrap() {
            Ingested::Session(v) => {
                assert_eq!(v.stall_durations(), &[20.0, 7.0]);
                assert_eq!(v.bitrate_samples(), &[12.5]);
                assert_eq!(rebuffer_ratio(&v).unwrap(), 0.15);
            }
            other => panic!("{other:?}"),
        }
        let bad = "event,start,duration\nsession,0,100\nstall,3,-2\n";
        match parse_csv(bad, "video", p) {
            Err(Error::Schema { row: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_csv("event,start,duration\nstall,0,1\n", "video", p).is_err());
    }

    #[test]
    fn stats_csv() {
        let rows = [StatsRow { label: "ue1".into(), mean: 3.0, ci_lo: 1.5, ci_hi: 4.5 }];
        let mut buf = Vec::new();
        write_stats_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "label,mean,ci_lo,ci_hi\nue1,3,1.5,4.5\n");
    }

    #[test]
    fn width_scales_with_inverse_sqrt_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut mean_width = |n: usize| {
            let reps = 400;
            (0..reps)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 10.0).collect();
                    mean_ci(&series(&v), 0.95).unwrap().half_width()
                })
                .sum::<f64>()
                / reps as f64
        };
        let (w100, w400) = (mean_width(100), mean_width(400));
        let t100 = StudentsT::new(0.0, 1.0, 99.0).unwrap().inverse_cdf(0.975);
        let t400 = StudentsT::new(0.0, 1.0, 399.0).unwrap().inverse_cdf(0.975);
        let expected = 2.0 * t100 / t400;
        assert!(((w100 / w400) - expected).abs() / expected < 0.03, "{}", w100 / w400);
    }

    proptest! {
        #[test]
        fn interval_symmetric(v in proptest::collection::vec(-1e3f64..1e3, 2..40)) {
            let ci = mean_ci(&series(&v), 0.95).unwrap();
            prop_assert!(((ci.hi - ci.mean) - (ci.mean - ci.lo)).abs() <= 1e-9 * (1.0 + ci.mean.abs()));
            prop_assert!(ci.lo <= ci.mean && ci.mean <= ci.hi);
        }

        #[test]
        fn stall_split_invariance(total in 1.0f64..1e4, frac in 0.0f64..1.0, split in 0.0f64..1.0) {
            let stall = total * frac;
            let one = VideoSession::new(total, vec![stall], vec![]).unwrap();
            let two = VideoSession::new(total, vec![stall * split, stall - stall * split], vec![]).unwrap();
            let (a, b) = (rebuffer_ratio(&one).unwrap(), rebuffer_ratio(&two).unwrap());
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
