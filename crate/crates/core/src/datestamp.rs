//! Bubble episodes from a statistic sequence and its critical-value sequence.
//!
//! An episode starts at the first index where the statistic is at or above
//! its critical value. It ends at the first later index where the statistic
//! falls below again; that index is the episode's `end_index`. The peak is
//! the highest statistic inside the run, taking the earliest on ties. A run
//! still above at the last observation has no end.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::CvSequence;
use crate::recursive::StatSequence;
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleEpisode {
    pub origin_index: usize,
    pub peak_index: usize,
    /// First index back below the critical value; `None` while ongoing.
    pub end_index: Option<usize>,
    pub origin_date: Option<NaiveDate>,
    pub peak_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
    pub peak_stat: f64,
    /// Observations in the episode (ongoing ones counted to sample end).
    pub duration: usize,
}

impl BubbleEpisode {
    pub fn is_ongoing(&self) -> bool {
        self.end_index.is_none()
    }

    /// Half-open index range `[origin, origin + duration)`.
    pub fn range(&self) -> std::ops::Range<usize> {
        self.origin_index..self.origin_index + self.duration
    }
}

/// `max(1, floor(ln T))`
pub fn default_min_duration(t: usize) -> usize {
    ((t as f64).ln().floor() as usize).max(1)
}

/// Stamps episodes where `stats >= cvs`, keeping runs of at least
/// `min_duration` observations.
pub fn stamp_episodes(stats: &StatSequence, cvs: &CvSequence, min_duration: usize) -> Result<Vec<BubbleEpisode>> {
    if stats.end_indices != cvs.end_indices || stats.stats.len() != cvs.values.len() {
        return Err(Error::Misaligned);
    }
    stamp_against(&stats.end_indices, &stats.stats, &cvs.values, min_duration)
}

/// Index-level stamping on raw slices. `end_indices` must be consecutive.
pub fn stamp_against(
    end_indices: &[usize],
    stats: &[Option<f64>],
    cvs: &[f64],
    min_duration: usize,
) -> Result<Vec<BubbleEpisode>> {
    if min_duration < 1 {
        return Err(Error::config("minimum duration must be at least 1"));
    }
    if stats.len() != end_indices.len() || cvs.len() != end_indices.len() {
        return Err(Error::Misaligned);
    }
    if end_indices.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::Misaligned);
    }
    let above = |j: usize| matches!(stats[j], Some(s) if s >= cvs[j]);

    let mut episodes = Vec::new();
    let mut j = 0;
    while j < stats.len() {
        if !above(j) {
            j += 1;
            continue;
        }
        let start = j;
        let mut peak = j;
        while j < stats.len() && above(j) {
            if stats[j] > stats[peak] {
                peak = j;
            }
            j += 1;
        }
        let duration = j - start;
        if duration >= min_duration {
            episodes.push(BubbleEpisode {
                origin_index: end_indices[start],
                peak_index: end_indices[peak],
                end_index: end_indices.get(j).copied(),
                origin_date: None,
                peak_date: None,
                end_date: None,
                peak_stat: stats[peak].expect("peak lies inside a run"),
                duration,
            });
        }
    }
    Ok(episodes)
}

/// Fills the calendar dates of each episode from the tested series.
pub fn attach_dates(episodes: &mut [BubbleEpisode], series: &TimeSeries) {
    let date = |i: usize| series.dates().get(i).copied();
    for e in episodes {
        e.origin_date = date(e.origin_index);
        e.peak_date = date(e.peak_index);
        e.end_date = e.end_index.and_then(date);
    }
}

/// In-episode indicator for each entry of `end_indices`.
pub fn episode_mask(episodes: &[BubbleEpisode], end_indices: &[usize]) -> Vec<bool> {
    end_indices
        .iter()
        .map(|i| episodes.iter().any(|e| e.range().contains(i)))
        .collect()
}

/// The episode with the highest peak statistic.
pub fn global_peak(episodes: &[BubbleEpisode]) -> Option<&BubbleEpisode> {
    episodes
        .iter()
        .reduce(|best, e| if e.peak_stat > best.peak_stat { e } else { best })
}

/// Fraction of the `t_effective` stamped observations that lie inside an episode.
pub fn episode_coverage(episodes: &[BubbleEpisode], t_effective: usize) -> Result<f64> {
    if t_effective == 0 {
        return Err(Error::config("effective sample must be non-empty"));
    }
    if episodes
        .windows(2)
        .any(|w| w[1].origin_index < w[0].range().end)
    {
        return Err(Error::OverlappingEpisodes);
    }
    let covered: usize = episodes.iter().map(|e| e.duration).sum();
    if covered > t_effective {
        return Err(Error::OverlappingEpisodes);
    }
    Ok(covered as f64 / t_effective as f64)
}
