//! Post-hoc analysis of generated captions and a frequency-baseline
//! captioner.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::CaptionLine;
use crate::metrics::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenreRecord {
    pub image_id: String,
    pub genre: String,
    pub caption: String,
}

/// What counts as one phrase in a distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PhraseUnit {
    WholeCaption,
    #[default]
    Segment,
}

fn phrases(caption: &str, unit: PhraseUnit) -> Vec<&str> {
    match unit {
        PhraseUnit::WholeCaption => {
            let t = caption.trim();
            if t.is_empty() {
                vec![]
            } else {
                vec![t]
            }
        }
        PhraseUnit::Segment => caption
            .split(',')
            .map(|s| s.trim().trim_end_matches('.').trim_end())
            .filter(|s| !s.is_empty())
            .collect(),
    }
}

/// Phrase × genre counts. Rows are phrases in rank order (most frequent
/// first, ties lexicographic), columns are genres sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenreDistribution {
    pub genres: Vec<String>,
    pub phrases: Vec<String>,
    /// `counts[phrase][genre]`
    pub counts: Vec<Vec<u64>>,
}

impl GenreDistribution {
    pub fn count(&self, phrase: &str, genre: &str) -> u64 {
        let row = self.phrases.iter().position(|p| p == phrase);
        let col = self.genres.iter().position(|g| g == genre);
        match (row, col) {
            (Some(r), Some(c)) => self.counts[r][c],
            _ => 0,
        }
    }

    /// Header `phrase,<genre>...`, then one row per phrase.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["phrase".to_string()];
        header.extend(self.genres.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (phrase, row) in self.phrases.iter().zip(&self.counts) {
            let mut record = vec![phrase.clone()];
            record.extend(row.iter().map(u64::to_string));
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Cross-tabulates the `k` most frequent phrases against genres. `k = None`
/// keeps every phrase.
pub fn genre_distribution(
    records: &[GenreRecord],
    k: Option<usize>,
    unit: PhraseUnit,
) -> Result<GenreDistribution> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no genre records"));
    }
    if k == Some(0) {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let genres: BTreeSet<&str> = records.iter().map(|r| r.genre.as_str()).collect();
    if genres.contains("") {
        return Err(Error::schema("genres", "empty genre label"));
    }
    let genres: Vec<&str> = genres.into_iter().collect();
    let genre_index: HashMap<&str, usize> =
        genres.iter().enumerate().map(|(i, g)| (*g, i)).collect();

    let mut table: HashMap<&str, Vec<u64>> = HashMap::new();
    for r in records {
        for phrase in phrases(&r.caption, unit) {
            table.entry(phrase).or_insert_with(|| vec![0; genres.len()])
                [genre_index[r.genre.as_str()]] += 1;
        }
    }
    let mut ranked: Vec<(&str, Vec<u64>)> = table.into_iter().collect();
    ranked.sort_by(|(pa, ca), (pb, cb)| {
        let (ta, tb): (u64, u64) = (ca.iter().sum(), cb.iter().sum());
        tb.cmp(&ta).then_with(|| pa.cmp(pb))
    });
    if let Some(k) = k {
        ranked.truncate(k);
    }
    Ok(GenreDistribution {
        genres: genres.into_iter().map(String::from).collect(),
        phrases: ranked.iter().map(|(p, _)| p.to_string()).collect(),
        counts: ranked.into_iter().map(|(_, c)| c).collect(),
    })
}

/// Reads an `image_id,genre` CSV (header row required).
pub fn load_genres(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let (Some(id), Some(genre)) = (row.get(0), row.get(1)) else {
            return Err(Error::schema(
                format!("{}:{}", path.display(), i + 2),
                "expected image_id,genre",
            ));
        };
        out.push((id.trim().to_string(), genre.trim().to_string()));
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::schema(path.display().to_string(), e.to_string())
    }
}

/// Inner join of genre labels with captions on image id, sorted by id.
pub fn join_genres(genres: &[(String, String)], captions: &[CaptionLine]) -> Vec<GenreRecord> {
    let by_id: HashMap<&str, &str> = captions
        .iter()
        .map(|c| (c.image_id.as_str(), c.caption.as_str()))
        .collect();
    let mut out: Vec<GenreRecord> = genres
        .iter()
        .filter_map(|(id, genre)| {
            by_id.get(id.as_str()).map(|caption| GenreRecord {
                image_id: id.clone(),
                genre: genre.clone(),
                caption: caption.to_string(),
            })
        })
        .collect();
    out.sort_by(|a, b| (&a.image_id, &a.genre).cmp(&(&b.image_id, &b.genre)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBucket {
    /// Inclusive lower bound in tokens.
    pub from: usize,
    /// Exclusive upper bound.
    pub to: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub min: usize,
    pub max: usize,
    pub histogram: Vec<HistogramBucket>,
}

pub const HISTOGRAM_BUCKET_WIDTH: usize = 5;

/// Token-length statistics ([`tokenize`] tokens, punctuation included).
/// An empty input gives an all-zero report.
pub fn length_stats<S: AsRef<str>>(captions: &[S]) -> LengthStats {
    let mut lengths: Vec<usize> = captions
        .iter()
        .map(|c| tokenize(c.as_ref()).len())
        .collect();
    if lengths.is_empty() {
        return LengthStats::default();
    }
    lengths.sort_unstable();
    let n = lengths.len();
    let median = if n % 2 == 1 {
        lengths[n / 2] as f64
    } else {
        (lengths[n / 2 - 1] + lengths[n / 2]) as f64 / 2.0
    };
    let max = lengths[n - 1];
    let mut histogram: Vec<HistogramBucket> = (0..=max / HISTOGRAM_BUCKET_WIDTH)
        .map(|b| HistogramBucket {
            from: b * HISTOGRAM_BUCKET_WIDTH,
            to: (b + 1) * HISTOGRAM_BUCKET_WIDTH,
            count: 0,
        })
        .collect();
    for &len in &lengths {
        histogram[len / HISTOGRAM_BUCKET_WIDTH].count += 1;
    }
    LengthStats {
        count: n,
        mean: lengths.iter().sum::<usize>() as f64 / n as f64,
        median,
        min: lengths[0],
        max,
        histogram,
    }
}

/// Gives every test id the most frequent training caption (lexicographically
/// smallest on ties).
pub fn frequency_baseline<S: AsRef<str>>(
    train_captions: &[S],
    test_ids: &[String],
) -> Result<Vec<CaptionLine>> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in train_captions {
        *counts.entry(c.as_ref()).or_insert(0) += 1;
    }
    // BTreeMap iterates in ascending order, so the first maximum wins ties.
    let mode = counts
        .iter()
        .fold(None::<(&str, usize)>, |best, (&c, &n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((c, n)),
        })
        .map(|(c, _)| c)
        .ok_or(Error::EmptyInput("no training captions"))?;
    Ok(test_ids
        .iter()
        .map(|id| CaptionLine {
            image_id: id.clone(),
            caption: mode.to_string(),
        })
        .collect())
}
