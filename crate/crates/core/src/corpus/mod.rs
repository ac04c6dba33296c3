//! Corpus ingestion, region/period sharding, and descriptive statistics.
//!
//! Raw documents arrive as line-delimited JSON records (`id`,
//! `decision_date`, `jurisdiction`, `text`). Ingestion preprocesses each
//! document, assigns it to the (region, period) shard derived from its
//! jurisdiction and decision year, and reports per-category skip counts so
//! that `assigned + skipped == records read` always holds.

mod preprocess;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

pub use preprocess::{
    default_lemma_exceptions, default_stopwords, lemmatize, parse_lemma_exceptions,
    parse_word_list, preprocess, tokenize, PreprocessConfig, LEMMA_EXCEPTIONS, STOPWORDS_EN,
};

/// Canonical region labels, in reporting column order.
pub const REGIONS: [&str; 5] = ["Northeast", "South", "Midwest", "West", "Federal"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid region map: {0}")]
    InvalidRegionMap(String),
    #[error("invalid period scheme: {0}")]
    InvalidScheme(String),
}

fn io_err(path: &Path, source: io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

// ---------------------------------------------------------------------------
// Documents and shards

/// One preprocessed document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
}

/// A named bag of preprocessed documents, e.g. one (region, period) cell.
///
/// Ingested shards are named `<region>_<period>`; synthetic shards carry
/// free-form names without an underscore.
#[derive(Debug, Clone, Default)]
pub struct CorpusShard {
    pub name: String,
    pub documents: Vec<Document>,
}

impl CorpusShard {
    pub fn new(name: impl Into<String>) -> Self {
        CorpusShard {
            name: name.into(),
            documents: Vec::new(),
        }
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Size of the shard as rendered to disk: tokens joined by single
    /// spaces, one newline per document.
    pub fn byte_size(&self) -> u64 {
        self.documents.iter().map(document_byte_size).sum()
    }

    /// Split an ingested shard name back into (region, period).
    pub fn region_period(&self) -> Option<(&str, &str)> {
        self.name.split_once('_')
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for doc in &self.documents {
            let mut first = true;
            for tok in &doc.tokens {
                if !first {
                    w.write_all(b" ")?;
                }
                w.write_all(tok.as_bytes())?;
                first = false;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Write `<dir>/<name>.txt` and return the path.
    pub fn save(&self, dir: &Path) -> Result<PathBuf, CorpusError> {
        let path = dir.join(format!("{}.txt", self.name));
        let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut w = io::BufWriter::new(file);
        self.write_to(&mut w).map_err(|e| io_err(&path, e))?;
        w.flush().map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    /// Load a shard file; the name is taken from the file stem and document
    /// ids are regenerated from line numbers.
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("shard")
            .to_string();
        let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
        let mut shard = CorpusShard::new(name);
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io_err(path, e))?;
            shard.documents.push(Document {
                id: format!("line{i:07}"),
                tokens: line.split_whitespace().map(str::to_string).collect(),
            });
        }
        Ok(shard)
    }
}

pub(crate) fn document_byte_size(doc: &Document) -> u64 {
    let token_bytes: usize = doc.tokens.iter().map(|t| t.len()).sum();
    let separators = doc.tokens.len().saturating_sub(1);
    (token_bytes + separators + 1) as u64
}

/// Load every `*.txt` shard in a directory, sorted by file name.
pub fn load_shard_dir(dir: &Path) -> Result<Vec<CorpusShard>, CorpusError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    paths.iter().map(|p| CorpusShard::load(p)).collect()
}

// ---------------------------------------------------------------------------
// Region map

/// Jurisdiction code -> census region label. Codes are two-letter state
/// postal abbreviations plus `US` for the federal courts.
#[derive(Debug, Clone)]
pub struct RegionMap {
    map: BTreeMap<String, String>,
}

impl RegionMap {
    /// US Census Bureau regions for the 50 states plus DC, with federal
    /// cases (`US`) as their own region.
    pub fn census_default() -> Self {
        let mut map = BTreeMap::new();
        let groups: [(&str, &[&str]); 5] = [
            ("Northeast", &["CT", "ME", "MA", "NH", "RI", "VT", "NJ", "NY", "PA"]),
            (
                "South",
                &[
                    "DE", "FL", "GA", "MD", "NC", "SC", "VA", "DC", "WV", "AL", "KY", "MS", "TN",
                    "AR", "LA", "OK", "TX",
                ],
            ),
            (
                "Midwest",
                &["IL", "IN", "MI", "OH", "WI", "IA", "KS", "MN", "MO", "NE", "ND", "SD"],
            ),
            (
                "West",
                &["AZ", "CO", "ID", "MT", "NV", "NM", "UT", "WY", "AK", "CA", "HI", "OR", "WA"],
            ),
            ("Federal", &["US"]),
        ];
        for (region, codes) in groups {
            for code in codes {
                map.insert((*code).to_string(), region.to_string());
            }
        }
        RegionMap { map }
    }

    /// Parse `CODE REGION` lines (`#` comments allowed). The map must be
    /// total: all 50 state codes, DC, and US, each to a canonical region.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(code), Some(region), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(CorpusError::Parse {
                    line: i + 1,
                    message: format!("expected `CODE REGION`, got {line:?}"),
                });
            };
            if !REGIONS.contains(&region) {
                return Err(CorpusError::InvalidRegionMap(format!(
                    "unknown region label {region:?} (line {})",
                    i + 1
                )));
            }
            if map.insert(code.to_uppercase(), region.to_string()).is_some() {
                return Err(CorpusError::InvalidRegionMap(format!(
                    "jurisdiction {code:?} mapped twice"
                )));
            }
        }
        let parsed = RegionMap { map };
        for code in RegionMap::census_default().map.keys() {
            if !parsed.map.contains_key(code) {
                return Err(CorpusError::InvalidRegionMap(format!(
                    "map is not total: missing jurisdiction {code}"
                )));
            }
        }
        Ok(parsed)
    }

    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(&text)
    }

    pub fn region(&self, jurisdiction: &str) -> Option<&str> {
        self.map.get(&jurisdiction.to_uppercase()).map(String::as_str)
    }
}

// ---------------------------------------------------------------------------
// Period scheme

/// Ordered, contiguous, non-overlapping half-open year intervals.
#[derive(Debug, Clone)]
pub struct PeriodScheme {
    intervals: Vec<(i32, i32)>,
}

impl PeriodScheme {
    /// 30-year intervals covering 1860-2009.
    pub fn thirty_year_default() -> Self {
        PeriodScheme::new((0..5).map(|i| (1860 + 30 * i, 1890 + 30 * i)).collect())
            .expect("default scheme is valid")
    }

    pub fn new(intervals: Vec<(i32, i32)>) -> Result<Self, CorpusError> {
        if intervals.is_empty() {
            return Err(CorpusError::InvalidScheme("no intervals".into()));
        }
        for (start, end) in &intervals {
            if start >= end {
                return Err(CorpusError::InvalidScheme(format!(
                    "empty interval [{start}, {end})"
                )));
            }
        }
        for pair in intervals.windows(2) {
            if pair[0].1 != pair[1].0 {
                return Err(CorpusError::InvalidScheme(format!(
                    "intervals [{}, {}) and [{}, {}) are not contiguous ascending",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(PeriodScheme { intervals })
    }

    /// Parse `START END` lines, END exclusive.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut intervals = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let parsed = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => a.parse::<i32>().ok().zip(b.parse::<i32>().ok()),
                _ => None,
            };
            let Some(interval) = parsed else {
                return Err(CorpusError::Parse {
                    line: i + 1,
                    message: format!("expected `START END`, got {line:?}"),
                });
            };
            intervals.push(interval);
        }
        PeriodScheme::new(intervals)
    }

    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Inclusive-year label, e.g. `1860-1889` for [1860, 1890).
    pub fn label(&self, index: usize) -> String {
        let (start, end) = self.intervals[index];
        format!("{start}-{}", end - 1)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn find(&self, year: i32) -> Option<usize> {
        self.intervals
            .iter()
            .position(|(start, end)| (*start..*end).contains(&year))
    }
}

// ---------------------------------------------------------------------------
// Raw records and ingestion

/// Year bounds for a parseable decision date.
const YEAR_MIN: i32 = 1600;
const YEAR_MAX: i32 = 2100;

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<String>,
    decision_date: Option<String>,
    jurisdiction: Option<String>,
    text: Option<String>,
}

/// Parse `YYYY`, `YYYY-MM`, or `YYYY-MM-DD` and return the year.
fn parse_year(date: &str) -> Option<i32> {
    let mut parts = date.splitn(3, '-');
    let year: i32 = parts.next()?.parse().ok()?;
    for part in parts {
        let v: u8 = part.parse().ok()?;
        if !(1..=31).contains(&v) {
            return None;
        }
    }
    (YEAR_MIN..=YEAR_MAX).contains(&year).then_some(year)
}

/// Why a record was left out of every shard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    Malformed,
    MissingDate,
    UnknownJurisdiction,
    OutOfRange,
    DuplicateId,
}

/// Per-category skip counters; their sum plus the assigned documents equals
/// the number of records read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SkipCounts {
    pub malformed: usize,
    pub missing_date: usize,
    pub unknown_jurisdiction: usize,
    pub out_of_range: usize,
    pub duplicate_id: usize,
}

impl SkipCounts {
    pub fn total(&self) -> usize {
        self.malformed
            + self.missing_date
            + self.unknown_jurisdiction
            + self.out_of_range
            + self.duplicate_id
    }

    fn bump(&mut self, reason: SkipReason) {
        match reason {
            SkipReason::Malformed => self.malformed += 1,
            SkipReason::MissingDate => self.missing_date += 1,
            SkipReason::UnknownJurisdiction => self.unknown_jurisdiction += 1,
            SkipReason::OutOfRange => self.out_of_range += 1,
            SkipReason::DuplicateId => self.duplicate_id += 1,
        }
    }
}

/// Result of one ingestion run.
#[derive(Debug)]
pub struct IngestReport {
    /// Shards sorted by (region order, period label). Only populated cells
    /// are present.
    pub shards: Vec<CorpusShard>,
    pub records_read: usize,
    pub skipped: SkipCounts,
    /// One message per malformed / unknown-jurisdiction / duplicate record.
    pub diagnostics: Vec<String>,
}

enum Outcome {
    Assigned {
        region_idx: usize,
        period_idx: usize,
        doc: Document,
    },
    Skipped {
        reason: SkipReason,
        diagnostic: Option<String>,
    },
}

fn classify(
    line_no: usize,
    line: &str,
    regions: &RegionMap,
    periods: &PeriodScheme,
    cfg: &PreprocessConfig,
) -> Outcome {
    let skip = |reason, diagnostic| Outcome::Skipped { reason, diagnostic };
    let record: RawRecord = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => {
            return skip(
                SkipReason::Malformed,
                Some(format!("line {line_no}: invalid record: {e}")),
            )
        }
    };
    let Some(id) = record.id.filter(|id| !id.is_empty()) else {
        return skip(
            SkipReason::Malformed,
            Some(format!("line {line_no}: missing or empty id")),
        );
    };
    let Some(date) = record.decision_date.as_deref().map(str::trim).filter(|d| !d.is_empty())
    else {
        return skip(
            SkipReason::MissingDate,
            Some(format!("line {line_no}: record {id}: missing decision_date")),
        );
    };
    let Some(year) = parse_year(date) else {
        return skip(
            SkipReason::Malformed,
            Some(format!(
                "line {line_no}: record {id}: unparseable decision_date {date:?}"
            )),
        );
    };
    let Some(jurisdiction) = record.jurisdiction.as_deref().filter(|j| !j.is_empty()) else {
        return skip(
            SkipReason::Malformed,
            Some(format!("line {line_no}: record {id}: missing jurisdiction")),
        );
    };
    let Some(region) = regions.region(jurisdiction) else {
        return skip(
            SkipReason::UnknownJurisdiction,
            Some(format!(
                "line {line_no}: record {id}: unknown jurisdiction {jurisdiction:?}"
            )),
        );
    };
    let Some(period_idx) = periods.find(year) else {
        return skip(SkipReason::OutOfRange, None);
    };
    let region_idx = REGIONS
        .iter()
        .position(|r| *r == region)
        .expect("region maps validate their labels");
    let tokens = preprocess(record.text.as_deref().unwrap_or(""), cfg);
    Outcome::Assigned {
        region_idx,
        period_idx,
        doc: Document { id, tokens },
    }
}

/// Ingest line-delimited JSON records from a file or a directory of files.
///
/// Every in-range document lands in exactly one shard; skipped records are
/// counted by reason. Documents are preprocessed in parallel and each
/// shard's documents are sorted by id, so output is deterministic for any
/// thread count.
pub fn ingest(
    source: &Path,
    regions: &RegionMap,
    periods: &PeriodScheme,
    cfg: &PreprocessConfig,
) -> Result<IngestReport, CorpusError> {
    cfg.validate()?;
    let mut files: Vec<PathBuf> = if source.is_dir() {
        let entries = fs::read_dir(source).map_err(|e| io_err(source, e))?;
        entries
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect()
    } else {
        vec![source.to_path_buf()]
    };
    files.sort();

    let mut shards: BTreeMap<(usize, usize), CorpusShard> = BTreeMap::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut report = IngestReport {
        shards: Vec::new(),
        records_read: 0,
        skipped: SkipCounts::default(),
        diagnostics: Vec::new(),
    };

    for path in &files {
        let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
        let mut text = String::new();
        BufReader::new(file)
            .read_to_string(&mut text)
            .map_err(|e| io_err(path, e))?;
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        report.records_read += lines.len();

        let outcomes: Vec<Outcome> = lines
            .par_iter()
            .map(|(line_no, line)| classify(*line_no, line, regions, periods, cfg))
            .collect();

        for outcome in outcomes {
            match outcome {
                Outcome::Assigned {
                    region_idx,
                    period_idx,
                    doc,
                } => {
                    if !seen_ids.insert(doc.id.clone()) {
                        report.skipped.bump(SkipReason::DuplicateId);
                        report
                            .diagnostics
                            .push(format!("duplicate document id {:?} skipped", doc.id));
                        continue;
                    }
                    shards
                        .entry((region_idx, period_idx))
                        .or_insert_with(|| {
                            CorpusShard::new(format!(
                                "{}_{}",
                                REGIONS[region_idx],
                                periods.label(period_idx)
                            ))
                        })
                        .documents
                        .push(doc);
                }
                Outcome::Skipped { reason, diagnostic } => {
                    report.skipped.bump(reason);
                    if let Some(msg) = diagnostic {
                        report.diagnostics.push(msg);
                    }
                }
            }
        }
    }

    report.shards = shards
        .into_values()
        .map(|mut shard| {
            shard.documents.sort_by(|a, b| a.id.cmp(&b.id));
            shard
        })
        .collect();
    Ok(report)
}

// ---------------------------------------------------------------------------
// Descriptive statistics

/// Top-k terms by descending count, ties broken lexicographically.
pub fn term_frequencies(shard: &CorpusShard, k: usize) -> Vec<(String, u64)> {
    top_terms(shard.documents.iter(), k)
}

/// Top-k terms of several shards pooled together.
pub fn term_frequencies_pooled<'a>(
    shards: impl IntoIterator<Item = &'a CorpusShard>,
    k: usize,
) -> Vec<(String, u64)> {
    top_terms(shards.into_iter().flat_map(|s| s.documents.iter()), k)
}

fn top_terms<'a>(docs: impl Iterator<Item = &'a Document>, k: usize) -> Vec<(String, u64)> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in docs {
        for tok in &doc.tokens {
            *counts.entry(tok.as_str()).or_insert(0) += 1;
        }
    }
    let mut pairs: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    pairs.truncate(k);
    pairs
}

/// One row of the shard-statistics table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardStats {
    pub region: String,
    pub period: String,
    pub documents: usize,
    pub tokens: usize,
}

/// One row per shard, ordered by (region order, period label). Shards
/// without a `<region>_<period>` name report their full name as the region
/// and an empty period.
pub fn shard_stats(shards: &[CorpusShard]) -> Vec<ShardStats> {
    let mut rows: Vec<ShardStats> = shards
        .iter()
        .map(|s| {
            let (region, period) = s
                .region_period()
                .map(|(r, p)| (r.to_string(), p.to_string()))
                .unwrap_or_else(|| (s.name.clone(), String::new()));
            ShardStats {
                region,
                period,
                documents: s.document_count(),
                tokens: s.token_count(),
            }
        })
        .collect();
    let region_rank =
        |r: &str| REGIONS.iter().position(|c| *c == r).unwrap_or(REGIONS.len());
    rows.sort_by(|a, b| {
        region_rank(&a.region)
            .cmp(&region_rank(&b.region))
            .then_with(|| a.region.cmp(&b.region))
            .then_with(|| a.period.cmp(&b.period))
    });
    rows
}

/// Render the pinned long-form statistics CSV.
pub fn stats_csv(rows: &[ShardStats]) -> String {
    let mut out = String::from("region,period,documents,tokens\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.region, row.period, row.documents, row.tokens
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_records(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        f
    }

    fn record(id: &str, date: &str, jur: &str, text: &str) -> String {
        format!(
            r#"{{"id":"{id}","decision_date":"{date}","jurisdiction":"{jur}","text":"{text}"}}"#
        )
    }

    #[test]
    fn census_default_is_total_and_canonical() {
        let map = RegionMap::census_default();
        assert_eq!(map.region("NY"), Some("Northeast"));
        assert_eq!(map.region("ny"), Some("Northeast"));
        assert_eq!(map.region("TX"), Some("South"));
        assert_eq!(map.region("US"), Some("Federal"));
        assert_eq!(map.region("PR"), None);
        assert_eq!(map.map.len(), 52); // 50 states + DC + US
    }

    #[test]
    fn region_map_parse_rejects_partial_maps() {
        assert!(RegionMap::parse("NY Northeast").is_err());
    }

    #[test]
    fn default_scheme_covers_1860_to_2009() {
        let scheme = PeriodScheme::thirty_year_default();
        assert_eq!(scheme.len(), 5);
        assert_eq!(scheme.label(0), "1860-1889");
        assert_eq!(scheme.label(4), "1980-2009");
        assert_eq!(scheme.find(1875), Some(0));
        assert_eq!(scheme.find(2009), Some(4));
        assert_eq!(scheme.find(1859), None);
        assert_eq!(scheme.find(2010), None);
    }

    #[test]
    fn scheme_rejects_gaps_and_disorder() {
        assert!(PeriodScheme::new(vec![(1860, 1890), (1900, 1930)]).is_err());
        assert!(PeriodScheme::new(vec![(1890, 1920), (1860, 1890)]).is_err());
        assert!(PeriodScheme::new(vec![(1890, 1890)]).is_err());
    }

    #[test]
    fn ingest_assigns_ny_1875_to_northeast_first_period() {
        let f = write_records(&[&record("a1", "1875-06-01", "NY", "The court held.")]);
        let report = ingest(
            f.path(),
            &RegionMap::census_default(),
            &PeriodScheme::thirty_year_default(),
            &PreprocessConfig::minimal(),
        )
        .unwrap();
        assert_eq!(report.shards.len(), 1);
        assert_eq!(report.shards[0].name, "Northeast_1860-1889");
        assert_eq!(report.shards[0].documents[0].tokens, ["the", "court", "held"]);
    }

    #[test]
    fn ingest_counts_out_of_range_below_first_interval() {
        let f = write_records(&[&record("a1", "1859-12-31", "NY", "early")]);
        let report = ingest(
            f.path(),
            &RegionMap::census_default(),
            &PeriodScheme::thirty_year_default(),
            &PreprocessConfig::minimal(),
        )
        .unwrap();
        assert!(report.shards.is_empty());
        assert_eq!(report.skipped.out_of_range, 1);
    }

    #[test]
    fn ingest_six_record_fixture_matches_hand_assignment() {
        // Hand enumeration: NY 1875 and MA 1880 -> (Northeast, 1860-1889);
        // TX 1995 -> (South, 1980-2009); CA 1990 -> (West, 1980-2009);
        // US 1900 -> (Federal, 1890-1919); NY 1990 -> (Northeast, 1980-2009).
        let f = write_records(&[
            &record("d1", "1875", "NY", "one"),
            &record("d2", "1880", "MA", "two"),
            &record("d3", "1995", "TX", "three"),
            &record("d4", "1990", "CA", "four"),
            &record("d5", "1900", "US", "five"),
            &record("d6", "1990", "NY", "six"),
        ]);
        let report = ingest(
            f.path(),
            &RegionMap::census_default(),
            &PeriodScheme::thirty_year_default(),
            &PreprocessConfig::minimal(),
        )
        .unwrap();
        let counts: Vec<(String, usize)> = report
            .shards
            .iter()
            .map(|s| (s.name.clone(), s.document_count()))
            .collect();
        assert_eq!(
            counts,
            vec![
                ("Northeast_1860-1889".to_string(), 2),
                ("Northeast_1980-2009".to_string(), 1),
                ("South_1980-2009".to_string(), 1),
                ("West_1980-2009".to_string(), 1),
                ("Federal_1890-1919".to_string(), 1),
            ]
        );
        assert_eq!(report.records_read, 6);
        assert_eq!(report.skipped.total(), 0);
        // statistics rows agree with the ingest assignment
        let rows = shard_stats(&report.shards);
        assert_eq!(rows.iter().map(|r| r.documents).sum::<usize>(), 6);
        for row in &rows {
            let shard = report
                .shards
                .iter()
                .find(|s| s.name == format!("{}_{}", row.region, row.period))
                .unwrap();
            assert_eq!(row.documents, shard.document_count());
            assert_eq!(row.tokens, shard.token_count());
        }
    }

    #[test]
    fn ingest_partition_property_on_mixed_input() {
        let f = write_records(&[
            &record("d1", "1875", "NY", "kept"),
            "not json at all",
            &record("d2", "1859", "NY", "early"),
            &record("d3", "1900", "ZZ", "nowhere"),
            &record("d4", "1900", "NY", "kept"),
            &record("d4", "1901", "NY", "duplicate"),
            r#"{"id":"d5","jurisdiction":"NY","text":"undated"}"#,
        ]);
        let report = ingest(
            f.path(),
            &RegionMap::census_default(),
            &PeriodScheme::thirty_year_default(),
            &PreprocessConfig::minimal(),
        )
        .unwrap();
        let assigned: usize = report.shards.iter().map(|s| s.document_count()).sum();
        assert_eq!(assigned + report.skipped.total(), report.records_read);
        assert_eq!(report.skipped.malformed, 1);
        assert_eq!(report.skipped.out_of_range, 1);
        assert_eq!(report.skipped.unknown_jurisdiction, 1);
        assert_eq!(report.skipped.duplicate_id, 1);
        assert_eq!(report.skipped.missing_date, 1);
        assert_eq!(report.diagnostics.len(), 4);
    }

    #[test]
    fn ingest_unreadable_source_is_fatal() {
        let err = ingest(
            Path::new("/nonexistent/archive.jsonl"),
            &RegionMap::census_default(),
            &PeriodScheme::thirty_year_default(),
            &PreprocessConfig::minimal(),
        );
        assert!(matches!(err, Err(CorpusError::Io { .. })));
    }

    #[test]
    fn term_frequencies_counts_and_ties() {
        let shard = CorpusShard {
            name: "t".into(),
            documents: vec![Document {
                id: "1".into(),
                tokens: vec!["a".into(), "a".into(), "b".into()],
            }],
        };
        assert_eq!(
            term_frequencies(&shard, 2),
            vec![("a".to_string(), 2), ("b".to_string(), 1)]
        );
        let tie = CorpusShard {
            name: "t".into(),
            documents: vec![Document {
                id: "1".into(),
                tokens: vec!["b".into(), "a".into()],
            }],
        };
        assert_eq!(term_frequencies(&tie, 1), vec![("a".to_string(), 1)]);
        assert!(term_frequencies(&CorpusShard::new("e"), 3).is_empty());
    }

    #[test]
    fn term_frequencies_prefix_property() {
        let shard = CorpusShard {
            name: "t".into(),
            documents: vec![Document {
                id: "1".into(),
                tokens: "d c c b b b a a a a".split(' ').map(String::from).collect(),
            }],
        };
        for k in 0..5 {
            let small = term_frequencies(&shard, k);
            let big = term_frequencies(&shard, k + 1);
            assert_eq!(small[..], big[..small.len()]);
        }
    }

    #[test]
    fn shard_stats_layout() {
        assert!(shard_stats(&[]).is_empty());
        let shard = CorpusShard {
            name: "South_1920-1949".into(),
            documents: vec![
                Document { id: "1".into(), tokens: vec!["a".into()] },
                Document { id: "2".into(), tokens: vec!["b".into(), "c".into()] },
                Document { id: "3".into(), tokens: vec![] },
            ],
        };
        let rows = shard_stats(&[shard]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].region, "South");
        assert_eq!(rows[0].period, "1920-1949");
        assert_eq!(rows[0].documents, 3);
        assert_eq!(rows[0].tokens, 3);
        assert_eq!(
            stats_csv(&rows),
            "region,period,documents,tokens\nSouth,1920-1949,3,3\n"
        );
    }

    #[test]
    fn shard_roundtrip_preserves_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let shard = CorpusShard {
            name: "West_1980-2009".into(),
            documents: vec![
                Document { id: "a".into(), tokens: vec!["x".into(), "y".into()] },
                Document { id: "b".into(), tokens: vec![] },
                Document { id: "c".into(), tokens: vec!["z".into()] },
            ],
        };
        let path = shard.save(dir.path()).unwrap();
        assert_eq!(path.file_name().unwrap(), "West_1980-2009.txt");
        let loaded = CorpusShard::load(&path).unwrap();
        assert_eq!(loaded.document_count(), 3);
        assert_eq!(loaded.token_count(), 3);
        let again = loaded.save(dir.path()).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
        assert_eq!(shard.byte_size(), fs::read(&path).unwrap().len() as u64);
    }

    #[test]
    fn preprocess_idempotent_without_lemmatizer() {
        let cfg = PreprocessConfig {
            lemmatize: false,
            ..PreprocessConfig::default()
        };
        let once = preprocess("The Court HELD, affirming the judgment.", &cfg);
        let again = preprocess(&once.join(" "), &cfg);
        assert_eq!(once, again);
    }
}
