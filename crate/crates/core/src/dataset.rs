//! Dataset files (`.nbwds`).
//!
//! UTF-8, line-delimited JSON. Line 1 is the header object; each following
//! line is one automaton record:
//!
//! ```text
//! {"format":"nbwds","version":1,"name":"infb_600_3_9","spec":{..},"prng":"..","quotas":{"Negative":300,..}}
//! {"n":2,"num_symbols":2,"transitions":[[0,0,0],[0,1,1]],"accepting":[1],"label":1,"bucket":"PosLen1","item_seed":123}
//! ```
//!
//! Transitions are written in canonical `(src, sym, dst)` order, so reading a
//! file and writing it back reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automaton::{Nbw, State, Transition};
use crate::encoding::{encode, EncodedGraph, InitMode};
use crate::error::FormatError;
use crate::generator::{dataset_name, is_positive, BucketId, DatasetSpec};
use crate::rng::PRNG_NAME;
use crate::scalar::Scalar;

pub const DATASET_FORMAT: &str = "nbwds";
pub const DATASET_VERSION: u32 = 1;
pub const DATASET_EXTENSION: &str = "nbwds";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format: String,
    pub version: u32,
    pub name: String,
    pub spec: DatasetSpec,
    pub prng: String,
    pub quotas: BTreeMap<BucketId, usize>,
}

impl DatasetHeader {
    pub fn new(spec: DatasetSpec, quotas: BTreeMap<BucketId, usize>) -> Self {
        Self {
            format: DATASET_FORMAT.to_string(),
            version: DATASET_VERSION,
            name: spec.name(),
            spec,
            prng: PRNG_NAME.to_string(),
            quotas,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRecord {
    pub nbw: Nbw,
    /// True iff the dataset's property holds.
    pub label: bool,
    pub bucket: BucketId,
    pub item_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub records: Vec<DatasetRecord>,
}

/// On-disk shape of a record.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    n: usize,
    num_symbols: usize,
    transitions: Vec<(State, usize, State)>,
    accepting: Vec<State>,
    label: u8,
    bucket: BucketId,
    item_seed: u64,
}

impl From<&DatasetRecord> for RawRecord {
    fn from(r: &DatasetRecord) -> Self {
        RawRecord {
            n: r.nbw.num_states(),
            num_symbols: r.nbw.num_symbols(),
            transitions: r.nbw.transitions().iter().map(|t| (t.src, t.sym, t.dst)).collect(),
            accepting: r.nbw.accepting().iter().copied().collect(),
            label: u8::from(r.label),
            bucket: r.bucket,
            item_seed: r.item_seed,
        }
    }
}

impl RawRecord {
    fn into_record(self) -> Result<DatasetRecord, String> {
        let nbw = Nbw::new(
            self.n,
            self.num_symbols,
            self.transitions.into_iter().map(Transition::from),
            self.accepting,
        )
        .map_err(|e| e.to_string())?;
        let label = match self.label {
            0 => false,
            1 => true,
            other => return Err(format!("label must be 0 or 1, got {other}")),
        };
        Ok(DatasetRecord {
            nbw,
            label,
            bucket: self.bucket,
            item_seed: self.item_seed,
        })
    }
}

impl Dataset {
    /// A dataset with no records, e.g. for tests.
    pub fn empty(spec: DatasetSpec) -> Self {
        Self {
            header: DatasetHeader::new(spec, BTreeMap::new()),
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn bucket_counts(&self) -> BTreeMap<BucketId, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.bucket).or_insert(0) += 1;
        }
        counts
    }

    /// Encodes every record with the header's `n_add` and init mode.
    pub fn encoded<T: Scalar>(&self) -> Vec<EncodedGraph<T>> {
        self.encoded_with(self.header.spec.n_add, self.header.spec.init_mode)
    }

    pub fn encoded_with<T: Scalar>(&self, n_add: usize, init_mode: InitMode) -> Vec<EncodedGraph<T>> {
        self.records
            .iter()
            .map(|r| {
                let mut g = encode(&r.nbw, n_add, init_mode, r.item_seed);
                g.label = r.label;
                g.meta.bucket = Some(r.bucket);
                g
            })
            .collect()
    }

    pub fn to_writer<W: Write>(&self, mut w: W) -> Result<(), FormatError> {
        serde_json::to_writer(&mut w, &self.header).map_err(|e| FormatError::Header(e.to_string()))?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, &RawRecord::from(r)).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, FormatError> {
        let mut lines = reader.lines();
        let first = lines
            .next()
            .ok_or_else(|| FormatError::Header("file is empty".into()))??;
        let header = parse_header(&first)?;

        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let record_no = i + 1;
            let bad = |reason: String| FormatError::Record {
                record: record_no,
                line: record_no + 1,
                reason,
            };
            if line.trim().is_empty() {
                return Err(bad("blank line".into()));
            }
            let raw: RawRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            let rec = raw.into_record().map_err(&bad)?;
            if is_positive(header.spec.property.kind, rec.bucket) != rec.label {
                return Err(bad(format!(
                    "label {} inconsistent with bucket {}",
                    u8::from(rec.label),
                    rec.bucket
                )));
            }
            records.push(rec);
        }

        let ds = Dataset { header, records };
        let counts = ds.bucket_counts();
        for bucket in ds.header.quotas.keys().chain(counts.keys()) {
            let expected = ds.header.quotas.get(bucket).copied().unwrap_or(0);
            let found = counts.get(bucket).copied().unwrap_or(0);
            if expected != found {
                return Err(FormatError::QuotaMismatch { bucket: *bucket, expected, found });
            }
        }
        Ok(ds)
    }
}

fn parse_header(line: &str) -> Result<DatasetHeader, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| FormatError::Header(e.to_string()))?;
    if value.get("format").and_then(|f| f.as_str()) != Some(DATASET_FORMAT) {
        return Err(FormatError::Header(format!("expected format \"{DATASET_FORMAT}\"")));
    }
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| FormatError::Header("missing version".into()))?;
    if version != u64::from(DATASET_VERSION) {
        return Err(FormatError::Version {
            found: version.try_into().unwrap_or(u32::MAX),
            expected: DATASET_VERSION,
        });
    }
    let header: DatasetHeader =
        serde_json::from_value(value).map_err(|e| FormatError::Header(e.to_string()))?;
    let s = &header.spec;
    let expected_name = dataset_name(s.property.kind, s.size, s.gen.n_min, s.gen.n_max);
    if header.name != expected_name {
        return Err(FormatError::Header(format!(
            "name {} does not match spec ({expected_name})",
            header.name
        )));
    }
    Ok(header)
}

pub fn write_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<(), FormatError> {
    ds.to_writer(BufWriter::new(File::create(path)?))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset, FormatError> {
    Dataset::from_reader(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{build_balanced_dataset, GeneratorParams};
    use crate::oracle::PropertyKind;

    fn small() -> Dataset {
        let gen = GeneratorParams { seed: 3, ..GeneratorParams::default() };
        build_balanced_dataset(&DatasetSpec::new(PropertyKind::Min1B, 24, gen)).unwrap()
    }

    fn bytes(ds: &Dataset) -> Vec<u8> {
        let mut out = Vec::new();
        ds.to_writer(&mut out).unwrap();
        out
    }

    #[test]
    fn empty_round_trip() {
        let ds = Dataset::empty(DatasetSpec::new(PropertyKind::InfB, 6, GeneratorParams::default()));
        let text = bytes(&ds);
        assert_eq!(text.iter().filter(|&&b| b == b'\n').count(), 1);
        let back = Dataset::from_reader(&text[..]).unwrap();
        assert_eq!(back, ds);
        assert_eq!(bytes(&back), text);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let ds = small();
        let text = bytes(&ds);
        let back = Dataset::from_reader(&text[..]).unwrap();
        assert_eq!(back, ds);
        assert_eq!(bytes(&back), text);
    }

    #[test]
    fn version_mismatch() {
        let text = String::from_utf8(bytes(&small())).unwrap().replacen("\"version\":1", "\"version\":9", 1);
        assert!(matches!(
            Dataset::from_reader(text.as_bytes()),
            Err(FormatError::Version { found: 9, expected: 1 })
        ));
    }

    #[test]
    fn corrupted_record_is_named() {
        let text = String::from_utf8(bytes(&small())).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        lines[17] = lines[17].replace("\"n\":", "\"n\":\"x\",\"m\":");
        let broken = lines.join("\n") + "\n";
        let err = Dataset::from_reader(broken.as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Record { record: 17, line: 18, .. }), "{err}");
        assert!(err.to_string().contains("record 17"));
    }

    #[test]
    fn quota_mismatch() {
        let text = String::from_utf8(bytes(&small())).unwrap();
        let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            Dataset::from_reader(truncated.as_bytes()),
            Err(FormatError::QuotaMismatch { .. })
        ));
    }

    #[test]
    fn label_bucket_consistency() {
        let text = String::from_utf8(bytes(&small())).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let i = lines.iter().position(|l| l.contains("\"label\":1")).unwrap();
        lines[i] = lines[i].replace("\"label\":1", "\"label\":0");
        let broken = lines.join("\n") + "\n";
        assert!(matches!(
            Dataset::from_reader(broken.as_bytes()),
            Err(FormatError::Record { .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.nbwds");
        let ds = small();
        write_dataset(&ds, &path).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), ds);
    }
}
