//! Append-only JSON-lines cache of quotient measurements.
//!
//! Each line is one [`ScanRecord`]. Lines that fail to parse or violate
//! `group_size = N * ord` are skipped and counted. Only one writer appends.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use boxscope_core::cayley::build_graph;
use boxscope_core::quotient::build_quotient;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    #[serde(with = "big_json")]
    pub m: BigUint,
    #[serde(rename = "N", with = "big_json")]
    pub n: BigUint,
    #[serde(with = "big_json")]
    pub ord: BigUint,
    #[serde(with = "big_json")]
    pub group_size: BigUint,
    pub diameter: Option<u32>,
    pub wall_time_ms: u64,
    pub tool_version: String,
}

impl ScanRecord {
    pub fn key(&self) -> (BigUint, BigUint) {
        (self.m.clone(), self.n.clone())
    }

    fn is_consistent(&self) -> bool {
        self.group_size == &self.n * &self.ord
    }
}

/// Integers as JSON numbers when they fit in `u64`, strings otherwise.
mod big_json {
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match x.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&x.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(BigUint::from(v)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Computes the order, group size and (under the cap) diameter of `Q(m, N)`.
pub fn measure(m: &BigUint, n: &BigUint, vertex_cap: u64) -> boxscope_core::Result<ScanRecord> {
    let start = Instant::now();
    let q = build_quotient(m, n)?;
    let group_size = q.size();
    let diameter = if group_size <= BigUint::from(vertex_cap) {
        Some(build_graph(&q, vertex_cap)?.diameter()?)
    } else {
        None
    };
    Ok(ScanRecord {
        m: m.clone(),
        n: n.clone(),
        ord: q.order_certificate().order().clone(),
        group_size,
        diameter,
        wall_time_ms: start.elapsed().as_millis() as u64,
        tool_version: TOOL_VERSION.to_string(),
    })
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    records: HashMap<(BigUint, BigUint), ScanRecord>,
    corrupt: usize,
    writer: Option<BufWriter<File>>,
}

impl Cache {
    /// Loads `path` if it exists. The file is created on first append.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut records = HashMap::new();
        let mut corrupt = 0;
        match File::open(&path) {
            Ok(f) => {
                for line in BufReader::new(f).lines() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<ScanRecord>(&line) {
                        Ok(r) if r.is_consistent() => {
                            records.insert(r.key(), r);
                        }
                        _ => corrupt += 1,
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(Cache {
            path,
            records,
            corrupt,
            writer: None,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn corrupt_lines(&self) -> usize {
        self.corrupt
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, m: &BigUint, n: &BigUint) -> Option<&ScanRecord> {
        self.records.get(&(m.clone(), n.clone()))
    }

    /// A cached record that answers a request with the given vertex cap:
    /// it must carry a diameter whenever the cap would allow one.
    pub fn lookup(&self, m: &BigUint, n: &BigUint, vertex_cap: u64) -> Option<&ScanRecord> {
        self.get(m, n)
            .filter(|r| r.diameter.is_some() || r.group_size > BigUint::from(vertex_cap))
    }

    pub fn append(&mut self, record: ScanRecord) -> io::Result<()> {
        if self.writer.is_none() {
            if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let file = OpenOptions::new().create(true).append(true).open(&self.path)?;
            self.writer = Some(BufWriter::new(file));
        }
        let w = self.writer.as_mut().unwrap();
        serde_json::to_writer(&mut *w, &record)?;
        w.write_all(b"\n")?;
        w.flush()?;
        self.records.insert(record.key(), record);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn measure_q25() {
        let r = measure(&big(2), &big(5), 1000).unwrap();
        assert_eq!(
            (r.ord.clone(), r.group_size.clone(), r.diameter),
            (big(4), big(20), Some(3))
        );
        let capped = measure(&big(2), &big(5), 10).unwrap();
        assert_eq!(capped.diameter, None);
    }

    #[test]
    fn json_field_names() {
        let r = measure(&big(2), &big(5), 1000).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in [
            "m",
            "N",
            "ord",
            "group_size",
            "diameter",
            "wall_time_ms",
            "tool_version",
        ] {
            assert!(keys.contains(&k), "{k}");
        }
        let huge = ScanRecord {
            n: BigUint::from(u64::MAX) * 3u8,
            group_size: BigUint::from(u64::MAX) * 3u8,
            ord: big(1),
            ..r
        };
        let line = serde_json::to_string(&huge).unwrap();
        assert!(line.contains("\"N\":\"55340232221128654845\""));
        assert_eq!(serde_json::from_str::<ScanRecord>(&line).unwrap(), huge);
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/cache.jsonl");
        let mut cache = Cache::open(&path).unwrap();
        assert!(cache.is_empty());
        cache.append(measure(&big(2), &big(5), 1000).unwrap()).unwrap();
        cache.append(measure(&big(3), &big(7), 1000).unwrap()).unwrap();
        drop(cache);

        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("{not json\n\n");
        text.push_str(r#"{"m":2,"N":7,"ord":3,"group_size":22,"diameter":null,"wall_time_ms":0,"tool_version":"x"}"#);
        text.push('\n');
        std::fs::write(&path, text).unwrap();

        let cache = Cache::open(&path).unwrap();
        assert_eq!(cache.len(), 2);
        assert_eq!(cache.corrupt_lines(), 2);
        let r = cache.lookup(&big(2), &big(5), 1000).unwrap();
        let fresh = measure(&r.m, &r.n, 1000).unwrap();
        assert_eq!((&fresh.ord, fresh.diameter), (&r.ord, r.diameter));
        assert!(cache.lookup(&big(2), &big(9), 1000).is_none());
    }

    #[test]
    fn capped_record_is_not_reused_under_larger_cap() {
        let dir = tempfile::tempdir().unwrap();
        let mut cache = Cache::open(dir.path().join("c.jsonl")).unwrap();
        cache.append(measure(&big(2), &big(5), 10).unwrap()).unwrap();
        assert!(cache.lookup(&big(2), &big(5), 10).is_some());
        assert!(cache.lookup(&big(2), &big(5), 1000).is_none());
    }
}
