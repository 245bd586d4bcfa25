//! Persistent class-group cache: plain text, tab-separated, append-only.
//!
//! Format: a `#ctl-cache v1` header line, then one record per line:
//! `D \t h \t divisors-comma-joined \t kind` with kind `W` or `N`.
//! Writers append under an exclusive advisory lock; readers take no lock and
//! ignore a partially written final line.

use crate::classgroup::{class_group, ClassGroup, Kind};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};

pub const CACHE_HEADER: &str = "#ctl-cache v1";

/// One serialized class group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheRecord {
    pub d: i64,
    pub h: u64,
    pub divisors: Vec<u64>,
    pub kind: Kind,
}

impl CacheRecord {
    pub fn from_class_group(g: &ClassGroup) -> Self {
        CacheRecord {
            d: g.d,
            h: g.h,
            divisors: g.divisors.clone(),
            kind: g.kind,
        }
    }

    pub fn to_class_group(&self) -> ClassGroup {
        ClassGroup {
            d: self.d,
            h: self.h,
            divisors: self.divisors.clone(),
            kind: self.kind,
        }
    }

    pub fn to_line(&self) -> String {
        let divisors = if self.divisors.is_empty() {
            "-".to_string()
        } else {
            self.divisors
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let kind = match self.kind {
            Kind::Wide => "W",
            Kind::Narrow => "N",
        };
        format!("{}\t{}\t{}\t{}", self.d, self.h, divisors, kind)
    }

    pub fn parse_line(line: &str, lineno: usize) -> Result<Self> {
        let corrupt = |reason: &str| Error::CacheCorruption {
            line: lineno,
            reason: reason.to_string(),
        };
        let mut parts = line.split('\t');
        let d: i64 = parts
            .next()
            .ok_or_else(|| corrupt("missing D"))?
            .parse()
            .map_err(|_| corrupt("bad D"))?;
        let h: u64 = parts
            .next()
            .ok_or_else(|| corrupt("missing h"))?
            .parse()
            .map_err(|_| corrupt("bad h"))?;
        let divs_field = parts.next().ok_or_else(|| corrupt("missing divisors"))?;
        let divisors: Vec<u64> = if divs_field == "-" {
            vec![]
        } else {
            divs_field
                .split(',')
                .map(|t| t.parse().map_err(|_| corrupt("bad divisor")))
                .collect::<Result<_>>()?
        };
        let kind = match parts.next().ok_or_else(|| corrupt("missing kind"))? {
            "W" => Kind::Wide,
            "N" => Kind::Narrow,
            _ => return Err(corrupt("bad kind")),
        };
        if parts.next().is_some() {
            return Err(corrupt("trailing fields"));
        }
        // structural invariants: chain divides, product = h, entries >= 2
        let mut prod = 1u64;
        for w in divisors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(corrupt("divisor chain broken"));
            }
        }
        for dv in &divisors {
            if *dv < 2 {
                return Err(corrupt("divisor < 2"));
            }
            prod = prod
                .checked_mul(*dv)
                .ok_or_else(|| corrupt("divisor overflow"))?;
        }
        if prod != h {
            return Err(corrupt("product of divisors differs from h"));
        }
        Ok(CacheRecord {
            d,
            h,
            divisors,
            kind,
        })
    }
}

/// Append-only class-group cache bound to one file path.
#[derive(Debug)]
pub struct ClassGroupCache {
    path: PathBuf,
    map: BTreeMap<i64, CacheRecord>,
}

impl ClassGroupCache {
    /// Open (creating if missing) and load every valid record.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if !path.exists() {
            let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
            f.write_all(CACHE_HEADER.as_bytes())?;
            f.write_all(b"\n")?;
        }
        let map = Self::load(&path)?;
        Ok(ClassGroupCache { path, map })
    }

    fn load(path: &Path) -> Result<BTreeMap<i64, CacheRecord>> {
        let f = File::open(path)?;
        let mut reader = BufReader::new(f);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        if first.trim_end() != CACHE_HEADER {
            return Err(Error::CacheCorruption {
                line: 1,
                reason: format!("bad header {first:?}"),
            });
        }
        let mut map = BTreeMap::new();
        let mut buf = Vec::new();
        reader.read_to_end(&mut buf)?;
        let text = String::from_utf8_lossy(&buf);
        let complete = match text.rfind('\n') {
            Some(i) => &text[..i],
            None => "", // a partially written first record: ignore
        };
        for (i, line) in complete.split('\n').enumerate() {
            if line.is_empty() {
                continue;
            }
            let rec = CacheRecord::parse_line(line, i + 2)?;
            map.insert(rec.d, rec);
        }
        Ok(map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, d: i64) -> Option<&CacheRecord> {
        self.map.get(&d)
    }

    /// Cached structure if present, otherwise compute, persist, and return.
    pub fn get_or_compute(&mut self, d: i64) -> Result<ClassGroup> {
        if let Some(rec) = self.map.get(&d) {
            return Ok(rec.to_class_group());
        }
        let g = class_group(d)?;
        self.append(&CacheRecord::from_class_group(&g))?;
        Ok(g)
    }

    /// Append records under an exclusive advisory lock.
    pub fn append(&mut self, rec: &CacheRecord) -> Result<()> {
        self.append_all(std::slice::from_ref(rec))
    }

    pub fn append_all(&mut self, recs: &[CacheRecord]) -> Result<()> {
        let mut f = OpenOptions::new().append(true).open(&self.path)?;
        let fd = f.as_raw_fd();
        let rc = unsafe { libc::flock(fd, libc::LOCK_EX) };
        if rc != 0 {
            return Err(Error::Io(std::io::Error::last_os_error()));
        }
        let mut payload = String::new();
        for rec in recs {
            if self.map.contains_key(&rec.d) {
                continue;
            }
            payload.push_str(&rec.to_line());
            payload.push('\n');
        }
        f.seek(SeekFrom::End(0))?;
        let res = f.write_all(payload.as_bytes()).and_then(|_| f.flush());
        unsafe { libc::flock(fd, libc::LOCK_UN) };
        res?;
        for rec in recs {
            self.map.entry(rec.d).or_insert_with(|| rec.clone());
        }
        Ok(())
    }

    pub fn records(&self) -> impl Iterator<Item = &CacheRecord> {
        self.map.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cold_then_warm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.tsv");
        let mut cache = ClassGroupCache::open(&path).unwrap();
        let g1 = cache.get_or_compute(-23).unwrap();
        assert_eq!(g1.divisors, vec![3]);
        // reopen: warm hit without recompute
        let mut cache = ClassGroupCache::open(&path).unwrap();
        assert_eq!(cache.len(), 1);
        let g2 = cache.get_or_compute(-23).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn tampered_line_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.tsv");
        let mut cache = ClassGroupCache::open(&path).unwrap();
        cache.get_or_compute(-23).unwrap();
        cache.get_or_compute(-20).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replace("-23\t3\t3\tW", "-23\t3\t4\tW");
        std::fs::write(&path, text).unwrap();
        match ClassGroupCache::open(&path) {
            Err(Error::CacheCorruption { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected corruption, got {other:?}"),
        }
    }

    #[test]
    fn partial_final_line_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.tsv");
        let mut cache = ClassGroupCache::open(&path).unwrap();
        cache.get_or_compute(-23).unwrap();
        // simulate a torn write
        use std::io::Write as _;
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"-47\t5").unwrap();
        drop(f);
        let cache = ClassGroupCache::open(&path).unwrap();
        assert_eq!(cache.len(), 1);
        assert!(cache.get(-47).is_none());
    }

    #[test]
    fn roundtrip_random_records() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.tsv");
        let mut cache = ClassGroupCache::open(&path).unwrap();
        let mut expected = Vec::new();
        let mut batch = Vec::new();
        for i in 0..10_000i64 {
            // random valid divisor chain
            let t = rng.gen_range(0..4usize);
            let mut divisors: Vec<u64> = Vec::new();
            let mut cur = 1u64;
            for _ in 0..t {
                cur *= rng.gen_range(2..5u64);
                divisors.push(cur);
            }
            let h = divisors.iter().product::<u64>().max(1);
            let rec = CacheRecord {
                d: -(3 + 4 * i),
                h,
                divisors,
                kind: if rng.gen_bool(0.5) {
                    Kind::Wide
                } else {
                    Kind::Narrow
                },
            };
            expected.push(rec.clone());
            batch.push(rec);
        }
        cache.append_all(&batch).unwrap();
        let cache = ClassGroupCache::open(&path).unwrap();
        for rec in &expected {
            assert_eq!(cache.get(rec.d), Some(rec));
        }
    }
}
