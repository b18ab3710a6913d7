//! Newline-delimited JSON cache of Gram entries.
//!
//! One record per upper-triangle entry: `{meta, i, i′, mid, rad, prec}`.
//! Exact rationals are stored as `p/q` with `prec = 0`; enclosures store the
//! MPFR midpoint and radius as round-trip decimals, so reloading is bit-exact.
//! Bases are nested in `d`, so a system cached at a larger `d` also serves
//! every smaller `d` of the same family.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::{assemble_gram, b_shift, nu_shift, poly::b_poly, poly::PolyGram, GramMeta, GramSystem, Parametrization};
use crate::arith::{Interval, Scalar};
use crate::error::{Error, Result};

pub const CACHE_FILE: &str = "gram.ndjson";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheRecord {
    pub meta: GramMeta,
    pub i: usize,
    #[serde(rename = "i′")]
    pub ip: usize,
    pub mid: String,
    pub rad: String,
    pub prec: u32,
}

impl CacheRecord {
    pub fn new(meta: &GramMeta, i: usize, ip: usize, v: &Scalar) -> CacheRecord {
        let (mid, rad, prec) = match v {
            Scalar::Exact(q) => (q.to_string(), "0".to_string(), 0),
            Scalar::Approx(iv) => (
                iv.mid().to_string_radix(10, None),
                iv.rad().to_string_radix(10, None),
                iv.prec(),
            ),
        };
        CacheRecord { meta: meta.clone(), i, ip, mid, rad, prec }
    }

    pub fn value(&self) -> Result<Scalar> {
        let bad = |what: &str| Error::CacheCorrupt(format!("entry ({}, {}): bad {}", self.i, self.ip, what));
        if self.prec == 0 {
            let q: Rational = self.mid.parse().map_err(|_| bad("rational"))?;
            return Ok(Scalar::Exact(q));
        }
        let mid = Float::parse(&self.mid).map_err(|_| bad("midpoint"))?;
        let rad = Float::parse(&self.rad).map_err(|_| bad("radius"))?;
        let mid = Float::with_val(self.prec, mid);
        let rad = Float::with_val(64, rad);
        if rad.is_sign_negative() || !rad.is_finite() {
            return Err(bad("radius"));
        }
        Ok(Scalar::Approx(Interval::from_parts(mid, &rad)))
    }
}

/// Cached entries of one system, keyed by `(i, i′)` with `i <= i′`.
type Entries = BTreeMap<(usize, usize), Scalar>;

#[derive(Clone, Debug)]
pub struct GramCache {
    dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct CacheSummary {
    pub meta: GramMeta,
    pub records: usize,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checked: usize,
    /// `(d, i, i′)` of entries whose recomputation does not overlap the record.
    pub stale: Vec<(GramMeta, usize, usize)>,
}

impl GramCache {
    pub fn new(dir: impl Into<PathBuf>) -> GramCache {
        GramCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self) -> PathBuf {
        self.dir.join(CACHE_FILE)
    }

    pub fn records(&self) -> Result<Vec<CacheRecord>> {
        let path = self.path();
        if !path.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for (ln, line) in BufReader::new(File::open(&path)?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CacheRecord = serde_json::from_str(&line)
                .map_err(|e| Error::CacheCorrupt(format!("{}:{}: {}", path.display(), ln + 1, e)))?;
            out.push(rec);
        }
        Ok(out)
    }

    /// Group records by meta, rejecting conflicting duplicates.
    fn grouped(&self) -> Result<Vec<(GramMeta, Entries)>> {
        let mut groups: Vec<(GramMeta, Entries)> = Vec::new();
        for rec in self.records()? {
            let v = rec.value()?;
            let key = (rec.i.min(rec.ip), rec.i.max(rec.ip));
            let pos = match groups.iter().position(|(m, _)| *m == rec.meta) {
                Some(p) => p,
                None => {
                    groups.push((rec.meta.clone(), Entries::new()));
                    groups.len() - 1
                }
            };
            if let Some(old) = groups[pos].1.get(&key) {
                if !same_value(old, &v) {
                    return Err(Error::CacheCorrupt(format!(
                        "conflicting records for entry {:?} of d = {}",
                        key, rec.meta.d
                    )));
                }
            }
            groups[pos].1.insert(key, v);
        }
        Ok(groups)
    }

    /// The leading `k x k` Gram block for `meta`, from an exact match or a
    /// cached system of the same family with larger `d`.
    pub fn load(&self, meta: &GramMeta, k: usize) -> Result<Option<Vec<Vec<Scalar>>>> {
        let mut groups: Vec<_> = self
            .grouped()?
            .into_iter()
            .filter(|(m, _)| m.same_family(meta) && m.d >= meta.d)
            .collect();
        groups.sort_by_key(|(m, _)| m.d);
        for (_, entries) in groups {
            let complete = (0..k).all(|i| (i..k).all(|j| entries.contains_key(&(i, j))));
            if complete {
                let mut a = vec![vec![Scalar::zero(); k]; k];
                for i in 0..k {
                    for j in i..k {
                        let v = entries[&(i, j)].clone();
                        a[j][i] = v.clone();
                        a[i][j] = v;
                    }
                }
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    /// Append the upper triangle of `a` under `meta`.
    pub fn store(&self, meta: &GramMeta, a: &[Vec<Scalar>]) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut f = OpenOptions::new().create(true).append(true).open(self.path())?;
        let mut buf = String::new();
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate().skip(i) {
                let rec = CacheRecord::new(meta, i, j, v);
                buf.push_str(&serde_json::to_string(&rec).expect("record serializes"));
                buf.push('\n');
            }
        }
        f.write_all(buf.as_bytes())?;
        Ok(())
    }

    /// The Gram system for `meta`, from the cache when possible and
    /// assembled (then stored) otherwise. `b` is always recomputed; it is
    /// cheap and exact or nearly so. The flag is true on a cache hit.
    pub fn system(&self, meta: &GramMeta) -> Result<(GramSystem, bool)> {
        let basis = meta.basis()?;
        if let Some(a) = self.load(meta, basis.len())? {
            let b = match meta.parametrization {
                Parametrization::Poly => b_poly(&basis.polys())?.into_iter().map(Scalar::Exact).collect(),
                Parametrization::Shift => b_shift(meta.n, meta.m, &basis, meta.prec)?,
            };
            return Ok((GramSystem { a, b, meta: meta.clone(), diagnostics: Vec::new() }, true));
        }
        let sys = assemble_gram(meta.n, meta.m, &basis, &meta.params()?, meta.prec)?;
        self.store(&sys.meta, &sys.a)?;
        Ok((sys, false))
    }

    pub fn list(&self) -> Result<Vec<CacheSummary>> {
        Ok(self
            .grouped()?
            .into_iter()
            .map(|(meta, e)| CacheSummary { meta, records: e.len() })
            .collect())
    }

    /// Remove the cache file; returns the number of records removed.
    pub fn clear(&self) -> Result<usize> {
        let n = match self.records() {
            Ok(r) => r.len(),
            Err(_) => 0,
        };
        let path = self.path();
        if path.exists() {
            fs::remove_file(path)?;
        }
        Ok(n)
    }

    /// Recompute a random `fraction` of the cached entries (at least one per
    /// system) and check that each recomputation overlaps the record.
    pub fn verify(&self, fraction: f64, seed: u64) -> Result<VerifyReport> {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut report = VerifyReport::default();
        for (meta, entries) in self.grouped()? {
            let keys: Vec<_> = entries.keys().copied().collect();
            let count = ((keys.len() as f64 * fraction).ceil() as usize).clamp(1, keys.len());
            let sample: Vec<_> = keys.choose_multiple(&mut rng, count).copied().collect();
            let basis = meta.basis()?;
            let poly = match meta.parametrization {
                Parametrization::Poly => Some(PolyGram::new(&basis.polys())?),
                Parametrization::Shift => None,
            };
            for (i, j) in sample {
                if j >= basis.len() {
                    report.stale.push((meta.clone(), i, j));
                    continue;
                }
                let fresh = match &poly {
                    Some(g) => Scalar::Exact(g.entry(i, j)),
                    None => {
                        let t = meta.truncation.as_ref().ok_or_else(|| {
                            Error::CacheCorrupt("shift record without truncation parameters".into())
                        })?;
                        nu_shift(meta.n, meta.m, &basis.functions[i], &basis.functions[j], t, meta.prec)?
                    }
                };
                report.checked += 1;
                if !fresh.overlaps(&entries[&(i, j)]) {
                    report.stale.push((meta.clone(), i, j));
                }
            }
        }
        Ok(report)
    }
}

fn same_value(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        (Scalar::Approx(x), Scalar::Approx(y)) => x.mid() == y.mid() && x.rad() == y.rad(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::TruncationParams;

    fn meta(d: u32) -> GramMeta {
        GramMeta {
            n: 3,
            m: 1,
            parametrization: Parametrization::Shift,
            d,
            truncation: Some(TruncationParams::standard(3, 1, 40).unwrap()),
            prec: 128,
        }
    }

    fn dir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("corrbound-cache-{}-{}", tag, std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = GramCache::new(dir("rt"));
        let third = Interval::from_rational(&Rational::from((1, 3)), 128).widen(&Float::with_val(64, 1e-20));
        let a = vec![
            vec![Scalar::Approx(third.clone()), Scalar::Exact(Rational::from((-7, 5)))],
            vec![Scalar::Exact(Rational::from((-7, 5))), Scalar::Approx(Interval::pi(128))],
        ];
        c.store(&meta(1), &a).unwrap();
        let back = c.load(&meta(1), 2).unwrap().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(same_value(&a[i][j], &back[i][j]), "({}, {})", i, j);
            }
        }
        // a larger cached system serves the leading block of a smaller one
        assert!(c.load(&meta(0), 1).unwrap().is_some());
        assert!(c.load(&meta(2), 3).unwrap().is_none());
        assert_eq!(c.clear().unwrap(), 3);
        assert!(c.list().unwrap().is_empty());
    }

    #[test]
    fn warm_system_matches_cold() {
        let c = GramCache::new(dir("sys"));
        let m = GramMeta { parametrization: Parametrization::Poly, truncation: None, ..meta(3) };
        let (cold, hit) = c.system(&m).unwrap();
        assert!(!hit);
        let (warm, hit) = c.system(&m).unwrap();
        assert!(hit);
        let flat = |s: &GramSystem| s.a.iter().flatten().chain(&s.b).cloned().collect::<Vec<_>>();
        assert!(flat(&cold).iter().zip(&flat(&warm)).all(|(x, y)| same_value(x, y)));
        c.clear().unwrap();
    }

    #[test]
    fn malformed_line_is_corruption() {
        let c = GramCache::new(dir("bad"));
        fs::create_dir_all(c.dir()).unwrap();
        fs::write(c.path(), "{not json}\n").unwrap();
        assert!(matches!(c.records(), Err(Error::CacheCorrupt(_))));
        c.clear().unwrap();
    }
}
