//! Bigraded dimension tables, the universal output type.

use crate::Bidegree;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Map from bidegree `(n, d)` to a dimension, together with the certified
/// region. Entries outside the stored ranges are zero *as far as the window
/// can tell*; only certified entries are provably unaffected by truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimTable {
    pub n_range: (i32, i32),
    pub d_range: (i32, i32),
    /// Nonzero entries only.
    #[serde(with = "entries_as_triples")]
    pub entries: BTreeMap<Bidegree, u64>,
    /// Certified cohomological degrees (inclusive); empty region when
    /// `cert_n.0 > cert_n.1`.
    pub cert_n: (i32, i32),
    /// Whether the (low, high) ends of `d_range` are truncation artifacts.
    /// Module tables have a genuine lower bound d = 0; Hom complexes have a
    /// genuine negative lower bound but a truncated upper one.
    #[serde(default = "default_d_trunc")]
    pub d_trunc: (bool, bool),
}

fn default_d_trunc() -> (bool, bool) {
    (false, true)
}

/// JSON can't key maps by tuples; store entries as `[n, d, dim]` triples.
mod entries_as_triples {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<Bidegree, u64>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let v: Vec<(i32, i32, u64)> = map.iter().map(|(&(n, d), &x)| (n, d, x)).collect();
        v.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<Bidegree, u64>, D::Error> {
        let v: Vec<(i32, i32, u64)> = Vec::deserialize(de)?;
        Ok(v.into_iter().map(|(n, d, x)| ((n, d), x)).collect())
    }
}

impl DimTable {
    pub fn empty(n_range: (i32, i32), d_range: (i32, i32)) -> Self {
        DimTable {
            n_range,
            d_range,
            entries: BTreeMap::new(),
            cert_n: (1, 0),
            d_trunc: (false, true),
        }
    }

    pub fn set(&mut self, n: i32, d: i32, dim: u64) {
        if dim > 0 {
            self.entries.insert((n, d), dim);
        }
    }

    pub fn get(&self, n: i32, d: i32) -> u64 {
        self.entries.get(&(n, d)).copied().unwrap_or(0)
    }

    pub fn is_certified(&self, n: i32, d: i32) -> bool {
        if n < self.cert_n.0 || n > self.cert_n.1 {
            return false;
        }
        // beyond a truncated d-edge the table reports zero only because the
        // box ends there; within the box, d-slices are exact (the
        // differential preserves internal degree)
        if self.d_trunc.1 && d > self.d_range.1 {
            return false;
        }
        !(self.d_trunc.0 && d < self.d_range.0)
    }

    pub fn in_window(&self, n: i32, d: i32) -> bool {
        n >= self.n_range.0 && n <= self.n_range.1 && d >= self.d_range.0 && d <= self.d_range.1
    }

    /// Every certified entry is zero.
    pub fn certified_zero(&self) -> bool {
        self.entries.iter().all(|(&(n, d), _)| !self.is_certified(n, d))
    }

    pub fn has_certified_nonzero(&self) -> bool {
        !self.certified_zero()
    }

    /// Total dimension at cohomological degree `n`, summed over internal
    /// degree. Unavailable when `n` is uncertified or when the in-window
    /// d-support reaches the window boundary (the total might be infinite or
    /// silently truncated; Ext^0 of k[x] is the canonical offender).
    pub fn total_at(&self, n: i32) -> Option<u64> {
        if !(n >= self.cert_n.0 && n <= self.cert_n.1) {
            return None;
        }
        let margin = 1;
        let mut total = 0u64;
        for (&(en, ed), &v) in self.entries.range((n, i32::MIN)..=(n, i32::MAX)) {
            debug_assert_eq!(en, n);
            if self.d_trunc.1 && ed >= self.d_range.1 - margin {
                return None; // support reaches the truncation edge
            }
            if self.d_trunc.0 && ed <= self.d_range.0 + margin {
                return None;
            }
            total += v;
        }
        Some(total)
    }

    /// Restrict the certified region (intersection with another rule).
    pub fn restrict_cert(&mut self, lo: i32, hi: i32) {
        self.cert_n = (self.cert_n.0.max(lo), self.cert_n.1.min(hi));
    }

    /// Do two tables agree on every bidegree certified in both?
    pub fn agrees_with(&self, other: &DimTable) -> bool {
        let keys: std::collections::BTreeSet<Bidegree> =
            self.entries.keys().chain(other.entries.keys()).copied().collect();
        for (n, d) in keys {
            if self.is_certified(n, d)
                && other.is_certified(n, d)
                && self.in_window(n, d)
                && other.in_window(n, d)
                && self.get(n, d) != other.get(n, d)
            {
                return false;
            }
        }
        true
    }

    /// Rows n, columns d; uncertified entries suffixed `?`.
    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let d_lo = self.entries.keys().map(|&(_, d)| d).min().unwrap_or(0).min(0);
        let d_hi = self.entries.keys().map(|&(_, d)| d).max().unwrap_or(0).max(0);
        let n_lo = self.entries.keys().map(|&(n, _)| n).min().unwrap_or(0).min(self.cert_n.0);
        let n_hi = self.entries.keys().map(|&(n, _)| n).max().unwrap_or(0).max(self.cert_n.1.min(0));
        let _ = write!(s, "{:>5} |", "n\\d");
        for d in d_lo..=d_hi {
            let _ = write!(s, "{d:>5}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{}", "-".repeat(7 + 5 * (d_hi - d_lo + 1) as usize));
        for n in n_lo..=n_hi {
            let _ = write!(s, "{n:>5} |");
            for d in d_lo..=d_hi {
                let v = self.get(n, d);
                let cell = if self.is_certified(n, d) {
                    format!("{v}")
                } else {
                    format!("{v}?")
                };
                let _ = write!(s, "{cell:>5}");
            }
            let _ = writeln!(s);
        }
        s
    }

    /// TSV: rows n, columns d, over the full window.
    pub fn render_tsv(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = write!(s, "n\\d");
        for d in self.d_range.0..=self.d_range.1 {
            let _ = write!(s, "\t{d}");
        }
        let _ = writeln!(s);
        for n in self.n_range.0..=self.n_range.1 {
            let _ = write!(s, "{n}");
            for d in self.d_range.0..=self.d_range.1 {
                let v = self.get(n, d);
                if self.is_certified(n, d) {
                    let _ = write!(s, "\t{v}");
                } else {
                    let _ = write!(s, "\t{v}?");
                }
            }
            let _ = writeln!(s);
        }
        s
    }
}

impl fmt::Display for DimTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DimTable {
        let mut t = DimTable::empty((-4, 4), (0, 6));
        t.cert_n = (-3, 3);
        t.set(0, 0, 1);
        t.set(0, 1, 2);
        t.set(-4, 2, 7);
        t
    }

    #[test]
    fn totals_respect_certification_and_margins() {
        let t = sample();
        assert_eq!(t.total_at(0), Some(3));
        assert_eq!(t.total_at(-4), None); // uncertified row
        let mut edge = sample();
        edge.set(1, 6, 5); // touches d_max
        assert_eq!(edge.total_at(1), None);
        assert_eq!(edge.total_at(0), Some(3));
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let t = sample();
        let s = serde_json::to_string(&t).unwrap();
        let back: DimTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn certified_zero_ignores_uncertified_entries() {
        let mut t = DimTable::empty((-2, 2), (0, 4));
        t.cert_n = (-1, 1);
        t.set(-2, 0, 3);
        assert!(t.certified_zero());
        t.set(0, 0, 1);
        assert!(!t.certified_zero());
    }
}
