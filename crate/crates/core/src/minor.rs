//! Minor maps `pi: [n] -> [m]`, stored 1-based.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MinorMapJson", into = "MinorMapJson")]
pub struct MinorMap {
    to: usize,
    map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MinorMapJson {
    from: usize,
    to: usize,
    map: Vec<usize>,
}

impl TryFrom<MinorMapJson> for MinorMap {
    type Error = String;
    fn try_from(j: MinorMapJson) -> std::result::Result<Self, String> {
        if j.map.len() != j.from {
            return Err(format!(
                "map has {} entries, from is {}",
                j.map.len(),
                j.from
            ));
        }
        MinorMap::new(j.to, j.map).map_err(|e| e.to_string())
    }
}

impl From<MinorMap> for MinorMapJson {
    fn from(m: MinorMap) -> Self {
        MinorMapJson {
            from: m.map.len(),
            to: m.to,
            map: m.map,
        }
    }
}

impl MinorMap {
    pub fn new(to: usize, map: Vec<usize>) -> Result<Self> {
        for (i, &v) in map.iter().enumerate() {
            if v == 0 || v > to {
                return param(format!("map[{i}] = {v} is outside [1, {to}]"));
            }
        }
        Ok(MinorMap { to, map })
    }

    pub fn identity(n: usize) -> Self {
        MinorMap {
            to: n,
            map: (1..=n).collect(),
        }
    }

    pub fn from_arity(&self) -> usize {
        self.map.len()
    }

    pub fn to_arity(&self) -> usize {
        self.to
    }

    /// Image of the 1-based coordinate `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &MinorMap) -> Result<MinorMap> {
        if other.from_arity() != self.to {
            return param(format!(
                "cannot compose map into [{}] with map from [{}]",
                self.to,
                other.from_arity()
            ));
        }
        Ok(MinorMap {
            to: other.to,
            map: self.map.iter().map(|&v| other.apply(v)).collect(),
        })
    }

    pub fn image<'a>(&self, coords: impl IntoIterator<Item = &'a usize>) -> Vec<usize> {
        let mut out: Vec<usize> = coords.into_iter().map(|&i| self.apply(i)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn preimage(&self, j: usize) -> Vec<usize> {
        (1..=self.map.len())
            .filter(|&i| self.apply(i) == j)
            .collect()
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.to];
        for &v in &self.map {
            hit[v - 1] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective_on(&self, coords: &[usize]) -> bool {
        self.image(coords).len() == {
            let mut c = coords.to_vec();
            c.sort_unstable();
            c.dedup();
            c.len()
        }
    }
}

/// Every map `[n] -> [m]` in lexicographic order of `(pi(1), ..., pi(n))`.
pub struct AllMaps {
    n: usize,
    m: usize,
    cur: Option<Vec<usize>>,
}

impl AllMaps {
    pub fn new(n: usize, m: usize) -> Self {
        let cur = if m == 0 && n > 0 {
            None
        } else {
            Some(vec![1; n])
        };
        AllMaps { n, m, cur }
    }
}

impl Iterator for AllMaps {
    type Item = MinorMap;
    fn next(&mut self) -> Option<MinorMap> {
        let cur = self.cur.as_mut()?;
        let out = MinorMap {
            to: self.m,
            map: cur.clone(),
        };
        let mut k = self.n;
        loop {
            if k == 0 {
                self.cur = None;
                break;
            }
            k -= 1;
            if cur[k] < self.m {
                cur[k] += 1;
                break;
            }
            cur[k] = 1;
        }
        Some(out)
    }
}

/// Set partitions of `[n]` as restricted growth strings, yielded as surjective maps.
pub fn set_partitions(n: usize) -> Vec<MinorMap> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<MinorMap>) {
        if i == n {
            out.push(MinorMap {
                to: max,
                map: cur.clone(),
            });
            return;
        }
        for b in 1..=max + 1 {
            cur.push(b);
            rec(i + 1, n, cur, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), 0, &mut out);
    out
}
