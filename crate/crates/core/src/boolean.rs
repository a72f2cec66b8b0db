//! Boolean relations, structures, instances and functions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::minor::MinorMap;

pub type Tuple = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RelationJson", into = "RelationJson")]
pub struct BooleanRelation {
    arity: usize,
    tuples: Vec<Tuple>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationJson {
    arity: usize,
    tuples: Vec<Tuple>,
}

impl TryFrom<RelationJson> for BooleanRelation {
    type Error = String;
    fn try_from(j: RelationJson) -> std::result::Result<Self, String> {
        BooleanRelation::new(j.arity, j.tuples).map_err(|e| e.to_string())
    }
}

impl From<BooleanRelation> for RelationJson {
    fn from(r: BooleanRelation) -> Self {
        RelationJson {
            arity: r.arity,
            tuples: r.tuples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Nae(usize),
    KInL(usize, usize),
    BuiltinR,
    Builtin2In4,
}

fn bits(x: u64, k: usize) -> Tuple {
    (0..k).map(|i| ((x >> (k - 1 - i)) & 1) as u8).collect()
}

fn from_strs(rows: &[&str]) -> Vec<Tuple> {
    rows.iter()
        .map(|s| s.bytes().map(|b| b - b'0').collect())
        .collect()
}

impl BooleanRelation {
    /// Builds a relation; duplicates are removed and tuples sorted.
    pub fn new(arity: usize, tuples: Vec<Tuple>) -> Result<Self> {
        if arity == 0 {
            return param("relation arity must be positive");
        }
        for (i, t) in tuples.iter().enumerate() {
            if t.len() != arity {
                return param(format!(
                    "tuple {i} has length {}, expected arity {arity}",
                    t.len()
                ));
            }
            if t.iter().any(|&b| b > 1) {
                return param(format!("tuple {i} has a non-Boolean entry"));
            }
        }
        let set: BTreeSet<Tuple> = tuples.into_iter().collect();
        Ok(BooleanRelation {
            arity,
            tuples: set.into_iter().collect(),
        })
    }

    pub fn make(kind: RelationKind) -> Result<Self> {
        match kind {
            RelationKind::Nae(k) => {
                if k == 0 || k > 63 {
                    return param(format!("NAE arity {k} out of range"));
                }
                let full = (1u64 << k) - 1;
                BooleanRelation::new(
                    k,
                    (0..=full)
                        .filter(|&x| x != 0 && x != full)
                        .map(|x| bits(x, k))
                        .collect(),
                )
            }
            RelationKind::KInL(k, l) => {
                if l == 0 || k > l || l > 63 {
                    return param(format!("invalid k-in-l parameters k={k}, l={l}"));
                }
                BooleanRelation::new(
                    l,
                    (0..1u64 << l)
                        .filter(|x| x.count_ones() as usize == k)
                        .map(|x| bits(x, l))
                        .collect(),
                )
            }
            RelationKind::BuiltinR => BooleanRelation::new(
                6,
                from_strs(&["101010", "010101", "110000", "001100", "000011"]),
            ),
            RelationKind::Builtin2In4 => BooleanRelation::make(RelationKind::KInL(2, 4)),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[u8]) -> bool {
        self.tuples
            .binary_search_by(|x| x.as_slice().cmp(t))
            .is_ok()
    }

    /// Identifies positions according to `pattern`; codomain positions outside
    /// the image are unconstrained.
    pub fn identify_coordinates(&self, pattern: &MinorMap) -> Result<BooleanRelation> {
        if pattern.from_arity() != self.arity {
            return param(format!(
                "pattern has domain {}, relation arity is {}",
                pattern.from_arity(),
                self.arity
            ));
        }
        let m = pattern.to_arity();
        let free: Vec<usize> = (1..=m)
            .filter(|&j| pattern.preimage(j).is_empty())
            .collect();
        let mut out = Vec::new();
        'tuples: for t in &self.tuples {
            let mut img: Vec<Option<u8>> = vec![None; m];
            for (p, &b) in t.iter().enumerate() {
                let slot = &mut img[pattern.apply(p + 1) - 1];
                match *slot {
                    Some(v) if v != b => continue 'tuples,
                    _ => *slot = Some(b),
                }
            }
            for fill in 0..1u64 << free.len() {
                let mut s: Tuple = img.iter().map(|v| v.unwrap_or(0)).collect();
                for (k, &j) in free.iter().enumerate() {
                    s[j - 1] = ((fill >> k) & 1) as u8;
                }
                out.push(s);
            }
        }
        BooleanRelation::new(m, out)
    }

    /// Smallest superset closed under componentwise application of `fns`.
    pub fn close(&self, fns: &[BooleanFunction]) -> BooleanRelation {
        let mut set: BTreeSet<Tuple> = self.tuples.iter().cloned().collect();
        loop {
            let current: Vec<Tuple> = set.iter().cloned().collect();
            let mut grew = false;
            for f in fns {
                for_each_choice(current.len(), f.arity(), |choice| {
                    let t = apply_columnwise(f, &current, choice, self.arity);
                    if set.insert(t) {
                        grew = true;
                    }
                });
            }
            if !grew {
                break;
            }
        }
        BooleanRelation {
            arity: self.arity,
            tuples: set.into_iter().collect(),
        }
    }
}

/// Calls `visit` on every sequence in `[0, base)^len`, last position fastest.
pub(crate) fn for_each_choice(base: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    if base == 0 && len > 0 {
        return;
    }
    let mut cur = vec![0usize; len];
    loop {
        visit(&cur);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < base {
                break;
            }
            cur[k] = 0;
        }
    }
}

fn apply_columnwise(f: &BooleanFunction, tuples: &[Tuple], choice: &[usize], k: usize) -> Tuple {
    (0..k)
        .map(|p| {
            let idx = choice
                .iter()
                .enumerate()
                .fold(0usize, |acc, (c, &t)| acc | ((tuples[t][p] as usize) << c));
            f.value_at(idx) as u8
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BooleanStructure {
    pub relations: Vec<BooleanRelation>,
}

impl BooleanStructure {
    pub fn new(relations: Vec<BooleanRelation>) -> Self {
        BooleanStructure { relations }
    }

    pub fn signature(&self) -> Vec<usize> {
        self.relations.iter().map(|r| r.arity()).collect()
    }
}

/// The left template of the ST pair: `(R, 2-in-4)`.
pub fn st_left() -> BooleanStructure {
    BooleanStructure::new(vec![
        BooleanRelation::make(RelationKind::BuiltinR).unwrap(),
        BooleanRelation::make(RelationKind::Builtin2In4).unwrap(),
    ])
}

/// The right template of the ST pair: `(NAE6, NAE4)`.
pub fn st_right() -> BooleanStructure {
    BooleanStructure::new(vec![
        BooleanRelation::make(RelationKind::Nae(6)).unwrap(),
        BooleanRelation::make(RelationKind::Nae(4)).unwrap(),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub scope: Vec<usize>,
    /// 0-based position in the template's relation list.
    pub relation: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct Instance {
    variables: usize,
    constraints: Vec<Constraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    variables: usize,
    constraints: Vec<Constraint>,
}

impl TryFrom<InstanceJson> for Instance {
    type Error = String;
    fn try_from(j: InstanceJson) -> std::result::Result<Self, String> {
        Instance::new(j.variables, j.constraints).map_err(|e| e.to_string())
    }
}

impl From<Instance> for InstanceJson {
    fn from(i: Instance) -> Self {
        InstanceJson {
            variables: i.variables,
            constraints: i.constraints,
        }
    }
}

impl Instance {
    pub fn new(variables: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if variables == 0 {
            return param("instance needs at least one variable");
        }
        for (i, c) in constraints.iter().enumerate() {
            if let Some(&v) = c.scope.iter().find(|&&v| v == 0 || v > variables) {
                return Err(Error::Index(format!(
                    "constraint {i}: variable {v} outside [1, {variables}]"
                )));
            }
        }
        Ok(Instance {
            variables,
            constraints,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Checks scope lengths against the arities of `target`.
    pub fn check_signature(&self, target: &BooleanStructure) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            let r = target.relations.get(c.relation).ok_or_else(|| {
                Error::Structural(format!(
                    "constraint {i} refers to missing relation {}",
                    c.relation
                ))
            })?;
            if r.arity() != c.scope.len() {
                return Err(Error::Structural(format!(
                    "constraint {i}: scope length {} but relation {} has arity {}",
                    c.scope.len(),
                    c.relation,
                    r.arity()
                )));
            }
        }
        Ok(())
    }
}

/// `h[v - 1]` is the value of variable `v`.
pub fn is_homomorphism(h: &[u8], inst: &Instance, target: &BooleanStructure) -> Result<bool> {
    if h.len() != inst.variable_count() {
        return param(format!(
            "assignment has {} values for {} variables",
            h.len(),
            inst.variable_count()
        ));
    }
    inst.check_signature(target)?;
    Ok(inst.constraints().iter().all(|c| {
        let t: Tuple = c.scope.iter().map(|&v| h[v - 1]).collect();
        target.relations[c.relation].contains(&t)
    }))
}

pub fn is_polymorphism(
    f: &BooleanFunction,
    a: &BooleanStructure,
    b: &BooleanStructure,
) -> Result<bool> {
    if a.signature() != b.signature() {
        return Err(Error::Structural(format!(
            "signatures differ: {:?} vs {:?}",
            a.signature(),
            b.signature()
        )));
    }
    for (ra, rb) in a.relations.iter().zip(&b.relations) {
        let mut ok = true;
        for_each_choice(ra.len(), f.arity(), |choice| {
            if ok && !rb.contains(&apply_columnwise(f, ra.tuples(), choice, ra.arity())) {
                ok = false;
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A Boolean function by truth table; input bit `i - 1` of the index is coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FunctionJson", into = "FunctionJson")]
pub struct BooleanFunction {
    arity: usize,
    table: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionJson {
    arity: usize,
    table: String,
}

impl TryFrom<FunctionJson> for BooleanFunction {
    type Error = String;
    fn try_from(j: FunctionJson) -> std::result::Result<Self, String> {
        let table = j
            .table
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(format!("table[{i}] is {c:?}, expected '0' or '1'")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        BooleanFunction::new(j.arity, table).map_err(|e| e.to_string())
    }
}

impl From<BooleanFunction> for FunctionJson {
    fn from(f: BooleanFunction) -> Self {
        FunctionJson {
            arity: f.arity,
            table: f.table.iter().map(|&b| if b { '1' } else { '0' }).collect(),
        }
    }
}

pub const MAX_TABLE_ARITY: usize = 26;

impl BooleanFunction {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<Self> {
        if arity == 0 || arity > MAX_TABLE_ARITY {
            return param(format!(
                "function arity {arity} outside [1, {MAX_TABLE_ARITY}]"
            ));
        }
        if table.len() != 1 << arity {
            return param(format!(
                "table has length {}, expected {}",
                table.len(),
                1usize << arity
            ));
        }
        Ok(BooleanFunction { arity, table })
    }

    pub fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if arity == 0 || arity > MAX_TABLE_ARITY {
            return param(format!(
                "function arity {arity} outside [1, {MAX_TABLE_ARITY}]"
            ));
        }
        Ok(BooleanFunction {
            arity,
            table: (0..1usize << arity).map(f).collect(),
        })
    }

    /// Builds the function whose table is the low `2^arity` bits of `bits`.
    pub fn from_bits(arity: usize, bits: u64) -> Result<Self> {
        if arity > 6 {
            return param("from_bits supports arity at most 6");
        }
        Self::from_fn(arity, |x| (bits >> x) & 1 == 1)
    }

    pub fn projection(arity: usize, i: usize) -> Result<Self> {
        if i == 0 || i > arity {
            return param(format!("projection coordinate {i} outside [1, {arity}]"));
        }
        Self::from_fn(arity, |x| (x >> (i - 1)) & 1 == 1)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn value_at(&self, index: usize) -> bool {
        self.table[index]
    }

    /// Evaluates on a 0/1 input listed by coordinate.
    pub fn eval(&self, x: &[u8]) -> bool {
        let idx = x
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i));
        self.table[idx]
    }

    pub fn is_idempotent(&self) -> bool {
        !self.table[0] && self.table[self.table.len() - 1]
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&b| b == self.table[0])
    }

    /// `g(x_1..x_m) = f(x_pi(1), ..., x_pi(n))`.
    pub fn minor(&self, pi: &MinorMap) -> Result<BooleanFunction> {
        if pi.from_arity() != self.arity {
            return param(format!(
                "minor map from [{}] applied to arity {}",
                pi.from_arity(),
                self.arity
            ));
        }
        let shifts: Vec<usize> = pi.as_slice().iter().map(|&v| v - 1).collect();
        BooleanFunction::from_fn(pi.to_arity(), |y| {
            let idx = shifts
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &s)| acc | (((y >> s) & 1) << j));
            self.table[idx]
        })
    }

    /// The minor `f(x, x, ..., x)`.
    pub fn unary_minor(&self) -> BooleanFunction {
        self.minor(&MinorMap::new(1, vec![1; self.arity]).unwrap())
            .unwrap()
    }

    /// Identifies coordinate `j` into `i`; the result has arity `n - 1`,
    /// with coordinates above `j` shifted down by one.
    pub fn identify(&self, i: usize, j: usize) -> Result<(BooleanFunction, MinorMap)> {
        let n = self.arity;
        if i == j || i == 0 || j == 0 || i > n || j > n || n < 2 {
            return param(format!("cannot identify {j} into {i} at arity {n}"));
        }
        let squash = |k: usize| if k > j { k - 1 } else { k };
        let map: Vec<usize> = (1..=n)
            .map(|k| if k == j { squash(i) } else { squash(k) })
            .collect();
        let pi = MinorMap::new(n - 1, map)?;
        Ok((self.minor(&pi)?, pi))
    }

    /// Whether the output is invariant under swapping coordinates `i` and `j`.
    pub fn symmetric_in(&self, i: usize, j: usize) -> bool {
        let (bi, bj) = (1usize << (i - 1), 1usize << (j - 1));
        (0..self.table.len()).all(|x| {
            let (a, b) = (x & bi != 0, x & bj != 0);
            if a == b {
                return true;
            }
            self.table[x] == self.table[x ^ bi ^ bj]
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.table.len()).all(|x| self.table[x] == self.table[(1usize << x.count_ones()) - 1])
    }

    pub fn depends_on(&self, i: usize) -> bool {
        let b = 1usize << (i - 1);
        (0..self.table.len()).any(|x| x & b == 0 && self.table[x] != self.table[x | b])
    }

    /// A stable key: arity and table as hex, most significant nibble first.
    pub fn digest(&self) -> String {
        let mut nibbles = Vec::new();
        for chunk in self.table.chunks(4) {
            let v = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << k));
            nibbles.push(char::from_digit(v as u32, 16).unwrap());
        }
        nibbles.reverse();
        format!("{}:{}", self.arity, nibbles.into_iter().collect::<String>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(arity: usize, rows: &[&str]) -> BooleanRelation {
        BooleanRelation::new(arity, from_strs(rows)).unwrap()
    }

    #[test]
    fn nae_and_k_in_l() {
        let nae3 = BooleanRelation::make(RelationKind::Nae(3)).unwrap();
        assert_eq!(nae3.len(), 6);
        assert!(!nae3.contains(&[0, 0, 0]) && !nae3.contains(&[1, 1, 1]));
        assert!(BooleanRelation::make(RelationKind::Nae(1))
            .unwrap()
            .is_empty());
        assert_eq!(
            BooleanRelation::make(RelationKind::Builtin2In4)
                .unwrap()
                .len(),
            6
        );
        assert!(BooleanRelation::make(RelationKind::KInL(4, 3)).is_err());
        let r = BooleanRelation::make(RelationKind::BuiltinR).unwrap();
        assert_eq!(
            r,
            rel(6, &["101010", "010101", "110000", "001100", "000011"])
        );
    }

    #[test]
    fn homomorphisms() {
        let nae2 =
            BooleanStructure::new(vec![BooleanRelation::make(RelationKind::Nae(2)).unwrap()]);
        let inst = Instance::new(
            2,
            vec![Constraint {
                scope: vec![1, 2],
                relation: 0,
            }],
        )
        .unwrap();
        assert!(is_homomorphism(&[0, 1], &inst, &nae2).unwrap());
        assert!(!is_homomorphism(&[0, 0], &inst, &nae2).unwrap());
        let one = BooleanStructure::new(vec![
            BooleanRelation::make(RelationKind::KInL(1, 3)).unwrap()
        ]);
        let inst3 = Instance::new(
            3,
            vec![Constraint {
                scope: vec![1, 2, 3],
                relation: 0,
            }],
        )
        .unwrap();
        assert!(is_homomorphism(&[1, 0, 0], &inst3, &one).unwrap());
        assert!(matches!(
            is_homomorphism(&[1, 0], &inst, &one),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn st_polymorphisms() {
        let neg = BooleanFunction::from_bits(1, 0b01).unwrap();
        assert!(is_polymorphism(&neg, &st_left(), &st_right()).unwrap());
        let constant = BooleanFunction::from_bits(1, 0b00).unwrap();
        assert!(!is_polymorphism(&constant, &st_left(), &st_right()).unwrap());
        // weak (1,2,-2 | 0): value 1 iff x1 + 2 x2 - 2 x3 > 0
        let f = BooleanFunction::from_fn(3, |x| {
            let b = |i: usize| ((x >> i) & 1) as i32;
            b(0) + 2 * b(1) - 2 * b(2) > 0
        })
        .unwrap();
        assert!(is_polymorphism(&f, &st_left(), &st_right()).unwrap());
        let dissimilar = BooleanStructure::new(vec![]);
        assert!(is_polymorphism(&f, &st_left(), &dissimilar).is_err());
    }

    #[test]
    fn gadgets() {
        let two = BooleanRelation::make(RelationKind::Builtin2In4).unwrap();
        let p = MinorMap::new(2, vec![1, 1, 2, 2]).unwrap();
        assert_eq!(
            two.identify_coordinates(&p).unwrap(),
            BooleanRelation::make(RelationKind::Nae(2)).unwrap()
        );
        let r = BooleanRelation::make(RelationKind::BuiltinR).unwrap();
        let p = MinorMap::new(3, vec![1, 1, 2, 2, 3, 3]).unwrap();
        assert_eq!(
            r.identify_coordinates(&p).unwrap(),
            BooleanRelation::make(RelationKind::KInL(1, 3)).unwrap()
        );
        assert_eq!(r.identify_coordinates(&MinorMap::identity(6)).unwrap(), r);
    }

    #[test]
    fn closures() {
        let one = BooleanRelation::make(RelationKind::KInL(1, 3)).unwrap();
        let projs: Vec<_> = (1..=3)
            .map(|i| BooleanFunction::projection(3, i).unwrap())
            .collect();
        assert_eq!(one.close(&projs), one);
        let thr: Vec<_> = [1usize, 3, 5]
            .iter()
            .map(|&n| BooleanFunction::from_fn(n, |x| 2 * x.count_ones() as usize > n).unwrap())
            .collect();
        assert_eq!(one.close(&thr), rel(3, &["000", "001", "010", "100"]));
        let nae2 = BooleanRelation::make(RelationKind::Nae(2)).unwrap();
        assert_eq!(
            nae2.close(&[BooleanFunction::from_bits(1, 0b01).unwrap()]),
            nae2
        );
    }

    #[test]
    fn minors_and_identification() {
        // f = x1 AND NOT x2
        let f = BooleanFunction::from_bits(2, 0b0010).unwrap();
        let swap = MinorMap::new(2, vec![2, 1]).unwrap();
        assert_eq!(
            f.minor(&swap).unwrap(),
            BooleanFunction::from_bits(2, 0b0100).unwrap()
        );
        assert!(f.unary_minor().is_constant());
        let maj = BooleanFunction::from_fn(3, |x| x.count_ones() >= 2).unwrap();
        let (g, _) = maj.identify(1, 3).unwrap();
        assert_eq!(g, BooleanFunction::projection(2, 1).unwrap());
        assert!(maj.is_symmetric() && !f.is_symmetric());
        assert_eq!(maj.digest(), "3:e8");
    }

    #[test]
    fn relation_json_validation() {
        let bad = r#"{"arity":3,"tuples":[[0,1,0],[1,1]]}"#;
        let err = serde_json::from_str::<BooleanRelation>(bad)
            .unwrap_err()
            .to_string();
        assert!(err.contains("tuple 1"), "{err}");
    }
}
