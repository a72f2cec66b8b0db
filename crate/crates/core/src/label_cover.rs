//! Bipartite and layered label cover, the layering construction, chains and
//! weak satisfaction, and the translation into minor conditions.
//!
//! Variables and labels are 1-based in JSON and in the public API.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_capacity, invariant, param, Error, Result};
use crate::minor::MinorMap;
use crate::rational::{int, Rational};

pub const SMOOTHNESS_CAP: u128 = 50_000_000;
pub const LAYERIZE_CAP: u128 = 20_000_000;
pub const CHAIN_CAP: u128 = 10_000_000;
pub const TRIVIALITY_NODE_CAP: u128 = 10_000_000;

fn structural<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Structural(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcEdge {
    pub y: usize,
    pub z: usize,
    pub pi: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BipartiteJson {
    y: usize,
    z: usize,
    l: usize,
    r: usize,
    edges: Vec<LcEdge>,
}

/// A biregular bipartite instance with constraints `pi_{y -> z} : [l] -> [r]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BipartiteJson", into = "BipartiteJson")]
pub struct BipartiteLC {
    y: usize,
    z: usize,
    l: usize,
    r: usize,
    edges: Vec<LcEdge>,
}

impl TryFrom<BipartiteJson> for BipartiteLC {
    type Error = Error;
    fn try_from(j: BipartiteJson) -> Result<Self> {
        BipartiteLC::new(j.y, j.z, j.l, j.r, j.edges)
    }
}

impl From<BipartiteLC> for BipartiteJson {
    fn from(g: BipartiteLC) -> Self {
        BipartiteJson {
            y: g.y,
            z: g.z,
            l: g.l,
            r: g.r,
            edges: g.edges,
        }
    }
}

fn all_equal(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

impl BipartiteLC {
    /// Edges are sorted by `(y, z)`; duplicates and non-biregular graphs are rejected.
    pub fn new(y: usize, z: usize, l: usize, r: usize, mut edges: Vec<LcEdge>) -> Result<Self> {
        if l == 0 || r == 0 {
            return param("label domains must be positive");
        }
        let mut dy = vec![0; y];
        let mut dz = vec![0; z];
        for (k, e) in edges.iter().enumerate() {
            if e.y == 0 || e.y > y || e.z == 0 || e.z > z {
                return structural(format!(
                    "edge {k} joins ({}, {}) outside {y} x {z}",
                    e.y, e.z
                ));
            }
            if e.pi.len() != l || e.pi.iter().any(|&b| b == 0 || b > r) {
                return structural(format!("edge {k} constraint is not a map [{l}] -> [{r}]"));
            }
            dy[e.y - 1] += 1;
            dz[e.z - 1] += 1;
        }
        edges.sort_by_key(|e| (e.y, e.z));
        if edges
            .windows(2)
            .any(|w| (w[0].y, w[0].z) == (w[1].y, w[1].z))
        {
            return structural("duplicate edge");
        }
        if !all_equal(&dy) || !all_equal(&dz) {
            return structural("graph is not biregular");
        }
        Ok(BipartiteLC { y, z, l, r, edges })
    }

    pub fn y_count(&self) -> usize {
        self.y
    }

    pub fn z_count(&self) -> usize {
        self.z
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[LcEdge] {
        &self.edges
    }

    /// Neighbors of each `y` (0-based) as edge indices, ascending in `z`.
    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.y];
        for (k, e) in self.edges.iter().enumerate() {
            out[e.y - 1].push(k);
        }
        out
    }

    pub fn is_satisfied_by(&self, sigma: &LcAssignment) -> Result<bool> {
        sigma.check(self)?;
        Ok(self
            .edges
            .iter()
            .all(|e| e.pi[sigma.y[e.y - 1] - 1] == sigma.z[e.z - 1]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcAssignment {
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

impl LcAssignment {
    fn check(&self, g: &BipartiteLC) -> Result<()> {
        if self.y.len() != g.y || self.z.len() != g.z {
            return param("assignment does not cover the variables");
        }
        if self.y.iter().any(|&a| a == 0 || a > g.l) || self.z.iter().any(|&b| b == 0 || b > g.r) {
            return param("assignment label out of range");
        }
        Ok(())
    }
}

/// Calls `visit` on every `k`-subset of `0..n`, in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return;
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn subset_count(n: usize, max: usize) -> u128 {
    (2..=max).map(|k| binomial(n, k)).sum()
}

fn shrinks(map: impl Fn(usize) -> usize, set: &[usize], buf: &mut Vec<usize>) -> bool {
    buf.clear();
    buf.extend(set.iter().map(|&a| map(a)));
    buf.sort_unstable();
    buf.dedup();
    buf.len() < set.len()
}

/// Least `delta` with `Pr_z[|pi_{y->z}(S)| < |S|] <= delta |S|^2` for every `y`
/// and every `S` of size at most `max_set_size`. Exact enumeration.
pub fn measure_smoothness(g: &BipartiteLC, max_set_size: usize) -> Result<Rational> {
    if max_set_size < 2 {
        return param("set size bound must be at least 2");
    }
    let work = g.edges.len() as u128 * subset_count(g.l, max_set_size);
    check_capacity("smoothness enumeration", work, SMOOTHNESS_CAP)?;
    let nbrs = g.neighbors();
    let mut best = Rational::zero();
    let mut buf = Vec::new();
    for list in nbrs.iter().filter(|n| !n.is_empty()) {
        for k in 2..=max_set_size.min(g.l) {
            for_each_subset(g.l, k, |set| {
                let bad = list
                    .iter()
                    .filter(|&&e| shrinks(|a| g.edges[e].pi[a], set, &mut buf))
                    .count();
                let v = Rational::new((bad as i64).into(), ((list.len() * k * k) as i64).into());
                if v > best {
                    best = v;
                }
            });
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub size: usize,
    pub domain: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// Edge from variable `a` of layer `i` to variable `b` of layer `j`, `i < j`,
/// with constraint `phi : [c_i] -> [c_j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerEdge {
    pub i: usize,
    pub a: usize,
    pub j: usize,
    pub b: usize,
    pub phi: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayeredJson {
    layers: Vec<Layer>,
    edges: Vec<LayerEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayeredJson", into = "LayeredJson")]
pub struct LayeredLC {
    layers: Vec<Layer>,
    edges: Vec<LayerEdge>,
    #[serde(skip)]
    lookup: HashMap<(usize, usize, usize, usize), usize>,
    #[serde(skip)]
    adjacent: HashMap<(usize, usize, usize), Vec<usize>>,
}

impl TryFrom<LayeredJson> for LayeredLC {
    type Error = Error;
    fn try_from(j: LayeredJson) -> Result<Self> {
        LayeredLC::new(j.layers, j.edges)
    }
}

impl From<LayeredLC> for LayeredJson {
    fn from(p: LayeredLC) -> Self {
        LayeredJson {
            layers: p.layers,
            edges: p.edges,
        }
    }
}

impl LayeredLC {
    /// Checks ranges, constraint maps and biregularity of every layer pair.
    /// Transitivity is a separate check, see [`LayeredLC::is_transitive`].
    pub fn new(layers: Vec<Layer>, mut edges: Vec<LayerEdge>) -> Result<Self> {
        if layers.is_empty() {
            return param("no layers");
        }
        for (k, layer) in layers.iter().enumerate() {
            if layer.domain == 0 {
                return param(format!("layer {} has an empty domain", k + 1));
            }
            if layer.names.as_ref().is_some_and(|n| n.len() != layer.size) {
                return structural(format!("layer {} names do not match its size", k + 1));
            }
        }
        let n = layers.len();
        for (k, e) in edges.iter().enumerate() {
            if e.i == 0 || e.i >= e.j || e.j > n {
                return structural(format!("edge {k} goes from layer {} to layer {}", e.i, e.j));
            }
            if e.a == 0 || e.a > layers[e.i - 1].size || e.b == 0 || e.b > layers[e.j - 1].size {
                return structural(format!("edge {k} endpoint out of range"));
            }
            let (ci, cj) = (layers[e.i - 1].domain, layers[e.j - 1].domain);
            if e.phi.len() != ci || e.phi.iter().any(|&v| v == 0 || v > cj) {
                return structural(format!("edge {k} constraint is not a map [{ci}] -> [{cj}]"));
            }
        }
        edges.sort_by_key(|e| (e.i, e.j, e.a, e.b));
        let mut lookup = HashMap::new();
        let mut adjacent: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
        let mut degrees: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                degrees.insert(
                    (i, j),
                    (vec![0; layers[i - 1].size], vec![0; layers[j - 1].size]),
                );
            }
        }
        for (k, e) in edges.iter().enumerate() {
            if lookup.insert((e.i, e.a, e.j, e.b), k).is_some() {
                return structural(format!(
                    "duplicate edge ({}, {}) -> ({}, {})",
                    e.i, e.a, e.j, e.b
                ));
            }
            adjacent.entry((e.i, e.a, e.j)).or_default().push(k);
            let d = degrees.get_mut(&(e.i, e.j)).unwrap();
            d.0[e.a - 1] += 1;
            d.1[e.b - 1] += 1;
        }
        for ((i, j), (left, right)) in &degrees {
            if !all_equal(left) || !all_equal(right) {
                return structural(format!(
                    "edges between layers {i} and {j} are not biregular"
                ));
            }
        }
        Ok(LayeredLC {
            layers,
            edges,
            lookup,
            adjacent,
        })
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn edges(&self) -> &[LayerEdge] {
        &self.edges
    }

    pub fn edges_between(&self, i: usize, j: usize) -> impl Iterator<Item = &LayerEdge> {
        self.edges.iter().filter(move |e| e.i == i && e.j == j)
    }

    pub fn edge(&self, i: usize, a: usize, j: usize, b: usize) -> Option<&LayerEdge> {
        self.lookup.get(&(i, a, j, b)).map(|&k| &self.edges[k])
    }

    /// Edges leaving variable `a` of layer `i` towards layer `j`.
    pub fn out_edges(&self, i: usize, a: usize, j: usize) -> impl Iterator<Item = &LayerEdge> {
        self.adjacent
            .get(&(i, a, j))
            .into_iter()
            .flatten()
            .map(|&k| &self.edges[k])
    }

    /// Whether `(x_i, x_j)` and `(x_j, x_k)` being edges always gives `(x_i, x_k)`.
    pub fn is_transitive(&self) -> bool {
        self.edges.iter().all(|e| {
            (e.j + 1..=self.layers.len()).all(|k| {
                self.out_edges(e.j, e.b, k)
                    .all(|f| self.lookup.contains_key(&(e.i, e.a, k, f.b)))
            })
        })
    }

    pub fn is_satisfied_by(&self, sigma: &LayeredAssignment) -> Result<bool> {
        sigma.check(self)?;
        Ok(self.edges.iter().all(|e| edge_satisfied(e, sigma)))
    }
}

fn edge_satisfied(e: &LayerEdge, sigma: &LayeredAssignment) -> bool {
    e.phi[sigma.labels[e.i - 1][e.a - 1] - 1] == sigma.labels[e.j - 1][e.b - 1]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredAssignment {
    pub labels: Vec<Vec<usize>>,
}

impl LayeredAssignment {
    fn check(&self, p: &LayeredLC) -> Result<()> {
        if self.labels.len() != p.layers.len() {
            return param("assignment has the wrong number of layers");
        }
        for (k, (row, layer)) in self.labels.iter().zip(&p.layers).enumerate() {
            if row.len() != layer.size {
                return param(format!("assignment for layer {} has the wrong size", k + 1));
            }
            if row.iter().any(|&v| v == 0 || v > layer.domain) {
                return param(format!(
                    "assignment for layer {} has a label out of range",
                    k + 1
                ));
            }
        }
        Ok(())
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(exp as u32)
}

/// Digits of `index` in mixed radix, most significant first.
fn decode(mut index: usize, radices: &[usize], out: &mut [usize]) {
    for (d, &r) in out.iter_mut().zip(radices).rev() {
        *d = index % r;
        index /= r;
    }
}

fn encode(digits: &[usize], radices: &[usize]) -> usize {
    digits
        .iter()
        .zip(radices)
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

struct LayerShape {
    vars: Vec<usize>,
    labels: Vec<usize>,
}

fn layer_shape(g: &BipartiteLC, layers: usize, i: usize) -> LayerShape {
    let pick = |zs: usize, ys: usize| (0..layers).map(|p| if p < i { zs } else { ys }).collect();
    LayerShape {
        vars: pick(g.z, g.y),
        labels: pick(g.r, g.l),
    }
}

/// Layer `i` holds tuples of `i` right-hand variables followed by `L - i`
/// left-hand ones; labels are tuples of the matching domains. An edge from
/// layer `i` to layer `j` keeps the shared prefix, replaces each `y_k`,
/// `i < k <= j`, by a neighbor `z_k`, and applies `pi_{y_k -> z_k}` there.
pub fn layerize(g: &BipartiteLC, layers: usize) -> Result<LayeredLC> {
    if layers < 2 {
        return param("at least two layers are needed");
    }
    let too_big = || Error::Capacity {
        what: "layered instance".into(),
        needed: u128::MAX,
        cap: LAYERIZE_CAP,
    };
    let dy = g.edges.len().checked_div(g.y).unwrap_or(0);
    let mut sizes = Vec::new();
    let mut domains = Vec::new();
    for i in 1..=layers {
        let size = checked_pow(g.z, i)
            .and_then(|a| checked_pow(g.y, layers - i).and_then(|b| a.checked_mul(b)));
        let dom = checked_pow(g.r, i)
            .and_then(|a| checked_pow(g.l, layers - i).and_then(|b| a.checked_mul(b)));
        sizes.push(size.ok_or_else(too_big)?);
        domains.push(dom.ok_or_else(too_big)?);
    }
    let mut work = 0u128;
    for i in 1..=layers {
        work += sizes[i - 1] as u128 * domains[i - 1] as u128;
        for j in i + 1..=layers {
            let fan = (dy as u128)
                .checked_pow((j - i) as u32)
                .unwrap_or(u128::MAX);
            work = work.saturating_add(
                (sizes[i - 1] as u128)
                    .saturating_mul(fan)
                    .saturating_mul(domains[i - 1] as u128),
            );
        }
    }
    check_capacity("layered instance", work, LAYERIZE_CAP)?;

    let nbrs = g.neighbors();
    let shapes: Vec<LayerShape> = (1..=layers).map(|i| layer_shape(g, layers, i)).collect();
    let mut out_layers = Vec::new();
    let mut digits = vec![0; layers];
    for i in 1..=layers {
        let names = (0..sizes[i - 1])
            .map(|x| {
                decode(x, &shapes[i - 1].vars, &mut digits);
                let parts: Vec<String> = digits
                    .iter()
                    .enumerate()
                    .map(|(p, d)| format!("{}{}", if p < i { 'z' } else { 'y' }, d + 1))
                    .collect();
                parts.join(".")
            })
            .collect();
        out_layers.push(Layer {
            size: sizes[i - 1],
            domain: domains[i - 1],
            names: Some(names),
        });
    }

    let mut edges = Vec::new();
    let mut labels = vec![0; layers];
    for i in 1..=layers {
        for j in i + 1..=layers {
            let (from, to) = (&shapes[i - 1], &shapes[j - 1]);
            for x in 0..sizes[i - 1] {
                decode(x, &from.vars, &mut digits);
                let choices: Vec<&Vec<usize>> = (i..j).map(|p| &nbrs[digits[p]]).collect();
                if choices.iter().any(|c| c.is_empty()) {
                    continue;
                }
                let mut pick = vec![0usize; choices.len()];
                loop {
                    let mut target = digits.clone();
                    for (q, &c) in pick.iter().enumerate() {
                        target[i + q] = g.edges[choices[q][c]].z - 1;
                    }
                    let b = encode(&target, &to.vars);
                    let phi = (0..domains[i - 1])
                        .map(|a| {
                            decode(a, &from.labels, &mut labels);
                            for (q, &c) in pick.iter().enumerate() {
                                labels[i + q] = g.edges[choices[q][c]].pi[labels[i + q]] - 1;
                            }
                            encode(&labels, &to.labels) + 1
                        })
                        .collect();
                    edges.push(LayerEdge {
                        i,
                        a: x + 1,
                        j,
                        b: b + 1,
                        phi,
                    });
                    let Some(q) = (0..pick.len())
                        .rev()
                        .find(|&q| pick[q] + 1 < choices[q].len())
                    else {
                        break;
                    };
                    pick[q] += 1;
                    for t in pick.iter_mut().skip(q + 1) {
                        *t = 0;
                    }
                }
            }
        }
    }
    let out = LayeredLC::new(out_layers, edges)?;
    if !out.is_transitive() {
        return invariant("layered instance is not transitive");
    }
    Ok(out)
}

/// `x -> (sigma(x_1), ..., sigma(x_L))` for the output of [`layerize`].
pub fn lift_assignment(
    g: &BipartiteLC,
    layers: usize,
    sigma: &LcAssignment,
) -> Result<LayeredAssignment> {
    sigma.check(g)?;
    let mut digits = vec![0; layers];
    let mut out = Vec::new();
    for i in 1..=layers {
        let shape = layer_shape(g, layers, i);
        let size: usize = shape.vars.iter().product();
        let row = (0..size)
            .map(|x| {
                decode(x, &shape.vars, &mut digits);
                let lab: Vec<usize> = digits
                    .iter()
                    .enumerate()
                    .map(|(p, &v)| {
                        if p < i {
                            sigma.z[v] - 1
                        } else {
                            sigma.y[v] - 1
                        }
                    })
                    .collect();
                encode(&lab, &shape.labels) + 1
            })
            .collect();
        out.push(row);
    }
    Ok(LayeredAssignment { labels: out })
}

/// Least `delta` bounding, over adjacent layers `i, i + 1`, every variable of
/// layer `i` and every label set `S` with `2 <= |S| <= max_set_size`, the
/// probability that a random neighbor's constraint collapses `S`, divided by `|S|^2`.
pub fn measure_layered_smoothness(p: &LayeredLC, max_set_size: usize) -> Result<Rational> {
    if max_set_size < 2 {
        return param("set size bound must be at least 2");
    }
    let mut work = 0u128;
    for i in 1..p.layer_count() {
        let e = p.edges_between(i, i + 1).count() as u128;
        work = work
            .saturating_add(e.saturating_mul(subset_count(p.layers[i - 1].domain, max_set_size)));
    }
    check_capacity("layered smoothness enumeration", work, SMOOTHNESS_CAP)?;
    let mut best = Rational::zero();
    let mut buf = Vec::new();
    for i in 1..p.layer_count() {
        let c = p.layers[i - 1].domain;
        for a in 1..=p.layers[i - 1].size {
            let out: Vec<&LayerEdge> = p.out_edges(i, a, i + 1).collect();
            if out.is_empty() {
                continue;
            }
            for k in 2..=max_set_size.min(c) {
                for_each_subset(c, k, |set| {
                    let bad = out
                        .iter()
                        .filter(|e| shrinks(|v| e.phi[v], set, &mut buf))
                        .count();
                    let v = Rational::new((bad as i64).into(), ((out.len() * k * k) as i64).into());
                    if v > best {
                        best = v;
                    }
                });
            }
        }
    }
    Ok(best)
}

/// Every chain `(x_1, ..., x_L)`, as 1-based variable indices per layer, in
/// lexicographic order.
pub fn enumerate_chains(p: &LayeredLC) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_chain(p, |c| out.push(c.to_vec()))?;
    Ok(out)
}

fn for_each_chain(p: &LayeredLC, mut visit: impl FnMut(&[usize])) -> Result<u128> {
    fn extend(
        p: &LayeredLC,
        chain: &mut Vec<usize>,
        count: &mut u128,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        let k = chain.len();
        if k == p.layer_count() {
            *count += 1;
            check_capacity("chain enumeration", *count, CHAIN_CAP)?;
            visit(chain);
            return Ok(());
        }
        let next: Vec<usize> = p.out_edges(k, chain[k - 1], k + 1).map(|e| e.b).collect();
        for b in next {
            if (1..k).all(|i| p.lookup.contains_key(&(i, chain[i - 1], k + 1, b))) {
                chain.push(b);
                extend(p, chain, count, visit)?;
                chain.pop();
            }
        }
        Ok(())
    }
    let mut count = 0;
    let mut chain = Vec::with_capacity(p.layer_count());
    for a in 1..=p.layers[0].size {
        chain.push(a);
        extend(p, &mut chain, &mut count, &mut visit)?;
        chain.pop();
    }
    Ok(count)
}

/// Fraction of chains with at least one satisfied constraint between two of
/// their members. An instance without chains gives 1.
pub fn weak_sat_fraction(p: &LayeredLC, sigma: &LayeredAssignment) -> Result<Rational> {
    sigma.check(p)?;
    let mut good = 0u128;
    let total = for_each_chain(p, |c| {
        let hit = (0..c.len()).any(|i| {
            (i + 1..c.len())
                .any(|j| edge_satisfied(&p.edges[p.lookup[&(i + 1, c[i], j + 1, c[j])]], sigma))
        });
        if hit {
            good += 1;
        }
    })?;
    if total == 0 {
        return Ok(int(1));
    }
    Ok(Rational::new((good as i128).into(), (total as i128).into()))
}

/// `f_b ≈ f_a(pi)`: symbol `b` of layer `j` is the `pi`-minor of symbol `a` of layer `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Identity {
    pub i: usize,
    pub a: usize,
    pub j: usize,
    pub b: usize,
    pub pi: MinorMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionJson {
    arities: Vec<Vec<usize>>,
    identities: Vec<Identity>,
}

/// Function symbols grouped in layers, each with an arity, and minor identities
/// going from lower to higher layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConditionJson", into = "ConditionJson")]
pub struct MinorCondition {
    arities: Vec<Vec<usize>>,
    identities: Vec<Identity>,
}

impl TryFrom<ConditionJson> for MinorCondition {
    type Error = Error;
    fn try_from(j: ConditionJson) -> Result<Self> {
        MinorCondition::new(j.arities, j.identities)
    }
}

impl From<MinorCondition> for ConditionJson {
    fn from(c: MinorCondition) -> Self {
        ConditionJson {
            arities: c.arities,
            identities: c.identities,
        }
    }
}

impl MinorCondition {
    pub fn new(arities: Vec<Vec<usize>>, identities: Vec<Identity>) -> Result<Self> {
        if arities.iter().flatten().any(|&n| n == 0) {
            return param("symbol arities must be positive");
        }
        let n = arities.len();
        for (k, id) in identities.iter().enumerate() {
            if id.i == 0 || id.i >= id.j || id.j > n {
                return structural(format!(
                    "identity {k} goes from layer {} to layer {}",
                    id.i, id.j
                ));
            }
            let (ra, rb) = (&arities[id.i - 1], &arities[id.j - 1]);
            if id.a == 0 || id.a > ra.len() || id.b == 0 || id.b > rb.len() {
                return structural(format!("identity {k} names a missing symbol"));
            }
            if id.pi.from_arity() != ra[id.a - 1] || id.pi.to_arity() != rb[id.b - 1] {
                return structural(format!(
                    "identity {k} map does not match the symbol arities"
                ));
            }
        }
        Ok(MinorCondition {
            arities,
            identities,
        })
    }

    pub fn arities(&self) -> &[Vec<usize>] {
        &self.arities
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    /// Whether `choice` (a coordinate per symbol) makes every identity hold
    /// when each symbol is read as the chosen projection.
    pub fn holds_under(&self, choice: &[Vec<usize>]) -> bool {
        choice.len() == self.arities.len()
            && choice
                .iter()
                .zip(&self.arities)
                .all(|(c, a)| c.len() == a.len())
            && self
                .identities
                .iter()
                .all(|id| id.pi.apply(choice[id.i - 1][id.a - 1]) == choice[id.j - 1][id.b - 1])
    }
}

/// One symbol per variable, with the layer domain as arity, and one identity per edge.
pub fn to_minor_condition(p: &LayeredLC) -> MinorCondition {
    let arities = p.layers.iter().map(|l| vec![l.domain; l.size]).collect();
    let identities = p
        .edges
        .iter()
        .map(|e| Identity {
            i: e.i,
            a: e.a,
            j: e.j,
            b: e.b,
            pi: MinorMap::new(p.layers[e.j - 1].domain, e.phi.clone()).expect("validated edge"),
        })
        .collect();
    MinorCondition {
        arities,
        identities,
    }
}

/// A projection per symbol satisfying every identity, found by backtracking
/// with forward propagation along identities; `None` if there is none.
pub fn minor_condition_trivial(c: &MinorCondition) -> Result<Option<Vec<Vec<usize>>>> {
    let offsets: Vec<usize> = c
        .arities
        .iter()
        .scan(0, |acc, l| {
            let o = *acc;
            *acc += l.len();
            Some(o)
        })
        .collect();
    let total: usize = c.arities.iter().map(Vec::len).sum();
    let arity: Vec<usize> = c.arities.iter().flatten().copied().collect();
    // identities touching each symbol, as (other symbol, map index, this is the source)
    let mut touching: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); total];
    for (k, id) in c.identities.iter().enumerate() {
        let s = offsets[id.i - 1] + id.a - 1;
        let t = offsets[id.j - 1] + id.b - 1;
        touching[s].push((t, k, true));
        touching[t].push((s, k, false));
    }

    struct Search<'a> {
        c: &'a MinorCondition,
        touching: Vec<Vec<(usize, usize, bool)>>,
        arity: Vec<usize>,
        value: Vec<usize>,
        nodes: u128,
    }

    impl Search<'_> {
        /// Assigns and propagates forced values; returns the assigned symbols,
        /// or `None` after undoing them on conflict.
        fn assign(&mut self, s: usize, v: usize) -> Option<Vec<usize>> {
            let mut trail = vec![s];
            self.value[s] = v;
            let mut queue = vec![s];
            while let Some(u) = queue.pop() {
                for &(o, k, source) in &self.touching[u] {
                    let pi = &self.c.identities[k].pi;
                    let ok = if source {
                        let want = pi.apply(self.value[u]);
                        if self.value[o] == 0 {
                            self.value[o] = want;
                            trail.push(o);
                            queue.push(o);
                            true
                        } else {
                            self.value[o] == want
                        }
                    } else {
                        self.value[o] == 0 || pi.apply(self.value[o]) == self.value[u]
                    };
                    if !ok {
                        for &t in &trail {
                            self.value[t] = 0;
                        }
                        return None;
                    }
                }
            }
            Some(trail)
        }

        fn run(&mut self, from: usize) -> Result<bool> {
            let Some(s) = (from..self.value.len()).find(|&s| self.value[s] == 0) else {
                return Ok(true);
            };
            for v in 1..=self.arity[s] {
                self.nodes += 1;
                check_capacity("triviality search nodes", self.nodes, TRIVIALITY_NODE_CAP)?;
                if let Some(trail) = self.assign(s, v) {
                    if self.run(s + 1)? {
                        return Ok(true);
                    }
                    for t in trail {
                        self.value[t] = 0;
                    }
                }
            }
            Ok(false)
        }
    }

    let mut search = Search {
        c,
        touching,
        arity,
        value: vec![0; total],
        nodes: 0,
    };
    if !search.run(0)? {
        return Ok(None);
    }
    let choice: Vec<Vec<usize>> = c
        .arities
        .iter()
        .enumerate()
        .map(|(l, row)| search.value[offsets[l]..offsets[l] + row.len()].to_vec())
        .collect();
    if !c.holds_under(&choice) {
        return invariant("triviality witness fails an identity");
    }
    Ok(Some(choice))
}

/// Reads a projection choice for [`to_minor_condition`] output back as an assignment.
pub fn choice_to_assignment(choice: Vec<Vec<usize>>) -> LayeredAssignment {
    LayeredAssignment { labels: choice }
}

/// A random biregular instance: `y` left variables of degree `dy`, right side of
/// size `z` (which must divide `y * dy`, with `dy <= z`), circulant edges and random
/// constraints. With `planted`, a hidden assignment satisfies every constraint.
pub fn random_bipartite<R: Rng + ?Sized>(
    rng: &mut R,
    y: usize,
    z: usize,
    dy: usize,
    l: usize,
    r: usize,
    planted: bool,
) -> Result<(BipartiteLC, Option<LcAssignment>)> {
    if y == 0 || z == 0 || dy == 0 || dy > z || !(y * dy).is_multiple_of(z) {
        return param(format!(
            "no circulant biregular graph with y={y}, z={z}, dy={dy}"
        ));
    }
    if l == 0 || r == 0 {
        return param("label domains must be positive");
    }
    let sigma = planted.then(|| LcAssignment {
        y: (0..y).map(|_| rng.gen_range(1..=l)).collect(),
        z: (0..z).map(|_| rng.gen_range(1..=r)).collect(),
    });
    let mut zs: Vec<usize> = (0..z).collect();
    zs.shuffle(rng);
    let mut edges = Vec::new();
    for u in 0..y {
        for k in 0..dy {
            let w = zs[(u * dy + k) % z];
            let mut pi: Vec<usize> = (0..l).map(|_| rng.gen_range(1..=r)).collect();
            if let Some(s) = &sigma {
                pi[s.y[u] - 1] = s.z[w];
            }
            edges.push(LcEdge {
                y: u + 1,
                z: w + 1,
                pi,
            });
        }
    }
    Ok((BipartiteLC::new(y, z, l, r, edges)?, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complete(pis: impl Fn(usize, usize) -> Vec<usize>) -> BipartiteLC {
        let edges = (1..=2)
            .flat_map(|y| (1..=2).map(move |z| (y, z)))
            .map(|(y, z)| LcEdge {
                y,
                z,
                pi: pis(y, z),
            });
        BipartiteLC::new(2, 2, 2, 2, edges.collect()).unwrap()
    }

    #[test]
    fn validation() {
        let e = |y, z| LcEdge {
            y,
            z,
            pi: vec![1, 1],
        };
        assert!(BipartiteLC::new(2, 2, 2, 2, vec![e(1, 1), e(1, 2), e(2, 1)]).is_err());
        assert!(BipartiteLC::new(2, 2, 2, 2, vec![e(1, 1), e(1, 1)]).is_err());
        assert!(BipartiteLC::new(
            1,
            1,
            2,
            2,
            vec![LcEdge {
                y: 1,
                z: 1,
                pi: vec![1, 3]
            }]
        )
        .is_err());
        assert!(BipartiteLC::new(2, 2, 2, 2, vec![e(1, 1), e(2, 2)]).is_ok());
    }

    #[test]
    fn smoothness() {
        let bij = complete(|y, z| {
            if (y + z) % 2 == 0 {
                vec![1, 2]
            } else {
                vec![2, 1]
            }
        });
        assert_eq!(measure_smoothness(&bij, 2).unwrap(), int(0));
        let constant = complete(|y, _| if y == 1 { vec![1, 1] } else { vec![1, 2] });
        assert_eq!(measure_smoothness(&constant, 2).unwrap(), frac(1, 4));
        let half = complete(|y, z| {
            if y == 1 && z == 1 {
                vec![2, 2]
            } else {
                vec![1, 2]
            }
        });
        assert_eq!(measure_smoothness(&half, 2).unwrap(), frac(1, 8));
        assert!(measure_smoothness(&half, 1).is_err());
    }

    #[test]
    fn subsets() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(subset_count(27, 3), 351 + 2925);
    }

    #[test]
    fn layerize_sizes() {
        let g = complete(|_, _| vec![1, 2]);
        let p = layerize(&g, 2).unwrap();
        assert_eq!((p.layers()[0].size, p.layers()[1].size), (4, 4));
        assert_eq!((p.layers()[0].domain, p.layers()[1].domain), (4, 4));
        assert_eq!(p.layers()[0].names.as_ref().unwrap()[1], "z1.y2");
        assert!(p.is_transitive());
        // the chains of a two-layer instance are its edges
        assert_eq!(enumerate_chains(&p).unwrap().len(), p.edges().len());
        assert_eq!(p.edges().len(), 2 * 4);
        let c = to_minor_condition(&p);
        assert_eq!(c.identities().len(), p.edges().len());
        let q = layerize(&g, 3).unwrap();
        assert_eq!(enumerate_chains(&q).unwrap().len(), 2 * 4 * 4);
    }

    #[test]
    fn lifted_assignments_satisfy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (g, sigma) = random_bipartite(&mut rng, 3, 3, 2, 3, 2, true).unwrap();
            let sigma = sigma.unwrap();
            assert!(g.is_satisfied_by(&sigma).unwrap());
            for l in [2, 3] {
                let p = layerize(&g, l).unwrap();
                let lifted = lift_assignment(&g, l, &sigma).unwrap();
                assert!(p.is_satisfied_by(&lifted).unwrap());
                assert_eq!(weak_sat_fraction(&p, &lifted).unwrap(), int(1));
                let choice = minor_condition_trivial(&to_minor_condition(&p)).unwrap();
                assert!(choice.is_some());
            }
        }
    }

    #[test]
    fn violating_assignment() {
        let g = complete(|_, _| vec![1, 1]);
        let p = layerize(&g, 2).unwrap();
        let sigma = LayeredAssignment {
            labels: vec![vec![1; 4], vec![4; 4]],
        };
        assert_eq!(weak_sat_fraction(&p, &sigma).unwrap(), int(0));
    }

    #[test]
    fn no_edges() {
        let layer = Layer {
            size: 2,
            domain: 2,
            names: None,
        };
        let p = LayeredLC::new(vec![layer.clone(), layer], vec![]).unwrap();
        assert!(enumerate_chains(&p).unwrap().is_empty());
        let c = to_minor_condition(&p);
        assert_eq!(
            minor_condition_trivial(&c).unwrap().unwrap(),
            vec![vec![1, 1], vec![1, 1]]
        );
    }

    #[test]
    fn contradictory_constants() {
        let layer = Layer {
            size: 1,
            domain: 2,
            names: None,
        };
        let edges = vec![
            LayerEdge {
                i: 1,
                a: 1,
                j: 2,
                b: 1,
                phi: vec![1, 1],
            },
            LayerEdge {
                i: 1,
                a: 1,
                j: 3,
                b: 1,
                phi: vec![2, 2],
            },
            LayerEdge {
                i: 2,
                a: 1,
                j: 3,
                b: 1,
                phi: vec![1, 1],
            },
        ];
        let p = LayeredLC::new(vec![layer.clone(), layer.clone(), layer], edges).unwrap();
        assert!(p.is_transitive());
        assert_eq!(
            minor_condition_trivial(&to_minor_condition(&p)).unwrap(),
            None
        );
    }

    #[test]
    fn single_identity() {
        let layer = Layer {
            size: 1,
            domain: 3,
            names: None,
        };
        let edge = LayerEdge {
            i: 1,
            a: 1,
            j: 2,
            b: 1,
            phi: vec![2, 3, 1],
        };
        let p = LayeredLC::new(vec![layer.clone(), layer], vec![edge]).unwrap();
        let c = to_minor_condition(&p);
        assert_eq!(c.identities().len(), 1);
        assert_eq!(
            minor_condition_trivial(&c).unwrap().unwrap(),
            vec![vec![1], vec![2]]
        );
    }

    #[test]
    fn json_round_trip() {
        let g = complete(|_, _| vec![2, 1]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<BipartiteLC>(&s).unwrap(), g);
        let p = layerize(&g, 2).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<LayeredLC>(&s).unwrap(), p);
        let c = to_minor_condition(&p);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<MinorCondition>(&s).unwrap(), c);
    }
}
