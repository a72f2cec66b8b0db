//! Operations on threshold tuples `<a|t>`: minor-map properties, grouping of
//! small weights, approximation of the threshold and alternating-threshold
//! generators, and propagation of dominating coordinates.

use num_traits::{One, Signed, Zero};

use crate::error::{invariant, param, Result};
use crate::minor::MinorMap;
use crate::rational::{self, linf_distance, Rational};
use crate::threshold::{Form, LtfPresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapProperties {
    pub injective_on: bool,
    pub covered_by: bool,
    pub dominating: bool,
}

fn check_coords(coords: &[usize], n: usize) -> Result<()> {
    match coords.iter().find(|&&i| i == 0 || i > n) {
        Some(i) => param(format!("coordinate {i} outside [1, {n}]")),
        None => Ok(()),
    }
}

pub fn minor_map_properties(
    pi: &MinorMap,
    p: &LtfPresentation,
    set: &[usize],
) -> Result<MapProperties> {
    let n = pi.from_arity();
    if p.arity() != n {
        return param(format!(
            "map from [{n}] with presentation of arity {}",
            p.arity()
        ));
    }
    check_coords(set, n)?;
    let image = pi.image(set);
    let covered_by = (1..=pi.to_arity())
        .filter(|j| !image.contains(j))
        .all(|j| pi.preimage(j).len() == 1);
    let inside = set.iter().map(|&i| p.weight(i).abs()).min();
    let outside = (1..=n)
        .filter(|i| !set.contains(i))
        .map(|i| p.weight(i).abs())
        .max();
    let dominating = match (inside, outside) {
        (Some(a), Some(b)) => a >= b,
        _ => true,
    };
    Ok(MapProperties {
        injective_on: pi.is_injective_on(set),
        covered_by,
        dominating,
    })
}

/// Splits nonnegative values summing to about 1 into `m` groups each within
/// `eps` of `1/m`. Items go to the first group with room below `1/m`; an item
/// that fits nowhere goes to the lightest group.
pub fn grouping(a: &[Rational], m: usize, eps: &Rational) -> Result<MinorMap> {
    if m == 0 {
        return param("grouping needs at least one group");
    }
    let total = a.iter().fold(Rational::zero(), |acc, x| acc + x);
    if (Rational::one() - &total).abs() > *eps {
        return param(format!("values sum to {total}, not within {eps} of 1"));
    }
    if let Some(i) = a.iter().position(|x| x.is_negative() || x > eps) {
        return param(format!(
            "value {} at position {} outside [0, {eps}]",
            a[i],
            i + 1
        ));
    }
    let cap = rational::frac(1, m as i64);
    let mut load = vec![Rational::zero(); m];
    let mut map = Vec::with_capacity(a.len());
    for x in a {
        let bin = match (0..m).find(|&b| &load[b] + x <= cap) {
            Some(b) => b,
            None => (0..m).min_by(|&u, &v| load[u].cmp(&load[v])).unwrap(),
        };
        load[bin] += x;
        map.push(bin + 1);
    }
    if let Some(b) = load.iter().position(|s| (s - &cap).abs() > *eps) {
        return invariant(format!(
            "group {} has sum {}, too far from {cap}",
            b + 1,
            load[b]
        ));
    }
    MinorMap::new(m, map)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxTarget {
    /// `(1/m, ..., 1/m | tau)`.
    Threshold { m: usize, tau: Rational },
    /// `(1/m x m, -1/(m-1) x (m-1) | 0)`.
    Alternating { m: usize },
}

impl ApproxTarget {
    pub fn generator(&self) -> Result<LtfPresentation> {
        match self {
            ApproxTarget::Threshold { m, tau } if *m >= 1 => {
                LtfPresentation::weak(vec![rational::frac(1, *m as i64); *m], tau.clone())
            }
            ApproxTarget::Alternating { m } if *m >= 2 => {
                let mut w = vec![rational::frac(1, *m as i64); *m];
                w.extend(vec![rational::frac(-1, *m as i64 - 1); *m - 1]);
                LtfPresentation::weak(w, Rational::zero())
            }
            _ => param("target arity too small"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Approximation {
    Constant,
    Approximant {
        map: MinorMap,
        scale: Rational,
        result: LtfPresentation,
        distance: Rational,
    },
}

/// Whether `t >= max(0, sum a)` or `t <= min(0, sum a)`.
pub fn is_constant_tuple(p: &LtfPresentation) -> bool {
    let s = p.weight_sum();
    let z = Rational::zero();
    let t = p.threshold();
    *t >= s.clone().max(z.clone()) || *t <= s.min(z)
}

fn presentation_distance(a: &LtfPresentation, b: &LtfPresentation) -> Rational {
    let d = linf_distance(a.weights(), b.weights());
    d.max((a.threshold() - b.threshold()).abs())
}

/// Merges and scales `p` into a tuple within `eps` of the target generator,
/// or reports that `p` is constant.
///
/// The input is first scaled to absolute weight sum 2. For a threshold target
/// with `S` the (scaled) weight sum, it must satisfy `S > 0`,
/// `|t - tau S| <= S eps` and `|a_j| <= S eps`; for an alternating target,
/// `|t| <= eps`, `|a_j| <= eps` and positive and negative parts within `eps`
/// of `1` and `-1`.
pub fn approximate_generator(
    p: &LtfPresentation,
    target: &ApproxTarget,
    eps: &Rational,
) -> Result<Approximation> {
    // The alternating generator is itself constant in the tuple sense
    // (t = 0 = sum a), so for that target only degenerate inputs are reported.
    let degenerate = match target {
        ApproxTarget::Threshold { .. } => is_constant_tuple(p),
        ApproxTarget::Alternating { .. } => p.abs_sum().is_zero(),
    };
    if degenerate {
        return Ok(Approximation::Constant);
    }
    let gen = target.generator()?;
    let c0 = rational::int(2) / p.abs_sum();
    let q = p.scale(&c0)?;
    if q.threshold().abs() >= rational::int(2) {
        return Ok(Approximation::Constant);
    }
    let a = q.weights();
    let t = q.threshold();
    let (item_of, bins_of_items, scale) = match target {
        ApproxTarget::Threshold { m, tau } => {
            let s = q.weight_sum();
            if !s.is_positive() {
                return param(format!(
                    "weight sum {s} must be positive for a threshold target"
                ));
            }
            let se = &s * eps;
            if (t - tau * &s).abs() > se {
                return param(format!("threshold {t} not within {se} of {}", tau * &s));
            }
            if a.iter().any(|x| x.abs() > se) {
                return param(format!("some weight exceeds {se}"));
            }
            // negatives folded into one item together with enough positives
            let negs: Vec<usize> = (0..a.len()).filter(|&i| a[i].is_negative()).collect();
            let mut item_of = vec![usize::MAX; a.len()];
            let mut items: Vec<Rational> = Vec::new();
            if !negs.is_empty() {
                let mut acc = Rational::zero();
                for &i in &negs {
                    item_of[i] = 0;
                    acc += &a[i];
                }
                for i in 0..a.len() {
                    if !acc.is_negative() {
                        break;
                    }
                    if !a[i].is_negative() {
                        item_of[i] = 0;
                        acc += &a[i];
                    }
                }
                items.push(acc);
            }
            for i in 0..a.len() {
                if item_of[i] == usize::MAX {
                    item_of[i] = items.len();
                    items.push(a[i].clone());
                }
            }
            let normalized: Vec<Rational> = items.iter().map(|x| x / &s).collect();
            let g = grouping(&normalized, *m, eps)?;
            (item_of, vec![g], Rational::one() / s)
        }
        ApproxTarget::Alternating { m } => {
            if a.iter().any(|x| x.abs() > *eps) || t.abs() > *eps {
                return param(format!("weights and threshold must be within {eps} of 0"));
            }
            let pos: Vec<usize> = (0..a.len()).filter(|&i| !a[i].is_negative()).collect();
            let neg: Vec<usize> = (0..a.len()).filter(|&i| a[i].is_negative()).collect();
            let pv: Vec<Rational> = pos.iter().map(|&i| a[i].clone()).collect();
            let nv: Vec<Rational> = neg.iter().map(|&i| -a[i].clone()).collect();
            let gp = grouping(&pv, *m, eps)?;
            let gn = grouping(&nv, *m - 1, eps)?;
            let mut item_of = vec![0; a.len()];
            for (k, &i) in pos.iter().chain(&neg).enumerate() {
                item_of[i] = k;
            }
            (item_of, vec![gp, gn], Rational::one())
        }
    };
    let map: Vec<usize> = match target {
        ApproxTarget::Threshold { .. } => item_of
            .iter()
            .map(|&k| bins_of_items[0].apply(k + 1))
            .collect(),
        ApproxTarget::Alternating { m } => {
            let npos = bins_of_items[0].from_arity();
            item_of
                .iter()
                .map(|&k| {
                    if k < npos {
                        bins_of_items[0].apply(k + 1)
                    } else {
                        m + bins_of_items[1].apply(k - npos + 1)
                    }
                })
                .collect()
        }
    };
    let map = MinorMap::new(gen.arity(), map)?;
    let total_scale = &c0 * &scale;
    let result = p.minor(&map)?.scale(&total_scale)?;
    let result = LtfPresentation::new(
        result.weights().to_vec(),
        result.threshold().clone(),
        Form::Weak,
    )?;
    let distance = presentation_distance(&result, &gen);
    if distance > *eps {
        return invariant(format!("approximant at distance {distance} exceeds {eps}"));
    }
    Ok(Approximation::Approximant {
        map,
        scale: total_scale,
        result,
        distance,
    })
}

/// Checks that a coordinate of `pi(I)` dominates the minor, given that `pi`
/// is injective on and covered by `I`, `I` dominates in `p`, `|I| >= 2/eps`
/// and `member(p)` holds.
pub fn domination_propagates(
    p: &LtfPresentation,
    pi: &MinorMap,
    set: &[usize],
    eps: &Rational,
    member: impl Fn(&LtfPresentation) -> bool,
) -> Result<bool> {
    let props = minor_map_properties(pi, p, set)?;
    if !props.injective_on {
        return param("map is not injective on the set");
    }
    if !props.covered_by {
        return param("map is not covered by the set");
    }
    if !props.dominating {
        return param("set is not dominating");
    }
    if !eps.is_positive() || Rational::from_integer(set.len().into()) * eps < rational::int(2) {
        return param(format!("set of size {} is smaller than 2/{eps}", set.len()));
    }
    if !member(p) {
        return param("presentation is outside the ambient minion");
    }
    let b = p.minor(pi)?;
    let top = b.weights().iter().map(|x| x.abs()).max().unwrap();
    Ok(pi.image(set).iter().any(|&k| b.weight(k).abs() == top))
}
