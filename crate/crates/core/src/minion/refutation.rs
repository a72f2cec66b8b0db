//! Constructions showing that no choice function with small sets satisfies
//! the multiple-choice condition on WP, or the layered condition on ST.

use serde::{Deserialize, Serialize};

use crate::boolean::BooleanFunction;
use crate::choice::{ChainMember, ChoiceFunction, MinorChain};
use crate::error::{Error, Result};
use crate::minion::{st_generator, wp_generator};
use crate::minor::MinorMap;
use crate::rational::int;
use crate::threshold::LtfPresentation;

fn construction(msg: impl Into<String>) -> Error {
    Error::Construction(msg.into())
}

/// Applies the choice function, turning any failure into a construction error
/// and enforcing the size bound.
fn choose_bounded(
    choice: &ChoiceFunction,
    f: &BooleanFunction,
    bound: usize,
) -> Result<Vec<usize>> {
    let set = choice
        .choose(f)
        .map_err(|e| construction(format!("choice on {} failed: {e}", f.digest())))?;
    if set.len() > bound {
        return Err(construction(format!(
            "choice on {} has {} coordinates, bound is {bound}",
            f.digest(),
            set.len()
        )));
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultichoiceRefutation {
    pub f: LtfPresentation,
    pub pi: MinorMap,
    pub g: LtfPresentation,
}

/// `f = wp_generator(2M)`, `g` the projection of arity `M + 2` onto coordinate 1,
/// and `pi` sending `I(f)` to some `j` outside `I(g) ∪ {1}`, everything else to 1.
pub fn build_multichoice_refutation(
    choice: &ChoiceFunction,
    bound: usize,
) -> Result<MultichoiceRefutation> {
    if bound == 0 {
        return Err(construction("bound must be positive"));
    }
    let f = wp_generator(2 * bound)?;
    let ft = f.truth_table()?;
    let fset = choose_bounded(choice, &ft, bound)?;
    let mut gw = vec![int(0); bound + 2];
    gw[0] = int(1);
    let g = LtfPresentation::weak(gw, int(0))?;
    let gt = g.truth_table()?;
    let gset = choose_bounded(choice, &gt, bound)?;
    let j = (2..=bound + 2)
        .find(|j| !gset.contains(j))
        .ok_or_else(|| construction("no coordinate outside I(g) and 1"))?;
    let map = (1..=f.arity())
        .map(|i| if fset.contains(&i) { j } else { 1 })
        .collect();
    let pi = MinorMap::new(bound + 2, map)?;
    if ft.minor(&pi)? != gt {
        return Err(construction("g is not the minor of f under the built map"));
    }
    if pi.image(&fset).iter().any(|x| gset.contains(x)) {
        return Err(construction("pi(I(f)) meets I(g)"));
    }
    Ok(MultichoiceRefutation { f, pi, g })
}

/// Partner of a pair coordinate of an ST generator (`2t` <-> `2t + 1`).
fn partner(c: usize) -> usize {
    c ^ 1
}

fn pair_of(c: usize) -> usize {
    c / 2
}

/// A coordinate other than 1 outside `set`, preferring the partner of a
/// chosen pair coordinate so that fewer pairs get used up.
fn pick_free(set: &[usize], arity: usize) -> Option<usize> {
    let free = |c: &usize| *c >= 2 && *c <= arity && !set.contains(c);
    set.iter()
        .filter(|&&c| c >= 2)
        .map(|&c| partner(c))
        .filter(free)
        .min()
        .or_else(|| (2..=arity).find(free))
}

struct Step {
    k: usize,
    set: Vec<usize>,
    free: usize,
}

fn plan_step(choice: &ChoiceFunction, k: usize, bound: usize) -> Result<Step> {
    let f = st_generator(k).truth_table()?;
    let set = choose_bounded(choice, &f, bound)?;
    let free = pick_free(&set, 2 * k + 1)
        .ok_or_else(|| construction(format!("no free coordinate in generator {k}")))?;
    Ok(Step { k, set, free })
}

fn used_pairs(step: &Step) -> Vec<usize> {
    let mut p: Vec<usize> = step
        .set
        .iter()
        .chain(std::iter::once(&step.free))
        .filter(|&&c| c >= 2)
        .map(|&c| pair_of(c))
        .collect();
    p.sort_unstable();
    p.dedup();
    p
}

/// Folds coordinate 1, the chosen set, `free` and their partners into one
/// dummy coordinate, which lands on `next.free`; the lowest remaining pair
/// provides the new coordinate 1 and the rest map onto the pairs of `next`.
fn step_map(step: &Step, next: &Step) -> Result<MinorMap> {
    let mut folded = used_pairs(step);
    let mut rest: Vec<usize> = (1..=step.k).filter(|t| !folded.contains(t)).collect();
    if rest.len() < next.k + 1 {
        return Err(construction(format!(
            "generator {} too small to reach {}",
            step.k, next.k
        )));
    }
    let extra = rest.len() - (next.k + 1);
    folded.extend(rest.drain(..extra));
    let dummy = next.free;
    let mut map = vec![0usize; 2 * step.k + 1];
    map[0] = dummy;
    for &t in &folded {
        map[2 * t - 1] = dummy;
        map[2 * t] = dummy;
    }
    map[2 * rest[0] - 1] = 1;
    map[2 * rest[0]] = dummy;
    for (s, &t) in rest.iter().enumerate().skip(1) {
        map[2 * t - 1] = 2 * s;
        map[2 * t] = 2 * s + 1;
    }
    MinorMap::new(2 * next.k + 1, map)
}

const MAX_GENERATOR: usize = 12;

/// A chain of `M` ST generators whose maps send every chosen set away from
/// all later chosen sets.
pub fn build_layered_refutation(choice: &ChoiceFunction, bound: usize) -> Result<MinorChain> {
    if bound == 0 {
        return Err(construction("bound must be positive"));
    }
    let too_big = || construction(format!("sizes exceed generator {MAX_GENERATOR}"));
    // the last generator needs room for its set plus a free coordinate other than 1
    let mut k = bound.div_ceil(2);
    let last = loop {
        if k > MAX_GENERATOR {
            return Err(too_big());
        }
        if 2 * k + 1 >= bound + 2 {
            if let Ok(s) = plan_step(choice, k, bound) {
                break s;
            }
        }
        k += 1;
    };
    // sized backwards: each generator must have enough pairs left after folding
    let mut steps = vec![last];
    for _ in 1..bound {
        let next_k = steps.last().unwrap().k;
        let mut k = next_k + 2;
        let step = loop {
            if k > MAX_GENERATOR {
                return Err(too_big());
            }
            let s = plan_step(choice, k, bound)?;
            if k > next_k + used_pairs(&s).len() {
                break s;
            }
            k += 1;
        };
        steps.push(step);
    }
    steps.reverse();
    let mut functions = vec![ChainMember::Presentation(st_generator(steps[0].k))];
    let mut maps = Vec::new();
    for w in steps.windows(2) {
        maps.push(step_map(&w[0], &w[1])?);
        functions.push(ChainMember::Presentation(st_generator(w[1].k)));
    }
    let chain =
        MinorChain::new(functions, maps).map_err(|e| construction(format!("chain check: {e}")))?;
    for i in 1..=chain.len() {
        for j in i + 1..=chain.len() {
            let img = chain.compose(i, j)?.image(&steps[i - 1].set);
            if img.iter().any(|c| steps[j - 1].set.contains(c)) {
                return Err(construction(format!(
                    "pi_{{{i},{j}}}(I(f_{i})) meets I(f_{j})"
                )));
            }
        }
    }
    Ok(chain)
}
