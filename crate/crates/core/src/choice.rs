//! Choice functions, chains of minors, and the hardness conditions evaluated
//! on explicit chain families. Evaluation only: the conditions quantify over
//! whole minions, which no finite check decides.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boolean::BooleanFunction;
use crate::error::{param, Error, Result};
use crate::minor::MinorMap;
use crate::rational::Rational;
use crate::threshold::{compute_preorder, LtfPresentation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChoiceFunction {
    /// The coordinate a projection depends on.
    Dictator,
    /// The `3N` coordinates highest in the coordinate preorder.
    Top3n { n: usize },
    /// Explicit sets keyed by [`BooleanFunction::digest`].
    Table {
        entries: BTreeMap<String, Vec<usize>>,
    },
}

impl ChoiceFunction {
    pub fn choose(&self, f: &BooleanFunction) -> Result<Vec<usize>> {
        let set = match self {
            ChoiceFunction::Dictator => {
                let deps: Vec<usize> = (1..=f.arity()).filter(|&i| f.depends_on(i)).collect();
                match deps.as_slice() {
                    [i] if *f == BooleanFunction::projection(f.arity(), *i)? => vec![*i],
                    _ => {
                        return Err(Error::ChoiceUndefined(format!(
                            "{} is not a projection",
                            f.digest()
                        )))
                    }
                }
            }
            ChoiceFunction::Top3n { n } => ltf_choice_table(f, *n)?,
            ChoiceFunction::Table { entries } => {
                let key = f.digest();
                let mut v = entries
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| Error::ChoiceUndefined(format!("no table entry for {key}")))?;
                v.sort_unstable();
                v.dedup();
                if v.is_empty() || v.iter().any(|&i| i == 0 || i > f.arity()) {
                    return param(format!(
                        "table entry for {key} is not a nonempty subset of [{}]",
                        f.arity()
                    ));
                }
                v
            }
        };
        Ok(set)
    }

    /// A table choice holding `rule(f)` for each listed function.
    pub fn tabulate(
        fns: &[BooleanFunction],
        rule: impl Fn(&BooleanFunction) -> Result<Vec<usize>>,
    ) -> Result<ChoiceFunction> {
        let mut entries = BTreeMap::new();
        for f in fns {
            entries.insert(f.digest(), rule(f)?);
        }
        Ok(ChoiceFunction::Table { entries })
    }
}

/// The `min(3N, n)` coordinates highest in the preorder, ascending index
/// within a class. Returned sorted.
pub fn ltf_choice_table(f: &BooleanFunction, n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return param("N must be positive");
    }
    let pre = compute_preorder(f)?;
    let mut chosen: Vec<usize> = pre.descending().into_iter().take(3 * n).collect();
    let partial = pre
        .classes()
        .iter()
        .filter(|c| {
            let k = c.iter().filter(|i| chosen.contains(i)).count();
            k > 0 && k < c.len()
        })
        .count();
    if partial > 1 {
        return Err(Error::Invariant(
            "more than one partially chosen class".into(),
        ));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

pub fn ltf_choice(p: &LtfPresentation, n: usize) -> Result<Vec<usize>> {
    ltf_choice_table(&p.truth_table()?, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChainMember {
    Presentation(LtfPresentation),
    Table(BooleanFunction),
}

impl ChainMember {
    pub fn table(&self) -> Result<BooleanFunction> {
        match self {
            ChainMember::Presentation(p) => p.truth_table(),
            ChainMember::Table(f) => Ok(f.clone()),
        }
    }
}

/// `f_1 -> f_2 -> ... -> f_L` with `f_{i+1}` the `pi_{i,i+1}`-minor of `f_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChainJson", into = "ChainJson")]
pub struct MinorChain {
    functions: Vec<ChainMember>,
    maps: Vec<MinorMap>,
    tables: Vec<BooleanFunction>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainJson {
    functions: Vec<ChainMember>,
    maps: Vec<MinorMap>,
}

impl TryFrom<ChainJson> for MinorChain {
    type Error = String;
    fn try_from(j: ChainJson) -> std::result::Result<Self, String> {
        MinorChain::new(j.functions, j.maps).map_err(|e| e.to_string())
    }
}

impl From<MinorChain> for ChainJson {
    fn from(c: MinorChain) -> Self {
        ChainJson {
            functions: c.functions,
            maps: c.maps,
        }
    }
}

impl MinorChain {
    pub fn new(functions: Vec<ChainMember>, maps: Vec<MinorMap>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::Structural("chain has no functions".into()));
        }
        if maps.len() + 1 != functions.len() {
            return Err(Error::Structural(format!(
                "{} functions need {} maps, got {}",
                functions.len(),
                functions.len() - 1,
                maps.len()
            )));
        }
        let tables = functions
            .iter()
            .map(ChainMember::table)
            .collect::<Result<Vec<_>>>()?;
        for (k, pi) in maps.iter().enumerate() {
            let (f, g) = (&tables[k], &tables[k + 1]);
            if pi.from_arity() != f.arity() || pi.to_arity() != g.arity() {
                return Err(Error::Structural(format!(
                    "map {} goes [{}] -> [{}] between arities {} and {}",
                    k + 1,
                    pi.from_arity(),
                    pi.to_arity(),
                    f.arity(),
                    g.arity()
                )));
            }
            if f.minor(pi)? != *g {
                return Err(Error::Structural(format!(
                    "function {} is not the minor of function {} under map {}",
                    k + 2,
                    k + 1,
                    k + 1
                )));
            }
        }
        Ok(MinorChain {
            functions,
            maps,
            tables,
        })
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[ChainMember] {
        &self.functions
    }

    pub fn maps(&self) -> &[MinorMap] {
        &self.maps
    }

    /// Truth table of `f_i` (1-based).
    pub fn table(&self, i: usize) -> &BooleanFunction {
        &self.tables[i - 1]
    }

    /// `pi_{i,j} = pi_{j-1,j} ∘ ... ∘ pi_{i,i+1}` for `1 <= i < j <= L`.
    pub fn compose(&self, i: usize, j: usize) -> Result<MinorMap> {
        if i == 0 || i >= j || j > self.len() {
            return Err(Error::Index(format!(
                "need 1 <= i < j <= {}, got ({i}, {j})",
                self.len()
            )));
        }
        let mut acc = self.maps[i - 1].clone();
        for k in i..j - 1 {
            acc = acc.then(&self.maps[k])?;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Single,
    Multiple,
    Layered,
    InjectiveLayered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    /// 1-based position in the chain family.
    pub chain: usize,
    pub variant: Variant,
    pub satisfied: bool,
    pub witness: Option<Witness>,
    /// Set when an injectivity premise fails and the verdict holds vacuously.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub vacuous: bool,
}

fn meets(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|x| b.contains(x))
}

fn check_one(
    k: usize,
    chain: &MinorChain,
    choice: &ChoiceFunction,
    bound: usize,
    variant: Variant,
) -> Result<Verdict> {
    let sets = (1..=chain.len())
        .map(|i| choice.choose(chain.table(i)))
        .collect::<Result<Vec<_>>>()?;
    let verdict = |satisfied, witness, vacuous| Verdict {
        chain: k,
        variant,
        satisfied,
        witness,
        vacuous,
    };
    if matches!(variant, Variant::Single | Variant::Multiple) && chain.len() != 2 {
        return param(format!(
            "{variant:?} needs chains of length 2, chain {k} has {}",
            chain.len()
        ));
    }
    let limit = if variant == Variant::Single { 1 } else { bound };
    for (i, s) in sets.iter().enumerate() {
        let bad = if variant == Variant::Single {
            s.len() != 1
        } else {
            s.len() > limit
        };
        if bad {
            return param(format!(
                "chain {k}: choice set of function {} has size {}, bound is {limit}",
                i + 1,
                s.len()
            ));
        }
    }
    match variant {
        Variant::Single => {
            let ok = chain.maps()[0].image(&sets[0]) == sets[1];
            Ok(verdict(ok, ok.then_some(Witness { i: 1, j: 2 }), false))
        }
        Variant::Multiple => {
            let ok = meets(&chain.maps()[0].image(&sets[0]), &sets[1]);
            Ok(verdict(ok, ok.then_some(Witness { i: 1, j: 2 }), false))
        }
        Variant::Layered | Variant::InjectiveLayered => {
            if variant == Variant::InjectiveLayered {
                for i in 1..chain.len() {
                    let mut acc = sets[i - 1].clone();
                    for kk in 1..i {
                        acc.extend(chain.compose(kk, i)?.image(&sets[kk - 1]));
                    }
                    acc.sort_unstable();
                    acc.dedup();
                    if !chain.maps()[i - 1].is_injective_on(&acc) {
                        return Ok(verdict(true, None, true));
                    }
                }
            }
            for i in 1..=chain.len() {
                for j in i + 1..=chain.len() {
                    if meets(&chain.compose(i, j)?.image(&sets[i - 1]), &sets[j - 1]) {
                        return Ok(verdict(true, Some(Witness { i, j }), false));
                    }
                }
            }
            Ok(verdict(false, None, false))
        }
    }
}

pub fn check_condition(
    chains: &[MinorChain],
    choice: &ChoiceFunction,
    bound: usize,
    variant: Variant,
) -> Result<Vec<Verdict>> {
    chains
        .iter()
        .enumerate()
        .map(|(k, c)| check_one(k + 1, c, choice, bound, variant))
        .collect()
}

/// `sum_{j in pi(I)} |b_j| > eps * sum_i |b_i|` for the minor `b` of `p`.
pub fn propagate_weight_check(
    p: &LtfPresentation,
    pi: &MinorMap,
    set: &[usize],
    eps: &Rational,
) -> Result<bool> {
    if set.iter().any(|&i| i == 0 || i > p.arity()) {
        return param("coordinate set outside the arity");
    }
    if !pi.is_injective_on(set) {
        return param("map is not injective on the chosen set");
    }
    let b = p.minor(pi)?;
    let on = pi
        .image(set)
        .iter()
        .fold(Rational::zero(), |acc, &j| acc + b.weight(j).abs());
    Ok(on > eps * b.abs_sum())
}
