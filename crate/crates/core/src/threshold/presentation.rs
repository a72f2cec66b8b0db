use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::boolean::{BooleanFunction, MAX_TABLE_ARITY};
use crate::error::{param, Error, Result};
use crate::minor::MinorMap;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Output 0 iff `<a|x> <= t`.
    Weak,
    /// Output 0 if `<a|x> < t`, 1 if `> t`, undefined on equality.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LtfJson", into = "LtfJson")]
pub struct LtfPresentation {
    weights: Vec<Rational>,
    threshold: Rational,
    form: Form,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LtfJson {
    #[serde(with = "rational::serde_str::vec")]
    weights: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    threshold: Rational,
    form: Form,
}

impl TryFrom<LtfJson> for LtfPresentation {
    type Error = String;
    fn try_from(j: LtfJson) -> std::result::Result<Self, String> {
        LtfPresentation::new(j.weights, j.threshold, j.form).map_err(|e| e.to_string())
    }
}

impl From<LtfPresentation> for LtfJson {
    fn from(p: LtfPresentation) -> Self {
        LtfJson {
            weights: p.weights,
            threshold: p.threshold,
            form: p.form,
        }
    }
}

/// Subset sums of integer weights, split into a low and a high half so that
/// large arities do not need a table of all `2^n` sums.
struct SumTable {
    low_bits: usize,
    low: Vec<i128>,
    high: Vec<i128>,
}

impl SumTable {
    fn new(w: &[i128]) -> Self {
        let low_bits = w.len().min(12);
        let build = |ws: &[i128]| {
            let mut v = vec![0i128; 1 << ws.len()];
            for x in 1..v.len() {
                let b = x.trailing_zeros() as usize;
                v[x] = v[x & (x - 1)] + ws[b];
            }
            v
        };
        SumTable {
            low_bits,
            low: build(&w[..low_bits]),
            high: build(&w[low_bits..]),
        }
    }

    fn sum(&self, x: usize) -> i128 {
        self.low[x & ((1 << self.low_bits) - 1)] + self.high[x >> self.low_bits]
    }
}

impl LtfPresentation {
    pub fn new(weights: Vec<Rational>, threshold: Rational, form: Form) -> Result<Self> {
        if weights.is_empty() {
            return param("presentation needs at least one weight");
        }
        Ok(LtfPresentation {
            weights,
            threshold,
            form,
        })
    }

    pub fn weak(weights: Vec<Rational>, threshold: Rational) -> Result<Self> {
        Self::new(weights, threshold, Form::Weak)
    }

    pub fn strict(weights: Vec<Rational>, threshold: Rational) -> Result<Self> {
        Self::new(weights, threshold, Form::Strict)
    }

    /// Shorthand for integer weights and an integer-or-fraction threshold `(tn / td)`.
    pub fn from_ints(weights: &[i64], tn: i64, td: i64, form: Form) -> Self {
        Self::new(
            weights.iter().map(|&w| rational::int(w)).collect(),
            rational::frac(tn, td),
            form,
        )
        .expect("nonempty weights")
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i - 1]
    }

    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn dot(&self, x: &[u8]) -> Result<Rational> {
        if x.len() != self.arity() {
            return param(format!(
                "input of length {} for arity {}",
                x.len(),
                self.arity()
            ));
        }
        Ok(self
            .weights
            .iter()
            .zip(x)
            .filter(|(_, &b)| b == 1)
            .fold(Rational::zero(), |acc, (w, _)| acc + w))
    }

    /// `None` means undefined (strict form on the threshold).
    pub fn evaluate(&self, x: &[u8]) -> Result<Option<bool>> {
        let s = self.dot(x)?;
        Ok(match self.form {
            Form::Weak => Some(s > self.threshold),
            Form::Strict if s == self.threshold => None,
            Form::Strict => Some(s > self.threshold),
        })
    }

    /// Weights and threshold multiplied by the lcm of their denominators.
    fn integer_scaled(&self) -> (Vec<BigInt>, BigInt) {
        let l = self
            .weights
            .iter()
            .chain(std::iter::once(&self.threshold))
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let scale = |r: &Rational| (r * Rational::from_integer(l.clone())).to_integer();
        (
            self.weights.iter().map(scale).collect(),
            scale(&self.threshold),
        )
    }

    /// Integer weights fitting comfortably in i128, if they do.
    fn small_integers(&self) -> Option<(Vec<i128>, i128)> {
        let (w, t) = self.integer_scaled();
        let w: Option<Vec<i128>> = w.iter().map(|x| x.to_i128()).collect();
        let w = w?;
        let t = t.to_i128()?;
        let bound: i128 = 1 << 100;
        if w.iter().any(|x| x.abs() > bound / 64) || t.abs() > bound {
            return None;
        }
        Some((w, t))
    }

    /// Every achievable subset sum, as exact rationals.
    pub fn achievable_sums(&self) -> Result<Vec<Rational>> {
        if self.arity() > MAX_TABLE_ARITY {
            return param(format!("arity {} too large to enumerate", self.arity()));
        }
        let mut sums = vec![Rational::zero()];
        for w in &self.weights {
            let more: Vec<Rational> = sums.iter().map(|s| s + w).collect();
            sums.extend(more);
            sums.sort();
            sums.dedup();
        }
        Ok(sums)
    }

    pub fn is_total(&self) -> Result<bool> {
        Ok(match self.form {
            Form::Weak => true,
            Form::Strict => self.undefined_count()? == 0,
        })
    }

    fn undefined_count(&self) -> Result<usize> {
        if self.arity() > MAX_TABLE_ARITY {
            return param(format!("arity {} too large to enumerate", self.arity()));
        }
        if let Some((w, t)) = self.small_integers() {
            let st = SumTable::new(&w);
            return Ok((0..1usize << w.len()).filter(|&x| st.sum(x) == t).count());
        }
        Ok(self
            .achievable_sums()?
            .iter()
            .filter(|s| **s == self.threshold)
            .count())
    }

    pub fn convert_form(&self, target: Form) -> Result<LtfPresentation> {
        match (self.form, target) {
            (a, b) if a == b => Ok(self.clone()),
            (Form::Strict, Form::Weak) => {
                if !self.is_total()? {
                    return Err(Error::Totality(
                        "strict presentation is undefined on some input".into(),
                    ));
                }
                Self::new(self.weights.clone(), self.threshold.clone(), Form::Weak)
            }
            _ => {
                let sums = self.achievable_sums()?;
                let t = &self.threshold;
                let t2 = match sums.iter().find(|s| *s > t) {
                    Some(s) => (t + s) / rational::int(2),
                    None => sums.last().unwrap() + rational::int(1),
                };
                Self::new(self.weights.clone(), t2, Form::Strict)
            }
        }
    }

    pub fn minor(&self, pi: &MinorMap) -> Result<LtfPresentation> {
        if pi.from_arity() != self.arity() {
            return param(format!(
                "minor map from [{}] applied to arity {}",
                pi.from_arity(),
                self.arity()
            ));
        }
        let mut b = vec![Rational::zero(); pi.to_arity()];
        for (j, a) in self.weights.iter().enumerate() {
            b[pi.apply(j + 1) - 1] += a;
        }
        Self::new(b, self.threshold.clone(), self.form)
    }

    pub fn scale(&self, c: &Rational) -> Result<LtfPresentation> {
        if !c.is_positive() {
            return param(format!("scale factor {c} must be positive"));
        }
        Self::new(
            self.weights.iter().map(|w| w * c).collect(),
            &self.threshold * c,
            self.form,
        )
    }

    pub fn truth_table(&self) -> Result<BooleanFunction> {
        let n = self.arity();
        if n > MAX_TABLE_ARITY {
            return param(format!("arity {n} too large for a truth table"));
        }
        let table: Vec<Option<bool>> = if let Some((w, t)) = self.small_integers() {
            let st = SumTable::new(&w);
            (0..1usize << n)
                .map(|x| {
                    let s = st.sum(x);
                    match self.form {
                        Form::Strict if s == t => None,
                        _ => Some(s > t),
                    }
                })
                .collect()
        } else {
            (0..1usize << n)
                .map(|x| {
                    let bits: Vec<u8> = (0..n).map(|i| ((x >> i) & 1) as u8).collect();
                    self.evaluate(&bits).unwrap()
                })
                .collect()
        };
        if table.iter().any(Option::is_none) {
            return Err(Error::Totality(
                "strict presentation is undefined on some input".into(),
            ));
        }
        BooleanFunction::new(n, table.into_iter().map(Option::unwrap).collect())
    }

    pub fn abs_sum(&self) -> Rational {
        rational::abs_sum(&self.weights)
    }

    pub fn weight_sum(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |acc, w| acc + w)
    }
}
