//! Canonical presentations: weights whose absolute values order the
//! coordinates exactly as the preorder does.

use num_traits::{Signed, Zero};

use crate::error::{invariant, Error, Result};
use crate::rational::Rational;
use crate::threshold::preorder::{compute_preorder, CoordinatePreorder};
use crate::threshold::{Form, LtfPresentation};

/// Moves `eps` of absolute weight from coordinate `l` to coordinate `k`
/// (0-based), keeping the function fixed. Requires `eps < |a_l| - |a_k|`.
///
/// Same signs: `a_l` shrinks and `a_k` grows, valid when `k`, `l` are
/// interchangeable. Opposite signs: both weights and the threshold shift by
/// the same amount, valid when identifying `k` and `l` gives a dummy.
fn tweak(w: &mut [Rational], t: &mut Rational, k: usize, l: usize, eps: &Rational) {
    let lpos = w[l].is_positive();
    let same = w[k].is_zero() || w[k].is_positive() == lpos;
    if same {
        if lpos {
            w[l] -= eps;
            w[k] += eps;
        } else {
            w[l] += eps;
            w[k] -= eps;
        }
    } else if lpos {
        w[l] -= eps;
        w[k] -= eps;
        *t -= eps;
    } else {
        w[l] += eps;
        w[k] += eps;
        *t += eps;
    }
}

pub fn canonical_presentation(p: &LtfPresentation) -> Result<LtfPresentation> {
    let strict = match p.form() {
        Form::Weak => p.convert_form(Form::Strict)?,
        Form::Strict => {
            if !p.is_total()? {
                return Err(Error::Totality(
                    "canonical form needs a total presentation".into(),
                ));
            }
            p.clone()
        }
    };
    let f = strict.truth_table()?;
    let pre = compute_preorder(&f)?;
    let mut w = strict.weights().to_vec();
    let mut t = strict.threshold().clone();
    for class in pre.classes() {
        let total = class
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + w[i - 1].abs());
        let avg = total / Rational::from_integer(class.len().into());
        for _ in 0..class.len() {
            let Some(&k) = class.iter().find(|&&i| w[i - 1].abs() < avg) else {
                break;
            };
            let l = *class
                .iter()
                .find(|&&i| w[i - 1].abs() > avg)
                .ok_or_else(|| Error::Invariant("class average not straddled".into()))?;
            let eps = &avg - w[k - 1].abs();
            tweak(&mut w, &mut t, k - 1, l - 1, &eps);
        }
        if class.iter().any(|&i| w[i - 1].abs() != avg) {
            return invariant(format!("class {class:?} not equalized"));
        }
    }
    let out = LtfPresentation::strict(w, t)?;
    if out.truth_table()? != f {
        return invariant("canonical presentation changed the function");
    }
    if !is_canonical_for(&out, &pre) {
        return invariant("canonical weights disagree with the preorder");
    }
    Ok(out)
}

/// `|a_i| < |a_j|` iff `i ⊏ j`, and `|a_i| = |a_j|` iff `i ≡ j`.
pub fn is_canonical_for(p: &LtfPresentation, pre: &CoordinatePreorder) -> bool {
    let n = p.arity();
    (1..=n).all(|i| {
        (1..=n).all(|j| {
            let (ai, aj) = (p.weight(i).abs(), p.weight(j).abs());
            (ai < aj) == pre.strictly_less(i, j) && (ai == aj) == pre.equiv(i, j)
        })
    })
}
