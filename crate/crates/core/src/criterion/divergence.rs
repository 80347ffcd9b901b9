//! Window-by-window lower bounds for the divergence integral and the decay-rate test.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use super::{injectivity_radius, integral_lower_bound, Analysis, CriterionParams};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, to_f64, Rat};
use crate::scar::ScarPair;
use crate::scheme::{truncate, FoldingScheme};

/// Relative slack of the trend comparison between the two halves of the windows.
pub const TREND_TOLERANCE: f64 = 1e-9;

/// Largest truncation the automatic deepening may produce.
const DEEPEN_PAIRING_BUDGET: usize = 120_000;
const MAX_DEEPEN: usize = 3;

/// Expected decay profile of the window bounds `W_k ≳ c·g(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    None,
    Constant,
    Harmonic,
}

impl Hypothesis {
    /// The reference profile `g(k)`.
    pub fn g(self, k: usize) -> f64 {
        match self {
            Hypothesis::Harmonic => 1.0 / (k as f64 + 1.0),
            _ => 1.0,
        }
    }
}

impl FromStr for Hypothesis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Ok(Hypothesis::None),
            "CONSTANT" => Ok(Hypothesis::Constant),
            "HARMONIC" => Ok(Hypothesis::Harmonic),
            _ => Err(Error::OutOfRange(format!("unknown hypothesis `{s}`"))),
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::None => "NONE",
            Hypothesis::Constant => "CONSTANT",
            Hypothesis::Harmonic => "HARMONIC",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Lower bound on one window `[lo, hi]` between consecutive merge radii.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowBound {
    pub k: usize,
    pub lo: Rat,
    pub hi: Rat,
    /// Minimum over components of `∫ 1/(cm + r·cn)`.
    pub w: f64,
    /// The same minimum scaled by `M`.
    pub scaled: f64,
    pub components: usize,
    /// Every component profile was certified on the whole window.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceCertificate {
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    pub windows: Vec<WindowBound>,
    /// `min_k W_k / g(k)`.
    pub c: Option<f64>,
    pub eps: Rat,
    pub params: CriterionParams,
    pub reason: String,
}

/// Window radii `r̄ > r_1 > r_2 > ...` from the singular-set merges below r̄.
pub fn window_radii(an: &Analysis) -> Vec<Rat> {
    let rbar = an.params.rbar;
    let mut radii = vec![rbar];
    let mut nc: Vec<Rat> = an.sweep_c.merge_radii().into_iter().filter(|t| *t < rbar && !t.is_zero()).collect();
    nc.sort();
    nc.reverse();
    radii.extend(nc);
    radii
}

/// Bounds every window among the first `count`.
pub fn window_bounds(an: &Analysis, count: usize) -> Result<Vec<WindowBound>> {
    let radii = window_radii(an);
    let mut out = Vec::new();
    for k in 0..count.min(radii.len().saturating_sub(1)) {
        let (lo, hi) = (radii[k + 1], radii[k]);
        let mid = (lo + hi) / Rat::from_integer(2);
        let reps = an.component_representatives(&mid);
        let mut w = f64::INFINITY;
        let mut certified = true;
        for q in &reps {
            let prof = an.singular_profile(q, &lo, &hi)?;
            let b = integral_lower_bound(&prof, &lo, &hi, true)?;
            certified &= b.uncertified.is_zero();
            w = w.min(b.unnormalized);
        }
        out.push(WindowBound { k, lo, hi, w, scaled: w * to_f64(&an.params.m), components: reps.len(), certified });
    }
    Ok(out)
}

/// The merge radii above `floor` agree in both realizations.
fn merges_consistent(an: &Analysis, floor: &Rat) -> bool {
    let rbar = an.params.rbar;
    let pick = |v: Vec<Rat>| v.into_iter().filter(|t| t >= floor && *t < rbar).collect::<Vec<_>>();
    pick(an.sweep_c.merge_radii()) == pick(an.sweep_f.merge_radii())
}

fn analyse(scheme: &FoldingScheme, eps: &Rat, rbar: Option<Rat>, hbar: &Rat) -> Result<Analysis> {
    let pair = ScarPair::build(truncate(scheme, eps)?)?;
    let rbar = match rbar {
        Some(r) => r,
        None => injectivity_radius(&pair)?,
    };
    let params = CriterionParams::new(rbar, *hbar)?;
    Analysis::new(pair, params, &rbar)
}

/// Window bounds for the first `count` windows, deepening the truncation until they are certified.
pub fn divergence_report(
    scheme: &FoldingScheme,
    hypothesis: Hypothesis,
    count: usize,
    eps: &Rat,
    rbar: Option<Rat>,
    hbar: &Rat,
) -> Result<DivergenceCertificate> {
    if count == 0 {
        return Err(Error::OutOfRange("at least one window is required".into()));
    }
    let mut eps = *eps;
    let mut attempt = 0;
    let (an, windows) = loop {
        let an = analyse(scheme, &eps, rbar, hbar)?;
        let windows = window_bounds(&an, count)?;
        let floor = windows.last().map_or(an.params.rbar, |w| w.lo);
        let done = windows.len() == count && windows.iter().all(|w| w.certified) && merges_consistent(&an, &floor);
        let size = an.pair.fs().pairings.len();
        if done || attempt == MAX_DEEPEN || scheme.generator.is_finite() || size * 4 > DEEPEN_PAIRING_BUDGET {
            break (an, windows);
        }
        attempt += 1;
        eps /= Rat::from_integer(4);
    };
    let params = an.params.clone();
    let floor = windows.last().map_or(params.rbar, |w| w.lo);
    let verdict_of = |reason: &str| (Verdict::Inconclusive, reason.to_string());
    let c = windows.iter().map(|w| w.w / hypothesis.g(w.k)).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    let (verdict, reason) = if hypothesis == Hypothesis::None {
        verdict_of("no decay hypothesis given")
    } else if windows.len() < count {
        verdict_of(&format!("only {} merge windows below r̄", windows.len()))
    } else if !merges_consistent(&an, &floor) {
        verdict_of("merge radii differ between the two realizations")
    } else if windows.iter().any(|w| !(w.w > 0.0)) {
        verdict_of("a window bound is not positive")
    } else {
        let half = count / 2;
        let ratio = |w: &WindowBound| w.w / hypothesis.g(w.k);
        let first = windows[..half.max(1)].iter().map(ratio).fold(f64::INFINITY, f64::min);
        let second = windows[half.max(1).min(count - 1)..].iter().map(ratio).fold(f64::INFINITY, f64::min);
        if second >= first * (1.0 - TREND_TOLERANCE) {
            (Verdict::Certified, String::new())
        } else {
            verdict_of(&format!("window bounds decay faster than {}", hypothesis))
        }
    };
    let reason = if verdict == Verdict::Certified && windows.iter().any(|w| !w.certified) {
        // Uncertified pieces only lower the bounds, so the verdict stands.
        format!("profile approximate below {}", fmt_rat(&floor))
    } else {
        reason
    };
    Ok(DivergenceCertificate { hypothesis, verdict, windows, c: if hypothesis == Hypothesis::None { None } else { c }, eps, params, reason })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::scheme::builtin_example;

    #[test]
    fn hypothesis_parsing() {
        assert_eq!("harmonic".parse::<Hypothesis>().unwrap(), Hypothesis::Harmonic);
        assert!("linear".parse::<Hypothesis>().is_err());
    }

    #[test]
    fn seq_is_harmonic() {
        let s = builtin_example("seq").unwrap();
        let cert = divergence_report(&s, Hypothesis::Harmonic, 8, &rat(1, 256), None, &rat(9, 40)).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified, "{cert:?}");
        let c = cert.c.unwrap();
        assert!(c >= (22.0f64 / 19.0).ln() / 3.0 * (1.0 - 1e-9), "{c}");
    }

    #[test]
    fn seq_is_not_constant() {
        let s = builtin_example("seq").unwrap();
        let cert = divergence_report(&s, Hypothesis::Constant, 8, &rat(1, 256), None, &rat(9, 40)).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
    }
}
