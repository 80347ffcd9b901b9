//! Modulus-of-continuity bounds for the uniformizing map, built from goodness integrals.
//!
//! Values of `ρ` are reported in units of `8R`, the Grötzsch scale of the target disk, so
//! that `ρ_q(t) = t / (ξ · exp(2π(I₁ + I₂)))` with the two goodness integrals `I₁, I₂`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use num_traits::Zero;
use rayon::prelude::*;

use crate::criterion::{integral_lower_bound, Analysis, PointSweeps};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, to_f64, LogValue, Rat};
use crate::scar::{classify_point, PointClass, ScarPoint};
use crate::scheme::BoundaryParam;

/// Refinement rounds allowed before the global bound gives up.
pub const MAX_REFINEMENTS: usize = 4;

/// Constants of the modulus estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusParams {
    pub rbar: Rat,
    pub hbar: Rat,
    pub boundary_length: Rat,
    /// `δ = (1/4)·min(r̄, h̄, 2r̄h̄/|∂P|)`.
    pub delta: Rat,
    pub m: Rat,
    /// `κ = 2·exp(48|∂P|/δ)`, kept as a logarithm.
    pub kappa: LogValue,
}

pub fn modulus_params(rbar: &Rat, hbar: &Rat, boundary_length: &Rat) -> Result<ModulusParams> {
    if *rbar <= Rat::zero() || *hbar <= Rat::zero() || *boundary_length <= Rat::zero() {
        return Err(Error::OutOfRange("r̄, h̄ and the boundary length must be positive".into()));
    }
    let two = Rat::from_integer(2);
    let delta = (*rbar).min(*hbar).min(two * rbar * hbar / boundary_length) / Rat::from_integer(4);
    let m = (rbar / hbar).min(hbar / rbar) / Rat::from_integer(5);
    let kappa = LogValue { ln: 2f64.ln() + to_f64(&(Rat::from_integer(48) * boundary_length / delta)) };
    Ok(ModulusParams { rbar: *rbar, hbar: *hbar, boundary_length: *boundary_length, delta, m, kappa })
}

/// The exact auxiliary radii at one collar point, for one value of `d_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometryValues {
    pub xi: Rat,
    pub mu_xi: Rat,
    pub lambda: Rat,
    pub eta: Rat,
    pub alpha: Rat,
    pub beta: Rat,
}

/// `ξ, μ(q; ξ), λ, η, α, β` for collar height `h`, distance `d` to the singular set and time `t`.
pub fn geometry_functions(p: &ModulusParams, h: &Rat, d: &Rat, t: &Rat) -> GeometryValues {
    let xi = (*t).max(*h);
    let mu_xi = p.rbar / (Rat::from_integer(2) * p.delta) * (xi + h);
    let two_d = Rat::from_integer(2) * d;
    GeometryValues { lambda: mu_xi.min(*d), eta: mu_xi.max(*d), alpha: two_d.min(p.rbar), beta: two_d.max(p.rbar), xi, mu_xi }
}

/// Data of one collar point: its boundary parameter, height and position relative to the singular set.
#[derive(Clone, Debug)]
pub struct CollarSample {
    pub param: BoundaryParam,
    pub h: Rat,
    /// Distance bounds to the singular set from the two realizations.
    pub d_lo: Rat,
    pub d_hi: Rat,
    /// A parameter of the nearest singular point.
    pub nearest: BoundaryParam,
    sweeps: Option<PointSweeps>,
}

/// `ρ_q(t)` in units of `8R`, with the two integrals it was built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoValue {
    pub rho: f64,
    pub i1: f64,
    pub i2: f64,
    /// The two distance bounds gave different case splits and the larger value was kept.
    pub straddles: bool,
}

/// The modulus engine over one analysed truncation.
pub struct Modulus<'a> {
    pub an: &'a Analysis,
    pub params: ModulusParams,
}

impl<'a> Modulus<'a> {
    pub fn new(an: &'a Analysis) -> Result<Self> {
        let params = modulus_params(&an.params.rbar, &an.params.hbar, &an.pair.fs().boundary_length())?;
        Ok(Modulus { an, params })
    }

    fn check_height(&self, h: &Rat) -> Result<()> {
        let top = self.params.delta / Rat::from_integer(2);
        if h.is_negative() || *h > top {
            return Err(Error::OutOfRange(format!("collar height {} outside [0, {}]", fmt_rat(h), fmt_rat(&top))));
        }
        Ok(())
    }

    /// Locates a collar point relative to the singular set.
    pub fn sample(&self, param: &BoundaryParam, h: &Rat) -> Result<CollarSample> {
        self.check_height(h)?;
        let tree = &self.an.pair.collapse;
        let x = tree.locate(param)?;
        if classify_point(tree, &x) == PointClass::DeclaredSingular {
            return Ok(CollarSample { param: param.clone(), h: *h, d_lo: Rat::zero(), d_hi: Rat::zero(), nearest: param.clone(), sweeps: None });
        }
        let limit = self.params.rbar / Rat::from_integer(2);
        let ps = self.an.point_sweeps(param, &limit)?;
        let (d_lo, d_hi, node) = ps.singular_distance(&self.an.pair).ok_or_else(|| Error::Domain("no singular point is reachable".into()))?;
        let nearest = tree.representative(&ScarPoint::Node(node));
        Ok(CollarSample { param: param.clone(), h: *h, d_lo, d_hi, nearest, sweeps: Some(ps) })
    }

    fn rho_with(&self, s: &CollarSample, d: &Rat, t: &Rat) -> Result<RhoValue> {
        let g = geometry_functions(&self.params, &s.h, d, t);
        let half_alpha = g.alpha / Rat::from_integer(2);
        let i1 = match &s.sweeps {
            Some(ps) if g.lambda < half_alpha => {
                let prof = self.an.point_profile_from(ps, &g.lambda, &half_alpha)?;
                integral_lower_bound(&prof, &g.lambda, &half_alpha, true)?.scaled
            }
            _ => 0.0,
        };
        let lo2 = d + g.eta;
        let i2 = if lo2 < g.beta {
            let prof = self.an.singular_profile(&s.nearest, &lo2, &g.beta)?;
            integral_lower_bound(&prof, &lo2, &g.beta, true)?.scaled
        } else {
            0.0
        };
        let rho = to_f64(&(t / g.xi)) * (-2.0 * PI * (i1 + i2)).exp();
        Ok(RhoValue { rho, i1, i2, straddles: false })
    }

    /// `ρ_q(t)` for `t ∈ [0, δ/2]`; when `d_q` is only bracketed the larger value is returned.
    pub fn rho_point(&self, s: &CollarSample, t: &Rat) -> Result<RhoValue> {
        let top = self.params.delta / Rat::from_integer(2);
        if t.is_negative() || *t > top {
            return Err(Error::OutOfRange(format!("t = {} outside [0, {}]", fmt_rat(t), fmt_rat(&top))));
        }
        if t.is_zero() {
            return Ok(RhoValue { rho: 0.0, i1: 0.0, i2: 0.0, straddles: false });
        }
        let lo = self.rho_with(s, &s.d_lo, t)?;
        if s.d_hi == s.d_lo {
            return Ok(lo);
        }
        let hi = self.rho_with(s, &s.d_hi, t)?;
        let mut best = if hi.rho > lo.rho { hi } else { lo };
        best.straddles = true;
        Ok(best)
    }

    /// Boundary parameters sampled `per_piece` times on every gap and pairing segment.
    ///
    /// Gap samples come first: points next to unexpanded tails are the likeliest to reach the cap.
    fn boundary_grid(&self, per_piece: usize) -> Vec<BoundaryParam> {
        let fs = self.an.pair.fs();
        let k = Rat::from_integer(per_piece as i128);
        let sample = |pieces: Vec<(usize, Rat, Rat)>| {
            let mut out: Vec<BoundaryParam> = pieces
                .iter()
                .flat_map(|(poly, lo, hi)| (0..per_piece).map(move |i| BoundaryParam::new(*poly, lo + (hi - lo) * Rat::from_integer(i as i128) / k)))
                .collect();
            out.sort_by_key(|a| (a.poly, a.t));
            out.dedup();
            out
        };
        let gaps = sample(fs.gaps.iter().map(|g| (g.poly, g.lo, g.hi)).collect());
        let segments = sample(fs.pairings.iter().flat_map(|gp| gp.pairing.segments().map(|(lo, hi)| (gp.pairing.poly, lo, hi))).collect());
        let mut out = gaps.clone();
        out.extend(segments.into_iter().filter(|p| gaps.binary_search_by(|g| (g.poly, g.t).cmp(&(p.poly, p.t))).is_err()));
        out
    }

    /// `ρ̂(t) = 2·max_q ρ_q(t)` over a collar grid with `per_piece` boundary samples and `heights` levels.
    ///
    /// Every `ρ_q(t)` is at most `t/ξ ≤ 1`, so evaluation stops once each `t` has reached 1.
    pub fn rho_hat(&self, ts: &[Rat], per_piece: usize, heights: usize) -> Result<Vec<f64>> {
        let top = self.params.delta / Rat::from_integer(2);
        let mut hs = vec![Rat::zero()];
        let mut h = top;
        for _ in 0..heights {
            hs.push(h);
            h /= Rat::from_integer(2);
        }
        let grid = self.boundary_grid(per_piece);
        let best = Mutex::new(vec![0.0f64; ts.len()]);
        let saturated = AtomicBool::new(ts.is_empty());
        grid.par_iter().try_for_each(|param| -> Result<()> {
            if saturated.load(Ordering::Relaxed) {
                return Ok(());
            }
            let mut local = vec![0.0f64; ts.len()];
            let base = self.sample(param, &Rat::zero())?;
            for h in &hs {
                let s = CollarSample { h: *h, ..base.clone() };
                for (i, t) in ts.iter().enumerate() {
                    if local[i] < 1.0 {
                        local[i] = local[i].max(self.rho_point(&s, t)?.rho);
                    }
                }
                if local.iter().all(|&v| v >= 1.0) {
                    break;
                }
            }
            let mut b = best.lock().expect("no panics while holding the lock");
            for (x, y) in b.iter_mut().zip(&local) {
                *x = x.max(*y);
            }
            if b.iter().all(|&v| v >= 1.0) {
                saturated.store(true, Ordering::Relaxed);
            }
            Ok(())
        })?;
        Ok(best.into_inner().expect("no panics while holding the lock").into_iter().map(|v| 2.0 * v).collect())
    }

    /// `ρ̄(t) = max(ρ̂(t), κt)`, refining the grid until `ρ̂` moves by less than `rel_tol`.
    pub fn rho_global(&self, ts: &[Rat], rel_tol: f64) -> Result<Vec<GlobalRho>> {
        let (mut per_piece, mut heights) = (4, 4);
        let mut prev = self.rho_hat(ts, per_piece, heights)?;
        for _ in 0..MAX_REFINEMENTS {
            per_piece *= 2;
            heights += 2;
            let next = self.rho_hat(ts, per_piece, heights)?;
            let change = prev.iter().zip(&next).map(|(a, b)| if *b > 0.0 { (b - a).abs() / b } else { 0.0 }).fold(0.0, f64::max);
            prev = next;
            if change < rel_tol {
                return Ok(ts
                    .iter()
                    .zip(&prev)
                    .map(|(t, &rho_hat)| {
                        let lip = LogValue { ln: self.params.kappa.ln + to_f64(t).ln() };
                        let rho_bar = if rho_hat > 0.0 && rho_hat.ln() > lip.ln { LogValue::from_value(rho_hat) } else { lip };
                        GlobalRho { t: *t, rho_hat, rho_bar, lipschitz: rho_bar == lip }
                    })
                    .collect());
            }
        }
        Err(Error::Budget(format!("ρ̂ did not settle within {} refinements", MAX_REFINEMENTS)))
    }
}

/// The global modulus bound at one `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalRho {
    pub t: Rat,
    pub rho_hat: f64,
    pub rho_bar: LogValue,
    /// The Lipschitz branch `κt` is the larger one.
    pub lipschitz: bool,
}

/// The standard table of times `t = (δ/2)·2^{-m}`, `m = 0..count`.
pub fn standard_times(p: &ModulusParams, count: usize) -> Vec<Rat> {
    let mut t = p.delta / Rat::from_integer(2);
    let mut out = Vec::new();
    for _ in 0..count {
        out.push(t);
        t /= Rat::from_integer(2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn params_closed_form() {
        let p = modulus_params(&rat(1, 6), &rat(1, 4), &int(4)).unwrap();
        assert_eq!(p.delta, rat(1, 192));
        assert_eq!(p.m, rat(2, 15));
        assert!((p.kappa.ln - (36864.0 + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn geometry_on_the_singular_set() {
        let p = modulus_params(&rat(1, 6), &rat(1, 4), &int(4)).unwrap();
        let g = geometry_functions(&p, &int(0), &int(0), &rat(1, 384));
        assert_eq!(g.xi, rat(1, 384));
        assert_eq!(g.lambda, int(0));
        assert_eq!(g.eta, rat(1, 24));
        assert_eq!(g.alpha, int(0));
        assert_eq!(g.beta, rat(1, 6));
    }
}
