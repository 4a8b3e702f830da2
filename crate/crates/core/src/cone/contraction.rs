//! Empirical contraction of `Theta_k` under `L^3` on random cone members.

use super::{cone_member, diameter_bound, theta_k, ConeError, ConeParams, PairSet};
use crate::domain::domain_info;
use crate::par;
use crate::potential::{cone_condition, ConditionReport};
use crate::prelude::*;
use crate::rng::{derive_seed, item_rng};
use crate::transfer::{Grid, GridFn, TransferOperator};
use core::f64::consts::PI;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionOptions {
    pub n_pairs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeCheckReport {
    pub k: f64,
    pub delta: f64,
    pub alpha: f64,
    pub cells: usize,
    pub pair_count: usize,
    pub pair_stride: usize,
    /// The condition LHS, which is the contraction of the `k` ratio given by
    /// the analytic estimate.
    pub lambda_hat_analytic: f64,
    /// `max |L^3 psi|_{alpha,delta} / (k inf L^3 psi)` over all samples.
    pub lambda_hat_empirical: f64,
    /// `Delta` from the analytic `lambda_hat`, when it lies in `(0, 1)`.
    pub diameter_bound: Option<f64>,
    /// `1 - e^{-Delta}`.
    pub contraction_factor: Option<f64>,
    pub diameter_bound_empirical: Option<f64>,
    pub contraction_factor_empirical: Option<f64>,
    /// `max Theta_k(L^3 phi, L^3 psi) / Theta_k(phi, psi)`.
    pub empirical_max_ratio: f64,
    pub empirical_mean_ratio: f64,
    pub pairs_sampled: usize,
    /// Pairs whose images both lie in the cone.
    pub pairs_mapped: usize,
    /// Mapped pairs with `Theta` increased beyond `1e-9` relative slack.
    pub violations: usize,
    /// Samples that failed membership after construction.
    pub rejected: usize,
    /// Every sample satisfied `sup psi <= (1 + m k diam^alpha) inf psi`.
    pub sup_bound_holds: bool,
    pub condition: ConditionReport,
}

/// `4 |L^3 1|_{alpha,delta} / inf L^3 1`, clamped to `[1, 1000]`.
pub fn auto_k(op: &TransferOperator, pairs: &PairSet) -> f64 {
    let f = op.apply_n(&op.grid().constant(1.0), 3);
    let m = cone_member(&f, pairs, f64::INFINITY);
    (4.0 * m.ratio).clamp(1.0, 1000.0)
}

/// Candidate values of `k` tried by [`calibrate_k`], in increasing order.
pub const K_LADDER: [f64; 10] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];

/// Pilot samples per rung of the ladder.
pub const PILOT_PAIRS: usize = 20;

/// Largest pilot `lambda_hat` accepted by [`calibrate_k`].
pub const PILOT_TARGET: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotStep {
    pub k: f64,
    pub lambda_hat_empirical: f64,
    pub empirical_max_ratio: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KCalibration {
    /// The value returned by [`auto_k`].
    pub heuristic: f64,
    pub k: f64,
    /// A rung met the pilot target; otherwise `k` is the top of the ladder.
    pub accepted: bool,
    pub steps: Vec<PilotStep>,
}

/// Walks [`K_LADDER`] from the heuristic value upward to the first `k` whose
/// pilot run has no violations and `lambda_hat <= PILOT_TARGET`, and returns
/// the rung above it as a margin against sampling noise.
pub fn calibrate_k(
    op: &TransferOperator,
    cp: &ConeParams,
    pairs: &PairSet,
    seed: u64,
) -> Result<KCalibration, ConeError> {
    let heuristic = auto_k(op, pairs);
    let pilot = ContractionOptions {
        n_pairs: PILOT_PAIRS,
        seed: derive_seed(seed, "cone-pilot"),
    };
    let mut rungs: Vec<f64> = vec![heuristic];
    rungs.extend(K_LADDER.iter().copied().filter(|&k| k > heuristic));
    let mut steps = Vec::new();
    for &k in &rungs {
        let r = empirical_contraction(op, &cp.with_k(k), pairs, &pilot)?;
        steps.push(PilotStep {
            k,
            lambda_hat_empirical: r.lambda_hat_empirical,
            empirical_max_ratio: r.empirical_max_ratio,
            violations: r.violations,
        });
        if r.violations == 0 && r.lambda_hat_empirical <= PILOT_TARGET {
            let next = K_LADDER.iter().copied().find(|&x| x > k).unwrap_or(k);
            return Ok(KCalibration {
                heuristic,
                k: next,
                accepted: true,
                steps,
            });
        }
    }
    Ok(KCalibration {
        heuristic,
        k: *rungs.last().unwrap_or(&heuristic),
        accepted: false,
        steps,
    })
}

/// `1 + a cos(w1 x + w2 y_hat + theta)` with `a` chosen so that the ratio is
/// a random fraction in `[0.2, 0.9]` of `k`.
pub fn sample_cone_function<R: Rng>(grid: &Grid, pairs: &PairSet, k: f64, rng: &mut R) -> GridFn {
    let params = *grid.params();
    let w1 = rng.random_range(0.0..60.0);
    let w2 = rng.random_range(0.0..12.0);
    let th = rng.random_range(0.0..2.0 * PI);
    let target = k * rng.random_range(0.2..0.9);
    let shape = grid.sample(|q| (w1 * q.x + w2 * q.chart_y(&params) + th).cos());
    let s1 = pairs.seminorm(&shape);
    let minc = shape.inf();
    let a = if s1 > 0.0 {
        target / (s1 - target * minc.min(0.0))
    } else {
        0.0
    };
    shape.map(|c| 1.0 + a * c)
}

struct PairOutcome {
    ratios_after: [f64; 2],
    rejected: usize,
    sup_ok: bool,
    ratio: Option<f64>,
    violation: bool,
}

pub fn empirical_contraction(
    op: &TransferOperator,
    cp: &ConeParams,
    pairs: &PairSet,
    opts: &ContractionOptions,
) -> Result<ConeCheckReport, ConeError> {
    let params = *op.params();
    cp.validate(&params)?;
    if opts.n_pairs < 10 {
        return Err(ConeError::TooFewPairs {
            min: 10,
            got: opts.n_pairs,
        });
    }
    let info = domain_info(&params, cp.delta)?;
    let condition = cone_condition(op.potential(), cp.alpha, &params, &info);
    let k = cp.k;
    let sup_factor = 1.0 + info.m as f64 * k * info.diam_q.powf(cp.alpha);
    let grid = op.grid();

    let outcomes = par::map_indexed(opts.n_pairs, |i| {
        let mut rng = item_rng(opts.seed, "cone", i as u64);
        let f = sample_cone_function(grid, pairs, k, &mut rng);
        let g = sample_cone_function(grid, pairs, k, &mut rng);
        let mut rejected = 0;
        let mut sup_ok = true;
        for s in [&f, &g] {
            let m = cone_member(s, pairs, k);
            if !m.member {
                rejected += 1;
            }
            sup_ok &= s.sup() <= sup_factor * s.inf() * (1.0 + 1e-12);
        }
        let lf = op.apply_n(&f, 3);
        let lg = op.apply_n(&g, 3);
        let mf = cone_member(&lf, pairs, k);
        let mg = cone_member(&lg, pairs, k);
        let ratios_after = [mf.ratio / k, mg.ratio / k];
        let mut ratio = None;
        let mut violation = false;
        if rejected == 0 && mf.member && mg.member {
            if let (Ok(t0), Ok(t1)) = (theta_k(&f, &g, pairs, k), theta_k(&lf, &lg, pairs, k)) {
                if t0.theta > 1e-12 {
                    let r = t1.theta / t0.theta;
                    violation = t1.theta > t0.theta * (1.0 + 1e-9);
                    ratio = Some(r);
                }
            }
        }
        PairOutcome {
            ratios_after,
            rejected,
            sup_ok,
            ratio,
            violation,
        }
    });

    let lambda_hat_empirical = outcomes.iter().flat_map(|o| o.ratios_after).fold(0.0, f64::max);
    let ratios: Vec<f64> = outcomes.iter().filter_map(|o| o.ratio).collect();
    let empirical_max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let empirical_mean_ratio = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let bound = |l: f64| diameter_bound(l, cp, &info).ok();
    let diameter = bound(condition.lhs);
    let diameter_emp = bound(lambda_hat_empirical);
    Ok(ConeCheckReport {
        k,
        delta: cp.delta,
        alpha: cp.alpha,
        cells: grid.len(),
        pair_count: pairs.len(),
        pair_stride: pairs.stride,
        lambda_hat_analytic: condition.lhs,
        lambda_hat_empirical,
        diameter_bound: diameter,
        contraction_factor: diameter.map(|d| 1.0 - (-d).exp()),
        diameter_bound_empirical: diameter_emp,
        contraction_factor_empirical: diameter_emp.map(|d| 1.0 - (-d).exp()),
        empirical_max_ratio,
        empirical_mean_ratio,
        pairs_sampled: opts.n_pairs,
        pairs_mapped: ratios.len(),
        violations: outcomes.iter().filter(|o| o.violation).count(),
        rejected: outcomes.iter().map(|o| o.rejected).sum(),
        sup_bound_holds: outcomes.iter().all(|o| o.sup_ok),
        condition,
    })
}
