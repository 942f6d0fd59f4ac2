//! Adversarial probe: search for pairs of admissible matrices that agree on
//! the revealed entries of a mask yet differ strongly overall.
//!
//! If two matrices of rank at most `K` with entries in `[-L, L]` coincide on
//! every revealed entry but are far apart in averaged Frobenius norm, no
//! estimator can recover matrices of that class stably from the mask. The
//! probe runs a multi-start projected gradient ascent over factor pairs
//! `A = U1 V1^T`, `B = U2 V2^T` and additionally evaluates a constructed
//! witness (`A = 0`, `B` supported on the hidden entries) whenever that
//! witness satisfies the rank bound.

use mclab_core::matcore::svd;
use mclab_core::{Mask, Mat, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Knobs for [`probe_stable_recovery`].
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Rank bound `K` on both matrices of the pair.
    pub rank: usize,
    /// Box bound `L`; every entry of both matrices stays in `[-L, L]`.
    pub box_bound: f64,
    pub seed: u64,
    /// Number of independent ascent starts.
    pub starts: usize,
    /// Ascent iterations per start.
    pub iters: usize,
    /// Penalty weight on the revealed-entry mismatch in the ascent objective.
    pub lambda: f64,
    /// A pair counts as feasible when its revealed-entry difference is below
    /// this tolerance.
    pub masked_tol: f64,
    /// Overall difference that turns a feasible pair into a violation.
    pub full_threshold: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            rank: 3,
            box_bound: 1.0,
            seed: 0,
            starts: 8,
            iters: 200,
            lambda: 10.0,
            masked_tol: 1e-6,
            full_threshold: 0.1,
        }
    }
}

/// Outcome classification of a probe run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeVerdict {
    /// No admissible pair with matching revealed entries and a large overall
    /// gap was found.
    #[serde(rename = "stable-looking")]
    StableLooking,
    /// A concrete pair certifies that the mask cannot support stable
    /// recovery of this matrix class.
    #[serde(rename = "violation-found")]
    ViolationFound,
}

/// One progress sample of an ascent start.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeLogEntry {
    pub start: usize,
    pub iter: usize,
    pub objective: f64,
}

/// Result of [`probe_stable_recovery`], including the witness pair behind
/// the reported numbers.
#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    /// Revealed-entry difference of the reported pair (averaged Frobenius).
    pub masked_diff: f64,
    /// Overall difference of the reported pair (averaged Frobenius).
    pub full_diff: f64,
    pub verdict: ProbeVerdict,
    pub witness_a: Mat,
    pub witness_b: Mat,
    pub log: Vec<ProbeLogEntry>,
}

struct Candidate {
    masked: f64,
    full: f64,
    a: Mat,
    b: Mat,
}

/// `(m x k) * (n x k)^T` product of a factor pair.
fn factor_product(u: &Mat, v: &Mat) -> Mat {
    let k = u.cols();
    Mat::from_fn(u.rows(), v.rows(), |i, j| {
        (0..k).map(|r| u.get(i, r) * v.get(j, r)).sum()
    })
}

/// Scales a factor pair in place (returning fresh matrices) so that the
/// product satisfies the box bound. Scaling preserves the rank bound, which
/// entrywise clipping would not.
fn rescale_to_box(u: &Mat, v: &Mat, product: &Mat, box_bound: f64) -> Option<(Mat, Mat, Mat)> {
    let linf = product.linf_norm();
    if linf <= box_bound {
        return None;
    }
    let s = (box_bound / linf).sqrt();
    Some((u.scale(s), v.scale(s), product.scale(s * s)))
}

fn evaluate(mask: &Mask, a: &Mat, b: &Mat) -> Result<(f64, f64)> {
    let d = a.sub(b);
    let masked = d.hadamard(mask.matrix())?.avg_frobenius();
    Ok((masked, d.avg_frobenius()))
}

/// Gradient of `||D||_avgF` at `D`, i.e. `D / (||D||_F * sqrt(mn))`, with a
/// zero subgradient at the origin.
fn avg_frob_grad(d: &Mat) -> Mat {
    let f = d.frobenius();
    if f < 1e-14 {
        return Mat::zeros(d.rows(), d.cols());
    }
    let denom = f * ((d.rows() * d.cols()) as f64).sqrt();
    d.scale(1.0 / denom)
}

/// Applies a normalized gradient step `factor + step * g / ||g||_F`.
fn step_factor(factor: &Mat, g: &Mat, step: f64) -> Mat {
    let norm = g.frobenius();
    if norm < 1e-14 {
        return factor.clone();
    }
    factor.add(&g.scale(step / norm))
}

fn ascend_one_start(
    mask: &Mask,
    cfg: &ProbeConfig,
    start: usize,
) -> Result<(Candidate, Vec<ProbeLogEntry>)> {
    let (m, n) = (mask.rows(), mask.cols());
    let k = cfg.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(
        cfg.seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let mut init = |rows: usize| -> Mat {
        Mat::from_fn(rows, k, |_, _| rng.gen_range(-0.7..0.7))
    };
    let mut u1 = init(m);
    let mut v1 = init(n);
    let mut u2 = init(m);
    let mut v2 = init(n);

    let clamp = |u: &mut Mat, v: &mut Mat, prod: &mut Mat| {
        if let Some((nu, nv, np)) = rescale_to_box(u, v, prod, cfg.box_bound) {
            *u = nu;
            *v = nv;
            *prod = np;
        }
    };

    let mut a = factor_product(&u1, &v1);
    let mut b = factor_product(&u2, &v2);
    clamp(&mut u1, &mut v1, &mut a);
    clamp(&mut u2, &mut v2, &mut b);

    let mut log = Vec::new();
    let mut best: Option<(f64, Candidate)> = None;
    let step = 0.05;

    for iter in 0..cfg.iters {
        let d = a.sub(&b);
        let masked_d = d.hadamard(mask.matrix())?;
        let masked = masked_d.avg_frobenius();
        let full = d.avg_frobenius();
        let objective = full - cfg.lambda * masked;

        if best.as_ref().is_none_or(|(obj, _)| objective > *obj) {
            best = Some((
                objective,
                Candidate {
                    masked,
                    full,
                    a: a.clone(),
                    b: b.clone(),
                },
            ));
        }
        if iter % 50 == 0 {
            log.push(ProbeLogEntry {
                start,
                iter,
                objective,
            });
        }

        // Ascent direction on the pair difference; chain rule through the
        // factor products.
        let g = avg_frob_grad(&d)
            .sub(&avg_frob_grad(&masked_d).hadamard(mask.matrix())?.scale(cfg.lambda));
        let grad_u1 = Mat::from_fn(m, k, |i, r| (0..n).map(|j| g.get(i, j) * v1.get(j, r)).sum());
        let grad_v1 = Mat::from_fn(n, k, |j, r| (0..m).map(|i| g.get(i, j) * u1.get(i, r)).sum());
        let grad_u2 = Mat::from_fn(m, k, |i, r| (0..n).map(|j| -g.get(i, j) * v2.get(j, r)).sum());
        let grad_v2 = Mat::from_fn(n, k, |j, r| (0..m).map(|i| -g.get(i, j) * u2.get(i, r)).sum());
        u1 = step_factor(&u1, &grad_u1, step);
        v1 = step_factor(&v1, &grad_v1, step);
        u2 = step_factor(&u2, &grad_u2, step);
        v2 = step_factor(&v2, &grad_v2, step);

        a = factor_product(&u1, &v1);
        b = factor_product(&u2, &v2);
        clamp(&mut u1, &mut v1, &mut a);
        clamp(&mut u2, &mut v2, &mut b);
    }

    let (final_obj, best_candidate) = best.expect("at least one iteration ran");
    log.push(ProbeLogEntry {
        start,
        iter: cfg.iters,
        objective: final_obj,
    });
    Ok((best_candidate, log))
}

/// Builds the constructed witness (`A = 0`, `B` equal to the hidden-entry
/// indicator scaled into the box) when it satisfies the rank bound.
fn constructed_witness(mask: &Mask, cfg: &ProbeConfig) -> Option<(Mat, Mat)> {
    let hidden = mask.complement();
    let scale = cfg.box_bound.min(1.0);
    let b = hidden.matrix().scale(scale);
    if svd(&b).rank() > cfg.rank {
        return None;
    }
    Some((Mat::zeros(mask.rows(), mask.cols()), b))
}

/// Searches for admissible pairs that witness unrecoverability of the mask.
///
/// The reported pair is the one with the largest overall difference among
/// all candidates whose revealed-entry difference is within `masked_tol`;
/// if no candidate is feasible, the pair with the best ascent objective is
/// reported instead. The verdict is [`ProbeVerdict::ViolationFound`] exactly
/// when a feasible candidate reaches `full_threshold`.
pub fn probe_stable_recovery(mask: &Mask, cfg: &ProbeConfig) -> Result<ProbeOutcome> {
    if cfg.rank < 1 {
        return Err(mclab_core::Error::InvalidInput(
            "probe rank bound must be at least 1".into(),
        ));
    }
    if !(cfg.box_bound > 0.0) {
        return Err(mclab_core::Error::InvalidInput(
            "probe box bound must be positive".into(),
        ));
    }

    let mut pool: Vec<Candidate> = Vec::new();
    let mut log: Vec<ProbeLogEntry> = Vec::new();

    if let Some((a, b)) = constructed_witness(mask, cfg) {
        let (masked, full) = evaluate(mask, &a, &b)?;
        pool.push(Candidate {
            masked,
            full,
            a,
            b,
        });
    }

    let ascent: Result<Vec<(Candidate, Vec<ProbeLogEntry>)>> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| ascend_one_start(mask, cfg, s))
        .collect();
    for (cand, entries) in ascent? {
        pool.push(cand);
        log.extend(entries);
    }

    // Deterministic argmax: strict improvement keeps the earliest maximizer.
    let feasible: Vec<usize> = (0..pool.len())
        .filter(|&i| pool[i].masked <= cfg.masked_tol)
        .collect();
    let chosen = if feasible.is_empty() {
        let mut best = 0;
        for i in 1..pool.len() {
            let obj = |c: &Candidate| c.full - cfg.lambda * c.masked;
            if obj(&pool[i]) > obj(&pool[best]) {
                best = i;
            }
        }
        best
    } else {
        let mut best = feasible[0];
        for &i in &feasible[1..] {
            if pool[i].full > pool[best].full {
                best = i;
            }
        }
        best
    };

    let violation = feasible
        .iter()
        .any(|&i| pool[i].full >= cfg.full_threshold);
    let c = &pool[chosen];
    Ok(ProbeOutcome {
        masked_diff: c.masked,
        full_diff: c.full,
        verdict: if violation {
            ProbeVerdict::ViolationFound
        } else {
            ProbeVerdict::StableLooking
        },
        witness_a: c.a.clone(),
        witness_b: c.b.clone(),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mclab_core::graphon::{gen_half_rows, gen_parity, gen_quasirandom};
    use mclab_core::matcore::RevealMask;

    #[test]
    fn half_rows_mask_yields_violation() {
        let mask: Mask = gen_half_rows(16).unwrap();
        let out = probe_stable_recovery(&mask, &ProbeConfig::default()).unwrap();
        assert_eq!(out.verdict, ProbeVerdict::ViolationFound);
        assert!(out.masked_diff <= 1e-6);
        // The constructed witness alone already gives 1/sqrt(2).
        assert!(out.full_diff >= 0.5, "full diff {}", out.full_diff);
        // Witness pair must agree on revealed entries and be admissible.
        let d = out.witness_a.sub(&out.witness_b);
        assert!(d.hadamard(mask.matrix()).unwrap().avg_frobenius() <= 1e-6);
        assert!(out.witness_a.linf_norm() <= 1.0 + 1e-9);
        assert!(out.witness_b.linf_norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn parity_mask_yields_violation() {
        let mask: Mask = gen_parity(16).unwrap();
        let out = probe_stable_recovery(&mask, &ProbeConfig::default()).unwrap();
        assert_eq!(out.verdict, ProbeVerdict::ViolationFound);
        assert!(out.full_diff >= 0.5);
    }

    #[test]
    fn full_reveal_looks_stable() {
        let mask: Mask = RevealMask::from_fn(12, 12, |_, _| true);
        let out = probe_stable_recovery(&mask, &ProbeConfig::default()).unwrap();
        assert_eq!(out.verdict, ProbeVerdict::StableLooking);
    }

    #[test]
    fn quasirandom_mask_looks_stable_at_moderate_rank() {
        let mask: Mask = gen_quasirandom(24, 0.5).unwrap();
        let cfg = ProbeConfig {
            rank: 2,
            starts: 4,
            iters: 120,
            ..ProbeConfig::default()
        };
        let out = probe_stable_recovery(&mask, &cfg).unwrap();
        assert_eq!(out.verdict, ProbeVerdict::StableLooking);
    }

    #[test]
    fn deterministic_given_seed() {
        let mask: Mask = gen_quasirandom(16, 0.4).unwrap();
        let cfg = ProbeConfig {
            starts: 3,
            iters: 60,
            ..ProbeConfig::default()
        };
        let a = probe_stable_recovery(&mask, &cfg).unwrap();
        let b = probe_stable_recovery(&mask, &cfg).unwrap();
        assert_eq!(a.masked_diff, b.masked_diff);
        assert_eq!(a.full_diff, b.full_diff);
        assert_eq!(a.witness_a, b.witness_a);
        assert_eq!(a.witness_b, b.witness_b);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mask: Mask = gen_half_rows(4).unwrap();
        let bad = ProbeConfig {
            rank: 0,
            ..ProbeConfig::default()
        };
        assert!(probe_stable_recovery(&mask, &bad).is_err());
    }
}
