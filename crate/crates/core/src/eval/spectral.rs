use crate::graph::NormalizedMatrix;
use crate::rank::{wec_power_iteration, RankedList};

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Residuals below this are treated as converged when estimating decay.
const RESIDUAL_FLOOR: f64 = 1e-10;
const RATIO_WINDOW: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaEstimate {
    /// Geometric-mean decay rate of `|x(t) - pi|_1`.
    pub lambda: f64,
    /// Ratios used; zero means convergence was immediate.
    pub samples: usize,
    /// The residual did not decay.
    pub periodic: bool,
}

/// Second-eigenvalue magnitude from the decay of `|v0 W^t - pi|_1` over the
/// last 20 iterations before the residual reaches `1e-10`. `pi` must be
/// accurate well below that floor.
pub fn estimate_lambda(w: &NormalizedMatrix, v0: &[f64], pi: &[f64], cap: usize) -> LambdaEstimate {
    let mut x = v0.to_vec();
    let mut next = vec![0.0; x.len()];
    let mut residuals = vec![l1(&x, pi)];
    while residuals.len() <= cap && *residuals.last().unwrap() > RESIDUAL_FLOOR {
        w.apply(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        residuals.push(l1(&x, pi));
    }
    // residuals[..last] are all above the floor
    let above = residuals.iter().take_while(|&&r| r > RESIDUAL_FLOOR).count();
    if above < 2 {
        return LambdaEstimate { lambda: 0.0, samples: 0, periodic: false };
    }
    let samples = (above - 1).min(RATIO_WINDOW);
    let last = above - 1;
    let lambda = (residuals[last] / residuals[last - samples]).powf(1.0 / samples as f64);
    let periodic = lambda >= 1.0 - 1e-6;
    if periodic {
        log::warn!("residual does not decay (ratio {lambda}); the chain looks periodic");
    }
    LambdaEstimate { lambda: lambda.min(1.0), samples, periodic }
}

/// Tail fit of a power law `P(X >= x) ~ x^(1 - gamma)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerLawFit {
    /// Continuous maximum-likelihood exponent.
    pub gamma: f64,
    pub xmin: f64,
    pub tail: usize,
    /// `(x, P(X >= x))` on a log-spaced grid of tail points.
    pub ccdf: Vec<(f64, f64)>,
    /// Coefficient of determination of a line through the log-log CCDF.
    pub r_squared: f64,
    pub slope: f64,
    pub reliable: bool,
    pub degenerate: bool,
}

const MIN_TAIL: usize = 50;
const CCDF_POINTS: usize = 60;

/// Least-squares line through `(x, y)`; returns `(slope, r^2)`.
pub(crate) fn line_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}

/// Hill estimate over the values at or above `xmin`.
pub fn fit_power_law(values: &[f64], xmin: f64) -> PowerLawFit {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let total = sorted.len();
    let tail: Vec<f64> = sorted.iter().copied().take_while(|&v| v >= xmin && v > 0.0).collect();
    let log_sum: f64 = tail.iter().map(|&v| (v / xmin).ln()).sum();
    let degenerate = tail.is_empty() || tail.first() == tail.last() || log_sum <= 0.0;
    let gamma = if degenerate { f64::NAN } else { 1.0 + tail.len() as f64 / log_sum };

    let mut ccdf = Vec::new();
    if !tail.is_empty() {
        let step = (tail.len() as f64).ln() / CCDF_POINTS as f64;
        let mut last = usize::MAX;
        for i in 0..=CCDF_POINTS {
            let rank = ((i as f64 * step).exp().round() as usize).clamp(1, tail.len());
            if rank != last {
                ccdf.push((tail[rank - 1], rank as f64 / total as f64));
                last = rank;
            }
        }
    }
    let logs: Vec<(f64, f64)> = ccdf.iter().map(|&(x, p)| (x.ln(), p.ln())).collect();
    let (slope, r_squared) = if degenerate { (f64::NAN, 0.0) } else { line_fit(&logs).unwrap_or((f64::NAN, 0.0)) };
    let reliable = !degenerate && tail.len() >= MIN_TAIL;
    if !reliable {
        log::warn!("power-law fit unreliable: {} tail points above {xmin}", tail.len());
    }
    PowerLawFit { gamma, xmin, tail: tail.len(), ccdf, r_squared, slope, reliable, degenerate }
}

/// Relative gaps between consecutive sorted scores.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeGaps {
    /// Scores, largest first.
    pub tau: Vec<f64>,
    /// `gaps[k - 1] = (tau_k - tau_{k+1}) / tau_k` for `k = 1..n-1`.
    pub gaps: Vec<f64>,
}

impl RelativeGaps {
    /// Gap of the `k`-ranked score (1-based).
    pub fn gap(&self, k: usize) -> f64 {
        self.gaps[k - 1]
    }

    /// Least-squares slope of `ln gap` against `ln k` for `k` in
    /// `[lo, hi]`, skipping zero gaps.
    pub fn slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let hi = hi.min(self.gaps.len());
        let points: Vec<(f64, f64)> = (lo.max(1)..=hi)
            .filter(|&k| self.gap(k) > 0.0)
            .map(|k| ((k as f64).ln(), self.gap(k).ln()))
            .collect();
        line_fit(&points).map(|(s, _)| s)
    }

    /// Slope over `k` in `[10, n / 10]`.
    pub fn default_slope(&self) -> Option<f64> {
        self.slope(10, self.tau.len() / 10)
    }

    /// Whether `gap(1) > gap(2) > .. > gap(k)`.
    pub fn strictly_decreasing_to(&self, k: usize) -> bool {
        k <= self.gaps.len() && self.gaps[..k].windows(2).all(|w| w[0] > w[1])
    }
}

pub fn relative_gap_curve(pi: &[f64]) -> RelativeGaps {
    let mut tau = pi.to_vec();
    tau.sort_by(|a, b| b.total_cmp(a));
    let gaps = tau.windows(2).map(|w| if w[0] > 0.0 { (w[0] - w[1]) / w[0] } else { 0.0 }).collect();
    RelativeGaps { tau, gaps }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub k: usize,
    /// Relative gaps were not strictly decreasing up to `k`; nothing checked.
    pub skipped: bool,
    pub lambda: LambdaEstimate,
    pub gap_k: f64,
    /// First `t` with `lambda^t <= gap_k / 2`.
    pub predicted: usize,
    /// Last iteration whose top list differed from the converged one, plus one.
    pub first_stable: usize,
    /// Iterations at or after `predicted` whose top list differed.
    pub violations: Vec<usize>,
    pub converged_at: usize,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        !self.skipped && self.violations.is_empty()
    }
}

fn predicted_iteration(lambda: f64, target: f64) -> usize {
    if lambda <= 0.0 {
        return 1;
    }
    let mut t = ((target.ln() / lambda.ln()).ceil() as usize).max(1);
    while t > 1 && lambda.powi(t as i32 - 1) <= target {
        t -= 1;
    }
    while lambda.powi(t as i32) > target {
        t += 1;
    }
    t
}

/// Runs distribution from `v0` to convergence at `nu` and checks that the
/// ordered top-`k` list never changes once `lambda^t <= gap_k / 2`.
pub fn theorem1_check(w: &NormalizedMatrix, v0: &[f64], k: usize, nu: f64, cap: usize) -> Theorem1Report {
    let run = wec_power_iteration(w, v0, nu, cap);
    let gaps = relative_gap_curve(&run.credits);
    let k = k.min(gaps.gaps.len());
    let lambda = estimate_lambda(w, v0, &run.credits, cap);
    let gap_k = gaps.gap(k);
    let predicted = predicted_iteration(lambda.lambda, gap_k / 2.0);
    let mut report = Theorem1Report {
        k,
        skipped: !gaps.strictly_decreasing_to(k),
        lambda,
        gap_k,
        predicted,
        first_stable: 0,
        violations: Vec::new(),
        converged_at: run.iterations,
    };
    if report.skipped {
        return report;
    }
    let truth = RankedList::from_credits(&run.credits);
    let want = truth.top(k).to_vec();
    let mut x = v0.to_vec();
    let mut next = vec![0.0; x.len()];
    let mut ranking = RankedList::from_credits(&x);
    for t in 1..=run.iterations {
        w.apply(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        ranking = ranking.rerank(&x);
        if ranking.top(k) != want.as_slice() {
            report.first_stable = t + 1;
            if t >= predicted {
                report.violations.push(t);
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    /// `sqrt(chi2(v0, pi) / min pi)`, the start vector's spectral constant.
    pub constant: f64,
    /// Largest `e'(t) / (constant * lambda^t)` seen after the burn-in.
    pub worst_ratio: f64,
    pub checked: usize,
}

impl Lemma1Report {
    pub fn passed(&self, slack: f64) -> bool {
        self.worst_ratio <= 1.0 + slack
    }
}

/// Largest relative error over users, `max_j |x_j - pi_j| / pi_j`.
fn relative_error(x: &[f64], pi: &[f64]) -> f64 {
    x.iter().zip(pi).filter(|(_, &p)| p > 0.0).map(|(a, p)| (a - p).abs() / p).fold(0.0, f64::max)
}

/// Tracks the largest relative error against `constant * lambda^t` from
/// `burn_in` on, until the error falls below `floor`. For a reversible
/// chain the bound holds at every `t`.
pub fn lemma1_check(
    w: &NormalizedMatrix,
    v0: &[f64],
    pi: &[f64],
    lambda: f64,
    burn_in: usize,
    floor: f64,
    cap: usize,
) -> Lemma1Report {
    let chi2: f64 = v0.iter().zip(pi).filter(|(_, &p)| p > 0.0).map(|(x, p)| x * x / p).sum::<f64>() - 1.0;
    let pi_min = pi.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min);
    let constant = (chi2.max(0.0) / pi_min).sqrt();
    let mut report = Lemma1Report { constant, worst_ratio: 0.0, checked: 0 };
    if !(constant > 0.0) || lambda <= 0.0 {
        return report;
    }
    let mut x = v0.to_vec();
    let mut next = vec![0.0; x.len()];
    for t in 1..=cap {
        w.apply(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        if t <= burn_in {
            continue;
        }
        let err = relative_error(&x, pi);
        if err < floor {
            break;
        }
        report.worst_ratio = report.worst_ratio.max(err / (constant * lambda.powi(t as i32)));
        report.checked += 1;
    }
    report
}
