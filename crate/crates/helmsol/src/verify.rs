//! Numerical verification: finite-difference residuals of the fundamental
//! solutions against the differential equation, residuals of the branch
//! solutions against the underlying hypergeometric system, power-law fits of
//! the singularity strength, and a randomized check of the summation
//! identity used by the normalization constant.
//!
//! Every stencil evaluation within one report uses a single frozen
//! evaluation configuration (truncation level or quadrature step) chosen at
//! the center point. Adaptive truncation switching between stencil points
//! would inject noise of the order of the tolerance, which the 1/h^2
//! amplification of second differences turns into garbage; with the
//! configuration frozen the evaluated function is smooth and the O(h^2)
//! convergence of the residual is observable.

use crate::error::{Error, Result};
use crate::fundsol::{q_assembly, sigma_map, Parameters, PointPair};
use crate::quad::{
    branch_shifted_params, h43_0_deep_adaptive, h43_0_deep_fixed, h43_0_direct,
    h43_0_direct_fixed, h43_0_expansion_fixed, h43_0_regularized, BranchSpec,
    ConfluentParams, GaussMemo, QuadArgs, SolutionIndex,
};
use crate::series::{gamma, gamma_ratio, gauss_at_one_accelerated, SeriesOptions};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of one finite-difference residual measurement.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub point: Vec<f64>,
    pub h: f64,
    pub residual: f64,
    pub normalized_residual: f64,
    pub order_estimate: f64,
}

/// Outcome of a singularity-strength fit along a ray into the source point.
#[derive(Clone, Copy, Debug)]
pub struct SingularityFit {
    pub slope: f64,
    pub constant: f64,
    pub reference: f64,
}

/// Radii used by the command-line fit when none are given: log-spaced,
/// spanning two decades.
pub const DEFAULT_RADII: [f64; 7] = [0.1, 0.0464, 0.0215, 0.01, 0.00464, 0.00215, 0.001];

// ---------------------------------------------------------------------------
// Small least-squares helper (normal equations, at most 3 unknowns)

fn lsq(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let ncol = rows[0].len();
    let mut m = vec![vec![0.0; ncol]; ncol];
    let mut v = vec![0.0; ncol];
    for (row, &yi) in rows.iter().zip(y) {
        for r in 0..ncol {
            for c in 0..ncol {
                m[r][c] += row[r] * row[c];
            }
            v[r] += row[r] * yi;
        }
    }
    for c in 0..ncol {
        let piv = (c..ncol).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, piv);
        v.swap(c, piv);
        for r in c + 1..ncol {
            let f = m[r][c] / m[c][c];
            for cc in c..ncol {
                m[r][cc] -= f * m[c][cc];
            }
            v[r] -= f * v[c];
        }
    }
    let mut out = vec![0.0; ncol];
    for r in (0..ncol).rev() {
        let s: f64 = (r + 1..ncol).map(|c| m[r][c] * out[c]).sum();
        out[r] = (v[r] - s) / m[r][r];
    }
    out
}

/// Least-squares slope of ln|value| against ln h; near-zero values are
/// floored so synthetic exact cases do not produce infinities.
fn order_slope(hs: &[f64], values: &[f64]) -> f64 {
    let rows: Vec<Vec<f64>> = hs.iter().map(|&h| vec![1.0, h.ln()]).collect();
    let y: Vec<f64> = values.iter().map(|&v| v.abs().max(1e-300).ln()).collect();
    lsq(&rows, &y)[1]
}

// ---------------------------------------------------------------------------
// Frozen evaluation of the fundamental solutions

/// One evaluation configuration locked for a whole stencil.
#[derive(Clone, Copy, Debug)]
enum FrozenEval {
    Direct { level: u32 },
    Expansion { level: u32 },
    Deep { hs: f64 },
}

/// Probe the center point, choose the representation the auto path would
/// use, and freeze its truncation so every stencil evaluation is smooth.
fn freeze_config(cp: &ConfluentParams, args: &QuadArgs) -> Result<FrozenEval> {
    let tight = SeriesOptions { rel_tol: 1e-12, max_level: 600, max_terms: 200_000_000 };
    if args.abs_sum_xyz() <= 0.7 {
        let r = h43_0_direct(cp, args, &tight)?;
        return Ok(FrozenEval::Direct { level: r.level_used + 8 });
    }
    if args.x <= 0.0 && args.y <= 0.0 && args.z <= 0.0 && args.t <= 0.0 {
        let (_, _, hs) = h43_0_deep_adaptive(cp, args, 1e-13)?;
        return Ok(FrozenEval::Deep { hs });
    }
    // a frozen truncation varies smoothly across the stencil, so its error
    // largely cancels in the differences; the probe can stay looser than the
    // direct and integral ones, which keeps the per-evaluation level (and the
    // sixth-power cost that goes with it) affordable
    let loose = SeriesOptions { rel_tol: 1e-9, max_level: 400, max_terms: 200_000_000 };
    let r = h43_0_regularized(cp, args, &loose)?;
    Ok(FrozenEval::Expansion { level: r.level_used + 10 })
}

fn frozen_h(cp: &ConfluentParams, args: &QuadArgs, eval: FrozenEval) -> Result<f64> {
    match eval {
        FrozenEval::Direct { level } => h43_0_direct_fixed(cp, args, level),
        FrozenEval::Expansion { level } => {
            let mut memo = GaussMemo::new();
            h43_0_expansion_fixed(cp, args, level, true, &mut memo)
        }
        FrozenEval::Deep { hs } => h43_0_deep_fixed(cp, args, hs),
    }
}

// ---------------------------------------------------------------------------
// PDE residual

/// Central-difference residual of a scalar field u against
/// sum_i u_xixi + sum_j (2 alpha_j / x_j) u_xj - mu u at one step size.
/// Returns (residual, residual normalized by the largest term magnitude).
pub(crate) fn second_order_residual(
    u: &dyn Fn(&[f64]) -> Result<f64>,
    alpha: &[f64; 3],
    mu: f64,
    x: &[f64],
    h: f64,
) -> Result<(f64, f64)> {
    let u0 = u(x)?;
    let mut residual = -mu * u0;
    let mut scale = u0.abs().max((mu * u0).abs());
    let mut pt = x.to_vec();
    for i in 0..x.len() {
        pt[i] = x[i] + h;
        let up = u(&pt)?;
        pt[i] = x[i] - h;
        let um = u(&pt)?;
        pt[i] = x[i];
        let uxx = (up - 2.0 * u0 + um) / (h * h);
        residual += uxx;
        scale = scale.max(uxx.abs());
        if i < 3 && alpha[i] != 0.0 {
            let ux = (up - um) / (2.0 * h);
            let term = 2.0 * alpha[i] / x[i] * ux;
            residual += term;
            scale = scale.max(term.abs());
        }
    }
    Ok((residual, residual / scale.max(f64::MIN_POSITIVE)))
}

/// Finite-difference residual of fundamental solution i against the
/// differential equation at a point pair, measured at h, h/2, h/4; the
/// report carries the base-h residual and the observed convergence order.
pub fn pde_residual(
    i: SolutionIndex,
    pt: &PointPair,
    prm: &Parameters,
    h: f64,
) -> Result<ResidualReport> {
    let sc = sigma_map(pt, prm)?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    let min_sing = pt.x.iter().take(3).cloned().fold(f64::INFINITY, f64::min);
    let r = sc.r2.sqrt();
    if h >= 0.5 * min_sing || h >= 0.25 * r {
        return Err(Error::Domain(format!(
            "step {h} would push the stencil against a boundary (min coordinate {min_sing}, separation {r})"
        )));
    }
    let asm = q_assembly(i, prm);
    let args = QuadArgs::new(sc.sigma[0], sc.sigma[1], sc.sigma[2], sc.sigma[3]);
    let frozen = freeze_config(&asm.cp, &args)?;
    let x0 = pt.x0.clone();
    let mu = prm.mu;
    let u = move |x: &[f64]| -> Result<f64> {
        let r2: f64 = x.iter().zip(&x0).map(|(a, b)| (a - b) * (a - b)).sum();
        let mut sigma = [0.0; 4];
        for k in 0..3 {
            sigma[k] = -4.0 * x[k] * x0[k] / r2;
        }
        sigma[3] = -mu * r2 / 4.0;
        let args = QuadArgs::new(sigma[0], sigma[1], sigma[2], sigma[3]);
        let hval = frozen_h(&asm.cp, &args, frozen)?;
        let mut pre = r2.powf(asm.r2_exponent);
        for k in 0..3 {
            if asm.axis_exponents[k] != 0.0 {
                pre *= (x[k] * x0[k]).powf(asm.axis_exponents[k]);
            }
        }
        Ok(pre * hval)
    };
    let steps = [h, h / 2.0, h / 4.0];
    let mut normalized = [0.0; 3];
    let mut base = (0.0, 0.0);
    for (s, &hh) in steps.iter().enumerate() {
        let (res, nr) = second_order_residual(&u, &prm.alpha, prm.mu, &pt.x, hh)?;
        normalized[s] = nr;
        if s == 0 {
            base = (res, nr);
        }
    }
    Ok(ResidualReport {
        point: pt.x.clone(),
        h,
        residual: base.0,
        normalized_residual: base.1,
        order_estimate: order_slope(&steps, &normalized),
    })
}

// ---------------------------------------------------------------------------
// Hypergeometric-system residual

/// All first and second partials of a quadrivariate scalar field from a
/// 33-point central stencil at step h.
struct Partials {
    w: f64,
    d1: [f64; 4],
    d2: [f64; 4],
    mixed: [[f64; 4]; 4],
}

fn stencil_partials(
    f: &dyn Fn(&QuadArgs) -> Result<f64>,
    c: &QuadArgs,
    h: f64,
) -> Result<Partials> {
    let at = |dx: f64, dy: f64, dz: f64, dt: f64| -> Result<f64> {
        f(&QuadArgs::new(c.x + dx, c.y + dy, c.z + dz, c.t + dt))
    };
    let w = at(0.0, 0.0, 0.0, 0.0)?;
    let mut plus = [0.0; 4];
    let mut minus = [0.0; 4];
    for v in 0..4 {
        let mut d = [0.0; 4];
        d[v] = h;
        plus[v] = at(d[0], d[1], d[2], d[3])?;
        minus[v] = at(-d[0], -d[1], -d[2], -d[3])?;
    }
    let mut d1 = [0.0; 4];
    let mut d2 = [0.0; 4];
    for v in 0..4 {
        d1[v] = (plus[v] - minus[v]) / (2.0 * h);
        d2[v] = (plus[v] - 2.0 * w + minus[v]) / (h * h);
    }
    let mut mixed = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in a + 1..4 {
            let mut dpp = [0.0; 4];
            dpp[a] = h;
            dpp[b] = h;
            let fpp = at(dpp[0], dpp[1], dpp[2], dpp[3])?;
            let mut dpm = [0.0; 4];
            dpm[a] = h;
            dpm[b] = -h;
            let fpm = at(dpm[0], dpm[1], dpm[2], dpm[3])?;
            let mut dmp = [0.0; 4];
            dmp[a] = -h;
            dmp[b] = h;
            let fmp = at(dmp[0], dmp[1], dmp[2], dmp[3])?;
            let mut dmm = [0.0; 4];
            dmm[a] = -h;
            dmm[b] = -h;
            let fmm = at(dmm[0], dmm[1], dmm[2], dmm[3])?;
            let m = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            mixed[a][b] = m;
            mixed[b][a] = m;
        }
    }
    Ok(Partials { w, d1, d2, mixed })
}

/// The four equations of the hypergeometric system applied to stencil
/// partials; returns (residual, normalized residual) per row.
fn system_rows(p: &ConfluentParams, c: &QuadArgs, pr: &Partials) -> [(f64, f64); 4] {
    let (a, b, d) = (p.a, &p.b, &p.d);
    let (x, y, z, t) = (c.x, c.y, c.z, c.t);
    let (wx, wy, wz, wt) = (pr.d1[0], pr.d1[1], pr.d1[2], pr.d1[3]);
    let row = |terms: &[f64]| -> (f64, f64) {
        let residual: f64 = terms.iter().sum();
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        (residual, residual / scale.max(f64::MIN_POSITIVE))
    };
    let r1 = row(&[
        x * (1.0 - x) * pr.d2[0],
        -x * y * pr.mixed[0][1],
        -x * z * pr.mixed[0][2],
        x * t * pr.mixed[0][3],
        (d[0] - (a + b[0] + 1.0) * x) * wx,
        -b[0] * y * wy,
        -b[0] * z * wz,
        b[0] * t * wt,
        -a * b[0] * pr.w,
    ]);
    let r2 = row(&[
        y * (1.0 - y) * pr.d2[1],
        -x * y * pr.mixed[0][1],
        -y * z * pr.mixed[1][2],
        y * t * pr.mixed[1][3],
        -b[1] * x * wx,
        (d[1] - (a + b[1] + 1.0) * y) * wy,
        -b[1] * z * wz,
        b[1] * t * wt,
        -a * b[1] * pr.w,
    ]);
    let r3 = row(&[
        z * (1.0 - z) * pr.d2[2],
        -x * z * pr.mixed[0][2],
        -y * z * pr.mixed[1][2],
        z * t * pr.mixed[2][3],
        -b[2] * x * wx,
        -b[2] * y * wy,
        (d[2] - (a + b[2] + 1.0) * z) * wz,
        b[2] * t * wt,
        -a * b[2] * pr.w,
    ]);
    let r4 = row(&[
        t * pr.d2[3],
        -x * pr.mixed[0][3],
        -y * pr.mixed[1][3],
        -z * pr.mixed[2][3],
        (1.0 - a) * wt,
        pr.w,
    ]);
    [r1, r2, r3, r4]
}

/// Residuals of branch solution omega_i against the four equations of its
/// hypergeometric system, measured at h, h/2, h/4. One report per equation.
pub fn system_residual(
    i: SolutionIndex,
    p: &ConfluentParams,
    args: &QuadArgs,
    h: f64,
) -> Result<Vec<ResidualReport>> {
    p.validate()?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    if args.abs_sum_xyz() + 3.0 * h >= 1.0 {
        return Err(Error::Domain(
            "stencil would leave the convergence region |x|+|y|+|z| < 1".into(),
        ));
    }
    let spec = BranchSpec::for_index(i, &p.d);
    let (e1, e2, e3, _) = spec.exponents;
    for (e, v, name) in [(e1, args.x, "x"), (e2, args.y, "y"), (e3, args.z, "z")] {
        if e != 0.0 && v - h <= 0.0 {
            return Err(Error::Domain(format!(
                "stencil crosses {name} = 0 where branch {} carries a power",
                spec.index
            )));
        }
    }
    let shifted = branch_shifted_params(&spec, p);
    shifted.validate()?;
    // freeze a direct-series level at the center, with margin for the stencil
    let tight = SeriesOptions { rel_tol: 1e-12, max_level: 600, max_terms: 200_000_000 };
    let probe = h43_0_direct(&shifted, args, &tight)?;
    let level = probe.level_used + 8;
    let omega = move |q: &QuadArgs| -> Result<f64> {
        let pre = q.x.powf(e1) * q.y.powf(e2) * q.z.powf(e3);
        Ok(pre * h43_0_direct_fixed(&shifted, q, level)?)
    };
    let steps = [h, h / 2.0, h / 4.0];
    let mut normalized = [[0.0; 3]; 4];
    let mut base = [(0.0, 0.0); 4];
    for (s, &hh) in steps.iter().enumerate() {
        let pr = stencil_partials(&omega, args, hh)?;
        let rows = system_rows(p, args, &pr);
        for r in 0..4 {
            normalized[r][s] = rows[r].1;
            if s == 0 {
                base[r] = rows[r];
            }
        }
    }
    let point = vec![args.x, args.y, args.z, args.t];
    Ok((0..4)
        .map(|r| ResidualReport {
            point: point.clone(),
            h,
            residual: base[r].0,
            normalized_residual: base[r].1,
            order_estimate: order_slope(&steps, &normalized[r]),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Singularity fit

/// Fit the blow-up of q_1 along a ray x = x0 + r*direction: a log-log slope
/// over the smallest radii (expect 2-p) and the limit constant of
/// q_1 r^(p-2) prod r_k^(2 alpha_k) against its closed form.
pub fn singularity_fit(
    direction: &[f64],
    x0: &[f64],
    prm: &Parameters,
    radii: &[f64],
) -> Result<SingularityFit> {
    prm.validate()?;
    let p = prm.p;
    if direction.len() != p || x0.len() != p {
        return Err(Error::InvalidInput(format!(
            "direction and source point must be {p}-vectors"
        )));
    }
    for (i, &c) in x0.iter().take(3).enumerate() {
        if !(c > 0.0) {
            return Err(Error::Domain(format!(
                "source coordinate {} = {c} must be positive",
                i + 1
            )));
        }
    }
    if radii.len() < 6 {
        return Err(Error::InvalidInput(format!(
            "need at least 6 radii, got {}",
            radii.len()
        )));
    }
    for w in radii.windows(2) {
        if !(w[1] > 0.0 && w[1] < w[0]) {
            return Err(Error::InvalidInput(
                "radii must be positive and strictly decreasing".into(),
            ));
        }
    }
    if radii[0] / radii[radii.len() - 1] < 100.0 {
        return Err(Error::InvalidInput(
            "radii must span at least two decades".into(),
        ));
    }
    let norm: f64 = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    let dir: Vec<f64> = direction.iter().map(|d| d / norm).collect();

    let ks = crate::fundsol::NormalizationConstants::with_default_k1(prm)?;
    let opts = SeriesOptions { rel_tol: 1e-11, max_level: 400, max_terms: 200_000_000 };
    let idx = SolutionIndex::new(1).unwrap();
    let mut qs = Vec::with_capacity(radii.len());
    for &r in radii {
        let x: Vec<f64> = x0.iter().zip(&dir).map(|(c, d)| c + r * d).collect();
        for (i, &c) in x.iter().take(3).enumerate() {
            if !(c > 0.0) {
                return Err(Error::Domain(format!(
                    "fit point at radius {r} leaves the octant (coordinate {})",
                    i + 1
                )));
            }
        }
        let pt = PointPair::new(x, x0.to_vec());
        let v = crate::fundsol::q_solution(idx, &pt, prm, &ks, &opts)?;
        qs.push(v.value);
    }

    // slope and constant from the 4 smallest radii (larger radii carry O(sigma) terms)
    let tail = &radii[radii.len() - 4..];
    let qtail = &qs[qs.len() - 4..];
    let rows: Vec<Vec<f64>> = tail.iter().map(|&r| vec![1.0, r.ln()]).collect();
    let y: Vec<f64> = qtail.iter().map(|&q| q.abs().max(1e-300).ln()).collect();
    let slope = lsq(&rows, &y)[1];

    let pf = p as f64;
    let mut consts = Vec::with_capacity(4);
    for (&r, &q) in tail.iter().zip(qtail) {
        let x: Vec<f64> = x0.iter().zip(&dir).map(|(c, d)| c + r * d).collect();
        let r2: f64 = x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
        let mut scale = r2.powf((pf - 2.0) / 2.0);
        for k in 0..3 {
            let rk2 = r2 + 4.0 * x[k] * x0[k];
            scale *= rk2.powf(prm.alpha[k]);
        }
        consts.push(q * scale);
    }
    // accompany the constant with the next singular correction terms
    let basis = |r: f64| -> Vec<f64> {
        if p == 4 {
            vec![1.0, r.powi(2)]
        } else {
            vec![1.0, r.powf(pf - 2.0), r * r]
        }
    };
    let rows2: Vec<Vec<f64>> = tail.iter().map(|&r| basis(r)).collect();
    let constant = lsq(&rows2, &consts)[0];
    let reference = 4.0f64.powf(prm.alpha.iter().sum::<f64>() - 1.0)
        * gamma((pf - 2.0) / 2.0)
        / std::f64::consts::PI.powf(pf / 2.0);
    Ok(SingularityFit { slope, constant, reference })
}

// ---------------------------------------------------------------------------
// Summation identity check

/// Result of the randomized unit-argument summation check.
#[derive(Clone, Copy, Debug)]
pub struct GaussCheckReport {
    pub trials: usize,
    pub failures: usize,
    pub worst_relative_error: f64,
}

impl GaussCheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Compare the accelerated series value of 2F1(a,b;c;1) with its Gamma
/// closed form on random parameters with c-a-b > 0.2; relative tolerance
/// 1e-9 per trial.
pub fn gauss_summation_check(trials: usize, seed: u64) -> GaussCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let a = rng.gen_range(0.05..1.2);
        let b = rng.gen_range(0.05..1.2);
        let c = a + b + 0.2 + rng.gen_range(0.02..1.5);
        let series = gauss_at_one_accelerated(a, b, c);
        let closed = gamma_ratio(&[c, c - a - b], &[c - a, c - b]);
        let rel = (series - closed).abs() / closed.abs();
        worst = worst.max(rel);
        if !(rel <= 1e-9) {
            failures += 1;
        }
    }
    GaussCheckReport { trials, failures, worst_relative_error: worst }
}
