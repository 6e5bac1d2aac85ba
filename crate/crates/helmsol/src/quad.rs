//! Multivariable hypergeometric evaluators: the quadrivariate series with a
//! signed joint index, its confluent form, the three-variable Lauricella
//! series, product decompositions into Gauss functions, a regularized
//! product form valid for unbounded negative arguments, an integral
//! representation for the deep regime, and the eight solution branches of
//! the associated hypergeometric system.

use crate::error::{Error, Result};
use crate::series::{
    gauss_2f1_value, hyp_0f1_value, kummer_1f1, ln_gamma_sign, nonpositive_int, EvalPath,
    EvalResult, SeriesOptions,
};
use crate::sum::{geometric_tail, Accumulator, TailRule};
use std::collections::HashMap;

/// Parameters of the parent quadrivariate function: one joint numerator
/// parameter, per-variable numerators b1..b3, the (b4, c4) pair carried by
/// the fourth variable, and denominators d1..d3.
#[derive(Clone, Copy, Debug)]
pub struct H43Params {
    pub a: f64,
    pub b: [f64; 4],
    pub c4: f64,
    pub d: [f64; 3],
}

impl H43Params {
    pub fn validate(&self) -> Result<()> {
        for (i, &d) in self.d.iter().enumerate() {
            if nonpositive_int(d).is_some() {
                return Err(Error::Domain(format!(
                    "denominator parameter d{} = {d} is a nonpositive integer",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the confluent function (the b4, c4 pair has been sent to
/// infinity).
#[derive(Clone, Copy, Debug)]
pub struct ConfluentParams {
    pub a: f64,
    pub b: [f64; 3],
    pub d: [f64; 3],
}

impl ConfluentParams {
    pub fn validate(&self) -> Result<()> {
        for (i, &d) in self.d.iter().enumerate() {
            if nonpositive_int(d).is_some() {
                return Err(Error::Domain(format!(
                    "denominator parameter d{} = {d} is a nonpositive integer",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Evaluation point (x, y, z, t).
#[derive(Clone, Copy, Debug)]
pub struct QuadArgs {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl QuadArgs {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    /// |x| + |y| + |z|, the radius controlling the direct series.
    pub fn abs_sum_xyz(&self) -> f64 {
        self.x.abs() + self.y.abs() + self.z.abs()
    }
}

/// Which of the eight solution branches is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolutionIndex(u8);

impl SolutionIndex {
    pub fn new(i: u8) -> Result<Self> {
        if (1..=8).contains(&i) {
            Ok(Self(i))
        } else {
            Err(Error::InvalidInput(format!("solution index must be 1..=8, got {i}")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based singular axes whose exponent is switched on for this
    /// branch (the eight subsets of {0,1,2} in table order).
    pub(crate) fn active_axes(self) -> &'static [usize] {
        const TABLE: [&[usize]; 8] =
            [&[], &[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
        TABLE[(self.0 - 1) as usize]
    }
}

impl std::fmt::Display for SolutionIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Branch exponents (tau, nu, mu, delta) for the substitution
/// omega = x^tau y^nu z^mu t^delta psi; delta is 0 for every branch and each
/// of the others is either 0 or 1-d_k.
#[derive(Clone, Copy, Debug)]
pub struct BranchSpec {
    pub index: SolutionIndex,
    pub exponents: (f64, f64, f64, f64),
}

impl BranchSpec {
    pub fn for_index(index: SolutionIndex, d: &[f64; 3]) -> Self {
        let mut e = [0.0; 3];
        for &ax in index.active_axes() {
            e[ax] = 1.0 - d[ax];
        }
        Self { index, exponents: (e[0], e[1], e[2], 0.0) }
    }
}

/// Case-split coefficient attached to the t-direction of the expansion
/// formulas: 1 at (0,0), q/s for s >= 1.
pub fn coefficient_a(s: i64, q: i64) -> Result<f64> {
    if s < 0 || q < 0 || q > s {
        return Err(Error::Domain(format!(
            "coefficient indices need 0 <= q <= s, got (s,q) = ({s},{q})"
        )));
    }
    if s == 0 {
        Ok(1.0)
    } else {
        Ok(q as f64 / s as f64)
    }
}

// ---------------------------------------------------------------------------
// Direct quadruple series

/// Growing table of (base)_j for j >= 0 (zeros propagate, never error).
struct PochTable {
    base: f64,
    vals: Vec<f64>,
}

impl PochTable {
    fn new(base: f64) -> Self {
        Self { base, vals: vec![1.0] }
    }

    fn get(&mut self, j: usize) -> f64 {
        while self.vals.len() <= j {
            let n = self.vals.len();
            let last = self.vals[n - 1];
            self.vals.push(last * (self.base + (n - 1) as f64));
        }
        self.vals[j]
    }
}

/// Growing table of (base)_{-j}; a zero factor marks the entry infinite and
/// the caller turns any weighted use of it into a domain error.
struct NegPochTable {
    base: f64,
    vals: Vec<f64>,
}

impl NegPochTable {
    fn new(base: f64) -> Self {
        Self { base, vals: vec![1.0] }
    }

    fn get(&mut self, j: usize) -> f64 {
        while self.vals.len() <= j {
            let n = self.vals.len();
            let factor = self.base - n as f64;
            let last = self.vals[n - 1];
            self.vals.push(if factor == 0.0 || !last.is_finite() {
                f64::INFINITY
            } else {
                last / factor
            });
        }
        self.vals[j]
    }
}

/// One-dimensional coefficient chain c_j = (b)_j / ((d)_j j!) * x^j.
struct AxisChain {
    b: f64,
    d: f64,
    x: f64,
    vals: Vec<f64>,
}

impl AxisChain {
    fn new(b: f64, d: f64, x: f64) -> Self {
        Self { b, d, x, vals: vec![1.0] }
    }

    fn get(&mut self, j: usize) -> f64 {
        while self.vals.len() <= j {
            let n = self.vals.len() as f64;
            let last = self.vals[self.vals.len() - 1];
            self.vals.push(last * (self.b + n - 1.0) / ((self.d + n - 1.0) * n) * self.x);
        }
        self.vals[j]
    }
}

/// Shared core of the two direct quadruple series. `t_chain(l, prev)` maps
/// the l-1 coefficient of the fourth direction to the l-th one.
fn quad_direct_core(
    a: f64,
    b: &[f64; 3],
    d: &[f64; 3],
    args: &QuadArgs,
    opts: &SeriesOptions,
    t_chain: impl Fn(usize, f64) -> f64,
) -> Result<EvalResult> {
    let mut cx = AxisChain::new(b[0], d[0], args.x);
    let mut cy = AxisChain::new(b[1], d[1], args.y);
    let mut cz = AxisChain::new(b[2], d[2], args.z);
    let mut ct = vec![1.0f64];
    let mut pos = PochTable::new(a);
    let mut neg = NegPochTable::new(a);

    let mut acc = Accumulator::new();
    let mut rule = TailRule::new(opts.rel_tol);
    let mut prev_shell_abs = 0.0f64;
    let mut budget = opts.max_terms;

    for shell in 0..=opts.max_level as usize {
        while ct.len() <= shell {
            let l = ct.len();
            let prev = ct[l - 1];
            ct.push(t_chain(l, prev));
        }
        let mut shell_sum = 0.0;
        let mut shell_abs = 0.0;
        for m in 0..=shell {
            let wm = cx.get(m);
            for n in 0..=shell - m {
                let wn = wm * cy.get(n);
                for k in 0..=shell - m - n {
                    let l = shell - m - n - k;
                    let wt = wn * cz.get(k) * ct[l];
                    if budget == 0 {
                        return Err(Error::Convergence(
                            "quadruple series exhausted its term budget".into(),
                        ));
                    }
                    budget -= 1;
                    if wt == 0.0 {
                        continue;
                    }
                    let jd = (m + n + k) as i64 - l as i64;
                    let pa = if jd >= 0 { pos.get(jd as usize) } else { neg.get((-jd) as usize) };
                    if !pa.is_finite() {
                        return Err(Error::Domain(format!(
                            "leading coefficient not finite at joint offset {jd} (pole or overflow)"
                        )));
                    }
                    let term = pa * wt;
                    shell_sum += term;
                    shell_abs += term.abs();
                }
            }
        }
        acc.add(shell_sum);
        let scale = acc.value().abs().max(acc.abs_sum() * 1e-4);
        if rule.check(shell_abs, scale) {
            return Ok(EvalResult {
                value: acc.value(),
                level_used: shell as u32,
                tail_estimate: geometric_tail(shell_abs, prev_shell_abs),
                path: EvalPath::DirectSeries,
            });
        }
        prev_shell_abs = shell_abs;
    }
    Err(Error::Convergence(format!(
        "quadruple series tail rule never fired within max_level {}",
        opts.max_level
    )))
}

/// The parent quadrivariate series; converges for |x|+|y|+|z| < 1 together
/// with |t| < 1/(1 + |x|+|y|+|z|).
pub fn h43(p: &H43Params, args: &QuadArgs, opts: &SeriesOptions) -> Result<EvalResult> {
    opts.validate()?;
    p.validate()?;
    let s1 = args.abs_sum_xyz();
    if s1 >= 1.0 {
        return Err(Error::Domain(format!(
            "argument radius |x|+|y|+|z| = {s1} is outside the unit region"
        )));
    }
    if args.t.abs() >= 1.0 / (1.0 + s1) {
        return Err(Error::Domain(format!(
            "fourth argument |t| = {} reaches the boundary 1/(1+|x|+|y|+|z|)",
            args.t.abs()
        )));
    }
    let (b4, c4, t) = (p.b[3], p.c4, args.t);
    quad_direct_core(p.a, &[p.b[0], p.b[1], p.b[2]], &p.d, args, opts, |l, prev| {
        let lf = l as f64;
        prev * (b4 + lf - 1.0) * (c4 + lf - 1.0) * t / lf
    })
}

/// The confluent quadrivariate series, summed directly; needs
/// |x|+|y|+|z| < 1 while t is unrestricted (that direction is entire).
pub fn h43_0_direct(p: &ConfluentParams, args: &QuadArgs, opts: &SeriesOptions) -> Result<EvalResult> {
    opts.validate()?;
    p.validate()?;
    let s1 = args.abs_sum_xyz();
    if s1 >= 1.0 {
        return Err(Error::Domain(format!(
            "argument radius |x|+|y|+|z| = {s1} is outside the unit region"
        )));
    }
    let t = args.t;
    quad_direct_core(p.a, &p.b, &p.d, args, opts, |l, prev| prev * t / l as f64)
}

/// Fixed-truncation variant (sums every term of total degree <= level);
/// useful for stencil-based probes that need a smooth function of the
/// arguments, since adaptive truncation may switch levels between nearby
/// points and the switch noise dominates high-order differences.
pub fn h43_0_direct_fixed(p: &ConfluentParams, args: &QuadArgs, level: u32) -> Result<f64> {
    p.validate()?;
    let s1 = args.abs_sum_xyz();
    if s1 >= 1.0 {
        return Err(Error::Domain(format!(
            "argument radius |x|+|y|+|z| = {s1} is outside the unit region"
        )));
    }
    let mut cx = AxisChain::new(p.b[0], p.d[0], args.x);
    let mut cy = AxisChain::new(p.b[1], p.d[1], args.y);
    let mut cz = AxisChain::new(p.b[2], p.d[2], args.z);
    let mut ct = vec![1.0f64];
    for l in 1..=level as usize {
        let prev = ct[l - 1];
        ct.push(prev * args.t / l as f64);
    }
    let mut pos = PochTable::new(p.a);
    let mut neg = NegPochTable::new(p.a);
    let mut acc = Accumulator::new();
    for shell in 0..=level as usize {
        for m in 0..=shell {
            let wm = cx.get(m);
            for n in 0..=shell - m {
                let wn = wm * cy.get(n);
                for k in 0..=shell - m - n {
                    let l = shell - m - n - k;
                    let wt = wn * cz.get(k) * ct[l];
                    if wt == 0.0 {
                        continue;
                    }
                    let jd = (m + n + k) as i64 - l as i64;
                    let pa = if jd >= 0 { pos.get(jd as usize) } else { neg.get((-jd) as usize) };
                    if !pa.is_finite() {
                        return Err(Error::Domain(format!(
                            "leading coefficient not finite at joint offset {jd} (pole or overflow)"
                        )));
                    }
                    acc.add(pa * wt);
                }
            }
        }
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Lauricella triple series

/// Triple hypergeometric series with joint numerator parameter a and
/// per-variable pairs (b_k, d_k); converges for |x|+|y|+|z| < 1.
pub fn lauricella_fa3(
    a: f64,
    b: &[f64; 3],
    d: &[f64; 3],
    x: f64,
    y: f64,
    z: f64,
    opts: &SeriesOptions,
) -> Result<EvalResult> {
    opts.validate()?;
    let p = ConfluentParams { a, b: *b, d: *d };
    p.validate()?;
    let s1 = x.abs() + y.abs() + z.abs();
    if s1 >= 1.0 {
        return Err(Error::Domain(format!(
            "argument radius |x|+|y|+|z| = {s1} is outside the unit region"
        )));
    }
    let mut cx = AxisChain::new(b[0], d[0], x);
    let mut cy = AxisChain::new(b[1], d[1], y);
    let mut cz = AxisChain::new(b[2], d[2], z);
    let mut pos = PochTable::new(a);
    let mut acc = Accumulator::new();
    let mut rule = TailRule::new(opts.rel_tol);
    let mut prev_shell_abs = 0.0f64;
    let mut budget = opts.max_terms;
    for shell in 0..=opts.max_level as usize {
        let pa_shell = pos.get(shell);
        let mut shell_sum = 0.0;
        let mut shell_abs = 0.0;
        for m in 0..=shell {
            let wm = cx.get(m);
            for n in 0..=shell - m {
                let k = shell - m - n;
                if budget == 0 {
                    return Err(Error::Convergence(
                        "triple series exhausted its term budget".into(),
                    ));
                }
                budget -= 1;
                let term = pa_shell * wm * cy.get(n) * cz.get(k);
                shell_sum += term;
                shell_abs += term.abs();
            }
        }
        acc.add(shell_sum);
        let scale = acc.value().abs().max(acc.abs_sum() * 1e-4);
        if rule.check(shell_abs, scale) {
            return Ok(EvalResult {
                value: acc.value(),
                level_used: shell as u32,
                tail_estimate: geometric_tail(shell_abs, prev_shell_abs),
                path: EvalPath::DirectSeries,
            });
        }
        prev_shell_abs = shell_abs;
    }
    Err(Error::Convergence(format!(
        "triple series tail rule never fired within max_level {}",
        opts.max_level
    )))
}

// ---------------------------------------------------------------------------
// Gauss-product decompositions

/// Memo for the inner Gauss evaluations; parameter shifts are integers, so a
/// slot id plus two shift totals identify each distinct call. One memo lives
/// for one evaluation (arguments fixed).
pub(crate) struct GaussMemo {
    map: HashMap<(u8, u32, u32), f64>,
}

impl GaussMemo {
    pub fn new() -> Self {
        Self { map: HashMap::new() }
    }

    fn get(
        &mut self,
        slot: u8,
        s1: u32,
        s2: u32,
        eval: impl FnOnce() -> Result<f64>,
    ) -> Result<f64> {
        if let Some(&v) = self.map.get(&(slot, s1, s2)) {
            return Ok(v);
        }
        let v = eval()?;
        self.map.insert((slot, s1, s2), v);
        Ok(v)
    }
}

/// Decomposition of the triple series into a three-fold sum of products of
/// Gauss functions; cross-checks lauricella_fa3 where both converge.
pub fn fa3_decomposed(
    a: f64,
    b: &[f64; 3],
    d: &[f64; 3],
    x: f64,
    y: f64,
    z: f64,
    opts: &SeriesOptions,
) -> Result<EvalResult> {
    opts.validate()?;
    let p = ConfluentParams { a, b: *b, d: *d };
    p.validate()?;
    let mut memo = GaussMemo::new();
    let mut acc = Accumulator::new();
    let mut rule = TailRule::new(opts.rel_tol);
    let mut prev_shell_abs = 0.0f64;
    // previous shell of coefficient values, keyed by (l, m) flattened
    let mut prev: Vec<f64> = vec![1.0];
    let mut budget = opts.max_terms;
    for shell in 0..=opts.max_level as usize {
        let mut cur: Vec<f64> = vec![0.0; (shell + 1) * (shell + 1)];
        let mut shell_sum = 0.0;
        let mut shell_abs = 0.0;
        let sf = shell as f64;
        for l in 0..=shell {
            for m in 0..=shell - l {
                let n = shell - l - m;
                let (lf, mf, nf) = (l as f64, m as f64, n as f64);
                let coef = if shell == 0 {
                    1.0
                } else if n > 0 {
                    prev[l * shell + m]
                        * (a + sf - 1.0) * (b[1] + lf + nf - 1.0) * (b[2] + mf + nf - 1.0)
                        / ((d[1] + lf + nf - 1.0) * (d[2] + mf + nf - 1.0) * nf)
                        * y * z
                } else if m > 0 {
                    prev[l * shell + (m - 1)]
                        * (a + sf - 1.0) * (b[0] + lf + mf - 1.0) * (b[2] + mf - 1.0)
                        / ((d[0] + lf + mf - 1.0) * (d[2] + mf - 1.0) * mf)
                        * x * z
                } else {
                    prev[(l - 1) * shell]
                        * (a + sf - 1.0) * (b[0] + lf - 1.0) * (b[1] + lf - 1.0)
                        / ((d[0] + lf - 1.0) * (d[1] + lf - 1.0) * lf)
                        * x * y
                };
                cur[l * (shell + 1) + m] = coef;
                if budget == 0 {
                    return Err(Error::Convergence(
                        "decomposition exhausted its term budget".into(),
                    ));
                }
                budget -= 1;
                if coef == 0.0 {
                    continue;
                }
                let g1 = memo.get(1, (l + m) as u32, 0, || {
                    gauss_2f1_value(a + lf + mf, b[0] + lf + mf, d[0] + lf + mf, x)
                })?;
                let g2 = memo.get(2, shell as u32, (l + n) as u32, || {
                    gauss_2f1_value(a + sf, b[1] + lf + nf, d[1] + lf + nf, y)
                })?;
                let g3 = memo.get(3, shell as u32, (m + n) as u32, || {
                    gauss_2f1_value(a + sf, b[2] + mf + nf, d[2] + mf + nf, z)
                })?;
                let term = coef * g1 * g2 * g3;
                shell_sum += term;
                shell_abs += term.abs();
            }
        }
        acc.add(shell_sum);
        let scale = acc.value().abs().max(acc.abs_sum() * 1e-4);
        if rule.check(shell_abs, scale) {
            return Ok(EvalResult {
                value: acc.value(),
                level_used: shell as u32,
                tail_estimate: geometric_tail(shell_abs, prev_shell_abs),
                path: EvalPath::Decomposition,
            });
        }
        prev_shell_abs = shell_abs;
        prev = cur;
    }
    Err(Error::Convergence(format!(
        "decomposition tail rule never fired within max_level {}",
        opts.max_level
    )))
}

// ---------------------------------------------------------------------------
// Expansion of the confluent function over Gauss products

/// Evaluate the expansion at one fixed total level
/// L >= i+j+k+l+m+n+s (with i+j+k = s, so 2s + l+m+n <= L).
/// `regular` switches between plain arguments and the transformed
/// (prefactored) product form.
pub(crate) fn h43_0_expansion_fixed(
    p: &ConfluentParams,
    args: &QuadArgs,
    level: u32,
    regular: bool,
    memo: &mut GaussMemo,
) -> Result<f64> {
    let (a, b, d) = (p.a, &p.b, &p.d);
    let (x, y, z, t) = (args.x, args.y, args.z, args.t);
    // powers attached to coefficients, and Gauss arguments
    let (px, py, pz) = if regular {
        (x / (1.0 - x), y / (1.0 - y), z / (1.0 - z))
    } else {
        (x, y, z)
    };
    let (ux, uy, uz) = if regular {
        (x / (x - 1.0), y / (y - 1.0), z / (z - 1.0))
    } else {
        (x, y, z)
    };
    let prefactor = if regular {
        (1.0 - x).powf(-b[0]) * (1.0 - y).powf(-b[1]) * (1.0 - z).powf(-b[2])
    } else {
        1.0
    };

    let lmax = level as usize;
    let smax = lmax / 2;
    // t-direction weights per (s, q), with the b-style coefficient computed
    // in log space (it mixes factorials that overflow f64 near s ~ 150)
    let mut f01_cache: Vec<Option<f64>> = vec![None; smax + 2];
    let f01 = |q: usize, cache: &mut Vec<Option<f64>>| -> Result<f64> {
        if let Some(v) = cache[q] {
            return Ok(v);
        }
        let c = 1.0 - a + q as f64;
        if nonpositive_int(c).is_some() {
            return Err(Error::Domain(format!(
                "expansion pole: 1 - a + q = {c} is a nonpositive integer"
            )));
        }
        let v = hyp_0f1_value(c, -t)?;
        cache[q] = Some(v);
        Ok(v)
    };

    // axis coefficient tables c_i = (b)_i/((d)_i i!) px^i for the partition part
    let mut ci = AxisChain::new(b[0], d[0], px);
    let mut cj = AxisChain::new(b[1], d[1], py);
    let mut ck = AxisChain::new(b[2], d[2], pz);

    let mut total = Accumulator::new();
    for s in 0..=smax {
        let sf = s as f64;
        // nothing under the partition loops depends on q, so the whole
        // t-direction weight of the shell is summed up front
        let mut ws = 0.0;
        for q in 0..=s {
            let qf = q as f64;
            // the case-split coefficient kills q = 0 for s >= 1
            if s >= 1 && q == 0 {
                continue;
            }
            let wq = if s == 0 {
                f01(0, &mut f01_cache)?
            } else {
                if t == 0.0 {
                    continue; // t^q vanishes for every reached q >= 1
                }
                // ln |A(s,q) s! C(s,q) t^q / ((1-a)_q q!)|
                let (lg_sp1, _) = ln_gamma_sign(sf + 1.0);
                let (lg_qp1, _) = ln_gamma_sign(qf + 1.0);
                let (lg_smq, _) = ln_gamma_sign(sf - qf + 1.0);
                let (lg_pq_num, sg_num) = ln_gamma_sign(1.0 - a + qf);
                let (lg_pq_den, sg_den) = ln_gamma_sign(1.0 - a);
                if sg_den == 0.0 || sg_num == 0.0 {
                    return Err(Error::Domain(format!(
                        "expansion pole: shifted parameter 1 - a + q at q = {q}"
                    )));
                }
                let ln_mag = (qf / sf).ln() + 2.0 * lg_sp1 - 2.0 * lg_qp1 - lg_smq
                    + qf * t.abs().ln()
                    - (lg_pq_num - lg_pq_den);
                if ln_mag > 600.0 {
                    return Err(Error::Convergence(
                        "expansion coefficients overflow before convergence".into(),
                    ));
                }
                let mut sign = if (s + q) % 2 == 0 { 1.0 } else { -1.0 };
                sign *= sg_num * sg_den;
                if t < 0.0 && q % 2 == 1 {
                    sign = -sign;
                }
                sign * ln_mag.exp() * f01(q, &mut f01_cache)?
            };
            ws += wq;
        }
        if ws == 0.0 {
            continue;
        }
        for i in 0..=s {
            for j in 0..=s - i {
                let k = s - i - j;
                let cijk = ci.get(i) * cj.get(j) * ck.get(k);
                if cijk == 0.0 {
                    continue;
                }
                let (fi, fj, fk) = (i as f64, j as f64, k as f64);
                let inner_cap = lmax - 2 * s;
                // inner (l, m, n) sum with chained coefficients
                let mut prev: Vec<f64> = vec![1.0];
                for inner in 0..=inner_cap {
                    let mut cur: Vec<f64> = vec![0.0; (inner + 1) * (inner + 1)];
                    for l in 0..=inner {
                        for m in 0..=inner - l {
                            let n = inner - l - m;
                            let (lf, mf, nf) = (l as f64, m as f64, n as f64);
                            let innf = inner as f64;
                            let coef = if inner == 0 {
                                1.0
                            } else if n > 0 {
                                prev[l * inner + m]
                                    * (a + sf + innf - 1.0)
                                    * (b[1] + fj + lf + nf - 1.0)
                                    * (b[2] + fk + mf + nf - 1.0)
                                    / ((d[1] + fj + lf + nf - 1.0)
                                        * (d[2] + fk + mf + nf - 1.0)
                                        * nf)
                                    * py * pz
                            } else if m > 0 {
                                prev[l * inner + (m - 1)]
                                    * (a + sf + innf - 1.0)
                                    * (b[0] + fi + lf + mf - 1.0)
                                    * (b[2] + fk + mf - 1.0)
                                    / ((d[0] + fi + lf + mf - 1.0)
                                        * (d[2] + fk + mf - 1.0)
                                        * mf)
                                    * px * pz
                            } else {
                                prev[(l - 1) * inner]
                                    * (a + sf + innf - 1.0)
                                    * (b[0] + fi + lf - 1.0)
                                    * (b[1] + fj + lf - 1.0)
                                    / ((d[0] + fi + lf - 1.0)
                                        * (d[1] + fj + lf - 1.0)
                                        * lf)
                                    * px * py
                            };
                            cur[l * (inner + 1) + m] = coef;
                            if coef == 0.0 {
                                continue;
                            }
                            let weight = ws * cijk * coef;
                            if weight == 0.0 {
                                continue;
                            }
                            let (g1, g2, g3) = if regular {
                                let g1 = memo.get(
                                    1,
                                    (j + k) as u32,
                                    (i + l + m) as u32,
                                    || {
                                        gauss_2f1_value(
                                            d[0] - a - fj - fk,
                                            b[0] + fi + lf + mf,
                                            d[0] + fi + lf + mf,
                                            ux,
                                        )
                                    },
                                )?;
                                let g2 = memo.get(
                                    2,
                                    (i + k + m) as u32,
                                    (j + l + n) as u32,
                                    || {
                                        gauss_2f1_value(
                                            d[1] - a - fi - fk - mf,
                                            b[1] + fj + lf + nf,
                                            d[1] + fj + lf + nf,
                                            uy,
                                        )
                                    },
                                )?;
                                let g3 = memo.get(
                                    3,
                                    (i + j + l) as u32,
                                    (k + m + n) as u32,
                                    || {
                                        gauss_2f1_value(
                                            d[2] - a - fi - fj - lf,
                                            b[2] + fk + mf + nf,
                                            d[2] + fk + mf + nf,
                                            uz,
                                        )
                                    },
                                )?;
                                (g1, g2, g3)
                            } else {
                                let g1 = memo.get(
                                    1,
                                    (s + l + m) as u32,
                                    (i + l + m) as u32,
                                    || {
                                        gauss_2f1_value(
                                            a + sf + lf + mf,
                                            b[0] + fi + lf + mf,
                                            d[0] + fi + lf + mf,
                                            ux,
                                        )
                                    },
                                )?;
                                let g2 = memo.get(
                                    2,
                                    (s + l + m + n) as u32,
                                    (j + l + n) as u32,
                                    || {
                                        gauss_2f1_value(
                                            a + sf + lf + mf + nf,
                                            b[1] + fj + lf + nf,
                                            d[1] + fj + lf + nf,
                                            uy,
                                        )
                                    },
                                )?;
                                let g3 = memo.get(
                                    3,
                                    (s + l + m + n) as u32,
                                    (k + m + n) as u32,
                                    || {
                                        gauss_2f1_value(
                                            a + sf + lf + mf + nf,
                                            b[2] + fk + mf + nf,
                                            d[2] + fk + mf + nf,
                                            uz,
                                        )
                                    },
                                )?;
                                (g1, g2, g3)
                            };
                            total.add(weight * g1 * g2 * g3);
                        }
                    }
                    prev = cur;
                }
            }
        }
    }
    Ok(prefactor * total.value())
}

/// Adaptive driver: raise the total level in steps of 5 until two successive
/// evaluations agree to rel_tol.
fn h43_0_expansion_adaptive(
    p: &ConfluentParams,
    args: &QuadArgs,
    regular: bool,
    opts: &SeriesOptions,
) -> Result<EvalResult> {
    let mut memo = GaussMemo::new();
    let mut level = 10u32.min(opts.max_level);
    let mut prev: Option<f64> = None;
    loop {
        let v = h43_0_expansion_fixed(p, args, level, regular, &mut memo)?;
        if let Some(pv) = prev {
            let gap = (v - pv).abs();
            if gap <= opts.rel_tol * v.abs().max(f64::MIN_POSITIVE) {
                return Ok(EvalResult {
                    value: v,
                    level_used: level,
                    tail_estimate: gap,
                    path: if regular { EvalPath::Transformed } else { EvalPath::Decomposition },
                });
            }
        }
        prev = Some(v);
        if level >= opts.max_level {
            return Err(Error::Convergence(format!(
                "expansion did not settle within max_level {}",
                opts.max_level
            )));
        }
        level = (level + 5).min(opts.max_level);
    }
}

/// Expansion of the confluent function over products of three Gauss
/// functions and a 0F1 in the fourth direction (plain arguments).
pub fn h43_0_expanded(p: &ConfluentParams, args: &QuadArgs, opts: &SeriesOptions) -> Result<EvalResult> {
    opts.validate()?;
    p.validate()?;
    let s1 = args.abs_sum_xyz();
    if s1 >= 1.0 {
        return Err(Error::Domain(format!(
            "argument radius |x|+|y|+|z| = {s1} is outside the unit region"
        )));
    }
    h43_0_expansion_adaptive(p, args, false, opts)
}

/// Product form with the prefactor (1-x)^(-b1) (1-y)^(-b2) (1-z)^(-b3) and
/// transformed Gauss arguments: valid for x, y, z < 1 with no lower bound,
/// which covers the near-singularity regime of the fundamental solutions.
pub fn h43_0_regularized(p: &ConfluentParams, args: &QuadArgs, opts: &SeriesOptions) -> Result<EvalResult> {
    opts.validate()?;
    p.validate()?;
    if args.x >= 1.0 || args.y >= 1.0 || args.z >= 1.0 {
        return Err(Error::Domain(
            "regularized form needs each of x, y, z below 1".into(),
        ));
    }
    // the rearranged series runs in the transformed variables v/(v-1), so its
    // region is the unit simplex in those, mirroring the plain expansion;
    // rejecting up front avoids a long climb through ever larger levels that
    // cannot settle
    let s1t: f64 = [args.x, args.y, args.z]
        .iter()
        .map(|v| (v / (v - 1.0)).abs())
        .sum();
    if s1t >= 1.0 {
        return Err(Error::Domain(format!(
            "transformed argument radius |x/(x-1)|+|y/(y-1)|+|z/(z-1)| = {s1t:.3} \
             is outside the unit region"
        )));
    }
    h43_0_expansion_adaptive(p, args, true, opts)
}

// ---------------------------------------------------------------------------
// Integral representation for the deep regime

/// Trapezoid evaluation (on s = ln u) of the Laplace-type representation
/// 1/Gamma(a) int_0^inf e^{-u + t/u} u^{a-1} prod_k 1F1(b_k; d_k; sigma_k u) du,
/// valid for a > 0 and t <= 0.
fn laplace_integral(p: &ConfluentParams, args: &QuadArgs, hs: f64) -> Result<f64> {
    let (a, b, d) = (p.a, &p.b, &p.d);
    let (lga, sga) = ln_gamma_sign(a);
    debug_assert!(sga > 0.0);
    let sig = [args.x, args.y, args.z];
    let t = args.t;
    let f = |s: f64| -> Result<f64> {
        let u = s.exp();
        let e = -u + (if t != 0.0 { t / u } else { 0.0 }) + a * s - lga;
        if e < -750.0 {
            return Ok(0.0);
        }
        let mut prod = e.exp();
        for k in 0..3 {
            prod *= kummer_1f1(b[k], d[k], sig[k] * u)?;
        }
        Ok(prod)
    };
    let f0 = f(0.0)?;
    let mut total = f0;
    let mut fmax = f0.abs();
    let mut s = 0.0;
    loop {
        s += hs;
        let v = f(s)?;
        total += v;
        fmax = fmax.max(v.abs());
        if v.abs() <= 1e-19 * fmax && s > 5.0 {
            break;
        }
        if s > 2000.0 {
            return Err(Error::Convergence("integral tail did not decay".into()));
        }
    }
    s = 0.0;
    loop {
        s -= hs;
        let v = f(s)?;
        total += v;
        fmax = fmax.max(v.abs());
        if v.abs() <= 1e-19 * fmax && s < -5.0 {
            break;
        }
        if s < -400.0 {
            break;
        }
    }
    Ok(total * hs)
}

/// The extra non-analytic branch the integral picks up for t < 0: an entire
/// triple series against 0F1 kernels, all terms positive for
/// nonpositive x, y, z.
fn integral_branch_correction(p: &ConfluentParams, args: &QuadArgs) -> Result<f64> {
    let (a, b, d) = (p.a, &p.b, &p.d);
    let at = -args.t;
    debug_assert!(at > 0.0);
    let u = [-args.x * at, -args.y * at, -args.z * at];
    let (lg, sg) = ln_gamma_sign(1.0 - a);
    if sg == 0.0 {
        return Err(Error::Convergence(
            "integral branch correction undefined for integer leading parameter".into(),
        ));
    }
    let pref = -sg * (lg + a * at.ln()).exp();
    let mut total = 0.0;
    let mut tm = 1.0;
    let mut m = 0usize;
    while m <= 60 {
        let mut tn = tm;
        let mut n = 0usize;
        let mut row_m = 0.0;
        while n <= 60 {
            let mut tk = tn;
            let mut k = 0usize;
            let mut row_n = 0.0;
            while k <= 60 {
                let nu = a + (m + n + k) as f64 + 1.0;
                let (lgn, _) = ln_gamma_sign(nu);
                let val = tk * hyp_0f1_value(nu, at)? * (-lgn).exp();
                row_n += val;
                if val.abs() <= 1e-18 * (total + row_m + row_n).abs().max(1e-300) && k > 1 {
                    break;
                }
                let kf = k as f64;
                tk *= (b[2] + kf) / (d[2] + kf) * u[2] / (kf + 1.0);
                k += 1;
            }
            row_m += row_n;
            if row_n.abs() <= 1e-18 * (total + row_m).abs().max(1e-300) && n > 1 {
                break;
            }
            let nf = n as f64;
            tn *= (b[1] + nf) / (d[1] + nf) * u[1] / (nf + 1.0);
            n += 1;
        }
        total += row_m;
        if row_m.abs() <= 1e-18 * total.abs().max(1e-300) && m > 1 {
            break;
        }
        let mf = m as f64;
        tm *= (b[0] + mf) / (d[0] + mf) * u[0] / (mf + 1.0);
        m += 1;
    }
    Ok(pref * total)
}

/// Deep-regime evaluation via the integral representation (minus the branch
/// correction when t < 0) at a fixed trapezoid step.
pub(crate) fn h43_0_deep_fixed(p: &ConfluentParams, args: &QuadArgs, hs: f64) -> Result<f64> {
    if p.a <= 0.0 {
        return Err(Error::Domain(format!(
            "integral representation needs a positive leading parameter, got {}",
            p.a
        )));
    }
    if args.t > 0.0 {
        return Err(Error::Domain(
            "integral representation covers t <= 0 only".into(),
        ));
    }
    let mut v = laplace_integral(p, args, hs)?;
    if args.t < 0.0 {
        v -= integral_branch_correction(p, args)?;
    }
    Ok(v)
}

/// Step-halving driver for the deep path; returns (value, gap, hs used).
pub(crate) fn h43_0_deep_adaptive(
    p: &ConfluentParams,
    args: &QuadArgs,
    rel_tol: f64,
) -> Result<(f64, f64, f64)> {
    let mut hs = 0.08;
    let mut v1 = h43_0_deep_fixed(p, args, hs)?;
    let target = rel_tol.max(1e-13);
    for _ in 0..5 {
        hs *= 0.5;
        let v2 = h43_0_deep_fixed(p, args, hs)?;
        let gap = (v2 - v1).abs();
        if gap <= target * v2.abs().max(f64::MIN_POSITIVE) {
            return Ok((v2, gap, hs));
        }
        v1 = v2;
    }
    Err(Error::Convergence(
        "integral representation did not settle under step halving".into(),
    ))
}

// ---------------------------------------------------------------------------
// Path selection

/// Evaluate the confluent function choosing the representation by argument
/// size: the direct series inside |x|+|y|+|z| <= 0.7, the integral
/// representation whenever x, y, z, t are all nonpositive (past the direct
/// window the product form converges slowly or not at all, while the
/// integral handles arguments of any magnitude there), and the regularized
/// product form otherwise.
pub fn h43_0_auto(p: &ConfluentParams, args: &QuadArgs, opts: &SeriesOptions) -> Result<EvalResult> {
    opts.validate()?;
    p.validate()?;
    if args.abs_sum_xyz() <= 0.7 {
        return h43_0_direct(p, args, opts);
    }
    if args.x <= 0.0 && args.y <= 0.0 && args.z <= 0.0 && args.t <= 0.0 {
        match h43_0_deep_adaptive(p, args, opts.rel_tol) {
            Ok((value, gap, _)) => {
                return Ok(EvalResult {
                    value,
                    level_used: 0,
                    tail_estimate: gap,
                    path: EvalPath::Transformed,
                })
            }
            Err(_) => {} // fall through to the product form
        }
    }
    h43_0_regularized(p, args, opts)
}

// ---------------------------------------------------------------------------
// Solution branches of the hypergeometric system

/// Parameter shifts induced by a branch's prefactor exponents.
pub(crate) fn branch_shifted_params(spec: &BranchSpec, p: &ConfluentParams) -> ConfluentParams {
    let (e1, e2, e3, _) = spec.exponents;
    let e = [e1, e2, e3];
    let mut b = p.b;
    let mut d = p.d;
    let mut a = p.a;
    for k in 0..3 {
        a += e[k];
        b[k] += e[k];
        d[k] += 2.0 * e[k];
    }
    ConfluentParams { a, b, d }
}

/// Branch solution omega_i = x^tau y^nu z^mu H(shifted parameters; args).
/// Arguments raised to a nonzero exponent must be positive.
pub fn omega_branch(
    spec: &BranchSpec,
    p: &ConfluentParams,
    args: &QuadArgs,
    opts: &SeriesOptions,
) -> Result<EvalResult> {
    opts.validate()?;
    p.validate()?;
    let (e1, e2, e3, _) = spec.exponents;
    for (e, v, name) in [(e1, args.x, "x"), (e2, args.y, "y"), (e3, args.z, "z")] {
        if e != 0.0 && v <= 0.0 {
            return Err(Error::Domain(format!(
                "branch {} carries a power of {name}, which must be positive (got {v})",
                spec.index
            )));
        }
    }
    let shifted = branch_shifted_params(spec, p);
    shifted.validate()?;
    let inner = h43_0_auto(&shifted, args, opts)?;
    let pre = args.x.powf(e1) * args.y.powf(e2) * args.z.powf(e3);
    Ok(EvalResult {
        value: pre * inner.value,
        level_used: inner.level_used,
        tail_estimate: pre.abs() * inner.tail_estimate,
        path: inner.path,
    })
}
