//! Geometry of the singular Helmholtz problem and its eight fundamental
//! solutions: the map from a point pair onto hypergeometric arguments, the
//! closed-form normalization constant, and the assembled solutions q_1..q_8.

use crate::error::{Error, Result};
use crate::quad::{h43_0_auto, ConfluentParams, QuadArgs, SolutionIndex};
use crate::series::{gamma, EvalResult, SeriesOptions};

/// Problem parameters: dimension p, the three singular-axis strengths, and
/// mu = lambda^2 (sign covers real and pure-imaginary lambda without
/// complex arithmetic).
#[derive(Clone, Copy, Debug)]
pub struct Parameters {
    pub p: usize,
    pub alpha: [f64; 3],
    pub mu: f64,
}

impl Parameters {
    pub fn validate(&self) -> Result<()> {
        if self.p < 3 {
            return Err(Error::InvalidInput(format!(
                "dimension must be at least 3, got {}",
                self.p
            )));
        }
        for (j, &a) in self.alpha.iter().enumerate() {
            if !(a > 0.0 && 2.0 * a < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "alpha{} = {a} violates 0 < 2*alpha < 1",
                    j + 1
                )));
            }
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidInput("mu must be finite".into()));
        }
        Ok(())
    }

    /// alpha = alpha1 + alpha2 + alpha3 - 1 + p/2.
    pub fn alpha_tot(&self) -> f64 {
        self.alpha.iter().sum::<f64>() - 1.0 + self.p as f64 / 2.0
    }
}

/// An evaluation point and a source point, both in the open octant
/// x1, x2, x3 > 0.
#[derive(Clone, Debug)]
pub struct PointPair {
    pub x: Vec<f64>,
    pub x0: Vec<f64>,
}

impl PointPair {
    pub fn new(x: Vec<f64>, x0: Vec<f64>) -> Self {
        Self { x, x0 }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.x.len() != p || self.x0.len() != p {
            return Err(Error::InvalidInput(format!(
                "point pair needs two {p}-vectors, got lengths {} and {}",
                self.x.len(),
                self.x0.len()
            )));
        }
        for v in [&self.x, &self.x0] {
            for (i, &c) in v.iter().take(3).enumerate() {
                if !(c > 0.0) {
                    return Err(Error::Domain(format!(
                        "coordinate {} = {c} is outside the open octant (first three must be positive)",
                        i + 1
                    )));
                }
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("coordinates must be finite".into()));
            }
        }
        if self.x == self.x0 {
            return Err(Error::Domain(
                "evaluation point coincides with the source point (r = 0)".into(),
            ));
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self { x: self.x0.clone(), x0: self.x.clone() }
    }
}

/// Derived geometry at a point pair: squared distance, the three reflected
/// squared distances, the four series arguments, the total parameter alpha,
/// and the leading power P = (r^2)^(-alpha).
#[derive(Clone, Copy, Debug)]
pub struct SigmaCoords {
    pub r2: f64,
    pub rk2: [f64; 3],
    pub sigma: [f64; 4],
    pub alpha_tot: f64,
    pub p_factor: f64,
}

/// Normalization constants k_1..k_8 of the eight solutions. Only k_1 has a
/// closed form; the others default to 1 and are injectable.
#[derive(Clone, Copy, Debug)]
pub struct NormalizationConstants {
    pub k: [f64; 8],
}

impl NormalizationConstants {
    /// All eight constants set to 1.
    pub fn ones() -> Self {
        Self { k: [1.0; 8] }
    }

    /// k_1 from its closed form, k_2..k_8 set to 1.
    pub fn with_default_k1(prm: &Parameters) -> Result<Self> {
        let mut k = [1.0; 8];
        k[0] = default_k1(prm)?;
        Ok(Self { k })
    }
}

/// Map a point pair onto the series arguments: r^2 is the squared distance,
/// r_k^2 replaces the k-th difference by the sum, sigma_k = -4 x_k x0_k / r^2
/// and sigma_4 = -mu r^2 / 4.
pub fn sigma_map(pt: &PointPair, prm: &Parameters) -> Result<SigmaCoords> {
    prm.validate()?;
    pt.validate(prm.p)?;
    let r2: f64 = pt
        .x
        .iter()
        .zip(&pt.x0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if r2 == 0.0 {
        return Err(Error::Domain("point pair has zero separation".into()));
    }
    let mut rk2 = [0.0; 3];
    let mut sigma = [0.0; 4];
    for k in 0..3 {
        let cross = 4.0 * pt.x[k] * pt.x0[k];
        rk2[k] = r2 + cross;
        sigma[k] = -cross / r2;
    }
    sigma[3] = -prm.mu * r2 / 4.0;
    let alpha_tot = prm.alpha_tot();
    Ok(SigmaCoords {
        r2,
        rk2,
        sigma,
        alpha_tot,
        p_factor: r2.powf(-alpha_tot),
    })
}

/// Closed form of the first normalization constant:
/// 4^(a1+a2+a3-1) G(alpha) G(a1) G(a2) G(a3) / (pi^(p/2) G(2a1) G(2a2) G(2a3)).
pub fn default_k1(prm: &Parameters) -> Result<f64> {
    prm.validate()?;
    let [a1, a2, a3] = prm.alpha;
    let four_pow = 4.0f64.powf(a1 + a2 + a3 - 1.0);
    let num = gamma(prm.alpha_tot()) * gamma(a1) * gamma(a2) * gamma(a3);
    let den = std::f64::consts::PI.powf(prm.p as f64 / 2.0)
        * gamma(2.0 * a1)
        * gamma(2.0 * a2)
        * gamma(2.0 * a3);
    Ok(four_pow * num / den)
}

/// How solution i is assembled: the confluent parameter set, the exponent
/// carried by r^2, and the exponent of each product x_k x0_k.
#[derive(Clone, Copy, Debug)]
pub(crate) struct QAssembly {
    pub cp: ConfluentParams,
    pub r2_exponent: f64,
    pub axis_exponents: [f64; 3],
}

pub(crate) fn q_assembly(i: SolutionIndex, prm: &Parameters) -> QAssembly {
    let alpha_tot = prm.alpha_tot();
    let mut a = alpha_tot;
    let mut b = prm.alpha;
    let mut d = [2.0 * prm.alpha[0], 2.0 * prm.alpha[1], 2.0 * prm.alpha[2]];
    let mut r2_exponent = -alpha_tot;
    let mut axis_exponents = [0.0; 3];
    for &k in i.active_axes() {
        let shift = 1.0 - 2.0 * prm.alpha[k];
        a += shift;
        b[k] = 1.0 - prm.alpha[k];
        d[k] = 2.0 - 2.0 * prm.alpha[k];
        r2_exponent -= shift;
        axis_exponents[k] = shift;
    }
    QAssembly { cp: ConfluentParams { a, b, d }, r2_exponent, axis_exponents }
}

/// Fundamental solution q_i at a point pair: the branch prefactor
/// k_i (r^2)^e0 prod_k (x_k x0_k)^e_k times the confluent function at the
/// sigma arguments. The evaluation path is chosen by argument size.
pub fn q_solution(
    i: SolutionIndex,
    pt: &PointPair,
    prm: &Parameters,
    ks: &NormalizationConstants,
    opts: &SeriesOptions,
) -> Result<EvalResult> {
    opts.validate()?;
    let sc = sigma_map(pt, prm)?;
    let asm = q_assembly(i, prm);
    let args = QuadArgs::new(sc.sigma[0], sc.sigma[1], sc.sigma[2], sc.sigma[3]);
    let inner = h43_0_auto(&asm.cp, &args, opts)?;
    let mut pre = ks.k[(i.get() - 1) as usize] * sc.r2.powf(asm.r2_exponent);
    for k in 0..3 {
        if asm.axis_exponents[k] != 0.0 {
            pre *= (pt.x[k] * pt.x0[k]).powf(asm.axis_exponents[k]);
        }
    }
    Ok(EvalResult {
        value: pre * inner.value,
        level_used: inner.level_used,
        tail_estimate: pre.abs() * inner.tail_estimate,
        path: inner.path,
    })
}

/// Coefficient bundle of the differential operator at a point: 1 for each
/// second derivative, 2 alpha_j / x_j for the three singular first
/// derivatives, and -mu for the zeroth-order term.
#[derive(Clone, Debug)]
pub struct PdeCoefficients {
    pub laplacian: Vec<f64>,
    pub first_order: Vec<f64>,
    pub zeroth: f64,
}

pub fn pde_lhs_coefficients(prm: &Parameters, x: &[f64]) -> Result<PdeCoefficients> {
    if x.len() != prm.p {
        return Err(Error::InvalidInput(format!(
            "point has length {}, expected {}",
            x.len(),
            prm.p
        )));
    }
    let mut first_order = vec![0.0; prm.p];
    for j in 0..3 {
        if x[j] == 0.0 {
            return Err(Error::Domain(format!(
                "coefficient 2*alpha/x undefined on the hyperplane x{} = 0",
                j + 1
            )));
        }
        first_order[j] = 2.0 * prm.alpha[j] / x[j];
    }
    Ok(PdeCoefficients {
        laplacian: vec![1.0; prm.p],
        first_order,
        zeroth: -prm.mu,
    })
}
