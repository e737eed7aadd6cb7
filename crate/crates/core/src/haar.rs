//! Monte Carlo estimates of the Haar moments `∫_G ⟨X, Ad_g ξ⟩^k dg` for SU(n)
//! and SO(n), and the consistency check against the exact classes.
//!
//! Haar is normalized to total mass 1. Samples are drawn in fixed blocks of
//! `BLOCK` matrices; block `b` uses ChaCha8 stream `b` under the job seed, so
//! estimates do not depend on how blocks are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use num::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::pushforward::CharClassSet;
use crate::rational::{binomial, format_vector, to_f64, Q};
use crate::rootsys::{Family, RootSystem};

pub type C64 = Complex<f64>;

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 200_000;
/// Relative tolerance of the symbolic/numeric comparison.
pub const REL_TOL: f64 = 0.05;
/// Tolerance in combined standard errors; a check passes under either tolerance.
pub const SIGMA_TOL: f64 = 5.0;

const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarGroup {
    SU(usize),
    SO(usize),
}

impl fmt::Display for HaarGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaarGroup::SU(n) => write!(f, "SU{n}"),
            HaarGroup::SO(n) => write!(f, "SO{n}"),
        }
    }
}

impl FromStr for HaarGroup {
    type Err = Error;

    /// `SU3`, `SU(3)`, `SO5`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !matches!(c, '(' | ')' | ' ')).collect();
        let bad = || Error::Config(format!("unsupported group '{s}': expected SU<n> or SO<n> with n >= 2"));
        let (kind, digits) = t.split_at(t.len().min(2));
        let n: usize = digits.parse().map_err(|_| bad())?;
        if n < 2 {
            return Err(bad());
        }
        match kind {
            "SU" => Ok(HaarGroup::SU(n)),
            "SO" => Ok(HaarGroup::SO(n)),
            _ => Err(bad()),
        }
    }
}

impl HaarGroup {
    pub fn matrix_size(&self) -> usize {
        match *self {
            HaarGroup::SU(n) | HaarGroup::SO(n) => n,
        }
    }

    /// Length of the diagonal vectors `ξ`, `X`: `n` for SU(n), `⌊n/2⌋` for SO(n).
    pub fn vector_len(&self) -> usize {
        match *self {
            HaarGroup::SU(n) => n,
            HaarGroup::SO(n) => n / 2,
        }
    }

    /// Root system of the group in the same ε-coordinates.
    pub fn root_system(&self) -> Result<RootSystem> {
        let (family, rank) = match *self {
            HaarGroup::SU(n) => (Family::A, n - 1),
            HaarGroup::SO(n) if n % 2 == 1 => (Family::B, n / 2),
            HaarGroup::SO(n) => (Family::D, n / 2),
        };
        crate::rootsys::build_root_system(family, rank)
    }

    fn validate(&self, v: &[Q], name: &str) -> Result<Vec<f64>> {
        if v.len() != self.vector_len() {
            return Err(Error::Domain(format!(
                "{name} has {} entries, {self} needs {}",
                v.len(),
                self.vector_len()
            )));
        }
        if matches!(self, HaarGroup::SU(_)) && !v.iter().sum::<Q>().is_zero() {
            return Err(Error::Domain(format!("{name} must be traceless (sum zero) for {self}")));
        }
        Ok(v.iter().map(to_f64).collect())
    }
}

/// One Haar sample from the generator's current state.
fn draw(group: HaarGroup, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let n = group.matrix_size();
    match group {
        HaarGroup::SU(_) => {
            let z = DMatrix::<C64>::from_fn(n, n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im) / std::f64::consts::SQRT_2
            });
            let qr = z.qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                let d = r[(j, j)];
                let phase = if d.norm() > 0.0 {
                    d / d.norm()
                } else {
                    C64::new(1.0, 0.0)
                };
                for i in 0..n {
                    q[(i, j)] *= phase;
                }
            }
            // project U(n) Haar to SU(n): divide by an n-th root of the determinant
            let det = q.determinant();
            let root = C64::from_polar(1.0, -det.arg() / n as f64);
            q * root
        }
        HaarGroup::SO(_) => {
            let z = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
            let qr = z.qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                if r[(j, j)] < 0.0 {
                    q.column_mut(j).neg_mut();
                }
            }
            if q.determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            q.map(|x| C64::new(x, 0.0))
        }
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// `count` Haar-distributed matrices, deterministic in `seed`.
pub fn sample_haar(group: HaarGroup, seed: u64, count: usize) -> Result<Vec<DMatrix<C64>>> {
    if group.matrix_size() < 2 {
        return Err(Error::Config(format!("{group}: n must be at least 2")));
    }
    let mut out = Vec::with_capacity(count);
    let mut block = 0;
    while out.len() < count {
        let mut rng = block_rng(seed, block);
        let take = (count - out.len()).min(BLOCK);
        out.extend((0..take).map(|_| draw(group, &mut rng)));
        block += 1;
    }
    Ok(out)
}

/// `⟨X, g·ξ·g⁻¹⟩` with the torus embedded diagonally (SU) or as 2×2 rotation
/// blocks (SO, paired by `−½ tr`), so that the identity gives `Σ X_i ξ_i`.
fn pairing(group: HaarGroup, g: &DMatrix<C64>, xi: &[f64], x: &[f64]) -> f64 {
    match group {
        HaarGroup::SU(n) => {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += x[i] * g[(i, j)].norm_sqr() * xi[j];
                }
            }
            s
        }
        HaarGroup::SO(_) => {
            // (g A_ξ gᵀ)_{ab} = Σ_j ξ_j (g_{a,2j+1} g_{b,2j} − g_{a,2j} g_{b,2j+1})
            let m = |a: usize, b: usize| -> f64 {
                xi.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        v * (g[(a, 2 * j + 1)].re * g[(b, 2 * j)].re - g[(a, 2 * j)].re * g[(b, 2 * j + 1)].re)
                    })
                    .sum()
            };
            -0.5 * x
                .iter()
                .enumerate()
                .map(|(i, &v)| v * (m(2 * i, 2 * i + 1) - m(2 * i + 1, 2 * i)))
                .sum::<f64>()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub k: u32,
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub group: String,
    pub xi: String,
    #[serde(rename = "X")]
    pub x: String,
}

/// A moment-estimation job; the same samples serve every requested `k`.
#[derive(Debug, Clone)]
pub struct MomentJob {
    pub group: HaarGroup,
    pub xi: Vec<Q>,
    pub x: Vec<Q>,
    pub ks: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    /// Left-translate every sample by this group element.
    pub left: Option<DMatrix<C64>>,
}

impl MomentJob {
    pub fn new(group: HaarGroup, xi: Vec<Q>, x: Vec<Q>, ks: Vec<u32>, samples: usize, seed: u64) -> Self {
        MomentJob {
            group,
            xi,
            x,
            ks,
            samples,
            seed,
            left: None,
        }
    }

    pub fn run(&self, exec: Exec) -> Result<Vec<MomentEstimate>> {
        let xi = self.group.validate(&self.xi, "xi")?;
        let x = self.group.validate(&self.x, "X")?;
        if self.samples < 2 {
            return Err(Error::Domain("need at least two samples for an error bar".into()));
        }
        let nblocks = self.samples.div_ceil(BLOCK);
        let ks = &self.ks;
        let per_block: Vec<Vec<(f64, f64)>> = exec.map_range(nblocks, |b| {
            let mut rng = block_rng(self.seed, b);
            let take = (self.samples - b * BLOCK).min(BLOCK);
            let mut acc = vec![(0.0, 0.0); ks.len()];
            for _ in 0..take {
                let g = draw(self.group, &mut rng);
                let g = match &self.left {
                    Some(h) => h * g,
                    None => g,
                };
                let f = pairing(self.group, &g, &xi, &x);
                for (a, &k) in acc.iter_mut().zip(ks) {
                    let v = f.powi(k as i32);
                    a.0 += v;
                    a.1 += v * v;
                }
            }
            acc
        });
        let n = self.samples as f64;
        let xi_s = format_vector(&self.xi);
        let x_s = format_vector(&self.x);
        Ok(ks
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let (s, ss) = per_block
                    .iter()
                    .fold((0.0, 0.0), |(a, b), blk| (a + blk[i].0, b + blk[i].1));
                let mean = s / n;
                let var = ((ss / n - mean * mean) * n / (n - 1.0)).max(0.0);
                MomentEstimate {
                    k,
                    value: mean,
                    std_error: var.sqrt() / n.sqrt(),
                    samples: self.samples,
                    group: self.group.to_string(),
                    xi: xi_s.clone(),
                    x: x_s.clone(),
                }
            })
            .collect())
    }
}

/// Single-moment convenience wrapper.
pub fn moment_estimate(
    group: HaarGroup,
    xi: &[Q],
    x: &[Q],
    k: i64,
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if k < 0 {
        return Err(Error::Domain(format!("moment order must be non-negative, got {k}")));
    }
    let job = MomentJob::new(group, xi.to_vec(), x.to_vec(), vec![k as u32], samples, seed);
    Ok(job.run(Exec::default())?.remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KDeviation {
    pub k: u32,
    /// Exact class evaluated at X.
    pub symbolic: f64,
    pub moment: f64,
    pub moment_std_error: f64,
    /// `c · C(n+k, k) · moment`.
    pub predicted: f64,
    /// `|symbolic − predicted| / |symbolic|`; absent when the class vanishes at X.
    pub relative_deviation: Option<f64>,
    pub sigma_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub group: String,
    pub n_fiber: usize,
    #[serde(rename = "X")]
    pub x: String,
    pub fit_k: u32,
    /// `c = P_k(X) / (C(n+k,k) · moment_k)` at the fit degree.
    pub fitted_constant: f64,
    /// `1/c`, the numeric-over-symbolic ratio.
    pub inverse_constant: f64,
    /// Exact symplectic volume `π_!(ℓ_ξ^n)`, the `k = 0` class.
    pub orbit_volume: f64,
    /// `c` divided by the orbit volume; 1 when the fit reproduces the `k = 0` normalization.
    pub constant_over_volume: f64,
    pub deviations: Vec<KDeviation>,
    pub rel_tol: f64,
    pub sigma_tol: f64,
    pub pass: bool,
    pub verdict: String,
}

/// Fits the single global constant from the smallest even `k` with a
/// nonvanishing class and checks every other `k` against it.
pub fn fit_and_compare(symbolic: &CharClassSet, estimates: &[MomentEstimate], x: &[Q]) -> Result<ConsistencyReport> {
    let rs: RootSystem = symbolic.group.parse()?;
    if !rs.in_cartan(x) {
        return Err(Error::Domain(format!(
            "X = ({}) is not a point of the Cartan subalgebra of {rs}",
            format_vector(x)
        )));
    }
    let point: Vec<Q> = rs.cartan_coordinates().iter().map(|&i| x[i].clone()).collect();
    let n = symbolic.n_fiber as u64;
    let values: Vec<(u32, Q, &MomentEstimate)> = estimates
        .iter()
        .filter_map(|e| symbolic.class(e.k).map(|p| (e.k, p.eval(&point), e)))
        .collect();
    let fits: Vec<&(u32, Q, &MomentEstimate)> = values
        .iter()
        .filter(|(k, s, e)| k % 2 == 0 && !s.is_zero() && e.value != 0.0)
        .collect();
    if fits.len() < 2 {
        return Err(Error::Domain(format!(
            "fewer than two even-degree classes are nonzero at X = ({}); choose a different evaluation point",
            format_vector(x)
        )));
    }
    let &&(fit_k, ref fit_s, fit_e) = fits.iter().min_by_key(|v| v.0).expect("nonempty");
    let binom = |k: u32| binomial(n + k as u64, k as u64).to_f64().expect("binomial fits f64");
    let c = to_f64(fit_s) / (binom(fit_k) * fit_e.value);
    let fit_rel = fit_e.std_error / fit_e.value.abs();
    let deviations: Vec<KDeviation> = values
        .iter()
        .map(|(k, s, e)| {
            let s = to_f64(s);
            let scale = c * binom(*k);
            let predicted = scale * e.value;
            let diff = (s - predicted).abs();
            let sigma = ((scale * e.std_error).powi(2) + (predicted * fit_rel).powi(2)).sqrt();
            let relative = (s != 0.0).then(|| diff / s.abs());
            let sigma_deviation = if sigma > 0.0 {
                diff / sigma
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let pass = relative.is_some_and(|r| r <= REL_TOL) || sigma_deviation <= SIGMA_TOL;
            KDeviation {
                k: *k,
                symbolic: s,
                moment: e.value,
                moment_std_error: e.std_error,
                predicted,
                relative_deviation: relative,
                sigma_deviation,
                pass,
            }
        })
        .collect();
    let pass = deviations.iter().all(|d| d.pass);
    let volume = to_f64(&crate::pushforward::orbit_volume(&rs, &symbolic.orbit)?);
    Ok(ConsistencyReport {
        group: symbolic.group.clone(),
        n_fiber: symbolic.n_fiber,
        x: format_vector(x),
        fit_k,
        fitted_constant: c,
        inverse_constant: 1.0 / c,
        orbit_volume: volume,
        constant_over_volume: c / volume,
        deviations,
        rel_tol: REL_TOL,
        sigma_tol: SIGMA_TOL,
        pass,
        verdict: if pass { "PASS" } else { "FAIL" }.to_string(),
    })
}
