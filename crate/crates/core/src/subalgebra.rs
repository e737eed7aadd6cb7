//! The fibre-integral subalgebra of an orbit, generated degree by degree and
//! compared against the full ring of Weyl invariants.

use std::collections::{BTreeMap, HashSet};

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg;
use crate::poly::{
    jacobian_rank, molien_dims, restrict_to_cartan, sample_points, GradedSubspaceBasis, JacobianRank, RationalPoly,
};
use crate::pushforward::{char_classes, OrbitBundle};
use crate::rational::{binomial, Q};
use crate::rootsys::{classify_orbit, Family, OrbitPoint, RootSystem};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;
/// Default polynomial-degree cutoff (cohomological degree 12).
pub const DEFAULT_CUTOFF: u32 = 6;
/// Default number of Jacobian sample points.
pub const DEFAULT_JACOBIAN_POINTS: usize = 3;

const SAMPLE_RANGE: i64 = 9;
const CHUNK: usize = 8;
const MAX_SATURATION_ROUNDS: usize = 8;

/// How degree-2 classes are combined before integrating over the fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Seeding {
    /// `π_!(u^{n+k})` for sampled face vectors `u`.
    Powers,
    /// `π_!(u_1⋯u_{n+k})` with independent samples.
    Products,
}

#[derive(Debug, Clone, Copy)]
pub struct SubalgebraOptions {
    pub seed: u64,
    pub seeding: Seeding,
    /// Samples beyond `dim Sym^{n+k}(face)` used for every degree.
    pub extra_samples: usize,
    /// Samples added per saturation round.
    pub saturation_samples: usize,
    /// Stop sampling a degree once it already equals the invariant dimension.
    pub stop_when_full: bool,
    pub exec: Exec,
}

impl Default for SubalgebraOptions {
    fn default() -> Self {
        SubalgebraOptions {
            seed: DEFAULT_SEED,
            seeding: Seeding::Powers,
            extra_samples: 2,
            saturation_samples: 2,
            stop_when_full: true,
            exec: Exec::default(),
        }
    }
}

/// Basis of the W_P-fixed subspace of 𝔱* (the degree-2 classes of the orbit bundle).
pub fn face_span_basis(rs: &RootSystem, orbit: &OrbitPoint) -> Vec<Vec<Q>> {
    let mut rows: Vec<Vec<Q>> = orbit
        .stabilizer_simples
        .iter()
        .map(|&i| rs.simple_roots()[i].clone())
        .collect();
    rows.extend(rs.cartan_constraints());
    linalg::nullspace(&rows, rs.ambient_dim())
}

/// Where the generators of a subalgebra came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSample {
    #[serde(serialize_with = "ser_vecs")]
    pub face_basis: Vec<Vec<Q>>,
    /// Face-span points in sampling order; degree `k` used the first `points_per_degree[k]`
    /// (for product seeding, `n+k` consecutive points per generator).
    #[serde(serialize_with = "ser_vecs")]
    pub sample_points: Vec<Vec<Q>>,
    pub points_per_degree: BTreeMap<u32, usize>,
    #[serde(skip)]
    pub powers_used: BTreeMap<u32, Vec<RationalPoly>>,
}

fn ser_vecs<S: serde::Serializer>(v: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&crate::rational::format_vector(x))?;
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubalgebraReport {
    pub group: String,
    pub orbit: OrbitPoint,
    pub cutoff: u32,
    pub algebra_dims: Vec<usize>,
    pub invariant_dims: Vec<u64>,
    pub full_up_to_cutoff: bool,
    pub missing_degrees: Vec<u32>,
    pub seed: u64,
    pub seeding: Seeding,
    /// Every sampled degree stopped growing when extra samples were added.
    pub saturated: bool,
    pub generators: Option<GeneratorSample>,
}

impl SubalgebraReport {
    #[allow(clippy::too_many_arguments)]
    fn finish(
        group: String,
        orbit: OrbitPoint,
        cutoff: u32,
        algebra_dims: Vec<usize>,
        invariant_dims: Vec<u64>,
        seed: u64,
        seeding: Seeding,
        saturated: bool,
        generators: Option<GeneratorSample>,
    ) -> Self {
        let missing_degrees: Vec<u32> = (0..=cutoff)
            .filter(|&d| algebra_dims[d as usize] as u64 != invariant_dims[d as usize])
            .collect();
        SubalgebraReport {
            group,
            orbit,
            cutoff,
            full_up_to_cutoff: missing_degrees.is_empty(),
            algebra_dims,
            invariant_dims,
            missing_degrees,
            seed,
            seeding,
            saturated,
            generators,
        }
    }
}

/// A generated subalgebra: the report plus its per-degree echelon basis.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    pub report: SubalgebraReport,
    pub basis: GradedSubspaceBasis,
}

impl Subalgebra {
    /// Exact membership of a homogeneous polynomial in 𝔱-coordinates.
    pub fn contains(&self, p: &RationalPoly) -> Result<bool> {
        if p.nvars() != self.basis.nvars() {
            return Err(Error::Domain(format!(
                "polynomial has {} variables, expected {}",
                p.nvars(),
                self.basis.nvars()
            )));
        }
        match p.degree() {
            None => Ok(true),
            Some(d) if d > self.report.cutoff => Err(Error::Domain(format!(
                "degree {d} is above the cutoff {}",
                self.report.cutoff
            ))),
            Some(_) if !p.is_homogeneous() => Err(Error::Domain("membership needs a homogeneous polynomial".into())),
            Some(_) => Ok(self.basis.contains(p)),
        }
    }
}

struct FaceSampler {
    basis: Vec<Vec<Q>>,
    rng: ChaCha8Rng,
    seen: HashSet<Vec<i64>>,
}

impl FaceSampler {
    fn new(basis: Vec<Vec<Q>>, seed: u64) -> Self {
        FaceSampler {
            basis,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seen: HashSet::new(),
        }
    }

    /// Next face vector with fresh integer coordinates in `[-9, 9]`.
    fn next_distinct(&mut self) -> Result<Vec<Q>> {
        for _ in 0..10_000 {
            let c = self.draw();
            if c.iter().any(|&x| x != 0) && self.seen.insert(c.clone()) {
                return Ok(self.combine(&c));
            }
        }
        Err(Error::Resource("face span exhausted distinct sample points".into()))
    }

    fn next_nonzero(&mut self) -> Vec<Q> {
        loop {
            let c = self.draw();
            if c.iter().any(|&x| x != 0) {
                return self.combine(&c);
            }
        }
    }

    fn draw(&mut self) -> Vec<i64> {
        (0..self.basis.len())
            .map(|_| self.rng.random_range(-SAMPLE_RANGE..=SAMPLE_RANGE))
            .collect()
    }

    fn combine(&self, c: &[i64]) -> Vec<Q> {
        let n = self.basis.first().map_or(0, Vec::len);
        let mut v = vec![Q::zero(); n];
        for (ci, b) in c.iter().zip(&self.basis) {
            for (x, y) in v.iter_mut().zip(b) {
                *x += y * Q::from_integer((*ci).into());
            }
        }
        v
    }
}

/// Builds 𝔸 up to `cutoff` and compares it degree by degree with the invariant ring.
pub fn generate_subalgebra(
    rs: &RootSystem,
    orbit: &OrbitPoint,
    cutoff: u32,
    opts: &SubalgebraOptions,
) -> Result<Subalgebra> {
    if cutoff < 2 {
        return Err(Error::Domain(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let invariant_dims = molien_dims(rs, cutoff as usize)?;
    let bundle = OrbitBundle::new(rs, orbit);
    let n = bundle.n_fiber() as u32;
    let face = face_span_basis(rs, orbit);
    let face_dim = face.len() as u64;
    if face_dim == 0 {
        return Err(Error::Integrity("orbit has an empty face span".into()));
    }
    let mut sampler = FaceSampler::new(face.clone(), opts.seed);
    let mut product_sampler = FaceSampler::new(face.clone(), opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut sample_points: Vec<Vec<Q>> = Vec::new();
    let mut points_per_degree = BTreeMap::new();
    let mut powers_used: BTreeMap<u32, Vec<RationalPoly>> = BTreeMap::new();
    let mut basis = GradedSubspaceBasis::new(rs.rank());
    let mut saturated = true;

    basis.insert(&RationalPoly::one(rs.rank()))?;
    for d in 1..=cutoff {
        for i in 1..=d / 2 {
            let left = basis.basis(i).to_vec();
            let right = basis.basis(d - i).to_vec();
            for a in &left {
                for b in &right {
                    basis.insert(&(a * b))?;
                }
            }
        }
        let target = invariant_dims[d as usize] as usize;
        let full = |b: &GradedSubspaceBasis| opts.stop_when_full && b.dim(d) >= target;
        let needed = binomial(n as u64 + d as u64 + face_dim - 1, face_dim - 1);
        let needed: usize = num::ToPrimitive::to_usize(&needed)
            .ok_or_else(|| Error::Resource("sample count overflow".into()))?
            + opts.extra_samples;
        let mut used = 0usize;
        let mut generated = Vec::new();

        // Draws `count` generators in fixed-size chunks, stopping early once the degree is full.
        let mut draw = |count: usize, basis: &mut GradedSubspaceBasis, used: &mut usize| -> Result<bool> {
            let mut grew = false;
            let mut remaining = count;
            while remaining > 0 && !full(basis) {
                let take = remaining.min(CHUNK);
                let mut inputs = Vec::with_capacity(take);
                for _ in 0..take {
                    match opts.seeding {
                        Seeding::Powers => {
                            let u = sampler.next_distinct()?;
                            sample_points.push(u.clone());
                            inputs.push(RationalPoly::linear_form(&u).pow(n + d));
                        }
                        Seeding::Products => {
                            let mut prod = RationalPoly::one(rs.ambient_dim());
                            for _ in 0..n + d {
                                let u = product_sampler.next_nonzero();
                                prod = &prod * &RationalPoly::linear_form(&u);
                                sample_points.push(u);
                            }
                            inputs.push(prod);
                        }
                    }
                }
                let pushed = opts.exec.map(&inputs, |p| {
                    bundle.push_unchecked(p).and_then(|q| restrict_to_cartan(rs, &q))
                });
                for p in pushed {
                    let p = p?;
                    grew |= basis.insert(&p)?;
                    generated.push(p);
                }
                *used += take;
                remaining -= take;
            }
            Ok(grew)
        };

        draw(needed, &mut basis, &mut used)?;
        let mut rounds = 0;
        while !full(&basis) && opts.saturation_samples > 0 {
            let grew = draw(opts.saturation_samples, &mut basis, &mut used)?;
            if !grew {
                break;
            }
            rounds += 1;
            if rounds == MAX_SATURATION_ROUNDS {
                saturated = false;
                break;
            }
        }
        points_per_degree.insert(d, used);
        powers_used.insert(d, generated);
    }

    let algebra_dims = basis.dims(cutoff);
    for (d, (&a, &m)) in algebra_dims.iter().zip(&invariant_dims).enumerate() {
        if a as u64 > m {
            return Err(Error::Integrity(format!(
                "subalgebra dimension {a} exceeds invariant dimension {m} in degree {d}"
            )));
        }
    }
    let report = SubalgebraReport::finish(
        rs.to_string(),
        orbit.clone(),
        cutoff,
        algebra_dims,
        invariant_dims,
        opts.seed,
        opts.seeding,
        saturated,
        Some(GeneratorSample {
            face_basis: face,
            sample_points,
            points_per_degree,
            powers_used,
        }),
    );
    Ok(Subalgebra { report, basis })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub group: String,
    pub orbit: OrbitPoint,
    pub k_max: u32,
    /// Degrees whose classes entered the Jacobian (nonzero classes with `k ≥ 2`).
    pub degrees_used: Vec<u32>,
    pub seed: u64,
    pub jacobian: JacobianRank,
    /// Human-readable certification status.
    pub verdict: String,
}

/// Exact Jacobian rank of the nonzero classes `P_2..P_{k_max}` at sampled points.
pub fn independence_report(
    rs: &RootSystem,
    orbit: &OrbitPoint,
    k_max: u32,
    seed: u64,
    points: usize,
    exec: Exec,
) -> Result<IndependenceReport> {
    if (k_max as usize) < rs.rank() {
        return Err(Error::Domain(format!(
            "k_max = {k_max} is below the rank {}",
            rs.rank()
        )));
    }
    let classes = char_classes(rs, orbit, k_max, exec)?;
    let (degrees_used, polys): (Vec<u32>, Vec<RationalPoly>) = classes
        .classes
        .iter()
        .filter(|(&k, p)| k >= 2 && !p.is_zero())
        .map(|(&k, p)| (k, p.clone()))
        .unzip();
    let jacobian = if polys.is_empty() {
        JacobianRank {
            rank: 0,
            polys: 0,
            vars: rs.rank(),
            certified: false,
            witness: None,
        }
    } else {
        jacobian_rank(&polys, &sample_points(rs.rank(), points.max(1), seed))?
    };
    let verdict = if jacobian.certified {
        format!("certified: rank {} (maximal)", jacobian.rank)
    } else {
        format!(
            "not certified independent: rank {} < {} at all sampled points",
            jacobian.rank,
            jacobian.polys.min(jacobian.vars)
        )
    };
    Ok(IndependenceReport {
        group: rs.to_string(),
        orbit: orbit.clone(),
        k_max,
        degrees_used,
        seed,
        jacobian,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemicontinuityReport {
    pub group: String,
    pub inner: SubalgebraReport,
    pub outer: SubalgebraReport,
    /// `per_degree[d]`: every basis element of the inner algebra in degree `d` lies in the outer one.
    pub per_degree: Vec<bool>,
    pub contained: bool,
    pub first_failing_degree: Option<u32>,
}

/// Checks `𝔸(orbit1) ⊆ 𝔸(orbit2)` degree by degree.
pub fn semicontinuity_check(
    rs: &RootSystem,
    orbit1: &OrbitPoint,
    orbit2: &OrbitPoint,
    cutoff: u32,
    opts: &SubalgebraOptions,
) -> Result<SemicontinuityReport> {
    if !orbit2
        .stabilizer_simples
        .iter()
        .all(|i| orbit1.stabilizer_simples.contains(i))
    {
        return Err(Error::Domain(
            "the second orbit must lie on a face whose closure contains the first orbit's face".into(),
        ));
    }
    let inner = generate_subalgebra(rs, orbit1, cutoff, opts)?;
    let outer = generate_subalgebra(rs, orbit2, cutoff, opts)?;
    let per_degree: Vec<bool> = (0..=cutoff)
        .map(|d| inner.basis.basis(d).iter().all(|p| outer.basis.contains(p)))
        .collect();
    let first_failing_degree = per_degree.iter().position(|ok| !ok).map(|d| d as u32);
    Ok(SemicontinuityReport {
        group: rs.to_string(),
        contained: first_failing_degree.is_none(),
        per_degree,
        first_failing_degree,
        inner: inner.report,
        outer: outer.report,
    })
}

fn convolve(a: &[u64], b: &[u64], len: usize) -> Vec<u64> {
    (0..len).map(|d| (0..=d).map(|i| a[i] * b[d - i]).sum()).collect()
}

/// Dimensions of `𝔸(M×N) = 𝔸(M) ⊗ 𝔸(N)` by convolving factor dimensions.
pub fn product_subalgebra(reports: &[SubalgebraReport]) -> Result<SubalgebraReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::Domain("product of zero factors".into()))?;
    let cutoff = first.cutoff;
    if let Some(r) = reports.iter().find(|r| r.cutoff != cutoff) {
        return Err(Error::Domain(format!(
            "factor cutoffs differ ({} vs {})",
            cutoff, r.cutoff
        )));
    }
    let len = cutoff as usize + 1;
    let mut algebra: Vec<u64> = first.algebra_dims.iter().map(|&x| x as u64).collect();
    let mut invariant = first.invariant_dims.clone();
    let mut xi = first.orbit.xi.clone();
    let mut stabilizer = first.orbit.stabilizer_simples.clone();
    let mut face_dim = first.orbit.face_dim;
    let mut simple_offset: usize = first.group.parse::<RootSystem>()?.simple_roots().len();
    let mut labels = vec![first.group.clone()];
    for r in &reports[1..] {
        let a: Vec<u64> = r.algebra_dims.iter().map(|&x| x as u64).collect();
        algebra = convolve(&algebra, &a, len);
        invariant = convolve(&invariant, &r.invariant_dims, len);
        xi.extend(r.orbit.xi.iter().cloned());
        stabilizer.extend(r.orbit.stabilizer_simples.iter().map(|i| i + simple_offset));
        face_dim += r.orbit.face_dim;
        simple_offset += r.group.parse::<RootSystem>()?.simple_roots().len();
        labels.push(r.group.clone());
    }
    let orbit = OrbitPoint {
        xi,
        stabilizer_simples: stabilizer,
        face_dim,
    };
    Ok(SubalgebraReport::finish(
        labels.join("x"),
        orbit,
        cutoff,
        algebra.into_iter().map(|x| x as usize).collect(),
        invariant,
        first.seed,
        first.seeding,
        reports.iter().all(|r| r.saturated),
        None,
    ))
}

/// Generates the subalgebra directly on the direct-sum root system.
pub fn product_direct(factors: &[(RootSystem, Vec<Q>)], cutoff: u32, opts: &SubalgebraOptions) -> Result<Subalgebra> {
    let parts: Vec<(Family, usize)> = factors
        .iter()
        .flat_map(|(rs, _)| rs.components().iter().map(|c| (c.family, c.rank)))
        .collect();
    let sum = RootSystem::direct_sum(&parts)?;
    let xi: Vec<Q> = factors.iter().flat_map(|(_, x)| x.iter().cloned()).collect();
    let orbit = classify_orbit(&sum, &xi)?;
    generate_subalgebra(&sum, &orbit, cutoff, opts)
}

/// A named generator of the invariant ring, in 𝔱-coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedInvariant {
    pub name: String,
    pub degree: u32,
    pub poly: RationalPoly,
    pub convention: String,
}

fn elementary(vars: &[RationalPoly], k: usize, n: usize) -> RationalPoly {
    // e_k via the generating product Π (1 + x_i t), tracked by degree
    let mut e = vec![RationalPoly::zero(n); k + 1];
    e[0] = RationalPoly::one(n);
    for v in vars {
        for j in (1..=k).rev() {
            e[j] = &e[j] + &(&e[j - 1] * v);
        }
    }
    e.swap_remove(k)
}

/// Chern classes for type A, Pontryagin classes for B/C/D, and the Euler class for D.
pub fn standard_generators(rs: &RootSystem) -> Result<Vec<NamedInvariant>> {
    let n = rs.ambient_dim();
    let multi = rs.components().len() > 1;
    let mut out = Vec::new();
    for (ci, c) in rs.components().iter().enumerate() {
        let suffix = if multi { format!("[{}]", ci + 1) } else { String::new() };
        let xs: Vec<RationalPoly> = (c.offset..c.offset + c.ambient_dim())
            .map(|i| RationalPoly::var(n, i))
            .collect();
        let mut push = |name: String, ambient: RationalPoly, convention: &str| -> Result<()> {
            let poly = restrict_to_cartan(rs, &ambient)?;
            out.push(NamedInvariant {
                degree: poly.degree().unwrap_or(0),
                name,
                poly,
                convention: convention.to_string(),
            });
            Ok(())
        };
        match c.family {
            Family::A => {
                for k in 2..=c.rank + 1 {
                    push(
                        format!("c{k}{suffix}"),
                        elementary(&xs, k, n),
                        "c_k = e_k(x_1..x_{r+1}) restricted to sum zero",
                    )?;
                }
            }
            Family::B | Family::C | Family::D => {
                let squares: Vec<RationalPoly> = xs.iter().map(|x| x.pow(2)).collect();
                let top = if c.family == Family::D { c.rank - 1 } else { c.rank };
                for k in 1..=top {
                    push(
                        format!("p{k}{suffix}"),
                        elementary(&squares, k, n),
                        "p_k = e_k(x_1^2..x_r^2)",
                    )?;
                }
                if c.family == Family::D {
                    let e = xs.iter().fold(RationalPoly::one(n), |acc, x| &acc * x);
                    push(format!("e{suffix}"), e, "e = x_1 x_2 ... x_r")?;
                }
            }
        }
    }
    Ok(out)
}
