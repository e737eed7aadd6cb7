//! Exact multivariate polynomials over ℚ in ambient ε-coordinates.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Q};
use crate::rootsys::{Family, RootSystem, WeylElement};

/// Exponent vector, ordered graded-lexicographically (`x1 > x2 > …`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

fn check_dims(a: &RationalPoly, b: &RationalPoly) -> Result<()> {
    if a.nvars != b.nvars {
        return Err(Error::Domain(format!(
            "polynomials live in different rings ({} vs {} variables)",
            a.nvars, b.nvars
        )));
    }
    Ok(())
}

impl RationalPoly {
    pub fn zero(nvars: usize) -> Self {
        RationalPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(Monomial(e), Q::one())
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut p = Self::zero(m.0.len());
        p.add_term(m, c);
        p
    }

    /// `Σ c_i x_i`.
    pub fn linear_form(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Largest monomial in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.leading().map(|(m, _)| m.degree())
    }

    /// Common degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.degree()?;
        self.terms.keys().all(|m| m.degree() == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let mut acc: std::collections::HashMap<Monomial, Q> = Default::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Q::zero) += ca * cb;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(RationalPoly {
            nvars: self.nvars,
            terms,
        })
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        RationalPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Power by repeated squaring; `p^0 = 1`.
    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars, "evaluation point dimension");
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * Q::from_integer(e.into()));
        }
        out
    }

    /// Degree-`d` homogeneous component.
    pub fn component(&self, d: u32) -> Self {
        RationalPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `x_i ↦ images[i]`; the result lives in the images' ring.
    pub fn substitute(&self, images: &[RationalPoly]) -> Self {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target = images.first().map_or(0, |p| p.nvars);
        let max_exp: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<RationalPoly>> = images
            .iter()
            .zip(&max_exp)
            .map(|(img, &top)| {
                let mut v = vec![RationalPoly::one(target)];
                for k in 1..=top as usize {
                    let next = &v[k - 1] * img;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = RationalPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = RationalPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomial encodes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("bad polynomial JSON: {e}")))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&RationalPoly> for &RationalPoly {
            type Output = RationalPoly;

            /// Panics if the operands have different variable counts; use the
            /// `checked_*` form for a recoverable error.
            fn $method(self, rhs: &RationalPoly) -> RationalPoly {
                self.$checked(rhs).expect("operands share a ring")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        self.scale(&-Q::one())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{e}", i + 1)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    vars: usize,
    terms: BTreeMap<String, String>,
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let key = m.0.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
                (key, format_rational(c))
            })
            .collect();
        PolyWire {
            vars: self.nvars,
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = PolyWire::deserialize(d)?;
        let mut p = RationalPoly::zero(wire.vars);
        for (k, v) in wire.terms {
            let exps: Vec<u32> = if wire.vars == 0 && k.is_empty() {
                Vec::new()
            } else {
                k.split(',')
                    .map(|e| e.trim().parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| D::Error::custom(format!("bad exponent key '{k}'")))?
            };
            if exps.len() != wire.vars {
                return Err(D::Error::custom(format!(
                    "exponent key '{k}' has {} entries, expected {}",
                    exps.len(),
                    wire.vars
                )));
            }
            let c = parse_rational(&v).map_err(|e| D::Error::custom(e.to_string()))?;
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }
}

/// `(w·p)(x) = p(w⁻¹x)`: for a signed permutation this sends `x_i ↦ s_i·x_{π(i)}`.
pub fn apply_weyl(w: &WeylElement, p: &RationalPoly) -> Result<RationalPoly> {
    if w.dim() != p.nvars {
        return Err(Error::Domain(format!(
            "Weyl element acts on {} coordinates, polynomial has {} variables",
            w.dim(),
            p.nvars
        )));
    }
    Ok(apply_signed(w, p, 1))
}

fn apply_signed(w: &WeylElement, p: &RationalPoly, outer: i8) -> RationalPoly {
    let perm = w.perm();
    let signs = w.signs();
    let mut terms = BTreeMap::new();
    for (m, c) in &p.terms {
        let mut e = vec![0u32; m.0.len()];
        let mut s = outer;
        for (i, &a) in m.0.iter().enumerate() {
            e[perm[i]] = a;
            if signs[i] < 0 && a % 2 == 1 {
                s = -s;
            }
        }
        terms.insert(Monomial(e), if s < 0 { -c.clone() } else { c.clone() });
    }
    RationalPoly { nvars: p.nvars, terms }
}

fn weyl_sum(group: &[WeylElement], p: &RationalPoly, signed: bool) -> RationalPoly {
    let mut acc: std::collections::HashMap<Monomial, Q> = Default::default();
    for w in group {
        let outer = if signed { w.sign() } else { 1 };
        for (m, c) in apply_signed(w, p, outer).terms {
            *acc.entry(m).or_insert_with(Q::zero) += c;
        }
    }
    RationalPoly {
        nvars: p.nvars,
        terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
    }
}

fn check_ring(rs: &RootSystem, p: &RationalPoly) -> Result<()> {
    if p.nvars != rs.ambient_dim() {
        return Err(Error::Domain(format!(
            "polynomial has {} variables but {rs} has ambient dimension {}",
            p.nvars,
            rs.ambient_dim()
        )));
    }
    Ok(())
}

/// `Σ_w sign(w)·(w·p)`.
pub fn antisymmetrize(rs: &RootSystem, p: &RationalPoly) -> Result<RationalPoly> {
    check_ring(rs, p)?;
    Ok(weyl_sum(rs.weyl_group()?, p, true))
}

/// Orbit average `(1/|W|)·Σ_w w·p`.
pub fn reynolds(rs: &RootSystem, p: &RationalPoly) -> Result<RationalPoly> {
    check_ring(rs, p)?;
    let group = rs.weyl_group()?;
    Ok(weyl_sum(group, p, false).scale(&Q::new(1.into(), (group.len() as u64).into())))
}

/// Invariance under the subgroup generated by the listed simple reflections.
pub fn is_invariant_under(rs: &RootSystem, simples: &[usize], p: &RationalPoly) -> bool {
    simples
        .iter()
        .all(|&i| apply_signed(&rs.simple_reflection(i), p, 1) == *p)
}

pub fn is_weyl_invariant(rs: &RootSystem, p: &RationalPoly) -> bool {
    let all: Vec<usize> = (0..rs.simple_roots().len()).collect();
    is_invariant_under(rs, &all, p)
}

/// Returns `r` with `p = q·r`; a nonzero remainder is an integrity failure.
pub fn exact_divide(p: &RationalPoly, q: &RationalPoly) -> Result<RationalPoly> {
    check_dims(p, q)?;
    let (lm_q, lc_q) = q
        .leading()
        .map(|(m, c)| (m.clone(), c.clone()))
        .ok_or_else(|| Error::Domain("division by the zero polynomial".into()))?;
    let mut rem = p.clone();
    let mut quot = RationalPoly::zero(p.nvars);
    while let Some((lm, lc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let Some(m) = lm.div(&lm_q) else {
            return Err(Error::Integrity(format!(
                "exact division failed: leading term of remainder not divisible by ({q})"
            )));
        };
        let c = lc / &lc_q;
        for (mq, cq) in &q.terms {
            rem.add_term(mq.mul(&m), -(cq * &c));
        }
        quot.add_term(m, c);
    }
    Ok(quot)
}

/// For type-A blocks eliminates the last coordinate via the sum-zero relation;
/// the result is in the `rank`-variable ring of 𝔱. Identity on B/C/D blocks.
pub fn restrict_to_cartan(rs: &RootSystem, p: &RationalPoly) -> Result<RationalPoly> {
    check_ring(rs, p)?;
    let r = rs.rank();
    let mut images = Vec::with_capacity(rs.ambient_dim());
    let mut next = 0;
    for c in rs.components() {
        let start = next;
        for _ in 0..c.rank {
            images.push(RationalPoly::var(r, next));
            next += 1;
        }
        if c.family == Family::A {
            let mut s = RationalPoly::zero(r);
            for k in start..next {
                s = &s - &RationalPoly::var(r, k);
            }
            images.push(s);
        }
    }
    Ok(p.substitute(&images))
}

/// Inverse of restriction on W-invariants: pulls a 𝔱-polynomial back along the
/// orthogonal projection of the ambient space onto 𝔱.
pub fn lift_from_cartan(rs: &RootSystem, p: &RationalPoly) -> Result<RationalPoly> {
    if p.nvars != rs.rank() {
        return Err(Error::Domain(format!(
            "polynomial has {} variables but {rs} has rank {}",
            p.nvars,
            rs.rank()
        )));
    }
    let n = rs.ambient_dim();
    let mut images = Vec::with_capacity(rs.rank());
    for c in rs.components() {
        let m = c.ambient_dim();
        let mut mean = RationalPoly::zero(n);
        if c.family == Family::A {
            for k in c.offset..c.offset + m {
                mean = &mean + &RationalPoly::var(n, k);
            }
            mean = mean.scale(&Q::new(1.into(), (m as i64).into()));
        }
        for k in c.offset..c.offset + c.rank {
            images.push(&RationalPoly::var(n, k) - &mean);
        }
    }
    Ok(p.substitute(&images))
}

/// Reduced row-echelon bases, one per degree, of a graded subspace of
/// homogeneous polynomials. Pivots are leading monomials in graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSubspaceBasis {
    nvars: usize,
    per_degree: BTreeMap<u32, Vec<RationalPoly>>,
}

impl GradedSubspaceBasis {
    pub fn new(nvars: usize) -> Self {
        GradedSubspaceBasis {
            nvars,
            per_degree: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self, d: u32) -> &[RationalPoly] {
        self.per_degree.get(&d).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, d: u32) -> usize {
        self.basis(d).len()
    }

    pub fn dims(&self, max_degree: u32) -> Vec<usize> {
        (0..=max_degree).map(|d| self.dim(d)).collect()
    }

    /// Remainder of `p` after elimination against the degree's basis.
    pub fn reduce(&self, p: &RationalPoly) -> RationalPoly {
        let Some(d) = p.degree() else {
            return p.clone();
        };
        let mut r = p.clone();
        for row in self.basis(d) {
            let (pivot, _) = row.leading().expect("basis rows are nonzero");
            let c = r.coeff(pivot);
            if !c.is_zero() {
                r = &r - &row.scale(&c);
            }
        }
        r
    }

    pub fn contains(&self, p: &RationalPoly) -> bool {
        self.reduce(p).is_zero()
    }

    /// Adds `p`; returns whether the span grew.
    pub fn insert(&mut self, p: &RationalPoly) -> Result<bool> {
        if p.nvars != self.nvars {
            return Err(Error::Domain(format!(
                "polynomial has {} variables, basis ring has {}",
                p.nvars, self.nvars
            )));
        }
        let Some(d) = p.homogeneous_degree() else {
            if p.is_zero() {
                return Ok(false);
            }
            return Err(Error::Domain(format!("graded span needs homogeneous input, got {p}")));
        };
        let r = self.reduce(p);
        let Some((pivot, lc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) else {
            return Ok(false);
        };
        let r = r.scale(&(Q::one() / lc));
        let rows = self.per_degree.entry(d).or_default();
        for row in rows.iter_mut() {
            let c = row.coeff(&pivot);
            if !c.is_zero() {
                *row = &*row - &r.scale(&c);
            }
        }
        rows.push(r);
        rows.sort_by(|a, b| b.leading().unwrap().0.cmp(a.leading().unwrap().0));
        Ok(true)
    }
}

/// Span of homogeneous polynomials of degree at most `max_degree`, graded by degree.
pub fn graded_span(nvars: usize, polys: &[RationalPoly], max_degree: u32) -> Result<GradedSubspaceBasis> {
    let mut basis = GradedSubspaceBasis::new(nvars);
    for p in polys {
        if let Some(d) = p.degree() {
            if d > max_degree {
                return Err(Error::Domain(format!(
                    "polynomial of degree {d} exceeds max_degree {max_degree}"
                )));
            }
        }
        basis.insert(p)?;
    }
    Ok(basis)
}

/// Dimensions of degree-`d` W-invariants on 𝔱 for `d = 0..=max_degree`, by
/// averaging `1/det(I − t·w|𝔱)` over the Weyl group as truncated series.
pub fn molien_dims(rs: &RootSystem, max_degree: usize) -> Result<Vec<u64>> {
    let group = rs.weyl_group()?;
    let type_a = rs.components().iter().filter(|c| c.family == Family::A).count();
    let len = max_degree + 1;
    let mut total = vec![Q::zero(); len];
    for w in group {
        let mut series = vec![Q::zero(); len];
        series[0] = Q::one();
        for (cycle, s) in w.cycles() {
            // multiply by 1/(1 − s·t^cycle)
            for d in cycle..len {
                let prev = series[d - cycle].clone();
                if s > 0 {
                    series[d] += prev;
                } else {
                    series[d] -= prev;
                }
            }
        }
        // strip the trivial (1 − t) factor of each type-A block
        for _ in 0..type_a {
            for d in (1..len).rev() {
                let prev = series[d - 1].clone();
                series[d] -= prev;
            }
        }
        for (t, s) in total.iter_mut().zip(series) {
            *t += s;
        }
    }
    let order = Q::from_integer((group.len() as u64).into());
    total
        .into_iter()
        .enumerate()
        .map(|(d, t)| {
            let v = t / &order;
            if !v.is_integer() || v.is_negative() {
                return Err(Error::Integrity(format!("Molien coefficient in degree {d} is {v}")));
            }
            Ok(num::ToPrimitive::to_u64(v.numer()).expect("dimension fits in u64"))
        })
        .collect()
}

/// Outcome of an exact Jacobian rank test at sample points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobianRank {
    pub rank: usize,
    pub polys: usize,
    pub vars: usize,
    /// Rank reached `min(polys, vars)`: a proof of algebraic independence.
    pub certified: bool,
    pub witness: Option<MinorWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorWitness {
    #[serde(serialize_with = "ser_q_vec")]
    pub point: Vec<Q>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    #[serde(serialize_with = "ser_q")]
    pub determinant: Q,
}

fn ser_q<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

fn ser_q_vec<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::rational::format_vector(v))
}

/// Maximum over the points of the exact rank of the Jacobian of `polys`.
pub fn jacobian_rank(polys: &[RationalPoly], points: &[Vec<Q>]) -> Result<JacobianRank> {
    let first = polys
        .first()
        .ok_or_else(|| Error::Domain("Jacobian rank of an empty family".into()))?;
    if points.is_empty() {
        return Err(Error::Domain("Jacobian rank needs at least one sample point".into()));
    }
    let n = first.nvars;
    for p in polys {
        check_dims(first, p)?;
    }
    let grads: Vec<Vec<RationalPoly>> = polys
        .iter()
        .map(|p| (0..n).map(|i| p.derivative(i)).collect())
        .collect();
    let target = polys.len().min(n);
    let mut best = JacobianRank {
        rank: 0,
        polys: polys.len(),
        vars: n,
        certified: false,
        witness: None,
    };
    for pt in points {
        if pt.len() != n {
            return Err(Error::Domain(format!(
                "sample point has {} coordinates, expected {n}",
                pt.len()
            )));
        }
        let m: Vec<Vec<Q>> = grads
            .iter()
            .map(|row| row.iter().map(|d| d.eval(pt)).collect())
            .collect();
        let (rank, rows, cols) = crate::linalg::rank_with_minor(&m);
        if rank > best.rank {
            let sub: Vec<Vec<Q>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
                .collect();
            let det = crate::linalg::determinant(&sub);
            best.rank = rank;
            best.witness = Some(MinorWitness {
                point: pt.clone(),
                rows,
                cols,
                determinant: det,
            });
        }
        if best.rank == target {
            break;
        }
    }
    best.certified = best.rank == target;
    Ok(best)
}

/// Deterministic integer sample points with coordinates in `[-9, 9]`.
pub fn sample_points(nvars: usize, count: usize, seed: u64) -> Vec<Vec<Q>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..nvars)
                .map(|_| crate::rational::q(rng.random_range(-9..=9)))
                .collect()
        })
        .collect()
}
