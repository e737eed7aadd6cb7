//! Classical root data in ε-coordinates, Weyl groups as signed permutations,
//! and classification of dominant points by chamber face.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{dot, format_vector, q, Q};

/// Default ceiling on Weyl group size; anything larger is an exceptional-scale request.
pub const DEFAULT_WEYL_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
        };
        write!(f, "{c}")
    }
}

/// One simple factor of a (possibly reducible) root system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub family: Family,
    pub rank: usize,
    /// First ambient coordinate owned by this factor.
    pub offset: usize,
}

impl Component {
    pub fn ambient_dim(&self) -> usize {
        match self.family {
            Family::A => self.rank + 1,
            _ => self.rank,
        }
    }

    fn weyl_order(&self) -> Option<u64> {
        let r = self.rank as u64;
        let fact = (1..=r).try_fold(1u64, |acc, i| acc.checked_mul(i))?;
        match self.family {
            Family::A => fact.checked_mul(r + 1),
            Family::B | Family::C => fact.checked_mul(1u64.checked_shl(r as u32)?),
            Family::D => fact.checked_mul(1u64.checked_shl(r as u32 - 1)?),
        }
    }
}

/// A direct sum of classical root systems realized on concatenated ε-coordinates.
#[derive(Debug, Clone)]
pub struct RootSystem {
    components: Vec<Component>,
    ambient_dim: usize,
    simple_roots: Vec<Vec<Q>>,
    positive_roots: Vec<Vec<Q>>,
    weyl_order: u64,
    weyl: OnceLock<Vec<WeylElement>>,
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

impl Eq for RootSystem {}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| format!("{}{}", c.family, c.rank))
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

fn unit(n: usize, i: usize, c: i64) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = q(c);
    v
}

fn pair(n: usize, i: usize, ci: i64, j: usize, cj: i64) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = q(ci);
    v[j] = q(cj);
    v
}

/// Builds a simple classical root system.
pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    RootSystem::direct_sum(&[(family, rank)])
}

impl RootSystem {
    /// Direct sum of simple factors, coordinates concatenated in the given order.
    pub fn direct_sum(factors: &[(Family, usize)]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Config("empty root system".into()));
        }
        let mut components = Vec::with_capacity(factors.len());
        let mut offset = 0;
        let mut weyl_order: u64 = 1;
        for &(family, rank) in factors {
            if rank == 0 {
                return Err(Error::Config(format!("rank must be at least 1, got {family}{rank}")));
            }
            if family == Family::D && rank < 3 {
                return Err(Error::Config(format!(
                    "type D requires rank at least 3, got {family}{rank}"
                )));
            }
            let c = Component { family, rank, offset };
            weyl_order = c
                .weyl_order()
                .and_then(|o| o.checked_mul(weyl_order))
                .ok_or_else(|| Error::Resource(format!("Weyl group of {family}{rank} is too large")))?;
            offset += c.ambient_dim();
            components.push(c);
        }
        let n = offset;
        let mut simple_roots = Vec::new();
        let mut positive_roots = Vec::new();
        for c in &components {
            let o = c.offset;
            let r = c.rank;
            let m = c.ambient_dim();
            let chain = if c.family == Family::A { r } else { r - 1 };
            for i in 0..chain {
                simple_roots.push(pair(n, o + i, 1, o + i + 1, -1));
            }
            match c.family {
                Family::A => {}
                Family::B => simple_roots.push(unit(n, o + r - 1, 1)),
                Family::C => simple_roots.push(unit(n, o + r - 1, 2)),
                Family::D => simple_roots.push(pair(n, o + r - 2, 1, o + r - 1, 1)),
            }
            for i in 0..m {
                for j in i + 1..m {
                    positive_roots.push(pair(n, o + i, 1, o + j, -1));
                    if c.family != Family::A {
                        positive_roots.push(pair(n, o + i, 1, o + j, 1));
                    }
                }
                match c.family {
                    Family::B => positive_roots.push(unit(n, o + i, 1)),
                    Family::C => positive_roots.push(unit(n, o + i, 2)),
                    _ => {}
                }
            }
        }
        Ok(RootSystem {
            components,
            ambient_dim: n,
            simple_roots,
            positive_roots,
            weyl_order,
            weyl: OnceLock::new(),
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// The family of a simple root system; `None` for a proper direct sum.
    pub fn family(&self) -> Option<Family> {
        match self.components.as_slice() {
            [c] => Some(c.family),
            _ => None,
        }
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn simple_roots(&self) -> &[Vec<Q>] {
        &self.simple_roots
    }

    pub fn positive_roots(&self) -> &[Vec<Q>] {
        &self.positive_roots
    }

    pub fn weyl_order(&self) -> u64 {
        self.weyl_order
    }

    /// Reflection in the `i`-th simple root.
    pub fn simple_reflection(&self, i: usize) -> WeylElement {
        let alpha = &self.simple_roots[i];
        let n = self.ambient_dim;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut signs = vec![1i8; n];
        let support: Vec<usize> = (0..n).filter(|&k| !alpha[k].is_zero()).collect();
        match support.as_slice() {
            [a] => signs[*a] = -1,
            [a, b] if alpha[*a] == -alpha[*b].clone() => perm.swap(*a, *b),
            [a, b] => {
                perm.swap(*a, *b);
                signs[*a] = -1;
                signs[*b] = -1;
            }
            _ => unreachable!("classical simple roots have support of size 1 or 2"),
        }
        WeylElement::new(perm, signs)
    }

    /// Weyl group, enumerated once under the default cap.
    pub fn weyl_group(&self) -> Result<&[WeylElement]> {
        if let Some(w) = self.weyl.get() {
            return Ok(w);
        }
        let elems = enumerate_weyl(self, DEFAULT_WEYL_CAP)?;
        Ok(self.weyl.get_or_init(|| elems))
    }

    /// Subgroup generated by the given simple reflections.
    pub fn parabolic_subgroup(&self, simples: &[usize]) -> Vec<WeylElement> {
        let gens: Vec<WeylElement> = simples.iter().map(|&i| self.simple_reflection(i)).collect();
        closure(self.ambient_dim, &gens, u64::MAX).expect("parabolic subgroup of a finite group")
    }

    /// Positive roots whose simple-root support lies in `simples`.
    pub fn parabolic_positive_roots(&self, simples: &[usize]) -> Vec<Vec<Q>> {
        self.positive_roots
            .iter()
            .filter(|alpha| {
                let coeffs = self.simple_coordinates(alpha).expect("roots lie in the root span");
                coeffs
                    .iter()
                    .enumerate()
                    .all(|(i, c)| c.is_zero() || simples.contains(&i))
            })
            .cloned()
            .collect()
    }

    /// Expansion of `v` in the basis of simple roots, if `v` lies in their span.
    pub fn simple_coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        let n = self.ambient_dim;
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|k| self.simple_roots.iter().map(|a| a[k].clone()).collect())
            .collect();
        linalg::solve(&rows, v)
    }

    /// Whether `v` lies in 𝔱*, i.e. every type-A block sums to zero.
    pub fn in_cartan(&self, v: &[Q]) -> bool {
        v.len() == self.ambient_dim
            && self
                .components
                .iter()
                .all(|c| c.family != Family::A || v[c.offset..c.offset + c.ambient_dim()].iter().sum::<Q>().is_zero())
    }

    /// Linear constraints cutting 𝔱* out of the ambient space.
    pub(crate) fn cartan_constraints(&self) -> Vec<Vec<Q>> {
        self.components
            .iter()
            .filter(|c| c.family == Family::A)
            .map(|c| {
                let mut v = vec![Q::zero(); self.ambient_dim];
                for x in &mut v[c.offset..c.offset + c.ambient_dim()] {
                    *x = q(1);
                }
                v
            })
            .collect()
    }

    /// A point in 𝔱* pairing to 0 with the simple roots in `stabilizer` and to 1 with the rest.
    pub fn point_on_face(&self, stabilizer: &[usize]) -> Vec<Q> {
        let mut rows = self.simple_roots.clone();
        let mut rhs: Vec<Q> = (0..rows.len())
            .map(|i| if stabilizer.contains(&i) { q(0) } else { q(1) })
            .collect();
        for c in self.cartan_constraints() {
            rows.push(c);
            rhs.push(q(0));
        }
        linalg::solve(&rows, &rhs).expect("simple roots are independent on 𝔱*")
    }

    /// Ambient coordinates that survive restriction to 𝔱 (the last coordinate
    /// of each type-A block is eliminated).
    pub fn cartan_coordinates(&self) -> Vec<usize> {
        self.components
            .iter()
            .flat_map(|c| c.offset..c.offset + c.rank)
            .collect()
    }
}

impl FromStr for RootSystem {
    type Err = Error;

    /// Accepts `A3`, `D4`, and direct sums such as `A1xA1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for part in s.trim().split(['x', '+']) {
            let mut chars = part.chars();
            let family = match chars.next() {
                Some('A') => Family::A,
                Some('B') => Family::B,
                Some('C') => Family::C,
                Some('D') => Family::D,
                _ => {
                    return Err(Error::Config(format!(
                        "unsupported root system label '{s}': expected one of A/B/C/D followed by a rank"
                    )))
                }
            };
            let digits = chars.as_str();
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(Error::Config(format!("invalid rank in root system label '{s}'")));
            }
            let rank: usize = digits
                .parse()
                .map_err(|_| Error::Config(format!("invalid rank in root system label '{s}'")))?;
            factors.push((family, rank));
        }
        RootSystem::direct_sum(&factors)
    }
}

/// A Weyl group element as a signed permutation: `w·e_i = signs[i]·e_{perm[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    perm: Vec<usize>,
    signs: Vec<i8>,
    sign: i8,
}

impl WeylElement {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Self {
        let sign = permutation_parity(&perm) * signs.iter().product::<i8>();
        WeylElement { perm, signs, sign }
    }

    pub fn identity(n: usize) -> Self {
        WeylElement::new((0..n).collect(), vec![1; n])
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Determinant on 𝔱 (equal to the ambient determinant).
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let perm: Vec<usize> = other.perm.iter().map(|&p| self.perm[p]).collect();
        let signs: Vec<i8> = other
            .perm
            .iter()
            .zip(&other.signs)
            .map(|(&p, &s)| s * self.signs[p])
            .collect();
        WeylElement {
            perm,
            signs,
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(&self) -> WeylElement {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        WeylElement {
            perm,
            signs,
            sign: self.sign,
        }
    }

    pub fn act(&self, v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); v.len()];
        for i in 0..v.len() {
            out[self.perm[i]] = if self.signs[i] < 0 { -v[i].clone() } else { v[i].clone() };
        }
        out
    }

    /// Dense matrix on ambient coordinates (column `i` is the image of `e_i`).
    pub fn matrix(&self) -> Vec<Vec<Q>> {
        let n = self.perm.len();
        let mut m = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            m[self.perm[i]][i] = q(self.signs[i] as i64);
        }
        m
    }

    /// Characteristic data for Molien: one `(length, sign product)` per cycle.
    pub fn cycles(&self) -> Vec<(usize, i8)> {
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut s = 1i8;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                s *= self.signs[i];
                i = self.perm[i];
                len += 1;
            }
            out.push((len, s));
        }
        out
    }
}

fn permutation_parity(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut parity = 1i8;
    for start in 0..perm.len() {
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            parity = -parity;
        }
    }
    parity
}

fn closure(n: usize, gens: &[WeylElement], cap: u64) -> Result<Vec<WeylElement>> {
    let id = WeylElement::identity(n);
    let mut seen: HashSet<WeylElement> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(w) = queue.pop_front() {
        for g in gens {
            let next = g.compose(&w);
            if seen.insert(next.clone()) {
                if out.len() as u64 >= cap {
                    return Err(Error::Resource(format!(
                        "Weyl group enumeration exceeded cap of {cap} elements"
                    )));
                }
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(out)
}

/// All Weyl group elements, identity first.
pub fn enumerate_weyl(rs: &RootSystem, cap: u64) -> Result<Vec<WeylElement>> {
    if rs.weyl_order > cap {
        return Err(Error::Resource(format!(
            "Weyl group of {rs} has order {} above the cap {cap}",
            rs.weyl_order
        )));
    }
    let gens: Vec<WeylElement> = (0..rs.simple_roots.len()).map(|i| rs.simple_reflection(i)).collect();
    closure(rs.ambient_dim, &gens, cap)
}

/// Sign computed as `(-1)^{#positive roots sent to negative roots}`.
pub fn sign_by_inversions(rs: &RootSystem, w: &WeylElement) -> i8 {
    let positive: HashSet<&Vec<Q>> = rs.positive_roots.iter().collect();
    let inversions = rs
        .positive_roots
        .iter()
        .filter(|a| !positive.contains(&w.act(a)))
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A dominant covector together with its face of the closed Weyl chamber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPoint {
    #[serde(serialize_with = "ser_vec", deserialize_with = "de_vec")]
    pub xi: Vec<Q>,
    pub stabilizer_simples: Vec<usize>,
    pub face_dim: usize,
}

impl OrbitPoint {
    pub fn is_regular(&self) -> bool {
        self.stabilizer_simples.is_empty()
    }
}

fn ser_vec<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_vector(v))
}

fn de_vec<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
    let s = String::deserialize(d)?;
    crate::rational::parse_vector(&s).map_err(serde::de::Error::custom)
}

/// Validates `xi` and records which simple roots it is orthogonal to.
pub fn classify_orbit(rs: &RootSystem, xi: &[Q]) -> Result<OrbitPoint> {
    if xi.len() != rs.ambient_dim {
        return Err(Error::Domain(format!(
            "xi has {} coordinates but {rs} needs {}",
            xi.len(),
            rs.ambient_dim
        )));
    }
    if !rs.in_cartan(xi) {
        return Err(Error::Domain(format!(
            "xi = ({}) must have zero coordinate sum on every type-A block",
            format_vector(xi)
        )));
    }
    if xi.iter().all(Zero::is_zero) {
        return Err(Error::Domain("xi = 0 gives a point orbit; choose a nonzero xi".into()));
    }
    let mut stabilizer = Vec::new();
    for (i, alpha) in rs.simple_roots.iter().enumerate() {
        let p = dot(xi, alpha);
        if p.is_negative() {
            return Err(Error::Domain(format!(
                "xi = ({}) is not dominant (pairs negatively with simple root {}); apply a Weyl element first",
                format_vector(xi),
                i + 1
            )));
        }
        if p.is_zero() {
            stabilizer.push(i);
        }
    }
    let face_dim = rs.rank() - stabilizer.len();
    Ok(OrbitPoint {
        xi: xi.to_vec(),
        stabilizer_simples: stabilizer,
        face_dim,
    })
}
