//! Fibre integration along `G/P → BP → BG` in the Borel model.
//!
//! For the full flag, `π_!(p) = A(p)/Δ` where `A` is Weyl antisymmetrization and
//! `Δ` the product of positive roots. For a parabolic `P`, integration factors
//! through the full flag: `π_!(q) = π_!^{flag}(q·Eu_P) / |W_P|`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::poly::{antisymmetrize, exact_divide, is_invariant_under, restrict_to_cartan, RationalPoly};
use crate::rational::Q;
use crate::rootsys::{OrbitPoint, RootSystem};

/// Product of the positive roots as linear forms.
pub fn discriminant(rs: &RootSystem) -> RationalPoly {
    product_of_forms(rs.ambient_dim(), rs.positive_roots())
}

fn product_of_forms(n: usize, forms: &[Vec<Q>]) -> RationalPoly {
    forms
        .iter()
        .fold(RationalPoly::one(n), |acc, a| &acc * &RationalPoly::linear_form(a))
}

/// `A(p)/Δ`, dividing by one root at a time.
pub fn flag_pushforward(rs: &RootSystem, p: &RationalPoly) -> Result<RationalPoly> {
    let n_pos = rs.positive_roots().len() as u32;
    if p.degree().is_none_or(|d| d < n_pos) {
        if p.nvars() != rs.ambient_dim() {
            return Err(Error::Domain(format!(
                "polynomial has {} variables but {rs} has ambient dimension {}",
                p.nvars(),
                rs.ambient_dim()
            )));
        }
        return Ok(RationalPoly::zero(p.nvars()));
    }
    let mut acc = antisymmetrize(rs, p)?;
    for alpha in rs.positive_roots() {
        acc = exact_divide(&acc, &RationalPoly::linear_form(alpha))?;
    }
    Ok(acc)
}

/// Product of the positive roots of the stabilizer parabolic (1 for regular orbits).
pub fn euler_class_of_parabolic(rs: &RootSystem, orbit: &OrbitPoint) -> RationalPoly {
    product_of_forms(
        rs.ambient_dim(),
        &rs.parabolic_positive_roots(&orbit.stabilizer_simples),
    )
}

/// Half the real dimension of the orbit: positive roots outside the parabolic.
pub fn fiber_half_dim(rs: &RootSystem, orbit: &OrbitPoint) -> usize {
    rs.positive_roots().len() - rs.parabolic_positive_roots(&orbit.stabilizer_simples).len()
}

/// Fibre integration for one orbit type, with the parabolic data precomputed.
#[derive(Debug, Clone)]
pub struct OrbitBundle<'a> {
    rs: &'a RootSystem,
    orbit: OrbitPoint,
    euler: RationalPoly,
    parabolic_order: usize,
    n_fiber: usize,
}

impl<'a> OrbitBundle<'a> {
    pub fn new(rs: &'a RootSystem, orbit: &OrbitPoint) -> Self {
        OrbitBundle {
            rs,
            orbit: orbit.clone(),
            euler: euler_class_of_parabolic(rs, orbit),
            parabolic_order: rs.parabolic_subgroup(&orbit.stabilizer_simples).len(),
            n_fiber: fiber_half_dim(rs, orbit),
        }
    }

    pub fn root_system(&self) -> &RootSystem {
        self.rs
    }

    pub fn orbit(&self) -> &OrbitPoint {
        &self.orbit
    }

    pub fn n_fiber(&self) -> usize {
        self.n_fiber
    }

    pub fn euler_class(&self) -> &RationalPoly {
        &self.euler
    }

    pub fn parabolic_order(&self) -> usize {
        self.parabolic_order
    }

    /// Pushforward in ambient coordinates; `p` must be W_P-invariant.
    pub fn push(&self, p: &RationalPoly) -> Result<RationalPoly> {
        if p.nvars() != self.rs.ambient_dim() {
            return Err(Error::Domain(format!(
                "polynomial has {} variables but {} has ambient dimension {}",
                p.nvars(),
                self.rs,
                self.rs.ambient_dim()
            )));
        }
        if !is_invariant_under(self.rs, &self.orbit.stabilizer_simples, p) {
            return Err(Error::Domain(format!(
                "class {p} is not invariant under the stabilizer Weyl group, so it does not live on the orbit bundle"
            )));
        }
        self.push_unchecked(p)
    }

    pub(crate) fn push_unchecked(&self, p: &RationalPoly) -> Result<RationalPoly> {
        if self.orbit.is_regular() {
            return flag_pushforward(self.rs, p);
        }
        let full = flag_pushforward(self.rs, &(p * &self.euler))?;
        Ok(full.scale(&Q::new(1.into(), (self.parabolic_order as i64).into())))
    }

    /// Pushforward restricted to 𝔱.
    pub fn push_restricted(&self, p: &RationalPoly) -> Result<RationalPoly> {
        restrict_to_cartan(self.rs, &self.push(p)?)
    }
}

pub fn orbit_pushforward(rs: &RootSystem, orbit: &OrbitPoint, p: &RationalPoly) -> Result<RationalPoly> {
    OrbitBundle::new(rs, orbit).push(p)
}

/// The coupling class of an orbit, realized as the linear form `⟨ξ, ·⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CouplingForm {
    pub orbit: OrbitPoint,
    pub linear_form: RationalPoly,
}

pub fn coupling_form(rs: &RootSystem, orbit: &OrbitPoint) -> CouplingForm {
    debug_assert_eq!(orbit.xi.len(), rs.ambient_dim());
    CouplingForm {
        orbit: orbit.clone(),
        linear_form: RationalPoly::linear_form(&orbit.xi),
    }
}

/// The invariant polynomials `P_k(ξ, ·)` for `k = 1..=k_max`, in 𝔱-coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharClassSet {
    pub group: String,
    pub orbit: OrbitPoint,
    pub n_fiber: usize,
    pub classes: BTreeMap<u32, RationalPoly>,
}

impl CharClassSet {
    pub fn class(&self, k: u32) -> Option<&RationalPoly> {
        self.classes.get(&k)
    }
}

/// `P_k = restrict(π_!(ℓ_ξ^{n+k}))`.
pub fn char_classes(rs: &RootSystem, orbit: &OrbitPoint, k_max: u32, exec: Exec) -> Result<CharClassSet> {
    if k_max < 1 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    let bundle = OrbitBundle::new(rs, orbit);
    let ell = coupling_form(rs, orbit).linear_form;
    let n = bundle.n_fiber() as u32;
    let ks: Vec<u32> = (1..=k_max).collect();
    let classes = exec
        .map(&ks, |&k| bundle.push_restricted(&ell.pow(n + k)).map(|p| (k, p)))
        .into_iter()
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(CharClassSet {
        group: rs.to_string(),
        orbit: orbit.clone(),
        n_fiber: n as usize,
        classes,
    })
}

/// The symplectic volume class `π_!(ℓ_ξ^n)` as a constant.
pub fn orbit_volume(rs: &RootSystem, orbit: &OrbitPoint) -> Result<Q> {
    let bundle = OrbitBundle::new(rs, orbit);
    let ell = RationalPoly::linear_form(&orbit.xi);
    let v = bundle.push(&ell.pow(bundle.n_fiber() as u32))?;
    match v.degree() {
        None => Ok(Q::from_integer(0.into())),
        Some(0) => Ok(v.coeff(&crate::poly::Monomial::one(v.nvars()))),
        Some(d) => Err(Error::Integrity(format!("volume class has degree {d}, expected 0"))),
    }
}
