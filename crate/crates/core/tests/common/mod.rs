//! Algebraic laws shared by the randomized property suite and the acceptance run.
//! Each check returns `Err` with a description of the counterexample.
#![allow(dead_code)]

use fibint::poly::{
    antisymmetrize, apply_weyl, exact_divide, graded_span, is_weyl_invariant, molien_dims, restrict_to_cartan,
    reynolds, RationalPoly,
};
use fibint::pushforward::{discriminant, flag_pushforward, OrbitBundle};
use fibint::rational::{q, Q};
use fibint::rootsys::{classify_orbit, Family, OrbitPoint};
use fibint::subalgebra::{face_span_basis, generate_subalgebra, Seeding, SubalgebraOptions};
use fibint::{Exec, RootSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Check = std::result::Result<(), String>;

pub fn rs(label: &str) -> RootSystem {
    label.parse().unwrap()
}

pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_degree: u32, terms: usize) -> RationalPoly {
    let t: Vec<(Vec<u32>, Q)> = (0..terms)
        .map(|_| {
            let d = rng.random_range(0..=max_degree);
            let mut e = vec![0u32; nvars];
            for _ in 0..d {
                e[rng.random_range(0..nvars)] += 1;
            }
            (e, q(rng.random_range(-5..=5)))
        })
        .collect();
    RationalPoly::from_terms(nvars, t)
}

pub fn random_orbit(rng: &mut ChaCha8Rng, rs: &RootSystem) -> OrbitPoint {
    let r = rs.simple_roots().len();
    loop {
        let stab: Vec<usize> = (0..r).filter(|_| rng.random_bool(0.4)).collect();
        if stab.len() < r {
            return classify_orbit(rs, &rs.point_on_face(&stab)).unwrap();
        }
    }
}

/// A random polynomial in the W_P-invariant linear forms of the orbit's face.
pub fn random_face_poly(rng: &mut ChaCha8Rng, rs: &RootSystem, orbit: &OrbitPoint, degree: u32) -> RationalPoly {
    let basis = face_span_basis(rs, orbit);
    let n = rs.ambient_dim();
    let mut p = RationalPoly::zero(n);
    for _ in 0..2 {
        let mut u = vec![q(0); n];
        for b in &basis {
            let c = q(rng.random_range(-3..=3));
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui += &c * bi;
            }
        }
        p = &p + &RationalPoly::linear_form(&u).pow(degree);
    }
    p
}

fn expect(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// `π_!(p · q) = π_!(p) · q` for W-invariant `q`.
pub fn projection_formula(rng: &mut ChaCha8Rng, rs: &RootSystem) -> Check {
    let orbit = random_orbit(rng, rs);
    let bundle = OrbitBundle::new(rs, &orbit);
    let degree = (bundle.n_fiber() + rng.random_range(0..3)) as u32;
    let p = random_face_poly(rng, rs, &orbit, degree);
    let qinv = reynolds(rs, &random_poly(rng, rs.ambient_dim(), 3, 3)).map_err(|e| e.to_string())?;
    let lhs = bundle.push(&(&p * &qinv)).map_err(|e| e.to_string())?;
    let rhs = &bundle.push(&p).map_err(|e| e.to_string())? * &qinv;
    expect(lhs == rhs, || format!("{rs} xi=({:?}): p={p} q={qinv}", orbit.xi))
}

/// `A(p)` changes sign under every simple reflection.
pub fn anti_invariance(rng: &mut ChaCha8Rng, rs: &RootSystem) -> Check {
    let p = random_poly(rng, rs.ambient_dim(), 5, 4);
    let a = antisymmetrize(rs, &p).map_err(|e| e.to_string())?;
    for i in 0..rs.simple_roots().len() {
        let s = apply_weyl(&rs.simple_reflection(i), &a).map_err(|e| e.to_string())?;
        if s != -&a {
            return Err(format!("{rs}: s{i} does not negate A({p})"));
        }
    }
    Ok(())
}

/// `Δ` divides `A(p)` and the quotient is invariant.
pub fn discriminant_divides(rng: &mut ChaCha8Rng, rs: &RootSystem) -> Check {
    let npos = rs.positive_roots().len() as u32;
    let p = random_poly(rng, rs.ambient_dim(), npos + 2, 4);
    let a = antisymmetrize(rs, &p).map_err(|e| e.to_string())?;
    let delta = discriminant(rs);
    let quot = exact_divide(&a, &delta).map_err(|e| format!("{rs}: {e}"))?;
    expect(&quot * &delta == a && is_weyl_invariant(rs, &quot), || {
        format!("{rs}: A({p})/Δ")
    })?;
    let flag = flag_pushforward(rs, &p).map_err(|e| e.to_string())?;
    expect(flag == quot, || {
        format!("{rs}: flag pushforward differs from A(p)/Δ for {p}")
    })
}

/// Reynolds is an idempotent projection onto invariants that fixes invariants.
pub fn reynolds_projector(rng: &mut ChaCha8Rng, rs: &RootSystem) -> Check {
    let p = random_poly(rng, rs.ambient_dim(), 4, 4);
    let r = reynolds(rs, &p).map_err(|e| e.to_string())?;
    let rr = reynolds(rs, &r).map_err(|e| e.to_string())?;
    expect(rr == r && is_weyl_invariant(rs, &r), || {
        format!("{rs}: R not a projector on {p}")
    })
}

pub fn exact_division_roundtrip(rng: &mut ChaCha8Rng, nvars: usize) -> Check {
    let p = random_poly(rng, nvars, 3, 4);
    let mut d = random_poly(rng, nvars, 2, 3);
    if d.is_zero() {
        d = RationalPoly::one(nvars);
    }
    let got = exact_divide(&(&p * &d), &d).map_err(|e| e.to_string())?;
    expect(got == p, || format!("({p})*({d}) / ({d}) gave {got}"))
}

pub fn distributivity(rng: &mut ChaCha8Rng, nvars: usize) -> Check {
    let a = random_poly(rng, nvars, 3, 4);
    let b = random_poly(rng, nvars, 3, 4);
    let c = random_poly(rng, nvars, 3, 4);
    expect(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || {
        format!("a={a} b={b} c={c}")
    })
}

/// Fibre integration over a product orbit is the product of the factor integrals.
pub fn direct_sum_multiplicativity(rng: &mut ChaCha8Rng, left: (Family, usize), right: (Family, usize)) -> Check {
    let r1 = fibint::rootsys::build_root_system(left.0, left.1).map_err(|e| e.to_string())?;
    let r2 = fibint::rootsys::build_root_system(right.0, right.1).map_err(|e| e.to_string())?;
    let sum = RootSystem::direct_sum(&[left, right]).map_err(|e| e.to_string())?;
    let o1 = random_orbit(rng, &r1);
    let o2 = random_orbit(rng, &r2);
    let b1 = OrbitBundle::new(&r1, &o1);
    let b2 = OrbitBundle::new(&r2, &o2);
    let (e1, e2) = (rng.random_range(0..2), rng.random_range(0..2));
    let f1 = random_face_poly(rng, &r1, &o1, (b1.n_fiber() + e1) as u32);
    let f2 = random_face_poly(rng, &r2, &o2, (b2.n_fiber() + e2) as u32);
    let (n1, n) = (r1.ambient_dim(), sum.ambient_dim());
    let embed = |p: &RationalPoly, offset: usize| {
        let images: Vec<RationalPoly> = (0..p.nvars()).map(|i| RationalPoly::var(n, offset + i)).collect();
        p.substitute(&images)
    };
    let xi: Vec<Q> = o1.xi.iter().chain(&o2.xi).cloned().collect();
    let o = classify_orbit(&sum, &xi).map_err(|e| e.to_string())?;
    let joint = OrbitBundle::new(&sum, &o)
        .push(&(&embed(&f1, 0) * &embed(&f2, n1)))
        .map_err(|e| e.to_string())?;
    let separate =
        &embed(&b1.push(&f1).map_err(|e| e.to_string())?, 0) * &embed(&b2.push(&f2).map_err(|e| e.to_string())?, n1);
    expect(joint == separate, || format!("{sum}: f1={f1} f2={f2}"))
}

/// Restricted Reynolds images of all degree-`d` monomials span a space of Molien dimension.
pub fn molien_matches_reynolds(rs: &RootSystem, d: u32) -> Check {
    let n = rs.ambient_dim();
    let mut images = Vec::new();
    let mut e = vec![0u32; n];
    fn rec(e: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if i + 1 == e.len() {
            e[i] = left;
            out.push(e.clone());
            return;
        }
        for a in 0..=left {
            e[i] = a;
            rec(e, i + 1, left - a, out);
        }
    }
    let mut monos = Vec::new();
    rec(&mut e, 0, d, &mut monos);
    for m in monos {
        let p = RationalPoly::from_terms(n, [(m, q(1))]);
        let r = reynolds(rs, &p).map_err(|e| e.to_string())?;
        images.push(restrict_to_cartan(rs, &r).map_err(|e| e.to_string())?);
    }
    let span = graded_span(rs.rank(), &images, d).map_err(|e| e.to_string())?;
    let molien = molien_dims(rs, d as usize).map_err(|e| e.to_string())?;
    expect(span.dim(d) as u64 == molien[d as usize], || {
        format!(
            "{rs} degree {d}: Reynolds span {} vs Molien {}",
            span.dim(d),
            molien[d as usize]
        )
    })
}

/// Power seeding and product seeding generate the same subalgebra.
pub fn seeding_equivalence(rng: &mut ChaCha8Rng, rs: &RootSystem, cutoff: u32, seed: u64) -> Check {
    let orbit = random_orbit(rng, rs);
    let opts = |seeding| SubalgebraOptions {
        seed,
        seeding,
        exec: Exec::Sequential,
        ..Default::default()
    };
    let a = generate_subalgebra(rs, &orbit, cutoff, &opts(Seeding::Powers)).map_err(|e| e.to_string())?;
    let b = generate_subalgebra(rs, &orbit, cutoff, &opts(Seeding::Products)).map_err(|e| e.to_string())?;
    for d in 0..=cutoff {
        let same = a.basis.basis(d).iter().all(|p| b.basis.contains(p))
            && b.basis.basis(d).iter().all(|p| a.basis.contains(p));
        if !same {
            return Err(format!(
                "{rs} xi=({:?}) degree {d}: powers {:?} vs products {:?}",
                orbit.xi, a.report.algebra_dims, b.report.algebra_dims
            ));
        }
    }
    Ok(())
}
