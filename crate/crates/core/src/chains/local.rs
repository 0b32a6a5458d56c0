use super::complex::Check;
use super::rank1::fm_system;
use super::region::RegionKind;
use crate::coeff::{apartment_system, FaceCaches};
use crate::error::{Error, Result};
use crate::hecke::{parahoric_algebra, HeckeModule};
use crate::ring_linalg::{gcd, ModuleMap};
use crate::weyl::{Face, Letter};

/// With `p` invertible in the coefficients: every apartment transition of `F(M)^I` is
/// bijective and `τ_s`, `τ_t` are units in the vertex algebras. The far transitions
/// are also compared against invertibility of `τ_s` on `M`.
pub fn check_locally_constant(m: &HeckeModule, caches: &FaceCaches, radius: usize) -> Result<Vec<Check>> {
    let gd = m.gd;
    let ring = m.ring();
    if gcd(gd.q(), ring.modulus()) != 1 {
        return Err(Error::InvalidInput(format!("q = {} must be a unit in Z/{}", gd.q(), ring.modulus())));
    }
    let (_, sys) = fm_system(m, caches, RegionKind::Apartment, radius)?;
    let ap = apartment_system(&sys)?;
    let bad = ap.transitions.iter().find(|t| !t.map.is_isomorphism());
    let mut checks = vec![Check::new(
        format!("all {} apartment transitions bijective", ap.transitions.len()),
        "locally_constant.transitions",
        bad.is_none(),
    )
    .with_witness(bad.map(|t| format!("chamber {} -> vertex {}", sys.region.chambers[t.chamber].name(), t.vertex)))];

    let mut non_units = Vec::new();
    for (face, letter) in [(Face::X0, Letter::S0), (Face::X1, Letter::S1)] {
        let alg = parahoric_algebra(gd, ring, face, false)?;
        let mut elements = vec![(format!("tau_{letter:?}"), gd.reflection(letter))];
        elements.extend(gd.torus_elements().into_iter().map(|t| (format!("tau_{t:?}"), gd.torus_elt(t))));
        for (name, w) in elements {
            if !alg.is_unit(&alg.basis_vector(&w)?) {
                non_units.push(format!("{name} in H_{face:?}"));
            }
        }
    }
    checks.push(
        Check::new("tau_s and tau_t are units", "locally_constant.units", non_units.is_empty())
            .with_witness((!non_units.is_empty()).then(|| non_units.join(", "))),
    );

    let s_bijective = [&m.s0, &m.s1].map(|a| {
        a.as_ref()
            .map(|a| ModuleMap::new(m.carrier.clone(), m.carrier.clone(), a.clone()).map(|f| f.is_isomorphism()))
    });
    let mut mismatch = None;
    for t in ap.transitions.iter().filter(|t| !t.near) {
        let ty = sys.region.vertices[t.vertex].ty;
        let expect = s_bijective[ty]
            .clone()
            .ok_or_else(|| Error::InvalidInput("module lacks τ_s".into()))??;
        if t.map.is_isomorphism() != expect {
            mismatch = Some(format!("chamber {}", sys.region.chambers[t.chamber].name()));
        }
    }
    checks.push(
        Check::new(
            "far transitions bijective iff tau_s invertible on M",
            "locally_constant.square",
            mismatch.is_none(),
        )
        .with_witness(mismatch),
    );
    Ok(checks)
}
