//! Projection of charge-zero states of `C_k` onto `V(g_0) (x) F(g_1/2)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::screening::Ambient;
use crate::vertexcalc::{Hw, State};

use super::brst::BrstComplex;

/// Drops every monomial containing a current of negative degree and rewrites
/// the rest in the ambient algebra.
pub fn miura_project(cx: &BrstComplex, amb: &Ambient, v: &State) -> Result<State> {
    let d = &cx.grading.datum;
    let e = amb.alg.engine();
    let mut out = State::zero();
    for (m, c) in v.iter() {
        if m.charge(&cx.alg) != 0 {
            return Err(Error::NonZeroCharge);
        }
        if m.hw != Hw::Vac {
            return Err(Error::NonVacuumModule);
        }
        let mut modes = Vec::with_capacity(m.modes.len());
        let mut killed = false;
        for &(g, p) in &m.modes {
            let g = g as usize;
            let target = if g < cx.n_currents() {
                let u = cx.currents[g];
                if cx.grading.deg2[u] < 0 {
                    killed = true;
                    break;
                }
                amb.current(u)
            } else {
                amb.fermion(cx.fermions[g - cx.n_currents()])
            };
            let t = target.ok_or_else(|| Error::UnknownGenerator(format!("{} in {}", cx.alg.gens[g].name, d.name)))?;
            modes.push((t, p));
        }
        if killed {
            continue;
        }
        let s = e.apply_modes(&modes, &State::vacuum())?;
        out.add(&s, c);
    }
    Ok(out)
}

/// `Some(c)` with `a = c b`, for nonzero states.
pub fn proportionality(a: &State, b: &State) -> Option<Scalar> {
    let (m, y) = b.iter().next()?;
    let c = &a.coeff(m) / y;
    (a.sub(&b.scale(&c))).is_zero().then_some(c)
}
