//! Sugawara construction and Virasoro checks.

use super::field::bracket_with;
use super::state::State;
use super::Algebra;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Scalar, Q};

/// `L = (2s)^{-1} sum_{i,l} (G^{-1})_{il} :J_l J_i:` for currents `J` with
/// Gram matrix `G` of the invariant form and shift `s = k + h^vee`.
pub fn sugawara(alg: &Algebra, currents: &[usize], gram: &[Vec<Q>], shift: &Scalar) -> Result<State> {
    let n = currents.len();
    let g: linalg::Matrix = gram
        .iter()
        .map(|r| r.iter().map(|x| Scalar::from_q(x.clone())).collect())
        .collect();
    let mut inv = vec![vec![Scalar::zero(); n]; n];
    for j in 0..n {
        let mut e = vec![Scalar::zero(); n];
        e[j] = Scalar::one();
        let x = linalg::solve(&g, &e, n).ok_or(Error::DegenerateForm)?;
        for i in 0..n {
            inv[i][j] = x[i].clone();
        }
    }
    if shift.is_zero() {
        return Err(Error::CriticalLevel);
    }
    let pref = (&Scalar::from_int(2) * shift).inv();
    let e = alg.engine();
    let mut l = State::zero();
    for i in 0..n {
        for (j, c) in inv[i].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = e.apply_modes(&[(currents[j], -1), (currents[i], -1)], &State::vacuum())?;
            l.add(&s, &(c * &pref));
        }
    }
    Ok(l)
}

/// Outcome of checking the Virasoro lambda-bracket.
#[derive(Clone, Debug)]
pub struct VirasoroCheck {
    pub central_charge: Option<Scalar>,
    pub failures: Vec<String>,
}

impl VirasoroCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.central_charge.is_some()
    }
}

/// `[L_lambda L] = (d + 2 lambda) L + c/12 lambda^3`.
pub fn check_virasoro(alg: &Algebra, l: &State) -> Result<VirasoroCheck> {
    let e = alg.engine();
    let br = bracket_with(&e, l, l)?;
    let mut failures = Vec::new();
    if br.get(0) != e.translate(l)? {
        failures.push("L_(0)L != dL".into());
    }
    if br.get(1) != l.scale(&Scalar::from_int(2)) {
        failures.push("L_(1)L != 2L".into());
    }
    if !br.get(2).is_zero() {
        failures.push("L_(2)L != 0".into());
    }
    let top = br.get(3);
    let vac = State::vacuum();
    let c = if top.is_zero() {
        Some(Scalar::zero())
    } else if top.len() == 1 && top.0.contains_key(vac.0.keys().next().unwrap()) {
        Some(&top.coeff(vac.0.keys().next().unwrap()) * &Scalar::from_int(2))
    } else {
        failures.push("L_(3)L is not central".into());
        None
    };
    if br.0.keys().any(|&n| n > 3) {
        failures.push("L_(n)L != 0 for n > 3".into());
    }
    Ok(VirasoroCheck {
        central_charge: c,
        failures,
    })
}

/// `[L_lambda A] = (d + Delta lambda) A` with no higher terms.
pub fn check_primary(alg: &Algebra, l: &State, a: &State, weight: &Scalar) -> Result<bool> {
    let e = alg.engine();
    let br = bracket_with(&e, l, a)?;
    Ok(br.get(0) == e.translate(a)? && br.get(1) == a.scale(weight) && br.0.keys().all(|&n| n <= 1))
}
