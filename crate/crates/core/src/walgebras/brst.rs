//! The reduced complex `C_k` generated by `J^u` (u in g_{<=0}), the ghosts
//! `phi^alpha` (alpha in g_{>0}) and the neutral fermions `Phi_alpha`
//! (alpha in g_{1/2}), with `d_(0)` acting as an odd derivation.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Poly, Scalar};
use crate::screening::Level;
use crate::superdata::{a_k, b_k, chi, tau_form, ChiFunctional, GoodGrading};
use crate::vertexcalc::{graded_basis, Algebra, AlgebraBuilder, Engine, Hw, LinearField, Mono, State};

#[derive(Clone, Debug)]
pub struct BrstComplex {
    pub grading: GoodGrading,
    pub chi: ChiFunctional,
    pub alg: Algebra,
    /// Datum index of `J^u` for each current generator, negative degrees first.
    pub currents: Vec<usize>,
    /// Datum index of each neutral fermion `Phi_alpha`.
    pub fermions: Vec<usize>,
    /// Datum index of each ghost `phi^alpha`.
    pub ghosts: Vec<usize>,
    /// `d_(0) g` for every generator `g`.
    pub d: Vec<State>,
}

fn sgn(odd: bool) -> Scalar {
    if odd {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

pub fn build_complex(g: &GoodGrading) -> Result<BrstComplex> {
    let d = g.datum.clone();
    let tau = tau_form(g);
    let chi = chi(g);
    let n = d.dim();
    let neg: Vec<usize> = (0..n).filter(|&a| g.deg2[a] < 0).collect();
    let mut currents = neg;
    currents.extend(g.of_degree(0));
    let fermions = g.of_degree(1);
    let ghosts: Vec<usize> = (0..n).filter(|&a| g.deg2[a] > 0).collect();
    let nj = currents.len();
    let nf = fermions.len();

    let mut b = AlgebraBuilder::new(&format!("C_k of {}", d.name));
    for &u in &currents {
        b.gen(&format!("J{}", d.basis[u].name), d.parity(u), 2 - g.deg2[u], 0);
    }
    for &a in &fermions {
        b.gen(&format!("Phi{}", d.basis[a].name), d.parity(a), 1, 0);
    }
    for &a in &ghosts {
        b.gen(&format!("phi{}", d.basis[a].name), d.parity(a) ^ 1, g.deg2[a], 1);
    }
    let jpos: BTreeMap<usize, usize> = currents.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let gpos: BTreeMap<usize, usize> = ghosts.iter().enumerate().map(|(i, &a)| (a, nj + nf + i)).collect();
    let fpos: BTreeMap<usize, usize> = fermions.iter().enumerate().map(|(i, &a)| (a, nj + i)).collect();

    // [J^u_lambda J^v] = J^{[u,v]} + tau(u|v) lambda
    for (i, &u) in currents.iter().enumerate() {
        for (j, &v) in currents.iter().enumerate() {
            let mut p0 = LinearField::zero();
            for (w, c) in d.bracket(u, v) {
                let w = jpos
                    .get(w)
                    .ok_or_else(|| Error::InvalidDatum("g_{<=0} is not closed".into()))?;
                p0.add_term(*w, 0, Scalar::from_q(c.clone()));
            }
            b.set(i, j, vec![p0, LinearField::constant(tau.tau[u][v].clone())]);
        }
    }
    // [phi^alpha_lambda J^u] = sum_beta c^alpha_{u,beta} phi^beta
    for &al in &ghosts {
        for (j, &u) in currents.iter().enumerate() {
            let mut p0 = LinearField::zero();
            for &be in &ghosts {
                let c = d.sc(u, be, al);
                if !c.is_zero() {
                    p0.add_term(gpos[&be], 0, Scalar::from_q(c));
                }
            }
            b.set(gpos[&al], j, vec![p0]);
        }
        for &be in &ghosts {
            b.set(gpos[&al], gpos[&be], vec![]);
        }
        for &be in &fermions {
            b.set(gpos[&al], fpos[&be], vec![]);
        }
    }
    for &al in &fermions {
        for &be in &fermions {
            let v = chi.eval(&d.bracket_vec(&d.unit(al), &d.unit(be)));
            b.set(fpos[&al], fpos[&be], vec![LinearField::constant(Scalar::from_q(v))]);
        }
        for j in 0..nj {
            b.set(fpos[&al], j, vec![]);
        }
    }
    let alg = b.build()?;

    let dgen = {
        let e = alg.engine();
        let normal = |a: usize, b: usize| -> Result<State> { e.apply_gen(a, -1, &State::gen(b)) };
        let mut out = Vec::with_capacity(alg.n_gens());
        for &u in &currents {
            let mut s = State::zero();
            for &be in &ghosts {
                // -sum_alpha (-1)^{p(alpha)} c^alpha_{u,beta} :J^{e_alpha} phi^beta:
                for &al in &currents {
                    let c = d.sc(u, be, al);
                    if !c.is_zero() {
                        let c = &-Scalar::from_q(c) * &sgn(d.parity(al) == 1);
                        s.add(&normal(jpos[&al], gpos[&be])?, &c);
                    }
                }
                // sum_alpha c^alpha_{u,beta} :Phi_alpha phi^beta:
                for &al in &fermions {
                    let c = d.sc(u, be, al);
                    if !c.is_zero() {
                        s.add(&normal(fpos[&al], gpos[&be])?, &Scalar::from_q(c));
                    }
                }
                // a_k(u|e_beta) d phi^beta + chi([u, e_beta]) phi^beta
                let a = a_k(g, u, be);
                if !a.is_zero() {
                    s.add(&e.apply_gen(gpos[&be], -2, &State::vacuum())?, &a);
                }
                let x = chi.eval(&d.bracket_vec(&d.unit(u), &d.unit(be)));
                if !x.is_zero() {
                    s.add(&State::gen(gpos[&be]), &Scalar::from_q(x));
                }
            }
            out.push(s);
        }
        for &al in &fermions {
            // sum_beta chi([e_beta, e_alpha]) phi^beta
            let mut s = State::zero();
            for &be in &fermions {
                let x = chi.eval(&d.bracket_vec(&d.unit(be), &d.unit(al)));
                if !x.is_zero() {
                    s.add(&State::gen(gpos[&be]), &Scalar::from_q(x));
                }
            }
            out.push(s);
        }
        for &al in &ghosts {
            // -1/2 sum (-1)^{p(alpha)p(beta)} c^alpha_{beta,gamma} :phi^beta phi^gamma:
            let mut s = State::zero();
            for &be in &ghosts {
                for &ga in &ghosts {
                    let c = d.sc(be, ga, al);
                    if c.is_zero() {
                        continue;
                    }
                    let c = &(&Scalar::from_q(c) * &Scalar::from_frac(-1, 2)) * &sgn(d.parity(al) & d.parity(be) == 1);
                    s.add(&normal(gpos[&be], gpos[&ga])?, &c);
                }
            }
            out.push(s);
        }
        out
    };

    Ok(BrstComplex {
        grading: g.clone(),
        chi,
        alg,
        currents,
        fermions,
        ghosts,
        d: dgen,
    })
}

impl BrstComplex {
    pub fn n_currents(&self) -> usize {
        self.currents.len()
    }

    /// Generator index of `J^u`.
    pub fn current(&self, u: usize) -> Option<usize> {
        self.currents.iter().position(|&x| x == u)
    }

    /// Generator index of `phi^alpha`.
    pub fn ghost(&self, alpha: usize) -> Option<usize> {
        let off = self.currents.len() + self.fermions.len();
        self.ghosts.iter().position(|&x| x == alpha).map(|i| i + off)
    }

    /// Generator index of `Phi_alpha`.
    pub fn fermion(&self, alpha: usize) -> Option<usize> {
        self.fermions.iter().position(|&x| x == alpha).map(|i| i + self.currents.len())
    }

    /// `[d_lambda J^u]` restricted to its `lambda^1` part: `sum_beta b_k(u|e_beta) phi^beta`.
    pub fn d_lambda_current(&self, u: usize) -> State {
        let mut s = State::zero();
        for &be in &self.ghosts {
            let b = b_k(&self.grading, u, be);
            if !b.is_zero() {
                s.add(&State::gen(self.ghost(be).expect("ghost")), &b);
            }
        }
        s
    }

    pub fn d0(&self) -> Differential<'_> {
        Differential {
            cx: self,
            e: self.alg.engine(),
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// All generators.
    pub fn gens(&self) -> Vec<usize> {
        (0..self.alg.n_gens()).collect()
    }

    /// Basis of doubled weight `weight2` grouped by charge.
    pub fn basis_by_charge(&self, weight2: i64) -> BTreeMap<i32, Vec<Mono>> {
        let mut out: BTreeMap<i32, Vec<Mono>> = BTreeMap::new();
        for m in graded_basis(&self.alg, &self.gens(), &Hw::Vac, weight2, None) {
            out.entry(m.charge(&self.alg)).or_default().push(m);
        }
        out
    }
}

/// `d_(0)` extended from the generators by the super-Leibniz rule.
pub struct Differential<'a> {
    cx: &'a BrstComplex,
    pub e: Engine<'a>,
    memo: RefCell<HashMap<Mono, State>>,
}

impl<'a> Differential<'a> {
    pub fn apply(&self, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (m, c) in v.iter() {
            out.add(&self.apply_mono(m)?, c);
        }
        Ok(out)
    }

    fn apply_mono(&self, m: &Mono) -> Result<State> {
        if m.modes.is_empty() {
            return Ok(State::zero());
        }
        if let Some(s) = self.memo.borrow().get(m) {
            return Ok(s.clone());
        }
        let (g, p) = m.modes[0];
        let g = g as usize;
        let rest = m.rest();
        // d(g_(p) R) = (dg)_(p) R + (-1)^{p(g)} g_(p) dR
        let mut out = self.e.apply_field(&self.cx.d[g], p, &State::mono(rest.clone()))?;
        let dr = self.apply_mono(&rest)?;
        let t = self.e.apply_gen(g, p, &dr)?;
        out.add(&t, &sgn(self.cx.alg.parity(g) == 1));
        self.memo.borrow_mut().insert(m.clone(), out.clone());
        Ok(out)
    }
}

/// Matrix of `d_(0)` from charge `charge` to `charge + 1` at doubled weight `weight2`.
pub fn d0_matrix(cx: &BrstComplex, weight2: i64, charge: i32) -> Result<(Vec<Mono>, Vec<Mono>, linalg::Matrix)> {
    let by = cx.basis_by_charge(weight2);
    let src = by.get(&charge).cloned().unwrap_or_default();
    let tgt = by.get(&(charge + 1)).cloned().unwrap_or_default();
    let d = cx.d0();
    let mat = matrix_of(&d, &src, &tgt)?;
    Ok((src, tgt, mat))
}

fn matrix_of(d: &Differential, src: &[Mono], tgt: &[Mono]) -> Result<linalg::Matrix> {
    let pos: HashMap<&Mono, usize> = tgt.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = vec![vec![Scalar::zero(); src.len()]; tgt.len()];
    for (j, m) in src.iter().enumerate() {
        for (t, c) in d.apply(&State::mono(m.clone()))?.iter() {
            let i = pos
                .get(t)
                .ok_or_else(|| Error::GradingMismatch("d_(0) left the graded piece".into()))?;
            mat[*i][j] = c.clone();
        }
    }
    Ok(mat)
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyEntry {
    pub weight2: i64,
    pub charge: i32,
    pub cochains: usize,
    /// Rank of `d_(0)` leaving this charge.
    pub rank_out: usize,
    /// Rank of `d_(0)` arriving at this charge.
    pub rank_in: usize,
    pub dim: usize,
    /// `d_(0)^2 = 0` on this piece.
    pub d_squared_zero: bool,
    pub denominators: Vec<String>,
}

fn specialize_or_keep(m: linalg::Matrix, level: &Level) -> Result<linalg::Matrix> {
    match level {
        Level::Symbolic => Ok(m),
        Level::At(k) => linalg::specialize(&m, k)
            .ok_or_else(|| Error::InvalidArgument(format!("level {k} is a pole of d_(0)"))),
    }
}

/// Cohomology at one doubled weight, one entry per charge.
pub fn cohomology_at(cx: &BrstComplex, weight2: i64, level: &Level) -> Result<Vec<CohomologyEntry>> {
    if let Level::At(k) = level {
        if Scalar::from_q(k.clone()) == -Scalar::from_q(cx.grading.datum.h_dual.clone()) {
            return Err(Error::CriticalLevel);
        }
    }
    let by = cx.basis_by_charge(weight2);
    let d = cx.d0();
    let Some(&top) = by.keys().last() else {
        return Ok(Vec::new());
    };
    let empty = Vec::new();
    let mut mats = BTreeMap::new();
    for (&c, src) in &by {
        let tgt = by.get(&(c + 1)).unwrap_or(&empty);
        mats.insert(c, matrix_of(&d, src, tgt)?);
    }
    let mut ranks = BTreeMap::new();
    let mut dens: BTreeMap<i32, Vec<Poly>> = BTreeMap::new();
    for (&c, m) in &mats {
        let ncols = by[&c].len();
        let (r, ds) = linalg::rank_report(&specialize_or_keep(m.clone(), level)?, ncols);
        ranks.insert(c, r);
        dens.insert(c, ds);
    }
    let mut out = Vec::new();
    for (&c, src) in &by {
        let rank_out = ranks[&c];
        let rank_in = ranks.get(&(c - 1)).copied().unwrap_or(0);
        let sq = match (mats.get(&c), mats.get(&(c + 1))) {
            (Some(a), Some(b)) if c < top && !a.is_empty() && !b.is_empty() => {
                linalg::mat_mul(b, a).iter().all(|row| row.iter().all(|x| x.is_zero()))
            }
            _ => true,
        };
        let mut ds: Vec<String> = dens[&c].iter().map(|p| p.to_string_var("k")).collect();
        ds.sort();
        ds.dedup();
        out.push(CohomologyEntry {
            weight2,
            charge: c,
            cochains: src.len(),
            rank_out,
            rank_in,
            dim: src.len() - rank_out - rank_in,
            d_squared_zero: sq,
            denominators: ds,
        });
    }
    Ok(out)
}

/// Cohomology for doubled weights `0..=max_weight2`, ordered by weight and charge.
pub fn cohomology_dims(cx: &BrstComplex, max_weight2: i64, level: &Level) -> Result<Vec<CohomologyEntry>> {
    let per: Vec<Vec<CohomologyEntry>> = (0..=max_weight2)
        .into_par_iter()
        .map(|w| cohomology_at(cx, w, level))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Basis of `H^0` at one weight: the kernel of `d_(0)` on charge zero.
pub fn h0_basis(cx: &BrstComplex, weight2: i64) -> Result<Vec<State>> {
    let (src, tgt, mat) = d0_matrix(cx, weight2, 0)?;
    if tgt.is_empty() {
        return Ok(src.into_iter().map(State::mono).collect());
    }
    let ns = linalg::nullspace(&mat, src.len());
    Ok(ns.basis.iter().map(|v| State::from_coords(&src, v)).collect())
}
