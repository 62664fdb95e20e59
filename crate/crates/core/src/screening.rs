//! Screening operators on `V(g_0) (x) F(g_1/2)` and their joint kernels.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Poly, Scalar, Q};
use crate::superdata::{chi, restricted_base, tau_form, ChiFunctional, GoodGrading, RestrictedBase};
use crate::vertexcalc::sugawara::sugawara;
use crate::vertexcalc::{graded_basis, state_field, Algebra, AlgebraBuilder, Engine, Hw, LinearField, Mono, Rep, State};

/// A class of `[Pi^{1/2}]` with its module `M_[beta]`.
#[derive(Clone, Debug)]
pub struct Class {
    /// Datum indices of the members.
    pub members: Vec<usize>,
    pub deg2: i64,
    /// Index of the module in `Algebra::reps`.
    pub rep: usize,
}

/// The vertex algebra `V^tau(g_0) (x) F(g_1/2)` together with the screening data.
#[derive(Clone, Debug)]
pub struct Ambient {
    pub grading: GoodGrading,
    pub base: RestrictedBase,
    pub chi: ChiFunctional,
    pub alg: Algebra,
    /// Datum index of each current; the current `J^u` is generator `i` for `g0[i] = u`.
    pub g0: Vec<usize>,
    /// Datum index of each neutral fermion; `Phi_alpha` is generator `g0.len() + i`.
    pub half: Vec<usize>,
    pub classes: Vec<Class>,
    /// Sugawara field of `V^tau(g_0)`.
    pub l: State,
    /// `k + h^vee`.
    pub shift: Scalar,
}

impl Ambient {
    pub fn new(g: &GoodGrading) -> Result<Ambient> {
        let d = g.datum.clone();
        let tau = tau_form(g);
        let chi = chi(g);
        let base = restricted_base(g);
        let g0 = g.of_degree(0);
        let half = g.of_degree(1);
        let nj = g0.len();
        let mut b = AlgebraBuilder::new(&format!("V(g0)F(g1/2) of {}", d.name));
        for &u in &g0 {
            b.gen(&format!("J{}", d.basis[u].name), d.parity(u), 2, 0);
        }
        for &a in &half {
            b.gen(&format!("Phi{}", d.basis[a].name), d.parity(a), 1, 0);
        }
        let pos0: BTreeMap<usize, usize> = g0.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        for (i, &u) in g0.iter().enumerate() {
            for (j, &v) in g0.iter().enumerate() {
                let mut p0 = LinearField::zero();
                for (w, c) in d.bracket(u, v) {
                    let w = pos0.get(w).ok_or_else(|| Error::InvalidDatum("g_0 is not closed".into()))?;
                    p0.add_term(*w, 0, Scalar::from_q(c.clone()));
                }
                b.set(i, j, vec![p0, LinearField::constant(tau.tau[u][v].clone())]);
            }
        }
        for (i, &a) in half.iter().enumerate() {
            for (j, &c) in half.iter().enumerate() {
                let v = chi.eval(&d.bracket_vec(&d.unit(a), &d.unit(c)));
                b.set(nj + i, nj + j, vec![LinearField::constant(Scalar::from_q(v))]);
            }
        }
        if g.zero_part_is_cartan() {
            b.heisenberg((0..nj).collect());
        }
        let mut classes = Vec::new();
        for members in &base.classes {
            // u . x_alpha = sum_gamma c^alpha_{gamma,u} x_gamma with [e_gamma, u] = sum c^alpha e_alpha
            let mut action = BTreeMap::new();
            for (i, &u) in g0.iter().enumerate() {
                let mat: Vec<Vec<Scalar>> = members
                    .iter()
                    .map(|&gam| members.iter().map(|&al| Scalar::from_q(d.sc(gam, u, al))).collect())
                    .collect();
                action.insert(i, mat);
            }
            let rep = b.rep(Rep {
                name: format!("M[{}]", d.basis[members[0]].name),
                parities: members.iter().map(|&a| d.parity(a)).collect(),
                action,
            });
            classes.push(Class {
                members: members.clone(),
                deg2: g.deg2[members[0]],
                rep,
            });
        }
        let alg = b.build()?;
        let shift = Scalar::k_plus(d.h_dual.clone());
        let gram: Vec<Vec<Q>> = g0.iter().map(|&u| g0.iter().map(|&v| d.form[u][v].clone()).collect()).collect();
        let currents: Vec<usize> = (0..nj).collect();
        let l = sugawara(&alg, &currents, &gram, &shift)?;
        Ok(Ambient {
            grading: g.clone(),
            base,
            chi,
            alg,
            g0,
            half,
            classes,
            l,
            shift,
        })
    }

    pub fn n_currents(&self) -> usize {
        self.g0.len()
    }

    /// Generator of the current `J^u` for a datum index `u`.
    pub fn current(&self, u: usize) -> Option<usize> {
        self.g0.iter().position(|&x| x == u)
    }

    /// Generator of `Phi_alpha`.
    pub fn fermion(&self, alpha: usize) -> Option<usize> {
        self.half.iter().position(|&x| x == alpha).map(|i| i + self.g0.len())
    }

    /// `(class, position)` of a member of `Pi^{1/2}`.
    pub fn class_of(&self, alpha: usize) -> Option<(usize, usize)> {
        self.classes
            .iter()
            .enumerate()
            .find_map(|(c, cl)| cl.members.iter().position(|&a| a == alpha).map(|p| (c, p)))
    }

    /// The highest vector `x_alpha` of `M_[alpha]`.
    pub fn x(&self, alpha: usize) -> Result<Mono> {
        let (c, p) = self
            .class_of(alpha)
            .ok_or_else(|| Error::InvalidArgument(format!("{} is not in the restricted base", alpha)))?;
        Ok(Mono::hw(Hw::X {
            rep: self.classes[c].rep as u16,
            idx: p as u16,
        }))
    }

    /// Splits a monomial into its current part and its fermion part.
    pub fn split(&self, m: &Mono) -> (Mono, Mono) {
        let nj = self.g0.len() as u16;
        let (a, b): (Vec<_>, Vec<_>) = m.modes.iter().partition(|(g, _)| *g < nj);
        (Mono { modes: a, hw: m.hw.clone() }, Mono { modes: b, hw: Hw::Vac })
    }

    /// Momentum `-t_alpha / (k + h^vee)` in current coordinates.
    pub fn momentum(&self, alpha: usize) -> Result<Vec<Scalar>> {
        if !self.grading.zero_part_is_cartan() {
            return Err(Error::NonCartanZeroPart);
        }
        let d = &self.grading.datum;
        let t = d.coroot_dual(&d.basis[alpha].root);
        let inv = self.shift.inv();
        Ok(self
            .g0
            .iter()
            .map(|&u| -(&Scalar::from_q(t[u].clone()) * &inv))
            .collect())
    }
}

fn parity_sign(p: u8) -> Scalar {
    if p == 1 {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

/// `L_{-1}^j / j!` on a module state.
fn l_minus_one_pow(amb: &Ambient, e: &Engine, v: &State, j: i64) -> Result<State> {
    let mut s = v.clone();
    for i in 1..=j {
        s = e.apply_field(&amb.l, 0, &s)?.scale(&Scalar::from_frac(1, i));
    }
    Ok(s)
}

/// `S^alpha_n A`: the `z^{-n}` coefficient of `(-1)^{p(alpha)p(A)+p(A)} e^{z L_{-1}} Y(A,-z) x_alpha`.
pub fn s_alpha_apply(amb: &Ambient, e: &Engine, alpha: usize, a: &State, n: i32) -> Result<State> {
    if amb.shift.is_zero() {
        return Err(Error::CriticalLevel);
    }
    let x = State::mono(amb.x(alpha)?);
    let pal = amb.grading.datum.parity(alpha);
    let mut out = State::zero();
    for (m, c) in a.iter() {
        if m.hw != Hw::Vac || m.modes.iter().any(|(g, _)| *g as usize >= amb.n_currents()) {
            return Err(Error::InvalidArgument("S^alpha acts on V(g_0) only".into()));
        }
        let pa = m.parity(&amb.alg);
        let sign = parity_sign((pal & pa) ^ pa);
        let am = State::mono(m.clone());
        let jmax = m.depth2(&amb.alg).div_euclid(2) - n as i64;
        for j in 0..=jmax {
            let mode = j + n as i64 - 1;
            let t = e.apply_field(&am, mode as i32, &x)?;
            if t.is_zero() {
                continue;
            }
            let t = l_minus_one_pow(amb, e, &t, j)?;
            let s = if (mode + 1) % 2 == 0 { sign.clone() } else { -sign.clone() };
            out.add(&t, &(c * &s));
        }
    }
    Ok(out)
}

/// `n`-th coefficient of the exponential screening field with momentum `beta` on a Fock state.
pub fn exp_alpha_apply(e: &Engine, beta: &[Scalar], a: &State, n: i32) -> Result<State> {
    let mut out = State::zero();
    for (m, c) in a.iter() {
        out.add(&e.exp_op(beta, n - 1, m)?, c);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScreeningKind {
    Generic,
    Exponential,
    FermionicExponential,
}

#[derive(Clone, Debug)]
pub struct ScreeningTerm {
    pub root: usize,
    pub weight: Scalar,
    /// Set for exponential kinds.
    pub momentum: Option<Vec<Scalar>>,
}

/// `Q_[beta]` as a weighted sum of (possibly fermion-dressed) residues.
#[derive(Clone, Debug)]
pub struct ScreeningOp {
    pub kind: ScreeningKind,
    pub class: usize,
    pub deg2: i64,
    pub terms: Vec<ScreeningTerm>,
}

impl ScreeningOp {
    pub fn describe(&self, amb: &Ambient) -> String {
        let d = &amb.grading.datum;
        let names: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{}*{}", t.weight, d.basis[t.root].name))
            .collect();
        format!("{:?}[{}]", self.kind, names.join(" + "))
    }
}

/// One operator per class, built from the generic intertwiners.
pub fn generic_screenings(amb: &Ambient) -> Vec<ScreeningOp> {
    amb.classes
        .iter()
        .enumerate()
        .map(|(ci, cl)| {
            let terms = cl
                .members
                .iter()
                .filter_map(|&a| {
                    let w = if cl.deg2 == 1 {
                        Scalar::one()
                    } else {
                        Scalar::from_q(amb.chi.values[a].clone())
                    };
                    (!w.is_zero()).then_some(ScreeningTerm {
                        root: a,
                        weight: w,
                        momentum: None,
                    })
                })
                .collect();
            ScreeningOp {
                kind: ScreeningKind::Generic,
                class: ci,
                deg2: cl.deg2,
                terms,
            }
        })
        .collect()
}

/// Free-field screenings for `g_0 = h`, with momenta `-t_alpha/(k+h^vee)`.
pub fn exponential_screenings(amb: &Ambient) -> Result<Vec<ScreeningOp>> {
    if !amb.grading.zero_part_is_cartan() {
        return Err(Error::NonCartanZeroPart);
    }
    let mut out = Vec::new();
    for (ci, cl) in amb.classes.iter().enumerate() {
        let a = cl.members[0];
        let (kind, weight) = if cl.deg2 == 1 {
            (ScreeningKind::FermionicExponential, Scalar::one())
        } else {
            let w = Scalar::from_q(amb.chi.values[a].clone());
            if w.is_zero() {
                continue;
            }
            (ScreeningKind::Exponential, w)
        };
        out.push(ScreeningOp {
            kind,
            class: ci,
            deg2: cl.deg2,
            terms: vec![ScreeningTerm {
                root: a,
                weight,
                momentum: Some(amb.momentum(a)?),
            }],
        });
    }
    Ok(out)
}

fn coefficient(amb: &Ambient, e: &Engine, t: &ScreeningTerm, a: &State, n: i32) -> Result<State> {
    match &t.momentum {
        Some(beta) => exp_alpha_apply(e, beta, a, n),
        None => s_alpha_apply(amb, e, t.root, a, n),
    }
}

fn attach(s: &State, b: &State, sign: &Scalar, c: &Scalar, out: &mut State) {
    for (sm, sc) in s.iter() {
        for (bm, bc) in b.iter() {
            let mut modes = sm.modes.clone();
            modes.extend_from_slice(&bm.modes);
            out.add_mono(
                Mono {
                    modes,
                    hw: sm.hw.clone(),
                },
                &(&(sc * bc) * &(sign * c)),
            );
        }
    }
}

/// `Q v` for a state of the ambient vacuum module.
pub fn q_apply(amb: &Ambient, e: &Engine, op: &ScreeningOp, v: &State) -> Result<State> {
    let d = &amb.grading.datum;
    let mut out = State::zero();
    for (m, c) in v.iter() {
        let (am, bm) = amb.split(m);
        let pa = am.parity(&amb.alg);
        let a = State::mono(am.clone());
        let b = State::mono(bm.clone());
        match op.deg2 {
            2 => {
                for t in &op.terms {
                    let s = coefficient(amb, e, t, &a, 1)?;
                    attach(&s, &b, &Scalar::one(), &(c * &t.weight), &mut out);
                }
            }
            1 => {
                let da = am.depth2(&amb.alg);
                let db = bm.depth2(&amb.alg);
                for t in &op.terms {
                    let f = amb
                        .fermion(t.root)
                        .ok_or_else(|| Error::InvalidArgument("missing neutral fermion".into()))?;
                    let sign = parity_sign(d.parity(t.root) & pa);
                    let lo = -((db - 1).div_euclid(2));
                    let hi = da.div_euclid(2);
                    for n in lo..=hi {
                        let fb = e.apply_gen(f, -n as i32, &b)?;
                        if fb.is_zero() {
                            continue;
                        }
                        let s = coefficient(amb, e, t, &a, n as i32)?;
                        attach(&s, &fb, &sign, &(c * &t.weight), &mut out);
                    }
                }
            }
            other => return Err(Error::GradingMismatch(format!("screening of doubled degree {other}"))),
        }
    }
    Ok(out)
}

/// Graded dimensions of the free differential superalgebra on the generators `(weight2, parity)`.
pub fn free_character(gens: &[(i64, u8)], max_weight2: i64) -> Vec<u64> {
    let n = max_weight2.max(0) as usize;
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for &(w, p) in gens {
        let mut m = w;
        while m as usize <= n && m > 0 {
            let step = m as usize;
            if p == 0 {
                for i in step..=n {
                    c[i] += c[i - step];
                }
            } else {
                for i in (step..=n).rev() {
                    c[i] += c[i - step];
                }
            }
            m += 2;
        }
    }
    c
}

/// Generators `(doubled conformal weight, parity)` of `W`, one per basis vector of `g^f`.
pub fn generator_weights(g: &GoodGrading) -> Vec<(i64, u8)> {
    let mut out = Vec::new();
    for (d2, p, basis) in g.centralizer_f() {
        for _ in &basis {
            out.push((2 - d2, p));
        }
    }
    out.sort();
    out
}

/// Expected graded dimensions indexed by doubled weight.
pub fn expected_character(g: &GoodGrading, max_weight2: i64) -> Vec<u64> {
    free_character(&generator_weights(g), max_weight2)
}

/// Symbolic level or a rational specialization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Level {
    Symbolic,
    At(Q),
}

impl Level {
    pub fn parse(s: &str) -> Result<Level> {
        if s == "symbolic" {
            return Ok(Level::Symbolic);
        }
        crate::scalar::parse_rational(s)
            .map(Level::At)
            .map_err(|e| Error::Parse(format!("level `{s}`: {e}")))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Symbolic => write!(f, "symbolic"),
            Level::At(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub weight2: i64,
    pub ambient_dim: usize,
    pub kernel_dim: usize,
    pub expected_dim: u64,
    pub basis: Vec<Value>,
    pub denominators: Vec<String>,
    pub level: String,
    pub rechecked: bool,
}

impl KernelReport {
    pub fn matches(&self) -> bool {
        self.kernel_dim as u64 == self.expected_dim
    }
}

/// Kernel vectors as states together with the matrix data behind them.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub weight2: i64,
    pub ambient: Vec<Mono>,
    pub vectors: Vec<State>,
    pub denominators: Vec<Poly>,
}

/// Stacked matrix of all screenings on the ambient basis of doubled weight `weight2`.
pub fn screening_matrix(amb: &Ambient, ops: &[ScreeningOp], weight2: i64) -> Result<(Vec<Mono>, linalg::Matrix)> {
    let gens: Vec<usize> = (0..amb.alg.n_gens()).collect();
    let basis = graded_basis(&amb.alg, &gens, &Hw::Vac, weight2, None);
    let e = amb.alg.engine();
    let mut rows: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    let mut cols: Vec<Vec<(usize, Scalar)>> = Vec::with_capacity(basis.len());
    for m in &basis {
        let v = State::mono(m.clone());
        let mut col = Vec::new();
        for (oi, op) in ops.iter().enumerate() {
            for (t, c) in q_apply(amb, &e, op, &v)?.iter() {
                let n = rows.len();
                let r = *rows.entry((oi, t.clone())).or_insert(n);
                col.push((r, c.clone()));
            }
        }
        cols.push(col);
    }
    let mut mat = vec![vec![Scalar::zero(); basis.len()]; rows.len()];
    for (j, col) in cols.into_iter().enumerate() {
        for (r, c) in col {
            mat[r][j] = c;
        }
    }
    Ok((basis, mat))
}

fn specialize_state(v: &State, k: &Q) -> Option<State> {
    let mut out = State::zero();
    for (m, c) in v.iter() {
        out.add_mono(m.clone(), &Scalar::from_q(c.eval(k)?));
    }
    Some(out)
}

/// Joint kernel of the screenings at one weight.
pub fn kernel(amb: &Ambient, ops: &[ScreeningOp], weight2: i64, level: &Level) -> Result<Kernel> {
    let (basis, mat) = screening_matrix(amb, ops, weight2)?;
    let mut dens: Vec<Poly> = Vec::new();
    for row in &mat {
        for x in row {
            if !x.denom().is_constant() && !dens.contains(x.denom()) {
                dens.push(x.denom().clone());
            }
        }
    }
    let mat = match level {
        Level::Symbolic => mat,
        Level::At(k) => {
            if Scalar::from_q(k.clone()) == -Scalar::from_q(amb.grading.datum.h_dual.clone()) {
                return Err(Error::CriticalLevel);
            }
            linalg::specialize(&mat, k)
                .ok_or_else(|| Error::InvalidArgument(format!("level {k} is a pole of the screening matrix")))?
        }
    };
    let ns = linalg::nullspace(&mat, basis.len());
    for p in ns.denominators {
        if !p.is_constant() && !dens.contains(&p) {
            dens.push(p);
        }
    }
    dens.sort();
    let vectors = ns.basis.iter().map(|v| State::from_coords(&basis, v)).collect();
    Ok(Kernel {
        weight2,
        ambient: basis,
        vectors,
        denominators: dens,
    })
}

/// Checks with a fresh engine that every vector is annihilated.
pub fn recheck(amb: &Ambient, ops: &[ScreeningOp], vectors: &[State], level: &Level) -> Result<bool> {
    let e = amb.alg.engine();
    for v in vectors {
        for op in ops {
            let img = q_apply(amb, &e, op, v)?;
            let zero = match level {
                Level::Symbolic => img.is_zero(),
                Level::At(k) => specialize_state(&img, k).is_some_and(|s| s.is_zero()),
            };
            if !zero {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Full report for one weight.
pub fn kernel_report(amb: &Ambient, ops: &[ScreeningOp], weight2: i64, level: &Level) -> Result<KernelReport> {
    let k = kernel(amb, ops, weight2, level)?;
    let rechecked = recheck(amb, ops, &k.vectors, level)?;
    let expected = expected_character(&amb.grading, weight2)[weight2 as usize];
    let basis = k
        .vectors
        .iter()
        .map(|v| state_field(&amb.alg, v).map(|f| f.to_json(&amb.alg)))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelReport {
        weight2,
        ambient_dim: k.ambient.len(),
        kernel_dim: k.vectors.len(),
        expected_dim: expected,
        basis,
        denominators: k.denominators.iter().map(|p| p.to_string_var("k")).collect(),
        level: level.to_string(),
        rechecked,
    })
}

/// Reports for doubled weights `0..=max_weight2`, computed in parallel and ordered by weight.
pub fn kernel_reports(amb: &Ambient, ops: &[ScreeningOp], max_weight2: i64, level: &Level) -> Result<Vec<KernelReport>> {
    (0..=max_weight2)
        .into_par_iter()
        .map(|w| kernel_report(amb, ops, w, level))
        .collect()
}
