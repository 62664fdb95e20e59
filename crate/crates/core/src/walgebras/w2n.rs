//! The `W^(2)_n` realization on the lattice algebra `V_xi` and the Wakimoto map.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::scalar::{q_int, Scalar};
use crate::superdata::{preset, tau_form};
use crate::vertexcalc::{bracket, free_field, Algebra, Engine, Hw, LambdaPoly, State};

use super::CheckReport;

#[derive(Clone, Debug)]
pub struct W2nModel {
    pub n: usize,
    /// Heisenberg on `a_{n-1}, ..., a_1, psi, xi`; the lattice direction is `xi`.
    pub alg: Algebra,
    pub gram: Vec<Vec<Scalar>>,
    /// `P` as a state of the Heisenberg vacuum module.
    pub p: State,
    pub e: State,
    /// `:P e^{-xi}:` with `P` expanded.
    pub f: State,
    /// `-:((k+n-1)(d + xi) + psi + a_1 + ... ) ... psi e^{-xi}:`.
    pub f_rewritten: State,
}

/// Gram matrix on `a_{n-1}, ..., a_1, psi, xi`.
pub fn w2n_gram(n: usize) -> Vec<Vec<Scalar>> {
    let m = n + 1;
    let kn = Scalar::k_plus(q_int(n as i64));
    let mut g = vec![vec![Scalar::zero(); m]; m];
    for i in 0..n - 1 {
        g[i][i] = &Scalar::from_int(2) * &kn;
        g[i][i + 1] = -kn.clone();
        g[i + 1][i] = -kn.clone();
    }
    g[n - 1][n - 1] = Scalar::one();
    g[n - 1][n] = Scalar::one();
    g[n][n - 1] = Scalar::one();
    g
}

impl W2nModel {
    /// Generator of `a_i`, `1 <= i <= n-1`.
    pub fn a(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    pub fn psi(&self) -> usize {
        self.n - 1
    }

    pub fn xi(&self) -> usize {
        self.n
    }

    /// Momentum `m xi`.
    pub fn lattice(&self, m: i64) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.n + 1];
        v[self.xi()] = Scalar::from_int(m);
        v
    }

    fn unit(&self, g: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.n + 1];
        v[g] = Scalar::one();
        v
    }

    /// `int A_i(z) dz` applied to `v`.
    pub fn screen_a(&self, i: usize, v: &State) -> Result<State> {
        self.alg
            .engine()
            .apply_field(&State::hw(Hw::mom(self.unit(self.a(i)))), 0, v)
    }

    /// `int Q(z) dz` applied to `v`.
    pub fn screen_q(&self, v: &State) -> Result<State> {
        self.alg
            .engine()
            .apply_field(&State::hw(Hw::mom(self.unit(self.psi()))), 0, v)
    }

    /// `-(k+1):(d psi) e^{-xi}: - :(psi + a_1) psi e^{-xi}:` for `n = 2`.
    pub fn f_printed_n2(&self) -> Result<State> {
        if self.n != 2 {
            return Err(Error::InvalidArgument("printed form is for n = 2".into()));
        }
        let e = self.alg.engine();
        let base = State::hw(Hw::mom(self.lattice(-1)));
        let k1 = Scalar::k_plus(q_int(1));
        let mut out = e.apply_gen(self.psi(), -2, &base)?.scale(&-k1);
        let pe = e.apply_gen(self.psi(), -1, &base)?;
        out.add(&e.apply_gen(self.psi(), -1, &pe)?, &-Scalar::one());
        out.add(&e.apply_gen(self.a(1), -1, &pe)?, &-Scalar::one());
        Ok(out)
    }
}

/// `(psi + a_1 + ... + a_j)_(-1) v`.
fn apply_sum(e: &Engine, m: &W2nModel, j: usize, v: &State) -> Result<State> {
    let mut out = e.apply_gen(m.psi(), -1, v)?;
    for i in 1..=j {
        out.add(&e.apply_gen(m.a(i), -1, v)?, &Scalar::one());
    }
    Ok(out)
}

pub fn build_w2n(n: usize) -> Result<W2nModel> {
    if n < 2 {
        return Err(Error::InvalidArgument("W^(2)_n needs n >= 2".into()));
    }
    let mut names: Vec<String> = (1..n).rev().map(|i| format!("a{i}")).collect();
    names.push("psi".into());
    names.push("xi".into());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let gram = w2n_gram(n);
    let alg = free_field(&format!("V_xi for W(2)_{n}"), &refs, &gram, &[], &[])?;
    let mut m = W2nModel {
        n,
        alg,
        gram,
        p: State::zero(),
        e: State::zero(),
        f: State::zero(),
        f_rewritten: State::zero(),
    };
    let c = Scalar::k_plus(q_int(n as i64 - 1));
    let (p, f, fr) = {
        let e = m.alg.engine();
        // P_j = (c d + psi + a_1 + ... + a_j) P_{j-1}, P_0 = psi
        let mut p = State::gen(m.psi());
        let mut r = e.apply_gen(m.psi(), -1, &State::hw(Hw::mom(m.lattice(-1))))?;
        for j in 1..n {
            let mut next = e.translate(&p)?.scale(&c);
            next.add(&apply_sum(&e, &m, j, &p)?, &Scalar::one());
            p = next;
            let mut rn = e.translate(&r)?;
            rn.add(&e.apply_gen(m.xi(), -1, &r)?, &Scalar::one());
            let mut rn = rn.scale(&c);
            rn.add(&apply_sum(&e, &m, j, &r)?, &Scalar::one());
            r = rn;
        }
        let p = p.scale(&-Scalar::one());
        let mut f = State::zero();
        for (mono, x) in p.iter() {
            f.add_mono(mono.with_hw(Hw::mom(m.lattice(-1))), x);
        }
        (p, f, r.scale(&-Scalar::one()))
    };
    m.p = p;
    m.f = f;
    m.f_rewritten = fr;
    m.e = State::hw(Hw::mom(m.lattice(1)));
    Ok(m)
}

/// All FS screenings kill `E` and `F`; also the structural checks on the model.
pub fn verify_fs(m: &W2nModel) -> Result<CheckReport> {
    let mut witness = None;
    let mut data = BTreeMap::new();
    let ee = bracket(&m.alg, &m.e, &m.e)?;
    data.insert("E_E_bracket_zero", ee.is_zero());
    let rewritten = m.f == m.f_rewritten;
    data.insert("F_rewritten_agrees", rewritten);
    if m.n == 2 {
        data.insert("F_printed_agrees", m.f_printed_n2()? == m.f);
    }
    for (name, v) in [("E", &m.e), ("F", &m.f)] {
        for i in 1..m.n {
            if !m.screen_a(i, v)?.is_zero() {
                witness.get_or_insert(json!({"screening": format!("A{i}"), "field": name}));
            }
        }
        if !m.screen_q(v)?.is_zero() {
            witness.get_or_insert(json!({"screening": "Q", "field": name}));
        }
    }
    let ok = witness.is_none() && data.values().all(|&b| b);
    if witness.is_none() && !ok {
        witness = Some(json!(data.iter().filter(|(_, &b)| !b).map(|(k, _)| *k).collect::<Vec<_>>()));
    }
    Ok(CheckReport::new(
        &format!("w2-{}-fs", m.n),
        ok,
        witness,
        vec![2, 2 * m.n as i64],
        json!(data),
    ))
}

/// Images of the `g_0` currents of the `sl_n` subregular grading under `pi`.
pub fn wakimoto_images(m: &W2nModel) -> Result<(Vec<usize>, Vec<State>)> {
    let n = m.n;
    if n < 3 {
        return Err(Error::InvalidArgument("the Wakimoto map needs n >= 3".into()));
    }
    let p = preset(&format!("sl{n}-subregular"))?;
    let d = &p.grading.datum;
    let g0 = p.grading.of_degree(0);
    let e = m.alg.engine();
    let mut images = Vec::with_capacity(g0.len());
    for &u in &g0 {
        let name = d.basis[u].name.as_str();
        let img = match name {
            "E12" => m.e.clone(),
            "E21" => build_f_like(&e, m)?,
            "h1" => {
                let mut s = State::gen(m.xi()).scale(&Scalar::k_plus(q_int(n as i64 - 2)));
                s.add(&State::gen(m.psi()), &Scalar::from_int(2));
                s.add(&State::gen(m.a(1)), &Scalar::one());
                s
            }
            "h2" => {
                let mut s = State::gen(m.xi());
                s.add(&State::gen(m.psi()), &-Scalar::one());
                s.add(&State::gen(m.a(2)), &Scalar::one());
                s
            }
            other => {
                let i: usize = other
                    .strip_prefix('h')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::InvalidDatum(format!("unexpected g_0 element {other}")))?;
                State::gen(m.a(i))
            }
        };
        images.push(img);
    }
    Ok((g0, images))
}

/// `-:((k+n-1)(d + xi) + psi + a_1) psi e^{-xi}:`.
fn build_f_like(e: &Engine, m: &W2nModel) -> Result<State> {
    let c = Scalar::k_plus(q_int(m.n as i64 - 1));
    let r = e.apply_gen(m.psi(), -1, &State::hw(Hw::mom(m.lattice(-1))))?;
    let mut out = e.translate(&r)?;
    out.add(&e.apply_gen(m.xi(), -1, &r)?, &Scalar::one());
    let mut out = out.scale(&c);
    out.add(&apply_sum(e, m, 1, &r)?, &Scalar::one());
    Ok(out.scale(&-Scalar::one()))
}

/// Checks `[pi(J^u)_lambda pi(J^v)] = pi(J^{[u,v]}) + tau_k(u|v) lambda` on all ordered pairs of `g_0`.
pub fn wakimoto_pi(n: usize) -> Result<CheckReport> {
    let m = build_w2n(n)?;
    let p = preset(&format!("sl{n}-subregular"))?;
    let d = &p.grading.datum;
    let tau = tau_form(&p.grading);
    let (g0, images) = wakimoto_images(&m)?;
    let pos: BTreeMap<usize, usize> = g0.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut witness = None;
    let mut pairs = 0usize;
    for (i, &u) in g0.iter().enumerate() {
        for (j, &v) in g0.iter().enumerate() {
            let got = bracket(&m.alg, &images[i], &images[j])?;
            let mut p0 = State::zero();
            for (w, c) in d.bracket(u, v) {
                let w = pos[w];
                p0.add(&images[w], &Scalar::from_q(c.clone()));
            }
            let mut want = BTreeMap::new();
            if !p0.is_zero() {
                want.insert(0u32, p0);
            }
            if !tau.tau[u][v].is_zero() {
                want.insert(1u32, State::vacuum().scale(&tau.tau[u][v]));
            }
            if got != LambdaPoly(want) {
                witness.get_or_insert(json!({"pair": [d.basis[u].name, d.basis[v].name]}));
            } else {
                pairs += 1;
            }
        }
    }
    let table: BTreeMap<String, String> = g0
        .iter()
        .zip(&images)
        .map(|(&u, s)| {
            let f = crate::vertexcalc::state_field(&m.alg, s).map(|f| f.render(&m.alg));
            (format!("J{}", d.basis[u].name), f.unwrap_or_else(|e| e.to_string()))
        })
        .collect();
    Ok(CheckReport::new(
        &format!("wakimoto-sl{n}"),
        witness.is_none(),
        witness,
        vec![2],
        json!({"pairs_checked": g0.len() * g0.len(), "pairs_matching": pairs, "images": table}),
    ))
}
