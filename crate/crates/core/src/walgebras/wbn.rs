//! The `WB_n` free-field realization on `n` bosons and one neutral fermion.

use serde_json::json;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Q};
use crate::vertexcalc::{bracket, free_field, Algebra, Hw, LambdaPoly, Mono, State};

use super::CheckReport;

/// How the parameter `gamma` enters the coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaMode {
    /// The field variable is `gamma` itself.
    Symbolic,
    /// The field variable is `t = gamma_+`, with `gamma = t - 1/t`.
    Plus,
    /// A rational value of `gamma`.
    At(Q),
}

impl GammaMode {
    /// Name of the field variable when printing scalars.
    pub fn var(&self) -> &'static str {
        match self {
            GammaMode::Plus => "t",
            _ => "g",
        }
    }
}

#[derive(Clone, Debug)]
pub struct WbnModel {
    pub n: usize,
    pub mode: GammaMode,
    pub alg: Algebra,
    pub gamma: Scalar,
    /// `(gamma_+, gamma_-)` when the mode carries them.
    pub gamma_pm: Option<(Scalar, Scalar)>,
    /// `b_i = alpha_i + ... + alpha_n` as states.
    pub b: Vec<State>,
    pub g: State,
    /// `gamma_1, ..., gamma_n`.
    pub gammas: Vec<Scalar>,
    /// `W_0, ..., W_{2n-2}`.
    pub w: Vec<State>,
    pub gg: LambdaPoly,
}

/// Gram matrix of the simple roots of `B_n` with long roots of norm 2.
pub fn b_gram(n: usize) -> Vec<Vec<Scalar>> {
    let mut m = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        m[i][i] = Scalar::from_int(if i + 1 == n { 1 } else { 2 });
        if i + 1 < n {
            m[i][i + 1] = Scalar::from_int(-1);
            m[i + 1][i] = Scalar::from_int(-1);
        }
    }
    m
}

/// `gamma_i = prod_{j <= i} (1 - 2j(2j-1) gamma^2)`.
pub fn gamma_coefficient(gamma: &Scalar, i: usize) -> Scalar {
    let g2 = gamma * gamma;
    let mut p = Scalar::one();
    for j in 1..=i as i64 {
        p = &p * &(&Scalar::one() - &(&Scalar::from_int(2 * j * (2 * j - 1)) * &g2));
    }
    p
}

fn gen_mode(g: usize, p: i32) -> Mono {
    Mono {
        modes: vec![(g as u16, p)],
        hw: Hw::Vac,
    }
}

pub fn build_wbn(n: usize, mode: GammaMode) -> Result<WbnModel> {
    if n == 0 {
        return Err(Error::InvalidArgument("WB_n needs n >= 1".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let alg = free_field(&format!("WB_{n}"), &refs, &b_gram(n), &["Psi"], &[vec![Scalar::one()]])?;
    let psi = n;
    let (gamma, gamma_pm) = match &mode {
        GammaMode::Symbolic => (Scalar::k(), None),
        GammaMode::At(q) => (Scalar::from_q(q.clone()), None),
        GammaMode::Plus => {
            let t = Scalar::k();
            let tm = -t.inv();
            (&t + &tm, Some((t, tm)))
        }
    };
    let e = alg.engine();
    let b: Vec<State> = (0..n)
        .map(|i| {
            let mut s = State::zero();
            for j in i..n {
                s.add(&State::gen(j), &Scalar::one());
            }
            s
        })
        .collect();
    // G_i = gamma d G_{i+1} + :b_i G_{i+1}:
    let mut g = State::gen(psi);
    for i in (0..n).rev() {
        let mut next = e.translate(&g)?.scale(&gamma);
        for j in i..n {
            next.add(&e.apply_gen(j, -1, &g)?, &Scalar::one());
        }
        g = next;
    }
    let gg = bracket(&alg, &g, &g)?;
    let gammas: Vec<Scalar> = (1..=n).map(|i| gamma_coefficient(&gamma, i)).collect();
    let top = gg.get(2 * n as u32);
    let want = State::vacuum().scale(&gammas[n - 1]);
    if gg.degree() != Some(2 * n as u32) || top != want {
        return Err(Error::TopCoefficientMismatch(format!(
            "lambda^{} coefficient of [G_lambda G] is not gamma_{n}",
            2 * n
        )));
    }
    let mut w = Vec::with_capacity(2 * n - 1);
    w.push(gg.get(0));
    for j in 1..=(2 * n - 2) {
        let c = &gammas[(j + 1) / 2 - 1];
        if c.is_zero() {
            return Err(Error::InvalidArgument(format!("gamma_{} vanishes", (j + 1) / 2)));
        }
        w.push(gg.get(j as u32).scale(&c.inv()));
    }
    Ok(WbnModel {
        n,
        mode,
        alg,
        gamma,
        gamma_pm,
        b,
        g,
        gammas,
        w,
        gg,
    })
}

/// Reduction modulo `C_2`: monomials with a mode below `-1` are dropped.
pub fn mod_c2(v: &State) -> State {
    v.filter(|m| m.modes.iter().all(|&(_, p)| p == -1))
}

impl WbnModel {
    pub fn psi(&self) -> usize {
        self.n
    }

    /// `sum over j_1 < ... < j_r of :b_{j_1}^2 ... b_{j_r}^2:`.
    pub fn elementary_b2(&self, r: usize) -> Result<State> {
        let e = self.alg.engine();
        let mut out = State::zero();
        for subset in subsets(self.n, r) {
            let mut s = State::vacuum();
            for &j in subset.iter().rev() {
                for _ in 0..2 {
                    s = e.apply_field(&self.b[j], -1, &s)?;
                }
            }
            out.add(&s, &Scalar::one());
        }
        Ok(out)
    }

    /// `W_{2i} = sum :b^2...b^2: mod C_2` for all `i`, and odd `W`'s lie in `C_2`.
    pub fn check_congruences(&self) -> Result<CheckReport> {
        let mut bad = None;
        for i in 0..self.n {
            let want = mod_c2(&self.elementary_b2(self.n - i)?);
            if mod_c2(&self.w[2 * i]) != want {
                bad = Some(json!({"W": 2 * i}));
                break;
            }
            if i > 0 && !mod_c2(&self.w[2 * i - 1]).is_zero() {
                bad = Some(json!({"W": 2 * i - 1}));
                break;
            }
        }
        Ok(CheckReport::new(
            &format!("wb{}-c2-congruences", self.n),
            bad.is_none(),
            bad,
            vec![2 * self.n as i64],
            json!({"generators": (0..self.n).map(|i| 2 * i).collect::<Vec<_>>()}),
        ))
    }

    /// `[G_lambda G] = :b_1^2: + gamma d b_1 + :(dPsi)Psi: + (1 - 2 gamma^2) lambda^2/2` for `n = 1`.
    pub fn check_closed_form(&self) -> Result<CheckReport> {
        if self.n != 1 {
            return Err(Error::InvalidArgument("closed form is for n = 1".into()));
        }
        let e = self.alg.engine();
        let mut p0 = e.apply_gen(0, -1, &State::gen(0))?;
        p0.add(&State::mono(gen_mode(0, -2)), &self.gamma);
        p0.add(&e.apply_gen(1, -2, &State::gen(1))?, &Scalar::one());
        let c = &Scalar::one() - &(&Scalar::from_int(2) * &(&self.gamma * &self.gamma));
        let mut want = std::collections::BTreeMap::new();
        want.insert(0u32, p0);
        // lambda^2/2 carries the 2-product
        want.insert(2u32, State::vacuum().scale(&c));
        let ok = self.gg == LambdaPoly(want);
        let witness = (!ok).then(|| json!(self.gg.to_json(&self.alg).ok()));
        Ok(CheckReport::new("wb1-closed-form", ok, witness, vec![3], json!({})))
    }

    /// Momentum `gamma_+ alpha_i`.
    fn momentum(&self, i: usize) -> Result<Vec<Scalar>> {
        let (t, _) = self
            .gamma_pm
            .clone()
            .ok_or_else(|| Error::InvalidArgument("screenings need the gamma_+ variable".into()))?;
        let mut m = vec![Scalar::zero(); self.n];
        m[i] = t;
        Ok(m)
    }

    /// `Q_i v`, with `Q_n` dressed by `Psi`.
    pub fn screen(&self, i: usize, v: &State) -> Result<State> {
        let beta = self.momentum(i)?;
        let e = self.alg.engine();
        let mut field = State::hw(Hw::mom(beta));
        if i + 1 == self.n {
            field = e.apply_gen(self.psi(), -1, &field)?;
        }
        e.apply_field(&field, 0, v)
    }
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// `Q_i G = 0` for every screening, and also on the even generators `W_{2i}`.
pub fn verify_wbn_screening(model: &WbnModel) -> Result<CheckReport> {
    let n = model.n;
    let mut targets = vec![("G".to_string(), model.g.clone())];
    for i in 0..n {
        targets.push((format!("W{}", 2 * i), model.w[2 * i].clone()));
    }
    let mut witness = None;
    let mut weights = Vec::new();
    'outer: for (name, v) in &targets {
        weights.push(v.max_depth2(&model.alg));
        for i in 0..n {
            let img = model.screen(i, v)?;
            if !img.is_zero() {
                witness = Some(json!({"screening": i + 1, "field": name, "weight2": v.max_depth2(&model.alg)}));
                break 'outer;
            }
        }
    }
    weights.sort();
    weights.dedup();
    Ok(CheckReport::new(
        &format!("wb{n}-screening"),
        witness.is_none(),
        witness,
        weights,
        json!({"gamma_plus": "t", "gamma": render(&model.gamma, "t")}),
    ))
}

pub(crate) fn render(s: &Scalar, var: &str) -> String {
    s.to_string_var(var)
}

