//! Brackets by the non-commutative Wick rule.
//!
//! This route never uses the Borcherds recursion for composite fields: a
//! generator is bracketed with a state by peeling one factor at a time,
//! keeping the integral correction term, and the reversed bracket is
//! obtained by skew-symmetry.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use super::field::LambdaPoly;
use super::state::{Mono, State};
use super::{Algebra, Engine, LinearField};
use crate::error::{Error, Result};
use crate::scalar::{binom, factorial, Scalar};

/// Polynomial in `lambda` with plain powers as keys.
type Powers = BTreeMap<u32, State>;

fn add_power(p: &mut Powers, n: u32, s: &State, c: &Scalar) {
    if s.is_zero() || c.is_zero() {
        return;
    }
    let e = p.entry(n).or_default();
    e.add(s, c);
    if e.is_zero() {
        p.remove(&n);
    }
}

fn to_products(p: Powers) -> LambdaPoly {
    LambdaPoly(
        p.into_iter()
            .filter(|(_, s)| !s.is_zero())
            .map(|(n, s)| (n, s.scale(&Scalar::from_q(factorial(n)))))
            .collect(),
    )
}

struct Wick<'a> {
    e: Engine<'a>,
    memo: RefCell<HashMap<(usize, Mono), Powers>>,
}

impl<'a> Wick<'a> {
    fn alg(&self) -> &'a Algebra {
        self.e.alg
    }

    /// `[a_lambda d^d b]` as plain powers of lambda: `sum C(d,i) lambda^{d-i} d^i [a_lambda b]`.
    fn gen_gen(&self, a: usize, b: usize, d: u32) -> BTreeMap<u32, LinearField> {
        let mut out: BTreeMap<u32, LinearField> = BTreeMap::new();
        for (j, f) in self.alg().products(a, b).iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let inv_j = Scalar::from_q(factorial(j as u32)).inv();
            for i in 0..=d {
                let c = &inv_j * &Scalar::from_q(binom(d as i64, i));
                out.entry(j as u32 + d - i).or_default().add(&f.derive(i), &c);
            }
        }
        out
    }

    /// `X_(i) C` for a linear field `X`, with `[dg_mu C] = -mu [g_mu C]`.
    fn linear_product(&self, x: &LinearField, i: u32, c: &Mono) -> Result<State> {
        let mut out = State::zero();
        for (g, e, coef) in &x.terms {
            if *e > i {
                continue;
            }
            let mut k = Scalar::one();
            for t in 0..*e {
                k = &k * &Scalar::from_int(i as i64 - t as i64);
            }
            if e % 2 == 1 {
                k = -k;
            }
            let inner = self.gen_state(*g, c)?;
            let n = i - e;
            if let Some(s) = inner.get(&n) {
                // plain power n carries n-product / n!
                out.add(s, &(&(coef * &k) * &Scalar::from_q(factorial(n))));
            }
        }
        Ok(out)
    }

    /// `[a_lambda C]` for a generator `a` and a monomial `C`.
    fn gen_state(&self, a: usize, c: &Mono) -> Result<Powers> {
        let key = (a, c.clone());
        if let Some(p) = self.memo.borrow().get(&key) {
            return Ok(p.clone());
        }
        let p = self.gen_state_raw(a, c)?;
        self.memo.borrow_mut().insert(key, p.clone());
        Ok(p)
    }

    fn gen_state_raw(&self, a: usize, c: &Mono) -> Result<Powers> {
        let mut out = Powers::new();
        if c.modes.is_empty() {
            let s = self.e.apply_gen_mono(a, 0, c)?;
            add_power(&mut out, 0, &s, &Scalar::one());
            return Ok(out);
        }
        let (b, p) = c.modes[0];
        let b = b as usize;
        let d = (-p - 1) as u32;
        let rest = c.rest();
        let rs = State::mono(rest.clone());
        let inv_d = Scalar::from_q(factorial(d)).inv();
        let ab = self.gen_gen(a, b, d);
        // :[a_lambda d^d b] C':
        for (n, x) in &ab {
            let s = self.e.apply_linear(x, -1, &rs)?;
            add_power(&mut out, *n, &s, &inv_d);
        }
        // (-1)^{|a||b|} :d^d b [a_lambda C']:
        let sign = if self.alg().parity(a) & self.alg().parity(b) == 1 {
            -Scalar::one()
        } else {
            Scalar::one()
        };
        for (n, s) in self.gen_state(a, &rest)? {
            let t = self.e.apply_gen(b, p, &s)?;
            add_power(&mut out, n, &t, &sign);
        }
        // int_0^lambda [[a_lambda d^d b]_mu C'] d mu
        for (n, x) in &ab {
            let wmax = x
                .terms
                .iter()
                .map(|(g, e, _)| self.alg().gens[*g].wt2 + 2 * *e as i64)
                .max();
            let Some(wmax) = wmax else { continue };
            let top = (wmax + rest.depth2(self.alg())).div_euclid(2) - 1;
            if top < 0 {
                continue;
            }
            for i in 0..=top as u32 {
                let s = self.linear_product(x, i, &rest)?;
                // mu^i / i! integrates to lambda^{i+1} / (i+1)!
                let coef = &inv_d * &Scalar::from_q(factorial(i + 1)).inv();
                add_power(&mut out, n + i + 1, &s, &coef);
            }
        }
        Ok(out)
    }
}

/// `[a_lambda C]` for a generator `a` by the left Wick recursion.
pub fn gen_bracket(alg: &Algebra, a: usize, c: &State) -> Result<LambdaPoly> {
    let w = Wick {
        e: alg.engine(),
        memo: RefCell::new(HashMap::new()),
    };
    let mut out = Powers::new();
    for (m, x) in c.iter() {
        for (n, s) in w.gen_state(a, m)? {
            add_power(&mut out, n, &s, x);
        }
    }
    Ok(to_products(out))
}

/// `[A_lambda b]` for a generator `b` via `-(-1)^{|A||b|} [b_{-lambda-d} A]`.
pub fn bracket_gen_right(alg: &Algebra, a: &State, b: usize) -> Result<LambdaPoly> {
    let pa = a
        .parity(alg)
        .ok_or_else(|| Error::InvalidArgument("inhomogeneous parity".into()))?;
    let rev = gen_bracket(alg, b, a)?;
    let e = alg.engine();
    let sign = if pa & alg.parity(b) == 1 {
        Scalar::one()
    } else {
        -Scalar::one()
    };
    let top = rev.degree().unwrap_or(0);
    let mut out = BTreeMap::new();
    for n in 0..=top {
        let mut s = State::zero();
        for j in n..=top {
            let t = e.translate_pow(&rev.get(j), j - n)?;
            let c = if j % 2 == 1 { -sign.clone() } else { sign.clone() };
            s.add(&t, &c);
        }
        if !s.is_zero() {
            out.insert(n, s);
        }
    }
    Ok(LambdaPoly(out))
}

/// Wick-route bracket when one side is a single generator field.
pub fn bracket(alg: &Algebra, a: &State, b: &State) -> Result<LambdaPoly> {
    if let Some(g) = as_generator(a) {
        return gen_bracket(alg, g, b);
    }
    if let Some(g) = as_generator(b) {
        return bracket_gen_right(alg, a, g);
    }
    Err(Error::InvalidArgument("Wick route needs a generator on one side".into()))
}

/// `Some(g)` if the state is exactly `g_(-1)|0>`.
pub fn as_generator(s: &State) -> Option<usize> {
    if s.len() != 1 {
        return None;
    }
    let (m, c) = s.iter().next()?;
    if !c.is_one() || m.modes.len() != 1 || m.modes[0].1 != -1 || m.hw != super::Hw::Vac {
        return None;
    }
    Some(m.modes[0].0 as usize)
}
