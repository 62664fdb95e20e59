use std::cell::RefCell;
use std::collections::HashMap;



use super::state::{Hw, Mono, State};
use super::{Algebra, LinearField};
use crate::error::{Error, Result};
use crate::scalar::{binom, Scalar};

/// Mode calculus on PBW states of one algebra. Holds memo tables, so it is
/// meant to be short-lived and used from a single thread.
pub struct Engine<'a> {
    pub alg: &'a Algebra,
    gen_cache: RefCell<HashMap<(u16, i32, Mono), State>>,
    field_cache: RefCell<HashMap<(Mono, i32, Mono), State>>,
}

fn ff(r: i64, d: u32) -> Scalar {
    let mut x = 1i64;
    for i in 0..d as i64 {
        x *= r - i;
    }
    Scalar::from_int(x)
}

fn sign(odd: bool) -> Scalar {
    if odd {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

impl<'a> Engine<'a> {
    pub fn new(alg: &'a Algebra) -> Self {
        Engine {
            alg,
            gen_cache: RefCell::new(HashMap::new()),
            field_cache: RefCell::new(HashMap::new()),
        }
    }

    fn wt2(&self, g: usize) -> i64 {
        self.alg.gens[g].wt2
    }

    /// `g_(p) v`.
    pub fn apply_gen(&self, g: usize, p: i32, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (m, c) in v.iter() {
            out.add(&self.apply_gen_mono(g, p, m)?, c);
        }
        Ok(out)
    }

    pub fn apply_gen_mono(&self, g: usize, p: i32, m: &Mono) -> Result<State> {
        let key = (g as u16, p, m.clone());
        if let Some(s) = self.gen_cache.borrow().get(&key) {
            return Ok(s.clone());
        }
        let s = self.apply_gen_mono_raw(g, p, m)?;
        self.gen_cache.borrow_mut().insert(key, s.clone());
        Ok(s)
    }

    fn apply_gen_mono_raw(&self, g: usize, p: i32, m: &Mono) -> Result<State> {
        let a = (g as u16, p);
        if m.modes.is_empty() {
            if p < 0 {
                return Ok(State::mono(Mono {
                    modes: vec![a],
                    hw: m.hw.clone(),
                }));
            }
            return self.hw_action(g, p, &m.hw);
        }
        let first = m.modes[0];
        if p < 0 && a < first {
            let mut modes = Vec::with_capacity(m.modes.len() + 1);
            modes.push(a);
            modes.extend_from_slice(&m.modes);
            return Ok(State::mono(Mono {
                modes,
                hw: m.hw.clone(),
            }));
        }
        let rest = m.rest();
        let odd_a = self.alg.parity(g) == 1;
        if a == first {
            if !odd_a {
                let mut modes = Vec::with_capacity(m.modes.len() + 1);
                modes.push(a);
                modes.extend_from_slice(&m.modes);
                return Ok(State::mono(Mono {
                    modes,
                    hw: m.hw.clone(),
                }));
            }
            // a_p a_p = [a_p, a_p] / 2 for odd a
            let c = self.commutator(g, p, g, p, &State::mono(rest))?;
            return Ok(c.scale(&Scalar::from_frac(1, 2)));
        }
        let (b, q) = (first.0 as usize, first.1);
        let rs = State::mono(rest);
        let inner = self.apply_gen(g, p, &rs)?;
        let mut out = self.apply_gen(b, q, &inner)?;
        let odd_b = self.alg.parity(b) == 1;
        if odd_a && odd_b {
            out = out.scale(&-Scalar::one());
        }
        out.add(&self.commutator(g, p, b, q, &rs)?, &Scalar::one());
        Ok(out)
    }

    /// `[a_(p), b_(q)] v = sum_j C(p, j) (a_(j) b)_(p+q-j) v`.
    pub fn commutator(&self, a: usize, p: i32, b: usize, q: i32, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (j, f) in self.alg.products(a, b).iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let c = Scalar::from_q(binom(p as i64, j as u32));
            if c.is_zero() {
                continue;
            }
            let t = self.apply_linear(f, p + q - j as i32, v)?;
            out.add(&t, &c);
        }
        Ok(out)
    }

    fn hw_action(&self, g: usize, p: i32, hw: &Hw) -> Result<State> {
        let depth = self.wt2(g) - 2 * p as i64 - 2;
        match hw {
            Hw::Vac => Ok(State::zero()),
            Hw::Mom(mu) => {
                if p != 0 {
                    return Ok(State::zero());
                }
                let mut c = Scalar::zero();
                for (i, x) in mu.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let h = self.alg.heis[i];
                    if self.alg.product(g, h, 0).is_some_and(|f| !f.is_zero()) {
                        return Err(Error::NonAbelianMomentum);
                    }
                    c += &(x * &self.alg.pairing(g, h));
                }
                Ok(State::hw(hw.clone()).scale(&c))
            }
            Hw::X { rep, idx } => {
                if depth < 0 || p > 0 {
                    return Ok(State::zero());
                }
                let r = &self.alg.reps[*rep as usize];
                match r.action.get(&g) {
                    Some(mat) => {
                        let mut out = State::zero();
                        for (o, row) in mat.iter().enumerate() {
                            let c = &row[*idx as usize];
                            if !c.is_zero() {
                                out.add_mono(
                                    Mono::hw(Hw::X {
                                        rep: *rep,
                                        idx: o as u16,
                                    }),
                                    c,
                                );
                            }
                        }
                        Ok(out)
                    }
                    None if depth == 0 => Err(Error::UndefinedAction(format!(
                        "{}_(0) on {}",
                        self.alg.gens[g].name, r.name
                    ))),
                    None => Ok(State::zero()),
                }
            }
        }
    }

    /// Modes of `sum c d^k g + vac`: `(d^k g)_(r) = (-1)^k r(r-1)...(r-k+1) g_(r-k)`.
    pub fn apply_linear(&self, f: &LinearField, r: i32, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (g, d, c) in &f.terms {
            let mut k = ff(r as i64, *d);
            if k.is_zero() {
                continue;
            }
            if d % 2 == 1 {
                k = -k;
            }
            let t = self.apply_gen(*g, r - *d as i32, v)?;
            out.add(&t, &(c * &k));
        }
        if r == -1 && !f.vac.is_zero() {
            out.add(v, &f.vac);
        }
        Ok(out)
    }

    /// Apply a sequence of modes right to left: `modes[0]` acts last.
    pub fn apply_modes(&self, modes: &[(usize, i32)], v: &State) -> Result<State> {
        let mut s = v.clone();
        for &(g, p) in modes.iter().rev() {
            s = self.apply_gen(g, p, &s)?;
        }
        Ok(s)
    }

    /// Integer pairing of the momenta of two monomials.
    fn shift(&self, b: &Mono, v: &Mono) -> Result<i64> {
        let n = self.alg.heis.len();
        let beta = match &b.hw {
            Hw::Vac => return Ok(0),
            Hw::Mom(m) => m,
            Hw::X { .. } => return Err(Error::NonVacuumModule),
        };
        let lam = v
            .hw
            .momentum(n)
            .ok_or_else(|| Error::UndefinedAction("lattice field on an induced module".into()))?;
        let s = self.alg.momentum_pairing(beta, &lam);
        s.as_integer()
            .ok_or_else(|| Error::NonIntegralPairing(s.to_string()))
    }

    /// Largest `q` with `B_(q) v` possibly nonzero.
    pub(crate) fn top_mode(&self, b: &Mono, v: &Mono) -> Result<i64> {
        let d = b.depth2(self.alg) + v.depth2(self.alg);
        Ok(d.div_euclid(2) - 1 - self.shift(b, v)?)
    }

    /// `B_(m) v` for a state `B` of the vacuum or lattice module.
    pub fn apply_field(&self, b: &State, m: i32, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (bm, bc) in b.iter() {
            for (vm, vc) in v.iter() {
                let t = self.apply_field_mono(bm, m, vm)?;
                out.add(&t, &(bc * vc));
            }
        }
        Ok(out)
    }

    pub fn apply_field_mono(&self, b: &Mono, m: i32, v: &Mono) -> Result<State> {
        if (m as i64) > self.top_mode(b, v)? {
            return Ok(State::zero());
        }
        let key = (b.clone(), m, v.clone());
        if let Some(s) = self.field_cache.borrow().get(&key) {
            return Ok(s.clone());
        }
        let s = self.apply_field_mono_raw(b, m, v)?;
        self.field_cache.borrow_mut().insert(key, s.clone());
        Ok(s)
    }

    fn apply_field_mono_raw(&self, b: &Mono, m: i32, v: &Mono) -> Result<State> {
        if b.modes.is_empty() {
            return match &b.hw {
                Hw::Vac => Ok(if m == -1 { State::mono(v.clone()) } else { State::zero() }),
                Hw::Mom(beta) => self.exp_op(beta, m, v),
                Hw::X { .. } => Err(Error::NonVacuumModule),
            };
        }
        let (a, p) = b.modes[0];
        let a = a as usize;
        let n = -p as i64;
        let rest = b.rest();
        let mut out = State::zero();
        // a_(-n-j) B'_(m+j) v
        let top = self.top_mode(&rest, v)?;
        let mut j = 0i64;
        while m as i64 + j <= top {
            let c = Scalar::from_q(binom(n + j - 1, j as u32));
            let t = self.apply_field_mono(&rest, m + j as i32, v)?;
            if !t.is_zero() {
                out.add(&self.apply_gen(a, (-n - j) as i32, &t)?, &c);
            }
            j += 1;
        }
        // -(-1)^n (-1)^{|a||B'|} B'_(m-n-j) a_(j) v
        let odd = (n % 2 == 1) ^ (self.alg.parity(a) & rest.parity(self.alg) == 1);
        let sgn = -sign(odd);
        let jmax = (v.depth2(self.alg) + self.wt2(a) - 2).div_euclid(2);
        for j in 0..=jmax {
            let t = self.apply_gen_mono(a, j as i32, v)?;
            if t.is_zero() {
                continue;
            }
            let c = &sgn * &Scalar::from_q(binom(n + j - 1, j as u32));
            let r = self.apply_field(&State::mono(rest.clone()), (m as i64 - n - j) as i32, &t)?;
            out.add(&r, &c);
        }
        Ok(out)
    }

    /// `sum_i beta_i (h_i)_(j)`.
    fn heis_mode(&self, beta: &[Scalar], j: i32, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (i, c) in beta.iter().enumerate() {
            if !c.is_zero() {
                out.add(&self.apply_gen(self.alg.heis[i], j, v)?, c);
            }
        }
        Ok(out)
    }

    /// Mode `q` of the lattice field with momentum `beta` applied to `v`.
    pub fn exp_op(&self, beta: &[Scalar], q: i32, v: &Mono) -> Result<State> {
        let n = self.alg.heis.len();
        let lam = v
            .hw
            .momentum(n)
            .ok_or_else(|| Error::UndefinedAction("lattice field on an induced module".into()))?;
        let s = self.alg.momentum_pairing(beta, &lam);
        let s = s
            .as_integer()
            .ok_or_else(|| Error::NonIntegralPairing(s.to_string()))?;
        let amax = v.depth2(self.alg).div_euclid(2);
        // annihilation part
        let mut w: Vec<State> = vec![State::mono(v.clone())];
        for a in 1..=amax {
            let mut acc = State::zero();
            for j in 1..=a {
                let t = self.heis_mode(beta, j as i32, &w[(a - j) as usize])?;
                acc.add(&t, &Scalar::one());
            }
            w.push(acc.scale(&Scalar::from_frac(-1, a)));
        }
        let mut out = State::zero();
        for (a, wa) in w.iter().enumerate() {
            let c = a as i64 - q as i64 - 1 - s;
            if c < 0 || wa.is_zero() {
                continue;
            }
            // creation part
            let mut u: Vec<State> = vec![wa.clone()];
            for i in 1..=c {
                let mut acc = State::zero();
                for j in 1..=i {
                    let t = self.heis_mode(beta, -j as i32, &u[(i - j) as usize])?;
                    acc.add(&t, &Scalar::one());
                }
                u.push(acc.scale(&Scalar::from_frac(1, i)));
            }
            out.add(&u[c as usize], &Scalar::one());
        }
        // shift the momentum
        let mut shifted = State::zero();
        for (m, c) in out.iter() {
            let lam = m.hw.momentum(n).expect("lattice state");
            let mu: Vec<Scalar> = lam.iter().zip(beta).map(|(x, y)| x + y).collect();
            shifted.add_mono(m.with_hw(Hw::mom(mu)), c);
        }
        Ok(shifted)
    }

    /// Translation operator.
    pub fn translate(&self, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (m, c) in v.iter() {
            out.add(&self.translate_mono(m)?, c);
        }
        Ok(out)
    }

    fn translate_mono(&self, m: &Mono) -> Result<State> {
        if m.modes.is_empty() {
            return match &m.hw {
                Hw::Vac => Ok(State::zero()),
                Hw::Mom(mu) => self.heis_mode(mu, -1, &State::hw(m.hw.clone())),
                Hw::X { .. } => Err(Error::UndefinedAction("translation on an induced module".into())),
            };
        }
        let (a, p) = m.modes[0];
        let rest = m.rest();
        let mut out = self.apply_gen_mono(a as usize, p - 1, &rest)?.scale(&Scalar::from_int(-(p as i64)));
        let tr = self.translate_mono(&rest)?;
        out.add(&self.apply_gen(a as usize, p, &tr)?, &Scalar::one());
        Ok(out)
    }

    /// `T^k v / k!`.
    pub fn translate_pow(&self, v: &State, k: u32) -> Result<State> {
        let mut s = v.clone();
        for i in 1..=k {
            s = self.translate(&s)?.scale(&Scalar::from_frac(1, i as i64));
        }
        Ok(s)
    }
}
