//! Seeded randomized checks of the vertex algebra axioms.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::field::{bracket_with, LambdaPoly};
use super::state::{graded_basis, Hw, State};
use super::{wick, Algebra, Engine};
use crate::error::Result;
use crate::scalar::{binom, factorial, q_int, Scalar};

/// Random homogeneous vacuum-module states of doubled weight in `1..=max_depth2`.
pub fn random_fields(alg: &Algebra, seed: u64, count: usize, max_depth2: i64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<usize> = (0..alg.n_gens()).collect();
    let bases: Vec<_> = (1..=max_depth2)
        .map(|d| graded_basis(alg, &gens, &Hw::Vac, d, None))
        .filter(|b| !b.is_empty())
        .collect();
    let mut out = Vec::with_capacity(count);
    if bases.is_empty() {
        return out;
    }
    while out.len() < count {
        let basis = bases.choose(&mut rng).unwrap();
        let parity = basis.choose(&mut rng).unwrap().parity(alg);
        let pool: Vec<_> = basis.iter().filter(|m| m.parity(alg) == parity).collect();
        let terms = rng.gen_range(1..=pool.len().min(3));
        let mut s = State::zero();
        for m in pool.choose_multiple(&mut rng, terms) {
            let mut c = Scalar::from_int(*[-3, -2, -1, 1, 2, 3].choose(&mut rng).unwrap());
            if rng.gen_bool(0.25) {
                c = &c * &Scalar::k_plus(q_int(rng.gen_range(-2..=2)));
            }
            s.add_mono((*m).clone(), &c);
        }
        if !s.is_zero() {
            out.push(s);
        }
    }
    out
}

fn sign(alg: &Algebra, a: &State, b: &State) -> Scalar {
    let pa = a.parity(alg).unwrap_or(0);
    let pb = b.parity(alg).unwrap_or(0);
    if pa & pb == 1 {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

fn half_weight(alg: &Algebra, a: &State) -> i64 {
    a.max_depth2(alg).div_euclid(2) + 1
}

/// `[B_lambda A] = -(-1)^{|A||B|} [A_{-lambda-d} B]`.
pub fn check_skew(e: &Engine, a: &State, b: &State) -> Result<bool> {
    let alg = e.alg;
    let ab = bracket_with(e, a, b)?;
    let ba = bracket_with(e, b, a)?;
    let s = -sign(alg, a, b);
    let top = ab.degree().unwrap_or(0);
    let mut want = BTreeMap::new();
    for n in 0..=top {
        let mut acc = State::zero();
        for j in n..=top {
            let t = e.translate_pow(&ab.get(j), j - n)?;
            let c = if j % 2 == 1 { -s.clone() } else { s.clone() };
            acc.add(&t, &c);
        }
        if !acc.is_zero() {
            want.insert(n, acc);
        }
    }
    Ok(LambdaPoly(want) == ba)
}

/// `A_(m)(B_(n)C) - p B_(n)(A_(m)C) = sum_j C(m,j) (A_(j)B)_(m+n-j) C` for `m, n >= 0`.
pub fn check_jacobi(e: &Engine, a: &State, b: &State, c: &State) -> Result<bool> {
    let alg = e.alg;
    let p = sign(alg, a, b);
    let top = half_weight(alg, a) + half_weight(alg, b) + half_weight(alg, c);
    let ab = bracket_with(e, a, b)?;
    for m in 0..=top as i32 {
        for n in 0..=top as i32 {
            let lhs = e
                .apply_field(a, m, &e.apply_field(b, n, c)?)?
                .sub(&e.apply_field(b, n, &e.apply_field(a, m, c)?)?.scale(&p));
            let mut rhs = State::zero();
            for (j, x) in ab.0.iter() {
                if *j as i32 > m {
                    break;
                }
                let t = e.apply_field(x, m + n - *j as i32, c)?;
                rhs.add(&t, &Scalar::from_q(binom(m as i64, *j)));
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `[A_lambda :BC:] = :[A_lambda B]C: + p :B[A_lambda C]: + int_0^lambda [[A_lambda B]_mu C] dmu`.
pub fn check_wick(e: &Engine, a: &State, b: &State, c: &State) -> Result<bool> {
    let alg = e.alg;
    let bc = e.apply_field(b, -1, c)?;
    let lhs = bracket_with(e, a, &bc)?;
    let p = sign(alg, a, b);
    let ab = bracket_with(e, a, b)?;
    let ac = bracket_with(e, a, c)?;
    let mut rhs: BTreeMap<u32, State> = BTreeMap::new();
    let mut put = |n: u32, s: &State, c: &Scalar| {
        rhs.entry(n).or_default().add(s, c);
    };
    for (n, x) in ab.0.iter() {
        put(*n, &e.apply_field(x, -1, c)?, &Scalar::one());
    }
    for (n, x) in ac.0.iter() {
        put(*n, &e.apply_field(b, -1, x)?, &p);
    }
    // lambda^n/n! mu^j/j! integrates to lambda^{n+j+1}/(n!(j+1)!)
    for (n, x) in ab.0.iter() {
        let ext = bracket_with(e, x, c)?;
        for (j, y) in ext.0.iter() {
            let big = n + j + 1;
            let w = factorial(big) / (factorial(*n) * factorial(j + 1));
            put(big, y, &Scalar::from_q(w));
        }
    }
    rhs.retain(|_, s| !s.is_zero());
    Ok(LambdaPoly(rhs) == lhs)
}

/// `[A_(m), B_(n)] v = sum_j C(m,j) (A_(j)B)_(m+n-j) v` for arbitrary `m, n`.
pub fn check_commutator(e: &Engine, a: &State, b: &State, v: &State, m: i32, n: i32) -> Result<bool> {
    let alg = e.alg;
    let p = sign(alg, a, b);
    let lhs = e
        .apply_field(a, m, &e.apply_field(b, n, v)?)?
        .sub(&e.apply_field(b, n, &e.apply_field(a, m, v)?)?.scale(&p));
    let ab = bracket_with(e, a, b)?;
    let mut rhs = State::zero();
    for (j, x) in ab.0.iter() {
        let t = e.apply_field(x, m + n - *j as i32, v)?;
        rhs.add(&t, &Scalar::from_q(binom(m as i64, *j)));
    }
    Ok(lhs == rhs)
}

/// `(TA)_(n) v = -n A_(n-1) v`.
pub fn check_translation(e: &Engine, a: &State, v: &State, n: i32) -> Result<bool> {
    let ta = e.translate(a)?;
    let lhs = e.apply_field(&ta, n, v)?;
    let rhs = e.apply_field(a, n - 1, v)?.scale(&Scalar::from_int(-(n as i64)));
    Ok(lhs == rhs)
}

/// Generator brackets by the Wick recursion agree with the mode route.
pub fn check_wick_route(e: &Engine, g: usize, a: &State) -> Result<bool> {
    let alg = e.alg;
    let gs = State::gen(g);
    Ok(wick::bracket(alg, &gs, a)? == bracket_with(e, &gs, a)?
        && wick::bracket(alg, a, &gs)? == bracket_with(e, a, &gs)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub algebra: String,
    pub seed: u64,
    pub samples: usize,
    pub max_weight2: i64,
    /// Number of passing instances per check.
    pub passed: BTreeMap<String, usize>,
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every check on `samples` random fields of doubled weight at most `max_depth2`.
pub fn run_suite(alg: &Algebra, seed: u64, samples: usize, max_depth2: i64) -> Result<AxiomReport> {
    let fields = random_fields(alg, seed, samples, max_depth2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let e = alg.engine();
    let mut rep = AxiomReport {
        algebra: alg.name.clone(),
        seed,
        samples: fields.len(),
        max_weight2: max_depth2,
        passed: BTreeMap::new(),
        failures: Vec::new(),
    };
    let n = fields.len();
    let record = |rep: &mut AxiomReport, name: &str, ok: bool, i: usize| {
        if ok {
            *rep.passed.entry(name.to_string()).or_default() += 1;
        } else {
            rep.failures.push(format!("{name} failed on sample {i}"));
        }
    };
    for i in 0..n {
        let a = &fields[i];
        let b = &fields[(i + 1) % n];
        let c = &fields[(i + 2) % n];
        let v = &fields[(i + 3) % n];
        record(&mut rep, "skew-symmetry", check_skew(&e, a, b)?, i);
        record(&mut rep, "jacobi", check_jacobi(&e, a, b, c)?, i);
        record(&mut rep, "wick", check_wick(&e, a, b, c)?, i);
        let m = rng.gen_range(-2..=2);
        let k = rng.gen_range(-2..=2);
        record(&mut rep, "commutator", check_commutator(&e, a, b, v, m, k)?, i);
        record(&mut rep, "commutator-vacuum", check_commutator(&e, a, b, &State::vacuum(), m, k)?, i);
        let t = rng.gen_range(-2..=2);
        record(&mut rep, "translation", check_translation(&e, a, v, t)?, i);
        let g = rng.gen_range(0..alg.n_gens());
        record(&mut rep, "wick-route", check_wick_route(&e, g, a)?, i);
    }
    Ok(rep)
}
