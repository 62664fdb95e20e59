use std::collections::BTreeMap;

use super::Algebra;
use crate::scalar::Scalar;

/// Highest-weight vector a monomial is built on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hw {
    Vac,
    /// Basis vector `idx` of the finite-dimensional module `rep`.
    X { rep: u16, idx: u16 },
    /// Lattice state `|mu>` with momentum over the Heisenberg generators.
    Mom(Vec<Scalar>),
}

impl Hw {
    /// Momentum vector, normalized so that zero momentum is the vacuum.
    pub fn mom(mu: Vec<Scalar>) -> Hw {
        if mu.iter().all(|x| x.is_zero()) {
            Hw::Vac
        } else {
            Hw::Mom(mu)
        }
    }

    pub fn momentum(&self, len: usize) -> Option<Vec<Scalar>> {
        match self {
            Hw::Vac => Some(vec![Scalar::zero(); len]),
            Hw::Mom(m) => Some(m.clone()),
            Hw::X { .. } => None,
        }
    }
}

/// PBW monomial `g1_(p1) g2_(p2) ... |hw>` with `(g_i, p_i)` ascending and `p_i < 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub modes: Vec<(u16, i32)>,
    pub hw: Hw,
}

impl Mono {
    pub fn vacuum() -> Self {
        Mono {
            modes: Vec::new(),
            hw: Hw::Vac,
        }
    }

    pub fn hw(hw: Hw) -> Self {
        Mono { modes: Vec::new(), hw }
    }

    /// Doubled depth: sum of `wt2(g) - 2p - 2` over the modes.
    pub fn depth2(&self, alg: &Algebra) -> i64 {
        self.modes
            .iter()
            .map(|&(g, p)| alg.gens[g as usize].wt2 - 2 * p as i64 - 2)
            .sum()
    }

    pub fn parity(&self, alg: &Algebra) -> u8 {
        let mut p = self.modes.iter().fold(0u8, |acc, &(g, _)| acc ^ alg.gens[g as usize].parity);
        if let Hw::X { rep, idx } = self.hw {
            p ^= alg.reps[rep as usize].parities[idx as usize];
        }
        p
    }

    pub fn charge(&self, alg: &Algebra) -> i32 {
        self.modes.iter().map(|&(g, _)| alg.gens[g as usize].charge).sum()
    }

    pub fn rest(&self) -> Mono {
        Mono {
            modes: self.modes[1..].to_vec(),
            hw: self.hw.clone(),
        }
    }

    pub fn with_hw(&self, hw: Hw) -> Mono {
        Mono {
            modes: self.modes.clone(),
            hw,
        }
    }
}

/// Finite linear combination of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub BTreeMap<Mono, Scalar>);

impl State {
    pub fn zero() -> Self {
        State(BTreeMap::new())
    }

    pub fn vacuum() -> Self {
        State::mono(Mono::vacuum())
    }

    pub fn mono(m: Mono) -> Self {
        let mut s = State::zero();
        s.0.insert(m, Scalar::one());
        s
    }

    pub fn hw(hw: Hw) -> Self {
        State::mono(Mono::hw(hw))
    }

    /// `g_(-1)|0>`.
    pub fn gen(g: usize) -> Self {
        State::mono(Mono {
            modes: vec![(g as u16, -1)],
            hw: Hw::Vac,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.0.iter()
    }

    pub fn coeff(&self, m: &Mono) -> Scalar {
        self.0.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_mono(&mut self, m: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&mut self, other: &State, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.0 {
            if c.is_one() {
                self.add_mono(m.clone(), x);
            } else {
                self.add_mono(m.clone(), &(x * c));
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> State {
        let mut s = State::zero();
        s.add(self, c);
        s
    }

    pub fn sub(&self, other: &State) -> State {
        let mut s = self.clone();
        s.add(other, &-Scalar::one());
        s
    }

    pub fn plus(&self, other: &State) -> State {
        let mut s = self.clone();
        s.add(other, &Scalar::one());
        s
    }

    /// The single parity of a nonzero homogeneous state.
    pub fn parity(&self, alg: &Algebra) -> Option<u8> {
        let mut it = self.0.keys().map(|m| m.parity(alg));
        let p = it.next()?;
        if it.all(|q| q == p) {
            Some(p)
        } else {
            None
        }
    }

    pub fn max_depth2(&self, alg: &Algebra) -> i64 {
        self.0.keys().map(|m| m.depth2(alg)).max().unwrap_or(0)
    }

    /// Keep the monomials accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> State {
        State(self.0.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect())
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> State {
        let mut s = State::zero();
        for (m, c) in &self.0 {
            s.add_mono(m.clone(), &f(c));
        }
        s
    }

    /// Coordinates against a basis; `None` if the state leaves its span.
    pub fn coords(&self, basis: &[Mono]) -> Option<Vec<Scalar>> {
        let idx: BTreeMap<&Mono, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![Scalar::zero(); basis.len()];
        for (m, c) in &self.0 {
            v[*idx.get(m)?] = c.clone();
        }
        Some(v)
    }

    pub fn from_coords(basis: &[Mono], v: &[Scalar]) -> State {
        let mut s = State::zero();
        for (m, c) in basis.iter().zip(v) {
            s.add_mono(m.clone(), c);
        }
        s
    }
}

/// PBW monomials over `hw` built from `gens`, with given doubled depth and,
/// optionally, charge. Ordered lexicographically by mode list.
pub fn graded_basis(alg: &Algebra, gens: &[usize], hw: &Hw, depth2: i64, charge: Option<i32>) -> Vec<Mono> {
    let mut gens = gens.to_vec();
    gens.sort();
    gens.dedup();
    // available modes (g, p) in ascending order with positive depth
    let mut modes: Vec<(u16, i32, i64)> = Vec::new();
    for &g in &gens {
        let w = alg.gens[g].wt2;
        let mut p = -1;
        let mut list = Vec::new();
        loop {
            let d = w - 2 * p as i64 - 2;
            if d > depth2 {
                break;
            }
            if d > 0 {
                list.push((g as u16, p, d));
            }
            p -= 1;
        }
        list.reverse();
        modes.extend(list);
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        alg: &Algebra,
        modes: &[(u16, i32, i64)],
        start: usize,
        left: i64,
        charge: i32,
        want: Option<i32>,
        cur: &mut Vec<(u16, i32)>,
        hw: &Hw,
        out: &mut Vec<Mono>,
    ) {
        if left == 0 {
            if want.is_none_or(|c| c == charge) {
                out.push(Mono {
                    modes: cur.clone(),
                    hw: hw.clone(),
                });
            }
            return;
        }
        for i in start..modes.len() {
            let (g, p, d) = modes[i];
            if d > left {
                continue;
            }
            let odd = alg.gens[g as usize].parity == 1;
            cur.push((g, p));
            let next = if odd { i + 1 } else { i };
            rec(alg, modes, next, left - d, charge + alg.gens[g as usize].charge, want, cur, hw, out);
            cur.pop();
        }
    }
    rec(alg, &modes, 0, depth2, 0, charge, &mut cur, hw, &mut out);
    out
}
