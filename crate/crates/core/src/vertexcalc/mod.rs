//! Lambda-bracket calculus for freely generated vertex superalgebras.
//!
//! An [`Algebra`] is given by generators and the n-products `a_(j)b` of
//! generators, each a linear combination of derivatives of generators plus a
//! multiple of the vacuum. States are PBW monomials over a highest-weight
//! vector; fields are identified with their states.

mod engine;
mod field;
mod state;
pub mod axioms;
pub mod sugawara;
pub mod wick;

pub use engine::Engine;
pub use field::{bracket, derive, field_state, normal_order, state_field, FieldExpr, FieldTerm, LambdaPoly};
pub use state::{graded_basis, Hw, Mono, State};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{factorial, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub parity: u8,
    /// Doubled conformal weight.
    pub wt2: i64,
    pub charge: i32,
}

/// `sum c * d^k g + vac * |0>`, terms sorted by `(g, k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearField {
    pub terms: Vec<(usize, u32, Scalar)>,
    pub vac: Scalar,
}

impl LinearField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn gen(g: usize) -> Self {
        Self::term(g, 0, Scalar::one())
    }

    pub fn term(g: usize, d: u32, c: Scalar) -> Self {
        let mut f = Self::zero();
        f.add_term(g, d, c);
        f
    }

    pub fn constant(c: Scalar) -> Self {
        LinearField {
            terms: Vec::new(),
            vac: c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.vac.is_zero()
    }

    pub fn add_term(&mut self, g: usize, d: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|(h, e, _)| (*h, *e).cmp(&(g, d))) {
            Ok(i) => {
                let s = &self.terms[i].2 + &c;
                if s.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].2 = s;
                }
            }
            Err(i) => self.terms.insert(i, (g, d, c)),
        }
    }

    pub fn add(&mut self, other: &LinearField, c: &Scalar) {
        for (g, d, x) in &other.terms {
            self.add_term(*g, *d, x * c);
        }
        self.vac += &(&other.vac * c);
    }

    /// `d^m` applied termwise; the vacuum is killed.
    pub fn derive(&self, m: u32) -> LinearField {
        if m == 0 {
            return self.clone();
        }
        LinearField {
            terms: self.terms.iter().map(|(g, d, c)| (*g, d + m, c.clone())).collect(),
            vac: Scalar::zero(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> LinearField {
        let mut f = LinearField::zero();
        f.add(self, c);
        f
    }
}

/// Zero-mode action of generators on a finite-dimensional module.
#[derive(Clone, Debug)]
pub struct Rep {
    pub name: String,
    pub parities: Vec<u8>,
    /// `action[g][out][in]` for generators acting by their zero mode.
    pub action: BTreeMap<usize, Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug)]
pub struct Algebra {
    pub name: String,
    pub gens: Vec<Generator>,
    /// `table[a][b][j] = a_(j) b`.
    table: Vec<Vec<Vec<LinearField>>>,
    /// Generators spanning the momentum space for lattice states.
    pub heis: Vec<usize>,
    pub reps: Vec<Rep>,
}

/// Collects generators and brackets; the remaining ones are filled by skew-symmetry.
#[derive(Clone, Debug, Default)]
pub struct AlgebraBuilder {
    name: String,
    gens: Vec<Generator>,
    given: BTreeMap<(usize, usize), Vec<LinearField>>,
    heis: Vec<usize>,
    reps: Vec<Rep>,
}

impl AlgebraBuilder {
    pub fn new(name: &str) -> Self {
        AlgebraBuilder {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn gen(&mut self, name: &str, parity: u8, wt2: i64, charge: i32) -> usize {
        self.gens.push(Generator {
            name: name.to_string(),
            parity,
            wt2,
            charge,
        });
        self.gens.len() - 1
    }

    /// Set `a_(j) b` for `j = 0, 1, ...`.
    pub fn set(&mut self, a: usize, b: usize, products: Vec<LinearField>) {
        let mut p = products;
        while p.last().is_some_and(|f| f.is_zero()) {
            p.pop();
        }
        self.given.insert((a, b), p);
    }

    /// Add `c * rhs` to `a_(j) b`.
    pub fn add(&mut self, a: usize, b: usize, j: usize, rhs: &LinearField, c: &Scalar) {
        let e = self.given.entry((a, b)).or_default();
        while e.len() <= j {
            e.push(LinearField::zero());
        }
        e[j].add(rhs, c);
    }

    pub fn heisenberg(&mut self, gens: Vec<usize>) {
        self.heis = gens;
    }

    pub fn rep(&mut self, r: Rep) -> usize {
        self.reps.push(r);
        self.reps.len() - 1
    }

    pub fn build(self) -> Result<Algebra> {
        let n = self.gens.len();
        let mut table = vec![vec![Vec::new(); n]; n];
        for (&(a, b), p) in &self.given {
            let mut p = p.clone();
            while p.last().is_some_and(|f| f.is_zero()) {
                p.pop();
            }
            table[a][b] = p;
        }
        for (&(a, b), _) in &self.given {
            let mirrored = skew(&self.gens, a, b, &table[a][b]);
            if self.given.contains_key(&(b, a)) {
                if mirrored != table[b][a] {
                    return Err(Error::InvalidDatum(format!(
                        "brackets of {} and {} violate skew-symmetry",
                        self.gens[a].name, self.gens[b].name
                    )));
                }
            } else {
                table[b][a] = mirrored;
            }
        }
        let alg = Algebra {
            name: self.name,
            gens: self.gens,
            table,
            heis: self.heis,
            reps: self.reps,
        };
        alg.check_grading()?;
        Ok(alg)
    }
}

/// `b_(n) a = -(-1)^{|a||b|} sum_{j >= n} (-1)^j d^{j-n}/(j-n)! (a_(j) b)`.
fn skew(gens: &[Generator], a: usize, b: usize, ab: &[LinearField]) -> Vec<LinearField> {
    let sign = if gens[a].parity & gens[b].parity == 1 {
        Scalar::one()
    } else {
        -Scalar::one()
    };
    let mut out = vec![LinearField::zero(); ab.len()];
    for (n, o) in out.iter_mut().enumerate() {
        for (j, f) in ab.iter().enumerate().skip(n) {
            let mut c = &sign / &Scalar::from_q(factorial((j - n) as u32));
            if j % 2 == 1 {
                c = -c;
            }
            o.add(&f.derive((j - n) as u32), &c);
        }
    }
    while out.last().is_some_and(|f| f.is_zero()) {
        out.pop();
    }
    out
}

impl Algebra {
    pub fn n_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_index(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// `a_(j) b` for generators.
    pub fn product(&self, a: usize, b: usize, j: usize) -> Option<&LinearField> {
        self.table[a][b].get(j)
    }

    pub fn products(&self, a: usize, b: usize) -> &[LinearField] {
        &self.table[a][b]
    }

    pub fn parity(&self, g: usize) -> u8 {
        self.gens[g].parity
    }

    /// Pairing `(g | h)` read off the `lambda^1` vacuum coefficient.
    pub fn pairing(&self, g: usize, h: usize) -> Scalar {
        self.product(g, h, 1).map(|f| f.vac.clone()).unwrap_or_else(Scalar::zero)
    }

    /// Pairing of two momentum vectors.
    pub fn momentum_pairing(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        let mut s = Scalar::zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    s += &(&(x * y) * &self.pairing(self.heis[i], self.heis[j]));
                }
            }
        }
        s
    }

    /// Every bracket term must respect weight, parity and charge.
    fn check_grading(&self) -> Result<()> {
        for a in 0..self.n_gens() {
            for b in 0..self.n_gens() {
                for (j, f) in self.table[a][b].iter().enumerate() {
                    let w = self.gens[a].wt2 + self.gens[b].wt2 - 2 * j as i64 - 2;
                    let p = self.gens[a].parity ^ self.gens[b].parity;
                    let ch = self.gens[a].charge + self.gens[b].charge;
                    let bad = |what: &str| {
                        Err(Error::InvalidDatum(format!(
                            "{}_({j}){} is not homogeneous in {what}",
                            self.gens[a].name, self.gens[b].name
                        )))
                    };
                    for (g, d, _) in &f.terms {
                        if self.gens[*g].wt2 + 2 * *d as i64 != w {
                            return bad("weight");
                        }
                        if self.gens[*g].parity != p {
                            return bad("parity");
                        }
                        if self.gens[*g].charge != ch {
                            return bad("charge");
                        }
                    }
                    if !f.vac.is_zero() && (w != 0 || p != 0 || ch != 0) {
                        return bad("the vacuum term");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn engine(&self) -> Engine<'_> {
        Engine::new(self)
    }
}

/// Heisenberg currents with Gram matrix `gram` together with weight-1/2
/// neutral fermions with Gram matrix `fgram`. The currents span the momentum space.
pub fn free_field(
    name: &str,
    bosons: &[&str],
    gram: &[Vec<Scalar>],
    fermions: &[&str],
    fgram: &[Vec<Scalar>],
) -> Result<Algebra> {
    let mut b = AlgebraBuilder::new(name);
    let hs: Vec<usize> = bosons.iter().map(|n| b.gen(n, 0, 2, 0)).collect();
    let fs: Vec<usize> = fermions.iter().map(|n| b.gen(n, 1, 1, 0)).collect();
    for (i, &x) in hs.iter().enumerate() {
        for (j, &y) in hs.iter().enumerate() {
            b.set(x, y, vec![LinearField::zero(), LinearField::constant(gram[i][j].clone())]);
        }
    }
    for (i, &x) in fs.iter().enumerate() {
        for (j, &y) in fs.iter().enumerate() {
            b.set(x, y, vec![LinearField::constant(fgram[i][j].clone())]);
        }
    }
    b.heisenberg(hs);
    b.build()
}
