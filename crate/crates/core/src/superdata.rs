//! Simple Lie superalgebras presented by roots and structure constants,
//! good gradings, restricted root data and the associated bilinear forms.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{parse_rational, q_frac, q_int, Scalar, Q};

pub type QMat = Vec<Vec<Q>>;

/// A basis vector: a Cartan element (zero root) or a root vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElem {
    pub name: String,
    pub root: Vec<i64>,
    pub parity: u8,
}

#[derive(Clone, Debug)]
pub struct SuperRootDatum {
    pub name: String,
    pub rank: usize,
    /// Cartan elements first, then positive roots, then negative roots.
    pub basis: Vec<BasisElem>,
    /// `brackets[a][b]` lists `(c, c^c_{a,b})` with `[e_a, e_b] = sum c^c_{a,b} e_c`.
    pub brackets: Vec<Vec<Vec<(usize, Q)>>>,
    pub form: QMat,
    pub theta: Vec<i64>,
    pub h_dual: Q,
    /// Matrix realization the structure constants were read from, if any.
    pub matrices: Option<Vec<QMat>>,
}

fn qzero(n: usize, m: usize) -> QMat {
    vec![vec![Q::zero(); m]; n]
}

fn qmul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let m = b[0].len();
    let mut c = qzero(n, m);
    for i in 0..n {
        for (l, x) in a[i].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    c[i][j] += x * &b[l][j];
                }
            }
        }
    }
    c
}

fn supercomm(a: &QMat, pa: u8, b: &QMat, pb: u8) -> QMat {
    let ab = qmul(a, b);
    let ba = qmul(b, a);
    let sign = if pa & pb == 1 { Q::one() } else { -Q::one() };
    ab.iter()
        .zip(ba.iter())
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + &sign * y).collect())
        .collect()
}

fn supertrace(a: &QMat, vpar: &[u8]) -> Q {
    let mut s = Q::zero();
    for (i, p) in vpar.iter().enumerate() {
        if *p == 0 {
            s += &a[i][i];
        } else {
            s -= &a[i][i];
        }
    }
    s
}

fn is_zero_mat(a: &QMat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

fn height(root: &[i64]) -> i64 {
    root.iter().sum()
}

fn is_positive(root: &[i64]) -> bool {
    root.iter().any(|&c| c != 0) && root.iter().all(|&c| c >= 0)
}

impl SuperRootDatum {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn parity(&self, a: usize) -> u8 {
        self.basis[a].parity
    }

    pub fn is_cartan(&self, a: usize) -> bool {
        a < self.rank
    }

    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, Q)] {
        &self.brackets[a][b]
    }

    /// Coefficient of `e_c` in `[e_a, e_b]`.
    pub fn sc(&self, a: usize, b: usize, c: usize) -> Q {
        self.brackets[a][b]
            .iter()
            .find(|(i, _)| *i == c)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn index_of_root(&self, root: &[i64]) -> Option<usize> {
        if root.iter().all(|&c| c == 0) {
            return None;
        }
        self.basis.iter().position(|b| b.root == root)
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn simple_root_index(&self, i: usize) -> usize {
        let mut r = vec![0; self.rank];
        r[i] = 1;
        self.index_of_root(&r).expect("simple root vector")
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rank..self.dim()
    }

    pub fn positive_roots(&self) -> Vec<usize> {
        self.roots().filter(|&a| is_positive(&self.basis[a].root)).collect()
    }

    /// Dense bracket of two general elements.
    pub fn bracket_vec(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (a, x) in u.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in v.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (c, s) in &self.brackets[a][b] {
                    out[*c] += &xy * s;
                }
            }
        }
        out
    }

    pub fn form_vec(&self, u: &[Q], v: &[Q]) -> Q {
        let mut s = Q::zero();
        for (a, x) in u.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in v.iter().enumerate() {
                if !y.is_zero() && !self.form[a][b].is_zero() {
                    s += x * y * &self.form[a][b];
                }
            }
        }
        s
    }

    pub fn unit(&self, a: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[a] = Q::one();
        v
    }

    /// `(ad e_a)` as a matrix acting on coordinate columns.
    pub fn ad(&self, a: usize) -> QMat {
        let n = self.dim();
        let mut m = qzero(n, n);
        for b in 0..n {
            for (c, x) in &self.brackets[a][b] {
                m[*c][b] = x.clone();
            }
        }
        m
    }

    pub fn ad_vec(&self, u: &[Q]) -> QMat {
        let n = self.dim();
        let mut m = qzero(n, n);
        for (a, x) in u.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for b in 0..n {
                for (c, y) in &self.brackets[a][b] {
                    m[*c][b] += x * y;
                }
            }
        }
        m
    }

    /// Supertrace of an endomorphism of the adjoint representation.
    pub fn str_adjoint(&self, m: &QMat) -> Q {
        let par: Vec<u8> = self.basis.iter().map(|b| b.parity).collect();
        supertrace(m, &par)
    }

    pub fn killing(&self, a: usize, b: usize) -> Q {
        self.str_adjoint(&qmul(&self.ad(a), &self.ad(b)))
    }

    /// Value `alpha(h_i)` of a root (given by coordinates) on the Cartan basis.
    pub fn root_on_cartan(&self, root: &[i64]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.rank];
        for (s, &c) in root.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = self.simple_root_index(s);
            for (i, o) in out.iter_mut().enumerate() {
                *o += q_int(c) * self.sc(i, e, e);
            }
        }
        out
    }

    fn cartan_gram_inv(&self) -> Result<QMat> {
        let r = self.rank;
        let g: linalg::Matrix = (0..r)
            .map(|i| (0..r).map(|j| Scalar::from_q(self.form[i][j].clone())).collect())
            .collect();
        let mut inv = qzero(r, r);
        for j in 0..r {
            let mut e = vec![Scalar::zero(); r];
            e[j] = Scalar::one();
            let x = linalg::solve(&g, &e, r).ok_or(Error::DegenerateForm)?;
            for i in 0..r {
                inv[i][j] = x[i].as_q().expect("constant");
            }
        }
        Ok(inv)
    }

    /// The element `t_alpha` of the Cartan with `(t_alpha | h) = alpha(h)`, in Cartan coordinates.
    pub fn coroot_dual(&self, root: &[i64]) -> Vec<Q> {
        let inv = self.cartan_gram_inv().expect("nondegenerate Cartan form");
        let v = self.root_on_cartan(root);
        (0..self.rank)
            .map(|i| {
                let mut s = Q::zero();
                for j in 0..self.rank {
                    s += &inv[i][j] * &v[j];
                }
                s
            })
            .collect()
    }

    /// Induced form on roots.
    pub fn root_pairing(&self, a: &[i64], b: &[i64]) -> Q {
        let t = self.coroot_dual(a);
        let v = self.root_on_cartan(b);
        t.iter().zip(&v).map(|(x, y)| x * y).sum()
    }

    pub fn check_form_invariance(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut lhs = Q::zero();
                    for (d, x) in &self.brackets[a][b] {
                        lhs += x * &self.form[*d][c];
                    }
                    let mut rhs = Q::zero();
                    for (d, x) in &self.brackets[b][c] {
                        rhs += x * &self.form[a][*d];
                    }
                    if lhs != rhs {
                        return Err(format!(
                            "invariance fails on ({}, {}, {})",
                            self.basis[a].name, self.basis[b].name, self.basis[c].name
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_form_supersymmetric(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                let x = &self.form[a][b];
                if !x.is_zero() && self.parity(a) != self.parity(b) {
                    return Err("form is not even".into());
                }
                let s = if self.parity(a) & self.parity(b) == 1 {
                    -self.form[b][a].clone()
                } else {
                    self.form[b][a].clone()
                };
                if *x != s {
                    return Err(format!(
                        "form not supersymmetric on ({}, {})",
                        self.basis[a].name, self.basis[b].name
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn check_antisymmetry(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                let sign = if self.parity(a) & self.parity(b) == 1 {
                    Q::one()
                } else {
                    -Q::one()
                };
                for c in 0..n {
                    if self.sc(a, b, c) != &sign * &self.sc(b, a, c) {
                        return Err(format!(
                            "antisymmetry fails on ({}, {})",
                            self.basis[a].name, self.basis[b].name
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `[a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]` on all basis triples.
    pub fn check_jacobi(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        let apply = |x: &[(usize, Q)], c: usize, left: bool| -> Vec<Q> {
            let mut out = vec![Q::zero(); n];
            for (d, s) in x {
                let br = if left { &self.brackets[*d][c] } else { &self.brackets[c][*d] };
                for (e, t) in br {
                    out[*e] += s * t;
                }
            }
            out
        };
        for a in 0..n {
            for b in 0..n {
                let sign = if self.parity(a) & self.parity(b) == 1 {
                    -Q::one()
                } else {
                    Q::one()
                };
                for c in 0..n {
                    let lhs = apply(&self.brackets[b][c], a, false);
                    let t1 = apply(&self.brackets[a][b], c, true);
                    let t2 = apply(&self.brackets[a][c], b, false);
                    for i in 0..n {
                        if lhs[i] != &t1[i] + &sign * &t2[i] {
                            return Err(format!(
                                "Jacobi fails on ({}, {}, {})",
                                self.basis[a].name, self.basis[b].name, self.basis[c].name
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn theta_norm(&self) -> Q {
        self.root_pairing(&self.theta, &self.theta)
    }

    /// All structural invariants at once.
    pub fn validate(&self) -> std::result::Result<(), String> {
        self.check_antisymmetry()?;
        self.check_jacobi()?;
        self.check_form_supersymmetric()?;
        self.check_form_invariance()?;
        if self.theta_norm() != q_int(2) {
            return Err(format!("(theta|theta) = {}", self.theta_norm()));
        }
        Ok(())
    }

    fn even_theta(basis: &[BasisElem]) -> Result<Vec<i64>> {
        basis
            .iter()
            .filter(|b| b.parity == 0 && is_positive(&b.root))
            .max_by(|a, b| {
                height(&a.root)
                    .cmp(&height(&b.root))
                    .then_with(|| b.root.cmp(&a.root))
            })
            .map(|b| b.root.clone())
            .ok_or_else(|| Error::InvalidDatum("no even positive root".into()))
    }

    /// Rescale the form so that `(theta|theta) = 2` and derive `h^vee`.
    fn finish(mut self) -> Result<Self> {
        self.theta = Self::even_theta(&self.basis)?;
        let tn = self.theta_norm();
        if tn.is_zero() {
            return Err(Error::InvalidDatum("theta is isotropic".into()));
        }
        let s = &tn / q_int(2);
        for r in self.form.iter_mut() {
            for x in r.iter_mut() {
                *x = &*x * &s;
            }
        }
        self.h_dual = self.compute_h_dual()?;
        Ok(self)
    }

    fn compute_h_dual(&self) -> Result<Q> {
        let n = self.dim();
        let even: Vec<usize> = (0..n).filter(|&a| self.parity(a) == 0).collect();
        let ads: Vec<QMat> = (0..n).map(|a| self.ad(a)).collect();
        let mut ratio: Option<Q> = None;
        for &a in &even {
            for &b in &even {
                let k = self.str_adjoint(&qmul(&ads[a], &ads[b]));
                let f = &self.form[a][b];
                if f.is_zero() {
                    if !k.is_zero() {
                        return Err(Error::InvalidDatum("Killing form not proportional".into()));
                    }
                    continue;
                }
                let r = k / f;
                match &ratio {
                    None => ratio = Some(r),
                    Some(x) if *x == r => {}
                    Some(_) => {
                        return Err(Error::InvalidDatum("Killing form not proportional".into()))
                    }
                }
            }
        }
        Ok(ratio.unwrap_or_else(Q::zero) / q_int(2))
    }

    fn from_matrices(
        name: String,
        rank: usize,
        basis: Vec<BasisElem>,
        mats: Vec<QMat>,
        vpar: &[u8],
    ) -> Result<Self> {
        let n = basis.len();
        let cartan_rows: linalg::Matrix = {
            let d = vpar.len();
            let mut rows = Vec::new();
            for p in 0..d {
                for q in 0..d {
                    rows.push((0..rank).map(|i| Scalar::from_q(mats[i][p][q].clone())).collect());
                }
            }
            rows
        };
        let mut brackets = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let m = supercomm(&mats[a], basis[a].parity, &mats[b], basis[b].parity);
                if is_zero_mat(&m) {
                    continue;
                }
                let root: Vec<i64> = basis[a].root.iter().zip(&basis[b].root).map(|(x, y)| x + y).collect();
                let mut terms = Vec::new();
                if root.iter().all(|&c| c == 0) {
                    let rhs: Vec<Scalar> = m.iter().flatten().map(|x| Scalar::from_q(x.clone())).collect();
                    let x = linalg::solve(&cartan_rows, &rhs, rank)
                        .ok_or_else(|| Error::InvalidDatum("bracket leaves the Cartan".into()))?;
                    for (i, xi) in x.iter().enumerate() {
                        if !xi.is_zero() {
                            terms.push((i, xi.as_q().expect("constant")));
                        }
                    }
                } else {
                    let c = basis
                        .iter()
                        .position(|e| e.root == root)
                        .ok_or_else(|| Error::InvalidDatum("bracket not closed".into()))?;
                    let (p, q) = first_nonzero(&mats[c]);
                    let coef = &m[p][q] / &mats[c][p][q];
                    let check: QMat = mats[c]
                        .iter()
                        .map(|r| r.iter().map(|x| x * &coef).collect())
                        .collect();
                    if check != m {
                        return Err(Error::InvalidDatum("root space not one-dimensional".into()));
                    }
                    terms.push((c, coef));
                }
                brackets[a][b] = terms;
            }
        }
        let mut form = qzero(n, n);
        for a in 0..n {
            for b in 0..n {
                form[a][b] = supertrace(&qmul(&mats[a], &mats[b]), vpar);
            }
        }
        SuperRootDatum {
            name,
            rank,
            basis,
            brackets,
            form,
            theta: Vec::new(),
            h_dual: Q::zero(),
            matrices: Some(mats),
        }
        .finish()
    }
}

fn first_nonzero(m: &QMat) -> (usize, usize) {
    for (i, r) in m.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            if !x.is_zero() {
                return (i, j);
            }
        }
    }
    panic!("zero basis matrix")
}

fn root_name(prefix: char, root: &[i64]) -> String {
    let body: Vec<String> = root.iter().map(|c| c.to_string()).collect();
    format!("{prefix}[{}]", body.join(","))
}

/// Order root vectors: positive by height then coordinates, then their negatives.
fn order_roots(mut pos: Vec<(Vec<i64>, u8, QMat)>, neg: BTreeMap<Vec<i64>, (u8, QMat)>) -> Vec<(Vec<i64>, u8, QMat)> {
    pos.sort_by(|a, b| height(&a.0).cmp(&height(&b.0)).then_with(|| b.0.cmp(&a.0)));
    let mut negs = Vec::new();
    for (r, _, _) in &pos {
        let nr: Vec<i64> = r.iter().map(|c| -c).collect();
        let (p, m) = neg.get(&nr).expect("negative root").clone();
        negs.push((nr, p, m));
    }
    pos.extend(negs);
    pos
}

/// `sl_n` in its defining representation with the trace form.
pub fn build_sl(n: usize) -> Result<SuperRootDatum> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("sl_n needs n >= 2, got {n}")));
    }
    let unit = |i: usize, j: usize| {
        let mut m = qzero(n, n);
        m[i][j] = Q::one();
        m
    };
    let mut basis = Vec::new();
    let mut mats = Vec::new();
    for i in 0..n - 1 {
        let mut m = unit(i, i);
        m[i + 1][i + 1] = -Q::one();
        basis.push(BasisElem {
            name: format!("h{}", i + 1),
            root: vec![0; n - 1],
            parity: 0,
        });
        mats.push(m);
    }
    // e_{ij} has root eps_i - eps_j, coordinates c_l = [i <= l < j] - [j <= l < i]
    let coords = |i: usize, j: usize| -> Vec<i64> {
        (0..n - 1)
            .map(|l| {
                let a = (i <= l && l < j) as i64;
                let b = (j <= l && l < i) as i64;
                a - b
            })
            .collect()
    };
    let mut pos = Vec::new();
    let mut neg = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = coords(i, j);
            if i < j {
                pos.push((r, 0u8, unit(i, j)));
            } else {
                neg.insert(r, (0u8, unit(i, j)));
            }
        }
    }
    for (r, p, m) in order_roots(pos, neg) {
        let (i, j) = first_nonzero(&m);
        basis.push(BasisElem {
            name: if n < 10 {
                format!("E{}{}", i + 1, j + 1)
            } else {
                format!("E{}_{}", i + 1, j + 1)
            },
            root: r,
            parity: p,
        });
        mats.push(m);
    }
    SuperRootDatum::from_matrices(format!("sl{n}"), n - 1, basis, mats, &vec![0; n])
}

/// `osp(1|2n)` in the `(1|2n)` supermatrix model.
pub fn build_osp(n: usize) -> Result<SuperRootDatum> {
    if n < 1 {
        return Err(Error::InvalidArgument("osp(1|2n) needs n >= 1".into()));
    }
    let d = 2 * n + 1;
    let vpar: Vec<u8> = (0..d).map(|i| (i > 0) as u8).collect();
    let mut form_b = qzero(d, d);
    form_b[0][0] = Q::one();
    for i in 1..=n {
        form_b[i][n + i] = Q::one();
        form_b[n + i][i] = -Q::one();
    }
    let eps = |a: usize| -> Vec<i64> {
        let mut w = vec![0i64; n];
        if a >= 1 && a <= n {
            w[a - 1] = 1;
        } else if a > n {
            w[a - n - 1] = -1;
        }
        w
    };
    // group elementary matrices by eps-weight
    let mut spaces: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
    for a in 0..d {
        for b in 0..d {
            let w: Vec<i64> = eps(a).iter().zip(eps(b)).map(|(x, y)| x - y).collect();
            spaces.entry(w).or_default().push((a, b));
        }
    }
    let in_osp = |x: &QMat, px: u8| -> bool {
        let xt_b = {
            let mut m = qzero(d, d);
            for b in 0..d {
                for c in 0..d {
                    for a in 0..d {
                        m[b][c] += &x[a][b] * &form_b[a][c];
                    }
                }
            }
            m
        };
        let bx = qmul(&form_b, x);
        (0..d).all(|b| {
            (0..d).all(|c| {
                let s = if px & vpar[b] == 1 { -Q::one() } else { Q::one() };
                (&xt_b[b][c] + &s * &bx[b][c]).is_zero()
            })
        })
    };
    let mut basis = Vec::new();
    let mut mats = Vec::new();
    for i in 1..=n {
        let mut m = qzero(d, d);
        m[i][i] = Q::one();
        m[n + i][n + i] = -Q::one();
        debug_assert!(in_osp(&m, 0));
        basis.push(BasisElem {
            name: format!("h{i}"),
            root: vec![0; n],
            parity: 0,
        });
        mats.push(m);
    }
    let mut pos = Vec::new();
    let mut neg = BTreeMap::new();
    for (w, cells) in &spaces {
        if w.iter().all(|&c| c == 0) {
            continue;
        }
        let (a0, b0) = cells[0];
        let px = ((vpar[a0] + vpar[b0]) % 2) as u8;
        // linear conditions on the coefficients of the elementary matrices
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let cols: Vec<QMat> = cells
            .iter()
            .map(|&(a, b)| {
                let mut m = qzero(d, d);
                m[a][b] = Q::one();
                m
            })
            .collect();
        for b in 0..d {
            for c in 0..d {
                let s = if px & vpar[b] == 1 { -Q::one() } else { Q::one() };
                let row: Vec<Scalar> = cols
                    .iter()
                    .map(|x| {
                        let mut v = Q::zero();
                        for a in 0..d {
                            v += &x[a][b] * &form_b[a][c];
                            v += &s * &form_b[b][a] * &x[a][c];
                        }
                        Scalar::from_q(v)
                    })
                    .collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        let ns = linalg::nullspace(&rows, cells.len());
        if ns.basis.is_empty() {
            continue;
        }
        if ns.basis.len() != 1 {
            return Err(Error::InvalidDatum("osp root space not one-dimensional".into()));
        }
        let v = &ns.basis[0];
        let lead = v.iter().find(|x| !x.is_zero()).unwrap().inv();
        let mut m = qzero(d, d);
        for (x, &(a, b)) in v.iter().zip(cells) {
            m[a][b] = (x * &lead).as_q().expect("constant");
        }
        debug_assert!(in_osp(&m, px));
        let mut coords = vec![0i64; n];
        let mut acc = 0;
        for j in 0..n {
            acc += w[j];
            coords[j] = acc;
        }
        if is_positive(&coords) {
            pos.push((coords, px, m));
        } else {
            neg.insert(coords, (px, m));
        }
    }
    for (r, p, m) in order_roots(pos, neg) {
        let prefix = if is_positive(&r) { 'e' } else { 'f' };
        let abs: Vec<i64> = r.iter().map(|c| c.abs()).collect();
        basis.push(BasisElem {
            name: root_name(prefix, &abs),
            root: r,
            parity: p,
        });
        mats.push(m);
    }
    SuperRootDatum::from_matrices(format!("osp1|{}", 2 * n), n, basis, mats, &vpar)
}

/// External file format for a datum given by structure constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumFile {
    pub name: String,
    pub rank: usize,
    pub cartan: Vec<String>,
    /// Root vectors with coordinates in the simple-root basis and a parity bit.
    pub roots: Vec<BasisElem>,
    /// Entries `[a, b, c, "p/q"]` meaning `[e_a, e_b]` has coefficient `p/q` on `e_c`.
    pub structure_constants: Vec<[String; 4]>,
    /// Invariant form over the basis `cartan ++ roots`, entries `"p/q"`.
    pub form: Vec<Vec<String>>,
    /// Doubled degrees of the simple roots.
    #[serde(default)]
    pub grading_labels: Option<Vec<i64>>,
    /// Negative roots whose root vectors sum to `f`.
    #[serde(default)]
    pub f_support: Option<Vec<Vec<i64>>>,
}

impl SuperRootDatum {
    pub fn to_file(&self) -> DatumFile {
        let n = self.dim();
        let mut sc = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for (c, x) in &self.brackets[a][b] {
                    sc.push([
                        self.basis[a].name.clone(),
                        self.basis[b].name.clone(),
                        self.basis[*c].name.clone(),
                        x.to_string(),
                    ]);
                }
            }
        }
        DatumFile {
            name: self.name.clone(),
            rank: self.rank,
            cartan: self.basis[..self.rank].iter().map(|b| b.name.clone()).collect(),
            roots: self.basis[self.rank..].to_vec(),
            structure_constants: sc,
            form: self
                .form
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
            grading_labels: None,
            f_support: None,
        }
    }

    /// Load and validate a datum from its table description.
    pub fn from_file(f: &DatumFile) -> Result<Self> {
        let bad = |s: String| Error::InvalidDatum(s);
        if f.cartan.len() != f.rank {
            return Err(bad("cartan size differs from rank".into()));
        }
        let mut basis: Vec<BasisElem> = f
            .cartan
            .iter()
            .map(|nm| BasisElem {
                name: nm.clone(),
                root: vec![0; f.rank],
                parity: 0,
            })
            .collect();
        for r in &f.roots {
            if r.root.len() != f.rank || r.parity > 1 || r.root.iter().all(|&c| c == 0) {
                return Err(bad(format!("bad root entry {}", r.name)));
            }
            basis.push(r.clone());
        }
        let n = basis.len();
        let names: BTreeMap<&str, usize> = basis.iter().enumerate().map(|(i, b)| (b.name.as_str(), i)).collect();
        if names.len() != n {
            return Err(bad("duplicate basis names".into()));
        }
        for s in 0..f.rank {
            let mut r = vec![0; f.rank];
            r[s] = 1;
            if !basis.iter().any(|b| b.root == r) {
                return Err(bad(format!("missing simple root {s}")));
            }
        }
        let mut table: BTreeMap<(usize, usize), BTreeMap<usize, Q>> = BTreeMap::new();
        for [a, b, c, v] in &f.structure_constants {
            let get = |x: &String| names.get(x.as_str()).copied().ok_or_else(|| bad(format!("unknown basis element {x}")));
            let (a, b, c) = (get(a)?, get(b)?, get(c)?);
            let v = parse_rational(v).map_err(bad)?;
            let prev = table.entry((a, b)).or_default().insert(c, v.clone());
            if prev.is_some_and(|p| p != v) {
                return Err(bad("conflicting structure constants".into()));
            }
        }
        // fill the reversed pairs by super-antisymmetry
        let keys: Vec<(usize, usize)> = table.keys().cloned().collect();
        for (a, b) in keys {
            let sign = if basis[a].parity & basis[b].parity == 1 { Q::one() } else { -Q::one() };
            let entries = table[&(a, b)].clone();
            let rev = table.entry((b, a)).or_default();
            for (c, v) in entries {
                let want = &sign * &v;
                match rev.get(&c) {
                    None => {
                        rev.insert(c, want);
                    }
                    Some(x) if *x == want => {}
                    Some(_) => return Err(bad("table violates super-antisymmetry".into())),
                }
            }
        }
        let mut brackets = vec![vec![Vec::new(); n]; n];
        for ((a, b), m) in table {
            brackets[a][b] = m.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        if f.form.len() != n || f.form.iter().any(|r| r.len() != n) {
            return Err(bad("form has wrong shape".into()));
        }
        let form = f
            .form
            .iter()
            .map(|r| r.iter().map(|x| parse_rational(x).map_err(bad)).collect::<Result<Vec<Q>>>())
            .collect::<Result<QMat>>()?;
        let d = SuperRootDatum {
            name: f.name.clone(),
            rank: f.rank,
            basis,
            brackets,
            form,
            theta: Vec::new(),
            h_dual: Q::zero(),
            matrices: None,
        };
        d.check_antisymmetry().map_err(bad)?;
        d.check_jacobi().map_err(bad)?;
        d.check_form_supersymmetric().map_err(bad)?;
        d.check_form_invariance().map_err(bad)?;
        let d = d.finish()?;
        d.validate().map_err(bad)?;
        Ok(d)
    }
}

/// A good `1/2 Z`-grading with nilpotent `f` in degree `-1`.
#[derive(Clone, Debug)]
pub struct GoodGrading {
    pub datum: Arc<SuperRootDatum>,
    /// Doubled degrees of the simple roots.
    pub labels2: Vec<i64>,
    /// Doubled degree of every basis element.
    pub deg2: Vec<i64>,
    /// `f` as a sparse combination of negative root vectors.
    pub f: Vec<(usize, Q)>,
    /// Grading element in Cartan coordinates.
    pub x: Vec<Q>,
}

pub fn good_grading(datum: Arc<SuperRootDatum>, labels2: &[i64], f_support: &[Vec<i64>]) -> Result<GoodGrading> {
    let d = &datum;
    if labels2.len() != d.rank {
        return Err(Error::InvalidArgument(format!(
            "expected {} labels, got {}",
            d.rank,
            labels2.len()
        )));
    }
    if let Some(l) = labels2.iter().find(|&&l| !(0..=2).contains(&l)) {
        return Err(Error::NotGoodGrading(format!("simple root label {l}/2 outside {{0, 1/2, 1}}")));
    }
    let deg2: Vec<i64> = d
        .basis
        .iter()
        .map(|b| b.root.iter().zip(labels2).map(|(c, l)| c * l).sum())
        .collect();
    if f_support.is_empty() {
        return Err(Error::InvalidArgument("empty f support".into()));
    }
    let mut f = Vec::new();
    let mut degs = BTreeSet::new();
    for r in f_support {
        let i = d
            .index_of_root(r)
            .ok_or_else(|| Error::InvalidArgument(format!("{r:?} is not a root")))?;
        if is_positive(r) {
            return Err(Error::InvalidArgument(format!("{r:?} is not a negative root")));
        }
        if d.parity(i) != 0 {
            return Err(Error::InvalidArgument(format!("{r:?} is an odd root")));
        }
        degs.insert(deg2[i]);
        f.push((i, Q::one()));
    }
    f.sort();
    if degs.len() > 1 {
        return Err(Error::DegreeMismatch(format!("f-support doubled degrees {degs:?}")));
    }
    let fd = *degs.iter().next().unwrap();
    if fd != -2 {
        return Err(Error::NotGoodGrading(format!("f has degree {}/2, not -1", fd)));
    }
    // x with alpha_s(x) = labels2[s] / 2
    let rows: linalg::Matrix = (0..d.rank)
        .map(|s| {
            let e = d.simple_root_index(s);
            (0..d.rank).map(|i| Scalar::from_q(d.sc(i, e, e))).collect()
        })
        .collect();
    let rhs: Vec<Scalar> = labels2.iter().map(|&l| Scalar::from_frac(l, 2)).collect();
    let x = linalg::solve(&rows, &rhs, d.rank)
        .ok_or_else(|| Error::InvalidDatum("Cartan pairing singular".into()))?
        .into_iter()
        .map(|s| s.as_q().unwrap())
        .collect();
    let g = GoodGrading {
        datum: datum.clone(),
        labels2: labels2.to_vec(),
        deg2,
        f,
        x,
    };
    g.check_ad_f()?;
    Ok(g)
}

impl GoodGrading {
    pub fn f_vec(&self) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.datum.dim()];
        for (i, c) in &self.f {
            v[*i] = c.clone();
        }
        v
    }

    pub fn of_degree(&self, d2: i64) -> Vec<usize> {
        (0..self.datum.dim()).filter(|&a| self.deg2[a] == d2).collect()
    }

    pub fn degrees(&self) -> BTreeSet<i64> {
        self.deg2.iter().cloned().collect()
    }

    /// Matrix of `ad f : g_j -> g_{j-1}` with `j = d2/2`.
    pub fn ad_f_block(&self, d2: i64) -> linalg::Matrix {
        let src = self.of_degree(d2);
        let dst = self.of_degree(d2 - 2);
        let adf = self.datum.ad_vec(&self.f_vec());
        dst.iter()
            .map(|&r| src.iter().map(|&c| Scalar::from_q(adf[r][c].clone())).collect())
            .collect()
    }

    fn check_ad_f(&self) -> Result<()> {
        for &d2 in &self.degrees() {
            let src = self.of_degree(d2).len();
            let dst = self.of_degree(d2 - 2).len();
            let r = if src == 0 || dst == 0 { 0 } else { linalg::rank(&self.ad_f_block(d2), src) };
            if d2 >= 1 && r != src {
                return Err(Error::NotGoodGrading(format!("ad f not injective on g_{d2}/2")));
            }
            if d2 <= 1 && r != dst {
                return Err(Error::NotGoodGrading(format!("ad f not surjective from g_{d2}/2")));
            }
        }
        // surjectivity onto degrees whose preimage degree is absent
        for &d2 in &self.degrees() {
            if d2 + 2 <= 1 && self.of_degree(d2 + 2).is_empty() && !self.of_degree(d2).is_empty() {
                return Err(Error::NotGoodGrading(format!("g_{}/2 not in the image of ad f", d2)));
            }
        }
        Ok(())
    }

    /// `g^f` split by (doubled degree, parity) with a basis of each piece.
    pub fn centralizer_f(&self) -> Vec<(i64, u8, Vec<Vec<Q>>)> {
        let d = &self.datum;
        let adf = d.ad_vec(&self.f_vec());
        let mut out = Vec::new();
        for &d2 in &self.degrees() {
            for p in 0..2u8 {
                let src: Vec<usize> = self.of_degree(d2).into_iter().filter(|&a| d.parity(a) == p).collect();
                if src.is_empty() {
                    continue;
                }
                let dst = self.of_degree(d2 - 2);
                let m: linalg::Matrix = dst
                    .iter()
                    .map(|&r| src.iter().map(|&c| Scalar::from_q(adf[r][c].clone())).collect())
                    .collect();
                let ns = linalg::nullspace(&m, src.len());
                if ns.basis.is_empty() {
                    continue;
                }
                let vecs = ns
                    .basis
                    .iter()
                    .map(|v| {
                        let mut full = vec![Q::zero(); d.dim()];
                        for (x, &a) in v.iter().zip(&src) {
                            full[a] = x.as_q().unwrap();
                        }
                        full
                    })
                    .collect();
                out.push((d2, p, vecs));
            }
        }
        out
    }

    /// Simple roots of degree 0.
    pub fn pi0(&self) -> Vec<usize> {
        (0..self.datum.rank).filter(|&s| self.labels2[s] == 0).collect()
    }

    /// True when `g_0` is the Cartan subalgebra.
    pub fn zero_part_is_cartan(&self) -> bool {
        self.of_degree(0).iter().all(|&a| self.datum.is_cartan(a))
    }
}

/// Indecomposable positive restricted roots and their classes modulo `Q_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedBase {
    pub pi_half: Vec<usize>,
    pub split_half: Vec<usize>,
    pub split_one: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

/// Indecomposable members of a finite set of root vectors (set semantics).
pub fn indecomposables(roots: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    let set: BTreeSet<&Vec<i64>> = roots.iter().collect();
    let mut sums = BTreeSet::new();
    for a in &set {
        for b in &set {
            sums.insert(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect::<Vec<i64>>());
        }
    }
    set.into_iter().filter(|r| !sums.contains(*r)).cloned().collect()
}

pub fn restricted_base(g: &GoodGrading) -> RestrictedBase {
    let d = &g.datum;
    let pos: Vec<usize> = d.positive_roots().into_iter().filter(|&a| g.deg2[a] > 0).collect();
    let roots: Vec<Vec<i64>> = pos.iter().map(|&a| d.basis[a].root.clone()).collect();
    let ind = indecomposables(&roots);
    let pi_half: Vec<usize> = pos.into_iter().filter(|&a| ind.contains(&d.basis[a].root)).collect();
    let split_half = pi_half.iter().copied().filter(|&a| g.deg2[a] == 1).collect();
    let split_one = pi_half.iter().copied().filter(|&a| g.deg2[a] == 2).collect();
    let pi0: BTreeSet<usize> = g.pi0().into_iter().collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &a in &pi_half {
        let ra = &d.basis[a].root;
        let same = |b: usize| {
            d.basis[b]
                .root
                .iter()
                .zip(ra)
                .enumerate()
                .all(|(s, (x, y))| x == y || pi0.contains(&s))
        };
        match classes.iter_mut().find(|c| same(c[0])) {
            Some(c) => c.push(a),
            None => classes.push(vec![a]),
        }
    }
    RestrictedBase {
        pi_half,
        split_half,
        split_one,
        classes,
    }
}

/// The level-dependent form together with its ingredients.
#[derive(Clone, Debug)]
pub struct LevelForm {
    pub tau: Vec<Vec<Scalar>>,
    pub killing_g: QMat,
    pub killing_g0: QMat,
    pub h_dual: Q,
}

pub fn tau_form(g: &GoodGrading) -> LevelForm {
    let d = &g.datum;
    let n = d.dim();
    let ads: Vec<QMat> = (0..n).map(|a| d.ad(a)).collect();
    let g0 = g.of_degree(0);
    let mut kg = qzero(n, n);
    let mut k0 = qzero(n, n);
    for a in 0..n {
        for b in 0..n {
            let m = qmul(&ads[a], &ads[b]);
            kg[a][b] = d.str_adjoint(&m);
            if g.deg2[a] == 0 && g.deg2[b] == 0 {
                let mut s = Q::zero();
                for &c in &g0 {
                    if d.parity(c) == 0 {
                        s += &m[c][c];
                    } else {
                        s -= &m[c][c];
                    }
                }
                k0[a][b] = s;
            }
        }
    }
    let k = Scalar::k();
    let half = q_frac(1, 2);
    let tau = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let c = &half * (&kg[a][b] - &k0[a][b]);
                    &(&k * &Scalar::from_q(d.form[a][b].clone())) + &Scalar::from_q(c)
                })
                .collect()
        })
        .collect();
    LevelForm {
        tau,
        killing_g: kg,
        killing_g0: k0,
        h_dual: d.h_dual.clone(),
    }
}

/// `chi(u) = (f|u)` on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiFunctional {
    pub values: Vec<Q>,
}

pub fn chi(g: &GoodGrading) -> ChiFunctional {
    let d = &g.datum;
    let f = g.f_vec();
    ChiFunctional {
        values: (0..d.dim()).map(|a| d.form_vec(&f, &d.unit(a))).collect(),
    }
}

impl ChiFunctional {
    pub fn eval(&self, u: &[Q]) -> Q {
        u.iter().zip(&self.values).map(|(a, b)| a * b).sum()
    }
}

/// Projection onto `g_{>0}` as a 0/1 diagonal.
fn p_plus(g: &GoodGrading) -> Vec<bool> {
    g.deg2.iter().map(|&d| d > 0).collect()
}

/// `a_k(v|w) = str((ad v) p_+ (ad w)) + k (v|w)`.
pub fn a_k(g: &GoodGrading, v: usize, w: usize) -> Scalar {
    let d = &g.datum;
    let (av, aw) = (d.ad(v), d.ad(w));
    let pp = p_plus(g);
    let mut s = Q::zero();
    for b in 0..d.dim() {
        let mut t = Q::zero();
        for c in 0..d.dim() {
            if pp[c] {
                t += &av[b][c] * &aw[c][b];
            }
        }
        if d.parity(b) == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    &(&Scalar::k() * &Scalar::from_q(d.form[v][w].clone())) + &Scalar::from_q(s)
}

/// `b_k(v|w) = str(p_+ (ad v)(ad w)) + k (v|w)`.
pub fn b_k(g: &GoodGrading, v: usize, w: usize) -> Scalar {
    let d = &g.datum;
    let m = qmul(&d.ad(v), &d.ad(w));
    let pp = p_plus(g);
    let mut s = Q::zero();
    for b in 0..d.dim() {
        if pp[b] {
            if d.parity(b) == 0 {
                s += &m[b][b];
            } else {
                s -= &m[b][b];
            }
        }
    }
    &(&Scalar::k() * &Scalar::from_q(d.form[v][w].clone())) + &Scalar::from_q(s)
}

/// Named algebra together with a grading and nilpotent.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub grading: GoodGrading,
}

fn parse_suffix(s: &str, prefix: &str) -> Option<usize> {
    s.strip_prefix(prefix)?.parse().ok()
}

/// Resolve `sl{n}-regular`, `sl{n}-subregular` and `osp1_{2n}-regular`.
pub fn preset(name: &str) -> Result<Preset> {
    let unknown = || Error::InvalidArgument(format!("unknown preset `{name}`"));
    let (alg, kind) = name.split_once('-').ok_or_else(unknown)?;
    let (datum, labels, support) = if let Some(n) = parse_suffix(alg, "sl") {
        let d = build_sl(n)?;
        let r = n - 1;
        let simple = |i: usize| {
            let mut v = vec![0i64; r];
            v[i] = -1;
            v
        };
        match kind {
            "regular" => (d, vec![2; r], (0..r).map(simple).collect::<Vec<_>>()),
            "subregular" if n >= 3 => {
                let mut l = vec![2; r];
                l[0] = 0;
                (d, l, (1..r).map(simple).collect())
            }
            _ => return Err(unknown()),
        }
    } else if let Some(m) = parse_suffix(alg, "osp1_") {
        if m == 0 || m % 2 == 1 || kind != "regular" {
            return Err(unknown());
        }
        let n = m / 2;
        let d = build_osp(n)?;
        let mut labels = vec![2; n];
        labels[n - 1] = 1;
        let mut sup: Vec<Vec<i64>> = (0..n - 1)
            .map(|i| {
                let mut v = vec![0i64; n];
                v[i] = -1;
                v
            })
            .collect();
        let mut last = vec![0i64; n];
        last[n - 1] = -2;
        sup.push(last);
        (d, labels, sup)
    } else {
        return Err(unknown());
    };
    let grading = good_grading(Arc::new(datum), &labels, &support)?;
    Ok(Preset {
        name: name.to_string(),
        grading,
    })
}
