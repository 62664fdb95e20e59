//! Exact linear algebra over `Q(k)`.
//!
//! Kernels and ranks use fraction-free row reduction over `Q[k]`: rows are
//! cleared of denominators, combined by cross-multiplication and stripped of
//! their polynomial content after every step. Every polynomial that could
//! vanish under a specialization of `k` is collected so callers can avoid it.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::scalar::{Poly, Scalar, Q};

/// Dense matrix of scalars, row major.
pub type Matrix = Vec<Vec<Scalar>>;

/// Result of a nullspace computation.
#[derive(Clone, Debug)]
pub struct Nullspace {
    pub rank: usize,
    pub basis: Vec<Vec<Scalar>>,
    /// Monic primitive polynomials whose roots are non-generic levels.
    pub denominators: Vec<Poly>,
}

fn lcm(a: &Poly, b: &Poly) -> Poly {
    let g = Poly::gcd(a, b);
    (a * b).div_rem(&g).0.monic()
}

fn note(set: &mut BTreeSet<Poly>, p: &Poly) {
    if !p.is_constant() {
        set.insert(p.monic());
    }
}

/// Clear denominators of a row and remove its polynomial content.
fn poly_row(row: &[Scalar], dens: &mut BTreeSet<Poly>) -> Vec<Poly> {
    let mut l = Poly::one();
    for x in row {
        if !x.denom().is_one() {
            note(dens, x.denom());
            l = lcm(&l, x.denom());
        }
    }
    let out: Vec<Poly> = row
        .iter()
        .map(|x| {
            if x.is_zero() {
                Poly::zero()
            } else {
                let f = l.div_rem(x.denom()).0;
                &f * x.numer()
            }
        })
        .collect();
    strip(out, dens)
}

fn strip(mut row: Vec<Poly>, dens: &mut BTreeSet<Poly>) -> Vec<Poly> {
    let mut g = Poly::zero();
    for p in &row {
        if !p.is_zero() {
            g = Poly::gcd(&g, p);
            if g.is_one() {
                break;
            }
        }
    }
    if g.is_zero() {
        return row;
    }
    if !g.is_one() {
        note(dens, &g);
        for p in row.iter_mut() {
            if !p.is_zero() {
                *p = p.div_rem(&g).0;
            }
        }
    }
    // rational content
    let mut c: Option<Q> = None;
    for p in &row {
        if !p.is_zero() {
            let pc = p.content();
            c = Some(match c {
                None => pc,
                Some(c) => {
                    use num_integer::Integer;
                    Q::new(c.numer().gcd(pc.numer()), c.denom().lcm(pc.denom()))
                }
            });
        }
    }
    if let Some(c) = c {
        let inv = num_traits::Inv::inv(c);
        for p in row.iter_mut() {
            if !p.is_zero() {
                *p = p.scale(&inv);
            }
        }
    }
    row
}

/// Fraction-free echelon form: returns polynomial rows and pivot columns.
fn echelon(m: &[Vec<Scalar>], ncols: usize, dens: &mut BTreeSet<Poly>) -> (Vec<Vec<Poly>>, Vec<usize>) {
    let mut rows: Vec<Vec<Poly>> = m
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| poly_row(r, dens))
        .collect();
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..ncols {
        // choose the pivot of smallest degree in this column
        let mut best: Option<(usize, (usize, usize))> = None;
        for (i, r) in rows.iter().enumerate() {
            if let Some(d) = r[col].degree() {
                let key = (d, r.iter().filter(|p| !p.is_zero()).count());
                if best.as_ref().is_none_or(|(_, bk)| key < *bk) {
                    best = Some((i, key));
                }
            }
        }
        let Some((bi, _)) = best else { continue };
        let piv_row = rows.swap_remove(bi);
        let piv = piv_row[col].clone();
        note(dens, &piv);
        let mut next = Vec::with_capacity(rows.len());
        for r in rows.into_iter() {
            if r[col].is_zero() {
                next.push(r);
                continue;
            }
            let a = r[col].clone();
            let (pa, pb) = if piv.is_constant() {
                (Poly::one(), a.scale(&piv.lc().recip()))
            } else {
                let g = Poly::gcd(&piv, &a);
                (piv.div_rem(&g).0, a.div_rem(&g).0)
            };
            note(dens, &pa);
            let nr: Vec<Poly> = r
                .iter()
                .zip(piv_row.iter())
                .map(|(x, y)| {
                    let u = if pa.is_one() { x.clone() } else { &pa * x };
                    if y.is_zero() {
                        u
                    } else {
                        &u - &(&pb * y)
                    }
                })
                .collect();
            if nr.iter().any(|p| !p.is_zero()) {
                next.push(strip(nr, dens));
            }
        }
        rows = next;
        out.push(piv_row);
        pivots.push(col);
        if rows.is_empty() {
            break;
        }
    }
    (out, pivots)
}

/// Rank over `Q(k)`.
pub fn rank(m: &[Vec<Scalar>], ncols: usize) -> usize {
    let mut d = BTreeSet::new();
    echelon(m, ncols, &mut d).1.len()
}

/// Rank together with the polynomials that must not vanish for it to persist.
pub fn rank_report(m: &[Vec<Scalar>], ncols: usize) -> (usize, Vec<Poly>) {
    let mut d = BTreeSet::new();
    let r = echelon(m, ncols, &mut d).1.len();
    (r, d.into_iter().collect())
}

/// Basis of `{v : M v = 0}` over `Q(k)`.
pub fn nullspace(m: &[Vec<Scalar>], ncols: usize) -> Nullspace {
    let mut dens = BTreeSet::new();
    let (rows, pivots) = echelon(m, ncols, &mut dens);
    let is_pivot: Vec<Option<usize>> = {
        let mut v = vec![None; ncols];
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = Some(i);
        }
        v
    };
    let rows: Vec<Vec<Scalar>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(Scalar::from_poly).collect())
        .collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for i in (0..pivots.len()).rev() {
            let c = pivots[i];
            let r = &rows[i];
            let mut s = Scalar::zero();
            for j in (c + 1)..ncols {
                if !r[j].is_zero() && !v[j].is_zero() {
                    s += &(&r[j] * &v[j]);
                }
            }
            if !s.is_zero() {
                v[c] = -(&s / &r[c]);
            }
        }
        basis.push(normalize_vec(v));
    }
    for b in &basis {
        for x in b {
            note(&mut dens, x.denom());
        }
    }
    Nullspace {
        rank: pivots.len(),
        basis,
        denominators: dens.into_iter().collect(),
    }
}

/// Scale a vector so its last nonzero entry is one.
pub fn normalize_vec(mut v: Vec<Scalar>) -> Vec<Scalar> {
    if let Some(l) = v.iter().rev().find(|x| !x.is_zero()).cloned() {
        if !l.is_one() {
            let inv = l.inv();
            for x in v.iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
    }
    v
}

/// Solve `A x = b` for some particular `x`, if consistent.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar], ncols: usize) -> Option<Vec<Scalar>> {
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(-bi);
            r
        })
        .collect();
    let ns = nullspace(&aug, ncols + 1);
    let v = ns.basis.into_iter().find(|v| !v[ncols].is_zero())?;
    let inv = v[ncols].inv();
    Some(v[..ncols].iter().map(|x| x * &inv).collect())
}

pub fn mat_vec(m: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|r| {
            let mut s = Scalar::zero();
            for (a, b) in r.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    s += &(a * b);
                }
            }
            s
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Matrix {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|r| {
            (0..n)
                .map(|j| {
                    let mut s = Scalar::zero();
                    for (k, x) in r.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += &(x * &b[k][j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Substitute `k = x` in every entry; `None` if some denominator vanishes.
pub fn specialize(m: &[Vec<Scalar>], x: &Q) -> Option<Matrix> {
    m.iter()
        .map(|r| r.iter().map(|s| s.eval(x).map(Scalar::from_q)).collect())
        .collect()
}

/// True if none of the polynomials vanishes at `x`.
pub fn avoids(dens: &[Poly], x: &Q) -> bool {
    dens.iter().all(|p| !p.eval(x).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_int;
    use proptest::prelude::*;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    #[test]
    fn symbolic_rank_drop() {
        // [[k, 1], [1, k]] has determinant k^2 - 1
        let k = Scalar::k();
        let m = vec![vec![k.clone(), s(1)], vec![s(1), k.clone()]];
        let ns = nullspace(&m, 2);
        assert_eq!(ns.rank, 2);
        assert!(ns.basis.is_empty());
        let at_one = specialize(&m, &q_int(1)).unwrap();
        assert_eq!(rank(&at_one, 2), 1);
        assert!(!avoids(&ns.denominators, &q_int(1)) || !avoids(&ns.denominators, &q_int(-1)));
    }

    #[test]
    fn kernel_vector() {
        let k = Scalar::k();
        let m = vec![vec![k.clone(), &k + &s(1), s(0)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.basis.len(), 2);
        for v in &ns.basis {
            assert!(mat_vec(&m, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_system() {
        let m = vec![vec![s(1), s(1)], vec![s(1), s(-1)]];
        let x = solve(&m, &[s(3), s(1)], 2).unwrap();
        assert_eq!(x, vec![s(2), s(1)]);
        let m = vec![vec![s(1), s(1)], vec![s(1), s(1)]];
        assert!(solve(&m, &[s(1), s(2)], 2).is_none());
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-3i64..3, 12), kshift in 0i64..3) {
            let k = Scalar::k();
            let m: Matrix = entries.chunks(4).map(|r| {
                r.iter().enumerate().map(|(j, &x)| {
                    if j == 0 { &k * &s(x) + s(kshift) } else { s(x) }
                }).collect()
            }).collect();
            let ns = nullspace(&m, 4);
            prop_assert_eq!(ns.rank + ns.basis.len(), 4);
            for v in &ns.basis {
                prop_assert!(mat_vec(&m, v).iter().all(|x| x.is_zero()));
            }
            // generic specialization preserves rank
            for x in 5..40 {
                let x = q_int(x);
                if avoids(&ns.denominators, &x) {
                    let sm = specialize(&m, &x).unwrap();
                    prop_assert_eq!(rank(&sm, 4), ns.rank);
                    break;
                }
            }
        }
    }
}
