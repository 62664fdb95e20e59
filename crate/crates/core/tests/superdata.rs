use std::sync::Arc;

use walg::scalar::{q_frac, q_int};
use walg::superdata::*;
use walg::Scalar;

#[test]
fn dual_coxeter_numbers() {
    for n in 2..=4 {
        assert_eq!(build_sl(n).unwrap().h_dual, q_int(n as i64));
    }
    for n in 1..=3 {
        assert_eq!(build_osp(n).unwrap().h_dual, q_int(n as i64) + q_frac(1, 2));
    }
}

#[test]
fn invariants_hold_for_small_rank() {
    for n in 2..=4 {
        build_sl(n).unwrap().validate().unwrap();
    }
    for n in 1..=2 {
        build_osp(n).unwrap().validate().unwrap();
    }
}

#[test]
fn sl_structure_constants_match_elementary_matrices() {
    // oracle: [E_ij, E_kl] = d_jk E_il - d_li E_kj computed directly
    let n = 3;
    let d = build_sl(n).unwrap();
    let mats = d.matrices.as_ref().unwrap();
    for a in 0..d.dim() {
        for b in 0..d.dim() {
            let mut direct = vec![vec![q_int(0); n]; n];
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        direct[i][j] += &mats[a][i][l] * &mats[b][l][j] - &mats[b][i][l] * &mats[a][l][j];
                    }
                }
            }
            let mut rebuilt = vec![vec![q_int(0); n]; n];
            for (c, x) in d.bracket(a, b) {
                for i in 0..n {
                    for j in 0..n {
                        rebuilt[i][j] += x * &mats[*c][i][j];
                    }
                }
            }
            assert_eq!(direct, rebuilt);
        }
    }
}

#[test]
fn sl_n_subregular_preset() {
    for n in 3..=5 {
        let p = preset(&format!("sl{n}-subregular")).unwrap();
        let g = &p.grading;
        // g_0 = sl_2 + Cartan complement, g_{1/2} = 0
        assert_eq!(g.of_degree(0).len(), n - 1 + 2);
        assert!(g.of_degree(1).is_empty());
        let rb = restricted_base(g);
        let d = &g.datum;
        let roots: Vec<Vec<i64>> = rb.pi_half.iter().map(|&a| d.basis[a].root.clone()).collect();
        let mut expect = vec![];
        let mut a12 = vec![0; n - 1];
        a12[0] = 1;
        a12[1] = 1;
        expect.push(a12);
        for i in 1..n - 1 {
            let mut v = vec![0; n - 1];
            v[i] = 1;
            expect.push(v);
        }
        let mut got = roots.clone();
        got.sort();
        expect.sort();
        assert_eq!(got, expect);
        assert_eq!(rb.classes.len(), n - 2);
        let first = rb
            .classes
            .iter()
            .find(|c| c.len() == 2)
            .expect("class of alpha_2");
        let mut cr: Vec<Vec<i64>> = first.iter().map(|&a| d.basis[a].root.clone()).collect();
        cr.sort();
        assert_eq!(cr[0][1], 1);
        assert!(rb.split_half.is_empty());
    }
}

#[test]
fn osp_regular_preset() {
    for n in 1..=3 {
        let p = preset(&format!("osp1_{}-regular", 2 * n)).unwrap();
        let g = &p.grading;
        let rb = restricted_base(g);
        let d = &g.datum;
        assert_eq!(rb.split_half.len(), 1);
        assert_eq!(rb.split_one.len(), n - 1);
        let bn = rb.split_half[0];
        let mut last = vec![0; n];
        last[n - 1] = 1;
        assert_eq!(d.basis[bn].root, last);
        assert_eq!(d.parity(bn), 1);
        // chi([e_bn, e_bn]) != 0
        let c = chi(g);
        let br = d.bracket_vec(&d.unit(bn), &d.unit(bn));
        assert_ne!(c.eval(&br), q_int(0));
        assert!(g.zero_part_is_cartan());
        assert!(rb.classes.iter().all(|c| c.len() == 1));
    }
}

#[test]
fn chi_values() {
    let p = preset("sl2-regular").unwrap();
    let g = &p.grading;
    let c = chi(g);
    let d = &g.datum;
    assert_eq!(c.values[d.index_of_name("E12").unwrap()], q_int(1));
    assert_eq!(c.values[0], q_int(0));
    for (a, v) in c.values.iter().enumerate() {
        if g.deg2[a] != 2 {
            assert_eq!(*v, q_int(0));
        }
    }
}

#[test]
fn tau_regular_is_shifted_level() {
    for name in ["sl2-regular", "sl3-regular", "osp1_2-regular", "osp1_4-regular"] {
        let g = preset(name).unwrap().grading;
        let lf = tau_form(&g);
        let d = &g.datum;
        let shift = Scalar::k_plus(d.h_dual.clone());
        for &a in &g.of_degree(0) {
            for &b in &g.of_degree(0) {
                let want = &shift * &Scalar::from_q(d.form[a][b].clone());
                assert_eq!(lf.tau[a][b], want, "{name}");
            }
        }
        // kappa_g = 2 h^vee (.|.) on the even part
        for a in 0..d.dim() {
            for b in 0..d.dim() {
                if d.parity(a) == 0 && d.parity(b) == 0 {
                    assert_eq!(lf.killing_g[a][b], q_int(2) * &d.h_dual * &d.form[a][b]);
                }
            }
        }
    }
}

#[test]
fn tau_subregular_sl2_level() {
    for n in 3..=4 {
        let g = preset(&format!("sl{n}-subregular")).unwrap().grading;
        let d = &g.datum;
        let lf = tau_form(&g);
        let e = d.index_of_name("E12").unwrap();
        let f = d.index_of_name("E21").unwrap();
        // (e|f) = 1, level k + n - 2
        assert_eq!(lf.tau[e][f], Scalar::k_plus(q_int(n as i64 - 2)));
    }
}

#[test]
fn a_k_on_restricted_base() {
    for name in ["sl2-regular", "sl3-subregular", "sl4-subregular", "osp1_2-regular", "osp1_4-regular"] {
        let g = preset(name).unwrap().grading;
        let d = &g.datum;
        for &a in &restricted_base(&g).pi_half {
            let neg: Vec<i64> = d.basis[a].root.iter().map(|c| -c).collect();
            let m = d.index_of_root(&neg).unwrap();
            let want = &Scalar::k_plus(d.h_dual.clone()) * &Scalar::from_q(d.form[m][a].clone());
            assert_eq!(a_k(&g, m, a), want, "{name}");
        }
    }
}

#[test]
fn restricted_base_order_independent() {
    let g = preset("sl4-subregular").unwrap().grading;
    let d = &g.datum;
    let mut roots: Vec<Vec<i64>> = d
        .positive_roots()
        .into_iter()
        .filter(|&a| g.deg2[a] > 0)
        .map(|a| d.basis[a].root.clone())
        .collect();
    let base = indecomposables(&roots);
    roots.reverse();
    assert_eq!(indecomposables(&roots), base);
    roots.rotate_left(2);
    assert_eq!(indecomposables(&roots), base);
    let again: Vec<Vec<i64>> = base.iter().cloned().collect();
    assert_eq!(indecomposables(&again), base);
}

#[test]
fn cartan_only_zero_part_has_singleton_classes() {
    let g = preset("sl4-regular").unwrap().grading;
    let rb = restricted_base(&g);
    assert_eq!(rb.classes.len(), 3);
    assert!(rb.classes.iter().all(|c| c.len() == 1));
}

#[test]
fn grading_element() {
    let g = preset("sl3-subregular").unwrap().grading;
    let d = &g.datum;
    // [x, e_a] = deg(a) e_a
    for a in d.roots() {
        let mut v = vec![q_int(0); d.dim()];
        v[..d.rank].clone_from_slice(&g.x);
        let br = d.bracket_vec(&v, &d.unit(a));
        assert_eq!(br[a], q_frac(g.deg2[a], 2));
    }
}

#[test]
fn bad_presets() {
    assert!(preset("sl2-subregular").is_err());
    assert!(preset("osp1_3-regular").is_err());
    assert!(preset("g2-regular").is_err());
    let d = Arc::new(build_sl(3).unwrap());
    assert!(matches!(good_grading(d, &[0, 3], &[vec![0, -1]]), Err(walg::Error::NotGoodGrading(_))));
}
