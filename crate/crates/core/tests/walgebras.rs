use std::collections::BTreeMap;

use proptest::prelude::*;
use walg::error::Error;
use walg::linalg;
use walg::scalar::{q_int, Scalar, Q};
use walg::screening::*;
use walg::superdata::{a_k, preset};
use walg::vertexcalc::{bracket, LambdaPoly, State};
use walg::walgebras::brst::{cohomology_at, h0_basis};
use walg::walgebras::miura::proportionality;
use walg::walgebras::w2n::{w2n_gram, wakimoto_images};
use walg::walgebras::wbn::{b_gram, gamma_coefficient, mod_c2};
use walg::walgebras::*;

fn complex(name: &str) -> BrstComplex {
    build_complex(&preset(name).unwrap().grading).unwrap()
}

fn h_dims(cx: &BrstComplex, max2: i64, level: &Level) -> (Vec<u64>, bool) {
    let entries = cohomology_dims(cx, max2, level).unwrap();
    let mut h0 = vec![0u64; max2 as usize + 1];
    let mut others_vanish = true;
    for e in &entries {
        assert!(e.d_squared_zero, "d^2 at weight2 {} charge {}", e.weight2, e.charge);
        if e.charge == 0 {
            h0[e.weight2 as usize] = e.dim as u64;
        } else if e.dim != 0 {
            others_vanish = false;
        }
    }
    (h0, others_vanish)
}

#[test]
fn sl2_cohomology_is_concentrated_in_charge_zero() {
    let cx = complex("sl2-regular");
    let (h0, vanish) = h_dims(&cx, 8, &Level::Symbolic);
    assert!(vanish);
    let oracle = expected_character(&cx.grading, 8);
    assert_eq!(h0, oracle);
    let at_int: Vec<u64> = h0.iter().step_by(2).copied().collect();
    assert_eq!(at_int, vec![1, 0, 1, 1, 2]);
}

#[test]
fn osp12_cohomology_matches_character() {
    let cx = complex("osp1_2-regular");
    let (h0, vanish) = h_dims(&cx, 6, &Level::Symbolic);
    assert!(vanish);
    assert_eq!(h0, expected_character(&cx.grading, 6));
}

#[test]
fn sl3_subregular_cohomology_matches_character() {
    let cx = complex("sl3-subregular");
    let (h0, vanish) = h_dims(&cx, 4, &Level::Symbolic);
    assert!(vanish);
    assert_eq!(h0, expected_character(&cx.grading, 4));
}

#[test]
fn d_squared_vanishes_on_generators() {
    for name in ["sl2-regular", "osp1_2-regular", "sl3-regular", "sl3-subregular", "osp1_4-regular"] {
        let cx = complex(name);
        let d = cx.d0();
        for g in cx.gens() {
            let dd = d.apply(&d.apply(&State::gen(g)).unwrap()).unwrap();
            assert!(dd.is_zero(), "{name}: d^2 on {}", cx.alg.gens[g].name);
        }
    }
}

#[test]
fn d_raises_charge_and_preserves_weight() {
    let cx = complex("sl3-subregular");
    let d = cx.d0();
    for g in cx.gens() {
        let s = State::gen(g);
        let w = s.max_depth2(&cx.alg);
        let c = cx.alg.gens[g].charge;
        for (m, _) in d.apply(&s).unwrap().iter() {
            assert_eq!(m.depth2(&cx.alg), w);
            assert_eq!(m.charge(&cx.alg), c + 1);
        }
    }
}

/// `d_(0)` is a derivation of the lambda-bracket on generator pairs.
#[test]
fn d_is_a_derivation_of_the_bracket() {
    for name in ["sl2-regular", "osp1_2-regular", "sl3-subregular"] {
        let cx = complex(name);
        let d = cx.d0();
        for a in cx.gens() {
            for b in cx.gens() {
                let (sa, sb) = (State::gen(a), State::gen(b));
                let lhs = bracket(&cx.alg, &sa, &sb).unwrap();
                let mut lhs_d = BTreeMap::new();
                for (n, s) in &lhs.0 {
                    let v = d.apply(s).unwrap();
                    if !v.is_zero() {
                        lhs_d.insert(*n, v);
                    }
                }
                let r1 = bracket(&cx.alg, &d.apply(&sa).unwrap(), &sb).unwrap();
                let r2 = bracket(&cx.alg, &sa, &d.apply(&sb).unwrap()).unwrap();
                let sign = if cx.alg.parity(a) == 1 { -Scalar::one() } else { Scalar::one() };
                let mut rhs = r1.0.clone();
                for (n, s) in r2.0 {
                    let e = rhs.entry(n).or_insert_with(State::zero);
                    e.add(&s, &sign);
                }
                rhs.retain(|_, s| !s.is_zero());
                assert_eq!(LambdaPoly(lhs_d), LambdaPoly(rhs), "{name}: pair {a},{b}");
            }
        }
    }
}

#[test]
fn current_brackets_follow_the_level_form() {
    let cx = complex("sl3-subregular");
    let tau = walg::superdata::tau_form(&cx.grading);
    let d = &cx.grading.datum;
    for (i, &u) in cx.currents.iter().enumerate() {
        for (j, &v) in cx.currents.iter().enumerate() {
            let br = bracket(&cx.alg, &State::gen(i), &State::gen(j)).unwrap();
            let mut p0 = State::zero();
            for (w, c) in d.bracket(u, v) {
                p0.add(&State::gen(cx.current(*w).unwrap()), &Scalar::from_q(c.clone()));
            }
            assert_eq!(br.get(0), p0);
            assert_eq!(br.get(1), State::vacuum().scale(&tau.tau[u][v]));
        }
    }
}

#[test]
fn neutral_fermion_differential_is_the_chi_term() {
    let cx = complex("osp1_2-regular");
    let d = &cx.grading.datum;
    assert!(!cx.fermions.is_empty());
    for &al in &cx.fermions {
        let g = cx.fermion(al).unwrap();
        let mut want = State::zero();
        for &be in &cx.fermions {
            let x = cx.chi.eval(&d.bracket_vec(&d.unit(be), &d.unit(al)));
            want.add(&State::gen(cx.ghost(be).unwrap()), &Scalar::from_q(x));
        }
        assert!(!want.is_zero());
        assert_eq!(cx.d[g], want);
    }
}

#[test]
fn ghosts_have_no_chi_term() {
    for name in ["sl2-regular", "sl3-regular", "osp1_4-regular"] {
        let cx = complex(name);
        for &al in &cx.ghosts {
            let dg = &cx.d[cx.ghost(al).unwrap()];
            for (m, _) in dg.iter() {
                assert_eq!(m.modes.len(), 2, "{name}: linear term in d phi");
            }
        }
    }
}

#[test]
fn a_k_on_half_integer_simple_roots() {
    let g = preset("osp1_2-regular").unwrap().grading;
    let d = &g.datum;
    let kh = Scalar::k_plus(d.h_dual.clone());
    let mut seen = 0;
    for i in 0..g.labels2.len() {
        if g.labels2[i] != 1 {
            continue;
        }
        let a = d.simple_root_index(i);
        let root: Vec<i64> = d.basis[a].root.iter().map(|x| -x).collect();
        let na = d.index_of_root(&root).unwrap();
        let form = d.form_vec(&d.unit(na), &d.unit(a));
        assert_eq!(a_k(&g, na, a), &kh * &Scalar::from_q(form));
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn specialized_cohomology_matches_symbolic() {
    let cx = complex("sl2-regular");
    let sym = h_dims(&cx, 6, &Level::Symbolic).0;
    for k in [q_int(1), Q::new(7.into(), 3.into())] {
        assert_eq!(h_dims(&cx, 6, &Level::At(k)).0, sym);
    }
    assert!(matches!(
        cohomology_at(&cx, 4, &Level::At(q_int(-2))),
        Err(Error::CriticalLevel)
    ));
}

fn miura_images(cx: &BrstComplex, amb: &Ambient, w2: i64) -> Vec<State> {
    h0_basis(cx, w2)
        .unwrap()
        .iter()
        .map(|v| miura_project(cx, amb, v).unwrap())
        .collect()
}

fn rank(states: &[State], basis: &[walg::vertexcalc::Mono]) -> usize {
    let cols: Vec<Vec<Scalar>> = states.iter().map(|s| s.coords(basis).unwrap()).collect();
    let rows: Vec<Vec<Scalar>> = (0..basis.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    linalg::rank(&rows, states.len())
}

#[test]
fn miura_images_span_the_screening_kernels() {
    for (name, max2) in [("sl2-regular", 8), ("osp1_2-regular", 6), ("sl3-subregular", 4)] {
        let cx = complex(name);
        let amb = Ambient::new(&cx.grading).unwrap();
        let ops = generic_screenings(&amb);
        let e = amb.alg.engine();
        for w2 in 0..=max2 {
            let imgs = miura_images(&cx, &amb, w2);
            for v in &imgs {
                for op in &ops {
                    assert!(q_apply(&amb, &e, op, v).unwrap().is_zero(), "{name} weight2 {w2}");
                }
            }
            let ker = kernel(&amb, &ops, w2, &Level::Symbolic).unwrap();
            assert_eq!(rank(&imgs, &ker.ambient), ker.vectors.len(), "{name} weight2 {w2}");
            let mut both = imgs.clone();
            both.extend(ker.vectors.iter().cloned());
            assert_eq!(rank(&both, &ker.ambient), ker.vectors.len());
        }
    }
}

#[test]
fn sl2_miura_matches_exponential_kernel_up_to_scalar() {
    let cx = complex("sl2-regular");
    let amb = Ambient::new(&cx.grading).unwrap();
    let ops = exponential_screenings(&amb).unwrap();
    for w2 in [4, 6] {
        let imgs = miura_images(&cx, &amb, w2);
        let ker = kernel(&amb, &ops, w2, &Level::Symbolic).unwrap();
        assert_eq!((imgs.len(), ker.vectors.len()), (1, 1));
        let c = proportionality(&imgs[0], &ker.vectors[0]).expect("proportional");
        assert!(!c.is_zero());
    }
}

#[test]
fn miura_basics() {
    let cx = complex("sl3-subregular");
    let amb = Ambient::new(&cx.grading).unwrap();
    assert_eq!(miura_project(&cx, &amb, &State::vacuum()).unwrap(), State::vacuum());
    let ghost = State::gen(cx.ghost(cx.ghosts[0]).unwrap());
    assert!(matches!(miura_project(&cx, &amb, &ghost), Err(Error::NonZeroCharge)));
    // a g_0 current survives, a negative-degree one is dropped
    let u0 = cx.currents.iter().position(|&u| cx.grading.deg2[u] == 0).unwrap();
    let img = miura_project(&cx, &amb, &State::gen(u0)).unwrap();
    assert_eq!(img, State::gen(amb.current(cx.currents[u0]).unwrap()));
    let un = cx.currents.iter().position(|&u| cx.grading.deg2[u] < 0).unwrap();
    assert!(miura_project(&cx, &amb, &State::gen(un)).unwrap().is_zero());
}

/// `prod_{j<=i} (1 - 2j(2j-1) g^2)` by integer convolution in `g^2`.
fn gamma_poly(i: usize) -> Vec<i64> {
    let mut p = vec![1i64];
    for j in 1..=i as i64 {
        let c = 2 * j * (2 * j - 1);
        let mut next = vec![0i64; p.len() + 1];
        for (d, x) in p.iter().enumerate() {
            next[d] += x;
            next[d + 1] -= c * x;
        }
        p = next;
    }
    p
}

fn from_even_poly(p: &[i64]) -> Scalar {
    let g2 = Scalar::k().pow(2);
    let mut out = Scalar::zero();
    for (d, c) in p.iter().enumerate() {
        out = &out + &(&Scalar::from_int(*c) * &g2.pow(d as u32));
    }
    out
}

#[test]
fn wbn_top_coefficient() {
    assert_eq!(gamma_poly(2), vec![1, -14, 24]);
    for n in 1..=3 {
        let m = build_wbn(n, GammaMode::Symbolic).unwrap();
        let want = from_even_poly(&gamma_poly(n));
        assert_eq!(m.gg.degree(), Some(2 * n as u32));
        assert_eq!(m.gg.get(2 * n as u32), State::vacuum().scale(&want));
        assert_eq!(gamma_coefficient(&m.gamma, n), want);
    }
}

#[test]
fn wbn_gram_and_fermion() {
    let g = b_gram(3);
    assert_eq!(g[0][0], Scalar::from_int(2));
    assert_eq!(g[2][2], Scalar::one());
    assert_eq!(g[1][2], Scalar::from_int(-1));
    assert_eq!(g[0][2], Scalar::zero());
    let m = build_wbn(2, GammaMode::Symbolic).unwrap();
    let psi = State::gen(m.psi());
    assert_eq!(bracket(&m.alg, &psi, &psi).unwrap().get(0), State::vacuum());
}

#[test]
fn wbn_congruences() {
    for n in 1..=3 {
        let m = build_wbn(n, GammaMode::Symbolic).unwrap();
        assert!(m.check_congruences().unwrap().passed(), "n = {n}");
    }
    // W_0 ~ :b_1^2 ... b_n^2: mod C_2
    let m = build_wbn(2, GammaMode::Symbolic).unwrap();
    assert_eq!(mod_c2(&m.w[0]), mod_c2(&m.elementary_b2(2).unwrap()));
}

#[test]
fn wb1_closed_form() {
    let m = build_wbn(1, GammaMode::Symbolic).unwrap();
    assert!(m.check_closed_form().unwrap().passed());
    let c = &Scalar::one() - &(&Scalar::from_int(2) * &Scalar::k().pow(2));
    assert_eq!(m.gg.get(2), State::vacuum().scale(&c));
    let m2 = build_wbn(2, GammaMode::Symbolic).unwrap();
    assert!(m2.check_closed_form().is_err());
}

#[test]
fn wbn_screenings_kill_g() {
    for n in 1..=3 {
        let m = build_wbn(n, GammaMode::Plus).unwrap();
        let (t, tm) = m.gamma_pm.clone().unwrap();
        assert_eq!(&t * &tm, -Scalar::one());
        assert_eq!(&t + &tm, m.gamma);
        let r = verify_wbn_screening(&m).unwrap();
        assert!(r.passed(), "n = {n}: {:?}", r.witness);
    }
}

#[test]
fn wbn_screenings_are_not_vacuous() {
    let m = build_wbn(2, GammaMode::Plus).unwrap();
    for i in 0..2 {
        assert!(!m.screen(i, &State::gen(i)).unwrap().is_zero());
    }
    // G at the wrong gamma is not annihilated
    let wrong = build_wbn(1, GammaMode::At(q_int(1))).unwrap();
    let right = build_wbn(1, GammaMode::Plus).unwrap();
    assert!(!right.screen(0, &wrong.g).unwrap().is_zero());
    assert!(build_wbn(1, GammaMode::Symbolic).unwrap().screen(0, &State::vacuum()).is_err());
}

#[test]
fn wbn_rejects_n_zero() {
    assert!(build_wbn(0, GammaMode::Symbolic).is_err());
}

#[test]
fn w2n_gram_entries() {
    for n in 2..=4 {
        let g = w2n_gram(n);
        let kn = Scalar::k_plus(q_int(n as i64));
        let m = build_w2n(n).unwrap();
        for i in 1..n {
            let a = m.a(i);
            assert_eq!(g[a][a], &Scalar::from_int(2) * &kn);
            if i + 1 < n {
                assert_eq!(g[a][m.a(i + 1)], -kn.clone());
            }
            assert_eq!(g[a][m.xi()], Scalar::zero());
        }
        assert_eq!(g[m.psi()][m.psi()], Scalar::one());
        assert_eq!(g[m.psi()][m.xi()], Scalar::one());
        assert_eq!(g[m.xi()][m.xi()], Scalar::zero());
        assert_eq!(g[m.a(1)][m.psi()], -kn.clone());
        for x in 0..=n {
            for y in 0..=n {
                let b = bracket(&m.alg, &State::gen(x), &State::gen(y)).unwrap();
                assert_eq!(b.get(1), State::vacuum().scale(&g[x][y]));
            }
        }
    }
}

#[test]
fn w2n_f_forms_agree() {
    let m = build_w2n(2).unwrap();
    assert_eq!(m.f, m.f_printed_n2().unwrap());
    for n in 2..=4 {
        let m = build_w2n(n).unwrap();
        assert_eq!(m.f, m.f_rewritten, "n = {n}");
        assert_eq!(m.f.parity(&m.alg), Some(0));
    }
    assert!(build_w2n(3).unwrap().f_printed_n2().is_err());
    assert!(build_w2n(1).is_err());
}

#[test]
fn w2n_fs_screenings() {
    for n in 2..=3 {
        let m = build_w2n(n).unwrap();
        assert!(bracket(&m.alg, &m.e, &m.e).unwrap().is_zero());
        let r = verify_fs(&m).unwrap();
        assert!(r.passed(), "n = {n}: {:?}", r.witness);
    }
}

#[test]
fn w2n_screenings_are_not_vacuous() {
    let m = build_w2n(3).unwrap();
    assert!(!m.screen_q(&State::gen(m.a(1))).unwrap().is_zero());
    assert!(!m.screen_a(1, &State::gen(m.psi())).unwrap().is_zero());
    // dropping the derivative term from F breaks Q-invariance
    let mut broken = m.f.clone();
    let e = m.alg.engine();
    let base = State::hw(walg::vertexcalc::Hw::mom(m.lattice(-1)));
    broken.add(&e.apply_gen(m.psi(), -2, &base).unwrap(), &Scalar::one());
    assert!(!m.screen_q(&broken).unwrap().is_zero());
}

#[test]
fn wakimoto_table() {
    let m = build_w2n(3).unwrap();
    let p = preset("sl3-subregular").unwrap();
    let d = &p.grading.datum;
    let (g0, imgs) = wakimoto_images(&m).unwrap();
    assert_eq!(g0.len(), 4);
    let img = |name: &str| imgs[g0.iter().position(|&u| d.basis[u].name == name).unwrap()].clone();
    let mut h1 = State::gen(m.xi()).scale(&Scalar::k_plus(q_int(1)));
    h1.add(&State::gen(m.psi()), &Scalar::from_int(2));
    h1.add(&State::gen(m.a(1)), &Scalar::one());
    assert_eq!(img("h1"), h1);
    assert_eq!(img("E12"), m.e);
    let r = wakimoto_pi(3).unwrap();
    assert!(r.passed(), "{:?}", r.witness);
    assert_eq!(r.data["pairs_matching"], 16);
    // a perturbed h1 image changes [h1_lambda E]
    let bad = h1.plus(&State::gen(m.psi()));
    let good = bracket(&m.alg, &img("h1"), &m.e).unwrap();
    assert_ne!(bracket(&m.alg, &bad, &m.e).unwrap(), good);
    assert_eq!(good.get(0), m.e.scale(&Scalar::from_int(2)));
}

#[test]
fn wakimoto_sl4_and_rejections() {
    let r = wakimoto_pi(4).unwrap();
    assert!(r.passed(), "{:?}", r.witness);
    let m = build_w2n(4).unwrap();
    let p = preset("sl4-subregular").unwrap();
    let (g0, imgs) = wakimoto_images(&m).unwrap();
    let h3 = g0.iter().position(|&u| p.grading.datum.basis[u].name == "h3").unwrap();
    assert_eq!(imgs[h3], State::gen(m.a(3)));
    assert!(wakimoto_pi(2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gamma_coefficient_matches_oracle(p in -20i64..20, q in 1i64..10, i in 0usize..5) {
        let x = Q::new(p.into(), q.into());
        let got = gamma_coefficient(&Scalar::from_q(x.clone()), i);
        let want = from_even_poly(&gamma_poly(i)).eval(&x).unwrap();
        prop_assert_eq!(got, Scalar::from_q(want));
    }

    #[test]
    fn wb1_top_coefficient_at_rationals(p in -6i64..6, q in 1i64..5) {
        let x = Q::new(p.into(), q.into());
        let m = build_wbn(1, GammaMode::At(x.clone())).unwrap();
        let want = &Scalar::one() - &(&Scalar::from_int(2) * &Scalar::from_q(&x * &x));
        prop_assert_eq!(m.gg.get(2), State::vacuum().scale(&want));
    }
}
