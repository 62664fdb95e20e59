//! One line per acceptance criterion. Every check is exact.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use walg::linalg;
use walg::scalar::{q_int, Poly, Scalar, Q};
use walg::screening::*;
use walg::superdata::{preset, GoodGrading};
use walg::vertexcalc::axioms::run_suite;
use walg::vertexcalc::sugawara::{check_primary, check_virasoro};
use walg::vertexcalc::{Mono, State};
use walg::walgebras::brst::{d0_matrix, h0_basis};
use walg::walgebras::miura::proportionality;
use walg::walgebras::w2n::w2n_gram;
use walg::walgebras::*;

const PRESETS: [&str; 5] = ["sl2-regular", "osp1_2-regular", "sl3-regular", "sl3-subregular", "osp1_4-regular"];

struct Line {
    n: usize,
    ok: bool,
    detail: String,
}

fn report(lines: &[Line]) -> bool {
    for l in lines {
        println!("criterion {}: {} ({})", l.n, if l.ok { "PASS" } else { "FAIL" }, l.detail);
    }
    lines.iter().all(|l| l.ok)
}

fn grading(name: &str) -> GoodGrading {
    preset(name).unwrap().grading
}

fn criterion1() -> Line {
    let t = Instant::now();
    let results: Vec<(String, bool, usize)> = PRESETS
        .par_iter()
        .flat_map(|&p| {
            let g = grading(p);
            vec![Ambient::new(&g).unwrap().alg, build_complex(&g).unwrap().alg]
                .into_par_iter()
                .map(move |alg| {
                    let r = run_suite(&alg, 1, 100, 6).unwrap();
                    let checks = ["skew-symmetry", "jacobi", "wick", "commutator"];
                    let full = checks.iter().all(|c| r.passed.get(*c).copied().unwrap_or(0) >= 100);
                    (format!("{p}/{}", alg.name), r.ok() && full, r.samples)
                })
        })
        .collect();
    let ok = results.iter().all(|r| r.1);
    let bad: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    Line {
        n: 1,
        ok,
        detail: format!(
            "{} algebras, 100 fields each, weight <= 3, failures {:?}, {:.1}s",
            results.len(),
            bad,
            t.elapsed().as_secs_f64()
        ),
    }
}

fn criterion2() -> Line {
    let amb = Ambient::new(&grading("sl3-subregular")).unwrap();
    let vir = check_virasoro(&amb.alg, &amb.l).unwrap();
    // gl_2 at tau_k: sl_2 at level k+1 plus one free boson
    let kap = Scalar::k_plus(q_int(1));
    let three = Scalar::from_int(3);
    let want_c = &(&(&three * &kap) / &Scalar::k_plus(q_int(3))) + &Scalar::one();
    let mut ok = vir.ok() && vir.central_charge.as_ref() == Some(&want_c);
    for i in 0..amb.n_currents() {
        ok &= check_primary(&amb.alg, &amb.l, &State::gen(i), &Scalar::one()).unwrap();
    }
    Line {
        n: 2,
        ok,
        detail: format!(
            "c = {}, {} currents primary of weight 1",
            vir.central_charge.map(|c| c.to_string()).unwrap_or_default(),
            amb.n_currents()
        ),
    }
}

fn gamma_poly(i: usize) -> Scalar {
    let g2 = Scalar::k().pow(2);
    let mut p = Scalar::one();
    for j in 1..=i as i64 {
        p = &p * &(&Scalar::one() - &(&Scalar::from_int(2 * j * (2 * j - 1)) * &g2));
    }
    p
}

fn criterion3() -> Line {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let m = build_wbn(n, GammaMode::Symbolic).unwrap();
        let top = m.gg.get(2 * n as u32) == State::vacuum().scale(&gamma_poly(n));
        let c2 = m.check_congruences().unwrap().passed();
        let closed = n != 1 || m.check_closed_form().unwrap().passed();
        let scr = verify_wbn_screening(&build_wbn(n, GammaMode::Plus).unwrap()).unwrap().passed();
        ok &= top && c2 && closed && scr;
        parts.push(format!("n={n}: top {top}, C2 {c2}, closed {closed}, screening {scr}"));
    }
    Line {
        n: 3,
        ok,
        detail: format!("{}; {:.1}s", parts.join("; "), t.elapsed().as_secs_f64()),
    }
}

fn criterion4() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=3 {
        let m = build_w2n(n).unwrap();
        let kn = Scalar::k_plus(q_int(n as i64));
        let g = w2n_gram(n);
        let mut gram = g[m.psi()][m.psi()] == Scalar::one()
            && g[m.psi()][m.xi()] == Scalar::one()
            && g[m.xi()][m.xi()].is_zero()
            && g[m.a(1)][m.psi()] == -kn.clone();
        for i in 1..n {
            gram &= g[m.a(i)][m.a(i)] == &Scalar::from_int(2) * &kn;
            if i + 1 < n {
                gram &= g[m.a(i)][m.a(i + 1)] == -kn.clone();
            }
        }
        let forms = m.f == m.f_rewritten && (n != 2 || m.f == m.f_printed_n2().unwrap());
        let fs = verify_fs(&m).unwrap().passed();
        ok &= gram && forms && fs;
        parts.push(format!("n={n}: gram {gram}, F forms {forms}, screenings {fs}"));
    }
    let w = wakimoto_pi(3).unwrap();
    ok &= w.passed();
    parts.push(format!(
        "wakimoto sl3 {}/{} pairs",
        w.data["pairs_matching"], w.data["pairs_checked"]
    ));
    Line {
        n: 4,
        ok,
        detail: parts.join("; "),
    }
}

/// Kernel dimensions and the denominators met on the way.
fn kernel_dims(name: &str, max2: i64, level: &Level) -> (Vec<u64>, Vec<Poly>) {
    let amb = Ambient::new(&grading(name)).unwrap();
    let ops = generic_screenings(&amb);
    let per: Vec<(u64, Vec<Poly>)> = (0..=max2)
        .into_par_iter()
        .map(|w| {
            let k = kernel(&amb, &ops, w, level).unwrap();
            assert!(recheck(&amb, &ops, &k.vectors, level).unwrap());
            (k.vectors.len() as u64, k.denominators)
        })
        .collect();
    let dims = per.iter().map(|p| p.0).collect();
    let dens = per.into_iter().flat_map(|p| p.1).collect();
    (dims, dens)
}

struct C5 {
    line: Line,
    dims: Vec<Vec<u64>>,
    dens: Vec<Poly>,
}

const C5_CASES: [(&str, i64); 3] = [("sl2-regular", 12), ("osp1_2-regular", 6), ("sl3-subregular", 6)];

fn criterion5(level: &Level) -> C5 {
    let mut ok = true;
    let mut all = Vec::new();
    let mut dens = Vec::new();
    let mut parts = Vec::new();
    for (name, max2) in C5_CASES {
        let oracle = expected_character(&grading(name), max2);
        let (dims, d) = kernel_dims(name, max2, level);
        ok &= dims == oracle;
        parts.push(format!("{name} {dims:?}"));
        all.push(dims);
        dens.extend(d);
    }
    // printed reference tuples
    let sl2: Vec<u64> = all[0].iter().step_by(2).copied().collect();
    ok &= sl2 == [1, 0, 1, 1, 2, 2, 4];
    let osp_printed = [1u64, 0, 0, 1, 1, 1, 2];
    let osp_note = if all[1] == osp_printed {
        String::new()
    } else {
        format!(
            "; osp1_2 tuple 1,0,0,1,1,1,2 is not attainable: the NS vacuum character has dim 1 at weight 3, since (G_-3/2)^2|0> = L_-3|0>, computed {:?}",
            all[1]
        )
    };
    C5 {
        line: Line {
            n: 5,
            ok,
            detail: format!("level {level}: {}{osp_note}", parts.join("; ")),
        },
        dims: all,
        dens,
    }
}

fn brst_dens(cx: &BrstComplex, max2: i64) -> Vec<Poly> {
    let mut out = Vec::new();
    for w in 0..=max2 {
        for c in cx.basis_by_charge(w).keys() {
            let (src, _, m) = d0_matrix(cx, w, *c).unwrap();
            out.extend(linalg::rank_report(&m, src.len()).1);
        }
    }
    out
}

struct C6 {
    line: Line,
    h0: Vec<u64>,
}

fn criterion6(level: &Level) -> C6 {
    let g = grading("sl2-regular");
    let cx = build_complex(&g).unwrap();
    let entries = cohomology_dims(&cx, 8, level).unwrap();
    let mut h0 = vec![0u64; 9];
    let mut ok = true;
    for e in &entries {
        ok &= e.d_squared_zero;
        if e.charge == 0 {
            h0[e.weight2 as usize] = e.dim as u64;
        } else {
            ok &= e.dim == 0;
        }
    }
    let oracle = expected_character(&g, 8);
    ok &= h0 == oracle;
    // Miura images against the screening kernels, symbolic classes
    let amb = Ambient::new(&g).unwrap();
    let ops = exponential_screenings(&amb).unwrap();
    let e = amb.alg.engine();
    let mut scalars = Vec::new();
    for w in 0..=8 {
        let imgs: Vec<State> = h0_basis(&cx, w)
            .unwrap()
            .iter()
            .map(|v| miura_project(&cx, &amb, v).unwrap())
            .collect();
        for v in &imgs {
            for op in &ops {
                ok &= q_apply(&amb, &e, op, v).unwrap().is_zero();
            }
        }
        let imgs: Vec<State> = imgs.iter().map(|v| specialize(v, level)).collect();
        let ker = kernel(&amb, &ops, w, level).unwrap();
        ok &= span_rank(&imgs, &ker.ambient) == ker.vectors.len();
        if let ([a], [b]) = (imgs.as_slice(), ker.vectors.as_slice()) {
            match proportionality(a, b) {
                Some(c) if !c.is_zero() => scalars.push(format!("w{}: {}", w / 2, c)),
                _ => ok = false,
            }
        }
    }
    C6 {
        line: Line {
            n: 6,
            ok,
            detail: format!("level {level}: H0 {h0:?}, H^(n!=0) = 0, miura scalars [{}]", scalars.join(", ")),
        },
        h0,
    }
}

fn specialize(v: &State, level: &Level) -> State {
    match level {
        Level::Symbolic => v.clone(),
        Level::At(k) => v.map_coeffs(|c| Scalar::from_q(c.eval(k).unwrap())),
    }
}

fn span_rank(states: &[State], basis: &[Mono]) -> usize {
    if states.is_empty() {
        return 0;
    }
    let cols: Vec<Vec<Scalar>> = states.iter().map(|s| s.coords(basis).unwrap()).collect();
    let rows: Vec<Vec<Scalar>> = (0..basis.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    linalg::rank(&rows, states.len())
}

fn criterion7(c5: &C5, c6: &C6) -> Line {
    let mut dens = c5.dens.clone();
    let cx = build_complex(&grading("sl2-regular")).unwrap();
    dens.extend(brst_dens(&cx, 8));
    let mut rng = ChaCha8Rng::seed_from_u64(20240607);
    let mut levels = Vec::new();
    let critical: Vec<Q> = C5_CASES.iter().map(|(p, _)| -grading(p).datum.h_dual.clone()).collect();
    while levels.len() < 3 {
        let k = Q::new(rng.gen_range(-60i64..60).into(), rng.gen_range(1i64..25).into());
        if linalg::avoids(&dens, &k) && !critical.contains(&k) && !levels.contains(&k) {
            levels.push(k);
        }
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for k in &levels {
        let level = Level::At(k.clone());
        let r5 = criterion5(&level);
        let r6 = criterion6(&level);
        let same = r5.dims == c5.dims && r6.h0 == c6.h0;
        ok &= same && r6.line.ok && r5.line.ok;
        parts.push(format!("k = {k}: identical {same}"));
    }
    Line {
        n: 7,
        ok,
        detail: format!("{} denominators avoided; {}", dens.len(), parts.join("; ")),
    }
}

fn main() {
    let c5 = criterion5(&Level::Symbolic);
    let c6 = criterion6(&Level::Symbolic);
    let c7 = criterion7(&c5, &c6);
    let lines = vec![criterion1(), criterion2(), criterion3(), criterion4(), c5.line, c6.line, c7];
    if !report(&lines) {
        std::process::exit(1);
    }
}
