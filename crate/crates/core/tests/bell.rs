use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corrscen::bell::{
    decide_ak, decide_p4, embed_bell_to_ak, embed_bell_to_p4, embed_bgp_to_p5, is_no_signaling,
    local_polytope_membership, pr_box, time_reverse_model, time_reverse_relabel, BellDecision,
    BgpClassical, BgpModel, BgpQuantum, ConditionalBox, LocalVerdict, Party,
};
use corrscen::models::random::{random_model, random_simplex};
use corrscen::quantum::constructions::{bell_basis_measurement, singlet};
use corrscen::quantum::matrix::{bloch_observable, born, kron_all, observable_projectors};
use corrscen::scenario::standard::p4;

fn bits(k: usize) -> Vec<Party> {
    vec![
        Party {
            settings: 2,
            outcomes: 2
        };
        k
    ]
}

fn mermin() -> ConditionalBox {
    ConditionalBox::from_fn(bits(3), |x, a| {
        let ys: usize = x.iter().sum();
        if ys % 2 == 1 {
            return 0.125;
        }
        let parity = a.iter().sum::<usize>() % 2;
        let want = usize::from(ys == 2);
        if parity == want {
            0.25
        } else {
            0.0
        }
    })
    .unwrap()
}

#[test]
fn ghz_with_z_measurements_is_local() {
    let b = ConditionalBox::from_fn(bits(3), |_, a| {
        if a.iter().all(|&v| v == a[0]) {
            0.5
        } else {
            0.0
        }
    })
    .unwrap();
    let p = embed_bell_to_ak(&b, &vec![vec![0.5, 0.5]; 3]).unwrap();
    match decide_ak(&p, 3).unwrap() {
        BellDecision::Classical { model } => {
            assert!(model.evaluate().max_abs_diff(&p).unwrap() < 1e-9);
        }
        other => panic!("expected a classical model, got {other:?}"),
    }
}

#[test]
fn mermin_box_is_nonlocal() {
    let b = mermin();
    assert!(is_no_signaling(&b));
    let p = embed_bell_to_ak(&b, &vec![vec![0.5, 0.5]; 3]).unwrap();
    match decide_ak(&p, 3).unwrap() {
        BellDecision::NonClassical { certificate } => assert!(certificate.gap > 1e-9),
        other => panic!("expected a certificate, got {other:?}"),
    }
}

#[test]
fn noisy_pr_threshold() {
    let pr = pr_box();
    let noisy = |v: f64| {
        let table = pr
            .table()
            .iter()
            .map(|q| v * q + (1.0 - v) * 0.25)
            .collect();
        ConditionalBox::new(pr.parties().to_vec(), table).unwrap()
    };
    for (v, local) in [(0.3, true), (0.5, true), (0.52, false), (0.9, false)] {
        let p = embed_bell_to_p4(&noisy(v), &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(decide_p4(&p).unwrap().is_classical(), local, "v = {v}");
        let direct = matches!(
            local_polytope_membership(&noisy(v)).unwrap(),
            LocalVerdict::Local { .. }
        );
        assert_eq!(direct, local, "v = {v}");
    }
}

fn random_kernel<R: Rng>(rng: &mut R, outer: usize, inner: usize, d: usize) -> Vec<Vec<Vec<f64>>> {
    (0..outer)
        .map(|_| (0..inner).map(|_| random_simplex(rng, d)).collect())
        .collect()
}

#[test]
fn classical_bgp_matches_hand_computation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let (k1, k2) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let m = BgpClassical {
            px: random_simplex(&mut rng, 2),
            pz: random_simplex(&mut rng, 2),
            lambda1: random_simplex(&mut rng, k1),
            lambda2: random_simplex(&mut rng, k2),
            alice: random_kernel(&mut rng, 2, k1, 2),
            bob: random_kernel(&mut rng, k1, k2, 2),
            charlie: random_kernel(&mut rng, 2, k2, 2),
        };
        let p = embed_bgp_to_p5(&BgpModel::Classical(m.clone())).unwrap();
        assert_eq!(p.names(), ["x", "a", "b", "c", "z"]);
        for (t, v) in p.iter() {
            let (x, a, b, c, z) = (t[0], t[1], t[2], t[3], t[4]);
            let mut q = 0.0;
            for l1 in 0..k1 {
                for l2 in 0..k2 {
                    q += m.lambda1[l1]
                        * m.lambda2[l2]
                        * m.alice[x][l1][a]
                        * m.bob[l1][l2][b]
                        * m.charlie[z][l2][c];
                }
            }
            assert!((v - m.px[x] * m.pz[z] * q).abs() < 1e-12);
        }
    }
}

#[test]
fn quantum_bgp_matches_born_rule() {
    let zx: Vec<Vec<_>> = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]
        .iter()
        .map(|&n| {
            let (p, m) = observable_projectors(&bloch_observable(n));
            vec![p, m]
        })
        .collect();
    let q = BgpQuantum {
        rho1: singlet(),
        rho2: singlet(),
        alice: zx.clone(),
        middle: bell_basis_measurement(),
        charlie: zx.clone(),
        px: vec![0.25, 0.75],
        pz: vec![0.5, 0.5],
    };
    let p = embed_bgp_to_p5(&BgpModel::Quantum(q.clone())).unwrap();
    let rho = kron_all([&q.rho1, &q.rho2]);
    for (t, v) in p.iter() {
        let (x, a, b, c, z) = (t[0], t[1], t[2], t[3], t[4]);
        let e = kron_all([&zx[x][a], &q.middle[b], &zx[z][c]]);
        let expected = q.px[x] * q.pz[z] * born(&rho, &e);
        assert!((v - expected).abs() < 1e-12, "{t:?}: {v} vs {expected}");
    }
}

#[test]
fn time_reversal_commutes_with_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let s = p4(2);
    for _ in 0..50 {
        let m = random_model(&mut rng, &s, 3, 0.3);
        let lhs = time_reverse_model(&m).unwrap().evaluate();
        let rhs = time_reverse_relabel(&m.evaluate()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }
}
