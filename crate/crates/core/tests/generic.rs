use proptest::prelude::*;
use skrates_core::generic::{
    eval_inner_joint_thm3, eval_inner_sep_thm2, eval_outer_thm1, optimize_generic, AuxCardinalities, AuxSpecJoint,
    AuxSpecOuter, AuxSpecSeparate, Which,
};
use skrates_core::models::BecBscModel;
use skrates_core::{Axis, FinitePmf, Kernel};

const NT: usize = 2;
const NQ: usize = 2;
const NV: usize = 3;
const NU: usize = 2;

fn rows(n_rows: usize, width: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.01..1.0f64], n_rows * width).prop_map(move |mut w| {
        for row in w.chunks_mut(width) {
            if row.iter().all(|&x| x == 0.0) {
                row[0] = 1.0;
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        w
    })
}

fn kernel(parent: (&str, usize), child: (&str, usize), table: Vec<f64>) -> Kernel {
    Kernel::new(vec![Axis::new(parent.0, parent.1)], vec![Axis::new(child.0, child.1)], table).unwrap()
}

#[derive(Debug, Clone)]
struct Tables {
    tx: Vec<f64>,
    q_t: Vec<f64>,
    v_a: Vec<f64>,
    u_v: Vec<f64>,
    vx_a: Vec<f64>,
}

fn tables() -> impl Strategy<Value = Tables> {
    (rows(1, NT * 2), rows(NT, NQ), rows(2, NV), rows(NV, NU), rows(2, NV * 2))
        .prop_map(|(tx, q_t, v_a, u_v, vx_a)| Tables { tx, q_t, v_a, u_v, vx_a })
}

/// Auxiliaries with every label relabeled by the given permutations.
fn build(t: &Tables, pt: &[usize], pq: &[usize], pv: &[usize], pu: &[usize]) -> (AuxSpecSeparate, AuxSpecJoint) {
    let permute =
        |table: &[f64], np: usize, nc: usize, prow: &dyn Fn(usize) -> usize, pcol: &dyn Fn(usize) -> usize| {
            let mut out = vec![0.0; np * nc];
            for r in 0..np {
                for c in 0..nc {
                    out[prow(r) * nc + pcol(c)] = table[r * nc + c];
                }
            }
            out
        };
    let id = |i: usize| i;
    let tx = permute(&t.tx, NT, 2, &|r| pt[r], &id);
    let p_tx = FinitePmf::new(vec![Axis::new("T", NT), Axis::new("X", 2)], tx).unwrap();
    let q_t = kernel(("T", NT), ("Q", NQ), permute(&t.q_t, NT, NQ, &|r| pt[r], &|c| pq[c]));
    let v_a = kernel(("A", 2), ("V", NV), permute(&t.v_a, 2, NV, &id, &|c| pv[c]));
    let u_v = kernel(("V", NV), ("U", NU), permute(&t.u_v, NV, NU, &|r| pv[r], &|c| pu[c]));
    let vx = permute(&t.vx_a, 2, NV * 2, &id, &|c| pv[c / 2] * 2 + c % 2);
    let vx_a = Kernel::new(vec![Axis::new("A", 2)], vec![Axis::new("V", NV), Axis::new("X", 2)], vx).unwrap();
    let sep = AuxSpecSeparate::new(p_tx, q_t, v_a, u_v.clone()).unwrap();
    (sep, AuxSpecJoint::new(vx_a, u_v).unwrap())
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn outer_of(sep: &AuxSpecSeparate) -> AuxSpecOuter {
    sep.without_q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inner_never_beats_outer_on_same_auxiliaries(
        t in tables(), zeta in 0.0..=0.5f64, eps in 0.0..=0.5f64, frac in 0.0..1.0f64,
    ) {
        // Degraded sources: β < 2ε.
        let sys = BecBscModel::new(zeta, frac * 2.0 * eps, eps).unwrap().system();
        let ids: Vec<Vec<usize>> = [NT, NQ, NV, NU].iter().map(|&n| (0..n).collect()).collect();
        let (sep, _) = build(&t, &ids[0], &ids[1], &ids[2], &ids[3]);
        let inner = eval_inner_sep_thm2(&sys, &sep).unwrap();
        let outer = eval_outer_thm1(&sys, &outer_of(&sep)).unwrap();
        if inner.feasible(0.0) && outer.slack >= 0.0 {
            prop_assert!(inner.rate <= outer.rate + 1e-9, "{} > {}", inner.rate, outer.rate);
        }
    }

    #[test]
    fn evaluators_ignore_labels(
        t in tables(), pt in perm(NT), pq in perm(NQ), pv in perm(NV), pu in perm(NU),
        zeta in 0.0..=0.5f64, beta in 0.0..=1.0f64, eps in 0.0..=0.5f64,
    ) {
        let sys = BecBscModel::new(zeta, beta, eps).unwrap().system();
        let ids: Vec<Vec<usize>> = [NT, NQ, NV, NU].iter().map(|&n| (0..n).collect()).collect();
        let (sep0, joint0) = build(&t, &ids[0], &ids[1], &ids[2], &ids[3]);
        let (sep1, joint1) = build(&t, &pt, &pq, &pv, &pu);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10;

        let (a, b) = (eval_outer_thm1(&sys, &outer_of(&sep0)).unwrap(), eval_outer_thm1(&sys, &outer_of(&sep1)).unwrap());
        prop_assert!(close(a.rate, b.rate) && close(a.slack, b.slack));
        let (a, b) = (eval_inner_sep_thm2(&sys, &sep0).unwrap(), eval_inner_sep_thm2(&sys, &sep1).unwrap());
        prop_assert!(close(a.rate, b.rate) && close(a.slack_u, b.slack_u) && close(a.slack_v, b.slack_v));
        let (a, b) = (eval_inner_joint_thm3(&sys, &joint0).unwrap(), eval_inner_joint_thm3(&sys, &joint1).unwrap());
        prop_assert!(close(a.rate, b.rate) && close(a.slack_u, b.slack_u) && close(a.slack_v, b.slack_v));
    }
}

#[test]
fn restarts_never_lower_the_result() {
    let sys = BecBscModel::new(0.05, 0.3, 0.1).unwrap().system();
    let cards = AuxCardinalities { t: 2, q: 2, u: 2, v: 2 };
    for which in [Which::Outer, Which::InnerSep, Which::InnerJoint] {
        let mut last = f64::NEG_INFINITY;
        for restarts in 1..=4 {
            let r = optimize_generic(&sys, which, cards, restarts, 11).unwrap();
            assert!(!r.certified);
            assert!(r.rk >= last, "{which:?}: {} < {last}", r.rk);
            last = r.rk;
        }
    }
}

#[test]
fn search_is_reproducible() {
    let sys = BecBscModel::new(0.05, 0.3, 0.1).unwrap().system();
    let cards = AuxCardinalities { t: 2, q: 2, u: 2, v: 2 };
    let a = optimize_generic(&sys, Which::InnerSep, cards, 3, 5).unwrap();
    let b = optimize_generic(&sys, Which::InnerSep, cards, 3, 5).unwrap();
    assert_eq!(a, b);
}
