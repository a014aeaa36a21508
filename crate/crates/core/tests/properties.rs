use proptest::prelude::*;

use qcfa::dfr::{build_named_dfr, DfrSpec};
use qcfa::group::{free_reduce, Gen, GroupFamily, Presentation, Word};
use qcfa::io;
use qcfa::linalg::{dft_matrix, measure, permutation_matrix, Matrix, Partition, StateVector};
use qcfa::machine::{assemble_poly_machine, run_montecarlo, transform_overgroup, Analyzer, McConfig, QcfaMachine};
use qcfa::scalar::{Scalar, Tolerance, Q};
use std::sync::OnceLock;

fn word(alphabet: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..alphabet, 0..=max_len).prop_map(|v| Word(v.into_iter().map(Gen::from_code).collect()))
}

fn families() -> Vec<Presentation> {
    vec![
        Presentation::z(),
        Presentation::free(2),
        Presentation::free(3),
        Presentation::free_abelian(2),
        Presentation::cyclic(5),
        Presentation::new(GroupFamily::AbelianMixed(1, vec![2, 4])).unwrap(),
        Presentation::new(GroupFamily::FreeProductZWithZr(2)).unwrap(),
        Presentation::new(GroupFamily::DirectProductOfFrees(vec![2, 1])).unwrap(),
        Presentation::z_over_2z(),
        Presentation::dinf_over_z(),
    ]
}

fn family_and_word(max_len: usize) -> impl Strategy<Value = (Presentation, Word)> {
    (0..families().len()).prop_flat_map(move |i| {
        let p = families()[i].clone();
        let a = p.alphabet_size();
        (Just(p), word(a, max_len))
    })
}

fn z_machine() -> &'static QcfaMachine {
    static M: OnceLock<QcfaMachine> = OnceLock::new();
    M.get_or_init(|| {
        let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        f.certify(30).unwrap();
        assemble_poly_machine(&f, 0.125).unwrap()
    })
}

fn dinf_pair() -> &'static (QcfaMachine, QcfaMachine) {
    static M: OnceLock<(QcfaMachine, QcfaMachine)> = OnceLock::new();
    M.get_or_init(|| {
        let t = Presentation::with_labels(GroupFamily::FreeAbelian(1), vec!["t".into()]).unwrap();
        let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap().relabel(t).unwrap();
        f.certify(30).unwrap();
        let base = assemble_poly_machine(&f, 0.125).unwrap();
        let lifted = transform_overgroup(&base, &Presentation::dinf_over_z()).unwrap();
        (base, lifted)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn free_reduce_idempotent_and_shortening(w in word(6, 30)) {
        let r = free_reduce(&w, 3).unwrap();
        prop_assert!(r.len() <= w.len());
        prop_assert_eq!(free_reduce(&r, 3).unwrap(), r);
    }

    #[test]
    fn word_times_inverse_is_identity((p, w) in family_and_word(16)) {
        prop_assert!(p.is_identity(&w.concat(&w.inverse())).unwrap());
        prop_assert!(p.is_identity(&w.inverse().concat(&w)).unwrap());
    }

    #[test]
    fn equal_elements_share_length_and_canonical_form((p, w) in family_and_word(8), cut in 0usize..9, pad in word(4, 4)) {
        let pad = Word(pad.0.into_iter().filter(|g| g.code() < p.alphabet_size()).collect());
        let cut = cut.min(w.len());
        let mut v = w.0[..cut].to_vec();
        v.extend(pad.concat(&pad.inverse()).0);
        v.extend_from_slice(&w.0[cut..]);
        let v = Word(v);
        prop_assert!(p.is_identity(&w.concat(&v.inverse())).unwrap());
        prop_assert_eq!(p.word_length(&w).unwrap(), p.word_length(&v).unwrap());
        prop_assert_eq!(p.canonical_within(&w, 8).unwrap(), p.canonical_within(&v, 8).unwrap());
    }

    #[test]
    fn parse_print_round_trip((p, w) in family_and_word(12)) {
        prop_assert_eq!(p.parse_word(&p.format_word(&w)).unwrap(), w.clone());
        prop_assert_eq!(io::word_from_json(&io::word_to_json(&w)).unwrap(), w);
    }

    #[test]
    fn exact_products_associate_and_adjoint_reverses(a in word(4, 6), b in word(4, 6), c in word(4, 6)) {
        let f = build_named_dfr(&DfrSpec::F2).unwrap();
        let r = &f.reps[0];
        let (ma, mb, mc) = (r.eval(&a).unwrap(), r.eval(&b).unwrap(), r.eval(&c).unwrap());
        prop_assert_eq!(ma.mul(&mb).unwrap().mul(&mc).unwrap(), ma.mul(&mb.mul(&mc).unwrap()).unwrap());
        prop_assert_eq!(ma.mul(&mb).unwrap().adjoint(), mb.adjoint().mul(&ma.adjoint()).unwrap());
        // homomorphism, exactly
        prop_assert_eq!(r.eval(&a.concat(&b)).unwrap(), ma.mul(&mb).unwrap());
    }

    #[test]
    fn float_homomorphism_and_character_bound(a in word(2, 20), b in word(2, 20)) {
        let f = build_named_dfr(&DfrSpec::ZNonAlgebraic { delta: 0.5 }).unwrap();
        let tol = Tolerance::default();
        for r in &f.reps {
            let lhs = r.eval(&a.concat(&b)).unwrap();
            let rhs = r.eval(&a).unwrap().mul(&r.eval(&b).unwrap()).unwrap();
            prop_assert!(lhs.approx_eq(&rhs, &tol));
            prop_assert!(r.character_magnitude(&a).unwrap() <= r.dim as f64 + tol.eps_num);
        }
    }

    #[test]
    fn measurement_probabilities_sum_to_one(d in prop::sample::select(vec![2usize, 3, 4, 8]), v in 0usize..8, q in 0usize..8) {
        let psi = StateVector::basis(d, q % d);
        let u = dft_matrix(d).unwrap().mul(&permutation_matrix(d, v % d + 1).unwrap()).unwrap();
        let psi = u.apply(&psi).unwrap();
        let outs = measure(&psi, &Partition::first_vs_rest(d)).unwrap();
        let total = outs.iter().fold(Scalar::zero(), |s, o| s.add(&o.probability));
        prop_assert!((total.to_f64() - 1.0).abs() < 1e-12);
        if d == 2 || d == 4 || d == 8 {
            prop_assert!(total.is_exact_one());
        }
    }

    #[test]
    fn sweeps_preserve_norm_exactly(w in word(2, 24)) {
        let m = z_machine();
        let an = Analyzer::new(m).unwrap();
        let mut st = an.start();
        for &g in w.0.iter().rev() {
            an.push_left(&mut st, g);
            for v in &st.vecs {
                let n = v.iter().fold(Scalar::zero(), |s, x| s.add(&x.abs2()));
                prop_assert!(n.is_exact_one());
            }
        }
    }

    #[test]
    fn lifted_rounds_match_rewritten_word(w in word(4, 10)) {
        let (base, lifted) = dinf_pair();
        let GroupFamily::VirtualOvergroup(_, table) = &lifted.group.family else { unreachable!() };
        let (coset, h) = table.rewrite(&w);
        let a = Analyzer::new(lifted).unwrap().analyze(&w).unwrap();
        if coset == 0 {
            let b = Analyzer::new(base).unwrap().analyze(&h).unwrap();
            prop_assert_eq!(a.round_pass, b.round_pass);
            prop_assert_eq!(a.p_rej.is_exact_zero(), b.p_rej.is_exact_zero());
        } else {
            prop_assert!(a.p_acc.is_exact_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn montecarlo_is_deterministic(w in word(2, 6), seed in any::<u64>()) {
        let m = z_machine();
        let cfg = McConfig { trials: 200, seed, ..McConfig::default() };
        prop_assert_eq!(run_montecarlo(m, &w, &cfg).unwrap(), run_montecarlo(m, &w, &cfg).unwrap());
    }

    #[test]
    fn machine_json_round_trip(eps in prop::sample::select(vec![0.5f64, 0.25, 0.125])) {
        let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        f.certify(20).unwrap();
        let m = assemble_poly_machine(&f, eps).unwrap();
        prop_assert_eq!(io::machine_from_json(&io::machine_to_json(&m)).unwrap(), m);
        prop_assert_eq!(io::dfr_from_json(&io::dfr_to_json(&f)).unwrap(), f);
    }
}

#[test]
fn rational_parse_print() {
    for s in ["0", "3", "-7/4", "123456789012345678901234567891/7"] {
        let q: Q = s.parse().unwrap();
        assert_eq!(q.to_string(), s);
    }
}

#[test]
fn unit_matrix_products_stay_unitary() {
    let tol = Tolerance::default();
    let m = Matrix::product(8, [&dft_matrix(8).unwrap(), &permutation_matrix(8, 3).unwrap()]).unwrap();
    assert!(m.is_unitary(&tol));
}
