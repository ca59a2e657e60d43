use proptest::prelude::*;

use qtbinom::biject::{lemma2_trace, lemma2h_trace, lemma2v_trace, unscramble};
use qtbinom::identities::{qt_binomial, theorem_formula};
use qtbinom::lattice::{PathWord, Step};
use qtbinom::{gf_scrambled, qbinom, scrambled_cindex, scrambled_corners, BiPoly, Scrambler, Sweep};

fn poly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((0u32..6, 0u32..4, -5i64..6), 0..8).prop_map(|terms| {
        let mut p = BiPoly::zero();
        for (q, t, c) in terms {
            p.add_term(q, t, c);
        }
        p
    })
}

fn word(max_side: usize) -> impl Strategy<Value = PathWord> {
    (0..=max_side, 0..=max_side)
        .prop_flat_map(|(m, n)| {
            let base: Vec<Step> = std::iter::repeat_n(Step::D, m).chain(std::iter::repeat_n(Step::R, n)).collect();
            Just(base).prop_shuffle()
        })
        .prop_map(PathWord::from_steps)
}

fn scrambler_for(w: &PathWord, hm: u64, vm: u64) -> Scrambler {
    Scrambler::new(
        (0..w.m()).filter(|&h| hm >> h & 1 == 1),
        (1..=w.n()).filter(|&v| vm >> v & 1 == 1),
    )
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&BiPoly::one()), a.clone());
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn shift_is_monomial_product(a in poly(), dq in 0u32..5, dt in 0u32..5) {
        prop_assert_eq!(a.shift(dq, dt), a.mul(&BiPoly::monomial(dq, dt, 1)));
    }

    #[test]
    fn specialization_is_a_homomorphism(a in poly(), b in poly()) {
        for (x, y) in [(true, false), (false, true), (true, true)] {
            prop_assert_eq!(a.mul(&b).specialize(x, y), a.specialize(x, y).mul(&b.specialize(x, y)));
        }
    }

    #[test]
    fn json_round_trip(a in poly()) {
        prop_assert_eq!(BiPoly::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn word_text_round_trip(w in word(8)) {
        prop_assert_eq!(w.to_string().parse::<PathWord>().unwrap(), w);
    }

    #[test]
    fn scrambler_text_round_trip(w in word(8), hm in any::<u64>(), vm in any::<u64>()) {
        let o = scrambler_for(&w, hm, vm);
        prop_assert_eq!(o.to_string().parse::<Scrambler>().unwrap(), o);
    }

    #[test]
    fn mirror_transports_scrambled_statistics(w in word(6), hm in any::<u64>(), vm in any::<u64>()) {
        let o = scrambler_for(&w, hm, vm);
        let (m, n) = (w.m(), w.n());
        let wm = w.mirror();
        let om = o.mirror(m, n);
        let k = scrambled_corners(&w, &o).unwrap();
        prop_assert_eq!(scrambled_corners(&wm, &om).unwrap(), k);
        let total = (m + n) as u32 * k;
        prop_assert_eq!(scrambled_cindex(&wm, &om).unwrap(), total - scrambled_cindex(&w, &o).unwrap());
        prop_assert_eq!(wm.mirror(), w);
    }

    #[test]
    fn scrambled_corners_bounded(w in word(7), hm in any::<u64>(), vm in any::<u64>()) {
        let o = scrambler_for(&w, hm, vm);
        let k = scrambled_corners(&w, &o).unwrap() as usize;
        prop_assert!(k >= w.corners() as usize);
        prop_assert!(k <= w.corners() as usize + o.d() + o.r());
    }

    #[test]
    fn lemma_maps_keep_their_contracts(w in word(5), hm in any::<u64>(), vm in any::<u64>()) {
        let o = scrambler_for(&w, hm, vm);
        if o.h().contains(&0) && o.v().contains(&1) {
            let t = lemma2_trace(&w, &o).unwrap();
            prop_assert_eq!((t.delta_cindex, t.delta_corners), (-1, -1));
        }
        for &v in o.v() {
            if v >= 2 && !o.v().contains(&(v - 1)) {
                let t = lemma2v_trace(&w, &o, v).unwrap();
                prop_assert_eq!((t.delta_cindex, t.delta_corners), (-1, 0));
                prop_assert_eq!(&t.source_class.u, &t.target_class.u);
                prop_assert_eq!(&t.source_class.v, &t.target_class.v);
            }
        }
        for &h in o.h() {
            if h >= 1 && !o.h().contains(&(h - 1)) {
                let t = lemma2h_trace(&w, &o, h).unwrap();
                prop_assert_eq!((t.delta_cindex, t.delta_corners), (-1, 0));
                prop_assert_eq!(&t.source_class.u, &t.target_class.u);
                prop_assert_eq!(&t.source_class.v, &t.target_class.v);
            }
        }
        let (x, red) = unscramble(&w, &o).unwrap();
        prop_assert!(red.is_reduced());
        let dk = o.d().min(o.r()) as u32;
        prop_assert_eq!(scrambled_corners(&x, &red).unwrap() + dk, scrambled_corners(&w, &o).unwrap());
    }

    #[test]
    fn theorem_on_random_scramblers(m in 0usize..6, n in 0usize..6, hm in any::<u64>(), vm in any::<u64>()) {
        let o = Scrambler::new((0..m).filter(|&h| hm >> h & 1 == 1), (1..=n).filter(|&v| vm >> v & 1 == 1));
        let brute = gf_scrambled(m, n, &o, Sweep::serial()).unwrap();
        prop_assert_eq!(theorem_formula(m, n, &o).unwrap(), brute.clone());
        let red = o.reduced();
        let shifted = gf_scrambled(m, n, &red, Sweep::serial()).unwrap()
            .shift((o.s() - red.s()) as u32, o.d().min(o.r()) as u32);
        prop_assert_eq!(shifted, brute);
    }

    #[test]
    fn qbinom_symmetry_and_pascal(n in 1u32..20, k in 0i64..20) {
        prop_assert_eq!(qbinom(n, k), qbinom(n, n as i64 - k));
        let pascal = &qbinom(n - 1, k - 1) + &qbinom(n - 1, k).shift(k.max(0) as u32);
        prop_assert_eq!(qbinom(n, k), pascal);
    }

    #[test]
    fn qt_binomial_specializes_to_qbinom(m in 0usize..8, n in 0usize..8) {
        prop_assert_eq!(qt_binomial(m, n).specialize(false, true), qbinom((m + n) as u32, m as i64).to_bi());
    }
}
