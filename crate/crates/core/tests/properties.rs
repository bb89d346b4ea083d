use num_traits::Zero;
use pasted_core::empirical::{estimate_frequencies, reconstruct_weight, CountData};
use pasted_core::numeric::{int, rat, Mode, Rational, Value};
use pasted_core::softmax::{
    context_softmax, gauge_shift, glue_to_weight, gluing_check, max_family_error, maxent_softmax, represent_weight,
    scale_coordinates, LinkFunction, ScoreAssignment,
};
use pasted_core::states::{classical_membership, enumerate_two_valued_states};
use pasted_core::weights::{check_admissible, cyclic_sum, path_weight};
use pasted_core::{cycle_logic, EventStructure, Weight};
use proptest::prelude::*;

fn link() -> impl Strategy<Value = LinkFunction> {
    prop_oneof![
        (0.1f64..3.0).prop_map(|beta| LinkFunction::Exponential { beta }),
        Just(LinkFunction::Identity),
        (0.2f64..4.0).prop_map(|k| LinkFunction::Power { k }),
    ]
}

fn score_for(link: &LinkFunction, raw: f64) -> f64 {
    match link {
        LinkFunction::Exponential { .. } => raw * 10.0,
        _ => 0.01 + raw.abs() * 50.0,
    }
}

fn odd_or_even_cycle() -> impl Strategy<Value = EventStructure> {
    (3usize..=8).prop_map(|n| cycle_logic(n).unwrap())
}

/// A strictly positive admissible rational weight: a mixture of two-valued
/// states pulled towards the uniform weight.
fn positive_weight(e: &EventStructure, picks: &[(usize, u8)], t: (i64, i64)) -> Weight {
    let states = enumerate_two_valued_states(e, None).unwrap();
    let total: i64 = picks.iter().map(|&(_, w)| w as i64 + 1).sum();
    let mut p = vec![Rational::zero(); e.atom_count()];
    for &(s, w) in picks {
        let v = &states[s % states.len()];
        for (a, slot) in p.iter_mut().enumerate() {
            if v.get(a) {
                *slot += rat(w as i64 + 1, total);
            }
        }
    }
    let t = rat(t.0, t.1);
    let third = rat(1, 3);
    Weight::rational(p.into_iter().map(|x| (int(1) - &t) * x + &t * &third).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_context_distribution_sums_to_one(
        e in odd_or_even_cycle(), link in link(), raw in prop::collection::vec(-1.0f64..1.0, 48), per_context in any::<bool>()
    ) {
        let scores = if per_context {
            ScoreAssignment::per_context_f64(
                e.contexts().iter().enumerate().map(|(i, c)| (0..c.len()).map(|j| score_for(&link, raw[3 * i + j])).collect()).collect(),
            )
        } else {
            ScoreAssignment::global_f64((0..e.atom_count()).map(|a| score_for(&link, raw[a])).collect())
        };
        let f = context_softmax(&e, &scores, &link).unwrap();
        for d in &f.contexts {
            let s: f64 = d.probabilities.iter().map(Value::to_f64).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(d.probabilities.iter().all(|p| p.to_f64() > 0.0));
        }
    }

    #[test]
    fn representation_round_trips(
        n in prop::sample::select(vec![3usize, 4, 5, 6, 7]),
        link in link(),
        picks in prop::collection::vec((0usize..100, any::<u8>()), 1..5),
        t in (1i64..=20).prop_map(|k| (k, 20)),
        r in 0.001f64..50.0,
        use_path in any::<bool>(),
    ) {
        let e = cycle_logic(n).unwrap();
        let p = if use_path { path_weight(&e, &Value::Float(r)).unwrap() } else { positive_weight(&e, &picks, t) };
        let scores = represent_weight(&e, &p, &link, None).unwrap();
        let f = context_softmax(&e, &scores, &link).unwrap();
        prop_assert!(max_family_error(&e, &f, &p.to_f64_vec()) <= 1e-10);
        if !use_path {
            let exact = represent_weight(&e, &p, &LinkFunction::Identity, None).unwrap();
            let f = context_softmax(&e, &exact, &LinkFunction::Identity).unwrap();
            prop_assert_eq!(f.mode, Mode::Rational);
            prop_assert_eq!(glue_to_weight(&e, &f, 0.0).unwrap(), p);
        }
    }

    #[test]
    fn gauge_shift_leaves_probabilities_alone(
        raw in prop::collection::vec(-5.0f64..5.0, 10), beta in 0.1f64..3.0, shift in -6.0f64..6.0
    ) {
        let e = cycle_logic(5).unwrap();
        let link = LinkFunction::Exponential { beta };
        let scores = ScoreAssignment::global_f64(raw);
        let comp = e.connected_components().remove(0);
        let g = gauge_shift(&e, &scores, shift, &comp, &link).unwrap();
        let before = context_softmax(&e, &scores, &link).unwrap();
        let after = context_softmax(&e, &g.scores, &link).unwrap();
        for (x, y) in before.contexts.iter().zip(&after.contexts) {
            for (p, q) in x.probabilities.iter().zip(&y.probabilities) {
                prop_assert!((p.to_f64() - q.to_f64()).abs() <= 1e-12);
            }
        }
        // the shifted coordinates are the old ones times exp(beta * shift)
        let factor = g.coordinate_scale;
        prop_assert!((factor - (beta * shift).exp()).abs() <= 1e-12 * factor);
        for (x, y) in before.contexts.iter().zip(&after.contexts) {
            for (q0, q1) in x.coordinates.iter().zip(&y.coordinates) {
                prop_assert!((q1.to_f64() / q0.to_f64() - factor).abs() <= 1e-12 * factor);
            }
        }
        let scaled = scale_coordinates(&e, &before, &comp, &Value::Float(factor)).unwrap();
        for (x, y) in scaled.contexts.iter().zip(&after.contexts) {
            for (p, q) in x.probabilities.iter().zip(&y.probabilities) {
                prop_assert!((p.to_f64() - q.to_f64()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn glued_families_give_admissible_weights(
        e in odd_or_even_cycle(), link in link(), raw in prop::collection::vec(-1.0f64..1.0, 16), tol in 1e-12f64..1e-6
    ) {
        let scores = ScoreAssignment::global_f64((0..e.atom_count()).map(|a| score_for(&link, raw[a])).collect());
        let f = context_softmax(&e, &scores, &link).unwrap();
        let rep = gluing_check(&e, &f, tol).unwrap();
        for c in &rep.cycles {
            prop_assert!((c.product.to_f64() - 1.0).abs() <= 1e-12);
        }
        if let Ok(w) = glue_to_weight(&e, &f, tol) {
            prop_assert!(check_admissible(&e, &w, tol).unwrap().admissible);
        }
    }

    #[test]
    fn maxent_beats_perturbations(
        scores in prop::collection::vec(-3.0f64..3.0, 3..6),
        frac in 0.05f64..0.95,
        dirs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 6), 100),
    ) {
        let (lo, hi) = scores.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &u| (l.min(u), h.max(u)));
        prop_assume!(hi - lo > 0.1);
        let target = lo + frac * (hi - lo);
        let sol = maxent_softmax(&scores, target, 1e-12).unwrap();
        let entropy = |p: &[f64]| -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>();
        let h0 = entropy(&sol.distribution);
        let k = scores.len();
        // orthonormal basis of span{1, u} for projecting perturbations
        let ones: Vec<f64> = vec![1.0 / (k as f64).sqrt(); k];
        let mean = scores.iter().sum::<f64>() / k as f64;
        let centred: Vec<f64> = scores.iter().map(|u| u - mean).collect();
        let norm = centred.iter().map(|x| x * x).sum::<f64>().sqrt();
        let second: Vec<f64> = centred.iter().map(|x| x / norm).collect();
        for d in &dirs {
            let mut d: Vec<f64> = d[..k].to_vec();
            for b in [&ones, &second] {
                let dot: f64 = d.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                d.iter_mut().zip(b.iter()).for_each(|(x, y)| *x -= dot * y);
            }
            let room = sol.distribution.iter().zip(&d).filter(|(_, &x)| x < 0.0).map(|(p, x)| p / -x).fold(f64::INFINITY, f64::min);
            let eps = if room.is_finite() { 0.5 * room } else { 0.1 };
            let q: Vec<f64> = sol.distribution.iter().zip(&d).map(|(p, x)| (p + eps * x).max(0.0)).collect();
            let z: f64 = q.iter().sum();
            let q: Vec<f64> = q.iter().map(|x| x / z).collect();
            prop_assert!(h0 - entropy(&q) >= -1e-9);
        }
    }

    #[test]
    fn path_cyclic_sum_is_exact(n in 3usize..=9, num in 0i64..200, den in 1i64..50) {
        let e = cycle_logic(n).unwrap();
        let r = rat(num, den);
        let p = path_weight(&e, &Value::Rational(r.clone())).unwrap();
        prop_assert!(check_admissible(&e, &p, 0.0).unwrap().admissible);
        prop_assert_eq!(cyclic_sum(&e, &p).unwrap(), Value::Rational(int(n as i64) / (int(2) + r)));
    }

    #[test]
    fn membership_certificates_verify(n in 3usize..=7, num in 0i64..100, den in 1i64..40) {
        let e = cycle_logic(n).unwrap();
        let states = enumerate_two_valued_states(&e, None).unwrap();
        let p = path_weight(&e, &Value::Rational(rat(num, den))).unwrap();
        let m = classical_membership(&e, &p, Some(&states)).unwrap();
        prop_assert!(m.verify(&states));
        // path weights are classical exactly when the cyclic sum respects floor(n/2)
        let classical = rat(n as i64 * den, 2 * den + num) <= int((n / 2) as i64);
        prop_assert_eq!(m.is_classical(), classical);
    }

    #[test]
    fn exact_admissible_counts_reconstruct_identically(
        n in prop::sample::select(vec![3usize, 4, 5, 6]),
        picks in prop::collection::vec((0usize..100, any::<u8>()), 1..4),
        scale in 1u64..4,
    ) {
        let e = cycle_logic(n).unwrap();
        let p = positive_weight(&e, &picks, (0, 1));
        let exact = p.to_rational_vec().unwrap();
        let lcm = exact.iter().fold(num_bigint::BigInt::from(1), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
        let big = Rational::from_integer(lcm) * int(scale as i64);
        let counts: Vec<Vec<u64>> = e.contexts().iter().map(|c| {
            c.atoms().iter().map(|&a| (&exact[a] * &big).to_integer().try_into().unwrap()).collect()
        }).collect();
        let d = CountData::new(&e, counts).unwrap();
        for f in &estimate_frequencies(&d).contexts {
            prop_assert_eq!(f.iter().sum::<Rational>(), int(1));
        }
        let r = reconstruct_weight(&e, &d).unwrap();
        prop_assert_eq!(&r.pooled, &exact);
        prop_assert_eq!(r.projected, p);
        prop_assert!(r.residuals.iter().all(Zero::is_zero));
    }
}
