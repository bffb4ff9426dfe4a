use proptest::prelude::*;

use wcg_core::dynamics::{run_dynamics, Scheduler};
use wcg_core::instance::{
    generate_random, parse_document, serialize_instance, InstanceDocument, Metadata,
    RandomGameParams, WeightRange,
};
use wcg_core::oracle::{
    enumerate_states, equilibrium_set, exact_optima, exact_pos, verify_potential_on_graph,
};
use wcg_core::potential::{
    certify_potential, local_ratio, potential_value, ratio_curve, resource_potential,
    CertifyOptions, GammaProfile,
};
use wcg_core::rational::{int, pow, ratio, Rational};
use wcg_core::{GameInstance, State};

const CAP: usize = 5_000;

fn small_game() -> impl Strategy<Value = GameInstance> {
    (
        any::<u64>(),
        1usize..=3,
        2usize..=4,
        1u32..=3,
        1usize..=3,
        1usize..=3,
    )
        .prop_map(
            |(seed, players, resources, max_degree, strategy_count, strategy_size)| {
                generate_random(&RandomGameParams {
                    seed,
                    players,
                    resources,
                    max_degree,
                    strategy_count,
                    strategy_size,
                    weights: WeightRange {
                        max_numerator: 7,
                        max_denominator: 4,
                    },
                })
                .unwrap()
            },
        )
}

fn game_and_state() -> impl Strategy<Value = (GameInstance, State)> {
    small_game().prop_flat_map(|g| {
        let choice: Vec<_> = g.strategy_sets().iter().map(|s| 0..s.len()).collect();
        (Just(g.clone()), choice).prop_map(|(g, c)| {
            let s = g.state(c).unwrap();
            (g, s)
        })
    })
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=50, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
}

/// `beta` in `[1, h+1]` with a small denominator.
fn h_and_beta() -> impl Strategy<Value = (u32, Rational)> {
    (1u32..=6).prop_flat_map(|h| {
        (Just(h), 1i64..=16).prop_flat_map(move |(h, den)| {
            (
                Just(h),
                (den..=den * i64::from(h + 1)).prop_map(move |n| ratio(n, den)),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn social_cost_forms_agree_and_costs_are_positive((g, s) in game_and_state()) {
        prop_assert_eq!(g.social_cost_by_players(&s), g.social_cost_by_resources(&s));
        for i in 0..g.num_players() {
            prop_assert!(g.player_cost(&s, i).unwrap() > int(0));
        }
    }

    #[test]
    fn latency_is_monotone_in_the_user_set(g in small_game(), e in 0usize..4) {
        let e = e % g.num_resources();
        let mut users = Vec::new();
        let mut last = g.latency(e, &users).unwrap();
        for i in 0..g.num_players() {
            users.push(i);
            let next = g.latency(e, &users).unwrap();
            prop_assert!(next > last);
            last = next;
        }
    }

    #[test]
    fn singleton_potential_is_gamma_free(g in small_game(), w in positive_rational(), num in 0i64..=12) {
        let r = &g.resources()[0];
        let k = r.degree;
        let gamma = int(1) + ratio(num, 12) * int(i64::from(k));
        prop_assert_eq!(
            resource_potential(r, &gamma, std::slice::from_ref(&w)).unwrap(),
            pow(&w, k + 1)
        );
    }

    #[test]
    fn potential_increments_telescope(g in small_game(), num in 0i64..=12) {
        let r = &g.resources()[0];
        let gamma = int(1) + ratio(num, 12) * int(i64::from(r.degree));
        let weights: Vec<Rational> = g.players().iter().map(|p| p.weight.clone()).collect();
        let total = resource_potential(r, &gamma, &weights).unwrap();
        let sum: Rational = (1..=weights.len())
            .map(|n| {
                resource_potential(r, &gamma, &weights[..n]).unwrap()
                    - resource_potential(r, &gamma, &weights[..n - 1]).unwrap()
            })
            .sum();
        prop_assert_eq!(total, sum);
    }

    #[test]
    fn social_profile_equals_social_cost((g, s) in game_and_state()) {
        prop_assert_eq!(
            potential_value(&g, &GammaProfile::social(&g), &s).unwrap(),
            g.social_cost(&s).unwrap()
        );
    }

    #[test]
    fn sandwich_holds((g, s) in game_and_state(), delta in (0i64..=4).prop_map(|n| ratio(n, 4))) {
        let d = int(i64::from(g.max_degree()));
        let pot = potential_value(&g, &GammaProfile::pos(&g, &delta).unwrap(), &s).unwrap();
        let cost = g.social_cost(&s).unwrap();
        prop_assert!(pot <= cost);
        prop_assert!(cost <= (&d + int(1)) / (&d + &delta) * pot);
    }

    #[test]
    fn local_ratio_forms_agree_and_lie_in_range(
        g in small_game(),
        e in 0usize..4,
        mask in 1u32..8,
        num in 0i64..=6,
    ) {
        let e = e % g.num_resources();
        let k = g.resources()[e].degree;
        let gamma = int(1) + ratio(num, 6) * int(i64::from(k));
        let users: Vec<usize> = (0..g.num_players()).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!users.is_empty());
        let high = int(1).max(int(i64::from(k)) / &gamma);
        for &i in &users {
            let value = local_ratio(&g, e, &users, i, &gamma).unwrap();
            prop_assert!(value >= int(1) / &gamma && value <= high);
        }
    }

    #[test]
    fn ratio_curve_stays_in_range(x in (0i64..=1000, 1i64..=30).prop_map(|(n, d)| ratio(n, d)), (h, beta) in h_and_beta()) {
        let value = ratio_curve(&x, h, &beta).unwrap();
        prop_assert!(value >= int(1) / &beta);
        prop_assert!(value <= int(1).max(int(i64::from(h)) / &beta));
    }

    #[test]
    fn serialization_round_trips(g in small_game(), seed in proptest::option::of(any::<u64>())) {
        let metadata = Metadata { name: Some("prop".into()), seed, generator: None };
        let text = serialize_instance(&g, &metadata);
        let doc = parse_document(&text).unwrap();
        prop_assert_eq!(&doc, &InstanceDocument { instance: g.clone(), metadata: metadata.clone() });
        prop_assert_eq!(serialize_instance(&doc.instance, &doc.metadata), text);
    }

    #[test]
    fn dynamics_are_deterministic((g, s) in game_and_state(), seed in any::<u64>(), alpha in (4i64..=16).prop_map(|n| ratio(n, 4))) {
        for scheduler in [Scheduler::BestResponse, Scheduler::MaxGain, Scheduler::RoundRobin, Scheduler::Random { seed }] {
            let a = run_dynamics(&g, &s, &alpha, &scheduler, 500, None).unwrap();
            let b = run_dynamics(&g, &s, &alpha, &scheduler, 500, None).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn no_revisits_at_alpha_at_least_d((g, s) in game_and_state(), extra in 0i64..=4, seed in any::<u64>()) {
        let alpha = int(i64::from(g.max_degree())) + ratio(extra, 4);
        let profile = GammaProfile::all_ones(&g);
        for scheduler in [Scheduler::BestResponse, Scheduler::RoundRobin, Scheduler::Random { seed }] {
            let trace = run_dynamics(&g, &s, &alpha, &scheduler, 10_000, Some(&profile)).unwrap();
            prop_assert!(trace.converged);
            prop_assert!(trace.repeat.is_none());
        }
    }

    #[test]
    fn equilibrium_sets_are_nested(g in small_game()) {
        let d = i64::from(g.max_degree());
        let grid: Vec<Rational> = (4..=4 * (d + 1)).map(|n| ratio(n, 4)).collect();
        let sets: Vec<Vec<State>> = grid.iter().map(|a| equilibrium_set(&g, a, CAP).unwrap()).collect();
        for pair in sets.windows(2) {
            prop_assert!(pair[0].iter().all(|s| pair[1].binary_search(s).is_ok()));
        }
        let pos: Vec<Option<Rational>> = grid
            .iter()
            .map(|a| exact_pos(&g, a, CAP).unwrap().value().cloned())
            .collect();
        for pair in pos.windows(2) {
            if let (Some(a), Some(b)) = (&pair[0], &pair[1]) {
                prop_assert!(b <= a);
            } else {
                prop_assert!(pair[0].is_none() || pair[1].is_some());
            }
        }
        let (optima, _) = exact_optima(&g, CAP).unwrap();
        let top = sets.last().unwrap();
        prop_assert!(optima.iter().all(|o| top.binary_search(o).is_ok()));
    }

    #[test]
    fn certificates_are_sound(g in small_game(), num in 0i64..=4) {
        let gamma: Vec<Rational> = g
            .resources()
            .iter()
            .map(|r| int(1) + ratio(num, 4) * int(i64::from(r.degree)))
            .collect();
        let profile = GammaProfile::new(&g, gamma).unwrap();
        let cert = certify_potential(&g, &profile, &CertifyOptions::default()).unwrap();
        prop_assert!(cert.implied_factor >= int(1));
        prop_assert!(cert.implied_factor <= profile.guaranteed_factor(&g));
        prop_assert!(verify_potential_on_graph(&g, &profile, &cert.implied_factor, CAP).unwrap().passed());
        prop_assert!(enumerate_states(&g, CAP).unwrap().count() > 0);
    }
}
