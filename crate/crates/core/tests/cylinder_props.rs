mod common;

use common::cylinder::*;
use proptest::prelude::*;
use sahom::cylinder::{build_directed_cyl, build_theta, build_zigzag_cyl, map_cylinder, Direction, Piece};
use sahom::fixtures;
use sahom::poly::int;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn theta_has_the_stated_shape((d, _) in arb_solved_desc()) {
        let art = build_theta(&d).unwrap();
        prop_assert_eq!(&art.theta, &expected_theta(&d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn elimination_matches_the_point_set((d, g) in arb_solved_desc(), probes in prop::collection::vec((arb_probe(2, 2), any::<bool>()), 25)) {
        let art = map_cylinder(&d).unwrap();
        let qf = art.theta_qf().unwrap();
        for (probe, on_graph) in &probes {
            let probe = (probe.0[..d.k].to_vec(), probe.1, probe.2[..d.m].to_vec(), probe.3[..d.k + d.m].to_vec());
            let p = probe_point(&g, &probe, *on_graph);
            prop_assert_eq!(qf.eval_point(&p).unwrap(), in_cylinder(&d, &g, &p), "at {:?}", p);
        }
    }
}
#[test]
fn elimination_matches_fixture_cylinders_at_1000_points() {
    for (name, d, g, sample) in fixture_graphs() {
        let (hits, misses) = check_fixture_elimination(&d, &g, sample, 1000).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(hits > 100 && misses > 100, "{name}: {hits} hits, {misses} misses");
    }
}

#[test]
fn forward_unit_cylinder_is_the_map_cylinder() {
    for (_, d, _, _) in fixture_graphs() {
        let a = map_cylinder(&d).unwrap();
        let b = build_directed_cyl(&d, &int(0), &int(1), Direction::Fwd).unwrap();
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.theta_qf, b.theta_qf);
        assert_eq!(a.theta_t1, b.theta_t1);
    }
}

#[test]
fn odd_members_are_shared() {
    let zc = build_zigzag_cyl(&fixtures::circle_identities(4).unwrap()).unwrap();
    for i in (1..=zc.n).step_by(2) {
        for j in [i - 1, i + 1].into_iter().filter(|&j| j <= zc.n) {
            assert!(zc.members[i].iter().all(|m| zc.members[j].contains(m)), "{i} in {j}");
        }
        assert!(zc.members[i].iter().all(|&m| matches!(zc.pieces[m], Piece::Prism(_))));
    }
}
