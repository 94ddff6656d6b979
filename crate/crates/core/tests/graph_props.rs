use aloha_aoi::graph::{self, Topology};
use proptest::prelude::*;

fn arb_topology() -> impl Strategy<Value = Topology> {
    (1usize..12).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(&e, _)| e);
            Topology::new(n, edges).unwrap()
        })
    })
}

fn generated() -> impl Strategy<Value = Topology> {
    prop_oneof![
        (1usize..30).prop_map(|n| graph::make_line(n).unwrap()),
        (3usize..30).prop_map(|n| graph::make_ring(n).unwrap()),
        (2usize..30).prop_map(|n| graph::make_star(n).unwrap()),
        (1usize..8, 1usize..8).prop_map(|(r, c)| graph::make_grid(r, c).unwrap()),
        (2usize..12).prop_map(|n| graph::make_complete(n).unwrap()),
    ]
}

fn assert_symmetric(t: &Topology) {
    for i in 0..t.n() {
        for &j in t.neighbors(i).unwrap() {
            assert!(
                t.neighbors(j).unwrap().contains(&i),
                "{i} -> {j} not mirrored"
            );
            assert_ne!(i, j);
        }
    }
}

proptest! {
    #[test]
    fn generators_are_symmetric(t in generated()) {
        assert_symmetric(&t);
    }

    #[test]
    fn arbitrary_graphs_are_symmetric(t in arb_topology()) {
        assert_symmetric(&t);
        let degree_sum: usize = t.degrees().iter().sum();
        prop_assert_eq!(degree_sum, 2 * t.edge_count());
        prop_assert_eq!(t.directed_links().len(), 2 * t.edge_count());
    }

    #[test]
    fn grid_one_row_is_line(k in 1usize..40) {
        let line = graph::make_line(k).unwrap();
        prop_assert_eq!(graph::make_grid(1, k).unwrap(), line.clone());
        prop_assert_eq!(graph::make_grid(k, 1).unwrap(), line);
    }

    #[test]
    fn edge_list_round_trip(t in prop_oneof![generated(), arb_topology()]) {
        let back = graph::parse_edge_list(&t.to_edge_list()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn json_round_trip(t in arb_topology()) {
        let text = serde_json::to_string(&t).unwrap();
        let back: Topology = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn regular_families(n in 3usize..25) {
        prop_assert!(graph::make_ring(n).unwrap().is_regular(2));
        prop_assert!(graph::make_complete(n).unwrap().is_regular(n - 1));
        prop_assert_eq!(graph::make_star(n).unwrap().star_hub(), Some(0));
    }
}

#[test]
fn presets_have_six_nodes_and_are_connected() {
    let presets = graph::asymmetric_presets();
    assert_eq!(presets.len(), 4);
    for (name, t) in presets {
        assert_eq!(t.n(), 6, "{name}");
        assert!(t.is_connected(), "{name}");
        assert_eq!(graph::from_preset(name).unwrap(), t);
    }
}

#[test]
fn edge_list_parsing_errors_carry_line_numbers() {
    let err = graph::parse_edge_list("# header\n3\n0 1\n1 1\n").unwrap_err();
    assert!(err.to_string().contains('4'), "{err}");
    assert!(graph::parse_edge_list("2\n0 5\n").is_err());
    assert!(graph::parse_edge_list("3\n0 1\n1 0\n").is_err());
}
