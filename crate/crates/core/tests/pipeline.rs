use sahom::fixtures::{self, diagram_desc, map_desc, CIRCLE, DISK, IDENTITY_2};
use sahom::pipeline::{map_functor, zigzag_barcode, zigzag_functor, PipelineConfig};
use sahom::zigzag::{barcode, validate_barcode, Barcode, ZigzagModule};

fn cfg(res: u32, max_dim: usize, stability: bool) -> PipelineConfig {
    PipelineConfig {
        res,
        max_dim,
        stability,
        ..Default::default()
    }
}

#[test]
fn circle_into_disk() {
    let r = map_functor(&fixtures::circle_to_disk().unwrap(), &cfg(16, 1, true)).unwrap().report;
    assert_eq!(r.betti_source, vec![1, 1]);
    assert_eq!(r.betti_target, vec![1, 0]);
    assert_eq!(r.maps[0].rank, 1);
    assert_eq!((r.maps[1].matrix.rows(), r.maps[1].matrix.cols()), (0, 1));
    assert!(r.stability.iter().all(|s| s.stable), "{:?}", r.stability);
    assert!(r.warnings.is_empty());
}

#[test]
fn blow_down_is_an_isomorphism_on_homology() {
    let r = map_functor(&fixtures::blow_down().unwrap(), &cfg(16, 2, false)).unwrap().report;
    assert_eq!(r.betti_source, vec![1, 0, 0]);
    assert_eq!(r.betti_target, vec![1, 0, 0]);
    assert!(r.maps[0].matrix.is_identity() || r.maps[0].matrix.get(0, 0) == &-sahom::poly::int(1));
    assert_eq!(r.maps[0].rank, 1);
}

#[test]
fn single_arrow_zigzag_reproduces_the_map() {
    // S_0 = disk <- S_1 = circle.
    let d = diagram_desc(2, &[DISK, CIRCLE], &[IDENTITY_2]).unwrap();
    let z = zigzag_functor(&d, &cfg(16, 1, false)).unwrap().report;
    let m = map_functor(&fixtures::circle_to_disk().unwrap(), &cfg(16, 1, false)).unwrap().report;
    for i in 0..=1 {
        let module = &z.modules[i].module;
        assert_eq!(module.dims(), &[m.betti_target[i], m.betti_source[i]]);
        assert_eq!(z.modules[i].ranks, vec![m.maps[i].rank]);
    }
    assert_eq!(z.barcodes[1].barcode, Barcode::new([(1, 1, 1)]));
}

#[test]
fn chain_of_four_matches_pairwise_maps() {
    let phi = [CIRCLE, CIRCLE, DISK, CIRCLE, CIRCLE];
    let d = diagram_desc(2, &phi, &[IDENTITY_2; 4]).unwrap();
    let config = cfg(16, 1, false);
    let z = zigzag_functor(&d, &config).unwrap().report;
    assert!(z.nested);
    for i in 0..=1 {
        // Assemble the module from one map computation per arrow.
        let mut dims = vec![0; 5];
        let mut arrows = Vec::new();
        for j in 1..=4 {
            let (src, dst) = if j % 2 == 1 { (j, j - 1) } else { (j - 1, j) };
            let f = map_desc(2, 2, phi[src], &phi[dst].replace('x', "y"), IDENTITY_2).unwrap();
            let r = map_functor(&f, &config).unwrap().report;
            dims[src] = r.betti_source[i];
            dims[dst] = r.betti_target[i];
            arrows.push(r.maps[i].matrix.clone());
        }
        let hand = ZigzagModule::new(dims, arrows).unwrap();
        let module = &z.modules[i].module;
        assert_eq!(module.dims(), hand.dims(), "H{i}");
        let ranks: Vec<usize> = hand.arrows().iter().map(|a| a.rank()).collect();
        assert_eq!(z.modules[i].ranks, ranks, "H{i}");
        // All spaces here are at most one-dimensional, so the bars are
        // determined by which arrows vanish, whatever the bases.
        assert_eq!(barcode(module), barcode(&hand), "H{i}");
    }
    assert_eq!(z.barcodes[1].barcode, Barcode::new([(0, 1, 1), (3, 4, 1)]));
    assert_eq!(z.barcodes[0].barcode, Barcode::new([(0, 4, 1)]));
}

#[test]
fn identities_of_a_circle_give_one_long_bar() {
    let bars = zigzag_barcode(&fixtures::circle_identities(3).unwrap(), &cfg(16, 1, false)).unwrap();
    assert_eq!(bars[0], Barcode::new([(0, 3, 1)]));
    assert_eq!(bars[1], Barcode::new([(0, 3, 1)]));
}

#[test]
fn merging_two_points() {
    let r = zigzag_functor(&fixtures::merging_points(3).unwrap(), &cfg(16, 0, false)).unwrap().report;
    assert_eq!(r.modules[0].module.dims(), &[2, 2, 1, 1]);
    assert_eq!(r.barcodes[0].barcode, Barcode::new([(0, 1, 1), (0, 3, 1)]));
    let v = validate_barcode(&r.modules[0].module, &r.barcodes[0].barcode);
    assert!(v.valid, "{:?}", v.violations);
}

#[test]
fn reports_are_deterministic() {
    let d = fixtures::circle_circle_disk().unwrap();
    let c = cfg(8, 1, false);
    let a = serde_json::to_string(&zigzag_functor(&d, &c).unwrap().report).unwrap();
    let b = serde_json::to_string(&zigzag_functor(&d, &c).unwrap().report).unwrap();
    assert_eq!(a, b);
    let m = fixtures::circle_to_point().unwrap();
    let a = serde_json::to_string(&map_functor(&m, &c).unwrap().report).unwrap();
    let b = serde_json::to_string(&map_functor(&m, &c).unwrap().report).unwrap();
    assert_eq!(a, b);
}
