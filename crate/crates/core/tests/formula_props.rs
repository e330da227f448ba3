mod common;

use common::*;
use proptest::prelude::*;
use sahom::{parse_formula, VarList};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interval_soundness((f, (b, p)) in (arb_formula(2, 3, 3), arb_box_and_point(2))) {
        prop_assert!(interval_sound(&f, &b, &p));
    }

    #[test]
    fn homogenization_soundness(
        f in arb_formula(2, 3, 3),
        a in small_rational(),
        w in (1i64..=4).prop_map(sahom::poly::int),
        x0 in arb_point(2),
        t in (1i64..=16).prop_map(|n| sahom::poly::rat(n, 4)),
    ) {
        let lambda0 = &a + &t;
        prop_assert!(homogenized_agrees(&f, &a, &w, &x0, &lambda0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn association_order_is_irrelevant(ps in prop::collection::vec(arb_poly(3, 2, 4), 2..6)) {
        let left = ps.iter().skip(1).fold(ps[0].clone(), |acc, p| &acc + p);
        let right = ps.iter().rev().skip(1).fold(ps[ps.len() - 1].clone(), |acc, p| p + &acc);
        prop_assert_eq!(&left, &right);
        let lp = ps.iter().skip(1).fold(ps[0].clone(), |acc, p| &acc * p);
        let rp = ps.iter().rev().skip(1).fold(ps[ps.len() - 1].clone(), |acc, p| p * &acc);
        prop_assert_eq!(&lp, &rp);
        let dist = &(&ps[0] + &ps[1]) * &left;
        prop_assert_eq!(dist, &(&ps[0] * &left) + &(&ps[1] * &left));
    }

    #[test]
    fn printing_and_parsing_round_trip(f in arb_formula(2, 3, 3)) {
        let vars = VarList::new(["x", "y"]);
        let text = f.display(&vars).to_string();
        prop_assert_eq!(parse_formula(&text, &vars).unwrap(), f);
    }
}

#[test]
fn closedness_corpus() {
    let vars = VarList::new(["x", "y"]);
    let corpus = [
        ("x >= 0", true),
        ("x <= 0", true),
        ("x = 0", true),
        ("x > 0", false),
        ("x < 0", false),
        ("x^2 + y^2 - 1 <= 0", true),
        ("x^2 + y^2 - 1 < 0", false),
        ("x >= 0 and y >= 0", true),
        ("x >= 0 or y > 0", false),
        ("(x >= 0 and y <= 1) or x*y = 0", true),
        ("not (x > 0)", false),
        ("not (x >= 0)", false),
        ("x - y = 0 and (x >= 1 or y <= -1)", true),
        ("(x >= 0 or y >= 0) and (x <= 1 or y < 1)", false),
        ("x^3 - y >= 0 and y^3 - x >= 0", true),
        ("x^2 - y < 0 or x^2 - y > 0", false),
        ("x = 0 or y = 0 or x - y = 0", true),
        ("(x > 0 and y > 0) or (x <= 0 and y <= 0)", false),
        ("not (x = 0 and y = 0)", false),
        ("1/2*x + 3/4*y - 2 <= 0 and x >= -1", true),
    ];
    for (text, closed) in corpus {
        let f = parse_formula(text, &vars).unwrap();
        assert_eq!(f.is_closed(), closed, "{text}");
        // Rewriting `=` as two non-strict atoms never changes the verdict.
        assert_eq!(f.expand_equalities().is_closed(), closed, "{text}");
    }
}

#[test]
fn decimals_are_rejected() {
    let vars = VarList::new(["x"]);
    assert!(parse_formula("x - 0.5 >= 0", &vars).is_err());
}
