//! Point-set oracles for mapping cylinders of maps given by a graph.

use proptest::prelude::*;
use sahom::cylinder::SemialgebraicMapDesc;
use sahom::fixtures;
use sahom::parse::parse_formula_ext;
use sahom::poly::{int, rat};
use sahom::{parse_formula, Formula, Polynomial, Rational, VarList};

use super::{arb_formula, arb_point, arb_poly};

pub fn show(f: &Formula, vars: &VarList) -> String {
    format!("({})", f.display(vars))
}

/// The expected `Theta`, written out as text and parsed.
pub fn expected_theta(d: &SemialgebraicMapDesc) -> Formula {
    let (k, m) = (d.k, d.m);
    let xs = VarList::numbered("x", k);
    let ys = VarList::numbered("y", m);
    let zs = VarList::numbered("z", k);
    let mut vars = xs.concat(&ys);
    vars.push("t");
    let mut apex = vec!["t = 0".to_string()];
    apex.extend((1..=k).map(|i| format!("x{i} = 0")));
    apex.push(show(&d.phi_t, &ys));
    let mut body: Vec<String> = (1..=k).map(|i| format!("x{i} - t*z{i} = 0")).collect();
    body.push(show(&d.phi_s, &zs));
    body.push(show(&d.phi_f, &zs.concat(&ys)));
    body.push(show(&d.phi_t, &ys));
    let text = format!(
        "({}) or (t >= 0 and t - 1 <= 0 and (exists {} . {}))",
        apex.join(" and "),
        zs.names().join(" "),
        body.join(" and ")
    );
    parse_formula_ext(&text, &vars).unwrap().0
}

/// Maps `x -> g(x)` with `S`, `T` given by random formulas, so that the
/// cylinder has an exact point-set description.
pub fn arb_solved_desc() -> impl Strategy<Value = (SemialgebraicMapDesc, Vec<Polynomial>)> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(k, m)| {
        (
            arb_formula(k, 2, 2),
            arb_formula(m, 2, 2),
            prop::collection::vec(arb_poly(k, 2, 3), m),
        )
            .prop_map(move |(s, t, g)| {
                let xs = VarList::numbered("x", k);
                let ys = VarList::numbered("y", m);
                let graph: Vec<String> = g
                    .iter()
                    .enumerate()
                    .map(|(j, p)| format!("y{} - ({}) = 0", j + 1, p.display(&xs)))
                    .collect();
                let f = parse_formula(&graph.join(" and "), &xs.concat(&ys)).unwrap();
                (SemialgebraicMapDesc::new(k, m, s, t, f).unwrap(), g)
            })
    })
}

/// Membership in `{(t z, g(z), t) : z in S, g(z) in T, 0 < t <= 1} cup
/// {(0, y, 0) : y in T}`, decided directly from the point.
pub fn in_cylinder(d: &SemialgebraicMapDesc, g: &[Polynomial], p: &[Rational]) -> bool {
    let (k, m) = (d.k, d.m);
    let (x, y, t) = (&p[..k], &p[k..k + m], &p[k + m]);
    let zero = int(0);
    if *t == zero {
        return x.iter().all(|v| *v == zero) && d.phi_t.eval_point(y).unwrap();
    }
    if *t < zero || *t > int(1) {
        return false;
    }
    let z: Vec<Rational> = x.iter().map(|v| v / t).collect();
    d.phi_s.eval_point(&z).unwrap() && g.iter().zip(y).all(|(gj, yj)| gj.eval(&z) == *yj) && d.phi_t.eval_point(y).unwrap()
}

/// Points that land on the cylinder often: pick `z`, `t` and put `y`
/// on the graph, then optionally perturb.
pub fn arb_probe(k: usize, m: usize) -> impl Strategy<Value = (Vec<Rational>, u8, Vec<Rational>, Vec<Rational>)> {
    (
        arb_point(k),
        0u8..=8,
        arb_point(m),
        prop::collection::vec((-1i64..=1).prop_map(|n| rat(n, 8)), k + m),
    )
}

pub fn probe_point(g: &[Polynomial], (z, t, y, noise): &(Vec<Rational>, u8, Vec<Rational>, Vec<Rational>), on_graph: bool) -> Vec<Rational> {
    let t = rat(*t as i64, 8);
    let mut p: Vec<Rational> = z.iter().map(|v| v * &t).collect();
    if on_graph {
        p.extend(g.iter().map(|gj| gj.eval(z)));
    } else {
        p.extend(y.iter().cloned());
    }
    for (c, e) in p.iter_mut().zip(noise) {
        *c += e;
    }
    p.push(t);
    p
}

pub type Sampler = fn(&Rational, &Rational) -> Vec<Rational>;

pub fn circle_point(s: &Rational, _: &Rational) -> Vec<Rational> {
    let d = int(1) + s * s;
    vec![(int(1) - s * s) / &d, (s + s) / &d]
}

/// Identity-like fixture maps with a parametrization of the source by
/// `(s1, s2)` in `[-2, 2]^2`.
pub fn fixture_graphs() -> Vec<(&'static str, SemialgebraicMapDesc, Vec<Polynomial>, Sampler)> {
    let x = |k: usize, i: usize| Polynomial::var(k, i);
    vec![
        ("point identity", fixtures::point_identity().unwrap(), vec![x(1, 0)], |_, _| vec![int(0)]),
        ("circle to disk", fixtures::circle_to_disk().unwrap(), vec![x(2, 0), x(2, 1)], circle_point),
        ("circle to point", fixtures::circle_to_point().unwrap(), vec![Polynomial::zero(2)], circle_point),
        ("blow down", fixtures::blow_down().unwrap(), vec![x(3, 0), x(3, 1)], |s1, s2| {
            let x1 = (s1 + int(2)) / int(4);
            let x3 = s2 / int(2);
            vec![x1.clone(), &x3 * &x1, x3]
        }),
    ]
}

/// Compares the eliminated cylinder formula with [`in_cylinder`] at `cases`
/// probe points near the cylinder. Returns the number of hits and misses.
pub fn check_fixture_elimination(d: &SemialgebraicMapDesc, g: &[Polynomial], sample: Sampler, cases: u32) -> Result<(usize, usize), String> {
    let qf = sahom::cylinder::map_cylinder(d).map_err(|e| e.to_string())?.theta_qf().map_err(|e| e.to_string())?.clone();
    let mut r = super::runner(cases);
    let param = (-16i64..=16).prop_map(|n| rat(n, 8));
    let strategy = (param.clone(), param, arb_probe(d.k, d.m), any::<bool>(), any::<bool>());
    let (hits, misses) = (std::cell::Cell::new(0usize), std::cell::Cell::new(0usize));
    r.run(&strategy, |(s1, s2, mut probe, on_graph, perturb)| {
        probe.0 = sample(&s1, &s2);
        if !perturb {
            probe.3.iter_mut().for_each(|e| *e = int(0));
        }
        let p = probe_point(g, &probe, on_graph);
        let expected = in_cylinder(d, g, &p);
        let counter = if expected { &hits } else { &misses };
        counter.set(counter.get() + 1);
        prop_assert_eq!(qf.eval_point(&p).unwrap(), expected, "at {:?}", p);
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok((hits.get(), misses.get()))
}
