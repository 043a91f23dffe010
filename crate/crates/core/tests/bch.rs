use aarhus_core::bch::{bch_trees, m_via_bch, m_via_operator, Bracket};
use aarhus_core::skeleton::{chi, m_xyz, sigma};
use aarhus_core::{build_basis, dvar, rat, reduce, var, Caps, Diagram, Grade, LinComb};

const CAPS: Caps = Caps::new(12, 24);

fn x() -> Bracket {
    Bracket::leaf(dvar("x"))
}
fn y() -> Bracket {
    Bracket::leaf(dvar("y"))
}

#[test]
fn displayed_coefficients() {
    let s = bch_trees(4).unwrap();
    let xy = || Bracket::br(x(), y());
    let cases = [
        (xy(), rat(1, 2)),
        (Bracket::br(x(), xy()), rat(1, 12)),
        (Bracket::br(y(), xy()), rat(-1, 12)),
        (Bracket::br(x(), Bracket::br(y(), xy())), rat(-1, 24)),
    ];
    for (b, c) in cases {
        assert_eq!(s.coefficient(&b.to_tree(var("z"))), Some(c), "{b:?}");
    }
}

/// Basis diagrams of B({x, y}) with at most `v` vertices and `l` legs.
fn small_basis(v: usize, l: usize) -> Vec<Diagram<aarhus_core::VarLabel>> {
    let mut out = Vec::new();
    for nv in 0..=v {
        for nl in 0..=l {
            if (3 * nv + nl) % 2 == 1 || nv + nl == 0 {
                continue;
            }
            for nx in 0..=nl {
                let mut legs = vec![var("x"); nx];
                legs.extend(vec![var("y"); nl - nx]);
                out.extend(build_basis(&Grade::new(nv, legs)).unwrap().basis.iter().cloned());
            }
        }
    }
    out
}

#[test]
fn merging_a_strut_pair() {
    let mut c = LinComb::zero(CAPS);
    c.add_term(
        &Diagram::strut(var("x"), var("e")).disjoint_union(&Diagram::strut(var("y"), var("f"))),
        rat(1, 1),
    );
    let mut expect = LinComb::zero(CAPS);
    expect.add_term(
        &Diagram::strut(var("z"), var("e")).disjoint_union(&Diagram::strut(var("z"), var("f"))),
        rat(1, 1),
    );
    // ⟨½ Y(∂x, ∂y; z), x e ⊔ y f⟩ glues into a tripod
    expect.add_term(&Diagram::tripod(var("e"), var("f"), var("z")), rat(1, 2));
    let expect = reduce(&expect);
    assert_eq!(m_via_bch(&c, "x", "y", "z").unwrap(), expect);
    assert_eq!(m_via_operator(&c, "x", "y", "z").unwrap(), expect);
}

#[test]
fn master_oracle_and_operator_form() {
    let basis = small_basis(4, 4);
    assert!(basis.len() > 20);
    for d in basis {
        let c = LinComb::from_diagram(d.clone(), rat(1, 1), CAPS);
        let via_a = reduce(&sigma(&m_xyz(&chi(&c).unwrap(), "x", "y", "z").unwrap()).unwrap());
        let via_bch = m_via_bch(&c, "x", "y", "z").unwrap();
        assert_eq!(via_a, via_bch, "{d:?}");
        assert_eq!(m_via_operator(&c, "x", "y", "z").unwrap(), via_bch, "{d:?}");
    }
}
