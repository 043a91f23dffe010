//! Seeded property-check suites with printable reports.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::disjoint_union;
use crate::bch::{bch_trees, m_via_bch, m_via_operator, Bracket};
use crate::canon::canonicalize;
use crate::enumerate::enumerate_diagrams;
use crate::error::{Error, Result};
use crate::gaussian::{fubini, integration_by_parts, Gaussian};
use crate::grammar::print_sum;
use crate::label::{dvar, var, VarLabel};
use crate::pipeline::{cyclic_check, kirby2_check, ogl_leading_check, parity_flip_check};
use crate::random::{random_connected, random_gaussian};
use crate::reduce::{build_basis, canonical_components, reduce, Grade};
use crate::skeleton::{chi, m_xyz, sigma};
use crate::sum::{Caps, DiagramSum, LinComb};
use crate::{rat, Rational};

/// Note on cyclic cases whose two merges differ before integration.
pub const MERGES_DIFFER: &str = "merges differ";

/// Largest `max_degree` accepted by [`run_suite`].
pub const MAX_CHECK_DEGREE: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Kirby2,
    Cyclic,
    Fubini,
    Ibp,
    Parity,
    Ogl,
    Bch,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Kirby2,
        Suite::Cyclic,
        Suite::Fubini,
        Suite::Ibp,
        Suite::Parity,
        Suite::Ogl,
        Suite::Bch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kirby2 => "kirby2",
            Suite::Cyclic => "cyclic",
            Suite::Fubini => "fubini",
            Suite::Ibp => "ibp",
            Suite::Parity => "parity",
            Suite::Ogl => "ogl",
            Suite::Bch => "bch",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite `{s}`")))
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    /// Internal degree bound; diagrams keep at most `2 * max_degree`
    /// vertices.
    pub max_degree: usize,
    pub seed: u64,
    /// Number of random cases for the randomized suites.
    pub cases: usize,
}

impl CheckConfig {
    pub fn new(max_degree: usize, seed: u64) -> Self {
        CheckConfig {
            max_degree,
            seed,
            cases: 20,
        }
    }

    pub fn caps(&self) -> Caps {
        Caps::new(2 * self.max_degree, 24)
    }
}

/// One checked instance. `difference` is the reduced difference of the two
/// sides when they disagree.
#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub passed: bool,
    pub note: Option<String>,
    pub difference: Option<DiagramSum>,
}

impl Case {
    fn compare(name: String, left: &DiagramSum, right: &DiagramSum) -> Case {
        let diff = reduce(&left.minus(right));
        Case {
            name,
            passed: diff.is_zero(),
            note: None,
            difference: (!diff.is_zero()).then_some(diff),
        }
    }

    fn noted(mut self, note: String) -> Case {
        self.note = Some(note);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Grammar,
    Coords,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: Suite,
    pub config: CheckConfig,
    pub cases: Vec<Case>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {} max-degree {} seed {}",
            self.suite, self.config.max_degree, self.config.seed
        );
        for c in &self.cases {
            let status = if c.passed { "pass" } else { "FAIL" };
            let _ = write!(out, "{}: {status}", c.name);
            if let Some(n) = &c.note {
                let _ = write!(out, " ({n})");
            }
            out.push('\n');
            if let Some(d) = &c.difference {
                let text = match format {
                    Format::Grammar => print_sum(d),
                    Format::Coords => print_coordinates(d)?.trim_end().replace('\n', "\n  "),
                };
                let _ = writeln!(out, "  difference: {text}");
            }
        }
        let ok = self.cases.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{ok}/{} passed", self.cases.len());
        Ok(out)
    }
}

/// Prints a reduced sum as coordinates: per term the coefficient and, per
/// connected component, its grade and index in the quotient basis of that
/// grade.
pub fn print_coordinates(s: &DiagramSum) -> Result<String> {
    let r = reduce(s);
    let mut out = String::new();
    for (d, c) in r.terms() {
        let _ = write!(out, "{c}");
        let (comps, _) = canonical_components(d);
        for comp in comps {
            let g = Grade::of(&comp);
            let basis = build_basis(&g)?;
            let i = basis
                .basis
                .iter()
                .position(|b| *b == comp)
                .ok_or_else(|| Error::Internal("reduced component is not a basis element".into()))?;
            let legs: Vec<String> = g.legs.iter().map(ToString::to_string).collect();
            let _ = write!(out, "\tV{}[{}]#{i}", g.vertices, legs.join(","));
        }
        out.push('\n');
    }
    if out.is_empty() {
        out.push_str("0\n");
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, config: CheckConfig) -> Result<Report> {
    if config.max_degree == 0 || config.max_degree > MAX_CHECK_DEGREE {
        return Err(Error::Precondition(format!(
            "max degree must be between 1 and {MAX_CHECK_DEGREE}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let caps = config.caps();
    let capped = |g: Gaussian| Gaussian {
        p: g.p.with_caps(caps),
        cov: g.cov,
    };
    let mut cases = Vec::new();
    match suite {
        Suite::Parity => {
            for i in 0..config.cases {
                let g = capped(random_gaussian(&mut rng, &[var("x"), var("y")], &[var("e")])?);
                let (a, b) = parity_flip_check(&g, &var("y"))?;
                cases.push(Case::compare(format!("case {i}"), &a, &b));
            }
        }
        Suite::Fubini => {
            let mut i = 0;
            while i < config.cases {
                let g = capped(random_gaussian(&mut rng, &[var("x"), var("y")], &[var("e")])?);
                if g.cov.matrix()[(0, 0)].is_zero() {
                    continue;
                }
                let (l, r) = fubini(&g, &[var("x")])?;
                cases.push(Case::compare(format!("case {i}"), &l, &r));
                i += 1;
            }
        }
        Suite::Ibp => {
            for i in 0..config.cases {
                let g = capped(random_gaussian(&mut rng, &[var("x"), var("y")], &[var("e")])?);
                let d = ibp_operator(&mut rng, 1 + i % 2, caps)?;
                let (l, r) = integration_by_parts(&d, &g, &var("x"))?;
                cases.push(Case::compare(format!("case {i}"), &l, &r).noted(format!("order {}", 1 + i % 2)));
            }
        }
        Suite::Kirby2 => {
            for i in 0..config.cases {
                let g = capped(random_gaussian(&mut rng, &[var("x"), var("y"), var("w")], &[])?);
                let k = kirby2_check(&g, &var("x"), &var("y"))?;
                let slide = Case::compare(format!("case {i} handle slide"), &k.direct, &k.handle_slide);
                let subst = Case::compare(format!("case {i} substitution"), &k.direct, &k.substituted);
                cases.push(slide);
                cases.push(subst);
            }
        }
        Suite::Cyclic => {
            let (x, y, z, e, u) = (var("x"), var("y"), var("z"), var("e"), var("u"));
            let fs = [vec![z.clone(), e.clone(), u.clone()], vec![z.clone()]];
            let mut i = 0;
            while i < config.cases {
                let g = capped(random_gaussian(
                    &mut rng,
                    &[x.clone(), y.clone(), e.clone(), u.clone()],
                    &[],
                )?);
                let checks = match cyclic_check(&g, &x, &y, &z, &fs) {
                    Ok(c) => c,
                    // the merged Gaussian is degenerate in the integrated block
                    Err(Error::Degenerate(_)) => continue,
                    Err(err) => return Err(err),
                };
                for (c, what) in checks.iter().zip(["all variables", "z only"]) {
                    let mut case = Case::compare(format!("case {i} {what}"), &c.xy.p, &c.yx.p);
                    if c.merges_differ {
                        case.note = Some(MERGES_DIFFER.into());
                    }
                    if c.xy.cov != c.yx.cov {
                        case.passed = false;
                        case.note = Some("covariances differ".into());
                    }
                    cases.push(case);
                }
                i += 1;
            }
        }
        Suite::Ogl => {
            let mut v = 2;
            while v <= 2 * config.max_degree {
                let graphs = enumerate_diagrams(&Grade::new(v, vec![]), Caps::new(v, 0))?;
                for (j, d) in graphs.iter().enumerate() {
                    let r = ogl_leading_check(d)?;
                    let passed = r.coefficient.abs() == Rational::one() && r.recovered == canonicalize(d).diagram;
                    cases.push(Case {
                        name: format!("graph V{v}#{j}"),
                        passed,
                        note: Some(format!("sign {}", r.coefficient)),
                        difference: None,
                    });
                }
                v += 2;
            }
        }
        Suite::Bch => {
            cases.extend(displayed_coefficients()?);
            let c = Caps::new(12, 24);
            for (j, d) in basis_up_to(&[var("x"), var("y")], 2 * config.max_degree, 4)?
                .into_iter()
                .enumerate()
            {
                let s = LinComb::from_diagram(d, Rational::one(), c);
                let via_a = reduce(&sigma(&m_xyz(&chi(&s)?, "x", "y", "z")?)?);
                let via_bch = m_via_bch(&s, "x", "y", "z")?;
                let via_op = m_via_operator(&s, "x", "y", "z")?;
                cases.push(Case::compare(format!("basis {j} master"), &via_a, &via_bch));
                cases.push(Case::compare(format!("basis {j} operator"), &via_op, &via_bch));
            }
        }
    }
    Ok(Report { suite, config, cases })
}

/// An operator of the given order in `∂x` with a coefficient that has legs
/// in `x`.
fn ibp_operator(rng: &mut ChaCha8Rng, order: usize, caps: Caps) -> Result<DiagramSum> {
    let mut d = LinComb::one(caps);
    for k in 0..order {
        let t = if k % 2 == 0 {
            crate::Diagram::tripod(dvar("x"), var("e"), var("f"))
        } else {
            crate::Diagram::strut(dvar("x"), var("e"))
        };
        d = disjoint_union(&d, &LinComb::from_diagram(t, Rational::one(), caps));
    }
    let coeff = loop {
        let c = random_connected(rng, &[var("x"), var("g"), var("h")], 1, &[var("x")])?;
        if c.count_legs(&var("x")) > 0 {
            break c;
        }
    };
    Ok(disjoint_union(&d, &LinComb::from_diagram(coeff, Rational::one(), caps)))
}

fn displayed_coefficients() -> Result<Vec<Case>> {
    let s = bch_trees(4)?;
    let x = || Bracket::leaf(dvar("x"));
    let y = || Bracket::leaf(dvar("y"));
    let xy = || Bracket::br(x(), y());
    let expected = [
        ("[x,y]", xy(), rat(1, 2)),
        ("[x,[x,y]]", Bracket::br(x(), xy()), rat(1, 12)),
        ("[y,[x,y]]", Bracket::br(y(), xy()), rat(-1, 12)),
        ("[x,[y,[x,y]]]", Bracket::br(x(), Bracket::br(y(), xy())), rat(-1, 24)),
    ];
    Ok(expected
        .into_iter()
        .map(|(name, b, c)| {
            let got = s.coefficient(&b.to_tree(var("z")));
            Case {
                name: format!("coefficient {name}"),
                passed: got.as_ref() == Some(&c),
                note: Some(got.map_or_else(|| "not proportional".into(), |g| format!("got {g}, expected {c}"))),
                difference: None,
            }
        })
        .collect())
}

/// Basis diagrams of `B(labels)` with at most `max_vertices` vertices and
/// `max_legs` legs, excluding the empty diagram.
pub fn basis_up_to(labels: &[VarLabel], max_vertices: usize, max_legs: usize) -> Result<Vec<crate::Diagram<VarLabel>>> {
    let mut out = Vec::new();
    for nv in 0..=max_vertices {
        for nl in 0..=max_legs {
            if (3 * nv + nl) % 2 == 1 || nv + nl == 0 {
                continue;
            }
            for legs in multisets(labels, nl) {
                out.extend(build_basis(&Grade::new(nv, legs))?.basis.iter().cloned());
            }
        }
    }
    Ok(out)
}

fn multisets(labels: &[VarLabel], n: usize) -> Vec<Vec<VarLabel>> {
    match labels.split_first() {
        None => {
            if n == 0 {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        Some((first, rest)) => (0..=n)
            .flat_map(|k| {
                multisets(rest, n - k).into_iter().map(move |mut m| {
                    m.extend(std::iter::repeat_n(first.clone(), k));
                    m
                })
            })
            .collect(),
    }
}
