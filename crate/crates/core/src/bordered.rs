//! The torus algebra and the type D structure of an n-framed knot
//! complement, computed from a simplified CFK^- presentation.

use std::fmt::Write as _;

use crate::cfk::{tau_from_cfk, CfkComplex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Idem {
    I0,
    I1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RhoLabel {
    R1,
    R2,
    R3,
    R12,
    R23,
    R123,
}

impl RhoLabel {
    /// Idempotents so that rho = iota_left . rho . iota_right.
    pub fn left_idem(&self) -> Idem {
        match self {
            RhoLabel::R1 | RhoLabel::R3 | RhoLabel::R12 | RhoLabel::R123 => Idem::I0,
            RhoLabel::R2 | RhoLabel::R23 => Idem::I1,
        }
    }

    pub fn right_idem(&self) -> Idem {
        match self {
            RhoLabel::R1 | RhoLabel::R3 | RhoLabel::R123 | RhoLabel::R23 => Idem::I1,
            RhoLabel::R2 | RhoLabel::R12 => Idem::I0,
        }
    }

    /// Algebra product; `None` encodes zero.
    pub fn compose(a: RhoLabel, b: RhoLabel) -> Option<RhoLabel> {
        use RhoLabel::*;
        match (a, b) {
            (R1, R2) => Some(R12),
            (R2, R3) => Some(R23),
            (R1, R23) => Some(R123),
            (R12, R3) => Some(R123),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RhoLabel::R1 => "r1",
            RhoLabel::R2 => "r2",
            RhoLabel::R3 => "r3",
            RhoLabel::R12 => "r12",
            RhoLabel::R23 => "r23",
            RhoLabel::R123 => "r123",
        }
    }
}

/// Origin of a type D generator; used by the curve layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenTag {
    /// A CFK generator (the xi and eta bases coincide here), carrying its
    /// Alexander grading for the curve layout.
    Xi { cfk_index: usize, alexander: i64 },
    /// j-th generator of the vertical chain of vertical arrow `arrow`.
    Kappa { arrow: usize, pos: u32 },
    /// j-th generator of the horizontal chain of horizontal arrow `arrow`.
    Lambda { arrow: usize, pos: u32 },
    /// j-th generator of the unstable chain.
    Mu { pos: u32 },
}

#[derive(Debug, Clone)]
pub struct DGen {
    pub name: String,
    pub idem: Idem,
    pub tag: GenTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DEdge {
    pub from: usize,
    pub to: usize,
    pub label: RhoLabel,
}

/// Which of the three unstable-chain shapes was emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnstableCase {
    /// n = 2 tau: a single rho_12 edge xi0 -> eta0.
    Rho12,
    /// n < 2 tau: xi0 -r1-> u_1 <-r23- ... <-r23- u_m <-r3- eta0.
    Positive { m: u32 },
    /// n > 2 tau: xi0 -r123-> u_1 -r23-> ... -r23-> u_m -r2-> eta0.
    Negative { m: u32 },
}

#[derive(Debug, Clone)]
pub struct TypeDStructure {
    pub gens: Vec<DGen>,
    pub edges: Vec<DEdge>,
    pub unstable: UnstableCase,
    /// Index of xi0 / eta0 among `gens`.
    pub xi0: usize,
    pub eta0: usize,
}

impl TypeDStructure {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn i0_count(&self) -> usize {
        self.gens.iter().filter(|g| g.idem == Idem::I0).count()
    }

    pub fn i1_count(&self) -> usize {
        self.gens.iter().filter(|g| g.idem == Idem::I1).count()
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            let from = &self.gens[e.from];
            let to = &self.gens[e.to];
            if from.idem != e.label.left_idem() || to.idem != e.label.right_idem() {
                return Err(Error::Invariant(format!(
                    "edge {} -{}-> {} violates idempotent compatibility",
                    from.name,
                    e.label.as_str(),
                    to.name
                )));
            }
        }
        if !check_structure_relation(self) {
            return Err(Error::Invariant("type D structure relation fails".into()));
        }
        Ok(())
    }

    /// Deterministic text dump used in golden tests: one `from label to`
    /// line per edge, sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                format!(
                    "{} {} {}",
                    self.gens[e.from].name,
                    e.label.as_str(),
                    self.gens[e.to].name
                )
            })
            .collect();
        lines.sort();
        let mut out = String::new();
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }

    /// Edge-degree (in + out) of every generator.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.gens.len()];
        for e in &self.edges {
            deg[e.from] += 1;
            deg[e.to] += 1;
        }
        deg
    }
}

/// Mod-2 statement of (mu (x) I) . (I (x) delta) . delta = 0: for every
/// ordered generator pair, the number of two-edge paths with composable
/// labels must be even.
pub fn check_structure_relation(d: &TypeDStructure) -> bool {
    let n = d.gens.len();
    let mut count = vec![0u32; n * n];
    for e1 in &d.edges {
        for e2 in &d.edges {
            if e1.to == e2.from && RhoLabel::compose(e1.label, e2.label).is_some() {
                count[e1.from * n + e2.to] += 1;
            }
        }
    }
    count.iter().all(|&c| c % 2 == 0)
}

/// The LOT algorithm: type D structure of the `framing`-framed complement
/// of the knot presented by `c`.
pub fn build_cfd(c: &CfkComplex, framing: i64) -> Result<TypeDStructure> {
    c.validate()?;
    let tau = tau_from_cfk(c)?;
    let xi0_cfk = c.xi0();
    let eta0_cfk = c.eta0()?;

    let mut gens: Vec<DGen> = c
        .names
        .iter()
        .enumerate()
        .map(|(i, n)| DGen {
            name: n.clone(),
            idem: Idem::I0,
            tag: GenTag::Xi { cfk_index: i, alexander: c.alexander[i] },
        })
        .collect();
    let mut edges = Vec::new();

    // Vertical chains: xi -r1-> k_1 <-r23- k_2 ... <-r23- k_k <-r123- xi'.
    for (ai, a) in c.vertical.iter().enumerate() {
        let k = a.length;
        let first = gens.len();
        for j in 1..=k {
            gens.push(DGen {
                name: format!("k{}_{}", ai + 1, j),
                idem: Idem::I1,
                tag: GenTag::Kappa { arrow: ai, pos: j },
            });
        }
        edges.push(DEdge { from: a.from, to: first, label: RhoLabel::R1 });
        for j in 0..(k as usize - 1) {
            edges.push(DEdge {
                from: first + j + 1,
                to: first + j,
                label: RhoLabel::R23,
            });
        }
        edges.push(DEdge {
            from: a.to,
            to: first + k as usize - 1,
            label: RhoLabel::R123,
        });
    }

    // Horizontal chains: eta -r3-> l_1 -r23-> ... -r23-> l_l -r2-> eta'.
    for (ai, a) in c.horizontal.iter().enumerate() {
        let l = a.length;
        let first = gens.len();
        for j in 1..=l {
            gens.push(DGen {
                name: format!("l{}_{}", ai + 1, j),
                idem: Idem::I1,
                tag: GenTag::Lambda { arrow: ai, pos: j },
            });
        }
        edges.push(DEdge { from: a.from, to: first, label: RhoLabel::R3 });
        for j in 0..(l as usize - 1) {
            edges.push(DEdge {
                from: first + j,
                to: first + j + 1,
                label: RhoLabel::R23,
            });
        }
        edges.push(DEdge {
            from: first + l as usize - 1,
            to: a.to,
            label: RhoLabel::R2,
        });
    }

    // Unstable chain.
    let unstable;
    if framing == 2 * tau {
        edges.push(DEdge { from: xi0_cfk, to: eta0_cfk, label: RhoLabel::R12 });
        unstable = UnstableCase::Rho12;
    } else {
        let m = (2 * tau - framing).unsigned_abs() as u32;
        let first = gens.len();
        for j in 1..=m {
            gens.push(DGen {
                name: format!("u_{j}"),
                idem: Idem::I1,
                tag: GenTag::Mu { pos: j },
            });
        }
        if framing < 2 * tau {
            edges.push(DEdge { from: xi0_cfk, to: first, label: RhoLabel::R1 });
            for j in 0..(m as usize - 1) {
                edges.push(DEdge {
                    from: first + j + 1,
                    to: first + j,
                    label: RhoLabel::R23,
                });
            }
            edges.push(DEdge {
                from: eta0_cfk,
                to: first + m as usize - 1,
                label: RhoLabel::R3,
            });
            unstable = UnstableCase::Positive { m };
        } else {
            edges.push(DEdge { from: xi0_cfk, to: first, label: RhoLabel::R123 });
            for j in 0..(m as usize - 1) {
                edges.push(DEdge {
                    from: first + j,
                    to: first + j + 1,
                    label: RhoLabel::R23,
                });
            }
            edges.push(DEdge {
                from: first + m as usize - 1,
                to: eta0_cfk,
                label: RhoLabel::R2,
            });
            unstable = UnstableCase::Negative { m };
        }
    }

    let d = TypeDStructure { gens, edges, unstable, xi0: xi0_cfk, eta0: eta0_cfk };
    d.validate()?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfk::parse_cfk;
    use crate::companions;

    #[test]
    fn trefoil_matches_figure_two() {
        let c = parse_cfk(companions::T23).unwrap();
        let d = build_cfd(&c, 0).unwrap();
        assert_eq!(d.i0_count(), 3);
        assert_eq!(d.i1_count(), 4); // k, l, u_1, u_2
        assert_eq!(d.edges.len(), 7);
        let expected = "\
l1_1 r2 x0
u_2 r23 u_1
x0 r1 u_1
x1 r1 k1_1
x1 r3 l1_1
x2 r123 k1_1
x2 r3 u_2
";
        assert_eq!(d.dump(), expected);
        assert!(check_structure_relation(&d));
    }

    #[test]
    fn unknot_zero_framed_is_a_rho12_loop() {
        let c = parse_cfk(companions::UNKNOT).unwrap();
        let d = build_cfd(&c, 0).unwrap();
        assert_eq!(d.gens.len(), 1);
        assert_eq!(d.edges.len(), 1);
        assert_eq!(d.edges[0].label, RhoLabel::R12);
        assert_eq!(d.edges[0].from, d.edges[0].to);
    }

    #[test]
    fn unknot_positive_framing_uses_negative_case() {
        let c = parse_cfk(companions::UNKNOT).unwrap();
        let d = build_cfd(&c, 1).unwrap();
        assert_eq!(d.unstable, UnstableCase::Negative { m: 1 });
        assert_eq!(d.i1_count(), 1);
        let labels: Vec<RhoLabel> = d.edges.iter().map(|e| e.label).collect();
        assert!(labels.contains(&RhoLabel::R123));
        assert!(labels.contains(&RhoLabel::R2));
    }

    #[test]
    fn unknot_negative_framing_uses_positive_case() {
        let c = parse_cfk(companions::UNKNOT).unwrap();
        let d = build_cfd(&c, -1).unwrap();
        assert_eq!(d.unstable, UnstableCase::Positive { m: 1 });
        let labels: Vec<RhoLabel> = d.edges.iter().map(|e| e.label).collect();
        assert!(labels.contains(&RhoLabel::R1));
        assert!(labels.contains(&RhoLabel::R3));
    }

    #[test]
    fn left_trefoil_unstable_chain() {
        let c = parse_cfk(companions::T2_3).unwrap();
        let d = build_cfd(&c, 0).unwrap();
        assert_eq!(d.unstable, UnstableCase::Negative { m: 2 });
        let mut labels: Vec<&str> = d
            .edges
            .iter()
            .filter(|e| {
                matches!(d.gens[e.from].tag, GenTag::Mu { .. })
                    || matches!(d.gens[e.to].tag, GenTag::Mu { .. })
            })
            .map(|e| e.label.as_str())
            .collect();
        labels.sort();
        assert_eq!(labels, vec!["r123", "r2", "r23"]);
    }

    #[test]
    fn generator_count_formula() {
        for (_, text) in companions::ALL {
            let c = parse_cfk(text).unwrap();
            for n in [-1, 0, 1, 2] {
                let d = build_cfd(&c, n).unwrap();
                let tau = tau_from_cfk(&c).unwrap();
                let sum_k: u32 = c.vertical.iter().map(|a| a.length).sum();
                let sum_l: u32 = c.horizontal.iter().map(|a| a.length).sum();
                let m = (2 * tau - n).unsigned_abs() as u32;
                assert_eq!(d.i0_count(), c.gen_count());
                assert_eq!(d.i1_count() as u32, sum_k + sum_l + m);
                assert!(check_structure_relation(&d));
            }
        }
    }

    #[test]
    fn chains_have_expected_label_patterns() {
        let c = parse_cfk(companions::T34).unwrap();
        let d = build_cfd(&c, 0).unwrap();
        // Vertical chain of the length-2 arrow a2 -> a0:
        // a2 -r1-> k1_1 <-r23- k1_2 <-r123- a0.
        let k1_1 = d.index_of("k1_1").unwrap();
        let k1_2 = d.index_of("k1_2").unwrap();
        let a2 = d.index_of("a2").unwrap();
        let a0 = d.index_of("a0").unwrap();
        assert!(d.edges.contains(&DEdge { from: a2, to: k1_1, label: RhoLabel::R1 }));
        assert!(d.edges.contains(&DEdge { from: k1_2, to: k1_1, label: RhoLabel::R23 }));
        assert!(d.edges.contains(&DEdge { from: a0, to: k1_2, label: RhoLabel::R123 }));
        // Horizontal chain of the length-2 arrow b2 -> a0:
        // b2 -r3-> l2_1 -r23-> l2_2 -r2-> a0.
        let l2_1 = d.index_of("l2_1").unwrap();
        let l2_2 = d.index_of("l2_2").unwrap();
        let b2 = d.index_of("b2").unwrap();
        assert!(d.edges.contains(&DEdge { from: b2, to: l2_1, label: RhoLabel::R3 }));
        assert!(d.edges.contains(&DEdge { from: l2_1, to: l2_2, label: RhoLabel::R23 }));
        assert!(d.edges.contains(&DEdge { from: l2_2, to: a0, label: RhoLabel::R2 }));
    }

    #[test]
    fn structure_relation_sees_broken_parity() {
        // A square with two composable paths a -> c; deleting one breaks it.
        let gens = vec![
            DGen { name: "a".into(), idem: Idem::I0, tag: GenTag::Mu { pos: 1 } },
            DGen { name: "b".into(), idem: Idem::I1, tag: GenTag::Mu { pos: 2 } },
            DGen { name: "c".into(), idem: Idem::I1, tag: GenTag::Mu { pos: 3 } },
            DGen { name: "d".into(), idem: Idem::I0, tag: GenTag::Mu { pos: 4 } },
        ];
        let full = TypeDStructure {
            gens: gens.clone(),
            edges: vec![
                DEdge { from: 0, to: 1, label: RhoLabel::R1 },
                DEdge { from: 1, to: 2, label: RhoLabel::R23 },
                DEdge { from: 0, to: 3, label: RhoLabel::R12 },
                DEdge { from: 3, to: 2, label: RhoLabel::R3 },
            ],
            unstable: UnstableCase::Rho12,
            xi0: 0,
            eta0: 0,
        };
        assert!(check_structure_relation(&full));
        for skip in 0..4 {
            let partial = TypeDStructure {
                gens: gens.clone(),
                edges: full
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, e)| *e)
                    .collect(),
                unstable: UnstableCase::Rho12,
                xi0: 0,
                eta0: 0,
            };
            assert!(!check_structure_relation(&partial), "deleting edge {skip}");
        }
    }

    #[test]
    fn empty_structure_satisfies_relation() {
        let d = TypeDStructure {
            gens: vec![],
            edges: vec![],
            unstable: UnstableCase::Rho12,
            xi0: 0,
            eta0: 0,
        };
        assert!(check_structure_relation(&d));
    }
}
