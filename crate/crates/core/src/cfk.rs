//! Simplified CFK^- presentations of companion knots.
//!
//! A complex is given by generators with Alexander gradings plus vertical and
//! horizontal arrows with positive lengths, in a simultaneously simplified
//! basis (each generator meets at most one arrow of each kind). This covers
//! staircase complexes of L-space knots and staircase-plus-box complexes of
//! thin knots.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::homology::{FilteredComplex, FilteredEntry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub length: u32,
}

#[derive(Debug, Clone)]
pub struct CfkComplex {
    pub names: Vec<String>,
    pub alexander: Vec<i64>,
    pub vertical: Vec<Arrow>,
    pub horizontal: Vec<Arrow>,
}

impl CfkComplex {
    pub fn gen_count(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The distinguished generator with no vertical arrow.
    pub fn xi0(&self) -> usize {
        let mut in_vertical = vec![false; self.gen_count()];
        for a in &self.vertical {
            in_vertical[a.from] = true;
            in_vertical[a.to] = true;
        }
        in_vertical.iter().position(|b| !b).expect("validated complex has a xi0")
    }

    /// The distinguished generator with no horizontal arrow, when unique.
    pub fn eta0(&self) -> Result<usize> {
        let mut in_horizontal = vec![false; self.gen_count()];
        for a in &self.horizontal {
            in_horizontal[a.from] = true;
            in_horizontal[a.to] = true;
        }
        let free: Vec<usize> =
            (0..self.gen_count()).filter(|&i| !in_horizontal[i]).collect();
        match free.as_slice() {
            [i] => Ok(*i),
            _ => Err(Error::Invariant(format!(
                "expected exactly one generator without a horizontal arrow, found {}",
                free.len()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.gen_count();
        if n == 0 {
            return Err(Error::Invariant("no generators".into()));
        }
        let mut seen = BTreeSet::new();
        for name in &self.names {
            if !seen.insert(name.clone()) {
                return Err(Error::Invariant(format!("duplicate generator name {name}")));
            }
        }
        let mut vcount = vec![0usize; n];
        let mut hcount = vec![0usize; n];
        for a in &self.vertical {
            if a.from >= n || a.to >= n {
                return Err(Error::Invariant("arrow endpoint out of range".into()));
            }
            if a.length == 0 {
                return Err(Error::Invariant("arrow length must be positive".into()));
            }
            vcount[a.from] += 1;
            vcount[a.to] += 1;
            let drop = self.alexander[a.from] - self.alexander[a.to];
            if drop != a.length as i64 {
                return Err(Error::Invariant(format!(
                    "vertical arrow {} -> {} has length {} but grading drop {}",
                    self.names[a.from], self.names[a.to], a.length, drop
                )));
            }
        }
        for a in &self.horizontal {
            if a.from >= n || a.to >= n {
                return Err(Error::Invariant("arrow endpoint out of range".into()));
            }
            if a.length == 0 {
                return Err(Error::Invariant("arrow length must be positive".into()));
            }
            hcount[a.from] += 1;
            hcount[a.to] += 1;
            let raise = self.alexander[a.to] - self.alexander[a.from];
            if raise != a.length as i64 {
                return Err(Error::Invariant(format!(
                    "horizontal arrow {} -> {} has length {} but grading raise {}",
                    self.names[a.from], self.names[a.to], a.length, raise
                )));
            }
        }
        for i in 0..n {
            if vcount[i] > 1 || hcount[i] > 1 {
                return Err(Error::Invariant(format!(
                    "generator {} is not simultaneously simplified",
                    self.names[i]
                )));
            }
        }
        // Alexander multiset symmetric under negation.
        let mut mult: BTreeMap<i64, i64> = BTreeMap::new();
        for &a in &self.alexander {
            *mult.entry(a).or_insert(0) += 1;
        }
        for (&a, &m) in &mult {
            if mult.get(&-a).copied().unwrap_or(0) != m {
                return Err(Error::Invariant(format!(
                    "Alexander multiset not symmetric: grading {a} has multiplicity {m}"
                )));
            }
        }
        // Exactly one generator without a vertical arrow.
        let free: Vec<usize> = (0..n)
            .filter(|&i| {
                !self
                    .vertical
                    .iter()
                    .any(|a| a.from == i || a.to == i)
            })
            .collect();
        if free.len() != 1 {
            return Err(Error::Invariant(format!(
                "expected exactly one generator without a vertical arrow, found {}",
                free.len()
            )));
        }
        Ok(())
    }

    /// Mirror presentation: negate gradings, reverse all arrows, and swap
    /// nothing else. Used by property tests.
    pub fn mirror(&self) -> CfkComplex {
        CfkComplex {
            names: self.names.clone(),
            alexander: self.alexander.iter().map(|a| -a).collect(),
            vertical: self
                .vertical
                .iter()
                .map(|a| Arrow { from: a.to, to: a.from, length: a.length })
                .collect(),
            horizontal: self
                .horizontal
                .iter()
                .map(|a| Arrow { from: a.to, to: a.from, length: a.length })
                .collect(),
        }
    }

    /// Conjugation symmetry: a bijection s with A(s(x)) = -A(x) carrying the
    /// vertical arrow (x -> y, k) to the horizontal arrow (s(x) -> s(y), k)
    /// and vice versa. Exists for every complex of a knot; found here by
    /// backtracking over the (tiny) generator set.
    pub fn conjugation(&self) -> Result<Vec<usize>> {
        let n = self.gen_count();
        let mut vert_of: Vec<Option<(usize, usize, u32, bool)>> = vec![None; n];
        let mut horiz_of: Vec<Option<(usize, usize, u32, bool)>> = vec![None; n];
        for a in &self.vertical {
            vert_of[a.from] = Some((a.from, a.to, a.length, true));
            vert_of[a.to] = Some((a.from, a.to, a.length, false));
        }
        for a in &self.horizontal {
            horiz_of[a.from] = Some((a.from, a.to, a.length, true));
            horiz_of[a.to] = Some((a.from, a.to, a.length, false));
        }

        let mut assign: Vec<Option<usize>> = vec![None; n];
        let mut used = vec![false; n];

        fn compatible(
            c: &CfkComplex,
            vert_of: &[Option<(usize, usize, u32, bool)>],
            horiz_of: &[Option<(usize, usize, u32, bool)>],
            assign: &[Option<usize>],
            x: usize,
            y: usize,
        ) -> bool {
            if c.alexander[y] != -c.alexander[x] {
                return false;
            }
            // Vertical structure of x must match horizontal structure of y.
            match (vert_of[x], horiz_of[y]) {
                (None, None) => {}
                (Some((f, t, k, _)), Some((f2, t2, k2, _))) => {
                    if k != k2 {
                        return false;
                    }
                    // source/target roles must match
                    let x_src = f == x;
                    let y_src = f2 == y;
                    if x_src != y_src {
                        return false;
                    }
                    // partner consistency
                    let (px, py) = (if x_src { t } else { f }, if y_src { t2 } else { f2 });
                    if let Some(q) = assign[px] {
                        if q != py {
                            return false;
                        }
                    }
                }
                _ => return false,
            }
            match (horiz_of[x], vert_of[y]) {
                (None, None) => {}
                (Some((f, t, k, _)), Some((f2, t2, k2, _))) => {
                    if k != k2 {
                        return false;
                    }
                    let x_src = f == x;
                    let y_src = f2 == y;
                    if x_src != y_src {
                        return false;
                    }
                    let (px, py) = (if x_src { t } else { f }, if y_src { t2 } else { f2 });
                    if let Some(q) = assign[px] {
                        if q != py {
                            return false;
                        }
                    }
                }
                _ => return false,
            }
            true
        }

        fn search(
            c: &CfkComplex,
            vert_of: &[Option<(usize, usize, u32, bool)>],
            horiz_of: &[Option<(usize, usize, u32, bool)>],
            assign: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            i: usize,
        ) -> bool {
            let n = c.gen_count();
            if i == n {
                return true;
            }
            if assign[i].is_some() {
                return search(c, vert_of, horiz_of, assign, used, i + 1);
            }
            for y in 0..n {
                if used[y] || !compatible(c, vert_of, horiz_of, assign, i, y) {
                    continue;
                }
                assign[i] = Some(y);
                used[y] = true;
                if search(c, vert_of, horiz_of, assign, used, i + 1) {
                    return true;
                }
                assign[i] = None;
                used[y] = false;
            }
            false
        }

        if search(self, &vert_of, &horiz_of, &mut assign, &mut used, 0) {
            Ok(assign.into_iter().map(|a| a.unwrap()).collect())
        } else {
            Err(Error::Invariant(
                "no conjugation symmetry found; input is not a knot complex".into(),
            ))
        }
    }
}

/// Parse the line-based CFK file format.
///
/// ```text
/// gen <name> A=<integer>
/// varrow <from> <to> len=<positive integer>
/// harrow <from> <to> len=<positive integer>
/// ```
/// `#` starts a comment; blank lines are ignored.
pub fn parse_cfk(text: &str) -> Result<CfkComplex> {
    let mut names = Vec::new();
    let mut alexander = Vec::new();
    let mut vertical = Vec::new();
    let mut horizontal = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let lineno = lineno + 1;
        let parse_err = |msg: String| Error::Parse { line: lineno, msg };
        match parts[0] {
            "gen" => {
                if parts.len() != 3 {
                    return Err(parse_err("expected `gen <name> A=<int>`".into()));
                }
                let name = parts[1].to_string();
                let a = parts[2]
                    .strip_prefix("A=")
                    .ok_or_else(|| parse_err("expected A=<int>".into()))?
                    .parse::<i64>()
                    .map_err(|e| parse_err(format!("bad grading: {e}")))?;
                if index.contains_key(&name) {
                    return Err(parse_err(format!("duplicate generator {name}")));
                }
                index.insert(name.clone(), names.len());
                names.push(name);
                alexander.push(a);
            }
            "varrow" | "harrow" => {
                if parts.len() != 4 {
                    return Err(parse_err(format!(
                        "expected `{} <from> <to> len=<int>`",
                        parts[0]
                    )));
                }
                let from = *index
                    .get(parts[1])
                    .ok_or_else(|| parse_err(format!("unknown generator {}", parts[1])))?;
                let to = *index
                    .get(parts[2])
                    .ok_or_else(|| parse_err(format!("unknown generator {}", parts[2])))?;
                let len = parts[3]
                    .strip_prefix("len=")
                    .ok_or_else(|| parse_err("expected len=<int>".into()))?
                    .parse::<u32>()
                    .map_err(|e| parse_err(format!("bad length: {e}")))?;
                let arrow = Arrow { from, to, length: len };
                if parts[0] == "varrow" {
                    vertical.push(arrow);
                } else {
                    horizontal.push(arrow);
                }
            }
            other => {
                return Err(parse_err(format!("unknown directive `{other}`")));
            }
        }
    }

    let c = CfkComplex { names, alexander, vertical, horizontal };
    c.validate()?;
    Ok(c)
}

/// The vertical complex as a filtered complex over F2: entries drop the
/// Alexander grading by the arrow length.
pub fn vertical_complex(c: &CfkComplex) -> FilteredComplex {
    FilteredComplex {
        ids: c.names.clone(),
        alexander: c.alexander.clone(),
        entries: c
            .vertical
            .iter()
            .map(|a| FilteredEntry { from: a.from, to: a.to, drop: a.length as i64 })
            .collect(),
    }
}

/// tau(K): Alexander grading of the unique cycle surviving cancellation of
/// the vertical complex.
pub fn tau_from_cfk(c: &CfkComplex) -> Result<i64> {
    let fc = vertical_complex(c);
    let survivor = crate::homology::filtered_reduce(&fc, None)?;
    Ok(fc.alexander[survivor])
}

/// epsilon(K) from the horizontal-arrow role of the distinguished generator.
pub fn epsilon_from_cfk(c: &CfkComplex) -> i64 {
    let xi0 = c.xi0();
    for a in &c.horizontal {
        if a.to == xi0 {
            return 1;
        }
        if a.from == xi0 {
            return -1;
        }
    }
    0
}

/// Seifert genus: the top Alexander grading with a generator (the
/// presentation is reduced, so ranks equal generator counts).
pub fn genus_from_cfk(c: &CfkComplex) -> i64 {
    *c.alexander.iter().max().expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::companions;

    #[test]
    fn parse_unknot() {
        let c = parse_cfk(companions::UNKNOT).unwrap();
        assert_eq!(c.gen_count(), 1);
        assert_eq!(tau_from_cfk(&c).unwrap(), 0);
        assert_eq!(epsilon_from_cfk(&c), 0);
        assert_eq!(genus_from_cfk(&c), 0);
    }

    #[test]
    fn parse_trefoil() {
        let c = parse_cfk(companions::T23).unwrap();
        assert_eq!(c.gen_count(), 3);
        assert_eq!(c.vertical.len(), 1);
        assert_eq!(c.horizontal.len(), 1);
        assert_eq!(tau_from_cfk(&c).unwrap(), 1);
        assert_eq!(epsilon_from_cfk(&c), 1);
        assert_eq!(genus_from_cfk(&c), 1);
    }

    #[test]
    fn parse_left_trefoil() {
        let c = parse_cfk(companions::T2_3).unwrap();
        assert_eq!(tau_from_cfk(&c).unwrap(), -1);
        assert_eq!(epsilon_from_cfk(&c), -1);
        assert_eq!(genus_from_cfk(&c), 1);
    }

    #[test]
    fn parse_t34() {
        let c = parse_cfk(companions::T34).unwrap();
        assert_eq!(c.gen_count(), 5);
        assert_eq!(tau_from_cfk(&c).unwrap(), 3);
        assert_eq!(epsilon_from_cfk(&c), 1);
        assert_eq!(genus_from_cfk(&c), 3);
    }

    #[test]
    fn parse_figure8() {
        let c = parse_cfk(companions::FIGURE8).unwrap();
        assert_eq!(c.gen_count(), 5);
        assert_eq!(tau_from_cfk(&c).unwrap(), 0);
        assert_eq!(epsilon_from_cfk(&c), 0);
        assert_eq!(genus_from_cfk(&c), 1);
    }

    #[test]
    fn mirror_negates_tau_and_epsilon() {
        for text in companions::ALL.iter().map(|(_, t)| t) {
            let c = parse_cfk(text).unwrap();
            let m = c.mirror();
            m.validate().unwrap();
            assert_eq!(tau_from_cfk(&m).unwrap(), -tau_from_cfk(&c).unwrap());
            assert_eq!(epsilon_from_cfk(&m), -epsilon_from_cfk(&c));
        }
    }

    #[test]
    fn tau_bounded_by_genus_and_epsilon_zero_forces_tau_zero() {
        for (_, text) in companions::ALL {
            let c = parse_cfk(text).unwrap();
            let tau = tau_from_cfk(&c).unwrap();
            assert!(tau.abs() <= genus_from_cfk(&c));
            if epsilon_from_cfk(&c) == 0 {
                assert_eq!(tau, 0);
            }
        }
    }

    #[test]
    fn conjugation_exists_for_all_companions() {
        for (_, text) in companions::ALL {
            let c = parse_cfk(text).unwrap();
            let s = c.conjugation().unwrap();
            for i in 0..c.gen_count() {
                assert_eq!(c.alexander[s[i]], -c.alexander[i]);
                assert_eq!(s[s[i]], i, "conjugation should be an involution here");
            }
        }
    }

    #[test]
    fn rejects_bad_grading() {
        let bad = "gen a A=1\ngen b A=1\nvarrow a b len=1\n";
        assert!(parse_cfk(bad).is_err());
    }

    #[test]
    fn rejects_double_vertical() {
        let bad = "gen a A=2\ngen b A=1\ngen c A=0\ngen x A=0\ngen y A=-1\ngen z A=-2\n\
                   varrow a b len=1\nvarrow b c len=1\n";
        assert!(parse_cfk(bad).is_err());
    }

    #[test]
    fn syntax_error_reports_line() {
        let bad = "gen a A=0\nbogus line here\n";
        match parse_cfk(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
