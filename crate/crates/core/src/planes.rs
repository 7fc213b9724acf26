//! Finite projective planes, their incidence graphs and rank-4 schemes, and
//! the one-point / 2-extension reports.

use serde::Serialize;

use crate::caps::caps;
use crate::cc::{self, CoherentConfiguration};
use crate::coloring::{PairColoring, Tokens};
use crate::error::{parse_err, Error, Result};
use crate::graph::Graph;
use crate::partition;
use crate::refine::{self, PairSig};

/// GF(q) for the built-in orders, elements encoded as base-p digit vectors.
#[derive(Clone, Debug)]
pub struct FiniteField {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
}

impl FiniteField {
    pub fn new(q: usize) -> Result<Self> {
        // (p, modulus coefficients low → high, monic)
        let (p, modulus): (usize, Vec<usize>) = match q {
            2 | 3 | 5 | 7 => (q, vec![0, 1]),
            4 => (2, vec![1, 1, 1]),
            8 => (2, vec![1, 1, 0, 1]),
            9 => (3, vec![1, 0, 1]),
            _ => return Err(Error::UnsupportedOrder(q)),
        };
        let k = modulus.len() - 1;
        let digits = |e: usize| -> Vec<usize> { (0..k).map(|i| (e / p.pow(i as u32)) % p).collect() };
        let value = |d: &[usize]| -> usize { d.iter().rev().fold(0, |acc, &x| acc * p + x) };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = value(&sum) as u8;
                let mut prod = vec![0usize; 2 * k];
                for i in 0..k {
                    for j in 0..k {
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                    }
                }
                for d in (k..2 * k).rev() {
                    let c = prod[d];
                    if c != 0 {
                        for (i, &m) in modulus.iter().enumerate() {
                            let idx = d - k + i;
                            prod[idx] = (prod[idx] + (p - c) * m % p) % p;
                        }
                    }
                }
                mul[a * q + b] = value(&prod[..k]) as u8;
            }
        }
        let f = FiniteField { q, add, mul };
        f.check_axioms()?;
        Ok(f)
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    fn check_axioms(&self) -> Result<()> {
        let q = self.q;
        let bad = |what: &str| Err(Error::InvalidPlane(format!("GF({q}) tables fail {what}")));
        for a in 0..q {
            if self.add(a, 0) != a || self.mul(a, 1) != a {
                return bad("identity");
            }
            if !(0..q).any(|b| self.add(a, b) == 0) {
                return bad("additive inverse");
            }
            if a != 0 && !(0..q).any(|b| self.mul(a, b) == 1) {
                return bad("multiplicative inverse");
            }
            for b in 0..q {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return bad("commutativity");
                }
                for c in 0..q {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                        || self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c))
                    {
                        return bad("associativity/distributivity");
                    }
                }
            }
        }
        Ok(())
    }
}

/// A projective plane: points 0..p-1 and lines as sorted point lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceStructure {
    q: usize,
    points: usize,
    lines: Vec<Vec<usize>>,
}

impl IncidenceStructure {
    /// Validates the plane axioms.
    pub fn new(points: usize, mut lines: Vec<Vec<usize>>) -> Result<Self> {
        let inv = |m: String| Err(Error::InvalidPlane(m));
        if lines.is_empty() {
            return inv("no lines".into());
        }
        for l in lines.iter_mut() {
            l.sort_unstable();
        }
        // lines are numbered in lexicographic order
        lines.sort_unstable();
        let k = lines[0].len();
        if k < 3 {
            return inv(format!("line size {k}: lines need at least 3 points"));
        }
        let q = k - 1;
        let p = q * q + q + 1;
        for (i, l) in lines.iter().enumerate() {
            if l.len() != k {
                return inv(format!("line size: line {i} has {} points, expected {k}", l.len()));
            }
            if l.windows(2).any(|w| w[0] == w[1]) {
                return inv(format!("line {i} repeats a point"));
            }
            if let Some(&x) = l.iter().find(|&&x| x >= points) {
                return inv(format!("line {i} mentions point {x} out of range"));
            }
        }
        if points != p || lines.len() != p {
            return inv(format!(
                "order {q} needs {p} points and {p} lines, got {points} and {}",
                lines.len()
            ));
        }
        let mut on = vec![0usize; points];
        let mut joins: Vec<Option<usize>> = vec![None; points * points];
        for (i, l) in lines.iter().enumerate() {
            for &a in l {
                on[a] += 1;
                for &b in l {
                    if a < b {
                        if let Some(j) = joins[a * points + b] {
                            return inv(format!("points {a} and {b} lie on lines {j} and {i}"));
                        }
                        joins[a * points + b] = Some(i);
                    }
                }
            }
        }
        if let Some(a) = (0..points).find(|&a| on[a] != k) {
            return inv(format!("point {a} is on {} lines, expected {k}", on[a]));
        }
        for a in 0..points {
            for b in a + 1..points {
                if joins[a * points + b].is_none() {
                    return inv(format!("points {a} and {b} share no line"));
                }
            }
        }
        // two lines meet in one point: counting makes this automatic once
        // every pair of points is joined exactly once, but check directly
        let mut member = vec![false; points * lines.len()];
        for (i, l) in lines.iter().enumerate() {
            for &a in l {
                member[i * points + a] = true;
            }
        }
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let common = lines[i].iter().filter(|&&a| member[j * points + a]).count();
                if common != 1 {
                    return inv(format!("lines {i} and {j} meet in {common} points"));
                }
            }
        }
        let plane = IncidenceStructure { q, points, lines };
        if plane.quadrilateral().is_none() {
            return inv("degenerate: no four points in general position".into());
        }
        Ok(plane)
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    /// Four points, no three collinear.
    pub fn quadrilateral(&self) -> Option<[usize; 4]> {
        let p = self.points;
        let mut line_of = vec![usize::MAX; p * p];
        for (i, l) in self.lines.iter().enumerate() {
            for &a in l {
                for &b in l {
                    line_of[a * p + b] = i;
                }
            }
        }
        let collinear = |a: usize, b: usize, c: usize| line_of[a * p + b] == line_of[a * p + c];
        let (a, b) = (0, 1);
        let c = (2..p).find(|&c| !collinear(a, b, c))?;
        let d = (2..p).find(|&d| d != c && !collinear(a, b, d) && !collinear(a, c, d) && !collinear(b, c, d))?;
        Some([a, b, c, d])
    }

    /// Swaps points and lines: new point i is old line i, new line j lists
    /// the old lines through old point j.
    pub fn dual(&self) -> IncidenceStructure {
        let mut lines = vec![Vec::new(); self.points];
        for (i, l) in self.lines.iter().enumerate() {
            for &a in l {
                lines[a].push(i);
            }
        }
        IncidenceStructure::new(self.lines.len(), lines).expect("dual of a plane is a plane")
    }

    /// Plane file: optional `plane <q>` header, then one line of point
    /// indices per plane-line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut lines = Vec::new();
        for (li, raw) in text.lines().enumerate() {
            let mut toks = Tokens::new(raw);
            let Some((_, col, first)) = toks.next_token() else {
                continue;
            };
            if first == "plane" {
                if header.is_some() || !lines.is_empty() {
                    return Err(parse_err(li + 1, col, "`plane` header must come first"));
                }
                let (_, c, q) = toks.number_at("order").map_err(|e| relocate(e, li + 1))?;
                header = Some((li + 1, c, q));
                continue;
            }
            let mut pts = vec![first
                .parse::<usize>()
                .map_err(|_| parse_err(li + 1, col, format!("expected a point index, found `{first}`")))?];
            while let Some((_, c, t)) = toks.next_token() {
                pts.push(
                    t.parse()
                        .map_err(|_| parse_err(li + 1, c, format!("expected a point index, found `{t}`")))?,
                );
            }
            lines.push(pts);
        }
        let points = lines.len();
        let plane = IncidenceStructure::new(points, lines)?;
        if let Some((l, c, q)) = header {
            if q != plane.q {
                return Err(parse_err(l, c, format!("header says order {q}, lines give {}", plane.q)));
            }
        }
        Ok(plane)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("plane {}\n", self.q);
        for l in &self.lines {
            let row: Vec<String> = l.iter().map(|x| x.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse { line, column, message },
        other => other,
    }
}

/// The Desarguesian plane PG(2, q).
pub fn pg2(q: usize) -> Result<IncidenceStructure> {
    let f = FiniteField::new(q)?;
    let mut vecs = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let first = [a, b, c].into_iter().find(|&x| x != 0);
                if first == Some(1) {
                    vecs.push([a, b, c]);
                }
            }
        }
    }
    let dot = |u: &[usize; 3], v: &[usize; 3]| {
        (0..3).fold(0, |acc, i| f.add(acc, f.mul(u[i], v[i])))
    };
    let lines = vecs
        .iter()
        .map(|l| (0..vecs.len()).filter(|&i| dot(l, &vecs[i]) == 0).collect())
        .collect();
    IncidenceStructure::new(vecs.len(), lines)
}

pub fn load_plane(path: &std::path::Path) -> Result<IncidenceStructure> {
    IncidenceStructure::parse(&std::fs::read_to_string(path)?)
}

pub fn dual_plane(p: &IncidenceStructure) -> IncidenceStructure {
    p.dual()
}

/// Bipartite incidence graph: points 0..p-1, lines p..2p-1.
pub fn incidence_graph(p: &IncidenceStructure) -> Graph {
    let mut g = Graph::empty(2 * p.points);
    for (i, l) in p.lines.iter().enumerate() {
        for &a in l {
            g.add_edge(a, p.points + i);
        }
    }
    g
}

/// Rank-4 scheme with s₀ = diagonal, s₁ = distinct of the same kind,
/// s₂ = incident, s₃ = non-incident.
#[derive(Clone, Debug)]
pub struct PlaneScheme {
    pub q: usize,
    /// s-index of every pair, row-major.
    pub relation: Vec<u8>,
    pub scheme: CoherentConfiguration,
}

impl PlaneScheme {
    pub fn n(&self) -> usize {
        self.scheme.n()
    }

    pub fn s(&self, a: usize, b: usize) -> u8 {
        self.relation[a * self.n() + b]
    }
}

pub fn plane_scheme(p: &IncidenceStructure) -> PlaneScheme {
    let g = incidence_graph(p);
    let np = p.points;
    let n = 2 * np;
    let relation: Vec<u8> = (0..n * n)
        .map(|i| {
            let (a, b) = (i / n, i % n);
            if a == b {
                0
            } else if (a < np) == (b < np) {
                1
            } else if g.adjacent(a, b) {
                2
            } else {
                3
            }
        })
        .collect();
    let coloring = PairColoring::new(n, relation.iter().map(|&s| s as u32).collect()).expect("dense");
    let scheme = CoherentConfiguration::new(&coloring).expect("plane scheme is coherent");
    PlaneScheme {
        q: p.q,
        relation,
        scheme,
    }
}

/// Fiber sizes of X_α in the order αs₀..αs₃, and the 4×4 table counting
/// classes of X_α between αs_i and αs_j.
pub fn one_point_blocks(ps: &PlaneScheme, xa: &CoherentConfiguration, alpha: usize) -> Option<([usize; 4], [[usize; 4]; 4])> {
    let n = ps.n();
    let mut block_of_fiber = vec![usize::MAX; xa.fibers().len()];
    let mut sizes = [0usize; 4];
    for (f, fiber) in xa.fibers().iter().enumerate() {
        let s = ps.s(alpha, fiber[0]) as usize;
        if fiber.iter().any(|&b| ps.s(alpha, b) as usize != s) {
            return None;
        }
        if sizes[s] != 0 {
            return None;
        }
        sizes[s] = fiber.len();
        block_of_fiber[f] = s;
    }
    let _ = n;
    let mut table = [[0usize; 4]; 4];
    for c in xa.classes() {
        table[block_of_fiber[c.left_fiber]][block_of_fiber[c.right_fiber]] += 1;
    }
    Some((sizes, table))
}

/// Checks, for base point α, that the collinearity relation on αs₁ equals
/// (s₁₂₂ · s₂₂₁) minus the diagonal, where s_ijk is the set of pairs in
/// αs_i × αs_k lying in s_j, and that it is a relation of X_α.
pub fn collinearity_identity(ps: &PlaneScheme, xa: &CoherentConfiguration, alpha: usize) -> bool {
    let n = ps.n();
    let s = |a: usize, b: usize| ps.s(a, b);
    let collinear = |b: usize, c: usize| (0..n).any(|d| s(d, alpha) == 2 && s(d, b) == 2 && s(d, c) == 2);
    let mut class_all = vec![0usize; xa.rank()];
    let mut class_in_r = vec![0usize; xa.rank()];
    for b in 0..n {
        for c in 0..n {
            let r = s(alpha, b) == 1 && s(alpha, c) == 1 && b != c && collinear(b, c);
            let prod = b != c
                && s(alpha, b) == 1
                && s(alpha, c) == 1
                && (0..n).any(|d| s(alpha, d) == 2 && s(b, d) == 2 && s(d, c) == 2);
            if r != prod {
                return false;
            }
            let k = xa.color(b, c) as usize;
            class_all[k] += 1;
            class_in_r[k] += r as usize;
        }
    }
    class_all
        .iter()
        .zip(&class_in_r)
        .all(|(&all, &inr)| inr == 0 || inr == all)
}

/// X_α equals the Γ-restriction of X̂ with Γ = Ω × {α}, read through
/// (β, α) ↦ β.
pub fn gamma_restriction_matches(hat: &CoherentConfiguration, xa: &CoherentConfiguration, alpha: usize) -> bool {
    let n = xa.n();
    let restricted: Vec<u32> = (0..n * n)
        .map(|i| hat.color((i / n) * n + alpha, (i % n) * n + alpha))
        .collect();
    partition::same(&restricted, xa.coloring().colors())
}

/// One-point extension data expressed in names that do not depend on q:
/// classes are named by a set-valued refinement started from the s-indices,
/// which sees incidence patterns but not multiplicities.
#[derive(Clone, Debug)]
pub struct OnePointProfile {
    pub q: usize,
    /// Signature lists of the set-valued refinement, one per round.
    pub shape: Vec<Vec<PairSig>>,
    /// True iff the set-valued classes coincide with the classes of X_α.
    pub matches_extension: bool,
    /// For each class t (in q-free naming), sorted (r, s, c_{r,s}^t).
    pub tensor: Vec<Vec<(u32, u32, u32)>>,
}

pub fn one_point_profile(ps: &PlaneScheme, alpha: usize) -> Result<OnePointProfile> {
    let n = ps.n();
    let xa = cc::point_extension(&ps.scheme, &[alpha])?;
    let keys: Vec<u32> = (0..n * n)
        .map(|i| ps.relation[i] as u32 * 2 + (i == alpha * n + alpha) as u32)
        .collect();
    let (mut names, distinct) = refine::name_keys(&[keys.as_slice()]);
    let r = refine::refine_pairs(vec![names.pop().unwrap()], &[n], distinct.len(), true, false);
    let colors = &r.colors[0];
    let mut shape = vec![distinct
        .iter()
        .map(|&k| PairSig { old: k, transpose: 0, counts: Box::new([]) })
        .collect::<Vec<_>>()];
    shape.extend(r.rounds.iter().map(|round| round.sigs.clone()));
    let matches_extension = partition::same(colors, xa.coloring().colors());
    let mut rep = vec![None; r.rank];
    for (i, &c) in colors.iter().enumerate() {
        rep[c as usize].get_or_insert(i);
    }
    let tensor = rep
        .iter()
        .map(|i| {
            let (a, b) = (i.unwrap() / n, i.unwrap() % n);
            let mut m = std::collections::BTreeMap::new();
            for g in 0..n {
                *m.entry((colors[a * n + g], colors[g * n + b])).or_insert(0u32) += 1;
            }
            m.into_iter().map(|((x, y), c)| (x, y, c)).collect()
        })
        .collect();
    Ok(OnePointProfile {
        q: ps.q,
        shape,
        matches_extension,
        tensor,
    })
}

/// Outcome of comparing one-point profiles across orders.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileComparison {
    /// Same q-free class naming (identical set-valued refinement shapes).
    pub correspondence: bool,
    /// Same nonzero pattern of intersection numbers.
    pub same_support: bool,
    /// Every entry follows one polynomial of degree ≤ 2 in q, fitted on the
    /// first three profiles and confirmed on the rest.
    pub polynomial_in_q: bool,
}

/// Compares profiles for increasing orders. Needs at least two profiles;
/// the polynomial test needs at least four.
pub fn compare_profiles(profiles: &[OnePointProfile]) -> ProfileComparison {
    let base = &profiles[0];
    let correspondence = profiles
        .iter()
        .all(|p| p.matches_extension && p.shape == base.shape);
    let support = |p: &OnePointProfile| -> Vec<Vec<(u32, u32)>> {
        p.tensor.iter().map(|t| t.iter().map(|x| (x.0, x.1)).collect()).collect()
    };
    let same_support = correspondence && profiles.iter().all(|p| support(p) == support(base));
    let polynomial_in_q = same_support && profiles.len() >= 4 && {
        let qs: Vec<i64> = profiles.iter().map(|p| p.q as i64).collect();
        (0..base.tensor.len()).all(|t| {
            (0..base.tensor[t].len()).all(|k| {
                let v: Vec<i64> = profiles.iter().map(|p| p.tensor[t][k].2 as i64).collect();
                fits_quadratic(&qs, &v)
            })
        })
    };
    ProfileComparison {
        correspondence,
        same_support,
        polynomial_in_q,
    }
}

/// Lagrange interpolation through the first three points, exact in
/// rationals, checked on the remaining points.
fn fits_quadratic(x: &[i64], y: &[i64]) -> bool {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    (3..x.len()).all(|i| {
        let t = x[i];
        // y(t) = Σ y_j Π (t - x_k)/(x_j - x_k)
        let terms = [
            (y[0], (t - x1) * (t - x2), (x0 - x1) * (x0 - x2)),
            (y[1], (t - x0) * (t - x2), (x1 - x0) * (x1 - x2)),
            (y[2], (t - x0) * (t - x1), (x2 - x0) * (x2 - x1)),
        ];
        let den: i64 = terms.iter().map(|t| t.2).product();
        let num: i64 = terms.iter().map(|&(yy, a, b)| yy * a * (den / b)).sum();
        num == y[i] * den
    })
}

#[derive(Clone, Debug)]
pub struct PlaneReportOptions {
    /// Largest order for which the 2-extension is computed.
    pub two_extension_max_q: usize,
}

impl Default for PlaneReportOptions {
    fn default() -> Self {
        PlaneReportOptions { two_extension_max_q: 4 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneReport {
    pub q: usize,
    pub scheme_rank: usize,
    pub valencies: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_extension_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parabolic_counts: Option<[usize; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parabolic_classes: Option<usize>,
    pub one_point_rank: usize,
    /// True iff every point and line gives the same one-point rank.
    pub one_point_rank_uniform: bool,
    pub one_point_fiber_sizes: Option<[usize; 4]>,
    pub one_point_block_table: Option<[[usize; 4]; 4]>,
    /// X_α equals the Γ-restriction of the 2-extension mapped through f_α.
    #[serde(rename = "eq_070123x_check", skip_serializing_if = "Option::is_none")]
    pub extension_restriction_check: Option<bool>,
    pub collinearity_identity_check: bool,
    pub wl_closure_matches_scheme: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notices: Vec<String>,
}

pub fn plane_report(p: &IncidenceStructure, opts: &PlaneReportOptions) -> Result<PlaneReport> {
    let ps = plane_scheme(p);
    let n = ps.n();
    let mut notices = Vec::new();
    let closure = cc::wl_closure(&incidence_graph(p).rainbow(), &[])?;
    let mut valencies = vec![0; 4];
    for c in ps.scheme.classes() {
        // canon names of the plane scheme are the s-indices
        let _ = c;
    }
    for (k, c) in ps.scheme.classes().iter().enumerate() {
        valencies[ps.scheme.canon()[k] as usize] = c.left_valency;
    }
    let hat = if p.q <= opts.two_extension_max_q && n <= caps().two_extension {
        Some(cc::two_extension(&ps.scheme)?)
    } else {
        notices.push(format!(
            "2-extension skipped for q = {} (limit q ≤ {}, n ≤ {})",
            p.q,
            opts.two_extension_max_q,
            caps().two_extension
        ));
        None
    };
    let parabolic = match &hat {
        Some(h) => Some(cc::parabolic_report(h)?),
        None => None,
    };
    let mut ranks = Vec::with_capacity(n);
    let mut eq_check = hat.as_ref().map(|_| true);
    let mut collinear = true;
    let mut first = None;
    for alpha in 0..n {
        let xa = cc::point_extension(&ps.scheme, &[alpha])?;
        ranks.push(xa.rank());
        if let (Some(h), Some(ok)) = (&hat, eq_check.as_mut()) {
            *ok &= gamma_restriction_matches(h, &xa, alpha);
        }
        collinear &= collinearity_identity(&ps, &xa, alpha);
        if alpha == 0 {
            first = one_point_blocks(&ps, &xa, 0);
        }
    }
    Ok(PlaneReport {
        q: p.q,
        scheme_rank: ps.scheme.rank(),
        valencies,
        two_extension_rank: hat.as_ref().map(|h| h.rank()),
        parabolic_counts: parabolic.as_ref().map(|r| r.rows),
        parabolic_classes: parabolic.as_ref().map(|r| r.classes_in_e),
        one_point_rank: ranks[0],
        one_point_rank_uniform: ranks.iter().all(|&r| r == ranks[0]),
        one_point_fiber_sizes: first.map(|f| f.0),
        one_point_block_table: first.map(|f| f.1),
        extension_restriction_check: eq_check,
        collinearity_identity_check: collinear,
        wl_closure_matches_scheme: closure.same_partition(&ps.scheme),
        notices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            assert_eq!(FiniteField::new(q).unwrap().order(), q);
        }
        assert!(matches!(FiniteField::new(6), Err(Error::UnsupportedOrder(6))));
    }

    #[test]
    fn small_planes() {
        let fano = pg2(2).unwrap();
        assert_eq!(fano.num_points(), 7);
        assert!(fano.lines().iter().all(|l| l.len() == 3));
        let p3 = pg2(3).unwrap();
        assert_eq!(2 * p3.num_points(), 26);
        assert!(pg2(6).is_err());
        for q in [4, 5, 7, 8, 9] {
            assert_eq!(pg2(q).unwrap().num_points(), q * q + q + 1);
        }
    }

    #[test]
    fn plane_file_errors() {
        let fano = pg2(2).unwrap();
        let back = IncidenceStructure::parse(&fano.to_text()).unwrap();
        assert_eq!(back, fano);
        let bad = "0 1\n0 2\n";
        assert!(matches!(IncidenceStructure::parse(bad), Err(Error::InvalidPlane(m)) if m.contains("line size")));
        let text = fano.to_text().replace("plane 2", "plane 3");
        assert!(IncidenceStructure::parse(&text).is_err());
        let mut lines = fano.lines().to_vec();
        lines[1] = lines[0].clone();
        assert!(IncidenceStructure::new(7, lines).is_err());
    }

    #[test]
    fn dual_is_plane() {
        let p = pg2(3).unwrap();
        let d = p.dual();
        let dd = d.dual();
        assert_eq!(dd, p);
    }

    #[test]
    fn schemes() {
        for (q, v) in [(2, [1, 6, 3, 4]), (3, [1, 12, 4, 9])] {
            let p = pg2(q).unwrap();
            let ps = plane_scheme(&p);
            assert_eq!(ps.scheme.rank(), 4);
            let mut val = [0; 4];
            for (k, c) in ps.scheme.classes().iter().enumerate() {
                val[ps.scheme.canon()[k] as usize] = c.left_valency;
                assert_eq!(c.transpose as usize, k);
            }
            assert_eq!(val, v);
            let g = incidence_graph(&p);
            assert!((0..g.n()).all(|v| g.degree(v) == q + 1));
            let closure = cc::wl_closure(&g.rainbow(), &[]).unwrap();
            assert!(closure.same_partition(&ps.scheme));
        }
        let g = incidence_graph(&pg2(2).unwrap());
        assert_eq!((g.n(), g.edge_count()), (14, 21));
    }

    #[test]
    fn quadratic_fit() {
        let x = [3, 4, 5, 7];
        assert!(fits_quadratic(&x, &[9, 16, 25, 49]));
        assert!(fits_quadratic(&x, &[2, 2, 2, 2]));
        assert!(!fits_quadratic(&x, &[27, 64, 125, 343]));
    }
}
