//! Brute-force references: automorphism orbits by backtracking and the
//! set-choosing pebble game solved exactly on tiny inputs.

use serde::Serialize;

use crate::algiso::standard_similarity;
use crate::caps::{self, caps};
use crate::cc::{self, CoherentConfiguration};
use crate::coloring::PairColoring;
use crate::error::{Error, Result};
use crate::partition::{self, UnionFind};

/// Orbits of Aut(X) on points, pairs and optionally triples.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    pub n: usize,
    /// Orbit label of each point (least point of its orbit).
    pub points: Vec<u32>,
    /// inv(Aut(X)) as a validated configuration.
    pub pairs: CoherentConfiguration,
    /// Orbit labels on Ω³, row-major, when requested.
    pub triples: Option<Vec<u32>>,
    /// Generators found, as point images.
    pub generators: Vec<Vec<usize>>,
    pub group_order: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitSummary {
    pub n: usize,
    pub point_orbits: usize,
    pub pair_orbits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple_orbits: Option<usize>,
    pub group_order: String,
    pub generators: Vec<Vec<usize>>,
}

impl OrbitPartition {
    pub fn summary(&self) -> OrbitSummary {
        let count = |v: &[u32]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len()
        };
        OrbitSummary {
            n: self.n,
            point_orbits: count(&self.points),
            pair_orbits: self.pairs.rank(),
            triple_orbits: self.triples.as_ref().map(|t| count(t)),
            group_order: self.group_order.to_string(),
            generators: self.generators.clone(),
        }
    }
}

struct Search<'a> {
    x: &'a PairColoring,
    /// Stable vertex colors of the coherent closure.
    cell: Vec<u32>,
    n: usize,
}

impl Search<'_> {
    /// An automorphism fixing 0..level and sending `level` to `target`.
    fn find(&self, level: usize, target: usize) -> Option<Vec<usize>> {
        let n = self.n;
        if self.cell[level] != self.cell[target] {
            return None;
        }
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for p in 0..level {
            image[p] = p;
            used[p] = true;
        }
        if used[target] {
            return None;
        }
        image[level] = target;
        used[target] = true;
        if !self.consistent(&image, level) {
            return None;
        }
        self.extend(&mut image, &mut used, level + 1).then_some(image)
    }

    fn consistent(&self, image: &[usize], k: usize) -> bool {
        let ik = image[k];
        (0..=k).all(|j| {
            let ij = image[j];
            self.x.color(j, k) == self.x.color(ij, ik) && self.x.color(k, j) == self.x.color(ik, ij)
        })
    }

    fn extend(&self, image: &mut Vec<usize>, used: &mut Vec<bool>, k: usize) -> bool {
        if k == self.n {
            return true;
        }
        for v in 0..self.n {
            if used[v] || self.cell[v] != self.cell[k] {
                continue;
            }
            image[k] = v;
            used[v] = true;
            if self.consistent(image, k) && self.extend(image, used, k + 1) {
                return true;
            }
            used[v] = false;
        }
        image[k] = usize::MAX;
        false
    }
}

fn orbit_labels(n: usize, arity: usize, generators: &[Vec<usize>]) -> Vec<u32> {
    let total = n.pow(arity as u32);
    let mut uf = UnionFind::new(total);
    let mut t = vec![0usize; arity];
    for g in generators {
        for idx in 0..total {
            let mut k = idx;
            for slot in t.iter_mut().rev() {
                *slot = k % n;
                k /= n;
            }
            let img = t.iter().fold(0, |acc, &a| acc * n + g[a]);
            uf.union(idx, img);
        }
    }
    (0..total).map(|i| uf.find(i) as u32).collect()
}

/// Aut(X) by a stabilizer-chain search, processed from the deepest base
/// point up; orbits on tuples by union-find over the generators.
pub fn brute_orbits(x: &PairColoring, max_arity: usize) -> Result<OrbitPartition> {
    let n = x.n();
    caps::check("orbits", n, caps().orbits)?;
    if !(1..=3).contains(&max_arity) {
        return Err(Error::Arity(format!("orbit arity {max_arity} not in 1..=3")));
    }
    let closure = cc::wl_closure(x, &[])?;
    let cell: Vec<u32> = (0..n).map(|a| closure.color(a, a)).collect();
    let search = Search { x, cell, n };
    let mut generators: Vec<Vec<usize>> = Vec::new();
    let mut order: u128 = 1;
    for level in (0..n).rev() {
        // orbit of `level` under the generators found so far (all fix 0..level-1)
        let mut orbit = vec![level];
        let mut v = 0;
        while v < n {
            let in_orbit = {
                let labels = orbit_labels(n, 1, &generators);
                orbit = (0..n).filter(|&p| labels[p] == labels[level]).collect();
                orbit.contains(&v)
            };
            if !in_orbit && v > level {
                if let Some(g) = search.find(level, v) {
                    generators.push(g);
                    continue;
                }
            }
            v += 1;
        }
        order *= orbit.len() as u128;
    }
    let points = orbit_labels(n, 1, &generators);
    let pair_labels = orbit_labels(n, 2, &generators);
    let pairs = CoherentConfiguration::new(&PairColoring::from_labels(n, &pair_labels))?;
    let triples = (max_arity >= 3).then(|| orbit_labels(n, 3, &generators));
    Ok(OrbitPartition {
        n,
        points,
        pairs,
        triples,
        generators,
        group_order: order,
    })
}

/// Does the permutation preserve every class of the coloring?
pub fn preserves(p: &PairColoring, g: &[usize]) -> bool {
    let n = p.n();
    (0..n).all(|a| (0..n).all(|b| p.color(a, b) == p.color(g[a], g[b])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Winner {
    Spoiler,
    Duplicator,
}

/// Exact solution of the set-choosing game with three pebble pairs (the
/// game characterizing 2-dimensional colors) on two rainbows.
pub struct PebbleGame<'a> {
    g: &'a PairColoring,
    h: &'a PairColoring,
    n: usize,
    /// Slot value 0 = off, else 1 + a·n + a′.
    slots: usize,
    alive: Vec<bool>,
}

const PEBBLES: usize = 3;

impl<'a> PebbleGame<'a> {
    /// Solves the game completely (greatest fixed point).
    pub fn solve(g: &'a PairColoring, h: &'a PairColoring) -> Result<Self> {
        Self::solve_rounds(g, h, usize::MAX)
    }

    /// Positions from which Duplicator survives `rounds` rounds.
    pub fn solve_rounds(g: &'a PairColoring, h: &'a PairColoring, rounds: usize) -> Result<Self> {
        standard_similarity(g, h)?;
        let n = g.n();
        caps::check("game", n, caps().game)?;
        let slots = n * n + 1;
        let total = slots.pow(PEBBLES as u32);
        let mut game = PebbleGame {
            g,
            h,
            n,
            slots,
            alive: vec![false; total],
        };
        for p in 0..total {
            game.alive[p] = game.consistent(p);
        }
        let mut done = 0;
        while done < rounds {
            let next: Vec<bool> = (0..total).map(|p| game.alive[p] && !game.spoiler_step(p)).collect();
            done += 1;
            if next == game.alive {
                break;
            }
            game.alive = next;
        }
        Ok(game)
    }

    fn decode(&self, p: usize) -> [Option<(usize, usize)>; PEBBLES] {
        let mut out = [None; PEBBLES];
        let mut k = p;
        for slot in out.iter_mut() {
            let v = k % self.slots;
            k /= self.slots;
            if v > 0 {
                *slot = Some(((v - 1) / self.n, (v - 1) % self.n));
            }
        }
        out
    }

    fn encode(&self, pos: &[Option<(usize, usize)>; PEBBLES]) -> usize {
        pos.iter().rev().fold(0, |acc, s| {
            acc * self.slots + s.map_or(0, |(a, b)| 1 + a * self.n + b)
        })
    }

    /// The pebbled map is a partial isomorphism respecting colors.
    fn consistent(&self, p: usize) -> bool {
        let pos = self.decode(p);
        pos.iter().flatten().all(|&(a, b)| {
            pos.iter()
                .flatten()
                .all(|&(c, d)| self.g.color(a, c) == self.h.color(b, d))
        })
    }

    fn moved(&self, p: usize, i: usize, a: usize, b: usize) -> usize {
        let mut pos = self.decode(p);
        pos[i] = Some((a, b));
        self.encode(&pos)
    }

    /// Can Spoiler reach a dead position in one round?
    fn spoiler_step(&self, p: usize) -> bool {
        let n = self.n;
        for side in 0..2 {
            // good[i][a] = bitmask of a′ (Spoiler's side) keeping the position
            let mut good = vec![vec![0u32; n]; PEBBLES];
            for (i, row) in good.iter_mut().enumerate() {
                for (a, mask) in row.iter_mut().enumerate() {
                    for s in 0..n {
                        let q = if side == 0 {
                            // A′ ⊆ Ω (first structure), A ⊆ Ω′
                            self.moved(p, i, s, a)
                        } else {
                            self.moved(p, i, a, s)
                        };
                        if self.alive[q] {
                            *mask |= 1 << s;
                        }
                    }
                }
            }
            for set in 1u32..(1 << n) {
                let ok = (0..n)
                    .filter(|&a| (0..PEBBLES).all(|i| good[i][a] & set != 0))
                    .count();
                if ok < set.count_ones() as usize {
                    return true;
                }
            }
        }
        false
    }

    /// Winner from the initial configuration (x, x′) with |x| ≤ 3.
    pub fn winner(&self, x: &[usize], x2: &[usize]) -> Result<Winner> {
        if x.len() != x2.len() {
            return Err(Error::TupleLength(x.len(), x2.len()));
        }
        if x.len() > PEBBLES {
            return Err(Error::Arity(format!("{} pebbles placed, at most {PEBBLES}", x.len())));
        }
        let mut pos = [None; PEBBLES];
        for (i, (&a, &b)) in x.iter().zip(x2).enumerate() {
            if a >= self.n || b >= self.n {
                return Err(Error::PointOutOfRange { point: a.max(b), n: self.n });
            }
            pos[i] = Some((a, b));
        }
        Ok(if self.alive[self.encode(&pos)] {
            Winner::Duplicator
        } else {
            Winner::Spoiler
        })
    }
}

/// Winner of the game for the 2-dimensional coloring (three pebbles) from
/// (x, x′).
pub fn pebble_game(g: &PairColoring, h: &PairColoring, m: usize, x: &[usize], x2: &[usize]) -> Result<Winner> {
    if m != 2 {
        return Err(Error::Arity(format!("pebble game only for m = 2, got {m}")));
    }
    PebbleGame::solve(g, h)?.winner(x, x2)
}

/// Memo-free recursion: does Duplicator survive `rounds` more rounds?
pub fn survives_without_memo(g: &PairColoring, h: &PairColoring, x: &[(usize, usize)], rounds: usize) -> bool {
    let n = g.n();
    let consistent = |pos: &[Option<(usize, usize)>]| {
        pos.iter()
            .flatten()
            .all(|&(a, b)| pos.iter().flatten().all(|&(c, d)| g.color(a, c) == h.color(b, d)))
    };
    fn go(
        n: usize,
        pos: &mut Vec<Option<(usize, usize)>>,
        rounds: usize,
        consistent: &dyn Fn(&[Option<(usize, usize)>]) -> bool,
    ) -> bool {
        if !consistent(pos) {
            return false;
        }
        if rounds == 0 {
            return true;
        }
        for side in 0..2 {
            for set in 1u32..(1 << n) {
                let mut ok = 0;
                for a in 0..n {
                    let fine = (0..pos.len()).all(|i| {
                        (0..n).filter(|&s| set & (1 << s) != 0).any(|s| {
                            let keep = pos[i];
                            pos[i] = Some(if side == 0 { (s, a) } else { (a, s) });
                            let r = go(n, pos, rounds - 1, consistent);
                            pos[i] = keep;
                            r
                        })
                    });
                    ok += fine as usize;
                }
                if ok < set.count_ones() as usize {
                    return false;
                }
            }
        }
        true
    }
    let mut pos: Vec<Option<(usize, usize)>> = vec![None; PEBBLES];
    for (i, &p) in x.iter().enumerate() {
        pos[i] = Some(p);
    }
    go(n, &mut pos, rounds, &consistent)
}

/// Labels of the WL closure restricted to points, for cross-checks.
pub fn point_cells(x: &PairColoring) -> Result<Vec<u32>> {
    let c = cc::wl_closure(x, &[])?;
    let labels: Vec<u32> = (0..x.n()).map(|a| c.color(a, a)).collect();
    Ok(partition::compact_first_occurrence(&labels).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    #[test]
    fn orbit_examples() {
        let k3 = brute_orbits(&graph::complete(3).rainbow(), 2).unwrap();
        assert_eq!(k3.pairs.rank(), 2);
        assert_eq!(k3.group_order, 6);
        let p = graph::petersen();
        let o = brute_orbits(&p.rainbow(), 2).unwrap();
        assert_eq!(o.group_order, 120);
        let wl = cc::wl_closure(&p.rainbow(), &[]).unwrap();
        assert!(o.pairs.same_partition(&wl));
        let a = brute_orbits(&graph::smallest_asymmetric().rainbow(), 2).unwrap();
        assert_eq!(a.group_order, 1);
        let mut pts = a.points.clone();
        pts.dedup();
        assert_eq!(pts.len(), 6);
        for g in &o.generators {
            assert!(preserves(&p.rainbow(), g));
        }
    }

    #[test]
    fn complete_graph_triples() {
        for n in 3..=5 {
            let o = brute_orbits(&graph::complete(n).rainbow(), 3).unwrap();
            let mut t = o.triples.unwrap();
            t.sort_unstable();
            t.dedup();
            assert_eq!(t.len(), 5);
        }
    }

    #[test]
    fn game_examples() {
        let p3 = graph::path(3).rainbow();
        assert_eq!(pebble_game(&p3, &p3, 2, &[0, 1], &[0, 1]).unwrap(), Winner::Duplicator);
        assert_eq!(pebble_game(&p3, &p3, 2, &[0], &[1]).unwrap(), Winner::Spoiler);
        assert!(pebble_game(&p3, &p3, 3, &[0], &[1]).is_err());
    }

    #[test]
    fn memo_agrees_with_recursion() {
        let g = graph::path(3).rainbow();
        let mut h3 = graph::Graph::empty(3);
        h3.add_edge(0, 2);
        h3.add_edge(1, 2);
        let h = h3.rainbow();
        for rounds in 0..=2 {
            let game = PebbleGame::solve_rounds(&g, &h, rounds).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    let memo = game.winner(&[a], &[b]).unwrap() == Winner::Duplicator;
                    assert_eq!(memo, survives_without_memo(&g, &h, &[(a, b)], rounds));
                }
            }
        }
    }
}
