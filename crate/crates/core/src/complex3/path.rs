use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::flags::completion;

use super::{edge_index, edge_label, ComplexError, LinkKind, TriangulationComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    L,
    R,
}

/// (t, a, b, c): the train sits in corner a of tet t, on the side opposite
/// the fourth vertex d, with (a, b, c, d) even.
pub type Frame = (usize, usize, usize, usize);

/// One step of a train path: turn left (L) or right (R) around the edge
/// (a, b) of tet t, then cross into the neighbouring tetrahedron.
///
/// L starts at frame (a, b, k) and traverses c_ab; R starts at frame
/// (a, l, b) and traverses c_ab backwards; (k, l) = completion(a, b).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Move {
    pub tet: usize,
    pub kind: MoveKind,
    pub a: usize,
    pub b: usize,
}

impl Move {
    pub fn new(tet: usize, kind: MoveKind, a: usize, b: usize) -> Self {
        assert!(a < 4 && b < 4 && a != b, "bad edge ({a}, {b})");
        Move { tet, kind, a, b }
    }

    pub fn start(&self) -> Frame {
        let (k, l) = completion(self.a, self.b);
        match self.kind {
            MoveKind::L => (self.tet, self.a, self.b, k),
            MoveKind::R => (self.tet, self.a, l, self.b),
        }
    }

    /// The frame after the turn, before crossing, and the face crossed.
    fn turned(&self) -> ((usize, usize, usize), usize) {
        let (k, l) = completion(self.a, self.b);
        match self.kind {
            MoveKind::L => ((self.a, self.b, l), k),
            MoveKind::R => ((self.a, k, self.b), l),
        }
    }

    pub fn end(&self, cx: &TriangulationComplex) -> Option<Frame> {
        let ((x, y, z), face) = self.turned();
        cx.glued(self.tet, face).map(|(t2, _, p)| (t2, p[x], p[y], p[z]))
    }

    pub fn from_frame((t, a, b, c): Frame, kind: MoveKind) -> Self {
        match kind {
            MoveKind::L => Move::new(t, kind, a, b),
            MoveKind::R => Move::new(t, kind, a, c),
        }
    }

    pub fn flipped(&self) -> Self {
        let kind = match self.kind {
            MoveKind::L => MoveKind::R,
            MoveKind::R => MoveKind::L,
        };
        Move { kind, ..*self }
    }

    /// Coefficient of c_ab in the 𝒟-chain of this step.
    pub fn chain_entry(&self) -> (usize, i64) {
        let idx = 12 * self.tet + edge_index(self.a, self.b);
        (idx, if self.kind == MoveKind::L { 1 } else { -1 })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}", self.kind, edge_label(self.tet, self.a, self.b))
    }
}

/// A path in the link made of L/R steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinkPath {
    pub moves: Vec<Move>,
}

impl fmt::Display for LinkPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.moves.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", words.join(", "))
    }
}

impl LinkPath {
    pub fn new(moves: Vec<Move>) -> Self {
        LinkPath { moves }
    }

    /// Parse "L z43, R w41"; tetrahedra z, w, or t2_, t3_, ...; vertices 1-based.
    pub fn parse(s: &str) -> Result<Self, ComplexError> {
        let bad = |m: &str| ComplexError::InvalidPath(format!("cannot parse step {m:?}"));
        let mut moves = vec![];
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (kind, label) = part.split_once(char::is_whitespace).ok_or_else(|| bad(part))?;
            let kind = match kind {
                "L" => MoveKind::L,
                "R" => MoveKind::R,
                _ => return Err(bad(part)),
            };
            let label = label.trim();
            let (tet, digits) = if let Some(r) = label.strip_prefix('z') {
                (0, r)
            } else if let Some(r) = label.strip_prefix('w') {
                (1, r)
            } else if let Some(r) = label.strip_prefix('t') {
                let (num, rest) = r.split_once('_').ok_or_else(|| bad(part))?;
                (num.parse().map_err(|_| bad(part))?, rest)
            } else {
                return Err(bad(part));
            };
            let d: Vec<usize> = digits.chars().map(|c| c.to_digit(10).map(|v| v as usize)).collect::<Option<_>>().ok_or_else(|| bad(part))?;
            if d.len() != 2 || d.iter().any(|&v| !(1..=4).contains(&v)) || d[0] == d[1] {
                return Err(bad(part));
            }
            moves.push(Move::new(tet, kind, d[0] - 1, d[1] - 1));
        }
        Ok(LinkPath { moves })
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Composability and absence of immediate backtracking; returns the end frame.
    pub fn validate(&self, cx: &TriangulationComplex) -> Result<Option<Frame>, ComplexError> {
        let mut end = None;
        for (n, m) in self.moves.iter().enumerate() {
            if m.tet >= cx.num_tetrahedra() {
                return Err(ComplexError::InvalidPath(format!("step {n} names a missing tetrahedron")));
            }
            if let Some(e) = end {
                if e != m.start() {
                    return Err(ComplexError::InvalidPath(format!("step {n} ({m}) does not start where step {} ends", n - 1)));
                }
                if self.moves[n - 1].tet == m.tet
                    && self.moves[n - 1].a == m.a
                    && self.moves[n - 1].b == m.b
                    && self.moves[n - 1].kind != m.kind
                {
                    return Err(ComplexError::InvalidPath(format!("step {n} backtracks")));
                }
            }
            end = Some(m.end(cx).ok_or_else(|| ComplexError::InvalidPath(format!("step {n} ({m}) leaves the complex")))?);
        }
        Ok(end)
    }

    pub fn is_closed(&self, cx: &TriangulationComplex) -> bool {
        match (self.validate(cx), self.moves.first()) {
            (Ok(Some(end)), Some(first)) => end == first.start(),
            _ => false,
        }
    }

    /// 𝒟-chain: +c_ab for L, −c_ab for R.
    pub fn chain(&self, n_tets: usize) -> Vec<i64> {
        let mut v = vec![0; 12 * n_tets];
        for m in &self.moves {
            let (i, s) = m.chain_entry();
            v[i] += s;
        }
        v
    }

    /// The same closed loop traversed backwards.
    pub fn reversed(&self) -> Self {
        LinkPath { moves: self.moves.iter().rev().map(Move::flipped).collect() }
    }

    pub fn concat(&self, other: &LinkPath) -> Self {
        LinkPath { moves: self.moves.iter().chain(&other.moves).copied().collect() }
    }
}

impl TriangulationComplex {
    /// ι(x, y) for 𝒟-cycles, computed as x · Φ(y).
    pub fn intersection(&self, x: &[i64], y: &[i64]) -> i64 {
        let phi = self.cell_data().phi;
        let n = x.len();
        let mut s = 0;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += x[i] * phi[(i, j)] * y[j];
            }
        }
        s
    }

    fn frames_of_link(&self, link: usize) -> Vec<Frame> {
        let mut out = vec![];
        for &(t, a) in &self.links()[link].corners {
            for d in (0..4).filter(|&d| d != a) {
                let mut rest = (0..4).filter(|&v| v != a && v != d);
                let (b, c) = (rest.next().unwrap(), rest.next().unwrap());
                let (b, c) = if completion(a, b) == (c, d) { (b, c) } else { (c, b) };
                out.push((t, a, b, c));
            }
        }
        out.sort();
        out
    }

    /// Closed train paths a, b generating the first homology of a torus link
    /// with ι(a, b) = 1; deterministic (BFS from the smallest frame).
    pub fn link_homology_basis(&self, link: usize) -> Result<(LinkPath, LinkPath), ComplexError> {
        match self.links()[link].kind {
            LinkKind::Torus => {}
            LinkKind::Sphere => return Err(ComplexError::SphereLink(link)),
            _ => return Err(ComplexError::NoBasis(link)),
        }
        let frames = self.frames_of_link(link);
        let root = frames[0];
        let out_moves = |f: Frame| [MoveKind::L, MoveKind::R].map(|k| Move::from_frame(f, k));

        // shortest paths root → f and f → root
        let mut fwd: BTreeMap<Frame, Vec<Move>> = BTreeMap::new();
        fwd.insert(root, vec![]);
        let mut q = VecDeque::from([root]);
        while let Some(f) = q.pop_front() {
            for m in out_moves(f) {
                let g = m.end(self).expect("torus links are closed");
                if !fwd.contains_key(&g) {
                    let mut p = fwd[&f].clone();
                    p.push(m);
                    fwd.insert(g, p);
                    q.push_back(g);
                }
            }
        }
        let mut incoming: BTreeMap<Frame, Vec<Move>> = BTreeMap::new();
        for &f in &frames {
            for m in out_moves(f) {
                incoming.entry(m.end(self).unwrap()).or_default().push(m);
            }
        }
        let mut back: BTreeMap<Frame, Vec<Move>> = BTreeMap::new();
        back.insert(root, vec![]);
        let mut q = VecDeque::from([root]);
        while let Some(f) = q.pop_front() {
            for m in incoming.get(&f).cloned().unwrap_or_default() {
                let g = m.start();
                if !back.contains_key(&g) {
                    let mut p = vec![m];
                    p.extend(back[&f].iter().copied());
                    back.insert(g, p);
                    q.push_back(g);
                }
            }
        }

        let mut loops: Vec<LinkPath> = vec![];
        for &f in &frames {
            for m in out_moves(f) {
                let g = m.end(self).unwrap();
                let mut mv = fwd[&f].clone();
                mv.push(m);
                mv.extend(back[&g].iter().copied());
                let p = cancel_backtracking(mv);
                if !p.is_empty() && !loops.iter().any(|l| l.moves == p) {
                    loops.push(LinkPath::new(p));
                }
            }
        }
        loops.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.moves.cmp(&y.moves)));
        let n = self.num_tetrahedra();
        let chains: Vec<Vec<i64>> = loops.iter().map(|l| l.chain(n)).collect();
        let mut best: Option<(usize, usize, usize, i64)> = None;
        for i in 0..loops.len() {
            for j in i + 1..loops.len() {
                let iota = self.intersection(&chains[i], &chains[j]);
                if iota.abs() == 1 {
                    let cost = loops[i].len() + loops[j].len();
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, i, j, iota));
                    }
                }
            }
        }
        let (_, i, j, iota) = best.ok_or(ComplexError::NoBasis(link))?;
        let a = loops[i].clone();
        let b = if iota == 1 { loops[j].clone() } else { loops[j].reversed() };
        Ok((a, b))
    }
}

/// Remove cyclic "move then its reverse" pairs; the result is still closed.
fn cancel_backtracking(moves: Vec<Move>) -> Vec<Move> {
    let cancels = |x: &Move, y: &Move| x.tet == y.tet && x.a == y.a && x.b == y.b && x.kind != y.kind;
    let mut out: Vec<Move> = vec![];
    for m in moves {
        if out.last().is_some_and(|l| cancels(l, &m)) {
            out.pop();
        } else {
            out.push(m);
        }
    }
    while out.len() >= 2 && cancels(out.last().unwrap(), &out[0]) {
        out.pop();
        out.remove(0);
    }
    out
}
