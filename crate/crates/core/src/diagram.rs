//! Bratteli diagrams: validation, tail rules, telescoping and the canonical
//! indexing of finite paths.
//!
//! A diagram is an explicit prefix (vertex counts for levels `0..=L` and the
//! incidence matrices between them) followed by a [`Tail`] rule that supplies
//! every deeper level. Finite paths ending at a vertex `v` of level `n` are
//! numbered `0..h_v` in the order of the key
//!
//! ```text
//! (source vertex w of the last edge, index of the prefix at w, index of the last edge in its bundle)
//! ```
//!
//! so the index of a path is `offset_v(w) + prefix * f_{v,w} + edge`. With
//! this order a permutation of level-`n` prefixes acts on level-`n+1` indices
//! by moving whole contiguous blocks of size `f_{v,w}`.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// How levels beyond the explicit prefix are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    /// No levels beyond the prefix.
    Explicit,
    /// The square matrix is repeated forever.
    Stationary(IntMatrix),
    /// One vertex per level joined by `b` edges.
    Odometer(u64),
    /// `|V_n| = n + 1`, every pair of consecutive-level vertices joined by one edge.
    BrFamily,
    /// Levels are the cut levels of the parent diagram.
    Telescoped(Box<Telescoped>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Telescoped {
    pub parent: BratteliDiagram,
    pub cuts: Cuts,
}

/// Strictly increasing telescoping levels `0 = m_0 < m_1 < ...`, optionally
/// continued forever with a fixed stride after the last listed level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cuts {
    levels: Vec<usize>,
    stride: Option<usize>,
}

impl Cuts {
    pub fn new(levels: Vec<usize>, stride: Option<usize>) -> Result<Cuts> {
        if levels.first() != Some(&0) {
            return Err(Error::InvalidCuts("the first cut must be level 0".into()));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCuts(format!(
                "levels {levels:?} are not strictly increasing"
            )));
        }
        if stride == Some(0) {
            return Err(Error::InvalidCuts("stride must be positive".into()));
        }
        if stride.is_none() && levels.len() < 2 {
            return Err(Error::InvalidCuts("need at least two cut levels".into()));
        }
        Ok(Cuts { levels, stride })
    }

    pub fn finite(levels: Vec<usize>) -> Result<Cuts> {
        Cuts::new(levels, None)
    }

    /// `{0, k, 2k, ...}`.
    pub fn every(k: usize) -> Result<Cuts> {
        Cuts::new(vec![0], Some(k))
    }

    pub fn listed(&self) -> &[usize] {
        &self.levels
    }

    pub fn stride(&self) -> Option<usize> {
        self.stride
    }

    /// Parent level of telescoped level `k`.
    pub fn level(&self, k: usize) -> Option<usize> {
        match self.levels.get(k) {
            Some(&m) => Some(m),
            None => {
                let s = self.stride?;
                let last = *self.levels.last().unwrap();
                Some(last + (k + 1 - self.levels.len()) * s)
            }
        }
    }

    /// Number of telescoped levels after level 0, if finite.
    pub fn depth(&self) -> Option<usize> {
        match self.stride {
            Some(_) => None,
            None => Some(self.levels.len() - 1),
        }
    }
}

/// One edge of a finite path: `index` numbers the edges of the bundle
/// `source -> target` between consecutive levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BratteliDiagram {
    counts: Vec<usize>,
    prefix: Vec<IntMatrix>,
    tail: Tail,
}

fn check_matrix(level: usize, m: &IntMatrix, rows: usize, cols: usize) -> Result<()> {
    let found = m.shape().unwrap_or((m.nrows(), usize::MAX));
    if found != (rows, cols) {
        return Err(Error::ShapeMismatch {
            level,
            expected: (rows, cols),
            found,
        });
    }
    if let Some(r) = (0..rows).find(|&r| m.row(r).iter().all(|&x| x == 0)) {
        return Err(Error::ZeroRowOrColumn {
            level,
            kind: "row",
            index: r,
        });
    }
    if let Some(c) = (0..cols).find(|&c| (0..rows).all(|r| m.get(r, c) == 0)) {
        return Err(Error::ZeroRowOrColumn {
            level,
            kind: "column",
            index: c,
        });
    }
    Ok(())
}

impl BratteliDiagram {
    /// Validates vertex counts, incidence matrices and the tail rule.
    pub fn new(counts: Vec<usize>, incidence: Vec<IntMatrix>, tail: Tail) -> Result<Self> {
        if counts.first() != Some(&1) {
            return Err(Error::EmptyRootLevel);
        }
        if incidence.len() + 1 != counts.len() {
            return Err(Error::BadTail(format!(
                "{} vertex counts need {} incidence matrices, got {}",
                counts.len(),
                counts.len() - 1,
                incidence.len()
            )));
        }
        for (n, m) in incidence.iter().enumerate() {
            check_matrix(n, m, counts[n + 1], counts[n])?;
        }
        let last = counts.len() - 1;
        let k = counts[last];
        match &tail {
            Tail::Explicit | Tail::Telescoped(_) => {}
            Tail::Stationary(f) => check_matrix(last, f, k, k)?,
            Tail::Odometer(b) => {
                if *b < 2 {
                    return Err(Error::BadTail("odometer base must be at least 2".into()));
                }
                if k != 1 {
                    return Err(Error::BadTail(format!(
                        "odometer tail needs one vertex at level {last}, found {k}"
                    )));
                }
            }
            Tail::BrFamily => {
                if k != last + 1 {
                    return Err(Error::BadTail(format!(
                        "B_R tail needs {} vertices at level {last}, found {k}",
                        last + 1
                    )));
                }
            }
        }
        Ok(BratteliDiagram {
            counts,
            prefix: incidence,
            tail,
        })
    }

    pub fn explicit(counts: Vec<usize>, incidence: Vec<IntMatrix>) -> Result<Self> {
        Self::new(counts, incidence, Tail::Explicit)
    }

    pub fn odometer(base: u64) -> Result<Self> {
        Self::new(vec![1], vec![], Tail::Odometer(base))
    }

    /// The diagram whose full group is the group of rational permutations.
    pub fn br() -> Self {
        Self::new(vec![1], vec![], Tail::BrFamily).expect("B_R is valid")
    }

    /// Root vector to level 1, then `f` repeated.
    pub fn stationary(root: Vec<u64>, f: IntMatrix) -> Result<Self> {
        let k = root.len();
        let first = IntMatrix::from_rows(root.into_iter().map(|x| vec![x]).collect());
        Self::new(vec![1, k], vec![first], Tail::Stationary(f))
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Explicit prefix: vertex counts for levels `0..=L`.
    pub fn prefix_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn prefix_incidence(&self) -> &[IntMatrix] {
        &self.prefix
    }

    /// Last level of the explicit prefix.
    pub fn prefix_depth(&self) -> usize {
        self.counts.len() - 1
    }

    /// Deepest level, `None` when the tail rule is unbounded.
    pub fn depth(&self) -> Option<usize> {
        match &self.tail {
            Tail::Explicit => Some(self.prefix_depth()),
            Tail::Telescoped(t) => t.cuts.depth(),
            _ => None,
        }
    }

    pub fn is_br(&self) -> bool {
        matches!(self.tail, Tail::BrFamily)
            && self.counts.iter().enumerate().all(|(n, &k)| k == n + 1)
            && self.prefix.iter().all(|m| m.all_entries(|x| x == 1))
    }

    pub fn check_level(&self, n: usize) -> Result<()> {
        match self.depth() {
            Some(d) if n > d => Err(Error::DepthExceeded {
                requested: n,
                available: d,
            }),
            _ => Ok(()),
        }
    }

    pub fn vertex_count(&self, n: usize) -> Result<usize> {
        self.check_level(n)?;
        if let Some(&k) = self.counts.get(n) {
            return Ok(k);
        }
        Ok(match &self.tail {
            Tail::Explicit => unreachable!("checked by check_level"),
            Tail::Stationary(f) => f.nrows(),
            Tail::Odometer(_) => 1,
            Tail::BrFamily => n + 1,
            Tail::Telescoped(t) => t.parent.vertex_count(t.cuts.level(n).unwrap())?,
        })
    }

    /// Incidence matrix `F_n` between levels `n` and `n + 1`.
    pub fn incidence(&self, n: usize) -> Result<IntMatrix> {
        self.check_level(n + 1)?;
        if let Some(m) = self.prefix.get(n) {
            return Ok(m.clone());
        }
        Ok(match &self.tail {
            Tail::Explicit => unreachable!("checked by check_level"),
            Tail::Stationary(f) => f.clone(),
            Tail::Odometer(b) => IntMatrix::filled(1, 1, *b),
            Tail::BrFamily => IntMatrix::filled(n + 2, n + 1, 1),
            Tail::Telescoped(t) => {
                let (a, b) = (t.cuts.level(n).unwrap(), t.cuts.level(n + 1).unwrap());
                t.parent.product(a, b)?
            }
        })
    }

    /// `F_{b-1} ⋯ F_a`: number of paths from level-`a` vertices to level-`b`
    /// vertices (the identity when `a == b`).
    pub fn product(&self, a: usize, b: usize) -> Result<IntMatrix> {
        assert!(a <= b);
        let mut p = IntMatrix::identity(self.vertex_count(a)?);
        for n in a..b {
            p = self
                .incidence(n)?
                .checked_mul(&p)
                .ok_or(Error::CountOverflow(n + 1))?;
        }
        Ok(p)
    }

    /// `h_v^{(n)}` for every vertex of level `n`.
    pub fn path_counts(&self, n: usize) -> Result<Vec<u64>> {
        self.check_level(n)?;
        let mut h = vec![1u64];
        for k in 0..n {
            h = self
                .incidence(k)?
                .checked_apply(&h)
                .ok_or(Error::CountOverflow(k + 1))?;
        }
        Ok(h)
    }

    pub fn table(&self, n: usize) -> Result<LevelTable> {
        LevelTable::build(self, n)
    }

    /// Collapses the levels between consecutive cuts.
    pub fn telescope(&self, cuts: &Cuts) -> Result<BratteliDiagram> {
        if let Some(d) = self.depth() {
            if cuts.stride().is_some() {
                return Err(Error::InvalidCuts(
                    "periodic cuts need an unbounded diagram".into(),
                ));
            }
            let last = *cuts.listed().last().unwrap();
            if last > d {
                return Err(Error::InvalidCuts(format!(
                    "cut level {last} is beyond depth {d}"
                )));
            }
        }
        if matches!(self.tail, Tail::Explicit) {
            let levels = cuts.listed();
            let counts = levels
                .iter()
                .map(|&m| self.vertex_count(m))
                .collect::<Result<Vec<_>>>()?;
            let mats = levels
                .windows(2)
                .map(|w| self.product(w[0], w[1]))
                .collect::<Result<Vec<_>>>()?;
            return BratteliDiagram::explicit(counts, mats);
        }
        Ok(BratteliDiagram {
            counts: vec![1],
            prefix: vec![],
            tail: Tail::Telescoped(Box::new(Telescoped {
                parent: self.clone(),
                cuts: cuts.clone(),
            })),
        })
    }

    /// Searches for positivity of `F_{m-1} ⋯ F_n` for every `n < bound`.
    pub fn is_simple(&self, bound: usize) -> Simplicity {
        let bound = self.depth().map_or(bound, |d| d.min(bound));
        let mut witnesses = Vec::new();
        for n in 0..bound {
            let mut p = match self.incidence(n) {
                Ok(f) => f,
                Err(_) => return Simplicity::Unknown(bound),
            };
            let mut found = None;
            for m in n + 1..=bound {
                if p.is_positive() {
                    found = Some(m);
                    break;
                }
                if m == bound {
                    break;
                }
                match self.incidence(m) {
                    Ok(f) => p = f.pattern_mul(&p),
                    Err(_) => break,
                }
            }
            match found {
                Some(m) => witnesses.push((n, m)),
                None => {
                    if let Tail::Stationary(f) = &self.tail {
                        if !f.is_primitive() {
                            return Simplicity::NotSimple(NotSimpleWitness {
                                level: self.prefix_depth(),
                                reason: "stationary matrix is not primitive, so no power \
                                         of it is strictly positive"
                                    .into(),
                            });
                        }
                    }
                    return Simplicity::Unknown(bound);
                }
            }
        }
        Simplicity::Simple(witnesses)
    }

    /// Greedy search for cuts whose telescoped matrices have only even
    /// entries `>= 2`.
    pub fn find_even_telescoping(&self, bound: usize) -> EvenTelescoping {
        let bound = self.depth().map_or(bound, |d| d.min(bound));
        let mut cuts = vec![0];
        let mut cur = 0;
        'outer: while cur < bound {
            let mut p = match self.vertex_count(cur) {
                Ok(k) => IntMatrix::identity(k),
                Err(_) => break,
            };
            for m in cur + 1..=bound {
                p = match self.incidence(m - 1).ok().and_then(|f| f.checked_mul(&p)) {
                    Some(p) => p,
                    None => break 'outer,
                };
                if p.all_entries(|x| x >= 2 && x % 2 == 0) {
                    cuts.push(m);
                    cur = m;
                    continue 'outer;
                }
            }
            break;
        }
        if cuts.len() < 2 {
            EvenTelescoping::NotFound(bound)
        } else {
            EvenTelescoping::Found(cuts)
        }
    }

    pub fn path_of_index(&self, n: usize, v: usize, i: usize) -> Result<Vec<Edge>> {
        self.table(n)?.path_of_index(n, v, i)
    }

    pub fn index_of_path(&self, path: &[Edge]) -> Result<(usize, usize)> {
        self.table(path.len())?.index_of_path(path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Simplicity {
    /// Pairs `(n, m)` with `F_{m-1} ⋯ F_n` strictly positive.
    Simple(Vec<(usize, usize)>),
    Unknown(usize),
    NotSimple(NotSimpleWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotSimpleWitness {
    pub level: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvenTelescoping {
    Found(Vec<usize>),
    NotFound(usize),
}

/// Vertex counts, path counts, incidence matrices and block offsets for
/// levels `0..=depth` of a diagram.
#[derive(Debug, Clone)]
pub struct LevelTable {
    vertices: Vec<usize>,
    counts: Vec<Vec<u64>>,
    incidence: Vec<IntMatrix>,
    // offsets[n][v][w]: first index of the block of level-n paths through w at level n-1.
    offsets: Vec<Vec<Vec<u64>>>,
}

impl LevelTable {
    pub fn build(d: &BratteliDiagram, depth: usize) -> Result<LevelTable> {
        d.check_level(depth)?;
        let mut vertices = vec![1];
        let mut counts = vec![vec![1u64]];
        let mut incidence = Vec::with_capacity(depth);
        let mut offsets = vec![vec![vec![0, 1]]];
        for n in 0..depth {
            let f = d.incidence(n)?;
            let prev = &counts[n];
            let mut offs = Vec::with_capacity(f.nrows());
            let mut h = Vec::with_capacity(f.nrows());
            for v in 0..f.nrows() {
                let mut acc = 0u64;
                let mut o = vec![0u64];
                for (w, &hw) in prev.iter().enumerate() {
                    acc = hw
                        .checked_mul(f.get(v, w))
                        .and_then(|x| acc.checked_add(x))
                        .ok_or(Error::CountOverflow(n + 1))?;
                    o.push(acc);
                }
                offs.push(o);
                h.push(acc);
            }
            vertices.push(f.nrows());
            counts.push(h);
            offsets.push(offs);
            incidence.push(f);
        }
        Ok(LevelTable {
            vertices,
            counts,
            incidence,
            offsets,
        })
    }

    pub fn depth(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertex_count(&self, n: usize) -> usize {
        self.vertices[n]
    }

    pub fn counts(&self, n: usize) -> &[u64] {
        &self.counts[n]
    }

    pub fn count(&self, n: usize, v: usize) -> usize {
        self.counts[n][v] as usize
    }

    /// Total number of level-`n` paths.
    pub fn total(&self, n: usize) -> usize {
        self.counts[n].iter().sum::<u64>() as usize
    }

    pub fn incidence(&self, n: usize) -> &IntMatrix {
        &self.incidence[n]
    }

    fn check(&self, n: usize, v: usize, i: usize) -> Result<()> {
        if n > self.depth() {
            return Err(Error::DepthExceeded {
                requested: n,
                available: self.depth(),
            });
        }
        if v >= self.vertices[n] {
            return Err(Error::NoSuchVertex { level: n, vertex: v });
        }
        if i as u64 >= self.counts[n][v] {
            return Err(Error::IndexOutOfRange {
                level: n,
                vertex: v,
                index: i,
                count: self.counts[n][v],
            });
        }
        Ok(())
    }

    /// Splits a level-`n` index (`n >= 1`) into `(w, prefix, edge)`.
    pub fn locate(&self, n: usize, v: usize, i: usize) -> (usize, usize, usize) {
        let offs = &self.offsets[n][v];
        let i = i as u64;
        // last w with offs[w] <= i and a nonempty block
        let w = offs.partition_point(|&o| o <= i) - 1;
        let f = self.incidence[n - 1].get(v, w);
        let r = i - offs[w];
        ((w), (r / f) as usize, (r % f) as usize)
    }

    /// Inverse of [`LevelTable::locate`].
    pub fn index_at(&self, n: usize, v: usize, w: usize, prefix: usize, edge: usize) -> usize {
        let f = self.incidence[n - 1].get(v, w);
        (self.offsets[n][v][w] + prefix as u64 * f + edge as u64) as usize
    }

    /// The level-`k` prefix `(vertex, index)` of a level-`n` path.
    pub fn prefix_at(&self, n: usize, v: usize, i: usize, k: usize) -> (usize, usize) {
        let (mut v, mut i) = (v, i);
        for level in (k + 1..=n).rev() {
            let (w, p, _) = self.locate(level, v, i);
            v = w;
            i = p;
        }
        (v, i)
    }

    pub fn path_of_index(&self, n: usize, v: usize, i: usize) -> Result<Vec<Edge>> {
        self.check(n, v, i)?;
        let mut edges = Vec::with_capacity(n);
        let (mut v, mut i) = (v, i);
        for level in (1..=n).rev() {
            let (w, p, e) = self.locate(level, v, i);
            edges.push(Edge {
                source: w,
                target: v,
                index: e,
            });
            v = w;
            i = p;
        }
        edges.reverse();
        Ok(edges)
    }

    /// Terminal vertex and index of a path starting at the root.
    pub fn index_of_path(&self, path: &[Edge]) -> Result<(usize, usize)> {
        let bad = |m: String| Error::Parse {
            location: "path".into(),
            message: m,
        };
        if path.len() > self.depth() {
            return Err(Error::DepthExceeded {
                requested: path.len(),
                available: self.depth(),
            });
        }
        let (mut v, mut i) = (0usize, 0usize);
        for (k, e) in path.iter().enumerate() {
            let n = k + 1;
            if e.source != v {
                return Err(bad(format!("edge {k} does not start at vertex {v}")));
            }
            if e.target >= self.vertices[n]
                || e.index as u64 >= self.incidence[k].get(e.target, e.source)
            {
                return Err(bad(format!("edge {k} does not exist")));
            }
            i = self.index_at(n, e.target, e.source, i, e.index);
            v = e.target;
        }
        Ok((v, i))
    }

    /// Indices at level `n + 1` of the one-edge extensions of level-`n` path
    /// `(v, i)`, grouped by target vertex.
    pub fn extensions(&self, n: usize, v: usize, i: usize) -> Vec<(usize, Vec<usize>)> {
        let f = &self.incidence[n];
        (0..self.vertices[n + 1])
            .filter(|&x| f.get(x, v) > 0)
            .map(|x| {
                let start = self.index_at(n + 1, x, v, i, 0);
                (x, (start..start + f.get(x, v) as usize).collect())
            })
            .collect()
    }
}

/// Segment indexing between two levels: paths from a fixed vertex `u` at
/// level `a` to level `b`, numbered with the same key as root paths.
pub(crate) struct Segments {
    a: usize,
    u: usize,
    counts: Vec<Vec<u64>>,
}

impl Segments {
    pub(crate) fn new(t: &LevelTable, a: usize, u: usize, b: usize) -> Segments {
        let mut c = vec![0u64; t.vertex_count(a)];
        c[u] = 1;
        let mut counts = vec![c];
        for n in a..b {
            let next = t.incidence(n).checked_apply(&counts[n - a]).expect("fits: bounded by path counts");
            counts.push(next);
        }
        Segments { a, u, counts }
    }

    /// Number of segments from `u` to `x` on level `b`.
    pub(crate) fn count(&self, b: usize, x: usize) -> u64 {
        self.counts[b - self.a][x]
    }

    fn offset(&self, t: &LevelTable, level: usize, x: usize, w: usize) -> u64 {
        let f = t.incidence(level - 1);
        (0..w)
            .map(|w2| f.get(x, w2) * self.counts[level - 1 - self.a][w2])
            .sum()
    }

    /// Segment from `u` ending at `x` on level `b`, given by its index.
    pub(crate) fn edges(&self, t: &LevelTable, b: usize, x: usize, i: usize) -> Vec<Edge> {
        let mut out = Vec::with_capacity(b - self.a);
        let (mut x, mut i) = (x, i as u64);
        for level in (self.a + 1..=b).rev() {
            let f = t.incidence(level - 1);
            let prev = &self.counts[level - 1 - self.a];
            let mut acc = 0;
            let mut w = 0;
            loop {
                let size = f.get(x, w) * prev[w];
                if i < acc + size {
                    break;
                }
                acc += size;
                w += 1;
            }
            let r = i - acc;
            let fw = f.get(x, w);
            out.push(Edge {
                source: w,
                target: x,
                index: (r % fw) as usize,
            });
            x = w;
            i = r / fw;
        }
        debug_assert_eq!(x, self.u);
        out.reverse();
        out
    }

    pub(crate) fn index(&self, t: &LevelTable, edges: &[Edge]) -> usize {
        let mut i = 0u64;
        for (k, e) in edges.iter().enumerate() {
            let level = self.a + k + 1;
            let f = t.incidence(level - 1).get(e.target, e.source);
            i = self.offset(t, level, e.target, e.source) + i * f + e.index as u64;
        }
        i as usize
    }
}
