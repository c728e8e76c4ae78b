//! Cayley graphs of `Z/N ⋊_m Z/L` on the generators `a, A, t, T`.
//!
//! Vertex `x + N k` is the element `(x, k)`. Each vertex stores its four
//! right-multiplication neighbours in the fixed order `a, A, t, T`, so the
//! adjacency is one flat `u32` array.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::bs::Letter;
use crate::error::{Error, Result};
use crate::quotient::{QuotientElem, QuotientGroup};

pub const DEFAULT_VERTEX_CAP: u64 = 5_000_000;

const UNREACHED: u32 = u32::MAX;

/// `C_m = 2m(2 + ln m)`, the upper diameter constant for `Q(m, N)`.
pub fn diameter_constant(m: u64) -> f64 {
    2.0 * m as f64 * (2.0 + libm::log(m as f64))
}

/// Interval `[ord / 3, C_m ord]` that contains `diam Cay(Q(m, N))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiameterEnvelope {
    order: BigUint,
    pub upper: f64,
}

impl DiameterEnvelope {
    pub fn new(m: u64, order: &BigUint) -> Self {
        let upper = diameter_constant(m) * order.to_f64().unwrap_or(f64::INFINITY);
        DiameterEnvelope {
            order: order.clone(),
            upper,
        }
    }

    pub fn lower(&self) -> f64 {
        self.order.to_f64().unwrap_or(f64::INFINITY) / 3.0
    }

    /// Exact on the lower side (`3 diam >= ord`).
    pub fn contains(&self, diameter: u64) -> bool {
        BigUint::from(diameter) * 3u8 >= self.order && diameter as f64 <= self.upper
    }
}

/// Word-sized copy of a quotient's group law, with `m^k mod N` tabulated.
#[derive(Debug, Clone)]
pub struct SmallQuotient {
    n: u64,
    l: u64,
    m_pow: Vec<u64>,
}

impl SmallQuotient {
    pub fn new(q: &QuotientGroup) -> Option<Self> {
        let n = q.modulus().to_u64()?;
        let l = q.torsion().to_u64()?;
        let m = (q.m() % q.modulus()).to_u64()?;
        let mut m_pow = Vec::with_capacity(usize::try_from(l).ok()?);
        let mut acc = 1 % n;
        for _ in 0..l {
            m_pow.push(acc);
            acc = ((acc as u128 * m as u128) % n as u128) as u64;
        }
        Some(SmallQuotient { n, l, m_pow })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn torsion(&self) -> u64 {
        self.l
    }

    /// `(x1, k1)(x2, k2) = (x1 + m^k1 x2, k1 + k2)`.
    #[inline]
    pub fn mul(&self, u: (u64, u64), v: (u64, u64)) -> (u64, u64) {
        let scaled = (self.m_pow[u.1 as usize] as u128 * v.0 as u128) % self.n as u128;
        let x = ((u.0 as u128 + scaled) % self.n as u128) as u64;
        let k = ((u.1 as u128 + v.1 as u128) % self.l as u128) as u64;
        (x, k)
    }

    pub fn generator(&self, letter: Letter) -> (u64, u64) {
        match letter {
            Letter::A => (1 % self.n, 0),
            Letter::AInv => ((self.n - 1) % self.n, 0),
            Letter::T => (0, 1 % self.l),
            Letter::TInv => (0, (self.l - 1) % self.l),
        }
    }
}

/// A 4-regular Cayley multigraph with flat adjacency.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    group: QuotientGroup,
    small: SmallQuotient,
    adjacency: Vec<u32>,
}

/// Builds the Cayley graph, refusing groups larger than `vertex_cap`.
pub fn build_graph(q: &QuotientGroup, vertex_cap: u64) -> Result<CayleyGraph> {
    let size = q.size();
    let cap = vertex_cap.min(u32::MAX as u64 - 1);
    if size > BigUint::from(cap) {
        return Err(Error::ResourceCap {
            what: "Cayley graph",
            required: format!("{size} vertices (raise the vertex cap to at least {size})"),
            cap,
        });
    }
    let small = SmallQuotient::new(q).ok_or_else(|| Error::invariant("quotient does not fit in u64"))?;
    let count = (small.n * small.l) as usize;
    let gens = Letter::ALL.map(|l| small.generator(l));
    let mut adjacency = Vec::with_capacity(count * 4);
    for k in 0..small.l {
        for x in 0..small.n {
            for g in gens {
                let (nx, nk) = small.mul((x, k), g);
                adjacency.push((nx + small.n * nk) as u32);
            }
        }
    }
    Ok(CayleyGraph {
        group: q.clone(),
        small,
        adjacency,
    })
}

impl CayleyGraph {
    pub fn group(&self) -> &QuotientGroup {
        &self.group
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len() / 4
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Out-neighbours in generator order `a, A, t, T`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let base = v as usize * 4;
        &self.adjacency[base..base + 4]
    }

    /// `(x, k)` coordinates of a vertex.
    pub fn coords(&self, v: u32) -> (u64, u64) {
        let v = v as u64;
        (v % self.small.n, v / self.small.n)
    }

    pub fn vertex_of(&self, x: u64, k: u64) -> Option<u32> {
        (x < self.small.n && k < self.small.l).then(|| (x + self.small.n * k) as u32)
    }

    pub fn vertex_elem(&self, v: u32) -> QuotientElem {
        let (x, k) = self.coords(v);
        QuotientElem::new(x, k)
    }

    /// Every edge `u -s-> v` has a partner `v -s^-1-> u`.
    pub fn is_inverse_closed(&self) -> bool {
        (0..self.vertex_count() as u32).all(|v| {
            Letter::ALL.iter().enumerate().all(|(s, l)| {
                let w = self.neighbors(v)[s];
                let back = Letter::ALL.iter().position(|x| *x == l.inverse()).unwrap();
                self.neighbors(w)[back] == v
            })
        })
    }

    /// BFS distances from `source`. A vertex left unreached means the group
    /// law is broken, since `a` and `t` generate.
    pub fn bfs_distances(&self, source: u32) -> Result<Vec<u32>> {
        let count = self.vertex_count();
        if source as usize >= count {
            return Err(Error::domain(format!("source {source} out of range 0..{count}")));
        }
        let mut dist = alloc::vec![UNREACHED; count];
        let mut queue = Vec::with_capacity(count);
        dist[source as usize] = 0;
        queue.push(source);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            let d = dist[v as usize] + 1;
            for &w in self.neighbors(v) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = d;
                    queue.push(w);
                }
            }
        }
        if queue.len() != count {
            return Err(Error::invariant(format!(
                "Cayley graph of {} is disconnected: reached {} of {count} vertices",
                self.group.label(),
                queue.len()
            )));
        }
        Ok(dist)
    }

    pub fn eccentricity(&self, v: u32) -> Result<u32> {
        Ok(self.bfs_distances(v)?.into_iter().max().unwrap_or(0))
    }

    /// Exact diameter: the eccentricity of the identity, which equals that
    /// of every vertex because Cayley graphs are vertex-transitive.
    pub fn diameter(&self) -> Result<u32> {
        let d = self.eccentricity(0)?;
        if cfg!(debug_assertions) && self.vertex_count() > 1 {
            let probe = (0x9E37_79B9_7F4A_7C15u64 % self.vertex_count() as u64) as u32;
            debug_assert_eq!(self.eccentricity(probe)?, d, "vertex-transitivity violated");
        }
        Ok(d)
    }

    /// Writes a DOT digraph. Nodes in index order labelled `"x,k"`, then
    /// edges by source index and generator order `a, A, t, T`.
    pub fn export_dot<W: fmt::Write>(&self, sink: &mut W) -> fmt::Result {
        writeln!(sink, "digraph \"Cay({})\" {{", self.group.label())?;
        for v in 0..self.vertex_count() as u32 {
            let (x, k) = self.coords(v);
            writeln!(sink, "  {v} [label=\"{x},{k}\"];")?;
        }
        for v in 0..self.vertex_count() as u32 {
            for (s, w) in self.neighbors(v).iter().enumerate() {
                writeln!(sink, "  {v} -> {w} [label=\"{}\"];", Letter::ALL[s].as_char())?;
            }
        }
        writeln!(sink, "}}")
    }
}
