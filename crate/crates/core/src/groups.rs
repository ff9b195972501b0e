//! Concrete vertex groups: finite cyclic groups, the integers, and finite
//! groups given by a multiplication table.
//!
//! Elements are stored as `i64`: a residue in `[0, n)` for `C<n>`, the integer
//! itself for `Z`, and a row index for tables. The identity is always `0`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Element = i64;

pub const IDENTITY: Element = 0;

/// Multiplication table of a finite group. Row is the left factor; index 0
/// must be the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct CayleyTable {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    source: Option<String>,
}

impl fmt::Debug for CayleyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CayleyTable")
            .field("order", &self.order)
            .field("source", &self.source)
            .finish()
    }
}

impl CayleyTable {
    /// Validates the group axioms: closure, identity at index 0,
    /// associativity (exhaustively) and two-sided inverses.
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::BadTable("empty table".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadTable(format!("table is not {n}x{n}")));
        }
        if rows.iter().flatten().any(|&x| x >= n) {
            return Err(Error::BadTable("entry out of range".into()));
        }
        let mul: Vec<u32> = rows.iter().flatten().map(|&x| x as u32).collect();
        let at = |a: usize, b: usize| mul[a * n + b] as usize;
        for a in 0..n {
            if at(0, a) != a || at(a, 0) != a {
                return Err(Error::BadTable("index 0 is not the identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::BadTable(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            match (0..n).find(|&b| at(a, b) == 0 && at(b, a) == 0) {
                Some(b) => inv[a] = b as u32,
                None => return Err(Error::BadTable(format!("element {a} has no inverse"))),
            }
        }
        Ok(CayleyTable {
            order: n,
            mul,
            inv,
            source: None,
        })
    }

    /// Parses whitespace-separated rows of indices.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::BadTable(format!("not an index: {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CayleyTable::new(rows)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }
}

/// A vertex group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDescriptor {
    /// Cyclic group of order `n >= 2`.
    Cyclic(u32),
    /// The infinite cyclic group.
    Integers,
    Table(Arc<CayleyTable>),
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Cyclic(n) => write!(f, "C{n}"),
            GroupDescriptor::Integers => write!(f, "Z"),
            GroupDescriptor::Table(t) => write!(f, "table:{}", t.source().unwrap_or("<inline>")),
        }
    }
}

impl GroupDescriptor {
    pub fn cyclic(n: u32) -> Result<Self> {
        match n {
            0 => Err(Error::BadTable("C0 is not a group".into())),
            1 => Err(Error::TrivialGroup),
            _ => Ok(GroupDescriptor::Cyclic(n)),
        }
    }

    pub fn table(table: CayleyTable) -> Result<Self> {
        if table.order() < 2 {
            return Err(Error::TrivialGroup);
        }
        Ok(GroupDescriptor::Table(Arc::new(table)))
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupDescriptor::Cyclic(n) => Some(*n as u64),
            GroupDescriptor::Integers => None,
            GroupDescriptor::Table(t) => Some(t.order() as u64),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// Every built-in kind is a hyperbolic group.
    pub fn is_hyperbolic(&self) -> bool {
        true
    }

    pub fn is_valid(&self, a: Element) -> bool {
        match self.order() {
            Some(n) => (0..n as i64).contains(&a),
            None => true,
        }
    }

    pub fn validate(&self, a: Element) -> Result<Element> {
        if self.is_valid(a) {
            Ok(a)
        } else {
            Err(Error::InvalidElement {
                value: a,
                group: self.to_string(),
            })
        }
    }

    /// Interprets a user-supplied integer as an element: residues are reduced
    /// for cyclic groups, table indices must be in range.
    pub fn element_from_int(&self, k: i64) -> Result<Element> {
        match self {
            GroupDescriptor::Cyclic(n) => Ok(k.rem_euclid(*n as i64)),
            GroupDescriptor::Integers => Ok(k),
            GroupDescriptor::Table(_) => self.validate(k),
        }
    }

    pub fn multiply(&self, a: Element, b: Element) -> Result<Element> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.mul(a, b))
    }

    pub fn inverse(&self, a: Element) -> Result<Element> {
        self.validate(a)?;
        Ok(self.inv(a))
    }

    /// Product of two valid elements.
    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        match self {
            GroupDescriptor::Cyclic(n) => (a + b).rem_euclid(*n as i64),
            GroupDescriptor::Integers => a + b,
            GroupDescriptor::Table(t) => t.mul(a as usize, b as usize) as Element,
        }
    }

    /// Inverse of a valid element.
    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        match self {
            GroupDescriptor::Cyclic(n) => (-a).rem_euclid(*n as i64),
            GroupDescriptor::Integers => -a,
            GroupDescriptor::Table(t) => t.inv[a as usize] as Element,
        }
    }

    /// Non-identity elements: all of them for finite groups, and
    /// `-bound..=bound` without zero for the integers.
    pub fn enumerate(&self, bound: u64) -> Vec<Element> {
        match self.order() {
            Some(n) => (1..n as i64).collect(),
            None => {
                let b = bound as i64;
                (-b..=b).filter(|&k| k != 0).collect()
            }
        }
    }

    /// True iff `a` lies in the window enumerated with `bound`.
    pub fn within_bound(&self, a: Element, bound: u64) -> bool {
        self.is_finite() || a.unsigned_abs() <= bound
    }

    /// Smallest non-identity element in the canonical order.
    pub fn canonical_nontrivial(&self) -> Element {
        1
    }

    /// The generator `1` for cyclic kinds and the integers; every non-identity
    /// element for tables.
    pub fn default_generators(&self) -> Vec<Element> {
        match self {
            GroupDescriptor::Cyclic(_) | GroupDescriptor::Integers => vec![1],
            GroupDescriptor::Table(t) => (1..t.order() as i64).collect(),
        }
    }

    /// Word-length function with respect to the symmetric closure of `gens`.
    pub fn word_metric(&self, gens: &[Element]) -> Result<WordMetric> {
        for &g in gens {
            self.validate(g)?;
        }
        let mut steps: Vec<Element> = gens.iter().flat_map(|&g| [g, self.inv(g)]).filter(|&g| g != IDENTITY).collect();
        steps.sort_unstable();
        steps.dedup();
        match self.order() {
            Some(n) => {
                let n = n as usize;
                let mut dist = vec![u32::MAX; n];
                dist[0] = 0;
                let mut queue = VecDeque::from([IDENTITY]);
                while let Some(x) = queue.pop_front() {
                    for &s in &steps {
                        let y = self.mul(x, s) as usize;
                        if dist[y] == u32::MAX {
                            dist[y] = dist[x as usize] + 1;
                            queue.push_back(y as Element);
                        }
                    }
                }
                if dist.contains(&u32::MAX) {
                    return Err(Error::NotGenerating {
                        vertex: String::new(),
                        gens: gens.to_vec(),
                    });
                }
                Ok(WordMetric::Finite(dist))
            }
            None => {
                let g = steps.iter().fold(0i64, |acc, &s| gcd(acc, s.abs()));
                if g != 1 {
                    return Err(Error::NotGenerating {
                        vertex: String::new(),
                        gens: gens.to_vec(),
                    });
                }
                Ok(WordMetric::Integers(steps.into_iter().filter(|&s| s > 0).collect()))
            }
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Word lengths in a vertex group for a fixed generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordMetric {
    /// Exact lengths for every element.
    Finite(Vec<u32>),
    /// Positive step sizes of a symmetric generating set of the integers.
    Integers(Vec<i64>),
}

impl WordMetric {
    pub fn length(&self, a: Element) -> u64 {
        match self {
            WordMetric::Finite(d) => d[a as usize] as u64,
            WordMetric::Integers(steps) => integer_word_length(steps, a),
        }
    }
}

/// Shortest word for `target` using steps `±s`. Some optimal word keeps every
/// partial sum within `max_step` of the segment `[min(0,t), max(0,t)]`, so a
/// breadth-first search over that window is exact.
fn integer_word_length(steps: &[i64], target: i64) -> u64 {
    if target == 0 {
        return 0;
    }
    let m = *steps.iter().max().expect("nonempty generating set");
    if steps.len() == 1 && m == 1 {
        return target.unsigned_abs();
    }
    let lo = target.min(0) - m;
    let hi = target.max(0) + m;
    let width = (hi - lo + 1) as usize;
    let mut dist = vec![u64::MAX; width];
    dist[(0 - lo) as usize] = 0;
    let mut queue = VecDeque::from([0i64]);
    while let Some(x) = queue.pop_front() {
        let d = dist[(x - lo) as usize];
        if x == target {
            return d;
        }
        for &s in steps {
            for y in [x + s, x - s] {
                if (lo..=hi).contains(&y) && dist[(y - lo) as usize] == u64::MAX {
                    dist[(y - lo) as usize] = d + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    unreachable!("generating set spans the integers")
}
