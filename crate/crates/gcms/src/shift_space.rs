//! Transition matrices over the alphabet ℕ and word combinatorics.
//!
//! Built-in kinds are closed-form rules; nothing infinite is ever stored.
//! Convention: `A(i, j) = 1` means `j` may follow `i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GcmsError, Result};

pub type Symbol = u64;

/// A finite word over ℕ, possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.contains(&0) {
            return Err(GcmsError::ZeroSymbol);
        }
        Ok(Word(symbols))
    }

    /// Panics on a zero symbol. Meant for literals in tests and examples.
    pub fn from_slice(symbols: &[Symbol]) -> Self {
        Word::new(symbols.to_vec()).expect("symbols are positive")
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    pub fn get(&self, i: usize) -> Option<Symbol> {
        self.0.get(i).copied()
    }

    /// The prefix of length `n` (the whole word when `n ≥ len`).
    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n.min(self.0.len())..].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_strict_prefix_of(&self, other: &Word) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    pub fn pushed(&self, s: Symbol) -> Word {
        let mut v = self.0.clone();
        v.push(s);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Drops the last symbol.
    pub fn popped(&self) -> Word {
        let mut v = self.0.clone();
        v.pop();
        Word(v)
    }

    /// Longest common prefix.
    pub fn common_prefix(&self, other: &Word) -> Word {
        let n = self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count();
        self.prefix(n)
    }

    pub fn into_vec(self) -> Vec<Symbol> {
        self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for Word {
    type Err = GcmsError;

    /// Dot-separated symbols; `""` and `"e"` are the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Word::empty());
        }
        let symbols = s
            .split('.')
            .map(|t| {
                t.trim()
                    .parse::<Symbol>()
                    .map_err(|_| GcmsError::Parse(format!("bad symbol {t:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(symbols)
    }
}

/// The shape of a matrix row, used to decide whether a family of cylinders
/// is finite, cofinite or neither.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowShape {
    Finite(Vec<Symbol>),
    /// Every symbol except the listed ones.
    Cofinite(Vec<Symbol>),
    /// Infinite and co-infinite.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixKind {
    Renewal,
    PairRenewal,
    PrimeRenewal { prime_bound: Symbol },
    AlternatingRenewal,
    FullShift { size: Symbol },
    Explicit { size: Symbol, rows: Vec<Vec<u8>> },
}

/// A column accumulation point of the matrix: the root of an empty-stem configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AccumulationColumn {
    pub id: u64,
    pub support: BTreeSet<Symbol>,
    /// Non-empty stems under this root must end in one of these.
    pub terminal: BTreeSet<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    kind: MatrixKind,
    catalog: Vec<AccumulationColumn>,
}

/// Enumeration output with its completeness flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub complete: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Confirmed,
    Inconclusive,
}

pub fn is_prime(n: Symbol) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some(p)` when `n = p^m` for a prime `p` and `m ≥ 1`.
pub fn prime_power_base(n: Symbol) -> Option<Symbol> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut r = n;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return (r == 1).then_some(p);
        }
        p += 1;
    }
    Some(n)
}

fn column(id: u64, support: &[Symbol], terminal: &[Symbol]) -> AccumulationColumn {
    AccumulationColumn {
        id,
        support: support.iter().copied().collect(),
        terminal: terminal.iter().copied().collect(),
    }
}

impl TransitionMatrix {
    pub fn new(kind: MatrixKind) -> Result<Self> {
        let catalog = match &kind {
            MatrixKind::Renewal => vec![column(1, &[1], &[1])],
            MatrixKind::PairRenewal => vec![column(1, &[1, 2], &[1, 2]), column(2, &[1], &[1])],
            MatrixKind::PrimeRenewal { prime_bound } => {
                let mut c = vec![column(1, &[1], &[1])];
                for p in (2..=*prime_bound).filter(|&p| is_prime(p)) {
                    c.push(column(p, &[1, p], &[1, p]));
                }
                c
            }
            MatrixKind::AlternatingRenewal => vec![column(1, &[1], &[1]), column(2, &[2], &[2])],
            MatrixKind::FullShift { size } => {
                if *size == 0 {
                    return Err(GcmsError::InvalidMatrix("full shift needs size ≥ 1".into()));
                }
                Vec::new()
            }
            MatrixKind::Explicit { size, rows } => {
                validate_explicit(*size, rows)?;
                Vec::new()
            }
        };
        Ok(TransitionMatrix { kind, catalog })
    }

    pub fn renewal() -> Self {
        Self::new(MatrixKind::Renewal).unwrap()
    }

    pub fn pair_renewal() -> Self {
        Self::new(MatrixKind::PairRenewal).unwrap()
    }

    pub fn prime_renewal(prime_bound: Symbol) -> Self {
        Self::new(MatrixKind::PrimeRenewal { prime_bound }).unwrap()
    }

    pub fn alternating_renewal() -> Self {
        Self::new(MatrixKind::AlternatingRenewal).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let kind: MatrixKind =
            serde_json::from_str(text).map_err(|e| GcmsError::Parse(e.to_string()))?;
        Self::new(kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.kind).expect("matrix kind serializes")
    }

    pub fn kind(&self) -> &MatrixKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MatrixKind::Renewal => "renewal",
            MatrixKind::PairRenewal => "pair_renewal",
            MatrixKind::PrimeRenewal { .. } => "prime_renewal",
            MatrixKind::AlternatingRenewal => "alternating_renewal",
            MatrixKind::FullShift { .. } => "full_shift",
            MatrixKind::Explicit { .. } => "explicit",
        }
    }

    pub fn catalog(&self) -> &[AccumulationColumn] {
        &self.catalog
    }

    pub fn column(&self, id: u64) -> Option<&AccumulationColumn> {
        self.catalog.iter().find(|c| c.id == id)
    }

    pub fn column_by_support(&self, support: &BTreeSet<Symbol>) -> Option<&AccumulationColumn> {
        self.catalog.iter().find(|c| &c.support == support)
    }

    /// Alphabet size for the finite kinds.
    pub fn size(&self) -> Option<Symbol> {
        match &self.kind {
            MatrixKind::FullShift { size } | MatrixKind::Explicit { size, .. } => Some(*size),
            _ => None,
        }
    }

    /// Exact entry; errors only for indices outside a finite matrix.
    pub fn entry(&self, i: Symbol, j: Symbol) -> Result<u8> {
        if i == 0 || j == 0 {
            return Err(GcmsError::ZeroSymbol);
        }
        if let Some(n) = self.size() {
            if i > n || j > n {
                return Err(GcmsError::OutOfRange(i, j));
            }
        }
        Ok(self.allows(i, j) as u8)
    }

    /// `A(i, j) = 1`, with indices outside a finite matrix reading as 0.
    pub fn allows(&self, i: Symbol, j: Symbol) -> bool {
        if i == 0 || j == 0 {
            return false;
        }
        match &self.kind {
            MatrixKind::Renewal => i == 1 || i == j + 1,
            MatrixKind::PairRenewal => i == 1 || i == j + 1 || (i == 2 && j.is_multiple_of(2)),
            MatrixKind::PrimeRenewal { .. } => {
                i == 1 || i == j + 1 || (is_prime(i) && prime_power_base(j) == Some(i))
            }
            MatrixKind::AlternatingRenewal => {
                i == j + 1 || (i == 1 && j.is_multiple_of(2)) || (i == 2 && j % 2 == 1)
            }
            MatrixKind::FullShift { size } => i <= *size && j <= *size,
            MatrixKind::Explicit { size, rows } => {
                i <= *size && j <= *size && rows[(i - 1) as usize][(j - 1) as usize] == 1
            }
        }
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        w.symbols().windows(2).all(|p| self.allows(p[0], p[1]))
            && self.size().is_none_or(|n| w.symbols().iter().all(|&s| s <= n))
    }

    pub fn row_shape(&self, i: Symbol) -> RowShape {
        match &self.kind {
            MatrixKind::Renewal => {
                if i == 1 {
                    RowShape::Cofinite(vec![])
                } else {
                    RowShape::Finite(vec![i - 1])
                }
            }
            MatrixKind::PairRenewal => match i {
                1 => RowShape::Cofinite(vec![]),
                2 => RowShape::Infinite,
                _ => RowShape::Finite(vec![i - 1]),
            },
            MatrixKind::PrimeRenewal { .. } => {
                if i == 1 {
                    RowShape::Cofinite(vec![])
                } else if is_prime(i) {
                    RowShape::Infinite
                } else {
                    RowShape::Finite(vec![i - 1])
                }
            }
            MatrixKind::AlternatingRenewal => {
                if i <= 2 {
                    RowShape::Infinite
                } else {
                    RowShape::Finite(vec![i - 1])
                }
            }
            MatrixKind::FullShift { size } | MatrixKind::Explicit { size, .. } => {
                RowShape::Finite((1..=*size).filter(|&j| self.allows(i, j)).collect())
            }
        }
    }

    /// `{ j ≤ bound : A(i, j) = 1 }`.
    pub fn emitters(&self, i: Symbol, bound: Symbol) -> BTreeSet<Symbol> {
        match self.row_shape(i) {
            RowShape::Finite(v) => v.into_iter().filter(|&j| j <= bound).collect(),
            _ => (1..=bound).filter(|&j| self.allows(i, j)).collect(),
        }
    }

    pub fn is_infinite_emitter(&self, i: Symbol) -> bool {
        !matches!(self.row_shape(i), RowShape::Finite(_))
    }

    /// The support of column `j`. Finite for every supported kind.
    pub fn predecessors(&self, j: Symbol) -> Vec<Symbol> {
        if j == 0 {
            return vec![];
        }
        let mut out: BTreeSet<Symbol> = BTreeSet::new();
        match &self.kind {
            MatrixKind::Renewal => {
                out.extend([1, j + 1]);
            }
            MatrixKind::PairRenewal => {
                out.extend([1, j + 1]);
                if j.is_multiple_of(2) {
                    out.insert(2);
                }
            }
            MatrixKind::PrimeRenewal { .. } => {
                out.extend([1, j + 1]);
                if let Some(p) = prime_power_base(j) {
                    out.insert(p);
                }
            }
            MatrixKind::AlternatingRenewal => {
                out.insert(j + 1);
                out.insert(if j.is_multiple_of(2) { 1 } else { 2 });
            }
            MatrixKind::FullShift { size } | MatrixKind::Explicit { size, .. } => {
                out.extend((1..=*size).filter(|&i| self.allows(i, j)));
            }
        }
        out.into_iter().collect()
    }

    /// Backward reachability layers: `layers[r]` holds the symbols from which a
    /// symbol of `last_in` is reached in exactly `r` steps, capped at `bound`.
    /// The flag is false when the cap removed something.
    fn layers(&self, n: usize, last_in: &BTreeSet<Symbol>, bound: Symbol) -> (Vec<BTreeSet<Symbol>>, bool) {
        let mut complete = true;
        let mut cur: BTreeSet<Symbol> = BTreeSet::new();
        for &s in last_in {
            if s <= bound {
                cur.insert(s);
            } else {
                complete = false;
            }
        }
        let mut layers = vec![cur];
        for _ in 1..n {
            let mut next = BTreeSet::new();
            for &t in layers.last().unwrap() {
                for p in self.predecessors(t) {
                    if p <= bound {
                        next.insert(p);
                    } else {
                        complete = false;
                    }
                }
            }
            layers.push(next);
        }
        (layers, complete)
    }

    fn dfs_words(
        &self,
        layers: &[BTreeSet<Symbol>],
        first: Option<Symbol>,
        prefix: &mut Vec<Symbol>,
        out: &mut Vec<Word>,
    ) {
        let n = layers.len();
        let i = prefix.len();
        if i == n {
            out.push(Word(prefix.clone()));
            return;
        }
        let layer = &layers[n - 1 - i];
        let candidates: Vec<Symbol> = match (i, first) {
            (0, Some(f)) => layer.contains(&f).then_some(f).into_iter().collect(),
            (0, None) => layer.iter().copied().collect(),
            _ => {
                let prev = prefix[i - 1];
                layer.iter().copied().filter(|&s| self.allows(prev, s)).collect()
            }
        };
        for s in candidates {
            prefix.push(s);
            self.dfs_words(layers, first, prefix, out);
            prefix.pop();
        }
    }

    /// Admissible words of length `n` over symbols `≤ bound` ending in `last_in`,
    /// in lexicographic order. `n = 0` gives `{e}`.
    pub fn enumerate_words(&self, n: usize, last_in: &BTreeSet<Symbol>, bound: Symbol) -> Enumeration<Word> {
        if n == 0 {
            return Enumeration { items: vec![Word::empty()], complete: true };
        }
        let (layers, complete) = self.layers(n, last_in, bound);
        let mut items = Vec::new();
        self.dfs_words(&layers, None, &mut Vec::with_capacity(n), &mut items);
        Enumeration { items, complete }
    }

    /// Admissible words `w` of length `n` with `w_0 = through` and `A(w_{n−1}, through) = 1`.
    pub fn enumerate_cycles(&self, n: usize, through: Symbol, bound: Symbol) -> Enumeration<Word> {
        assert!(n >= 1, "cycles have length at least 1");
        let last_in: BTreeSet<Symbol> = self.predecessors(through).into_iter().collect();
        let (layers, complete) = self.layers(n, &last_in, bound);
        let mut items = Vec::new();
        self.dfs_words(&layers, Some(through), &mut Vec::with_capacity(n), &mut items);
        Enumeration { items, complete: complete && through <= bound }
    }

    /// Exact number of admissible words of length `n` ending in `last_in`.
    /// No symbol bound is needed since every column is finite.
    pub fn count_words(&self, n: usize, last_in: &BTreeSet<Symbol>) -> u128 {
        if n == 0 {
            return 1;
        }
        let mut cur: BTreeMap<Symbol, u128> = last_in.iter().map(|&s| (s, 1)).collect();
        for _ in 1..n {
            let mut next: BTreeMap<Symbol, u128> = BTreeMap::new();
            for (&t, &c) in &cur {
                for p in self.predecessors(t) {
                    *next.entry(p).or_default() += c;
                }
            }
            cur = next;
        }
        cur.values().sum()
    }

    /// Some `w` with `i w j` admissible is found for every pair `≤ bound`.
    pub fn check_transitive(&self, bound: Symbol, path_len: usize) -> Verdict {
        match self.kind {
            MatrixKind::Renewal
            | MatrixKind::PairRenewal
            | MatrixKind::PrimeRenewal { .. }
            | MatrixKind::AlternatingRenewal => return Verdict::Confirmed,
            _ => {}
        }
        let top = self.size().map_or(bound, |n| n.min(bound));
        for i in 1..=top {
            // symbols reachable from i in 1..=path_len+1 steps, searched inside the finite matrix
            let mut seen: BTreeSet<Symbol> = BTreeSet::new();
            let mut frontier: BTreeSet<Symbol> = [i].into_iter().collect();
            for _ in 0..=path_len {
                let mut next = BTreeSet::new();
                for &s in &frontier {
                    for t in self.emitters(s, self.size().unwrap_or(bound)) {
                        if seen.insert(t) {
                            next.insert(t);
                        }
                    }
                }
                frontier = next;
            }
            if (1..=top).any(|j| !seen.contains(&j)) {
                return Verdict::Inconclusive;
            }
        }
        Verdict::Confirmed
    }
}

fn validate_explicit(size: Symbol, rows: &[Vec<u8>]) -> Result<()> {
    let n = size as usize;
    if n == 0 || rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(GcmsError::InvalidMatrix(format!("expected {n}×{n} rows")));
    }
    if rows.iter().flatten().any(|&b| b > 1) {
        return Err(GcmsError::InvalidMatrix("entries must be 0 or 1".into()));
    }
    if let Some(i) = rows.iter().position(|r| r.iter().all(|&b| b == 0)) {
        return Err(GcmsError::InvalidMatrix(format!("row {} is zero", i + 1)));
    }
    if let Some(j) = (0..n).find(|&j| rows.iter().all(|r| r[j] == 0)) {
        return Err(GcmsError::InvalidMatrix(format!("column {} is zero", j + 1)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn set(v: &[Symbol]) -> BTreeSet<Symbol> {
        v.iter().copied().collect()
    }

    #[test]
    fn entries_follow_the_rules() {
        let r = TransitionMatrix::renewal();
        assert_eq!(r.entry(1, 7).unwrap(), 1);
        assert_eq!(r.entry(3, 5).unwrap(), 0);
        assert_eq!(r.entry(4, 3).unwrap(), 1);
        let p = TransitionMatrix::prime_renewal(7);
        assert_eq!(p.entry(3, 9).unwrap(), 1);
        assert_eq!(p.entry(3, 3).unwrap(), 1);
        assert_eq!(p.entry(4, 16).unwrap(), 0);
        assert_eq!(p.entry(2, 6).unwrap(), 0);
        let a = TransitionMatrix::alternating_renewal();
        assert!(a.allows(1, 4) && a.allows(2, 5) && a.allows(2, 1) && !a.allows(1, 3));
    }

    #[test]
    fn admissibility() {
        let r = TransitionMatrix::renewal();
        assert!(r.is_admissible(&w("3.2.1")));
        assert!(r.is_admissible(&w("1.3")));
        assert!(!r.is_admissible(&w("2.3")));
        assert!(r.is_admissible(&Word::empty()));
    }

    #[test]
    fn emitter_rows() {
        let r = TransitionMatrix::renewal();
        assert_eq!(r.emitters(1, 4), set(&[1, 2, 3, 4]));
        assert_eq!(r.emitters(4, 10), set(&[3]));
        let p = TransitionMatrix::pair_renewal();
        assert_eq!(p.emitters(2, 7), set(&[1, 2, 4, 6]));
        assert!(r.is_infinite_emitter(1) && !r.is_infinite_emitter(2));
        assert!(p.is_infinite_emitter(2));
    }

    #[test]
    fn predecessors_match_columns() {
        for m in [
            TransitionMatrix::renewal(),
            TransitionMatrix::pair_renewal(),
            TransitionMatrix::prime_renewal(7),
            TransitionMatrix::alternating_renewal(),
        ] {
            for j in 1..=40 {
                let brute: Vec<Symbol> = (1..=200).filter(|&i| m.allows(i, j)).collect();
                assert_eq!(m.predecessors(j), brute, "{} column {j}", m.name());
            }
        }
    }

    #[test]
    fn row_shapes_agree_with_entries() {
        for m in [
            TransitionMatrix::renewal(),
            TransitionMatrix::pair_renewal(),
            TransitionMatrix::prime_renewal(7),
            TransitionMatrix::alternating_renewal(),
        ] {
            for i in 1..=12 {
                match m.row_shape(i) {
                    RowShape::Finite(v) => {
                        let brute: Vec<Symbol> = (1..=300).filter(|&j| m.allows(i, j)).collect();
                        assert_eq!(v, brute);
                    }
                    RowShape::Cofinite(ex) => {
                        for j in 1..=300 {
                            assert_eq!(m.allows(i, j), !ex.contains(&j));
                        }
                    }
                    RowShape::Infinite => {
                        assert!((200..=20_000).any(|j| m.allows(i, j)));
                        assert!((200..=20_000).any(|j| !m.allows(i, j)));
                    }
                }
            }
        }
    }

    #[test]
    fn small_enumerations() {
        let r = TransitionMatrix::renewal();
        let e = r.enumerate_words(2, &set(&[1]), 10);
        assert_eq!(e.items, vec![w("1.1"), w("2.1")]);
        assert_eq!(r.enumerate_words(3, &set(&[1]), 10).items.len(), 4);
        assert_eq!(r.enumerate_words(0, &BTreeSet::new(), 1).items, vec![Word::empty()]);
        assert_eq!(r.enumerate_cycles(3, 1, 3).items.len(), 4);
        assert_eq!(r.enumerate_cycles(1, 1, 1).items, vec![w("1")]);
        let p = TransitionMatrix::pair_renewal();
        assert_eq!(p.enumerate_cycles(2, 2, 4).items, vec![w("2.1"), w("2.2")]);
    }

    #[test]
    fn truncation_is_flagged() {
        let r = TransitionMatrix::renewal();
        assert!(r.enumerate_words(5, &set(&[1]), 5).complete);
        assert!(!r.enumerate_words(5, &set(&[1]), 3).complete);
    }

    #[test]
    fn counts_match_enumeration() {
        let p = TransitionMatrix::prime_renewal(5);
        for n in 0..8 {
            let last = set(&[1, 3]);
            let e = p.enumerate_words(n, &last, 64);
            assert!(e.complete);
            assert_eq!(e.items.len() as u128, p.count_words(n, &last));
        }
    }

    #[test]
    fn transitivity() {
        assert_eq!(TransitionMatrix::renewal().check_transitive(5, 5), Verdict::Confirmed);
        let perm = TransitionMatrix::new(MatrixKind::Explicit { size: 2, rows: vec![vec![1, 0], vec![0, 1]] }).unwrap();
        assert_eq!(perm.check_transitive(2, 4), Verdict::Inconclusive);
        let full = TransitionMatrix::new(MatrixKind::FullShift { size: 3 }).unwrap();
        assert_eq!(full.check_transitive(3, 2), Verdict::Confirmed);
    }

    #[test]
    fn explicit_validation_and_round_trip() {
        assert!(TransitionMatrix::from_json(r#"{"kind":"explicit","size":2,"rows":[[0,0],[1,1]]}"#).is_err());
        let m = TransitionMatrix::from_json(r#"{"kind":"explicit","size":2,"rows":[[0,1],[1,1]]}"#).unwrap();
        assert_eq!(TransitionMatrix::from_json(&m.to_json()).unwrap(), m);
        assert!(m.entry(3, 1).is_err());
        assert!(m.catalog().is_empty());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_base(9), Some(3));
        assert_eq!(prime_power_base(12), None);
        assert_eq!(prime_power_base(2), Some(2));
        assert_eq!(prime_power_base(1), None);
    }
}
