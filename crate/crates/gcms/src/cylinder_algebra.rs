//! Generalized cylinders, their complements and finite intersections, in the
//! normal form "finite Y_A point set ⊔ cylinders ⊔ symbolic cylinder families".

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::config_space::{BoundedConfig, Configuration, GroupWord, UnboundedConfig};
use crate::error::{GcmsError, Result};
use crate::shift_space::{RowShape, Symbol, TransitionMatrix, Word};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SubbasisElem {
    /// `C_α`
    Cyl(Word),
    /// `C_α^c`
    CylC(Word),
    /// `C_{αj^{-1}}`
    InvCyl(Word, Symbol),
    /// `C_{αj^{-1}}^c`
    InvCylC(Word, Symbol),
}

impl SubbasisElem {
    /// Validates against the matrix and rewrites `C_{αj^{-1}}` with `j = last(α)` as `C_{δ(α)}`.
    pub fn normalized(self, m: &TransitionMatrix) -> Result<Self> {
        let alpha = self.word();
        if !m.is_admissible(alpha) {
            return Err(GcmsError::NotAdmissible(alpha.to_string()));
        }
        if let Some(n) = m.size() {
            if let SubbasisElem::InvCyl(_, j) | SubbasisElem::InvCylC(_, j) = &self {
                if *j > n {
                    return Err(GcmsError::OutOfRange(*j, *j));
                }
            }
        }
        Ok(match self {
            SubbasisElem::InvCyl(a, j) if a.last() == Some(j) => SubbasisElem::Cyl(a.popped()),
            SubbasisElem::InvCylC(a, j) if a.last() == Some(j) => SubbasisElem::CylC(a.popped()),
            other => other,
        })
    }

    pub fn word(&self) -> &Word {
        match self {
            SubbasisElem::Cyl(a) | SubbasisElem::CylC(a) | SubbasisElem::InvCyl(a, _) | SubbasisElem::InvCylC(a, _) => a,
        }
    }

    /// The group word `g` with this element equal to `C_g` or `C_g^c`.
    pub fn group_word(&self) -> GroupWord {
        match self {
            SubbasisElem::Cyl(a) | SubbasisElem::CylC(a) => GroupWord::positive(a.clone()),
            SubbasisElem::InvCyl(a, j) | SubbasisElem::InvCylC(a, j) => GroupWord::inverse_letter(a.clone(), *j),
        }
    }

    pub fn is_complement(&self) -> bool {
        matches!(self, SubbasisElem::CylC(_) | SubbasisElem::InvCylC(..))
    }

    /// Membership through evaluation: `ξ ∈ C_g ⇔ ξ_g = 1`.
    pub fn contains(&self, m: &TransitionMatrix, c: &Configuration) -> bool {
        c.eval(m, &self.group_word()) != self.is_complement()
    }

    fn rank(&self) -> u8 {
        match self {
            SubbasisElem::Cyl(_) => 0,
            SubbasisElem::CylC(_) => 1,
            SubbasisElem::InvCyl(..) => 2,
            SubbasisElem::InvCylC(..) => 3,
        }
    }
}

impl fmt::Display for SubbasisElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = |a: &Word| if a.is_empty() { String::new() } else { a.to_string() };
        match self {
            SubbasisElem::Cyl(a) => write!(f, "C[{}]", body(a)),
            SubbasisElem::CylC(a) => write!(f, "!C[{}]", body(a)),
            SubbasisElem::InvCyl(a, j) => write!(f, "C[{};inv={j}]", body(a)),
            SubbasisElem::InvCylC(a, j) => write!(f, "!C[{};inv={j}]", body(a)),
        }
    }
}

/// A condition on the symbol `k` that follows a family prefix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum IndexPred {
    Exactly(BTreeSet<Symbol>),
    /// `A(j,k) = 1` for `j ∈ ones`, `A(j,k) = 0` for `j ∈ zeros`, and `k ∉ except`.
    Rows { ones: BTreeSet<Symbol>, zeros: BTreeSet<Symbol>, except: BTreeSet<Symbol> },
}

impl IndexPred {
    pub fn all_except(m: impl IntoIterator<Item = Symbol>) -> Self {
        IndexPred::Rows { ones: BTreeSet::new(), zeros: BTreeSet::new(), except: m.into_iter().collect() }
    }

    pub fn row_one(j: Symbol) -> Self {
        IndexPred::Rows { ones: [j].into(), zeros: BTreeSet::new(), except: BTreeSet::new() }
    }

    pub fn row_zero(j: Symbol) -> Self {
        IndexPred::Rows { ones: BTreeSet::new(), zeros: [j].into(), except: BTreeSet::new() }
    }

    pub fn row_one_except(j: Symbol, m: impl IntoIterator<Item = Symbol>) -> Self {
        IndexPred::Rows { ones: [j].into(), zeros: BTreeSet::new(), except: m.into_iter().collect() }
    }

    pub fn row_zero_except(j: Symbol, m: impl IntoIterator<Item = Symbol>) -> Self {
        IndexPred::Rows { ones: BTreeSet::new(), zeros: [j].into(), except: m.into_iter().collect() }
    }

    pub fn exactly(s: impl IntoIterator<Item = Symbol>) -> Self {
        IndexPred::Exactly(s.into_iter().collect())
    }

    pub fn holds(&self, m: &TransitionMatrix, k: Symbol) -> bool {
        match self {
            IndexPred::Exactly(s) => s.contains(&k),
            IndexPred::Rows { ones, zeros, except } => {
                !except.contains(&k) && ones.iter().all(|&j| m.allows(j, k)) && zeros.iter().all(|&j| !m.allows(j, k))
            }
        }
    }

    pub fn and(&self, m: &TransitionMatrix, other: &IndexPred) -> IndexPred {
        match (self, other) {
            (IndexPred::Exactly(s), p) | (p, IndexPred::Exactly(s)) => {
                IndexPred::Exactly(s.iter().copied().filter(|&k| p.holds(m, k)).collect())
            }
            (
                IndexPred::Rows { ones: o1, zeros: z1, except: e1 },
                IndexPred::Rows { ones: o2, zeros: z2, except: e2 },
            ) => IndexPred::Rows {
                ones: o1.union(o2).copied().collect(),
                zeros: z1.union(z2).copied().collect(),
                except: e1.union(e2).copied().collect(),
            },
        }
    }
}

impl fmt::Display for IndexPred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<Symbol>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            IndexPred::Exactly(s) => write!(f, "k∈{{{}}}", list(s)),
            IndexPred::Rows { ones, zeros, except } => {
                let mut parts = Vec::new();
                for j in ones {
                    parts.push(format!("A({j},k)=1"));
                }
                for j in zeros {
                    parts.push(format!("A({j},k)=0"));
                }
                if !except.is_empty() {
                    parts.push(format!("k∉{{{}}}", list(except)));
                }
                if parts.is_empty() {
                    write!(f, "all k")
                } else {
                    write!(f, "{}", parts.join(", "))
                }
            }
        }
    }
}

/// `⊔_{k : pred(k), αk admissible} C_{αk}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CylFamily {
    pub prefix: Word,
    pub pred: IndexPred,
}

/// Member structure of a family relative to the symbols allowed after its prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Members {
    Finite(Vec<Symbol>),
    /// Everything allowed after the prefix except the listed symbols.
    Cofinite(Vec<Symbol>),
    Infinite,
}

impl CylFamily {
    pub fn new(prefix: Word, pred: IndexPred) -> Self {
        CylFamily { prefix, pred }
    }

    /// `αk` admissible and the predicate holds.
    pub fn admits(&self, m: &TransitionMatrix, k: Symbol) -> bool {
        self.prefix.last().map_or(m.size().is_none_or(|n| k <= n), |s| m.allows(s, k)) && self.pred.holds(m, k)
    }

    fn universe(&self, m: &TransitionMatrix) -> RowShape {
        match self.prefix.last() {
            Some(s) => m.row_shape(s),
            None => match m.size() {
                Some(n) => RowShape::Finite((1..=n).collect()),
                None => RowShape::Cofinite(vec![]),
            },
        }
    }

    pub fn members(&self, m: &TransitionMatrix) -> Members {
        let (ones, zeros, except) = match &self.pred {
            IndexPred::Exactly(s) => {
                return Members::Finite(s.iter().copied().filter(|&k| self.admits(m, k)).collect());
            }
            IndexPred::Rows { ones, zeros, except } => (ones, zeros, except),
        };
        if ones.intersection(zeros).next().is_some() {
            return Members::Finite(vec![]);
        }
        let mut shapes = vec![self.universe(m)];
        shapes.extend(ones.iter().map(|&j| m.row_shape(j)));
        if let Some(RowShape::Finite(cands)) = shapes.iter().find(|s| matches!(s, RowShape::Finite(_))) {
            return Members::Finite(cands.iter().copied().filter(|&k| self.admits(m, k)).collect());
        }
        let mut excluded: BTreeSet<Symbol> = except.clone();
        for s in &shapes {
            match s {
                RowShape::Cofinite(ex) => excluded.extend(ex),
                _ => return Members::Infinite,
            }
        }
        for &j in zeros {
            match m.row_shape(j) {
                RowShape::Finite(v) => excluded.extend(v),
                _ => return Members::Infinite,
            }
        }
        // only the symbols that are allowed after the prefix count as exclusions
        let excluded = excluded
            .into_iter()
            .filter(|&k| self.prefix.last().is_none_or(|s| m.allows(s, k)))
            .collect();
        Members::Cofinite(excluded)
    }

    fn contains(&self, m: &TransitionMatrix, c: &Configuration) -> bool {
        c.has_prefix(&self.prefix) && c.symbol(self.prefix.len()).is_some_and(|k| self.pred.holds(m, k))
    }
}

impl fmt::Display for CylFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⊔[{}](C[{}·k])", self.pred, self.prefix)
    }
}

/// Normal form of a set built from the subbasis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SetExpr {
    pub points: BTreeSet<BoundedConfig>,
    pub families: Vec<CylFamily>,
    pub atoms: Vec<Word>,
    pub whole_space: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Part {
    Whole,
    Point(BoundedConfig),
    Atom(Word),
    Fam(CylFamily),
}

impl SetExpr {
    pub fn empty() -> Self {
        SetExpr::default()
    }

    pub fn whole() -> Self {
        SetExpr { whole_space: true, ..SetExpr::default() }
    }

    pub fn is_empty(&self) -> bool {
        !self.whole_space && self.points.is_empty() && self.families.is_empty() && self.atoms.is_empty()
    }

    pub fn part_count(&self) -> usize {
        self.whole_space as usize + self.points.len() + self.families.len() + self.atoms.len()
    }

    fn parts(&self) -> Vec<Part> {
        let mut out = Vec::new();
        if self.whole_space {
            out.push(Part::Whole);
        }
        out.extend(self.points.iter().cloned().map(Part::Point));
        out.extend(self.families.iter().cloned().map(Part::Fam));
        out.extend(self.atoms.iter().cloned().map(Part::Atom));
        out
    }

    fn from_parts(m: &TransitionMatrix, parts: Vec<Part>) -> SetExpr {
        let mut s = SetExpr::empty();
        for p in parts {
            match p {
                Part::Whole => s.whole_space = true,
                Part::Point(c) => {
                    s.points.insert(c);
                }
                Part::Atom(w) => s.atoms.push(w),
                Part::Fam(f) => s.families.push(f),
            }
        }
        s.canonicalize(m);
        s
    }

    /// Finite families become atoms, empty parts vanish, `C_e` becomes the
    /// whole-space flag, and everything is sorted.
    pub fn canonicalize(&mut self, m: &TransitionMatrix) {
        let mut fams = Vec::new();
        for f in std::mem::take(&mut self.families) {
            match f.members(m) {
                Members::Finite(ks) => self.atoms.extend(ks.into_iter().map(|k| f.prefix.pushed(k))),
                _ => fams.push(f),
            }
        }
        if self.atoms.iter().any(|a| a.is_empty()) {
            self.whole_space = true;
            self.atoms.retain(|a| !a.is_empty());
        }
        fams.sort();
        fams.dedup();
        self.families = fams;
        self.atoms.sort();
        self.atoms.dedup();
    }

    pub fn contains(&self, m: &TransitionMatrix, c: &Configuration) -> bool {
        self.containing_parts(m, c) > 0
    }

    /// How many parts contain `c`; at most one for a disjoint expression.
    pub fn containing_parts(&self, m: &TransitionMatrix, c: &Configuration) -> usize {
        let mut n = self.whole_space as usize;
        if let Configuration::Bounded(b) = c {
            n += self.points.contains(b) as usize;
        }
        n += self.atoms.iter().filter(|a| c.has_prefix(a)).count();
        n += self.families.iter().filter(|f| f.contains(m, c)).count();
        n
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.whole_space {
            parts.push("X_A".into());
        }
        if !self.points.is_empty() {
            let pts: Vec<String> = self.points.iter().map(|p| format!("⟨{p}⟩")).collect();
            parts.push(format!("{{{}}}", pts.join(", ")));
        }
        parts.extend(self.families.iter().map(|x| x.to_string()));
        parts.extend(self.atoms.iter().map(|a| format!("C[{a}]")));
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join(" ⊔ "))
        }
    }
}

pub fn member(m: &TransitionMatrix, c: &Configuration, s: &SetExpr) -> bool {
    s.contains(m, c)
}

// ---- finite point sets ----

/// The Y_A points with stem exactly `kappa` (one per compatible root).
pub fn points_with_stem(m: &TransitionMatrix, kappa: &Word) -> Vec<BoundedConfig> {
    m.catalog()
        .iter()
        .filter_map(|col| BoundedConfig::new(m, kappa.clone(), col.id).ok())
        .collect()
}

/// `{ξ ∈ Y_A : lo ≤ κ(ξ) < hi}` in the prefix order.
fn points_between(m: &TransitionMatrix, lo: &Word, hi: &Word) -> Vec<Part> {
    if !lo.is_prefix_of(hi) {
        return vec![];
    }
    (lo.len()..hi.len()).flat_map(|n| points_with_stem(m, &hi.prefix(n))).map(Part::Point).collect()
}

/// `F_α`: stems strictly inside `⟦α⟧`.
fn f_set(m: &TransitionMatrix, alpha: &Word) -> Vec<Part> {
    points_between(m, &Word::empty(), alpha)
}

/// `F*_α`: stems in `⟦α⟧`, α included.
fn f_star(m: &TransitionMatrix, alpha: &Word) -> Vec<Part> {
    let mut v = f_set(m, alpha);
    v.extend(points_with_stem(m, alpha).into_iter().map(Part::Point));
    v
}

/// Points with stem `α` whose root meets the condition on `H`.
fn root_points(m: &TransitionMatrix, alpha: &Word, keep: impl Fn(&BTreeSet<Symbol>) -> bool) -> Vec<Part> {
    points_with_stem(m, alpha)
        .into_iter()
        .filter(|c| keep(&m.column(c.root()).unwrap().support))
        .map(Part::Point)
        .collect()
}

/// `G(α, H)`: stem α, `H ⊆ root`.
pub fn g_set(m: &TransitionMatrix, alpha: &Word, h: &[Symbol]) -> Vec<BoundedConfig> {
    to_points(root_points(m, alpha, |r| h.iter().all(|j| r.contains(j))))
}

/// `K(α, H)`: stem α, `H ∩ root = ∅`.
pub fn k_set(m: &TransitionMatrix, alpha: &Word, h: &[Symbol]) -> Vec<BoundedConfig> {
    to_points(root_points(m, alpha, |r| h.iter().all(|j| !r.contains(j))))
}

fn to_points(parts: Vec<Part>) -> Vec<BoundedConfig> {
    parts
        .into_iter()
        .filter_map(|p| match p {
            Part::Point(c) => Some(c),
            _ => None,
        })
        .collect()
}

fn g_parts(m: &TransitionMatrix, alpha: &Word, h: &[Symbol]) -> Vec<Part> {
    g_set(m, alpha, h).into_iter().map(Part::Point).collect()
}

fn k_parts(m: &TransitionMatrix, alpha: &Word, h: &[Symbol]) -> Vec<Part> {
    k_set(m, alpha, h).into_iter().map(Part::Point).collect()
}

/// `GK(α, j, l)`: stem α, `j ∈ root`, `l ∉ root`.
fn gk_parts(m: &TransitionMatrix, alpha: &Word, j: Symbol, l: Symbol) -> Vec<Part> {
    root_points(m, alpha, |r| r.contains(&j) && !r.contains(&l))
}

// ---- families ----

fn fam(prefix: Word, pred: IndexPred) -> Part {
    Part::Fam(CylFamily::new(prefix, pred))
}

/// `⊔_{n=from}^{to−1} ⊔_{k≠α_n} C_{δ^n(α)k}`, with `δ^n(α)` the length-n prefix.
fn branches(alpha: &Word, from: usize, to: usize) -> Vec<Part> {
    (from..to.min(alpha.len()))
        .map(|n| fam(alpha.prefix(n), IndexPred::all_except([alpha.symbols()[n]])))
        .collect()
}

fn with_except(p: IndexPred, k: Symbol) -> IndexPred {
    match p {
        IndexPred::Rows { ones, zeros, mut except } => {
            except.insert(k);
            IndexPred::Rows { ones, zeros, except }
        }
        IndexPred::Exactly(mut s) => {
            s.remove(&k);
            IndexPred::Exactly(s)
        }
    }
}

// ---- decompositions ----

/// Normal form of a single subbasis element.
pub fn decompose(m: &TransitionMatrix, e: &SubbasisElem) -> Result<SetExpr> {
    let e = e.clone().normalized(m)?;
    let parts = match &e {
        SubbasisElem::Cyl(a) => {
            if a.is_empty() {
                vec![Part::Whole]
            } else {
                vec![Part::Atom(a.clone())]
            }
        }
        SubbasisElem::CylC(a) => complement_of_cyl(m, a),
        SubbasisElem::InvCyl(a, j) => inv_cyl(m, a, *j),
        SubbasisElem::InvCylC(a, j) => inv_cyl_c(m, a, *j),
    };
    Ok(SetExpr::from_parts(m, parts))
}

/// `C_α^c = F_α ⊔ ⊔_{n<|α|} ⊔_{k≠α_n} C_{δ^n(α)k}`.
fn complement_of_cyl(m: &TransitionMatrix, a: &Word) -> Vec<Part> {
    let mut v = f_set(m, a);
    v.extend(branches(a, 0, a.len()));
    v
}

/// `C_{αj^{-1}} = G(α,j) ⊔ ⊔_{A(j,k)=1} C_{αk}`.
fn inv_cyl(m: &TransitionMatrix, a: &Word, j: Symbol) -> Vec<Part> {
    let mut v = g_parts(m, a, &[j]);
    v.push(fam(a.clone(), IndexPred::row_one(j)));
    v
}

/// `C_{αj^{-1}}^c = K(α,j) ⊔ F_α ⊔ branches ⊔ ⊔_{A(j,p)=0} C_{αp}`.
fn inv_cyl_c(m: &TransitionMatrix, a: &Word, j: Symbol) -> Vec<Part> {
    let mut v = k_parts(m, a, &[j]);
    v.extend(complement_of_cyl(m, a));
    v.push(fam(a.clone(), IndexPred::row_zero(j)));
    v
}

// ---- intersections ----

enum Order {
    Equal,
    /// first is a strict prefix of second
    Below,
    Above,
    /// incomparable, with the longest common prefix
    Apart(Word),
}

fn order(a: &Word, g: &Word) -> Order {
    if a == g {
        Order::Equal
    } else if a.is_prefix_of(g) {
        Order::Below
    } else if g.is_prefix_of(a) {
        Order::Above
    } else {
        Order::Apart(a.common_prefix(g))
    }
}

/// Intersection of two subbasis elements by the case formulas.
pub fn intersect(m: &TransitionMatrix, a: &SubbasisElem, b: &SubbasisElem) -> Result<SetExpr> {
    let a = a.clone().normalized(m)?;
    let b = b.clone().normalized(m)?;
    let (a, b) = if a.rank() <= b.rank() { (a, b) } else { (b, a) };
    use SubbasisElem::*;
    let parts = match (&a, &b) {
        (Cyl(x), Cyl(y)) => cyl_cyl(x, y),
        (Cyl(x), CylC(y)) => cyl_cylc(m, x, y),
        (CylC(x), CylC(y)) => cylc_cylc(m, x, y),
        (Cyl(x), InvCyl(y, j)) => cyl_inv(m, x, y, *j),
        (Cyl(x), InvCylC(y, j)) => cyl_invc(m, x, y, *j),
        (CylC(x), InvCyl(y, j)) => cylc_inv(m, x, y, *j),
        (CylC(x), InvCylC(y, j)) => cylc_invc(m, x, y, *j),
        (InvCyl(x, j), InvCyl(y, l)) => inv_inv(m, x, *j, y, *l),
        (InvCyl(x, j), InvCylC(y, l)) => inv_invc(m, x, *j, y, *l),
        (InvCylC(x, j), InvCylC(y, l)) => invc_invc(m, x, *j, y, *l),
        _ => unreachable!("pairs are sorted by rank"),
    };
    Ok(SetExpr::from_parts(m, parts))
}

fn cyl(w: &Word) -> Part {
    if w.is_empty() {
        Part::Whole
    } else {
        Part::Atom(w.clone())
    }
}

fn cyl_cyl(a: &Word, g: &Word) -> Vec<Part> {
    match order(a, g) {
        Order::Equal | Order::Below => vec![cyl(g)],
        Order::Above => vec![cyl(a)],
        Order::Apart(_) => vec![],
    }
}

/// `C_α ∩ C_γ^c`
fn cyl_cylc(m: &TransitionMatrix, a: &Word, g: &Word) -> Vec<Part> {
    match order(a, g) {
        Order::Equal | Order::Below => {
            let mut v = points_between(m, a, g);
            v.extend(branches(g, a.len(), g.len()));
            v
        }
        Order::Above => vec![],
        Order::Apart(_) => vec![cyl(a)],
    }
}

/// The part of `C_{α'a}` outside `C_α`, where `α'a ≤ α`:
/// `F^{α'a}_α ⊔ ⊔_{n=|α'|+1}^{|α|−1} ⊔_{k≠α_n} C_{δ^n(α)k}`.
fn below_outside(m: &TransitionMatrix, top: &Word, alpha: &Word) -> Vec<Part> {
    let mut v = points_between(m, top, alpha);
    v.extend(branches(alpha, top.len(), alpha.len()));
    v
}

/// The part of `C_{α'}` avoiding the two branches that lead to α and γ.
fn split_at_common(m: &TransitionMatrix, a: &Word, g: &Word, ap: &Word) -> Vec<Part> {
    let (ka, kg) = (a.symbols()[ap.len()], g.symbols()[ap.len()]);
    let mut v = vec![fam(ap.clone(), IndexPred::all_except([ka, kg]))];
    v.extend(points_with_stem(m, ap).into_iter().map(Part::Point));
    v.extend(below_outside(m, &ap.pushed(ka), a));
    v.extend(below_outside(m, &ap.pushed(kg), g));
    v
}

/// `C_α^c ∩ C_γ^c`
fn cylc_cylc(m: &TransitionMatrix, a: &Word, g: &Word) -> Vec<Part> {
    match order(a, g) {
        Order::Equal | Order::Below => complement_of_cyl(m, a),
        Order::Above => complement_of_cyl(m, g),
        Order::Apart(ap) => {
            // everything below α', then C_{α'} split at the fork
            let mut v = f_set(m, &ap);
            v.extend(branches(&ap, 0, ap.len()));
            v.extend(split_at_common(m, a, g, &ap));
            v
        }
    }
}

/// `C_α ∩ C_{γj^{-1}}`
fn cyl_inv(m: &TransitionMatrix, a: &Word, g: &Word, j: Symbol) -> Vec<Part> {
    match order(a, g) {
        Order::Equal | Order::Below => inv_cyl(m, g, j),
        Order::Above => {
            if m.allows(j, a.symbols()[g.len()]) {
                vec![cyl(a)]
            } else {
                vec![]
            }
        }
        Order::Apart(_) => vec![],
    }
}

/// The part of `C_{γl^{-1}}^c` inside `C_α` for `α ≤ γ`:
/// `K(γ,l) ⊔ F^α_γ ⊔ ⊔_{n=|α|}^{|γ|−1} ⊔_{k≠γ_n} C_{δ^n(γ)k} ⊔ ⊔_{A(l,p)=0} C_{γp}`.
fn invc_inside(m: &TransitionMatrix, a: &Word, g: &Word, l: Symbol) -> Vec<Part> {
    let mut v = k_parts(m, g, &[l]);
    v.extend(points_between(m, a, g));
    v.extend(branches(g, a.len(), g.len()));
    v.push(fam(g.clone(), IndexPred::row_zero(l)));
    v
}

/// `C_α ∩ C_{γj^{-1}}^c`
fn cyl_invc(m: &TransitionMatrix, a: &Word, g: &Word, j: Symbol) -> Vec<Part> {
    match order(a, g) {
        Order::Equal | Order::Below => invc_inside(m, a, g, j),
        Order::Above => {
            if m.allows(j, a.symbols()[g.len()]) {
                vec![]
            } else {
                vec![cyl(a)]
            }
        }
        Order::Apart(_) => vec![cyl(a)],
    }
}

/// `C_α^c ∩ C_{γj^{-1}}`
fn cylc_inv(m: &TransitionMatrix, a: &Word, g: &Word, j: Symbol) -> Vec<Part> {
    match order(a, g) {
        Order::Equal | Order::Below => vec![],
        Order::Above => {
            let c = a.symbols()[g.len()];
            let mut v = g_parts(m, g, &[j]);
            v.push(fam(g.clone(), IndexPred::row_one_except(j, [c])));
            if m.allows(j, c) {
                v.extend(below_outside(m, &g.pushed(c), a));
            }
            v
        }
        Order::Apart(_) => inv_cyl(m, g, j),
    }
}

/// `C_α^c ∩ C_{γj^{-1}}^c`
fn cylc_invc(m: &TransitionMatrix, a: &Word, g: &Word, j: Symbol) -> Vec<Part> {
    match order(a, g) {
        Order::Equal | Order::Below => complement_of_cyl(m, a),
        Order::Above => {
            let c = a.symbols()[g.len()];
            let mut v = k_parts(m, g, &[j]);
            v.extend(complement_of_cyl(m, g));
            v.push(fam(g.clone(), IndexPred::row_zero_except(j, [c])));
            if !m.allows(j, c) {
                v.extend(below_outside(m, &g.pushed(c), a));
            }
            v
        }
        Order::Apart(ap) => {
            let ka = a.symbols()[ap.len()];
            let kg = g.symbols()[ap.len()];
            let mut v = k_parts(m, g, &[j]);
            v.extend(f_set(m, g));
            v.extend(branches(g, 0, ap.len()));
            v.push(fam(ap.clone(), IndexPred::all_except([ka, kg])));
            v.extend(below_outside(m, &ap.pushed(ka), a));
            v.extend(branches(g, ap.len() + 1, g.len()));
            v.push(fam(g.clone(), IndexPred::row_zero(j)));
            v
        }
    }
}

/// `C_{αj^{-1}} ∩ C_{γl^{-1}}`
fn inv_inv(m: &TransitionMatrix, a: &Word, j: Symbol, g: &Word, l: Symbol) -> Vec<Part> {
    match order(a, g) {
        Order::Equal => {
            let mut v = g_parts(m, a, &[j, l]);
            v.push(fam(a.clone(), IndexPred::row_one(j).and(m, &IndexPred::row_one(l))));
            v
        }
        Order::Below => {
            if m.allows(j, g.symbols()[a.len()]) {
                inv_cyl(m, g, l)
            } else {
                vec![]
            }
        }
        Order::Above => {
            if m.allows(l, a.symbols()[g.len()]) {
                inv_cyl(m, a, j)
            } else {
                vec![]
            }
        }
        Order::Apart(_) => vec![],
    }
}

/// `C_{αj^{-1}} ∩ C_{γl^{-1}}^c`
fn inv_invc(m: &TransitionMatrix, a: &Word, j: Symbol, g: &Word, l: Symbol) -> Vec<Part> {
    match order(a, g) {
        Order::Equal => {
            let mut v = gk_parts(m, a, j, l);
            v.push(fam(a.clone(), IndexPred::row_one(j).and(m, &IndexPred::row_zero(l))));
            v
        }
        Order::Below => {
            let c = g.symbols()[a.len()];
            let mut v = g_parts(m, a, &[j]);
            v.push(fam(a.clone(), IndexPred::row_one_except(j, [c])));
            if m.allows(j, c) {
                v.extend(invc_inside(m, &a.pushed(c), g, l));
            }
            v
        }
        Order::Above => {
            if m.allows(l, a.symbols()[g.len()]) {
                vec![]
            } else {
                inv_cyl(m, a, j)
            }
        }
        Order::Apart(_) => inv_cyl(m, a, j),
    }
}

/// `C_{αj^{-1}}^c ∩ C_{γl^{-1}}^c`
fn invc_invc(m: &TransitionMatrix, a: &Word, j: Symbol, g: &Word, l: Symbol) -> Vec<Part> {
    match order(a, g) {
        Order::Equal => {
            let mut v = k_parts(m, a, &[j, l]);
            v.extend(complement_of_cyl(m, a));
            v.push(fam(a.clone(), IndexPred::row_zero(j).and(m, &IndexPred::row_zero(l))));
            v
        }
        Order::Below => invc_below(m, a, j, g, l),
        Order::Above => invc_below(m, g, l, a, j),
        Order::Apart(ap) => {
            let ka = a.symbols()[ap.len()];
            let kg = g.symbols()[ap.len()];
            let mut v = f_star(m, &ap);
            v.extend(branches(&ap, 0, ap.len()));
            v.push(fam(ap.clone(), IndexPred::all_except([ka, kg])));
            v.extend(invc_inside(m, &ap.pushed(ka), a, j));
            v.extend(invc_inside(m, &ap.pushed(kg), g, l));
            v
        }
    }
}

/// `C_{αj^{-1}}^c ∩ C_{γl^{-1}}^c` with α a strict prefix of γ.
fn invc_below(m: &TransitionMatrix, a: &Word, j: Symbol, g: &Word, l: Symbol) -> Vec<Part> {
    let c = g.symbols()[a.len()];
    let mut v = k_parts(m, a, &[j]);
    v.extend(complement_of_cyl(m, a));
    v.push(fam(a.clone(), with_except(IndexPred::row_zero(j), c)));
    if !m.allows(j, c) {
        v.extend(invc_inside(m, &a.pushed(c), g, l));
    }
    v
}

// ---- generic engine ----

fn intersect_parts(m: &TransitionMatrix, x: &Part, y: &Part) -> Vec<Part> {
    use Part::*;
    match (x, y) {
        (Whole, p) | (p, Whole) => vec![p.clone()],
        (Point(c), p) | (p, Point(c)) => {
            let cfg = Configuration::Bounded(c.clone());
            let inside = match p {
                Point(d) => c == d,
                Atom(w) => cfg.has_prefix(w),
                Fam(f) => f.contains(m, &cfg),
                Whole => true,
            };
            if inside {
                vec![Point(c.clone())]
            } else {
                vec![]
            }
        }
        (Atom(w), Atom(v)) => cyl_cyl(w, v),
        (Atom(w), Fam(f)) | (Fam(f), Atom(w)) => {
            if w.is_prefix_of(&f.prefix) {
                vec![Fam(f.clone())]
            } else if f.prefix.is_strict_prefix_of(w) {
                if f.pred.holds(m, w.symbols()[f.prefix.len()]) {
                    vec![Atom(w.clone())]
                } else {
                    vec![]
                }
            } else {
                vec![]
            }
        }
        (Fam(f), Fam(h)) => {
            if f.prefix == h.prefix {
                vec![fam(f.prefix.clone(), f.pred.and(m, &h.pred))]
            } else if f.prefix.is_strict_prefix_of(&h.prefix) {
                if f.pred.holds(m, h.prefix.symbols()[f.prefix.len()]) {
                    vec![Fam(h.clone())]
                } else {
                    vec![]
                }
            } else if h.prefix.is_strict_prefix_of(&f.prefix) {
                if h.pred.holds(m, f.prefix.symbols()[h.prefix.len()]) {
                    vec![Fam(f.clone())]
                } else {
                    vec![]
                }
            } else {
                vec![]
            }
        }
    }
}

/// Part-by-part intersection of two normal forms.
pub fn intersect_exprs(m: &TransitionMatrix, a: &SetExpr, b: &SetExpr) -> SetExpr {
    let pa = a.parts();
    let pb = b.parts();
    let mut out = Vec::new();
    for x in &pa {
        for y in &pb {
            out.extend(intersect_parts(m, x, y));
        }
    }
    SetExpr::from_parts(m, out)
}

/// Left fold of the intersection over a non-empty list.
pub fn intersect_many(m: &TransitionMatrix, elems: &[SubbasisElem]) -> Result<SetExpr> {
    match elems {
        [] => Err(GcmsError::Domain("intersect_many needs at least one element".into())),
        [e] => decompose(m, e),
        [a, b, rest @ ..] => {
            let mut acc = intersect(m, a, b)?;
            for e in rest {
                acc = intersect_exprs(m, &acc, &decompose(m, e)?);
            }
            Ok(acc)
        }
    }
}

/// `X_A = ⊔_j G(e,j) ⊔ ⊔_j C_j`, written with the finitely many distinct
/// empty-stem points and the family of all one-symbol cylinders.
pub fn whole_space_decomposition(m: &TransitionMatrix) -> SetExpr {
    let mut parts: Vec<Part> = points_with_stem(m, &Word::empty()).into_iter().map(Part::Point).collect();
    parts.push(fam(Word::empty(), IndexPred::all_except([])));
    let mut s = SetExpr::empty();
    for p in parts {
        match p {
            Part::Point(c) => {
                s.points.insert(c);
            }
            Part::Fam(f) => s.families.push(f),
            _ => {}
        }
    }
    s.canonicalize(m);
    s
}

// ---- verification against the membership oracle ----

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    pub mismatches: usize,
    pub overlaps: usize,
    pub first_counterexample: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.overlaps == 0
    }
}

/// Compares `rhs` with `a ∩ b` evaluated pointwise, and checks that the parts
/// of `rhs` are disjoint on the sample.
pub fn verify_identity(
    m: &TransitionMatrix,
    lhs: (&SubbasisElem, &SubbasisElem),
    rhs: &SetExpr,
    sample: &[Configuration],
) -> IdentityReport {
    let mut rep = IdentityReport { checked: 0, mismatches: 0, overlaps: 0, first_counterexample: None };
    for c in sample {
        rep.checked += 1;
        let want = lhs.0.contains(m, c) && lhs.1.contains(m, c);
        let hits = rhs.containing_parts(m, c);
        if hits > 1 {
            rep.overlaps += 1;
        }
        if (hits > 0) != want {
            rep.mismatches += 1;
        }
        if (hits > 1 || (hits > 0) != want) && rep.first_counterexample.is_none() {
            rep.first_counterexample =
                Some(format!("{} ∩ {} at {c}: expected {want}, found {hits} part(s) in {rhs}", lhs.0, lhs.1));
        }
    }
    rep
}

/// Every Y_A point with stem length `≤ max_len` over symbols `≤ max_symbol`,
/// followed by `n_periodic` eventually periodic points spread over the
/// candidates with preperiod `≤ 2` and period `≤ 3`.
pub fn sample_configs(m: &TransitionMatrix, max_len: usize, max_symbol: Symbol, n_periodic: usize) -> Vec<Configuration> {
    let mut out = Vec::new();
    for col in m.catalog() {
        for n in 0..=max_len {
            let words = m.enumerate_words(n, &col.terminal, max_symbol);
            for w in words.items {
                if let Ok(c) = BoundedConfig::new(m, w, col.id) {
                    out.push(Configuration::Bounded(c));
                }
            }
        }
    }
    let mut periodic: BTreeSet<UnboundedConfig> = BTreeSet::new();
    let all_syms: BTreeSet<Symbol> = (1..=max_symbol).collect();
    for p in 1..=3 {
        for per in m.enumerate_words(p, &all_syms, max_symbol).items {
            for q in 0..=2 {
                for pre in m.enumerate_words(q, &all_syms, max_symbol).items {
                    if let Ok(u) = UnboundedConfig::new(m, pre, per.clone()) {
                        periodic.insert(u);
                    }
                }
            }
        }
    }
    let periodic: Vec<UnboundedConfig> = periodic.into_iter().collect();
    if n_periodic > 0 && !periodic.is_empty() {
        let step = (periodic.len() as f64 / n_periodic as f64).max(1.0);
        let mut idx = 0.0;
        let mut taken = 0;
        while taken < n_periodic && (idx as usize) < periodic.len() {
            out.push(Configuration::Unbounded(periodic[idx as usize].clone()));
            idx += step;
            taken += 1;
        }
    }
    out
}

/// All subbasis elements with `|α| ≤ max_len` over symbols `≤ max_symbol` and `j ≤ max_symbol`.
pub fn subbasis_elements(m: &TransitionMatrix, max_len: usize, max_symbol: Symbol) -> Vec<SubbasisElem> {
    let all: BTreeSet<Symbol> = (1..=max_symbol).collect();
    let mut out = BTreeSet::new();
    for n in 0..=max_len {
        for a in m.enumerate_words(n, &all, max_symbol).items {
            out.insert(SubbasisElem::Cyl(a.clone()));
            out.insert(SubbasisElem::CylC(a.clone()));
            for j in 1..=max_symbol {
                out.insert(SubbasisElem::InvCyl(a.clone(), j));
                out.insert(SubbasisElem::InvCylC(a.clone(), j));
            }
        }
    }
    out.into_iter().collect()
}

// ---- expression grammar ----

/// Parses `C[3.2.1]`, `!C[3.2.1]`, `C[2.1;inv=3]`, `!C[2.1;inv=3]`.
pub fn parse_subbasis(text: &str) -> Result<SubbasisElem> {
    let t = text.trim();
    let (neg, rest) = match t.strip_prefix('!') {
        Some(r) => (true, r.trim_start()),
        None => (false, t),
    };
    let inner = rest
        .strip_prefix("C[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| GcmsError::Parse(format!("expected C[...] in {text:?}")))?;
    let (word, inv) = match inner.split_once(';') {
        None => (inner, None),
        Some((w, opt)) => {
            let j = opt
                .trim()
                .strip_prefix("inv=")
                .and_then(|v| v.trim().parse::<Symbol>().ok())
                .filter(|&j| j >= 1)
                .ok_or_else(|| GcmsError::Parse(format!("bad option {opt:?}")))?;
            (w, Some(j))
        }
    };
    let a: Word = word.parse()?;
    Ok(match (neg, inv) {
        (false, None) => SubbasisElem::Cyl(a),
        (true, None) => SubbasisElem::CylC(a),
        (false, Some(j)) => SubbasisElem::InvCyl(a, j),
        (true, Some(j)) => SubbasisElem::InvCylC(a, j),
    })
}

/// Parses an `&`-separated list of subbasis elements.
pub fn parse_expression(text: &str) -> Result<Vec<SubbasisElem>> {
    text.split('&').map(parse_subbasis).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn sb(s: &str) -> SubbasisElem {
        parse_subbasis(s).unwrap()
    }

    #[test]
    fn renewal_inverse_cylinder_collapses_to_atom() {
        let m = TransitionMatrix::renewal();
        let s = decompose(&m, &sb("C[2.1;inv=3]")).unwrap();
        assert_eq!(s.atoms, vec![w("2.1.2")]);
        assert!(s.points.is_empty() && s.families.is_empty() && !s.whole_space);
    }

    #[test]
    fn renewal_complement_of_one() {
        let m = TransitionMatrix::renewal();
        let s = decompose(&m, &sb("!C[1]")).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!(s.points.iter().next().unwrap().stem().is_empty());
        assert_eq!(s.families, vec![CylFamily::new(Word::empty(), IndexPred::all_except([1]))]);
        assert!(s.atoms.is_empty());
    }

    #[test]
    fn pair_renewal_inverse_two_at_root() {
        let m = TransitionMatrix::pair_renewal();
        let s = decompose(&m, &sb("C[;inv=2]")).unwrap();
        let pts: Vec<u64> = s.points.iter().map(|p| p.root()).collect();
        assert_eq!(pts, vec![1]);
        assert_eq!(s.families, vec![CylFamily::new(Word::empty(), IndexPred::row_one(2))]);
        let sample = sample_configs(&m, 4, 6, 20);
        for c in &sample {
            let expect = match c.symbol(0) {
                None => c.as_bounded().unwrap().root() == 1,
                Some(k) => k == 1 || k % 2 == 0,
            };
            assert_eq!(s.contains(&m, c), expect, "{c}");
        }
    }

    #[test]
    fn spec_examples() {
        let m = TransitionMatrix::renewal();
        let s = intersect(&m, &sb("C[1]"), &sb("!C[1.2]")).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points.iter().next().unwrap().stem(), &w("1"));
        assert_eq!(s.families, vec![CylFamily::new(w("1"), IndexPred::all_except([2]))]);
        let same = intersect(&m, &sb("C[3.2]"), &sb("C[3.2]")).unwrap();
        assert_eq!(same.atoms, vec![w("3.2")]);
        let nested = intersect_many(&m, &[sb("C[1]"), sb("C[1.2]"), sb("C[1.2.1]")]).unwrap();
        assert_eq!(nested.atoms, vec![w("1.2.1")]);
    }

    #[test]
    fn membership_examples() {
        let m = TransitionMatrix::renewal();
        let x0 = Configuration::parse(&m, "stem=;root=1").unwrap();
        assert!(member(&m, &x0, &decompose(&m, &sb("!C[1]")).unwrap()));
        let c321 = Configuration::parse(&m, "stem=3.2.1;root=1").unwrap();
        assert!(member(&m, &c321, &decompose(&m, &sb("C[3.2]")).unwrap()));
        let c1 = Configuration::parse(&m, "stem=1;root=1").unwrap();
        assert!(!member(&m, &c1, &decompose(&m, &sb("C[1.2]")).unwrap()));
    }

    #[test]
    fn decompositions_agree_with_oracle() {
        for m in [TransitionMatrix::renewal(), TransitionMatrix::pair_renewal(), TransitionMatrix::alternating_renewal()] {
            let sample = sample_configs(&m, 4, 6, 30);
            let whole = SubbasisElem::Cyl(Word::empty());
            for e in subbasis_elements(&m, 2, 4) {
                let s = decompose(&m, &e).unwrap();
                let r = verify_identity(&m, (&e, &whole), &s, &sample);
                assert!(r.passed(), "{}: {:?}", m.name(), r.first_counterexample);
            }
        }
    }

    #[test]
    fn whole_space_is_covered_once() {
        for m in [TransitionMatrix::renewal(), TransitionMatrix::pair_renewal()] {
            let s = whole_space_decomposition(&m);
            for c in sample_configs(&m, 4, 6, 30) {
                assert_eq!(s.containing_parts(&m, &c), 1, "{c}");
            }
        }
    }

    #[test]
    fn corrupted_rhs_is_caught() {
        let m = TransitionMatrix::renewal();
        let (a, b) = (sb("!C[1]"), sb("!C[2.1]"));
        let mut s = intersect(&m, &a, &b).unwrap();
        assert!(!s.families.is_empty());
        s.families.pop();
        let r = verify_identity(&m, (&a, &b), &s, &sample_configs(&m, 4, 6, 20));
        assert!(!r.passed() && r.first_counterexample.is_some());
    }

    #[test]
    fn grammar_round_trip() {
        for t in ["C[3.2.1]", "!C[3.2.1]", "C[2.1;inv=3]", "!C[2.1;inv=3]", "C[;inv=2]"] {
            assert_eq!(sb(t).to_string(), t);
        }
        assert_eq!(parse_expression("C[1] & !C[1.2]").unwrap().len(), 2);
        assert!(parse_subbasis("C[1;inv=0]").is_err());
        assert!(parse_subbasis("D[1]").is_err());
    }

    #[test]
    fn family_member_shapes() {
        let m = TransitionMatrix::pair_renewal();
        let f = CylFamily::new(Word::empty(), IndexPred::row_one(2));
        assert_eq!(f.members(&m), Members::Infinite);
        let g = CylFamily::new(w("1"), IndexPred::all_except([2, 5]));
        assert_eq!(g.members(&m), Members::Cofinite(vec![2, 5]));
        let h = CylFamily::new(w("1"), IndexPred::row_one(4));
        assert_eq!(h.members(&m), Members::Finite(vec![3]));
    }
}
