//! Points of X_A: bounded stem/root configurations (Y_A) and eventually
//! periodic sequences (Σ_A), evaluated on free-group words.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{GcmsError, Result};
use crate::shift_space::{Enumeration, MatrixKind, Symbol, TransitionMatrix, Word};

/// A reduced element `αβ^{-1}` of the free group on ℕ, with β stored unreversed,
/// or the marker for every element that is not of that form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupWord {
    Form { alpha: Word, beta: Word },
    Vanishing,
}

impl GroupWord {
    /// Builds `αβ^{-1}` and cancels a common tail.
    pub fn new(alpha: Word, beta: Word) -> Self {
        let mut a = alpha.into_vec();
        let mut b = beta.into_vec();
        while let (Some(x), Some(y)) = (a.last(), b.last()) {
            if x != y {
                break;
            }
            a.pop();
            b.pop();
        }
        GroupWord::Form { alpha: Word::new(a).unwrap(), beta: Word::new(b).unwrap() }
    }

    pub fn positive(alpha: Word) -> Self {
        GroupWord::Form { alpha, beta: Word::empty() }
    }

    /// `α j^{-1}`.
    pub fn inverse_letter(alpha: Word, j: Symbol) -> Self {
        GroupWord::new(alpha, Word::from_slice(&[j]))
    }

    /// Right multiplication by the generator `y`.
    pub fn times(&self, y: Symbol) -> Self {
        match self {
            GroupWord::Vanishing => GroupWord::Vanishing,
            GroupWord::Form { alpha, beta } => match beta.first() {
                None => GroupWord::positive(alpha.pushed(y)),
                Some(b0) if b0 == y => GroupWord::Form { alpha: alpha.clone(), beta: beta.suffix_from(1) },
                Some(_) => GroupWord::Vanishing,
            },
        }
    }

    /// Right multiplication by `x^{-1}`.
    pub fn times_inverse(&self, x: Symbol) -> Self {
        match self {
            GroupWord::Vanishing => GroupWord::Vanishing,
            GroupWord::Form { alpha, beta } => {
                if beta.is_empty() && alpha.last() == Some(x) {
                    GroupWord::positive(alpha.popped())
                } else {
                    let mut b = vec![x];
                    b.extend_from_slice(beta.symbols());
                    GroupWord::Form { alpha: alpha.clone(), beta: Word::new(b).unwrap() }
                }
            }
        }
    }

    /// Number of letters in the reduced form.
    pub fn length(&self) -> usize {
        match self {
            GroupWord::Form { alpha, beta } => alpha.len() + beta.len(),
            GroupWord::Vanishing => 0,
        }
    }

    /// Every prefix of the reduced letter sequence, from `e` up to the word itself.
    pub fn prefixes(&self) -> Vec<GroupWord> {
        match self {
            GroupWord::Vanishing => vec![],
            GroupWord::Form { alpha, beta } => {
                let mut out: Vec<GroupWord> = (0..=alpha.len()).map(|i| GroupWord::positive(alpha.prefix(i))).collect();
                for t in 1..=beta.len() {
                    out.push(GroupWord::Form { alpha: alpha.clone(), beta: beta.suffix_from(beta.len() - t) });
                }
                out
            }
        }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupWord::Vanishing => write!(f, "0"),
            GroupWord::Form { alpha, beta } if beta.is_empty() => write!(f, "{alpha}"),
            GroupWord::Form { alpha, beta } => write!(f, "{alpha}/{beta}"),
        }
    }
}

impl FromStr for GroupWord {
    type Err = GcmsError;

    /// `"3.2.1"` or `"3.2.1/1"` for `321·1^{-1}`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            None => Ok(GroupWord::positive(s.parse()?)),
            Some((a, b)) => Ok(GroupWord::new(a.parse()?, b.parse()?)),
        }
    }
}

/// A configuration in Y_A: a finite stem and the catalog id of its root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BoundedConfig {
    stem: Word,
    root: u64,
}

/// An eventually periodic point `pre·per·per·…` of Σ_A, kept in minimal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct UnboundedConfig {
    pre: Word,
    per: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Configuration {
    Bounded(BoundedConfig),
    Unbounded(UnboundedConfig),
}

impl BoundedConfig {
    pub fn new(m: &TransitionMatrix, stem: Word, root: u64) -> Result<Self> {
        let col = m.column(root).ok_or_else(|| GcmsError::RootNotInCatalog(root.to_string()))?;
        if !m.is_admissible(&stem) {
            return Err(GcmsError::NotAdmissible(stem.to_string()));
        }
        if let Some(last) = stem.last() {
            if !col.terminal.contains(&last) || !col.support.contains(&last) {
                return Err(GcmsError::BadStemForRoot { stem: stem.to_string(), root });
            }
        }
        Ok(BoundedConfig { stem, root })
    }

    /// Looks the root up by its support set.
    pub fn with_root_support(m: &TransitionMatrix, stem: Word, support: &BTreeSet<Symbol>) -> Result<Self> {
        let col = m
            .column_by_support(support)
            .ok_or_else(|| GcmsError::RootNotInCatalog(format!("{support:?}")))?;
        Self::new(m, stem, col.id)
    }

    /// The empty-stem configuration of a family.
    pub fn empty_stem(m: &TransitionMatrix, root: u64) -> Result<Self> {
        Self::new(m, Word::empty(), root)
    }

    pub fn stem(&self) -> &Word {
        &self.stem
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// The family is identified by the root id.
    pub fn family(&self) -> u64 {
        self.root
    }

    pub fn shift(&self) -> Result<BoundedConfig> {
        if self.stem.is_empty() {
            return Err(GcmsError::EmptyStem);
        }
        Ok(BoundedConfig { stem: self.stem.suffix_from(1), root: self.root })
    }

    /// Prepends a word without validation; callers guarantee admissibility.
    fn prepended(&self, alpha: &Word) -> BoundedConfig {
        BoundedConfig { stem: alpha.concat(&self.stem), root: self.root }
    }
}

impl UnboundedConfig {
    pub fn new(m: &TransitionMatrix, pre: Word, per: Word) -> Result<Self> {
        if per.is_empty() {
            return Err(GcmsError::Parse("period must be non-empty".into()));
        }
        let twice = pre.concat(&per).concat(&per);
        if !m.is_admissible(&twice) {
            return Err(GcmsError::NotAdmissible(format!("{pre}({per})")));
        }
        Ok(Self::minimal(pre, per))
    }

    fn minimal(pre: Word, per: Word) -> Self {
        let mut per = per.into_vec();
        let n = per.len();
        if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (0..n).all(|i| per[i] == per[i % d])) {
            per.truncate(d);
        }
        let mut pre = pre.into_vec();
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        UnboundedConfig { pre: Word::new(pre).unwrap(), per: Word::new(per).unwrap() }
    }

    pub fn preperiod(&self) -> &Word {
        &self.pre
    }

    pub fn period(&self) -> &Word {
        &self.per
    }

    pub fn symbol(&self, i: usize) -> Symbol {
        if i < self.pre.len() {
            self.pre.symbols()[i]
        } else {
            let p = self.per.symbols();
            p[(i - self.pre.len()) % p.len()]
        }
    }

    pub fn shift(&self) -> UnboundedConfig {
        if self.pre.is_empty() {
            let mut p = self.per.clone().into_vec();
            p.rotate_left(1);
            UnboundedConfig { pre: Word::empty(), per: Word::new(p).unwrap() }
        } else {
            Self::minimal(self.pre.suffix_from(1), self.per.clone())
        }
    }
}

impl Configuration {
    /// The stem symbol at position `i`, if the stem is that long.
    pub fn symbol(&self, i: usize) -> Option<Symbol> {
        match self {
            Configuration::Bounded(b) => b.stem.get(i),
            Configuration::Unbounded(u) => Some(u.symbol(i)),
        }
    }

    /// `None` for an infinite stem.
    pub fn stem_len(&self) -> Option<usize> {
        match self {
            Configuration::Bounded(b) => Some(b.stem.len()),
            Configuration::Unbounded(_) => None,
        }
    }

    /// `α ∈ ⟦κ⟧`: α is a prefix of the stem.
    pub fn has_prefix(&self, alpha: &Word) -> bool {
        match self {
            Configuration::Bounded(b) => alpha.is_prefix_of(&b.stem),
            Configuration::Unbounded(u) => alpha.symbols().iter().enumerate().all(|(i, &s)| u.symbol(i) == s),
        }
    }

    /// `ξ_g`.
    pub fn eval(&self, m: &TransitionMatrix, g: &GroupWord) -> bool {
        let (alpha, beta) = match g {
            GroupWord::Vanishing => return false,
            GroupWord::Form { alpha, beta } => (alpha, beta),
        };
        if !self.has_prefix(alpha) {
            return false;
        }
        let Some(tip) = beta.last() else { return true };
        if !m.is_admissible(beta) {
            return false;
        }
        match self {
            Configuration::Unbounded(u) => m.allows(tip, u.symbol(alpha.len())),
            Configuration::Bounded(b) => {
                if alpha.len() == b.stem.len() {
                    m.column(b.root).is_some_and(|c| c.support.contains(&tip))
                } else {
                    m.allows(tip, b.stem.symbols()[alpha.len()])
                }
            }
        }
    }

    pub fn shift(&self) -> Result<Configuration> {
        match self {
            Configuration::Bounded(b) => Ok(Configuration::Bounded(b.shift()?)),
            Configuration::Unbounded(u) => Ok(Configuration::Unbounded(u.shift())),
        }
    }

    pub fn as_bounded(&self) -> Option<&BoundedConfig> {
        match self {
            Configuration::Bounded(b) => Some(b),
            Configuration::Unbounded(_) => None,
        }
    }

    /// Parses `"stem=3.2.1;root=1"` (root as catalog id, or as support `1.2`
    /// via `support=`) and `"pre=;per=1"`.
    pub fn parse(m: &TransitionMatrix, text: &str) -> Result<Configuration> {
        let mut stem = None;
        let mut root = None;
        let mut support = None;
        let mut pre = None;
        let mut per = None;
        for field in text.split(';') {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| GcmsError::Parse(format!("expected key=value in {field:?}")))?;
            match k.trim() {
                "stem" => stem = Some(v.parse::<Word>()?),
                "root" => root = Some(v.trim().parse::<u64>().map_err(|_| GcmsError::Parse(format!("bad root {v:?}")))?),
                "support" => support = Some(v.parse::<Word>()?.into_vec().into_iter().collect::<BTreeSet<_>>()),
                "pre" => pre = Some(v.parse::<Word>()?),
                "per" => per = Some(v.parse::<Word>()?),
                other => return Err(GcmsError::Parse(format!("unknown key {other:?}"))),
            }
        }
        match (stem, root, support, pre, per) {
            (Some(s), Some(r), None, None, None) => Ok(Configuration::Bounded(BoundedConfig::new(m, s, r)?)),
            (Some(s), None, Some(sup), None, None) => {
                Ok(Configuration::Bounded(BoundedConfig::with_root_support(m, s, &sup)?))
            }
            (None, None, None, Some(p), Some(q)) => Ok(Configuration::Unbounded(UnboundedConfig::new(m, p, q)?)),
            _ => Err(GcmsError::Parse(format!("unrecognized configuration literal {text:?}"))),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Configuration::Bounded(b) => write!(f, "{b}"),
            Configuration::Unbounded(u) => write!(f, "pre={};per={}", u.pre, u.per),
        }
    }
}

impl fmt::Display for BoundedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stem = if self.stem.is_empty() { String::new() } else { self.stem.to_string() };
        write!(f, "stem={};root={}", stem, self.root)
    }
}

impl From<BoundedConfig> for Configuration {
    fn from(b: BoundedConfig) -> Self {
        Configuration::Bounded(b)
    }
}

impl From<UnboundedConfig> for Configuration {
    fn from(u: UnboundedConfig) -> Self {
        Configuration::Unbounded(u)
    }
}

/// The words `α` of length `n` such that `α·stem(c)` is again a stem under the same root.
fn preimage_last_in(m: &TransitionMatrix, c: &BoundedConfig) -> BTreeSet<Symbol> {
    match c.stem.first() {
        Some(s) => m.predecessors(s).into_iter().collect(),
        None => m.column(c.root).map(|col| col.terminal.clone()).unwrap_or_default(),
    }
}

/// All configurations `p` with `σ^n(p) = c`.
pub fn preimages(m: &TransitionMatrix, c: &BoundedConfig, n: usize, bound: Symbol) -> Enumeration<BoundedConfig> {
    let words = m.enumerate_words(n, &preimage_last_in(m, c), bound);
    Enumeration { items: words.items.iter().map(|a| c.prepended(a)).collect(), complete: words.complete }
}

/// Exact `|σ^{-n}(c)|` by dynamic programming over predecessors.
pub fn count_preimages(m: &TransitionMatrix, c: &BoundedConfig, n: usize) -> u128 {
    m.count_words(n, &preimage_last_in(m, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CountForm {
    Exact(u128),
    Interval { lo: u128, hi: u128 },
}

impl CountForm {
    pub fn admits(&self, n: u128) -> bool {
        match *self {
            CountForm::Exact(v) => v == n,
            CountForm::Interval { lo, hi } => lo <= n && n <= hi,
        }
    }
}

/// `(1,1)·M^{n−1}` summed, with `M = [[1,2],[1,1]]`; 1 at `n = 0`.
fn pair_renewal_count(n: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    let (mut a, mut b) = (1u128, 1u128);
    for _ in 1..n {
        (a, b) = (a + 2 * b, a + b);
    }
    a + b
}

/// Closed-form number of stems of length `n` in the family of `root`.
pub fn count_preimages_closed_form(m: &TransitionMatrix, root: u64, n: usize) -> Result<CountForm> {
    if m.column(root).is_none() {
        return Err(GcmsError::RootNotInCatalog(root.to_string()));
    }
    match m.kind() {
        MatrixKind::Renewal => Ok(CountForm::Exact(if n == 0 { 1 } else { 1u128 << (n - 1) })),
        MatrixKind::PairRenewal => Ok(CountForm::Exact(match (root, n) {
            (1, n) => pair_renewal_count(n),
            (_, 0) => 1,
            (_, n) => pair_renewal_count(n - 1),
        })),
        MatrixKind::PrimeRenewal { .. } => Ok(if n == 0 {
            CountForm::Exact(1)
        } else {
            CountForm::Interval { lo: 1u128 << (n - 1), hi: 3u128.pow(n as u32) }
        }),
        _ => Err(GcmsError::Unsupported(format!("no closed-form count for {}", m.name()))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RulesReport {
    pub words_checked: usize,
    pub violation: Option<(Rule, String)>,
}

impl RulesReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// All reduced `αβ^{-1}` with `|α| + |β| ≤ depth` over symbols `≤ bound`.
fn group_words(depth: usize, bound: Symbol) -> Vec<GroupWord> {
    let mut words_by_len: Vec<Vec<Vec<Symbol>>> = vec![vec![vec![]]];
    for l in 1..=depth {
        let mut next = Vec::new();
        for w in &words_by_len[l - 1] {
            for s in 1..=bound {
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        words_by_len.push(next);
    }
    let mut out = Vec::new();
    for a in 0..=depth {
        for b in 0..=(depth - a) {
            for alpha in &words_by_len[a] {
                for beta in &words_by_len[b] {
                    if a > 0 && b > 0 && alpha.last() == beta.last() {
                        continue;
                    }
                    out.push(GroupWord::Form {
                        alpha: Word::new(alpha.clone()).unwrap(),
                        beta: Word::new(beta.clone()).unwrap(),
                    });
                }
            }
        }
    }
    out
}

/// Checks (R1)–(R4) for an arbitrary evaluation map.
pub fn rules_check_with<F>(m: &TransitionMatrix, xi: F, depth: usize, bound: Symbol) -> RulesReport
where
    F: Fn(&GroupWord) -> bool,
{
    let e = GroupWord::positive(Word::empty());
    if !xi(&e) {
        return RulesReport { words_checked: 1, violation: Some((Rule::R1, e.to_string())) };
    }
    let all = group_words(depth, bound);
    for g in &all {
        if !xi(g) {
            continue;
        }
        if let Some(p) = g.prefixes().into_iter().find(|p| !xi(p)) {
            return RulesReport { words_checked: all.len(), violation: Some((Rule::R2, format!("{g} filled, {p} empty"))) };
        }
        let forward: Vec<Symbol> = (1..=bound).filter(|&y| xi(&g.times(y))).collect();
        if forward.len() > 1 {
            return RulesReport {
                words_checked: all.len(),
                violation: Some((Rule::R3, format!("{g} extends by {forward:?}"))),
            };
        }
        for &y in &forward {
            for x in 1..=bound {
                if xi(&g.times_inverse(x)) != m.allows(x, y) {
                    return RulesReport {
                        words_checked: all.len(),
                        violation: Some((Rule::R4, format!("g={g}, y={y}, x={x}"))),
                    };
                }
            }
        }
    }
    RulesReport { words_checked: all.len(), violation: None }
}

pub fn rules_check(m: &TransitionMatrix, c: &Configuration, depth: usize, bound: Symbol) -> RulesReport {
    rules_check_with(m, |g| c.eval(m, g), depth, bound)
}
