//! Tree-based genetic programming with homologous crossover.
//!
//! Programs are ordered trees over a single-sorted [`PrimitiveSet`]. Nodes
//! are addressed by a [`NodePath`] (child indices from the root), which maps
//! one-to-one onto the `(depth, index)` grid of a tree whose every node has
//! `a_m` child slots. One-point crossover swaps the subtrees rooted at a
//! common-region point; uniform crossover takes each common-region node from
//! the parent picked by a [`GpMask`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{from_usize, is_probability, to_f64, Rational};
use crate::rng::{substream, StreamRng};
use crate::selection::{Selection, Selector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveSet {
    functions: Vec<(String, usize)>,
    terminals: Vec<String>,
}

impl PrimitiveSet {
    pub fn new(functions: Vec<(String, usize)>, terminals: Vec<String>) -> Result<Self> {
        if terminals.is_empty() {
            return Err(Error::Config("primitive set needs at least one terminal".into()));
        }
        let mut seen = BTreeSet::new();
        for name in functions.iter().map(|(n, _)| n).chain(&terminals) {
            if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == '(' || c == ')') {
                return Err(Error::Config(format!("invalid primitive name `{name}`")));
            }
            if matches!(name.as_str(), "=" | "#") {
                return Err(Error::Config(format!("`{name}` is reserved for schemata")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::Config(format!("duplicate primitive `{name}`")));
            }
        }
        if let Some((name, _)) = functions.iter().find(|(_, a)| *a == 0) {
            return Err(Error::Config(format!("function `{name}` must have arity at least 1")));
        }
        Ok(Self { functions, terminals })
    }

    /// `F = {+, *}` (binary), `T = {x, y}`.
    pub fn arithmetic() -> Self {
        Self::new(
            vec![("+".into(), 2), ("*".into(), 2)],
            vec!["x".into(), "y".into()],
        )
        .expect("valid set")
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    /// `a_m`; 0 when there are no functions.
    pub fn max_arity(&self) -> usize {
        self.functions.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        if self.terminals.iter().any(|t| t == name) {
            return Some(0);
        }
        self.functions.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn symbols_with_arity(&self, arity: usize) -> Vec<&str> {
        if arity == 0 {
            return self.terminals.iter().map(String::as_str).collect();
        }
        self.functions.iter().filter(|(_, a)| *a == arity).map(|(n, _)| n.as_str()).collect()
    }

    /// Every program with at most `max_nodes` nodes, ordered by size and
    /// then by text form.
    pub fn enumerate_programs(&self, max_nodes: usize) -> Vec<Tree> {
        let mut by_size: Vec<Vec<Tree>> = vec![Vec::new(); max_nodes + 1];
        for size in 1..=max_nodes {
            let mut out = Vec::new();
            if size == 1 {
                out.extend(self.terminals.iter().map(|t| Tree::leaf(t)));
            }
            for (name, arity) in &self.functions {
                for split in compositions(size - 1, *arity) {
                    let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
                    for part in split {
                        partial = partial
                            .into_iter()
                            .flat_map(|prefix| {
                                by_size[part].iter().map(move |c| {
                                    let mut next = prefix.clone();
                                    next.push(c.clone());
                                    next
                                })
                            })
                            .collect();
                    }
                    out.extend(partial.into_iter().map(|children| Tree::node(name, children)));
                }
            }
            out.sort_by_cached_key(|t| t.to_string());
            by_size[size] = out;
        }
        by_size.into_iter().flatten().collect()
    }

    /// Random program by the grow (`full = false`) or full method.
    pub fn random_tree<R: Rng + ?Sized>(&self, max_depth: usize, full: bool, rng: &mut R) -> Tree {
        let n_functions = self.functions.len();
        let use_function = if max_depth == 0 || n_functions == 0 {
            false
        } else if full {
            true
        } else {
            rng.gen_range(0..n_functions + self.terminals.len()) < n_functions
        };
        if use_function {
            let (name, arity) = &self.functions[rng.gen_range(0..n_functions)];
            let children = (0..*arity).map(|_| self.random_tree(max_depth - 1, full, rng)).collect();
            Tree::node(name, children)
        } else {
            Tree::leaf(&self.terminals[rng.gen_range(0..self.terminals.len())])
        }
    }

    pub fn validate(&self, tree: &Tree) -> Result<()> {
        match self.arity_of(tree.symbol()) {
            Some(a) if a == tree.arity() => tree.children().iter().try_for_each(|c| self.validate(c)),
            Some(a) => Err(Error::Parse(format!(
                "`{}` has arity {a} but {} children in `{tree}`",
                tree.symbol(),
                tree.arity()
            ))),
            None => Err(Error::Parse(format!("unknown primitive `{}`", tree.symbol()))),
        }
    }
}

/// All ways to write `total` as an ordered sum of `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if total < parts {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Child indices from the root; the empty path is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v.push(j);
        Self(v)
    }

    pub fn parent(&self) -> Option<Self> {
        let mut v = self.0.clone();
        v.pop().map(|_| Self(v))
    }

    /// Whether `self` is `other` or lies below it.
    pub fn starts_with(&self, other: &NodePath) -> bool {
        self.0.starts_with(&other.0)
    }

    pub fn to_coord(&self, max_arity: usize) -> Result<Coord> {
        let mut index: u64 = 0;
        for &j in &self.0 {
            if j >= max_arity.max(1) {
                return Err(Error::IndexOutOfRange { index: j, valid: format!("0..{max_arity}") });
            }
            index = index
                .checked_mul(max_arity.max(1) as u64)
                .and_then(|v| v.checked_add(j as u64))
                .ok_or_else(|| Error::CapExceeded(format!("coordinate of {self} overflows u64")))?;
        }
        Ok(Coord { depth: self.depth(), index })
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for NodePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "root" || s.is_empty() {
            return Ok(Self::root());
        }
        s.split('.')
            .map(|p| p.parse().map_err(|_| Error::Parse(format!("invalid node path `{s}`"))))
            .collect::<Result<_>>()
            .map(Self)
    }
}

/// `(d, i)`: depth and index within the row of an `a_m`-ary grid. Child `j`
/// of `(d, i)` sits at `(d + 1, a_m·i + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub depth: usize,
    pub index: u64,
}

impl Coord {
    pub fn new(depth: usize, index: u64) -> Self {
        Self { depth, index }
    }

    pub fn to_path(self, max_arity: usize) -> Result<NodePath> {
        let a = max_arity.max(1) as u64;
        let mut digits = vec![0usize; self.depth];
        let mut rest = self.index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % a) as usize;
            rest /= a;
        }
        if rest != 0 {
            return Err(Error::Unoccupied(self.to_string()));
        }
        Ok(NodePath(digits))
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.depth, self.index)
    }
}

/// Read access shared by programs and patterns.
pub trait Ranked {
    fn arity(&self) -> usize;
    fn child(&self, j: usize) -> &Self;
}

/// A program tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    symbol: Arc<str>,
    children: Vec<Tree>,
}

impl Ranked for Tree {
    fn arity(&self) -> usize {
        self.children.len()
    }

    fn child(&self, j: usize) -> &Self {
        &self.children[j]
    }
}

/// `N`, `S`, `A` and `F` of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub name: String,
    pub subtree_size: usize,
    pub arity: usize,
    pub is_function: bool,
}

impl Tree {
    pub fn leaf(symbol: &str) -> Self {
        Self { symbol: Arc::from(symbol), children: Vec::new() }
    }

    pub fn node(symbol: &str, children: Vec<Tree>) -> Self {
        Self { symbol: Arc::from(symbol), children }
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    pub fn is_function(&self) -> bool {
        !self.children.is_empty()
    }

    /// `S(h)`: number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// Depth of the deepest node; a single leaf has depth 0.
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    pub fn shape(&self) -> Shape {
        let mut arities = Vec::with_capacity(self.size());
        fn walk(t: &Tree, out: &mut Vec<usize>) {
            out.push(t.arity());
            t.children.iter().for_each(|c| walk(c, out));
        }
        walk(self, &mut arities);
        Shape(arities)
    }

    pub fn subtree(&self, path: &NodePath) -> Option<&Tree> {
        path.0.iter().try_fold(self, |t, &j| t.children.get(j))
    }

    /// Every node path in preorder.
    pub fn paths(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        fn walk(t: &Tree, here: NodePath, out: &mut Vec<NodePath>) {
            out.push(here.clone());
            for (j, c) in t.children.iter().enumerate() {
                walk(c, here.child(j), out);
            }
        }
        walk(self, NodePath::root(), &mut out);
        out
    }

    /// Symbols in preorder.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out = vec![self.symbol()];
        for c in &self.children {
            out.extend(c.symbols());
        }
        out
    }

    /// A copy with the subtree at `path` replaced by `replacement`.
    pub fn replace(&self, path: &NodePath, replacement: Tree) -> Result<Tree> {
        fn go(t: &Tree, rest: &[usize], replacement: Tree) -> Option<Tree> {
            match rest.split_first() {
                None => Some(replacement),
                Some((&j, tail)) => {
                    let child = t.children.get(j)?;
                    let mut next = t.clone();
                    next.children[j] = go(child, tail, replacement)?;
                    Some(next)
                }
            }
        }
        go(self, &path.0, replacement).ok_or_else(|| Error::Unoccupied(path.to_string()))
    }

    /// A copy with the symbol at `path` renamed, keeping its children.
    pub fn relabel(&self, path: &NodePath, symbol: &str) -> Result<Tree> {
        let node = self.subtree(path).ok_or_else(|| Error::Unoccupied(path.to_string()))?;
        self.replace(path, Tree::node(symbol, node.children.clone()))
    }

    pub fn node_info(&self, coord: Coord, max_arity: usize) -> Result<NodeInfo> {
        let path = coord.to_path(max_arity)?;
        let node = self.subtree(&path).ok_or_else(|| Error::Unoccupied(coord.to_string()))?;
        Ok(NodeInfo {
            name: node.symbol().to_string(),
            subtree_size: node.size(),
            arity: node.arity(),
            is_function: node.is_function(),
        })
    }

    /// Grid coordinates of every node, in preorder.
    pub fn coords(&self, max_arity: usize) -> Result<Vec<Coord>> {
        self.paths().iter().map(|p| p.to_coord(max_arity)).collect()
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return f.write_str(&self.symbol);
        }
        write!(f, "({}", self.symbol)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let expr = parse_sexpr(s)?;
        fn build(e: &SExpr) -> Result<Tree> {
            if matches!(e.head.as_str(), "=" | "#") {
                return Err(Error::Parse(format!("`{}` is only valid in schemata", e.head)));
            }
            Ok(Tree::node(&e.head, e.children.iter().map(build).collect::<Result<_>>()?))
        }
        build(&expr)
    }
}

/// Parsed prefix expression shared by programs and patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SExpr {
    pub head: String,
    pub children: Vec<SExpr>,
}

pub(crate) fn parse_sexpr(text: &str) -> Result<SExpr> {
    let tokens: Vec<String> = text
        .replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let bad = |msg: &str| Error::Parse(format!("{msg} in `{}`", text.trim()));
    fn parse(tokens: &[String], pos: &mut usize, bad: &dyn Fn(&str) -> Error) -> Result<SExpr> {
        let tok = tokens.get(*pos).ok_or_else(|| bad("unexpected end"))?;
        *pos += 1;
        match tok.as_str() {
            "(" => {
                let head = tokens.get(*pos).ok_or_else(|| bad("unexpected end"))?.clone();
                if head == "(" || head == ")" {
                    return Err(bad("expected a symbol after `(`"));
                }
                *pos += 1;
                let mut children = Vec::new();
                loop {
                    match tokens.get(*pos).map(String::as_str) {
                        Some(")") => {
                            *pos += 1;
                            return Ok(SExpr { head, children });
                        }
                        Some(_) => children.push(parse(tokens, pos, bad)?),
                        None => return Err(bad("missing `)`")),
                    }
                }
            }
            ")" => Err(bad("unexpected `)`")),
            atom => Ok(SExpr { head: atom.to_string(), children: Vec::new() }),
        }
    }
    let mut pos = 0;
    let expr = parse(&tokens, &mut pos, &bad)?;
    if pos != tokens.len() {
        return Err(bad("trailing input"));
    }
    Ok(expr)
}

/// A tree shape as its preorder arity sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape(pub Vec<usize>);

impl Shape {
    pub fn size(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(arities: &[usize], pos: &mut usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let a = arities[*pos];
            *pos += 1;
            if a == 0 {
                return f.write_str("=");
            }
            f.write_str("(=")?;
            for _ in 0..a {
                f.write_str(" ")?;
                go(arities, pos, f)?;
            }
            f.write_str(")")
        }
        go(&self.0, &mut 0, f)
    }
}

/// The root-anchored region where two trees have matching arities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonRegion {
    nodes: Vec<NodePath>,
}

impl CommonRegion {
    /// Preorder list of region nodes, root first.
    pub fn nodes(&self) -> &[NodePath] {
        &self.nodes
    }

    /// Region nodes other than the root; each names the link to its parent.
    pub fn links(&self) -> &[NodePath] {
        &self.nodes[1..]
    }

    /// `NC(h1, h2)`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, path: &NodePath) -> bool {
        self.nodes.binary_search_by(|p| preorder_cmp(p, path)).is_ok()
    }

    pub fn coords(&self, max_arity: usize) -> Result<Vec<Coord>> {
        self.nodes.iter().map(|p| p.to_coord(max_arity)).collect()
    }
}

/// Preorder on paths is lexicographic order on child-index sequences.
fn preorder_cmp(a: &NodePath, b: &NodePath) -> std::cmp::Ordering {
    a.0.cmp(&b.0)
}

/// Root, plus every child of a region node whose arity agrees in both trees.
pub fn common_region<A: Ranked, B: Ranked>(t1: &A, t2: &B) -> CommonRegion {
    let mut nodes = Vec::new();
    fn walk<A: Ranked, B: Ranked>(a: &A, b: &B, here: NodePath, out: &mut Vec<NodePath>) {
        out.push(here.clone());
        if a.arity() == b.arity() {
            for j in 0..a.arity() {
                walk(a.child(j), b.child(j), here.child(j), out);
            }
        }
    }
    walk(t1, t2, NodePath::root(), &mut nodes);
    CommonRegion { nodes }
}

/// Which common-region nodes one-point crossover may pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointPolicy {
    /// Non-root region nodes. A pair with no links yields a copy of the
    /// first parent.
    #[default]
    Links,
    /// Every region node; picking the root yields the second parent.
    AllNodes,
}

impl PointPolicy {
    pub fn points<'a>(&self, region: &'a CommonRegion) -> &'a [NodePath] {
        match self {
            PointPolicy::Links => region.links(),
            PointPolicy::AllNodes => region.nodes(),
        }
    }
}

/// `t1` with the subtree at `point` replaced by `t2`'s subtree at `point`.
pub fn one_point_crossover_gp(t1: &Tree, t2: &Tree, point: &NodePath) -> Result<Tree> {
    if !common_region(t1, t2).contains(point) {
        return Err(Error::NotInCommonRegion(point.to_string()));
    }
    let donor = t2.subtree(point).expect("region nodes exist in both trees").clone();
    t1.replace(point, donor)
}

/// A labelling of a set of region nodes; `true` takes the first parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GpMask {
    nodes: Vec<NodePath>,
    bits: Vec<bool>,
}

impl GpMask {
    /// `nodes` must be in preorder, as returned by [`CommonRegion::nodes`]
    /// or [`Tree::paths`].
    pub fn new(nodes: Vec<NodePath>, bits: Vec<bool>) -> Result<Self> {
        if nodes.len() != bits.len() {
            return Err(Error::MaskMismatch(format!("{} nodes but {} bits", nodes.len(), bits.len())));
        }
        Ok(Self { nodes, bits })
    }

    pub fn constant(nodes: &[NodePath], value: bool) -> Self {
        Self { nodes: nodes.to_vec(), bits: vec![value; nodes.len()] }
    }

    pub fn from_fn(nodes: &[NodePath], f: impl Fn(&NodePath) -> bool) -> Self {
        Self { nodes: nodes.to_vec(), bits: nodes.iter().map(f).collect() }
    }

    /// The mask reproducing one-point crossover at `point`: 0 on the
    /// subtree at `point`, 1 elsewhere.
    pub fn one_point(nodes: &[NodePath], point: &NodePath) -> Self {
        Self::from_fn(nodes, |p| !p.starts_with(point))
    }

    /// All `2^len` masks over `nodes`, in binary counting order.
    pub fn enumerate(nodes: &[NodePath]) -> impl Iterator<Item = GpMask> + '_ {
        let len = nodes.len();
        (0u64..1 << len).map(move |code| Self {
            nodes: nodes.to_vec(),
            bits: (0..len).map(|j| (code >> j) & 1 == 1).collect(),
        })
    }

    pub fn nodes(&self) -> &[NodePath] {
        &self.nodes
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, path: &NodePath) -> Option<bool> {
        self.nodes.binary_search_by(|p| preorder_cmp(p, path)).ok().map(|i| self.bits[i])
    }

    pub fn complement(&self) -> Self {
        Self { nodes: self.nodes.clone(), bits: self.bits.iter().map(|b| !b).collect() }
    }
}

/// Homologous uniform crossover: each region node comes from the parent
/// chosen by `mask`; a region node whose arities differ brings its whole
/// subtree from that parent.
pub fn uniform_crossover_gp(t1: &Tree, t2: &Tree, mask: &GpMask) -> Result<Tree> {
    let region = common_region(t1, t2);
    if region.nodes() != mask.nodes() {
        return Err(Error::MaskMismatch(format!(
            "mask covers {} nodes, common region has {}",
            mask.nodes().len(),
            region.len()
        )));
    }
    let mut bits = mask.bits().iter();
    fn build<'a>(a: &Tree, b: &Tree, bits: &mut impl Iterator<Item = &'a bool>) -> Tree {
        let first = *bits.next().expect("mask matches region");
        let source = if first { a } else { b };
        if a.arity() != b.arity() {
            return source.clone();
        }
        let children = a.children.iter().zip(&b.children).map(|(x, y)| build(x, y, bits)).collect();
        Tree { symbol: source.symbol.clone(), children }
    }
    Ok(build(t1, t2, &mut bits))
}

/// Each node, with probability `p_m`, becomes a uniformly chosen different
/// symbol of the same arity (unchanged when there is none).
pub fn point_mutation_gp<R: Rng + ?Sized>(t: &Tree, p_m: f64, set: &PrimitiveSet, rng: &mut R) -> Tree {
    if p_m <= 0.0 {
        return t.clone();
    }
    let children = t.children.iter().map(|c| point_mutation_gp(c, p_m, set, rng)).collect();
    let mut symbol = t.symbol.clone();
    if rng.gen::<f64>() < p_m {
        let alternatives: Vec<&str> =
            set.symbols_with_arity(t.arity()).into_iter().filter(|s| *s != t.symbol()).collect();
        if !alternatives.is_empty() {
            symbol = Arc::from(alternatives[rng.gen_range(0..alternatives.len())]);
        }
    }
    Tree { symbol, children }
}

/// GP fitness catalog. Values must be strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GpFitness {
    Flat { value: Rational },
    /// `S(h)`.
    Size,
    /// `1 +` number of common-region nodes carrying the target's symbol.
    TargetMatch { target: Tree },
    /// `1 / (1 + Σ |h(x, y) − target|)` over integer cases. Programs may use
    /// `+`, `-`, `*`, the variables `x`, `y` and integer literals.
    Regression { cases: Vec<(i64, i64, i64)> },
    /// Explicit values; programs missing from the table score `default`.
    Table { entries: Vec<(Tree, Rational)>, default: Rational },
}

impl GpFitness {
    pub fn flat() -> Self {
        Self::Flat { value: Rational::one() }
    }

    /// Regression onto `x·x + y` over `x, y ∈ {-2..=2}`.
    pub fn quadratic_regression() -> Self {
        let cases = (-2..=2).flat_map(|x| (-2..=2).map(move |y| (x, y, x * x + y))).collect();
        Self::Regression { cases }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Flat { .. } => "flat",
            Self::Size => "size",
            Self::TargetMatch { .. } => "target-match",
            Self::Regression { .. } => "regression",
            Self::Table { .. } => "table",
        }
    }

    pub fn evaluate(&self, t: &Tree) -> Result<Rational> {
        let value = match self {
            Self::Flat { value } => value.clone(),
            Self::Size => from_usize(t.size()),
            Self::TargetMatch { target } => {
                let hits = common_region(t, target)
                    .nodes()
                    .iter()
                    .filter(|p| t.subtree(p).map(Tree::symbol) == target.subtree(p).map(Tree::symbol))
                    .count();
                from_usize(1 + hits)
            }
            Self::Regression { cases } => {
                let mut error: i128 = 0;
                for &(x, y, target) in cases {
                    error += (eval_integer(t, x, y)? as i128 - target as i128).abs();
                }
                Rational::new(1.into(), (1 + error).into())
            }
            Self::Table { entries, default } => entries
                .iter()
                .find(|(p, _)| p == t)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| default.clone()),
        };
        if !value.is_positive() {
            return Err(Error::NonPositiveFitness(value.to_string()));
        }
        Ok(value)
    }
}

fn eval_integer(t: &Tree, x: i64, y: i64) -> Result<i64> {
    let args = t.children.iter().map(|c| eval_integer(c, x, y)).collect::<Result<Vec<_>>>()?;
    let fold = |op: fn(i64, i64) -> i64| args.iter().copied().reduce(op).unwrap_or(0);
    Ok(match (t.symbol(), args.len()) {
        ("x", 0) => x,
        ("y", 0) => y,
        ("+", _) => fold(i64::wrapping_add),
        ("*", _) => fold(i64::wrapping_mul),
        ("-", 1) => args[0].wrapping_neg(),
        ("-", _) => fold(i64::wrapping_sub),
        (lit, 0) => lit
            .parse()
            .map_err(|_| Error::Unsupported(format!("regression cannot evaluate `{lit}`")))?,
        (other, _) => return Err(Error::Unsupported(format!("regression cannot evaluate `{other}`"))),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpConfig {
    pub n: usize,
    pub p_c: Rational,
    pub p_m: Rational,
    pub points: PointPolicy,
    pub selection: Selection,
    pub seed: u64,
}

impl GpConfig {
    /// Proportional selection, crossover at links.
    pub fn new(n: usize, p_c: Rational, p_m: Rational, seed: u64) -> Self {
        Self { n, p_c, p_m, points: PointPolicy::Links, selection: Selection::Proportional, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("population size must be at least 1".into()));
        }
        for (name, p) in [("p_c", &self.p_c), ("p_m", &self.p_m)] {
            if !is_probability(p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        self.selection.validate(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpPopulation {
    members: Vec<Tree>,
    generation: u64,
}

impl GpPopulation {
    pub fn new(members: Vec<Tree>) -> Result<Self> {
        Self::at_generation(members, 0)
    }

    pub fn at_generation(members: Vec<Tree>, generation: u64) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Config("population must not be empty".into()));
        }
        Ok(Self { members, generation })
    }

    pub fn parse(programs: &[&str]) -> Result<Self> {
        Self::new(programs.iter().map(|p| p.parse()).collect::<Result<_>>()?)
    }

    /// Ramped half-and-half over depths `1..=max_depth`.
    pub fn ramped(set: &PrimitiveSet, n: usize, max_depth: usize, seed: u64) -> Result<Self> {
        let mut rng = substream(seed, &[u64::MAX]);
        let members = (0..n)
            .map(|i| {
                let depth = 1 + (i / 2) % max_depth.max(1);
                set.random_tree(depth.min(max_depth), i % 2 == 0, &mut rng)
            })
            .collect();
        Self::new(members)
    }

    pub fn members(&self) -> &[Tree] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn fitness_values(&self, f: &GpFitness) -> Result<Vec<Rational>> {
        self.members.iter().map(|m| f.evaluate(m)).collect()
    }

    pub fn mean_fitness(&self, f: &GpFitness) -> Result<Rational> {
        let total: Rational = self.fitness_values(f)?.into_iter().sum();
        Ok(total / from_usize(self.size()))
    }

    /// `μ(t)`: mean program size.
    pub fn mean_size(&self) -> Rational {
        Rational::new(self.members.iter().map(Tree::size).sum::<usize>().into(), self.size().into())
    }

    pub fn distinct_shapes(&self) -> usize {
        self.members.iter().map(Tree::shape).collect::<BTreeSet<_>>().len()
    }
}

/// What produced one offspring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Offspring {
    pub child: Tree,
    /// Index of the parent the child was copied from or grafted onto.
    pub first_parent: usize,
    /// Crossover point, when crossover happened.
    pub point: Option<NodePath>,
}

#[derive(Debug, Clone)]
pub struct GpBreeder<'a> {
    pop: &'a GpPopulation,
    set: &'a PrimitiveSet,
    selector: Selector,
    p_c: f64,
    p_m: f64,
    points: PointPolicy,
}

impl<'a> GpBreeder<'a> {
    pub fn new(pop: &'a GpPopulation, set: &'a PrimitiveSet, f: &GpFitness, cfg: &GpConfig) -> Result<Self> {
        cfg.validate()?;
        if pop.size() != cfg.n {
            return Err(Error::Config(format!("population has {} members but n = {}", pop.size(), cfg.n)));
        }
        pop.members.iter().try_for_each(|m| set.validate(m))?;
        Ok(Self {
            pop,
            set,
            selector: Selector::new(&pop.fitness_values(f)?, &cfg.selection)?,
            p_c: to_f64(&cfg.p_c),
            p_m: to_f64(&cfg.p_m),
            points: cfg.points,
        })
    }

    pub fn offspring<R: Rng + ?Sized>(&self, rng: &mut R) -> Offspring {
        let members = &self.pop.members;
        let first_parent = self.selector.pick(rng);
        let first = &members[first_parent];
        let mut point = None;
        let child = if rng.gen::<f64>() < self.p_c {
            let second = &members[self.selector.pick(rng)];
            let region = common_region(first, second);
            let candidates = self.points.points(&region);
            if candidates.is_empty() {
                first.clone()
            } else {
                let chosen = candidates[rng.gen_range(0..candidates.len())].clone();
                let child = one_point_crossover_gp(first, second, &chosen).expect("point from region");
                point = Some(chosen);
                child
            }
        } else {
            first.clone()
        };
        Offspring { child: point_mutation_gp(&child, self.p_m, self.set, rng), first_parent, point }
    }

    pub fn offspring_for(&self, seed: u64, index: usize) -> Offspring {
        let mut rng: StreamRng = substream(seed, &[self.pop.generation, index as u64]);
        self.offspring(&mut rng)
    }

    pub fn next_generation(&self, seed: u64) -> (GpPopulation, Vec<Offspring>) {
        let events: Vec<Offspring> = (0..self.pop.size()).map(|i| self.offspring_for(seed, i)).collect();
        let members = events.iter().map(|e| e.child.clone()).collect();
        (GpPopulation { members, generation: self.pop.generation + 1 }, events)
    }
}

pub fn next_generation_gp(
    pop: &GpPopulation,
    set: &PrimitiveSet,
    f: &GpFitness,
    cfg: &GpConfig,
) -> Result<GpPopulation> {
    Ok(GpBreeder::new(pop, set, f, cfg)?.next_generation(cfg.seed).0)
}

/// Per-generation record of a GP run.
#[derive(Debug, Clone, PartialEq)]
pub struct GpGenerationStats {
    pub generation: u64,
    pub mean_size: f64,
    pub mean_fitness: f64,
    pub distinct_shapes: usize,
    /// Fraction of crossover events whose child left the shape of its first
    /// parent; `None` when no crossover happened.
    pub disruption: Option<f64>,
}

/// Runs `generations` steps and reports one row per produced generation.
pub fn run_gp(
    initial: &GpPopulation,
    set: &PrimitiveSet,
    f: &GpFitness,
    cfg: &GpConfig,
    generations: usize,
) -> Result<(GpPopulation, Vec<GpGenerationStats>)> {
    let mut pop = initial.clone();
    let mut stats = Vec::with_capacity(generations);
    for _ in 0..generations {
        let breeder = GpBreeder::new(&pop, set, f, cfg)?;
        let (next, events) = breeder.next_generation(cfg.seed);
        let crossed: Vec<&Offspring> = events.iter().filter(|e| e.point.is_some()).collect();
        let disrupted = crossed
            .iter()
            .filter(|e| e.child.shape() != pop.members[e.first_parent].shape())
            .count();
        let disruption = (!crossed.is_empty()).then(|| disrupted as f64 / crossed.len() as f64);
        stats.push(GpGenerationStats {
            generation: next.generation,
            mean_size: to_f64(&next.mean_size()),
            mean_fitness: to_f64(&next.mean_fitness(f)?),
            distinct_shapes: next.distinct_shapes(),
            disruption,
        });
        pop = next;
    }
    Ok((pop, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use std::collections::BTreeMap;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["x", "(+ x y)", "(* (+ x x) y)", "(+ a (· b b))"] {
            assert_eq!(t(s).to_string(), s);
        }
        assert_eq!(t("(x)"), t("x"));
        assert!("(+ x".parse::<Tree>().is_err());
        assert!("(+ x) y".parse::<Tree>().is_err());
        assert!("(+ = x)".parse::<Tree>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        let programs = PrimitiveSet::arithmetic().enumerate_programs(7);
        assert_eq!(programs.len(), 714);
        assert_eq!(programs.iter().collect::<BTreeSet<_>>().len(), 714);
        assert!(programs.iter().all(|p| PrimitiveSet::arithmetic().validate(p).is_ok()));
    }

    #[test]
    fn coordinates() {
        let tree = t("(+ a (* b c))");
        assert_eq!(
            tree.node_info(Coord::new(0, 0), 2).unwrap(),
            NodeInfo { name: "+".into(), subtree_size: 5, arity: 2, is_function: true }
        );
        assert_eq!(
            tree.node_info(Coord::new(1, 0), 2).unwrap(),
            NodeInfo { name: "a".into(), subtree_size: 1, arity: 0, is_function: false }
        );
        assert_eq!(tree.node_info(Coord::new(2, 3), 2).unwrap().name, "c");
        assert!(matches!(tree.node_info(Coord::new(2, 0), 2), Err(Error::Unoccupied(_))));
        for p in tree.paths() {
            assert_eq!(p.to_coord(2).unwrap().to_path(2).unwrap(), p);
        }
        let chain = t("(neg (neg x))");
        assert_eq!(chain.coords(1).unwrap(), vec![Coord::new(0, 0), Coord::new(1, 0), Coord::new(2, 0)]);
    }

    #[test]
    fn common_region_examples() {
        let a = t("(+ a b)");
        let b = t("(· (· a a) b)");
        let region = common_region(&a, &b);
        assert_eq!(region.len(), 3);
        assert_eq!(region.coords(2).unwrap(), vec![Coord::new(0, 0), Coord::new(1, 0), Coord::new(1, 1)]);
        assert_eq!(common_region(&t("x"), &t("y")).len(), 1);
        let big = t("(+ (* x y) (+ y (* x x)))");
        assert_eq!(common_region(&big, &big).len(), big.size());
    }

    #[test]
    fn one_point_examples() {
        let a = t("(+ a b)");
        let b = t("(· c d)");
        assert_eq!(one_point_crossover_gp(&a, &b, &"1".parse().unwrap()).unwrap(), t("(+ a d)"));
        assert_eq!(one_point_crossover_gp(&a, &b, &NodePath::root()).unwrap(), b);
        let deep = t("(+ (* x y) z)");
        assert!(matches!(
            one_point_crossover_gp(&a, &deep, &"0.0".parse().unwrap()),
            Err(Error::NotInCommonRegion(_))
        ));
        let same = t("(+ x (* y y))");
        let other = t("(* z (* y y))");
        assert_eq!(one_point_crossover_gp(&same, &other, &"1".parse().unwrap()).unwrap(), same);
    }

    #[test]
    fn uniform_examples() {
        let a = t("(+ x (* y y))");
        let b = t("(* (+ x x) y)");
        let region = common_region(&a, &b);
        assert_eq!(uniform_crossover_gp(&a, &b, &GpMask::constant(region.nodes(), true)).unwrap(), a);
        assert_eq!(uniform_crossover_gp(&a, &b, &GpMask::constant(region.nodes(), false)).unwrap(), b);
        for mask in GpMask::enumerate(region.nodes()) {
            let child = uniform_crossover_gp(&a, &b, &mask).unwrap();
            assert_eq!(child, uniform_crossover_gp(&b, &a, &mask.complement()).unwrap());
            assert_eq!(uniform_crossover_gp(&a, &a, &GpMask::constant(a.paths().as_slice(), mask.bits()[0])).unwrap(), a);
        }
        let wrong = GpMask::constant(&a.paths(), true);
        assert!(matches!(uniform_crossover_gp(&a, &b, &wrong), Err(Error::MaskMismatch(_))));
    }

    #[test]
    fn point_mutation_keeps_shape() {
        let set = PrimitiveSet::arithmetic();
        let mut rng = substream(5, &[]);
        let tree = t("(+ x (* y (+ x y)))");
        assert_eq!(point_mutation_gp(&tree, 0.0, &set, &mut rng), tree);
        let mut changed = 0;
        for _ in 0..10_000 {
            let m = point_mutation_gp(&tree, 0.3, &set, &mut rng);
            assert_eq!(m.shape(), tree.shape());
            changed += (m != tree) as usize;
        }
        assert!(changed > 0);
        let single = PrimitiveSet::new(vec![("+".into(), 2)], vec!["x".into()]).unwrap();
        assert_eq!(point_mutation_gp(&t("(+ x x)"), 1.0, &single, &mut rng), t("(+ x x)"));
    }

    #[test]
    fn fitness_catalog() {
        assert_eq!(GpFitness::Size.evaluate(&t("(+ x y)")).unwrap(), int(3));
        let quad = GpFitness::quadratic_regression();
        assert_eq!(quad.evaluate(&t("(+ (* x x) y)")).unwrap(), int(1));
        assert!(quad.evaluate(&t("x")).unwrap() < int(1));
        let inert = GpFitness::Regression { cases: vec![(1, 2, 1), (3, 4, 3)] };
        assert_eq!(inert.evaluate(&t("(+ x (* 0 (+ x y)))")).unwrap(), int(1));
        let target = GpFitness::TargetMatch { target: t("(+ x y)") };
        assert_eq!(target.evaluate(&t("(+ x x)")).unwrap(), int(3));
        let table = GpFitness::Table { entries: vec![(t("x"), int(5))], default: ratio(1, 2) };
        assert_eq!(table.evaluate(&t("x")).unwrap(), int(5));
        assert_eq!(table.evaluate(&t("y")).unwrap(), ratio(1, 2));
    }

    #[test]
    fn generation_is_deterministic() {
        let set = PrimitiveSet::arithmetic();
        let pop = GpPopulation::ramped(&set, 20, 3, 1).unwrap();
        let cfg = GpConfig::new(20, ratio(9, 10), ratio(1, 100), 3);
        let f = GpFitness::quadratic_regression();
        let a = next_generation_gp(&pop, &set, &f, &cfg).unwrap();
        let b = next_generation_gp(&pop, &set, &f, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.generation(), 1);
    }

    #[test]
    fn one_point_frequencies_match_link_count() {
        // (+ x y) × (* y x): three region nodes, two links, each link equally likely.
        let set = PrimitiveSet::arithmetic();
        let pop = GpPopulation::parse(&["(+ x y)", "(* y x)"]).unwrap();
        let cfg = GpConfig::new(2, int(1), int(0), 0);
        let breeder = GpBreeder::new(&pop, &set, &GpFitness::flat(), &cfg).unwrap();
        let mut counts: BTreeMap<Tree, usize> = BTreeMap::new();
        let trials = 40_000;
        for i in 0..trials {
            *counts.entry(breeder.offspring_for(11, i).child).or_default() += 1;
        }
        // Same-parent pairs give the parent back; mixed pairs swap one leaf.
        let expect = |s: &str| match s {
            "(+ x y)" | "(* y x)" => 0.25,
            _ => 0.125,
        };
        assert_eq!(counts.len(), 6);
        for (tree, c) in counts {
            let p = expect(&tree.to_string());
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((c as f64 / trials as f64 - p).abs() < 4.0 * se, "{tree}");
        }
    }
}
