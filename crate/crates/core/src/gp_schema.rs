//! Fixed-size-and-shape GP schemata and hyperschemata.
//!
//! A pattern node is a named primitive, `=` (any one node of the same
//! arity) or, in hyperschemata, a `#` leaf (any whole subtree).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gp::{parse_sexpr, GpMask, NodePath, Ranked, SExpr, Shape, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternSymbol {
    Named(Arc<str>),
    /// `=`
    AnyNode,
    /// `#`
    AnySubtree,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    symbol: PatternSymbol,
    children: Vec<Pattern>,
}

impl Ranked for Pattern {
    fn arity(&self) -> usize {
        self.children.len()
    }

    fn child(&self, j: usize) -> &Self {
        &self.children[j]
    }
}

impl Pattern {
    fn named(name: &str, children: Vec<Pattern>) -> Self {
        Self { symbol: PatternSymbol::Named(Arc::from(name)), children }
    }

    fn any_node(children: Vec<Pattern>) -> Self {
        Self { symbol: PatternSymbol::AnyNode, children }
    }

    fn any_subtree() -> Self {
        Self { symbol: PatternSymbol::AnySubtree, children: Vec::new() }
    }

    pub fn from_tree(t: &Tree) -> Self {
        Self::named(t.symbol(), t.children().iter().map(Self::from_tree).collect())
    }

    pub fn symbol(&self) -> &PatternSymbol {
        &self.symbol
    }

    pub fn children(&self) -> &[Pattern] {
        &self.children
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Pattern::size).sum::<usize>()
    }

    pub fn has_subtree_wildcard(&self) -> bool {
        self.symbol == PatternSymbol::AnySubtree || self.children.iter().any(Pattern::has_subtree_wildcard)
    }

    pub fn matches(&self, t: &Tree) -> bool {
        match &self.symbol {
            PatternSymbol::AnySubtree => true,
            PatternSymbol::AnyNode => self.children_match(t),
            PatternSymbol::Named(name) => **name == *t.symbol() && self.children_match(t),
        }
    }

    fn children_match(&self, t: &Tree) -> bool {
        self.children.len() == t.arity() && self.children.iter().zip(t.children()).all(|(p, c)| p.matches(c))
    }

    pub fn subpattern(&self, path: &NodePath) -> Option<&Pattern> {
        path.0.iter().try_fold(self, |p, &j| p.children.get(j))
    }

    /// Every node path in preorder.
    pub fn paths(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        fn walk(p: &Pattern, here: NodePath, out: &mut Vec<NodePath>) {
            out.push(here.clone());
            for (j, c) in p.children.iter().enumerate() {
                walk(c, here.child(j), out);
            }
        }
        walk(self, NodePath::root(), &mut out);
        out
    }

    /// Rebuilds the pattern, letting `f` rewrite each node given its path.
    /// `f` returns `None` to keep a node or a replacement pattern to
    /// substitute the whole subtree.
    fn rewrite(&self, f: &dyn Fn(&NodePath, &Pattern) -> Option<Pattern>) -> Pattern {
        fn go(p: &Pattern, here: NodePath, f: &dyn Fn(&NodePath, &Pattern) -> Option<Pattern>) -> Pattern {
            if let Some(r) = f(&here, p) {
                return r;
            }
            Pattern {
                symbol: p.symbol.clone(),
                children: p.children.iter().enumerate().map(|(j, c)| go(c, here.child(j), f)).collect(),
            }
        }
        go(self, NodePath::root(), f)
    }

    fn relabel_nodes(&self, f: &dyn Fn(&NodePath) -> bool) -> Pattern {
        fn go(p: &Pattern, here: NodePath, f: &dyn Fn(&NodePath) -> bool) -> Pattern {
            let symbol = if f(&here) && p.symbol != PatternSymbol::AnySubtree {
                PatternSymbol::AnyNode
            } else {
                p.symbol.clone()
            };
            Pattern { symbol, children: p.children.iter().enumerate().map(|(j, c)| go(c, here.child(j), f)).collect() }
        }
        go(self, NodePath::root(), f)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match &self.symbol {
            PatternSymbol::Named(n) => n.as_ref(),
            PatternSymbol::AnyNode => "=",
            PatternSymbol::AnySubtree => "#",
        };
        if self.children.is_empty() {
            return f.write_str(head);
        }
        write!(f, "({head}")?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        fn build(e: &SExpr) -> Result<Pattern> {
            let children = e.children.iter().map(build).collect::<Result<Vec<_>>>()?;
            Ok(match e.head.as_str() {
                "#" if !children.is_empty() => {
                    return Err(Error::Parse("`#` may only appear as a leaf".into()));
                }
                "#" => Pattern::any_subtree(),
                "=" => Pattern::any_node(children),
                name => Pattern::named(name, children),
            })
        }
        build(&parse_sexpr(s)?)
    }
}

/// A hyperschema: a pattern that may contain `#` leaves.
pub type GpHyperschema = Pattern;

/// A fixed-size-and-shape schema: a pattern without `#`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GpSchema(Pattern);

impl GpSchema {
    pub fn new(pattern: Pattern) -> Result<Self> {
        if pattern.has_subtree_wildcard() {
            return Err(Error::Parse(format!("`#` is not allowed in a fixed-shape schema: {pattern}")));
        }
        Ok(Self(pattern))
    }

    /// The schema matched only by `t`.
    pub fn from_tree(t: &Tree) -> Self {
        Self(Pattern::from_tree(t))
    }

    /// The schema of `t` with the nodes picked by `wildcard` (visited in
    /// preorder) turned to `=`.
    pub fn from_tree_with(t: &Tree, mut wildcard: impl FnMut(&NodePath) -> bool) -> Self {
        fn go(t: &Tree, here: NodePath, wildcard: &mut dyn FnMut(&NodePath) -> bool) -> Pattern {
            let any = wildcard(&here);
            let children = t.children().iter().enumerate().map(|(j, c)| go(c, here.child(j), wildcard)).collect();
            if any {
                Pattern::any_node(children)
            } else {
                Pattern::named(t.symbol(), children)
            }
        }
        Self(go(t, NodePath::root(), &mut wildcard))
    }

    /// `G` of a shape: all nodes `=`.
    pub fn from_shape(shape: &Shape) -> Self {
        fn go(arities: &[usize], pos: &mut usize) -> Pattern {
            let a = arities[*pos];
            *pos += 1;
            Pattern::any_node((0..a).map(|_| go(arities, pos)).collect())
        }
        Self(go(&shape.0, &mut 0))
    }

    pub fn pattern(&self) -> &Pattern {
        &self.0
    }

    pub fn matches(&self, t: &Tree) -> bool {
        self.0.matches(t)
    }

    /// `o(H)`: number of non-`=` nodes.
    pub fn order(&self) -> usize {
        fn go(p: &Pattern) -> usize {
            (p.symbol != PatternSymbol::AnyNode) as usize + p.children.iter().map(go).sum::<usize>()
        }
        go(&self.0)
    }

    /// `N(H)`: number of nodes.
    pub fn length(&self) -> usize {
        self.0.size()
    }

    /// Links of the smallest connected fragment holding every fixed node.
    pub fn defining_length(&self) -> usize {
        let total = self.order();
        // (fixed nodes in subtree, links counted)
        fn go(p: &Pattern, is_root: bool, total: usize, links: &mut usize) -> usize {
            let own = (p.symbol != PatternSymbol::AnyNode) as usize;
            let below: usize = own + p.children.iter().map(|c| go(c, false, total, links)).sum::<usize>();
            if !is_root && below > 0 && below < total {
                *links += 1;
            }
            below
        }
        let mut links = 0;
        go(&self.0, true, total, &mut links);
        links
    }

    /// `G(H)`.
    pub fn shape_schema(&self) -> GpSchema {
        GpSchema(self.0.relabel_nodes(&|_| true))
    }

    pub fn shape(&self) -> Shape {
        let mut out = Vec::new();
        fn go(p: &Pattern, out: &mut Vec<usize>) {
            out.push(p.children.len());
            p.children.iter().for_each(|c| go(c, out));
        }
        go(&self.0, &mut out);
        Shape(out)
    }

    pub fn paths(&self) -> Vec<NodePath> {
        self.0.paths()
    }
}

impl fmt::Display for GpSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for GpSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

/// `(order, length, defining length, G(H))`.
pub fn gp_schema_metrics(h: &GpSchema) -> (usize, usize, usize, GpSchema) {
    (h.order(), h.length(), h.defining_length(), h.shape_schema())
}

/// Three readings of the lower building block `L(H, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowerBlockReading {
    /// Nodes strictly above `i` on its root path become `=`; everything
    /// else is kept.
    Literal,
    /// Every node outside the subtree at `i` becomes `=` (same as `l`).
    LStyle,
    /// Nodes above `i` become `=`, subtrees hanging off that path become
    /// `#`, the subtree at `i` is kept.
    #[default]
    SubtreeWildcard,
}

impl LowerBlockReading {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Literal => "literal",
            Self::LStyle => "l-style",
            Self::SubtreeWildcard => "subtree-wildcard",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildingBlocks {
    /// `u(H,i)`: the subtree at `i` (including `i`) turned to `=`.
    pub u: GpSchema,
    /// `l(H,i)`: every node outside the subtree at `i` turned to `=`.
    pub l: GpSchema,
    /// `U(H,i)`: the subtree at `i` replaced by a `#` leaf.
    pub upper: GpHyperschema,
    /// `L(H,i)` under the requested reading.
    pub lower: GpHyperschema,
}

pub fn building_blocks(h: &GpSchema, point: &NodePath, reading: LowerBlockReading) -> Result<BuildingBlocks> {
    if h.0.subpattern(point).is_none() {
        return Err(Error::Unoccupied(point.to_string()));
    }
    let inside = |p: &NodePath| p.starts_with(point);
    let above = |p: &NodePath| point.starts_with(p) && p != point;
    let u = GpSchema(h.0.relabel_nodes(&inside));
    let l = GpSchema(h.0.relabel_nodes(&|p| !inside(p)));
    let upper = h.0.rewrite(&|p, _| (p == point).then(Pattern::any_subtree));
    let lower = match reading {
        LowerBlockReading::Literal => h.0.relabel_nodes(&above),
        LowerBlockReading::LStyle => l.0.clone(),
        LowerBlockReading::SubtreeWildcard => h
            .0
            .rewrite(&|p, _| (!inside(p) && !above(p)).then(Pattern::any_subtree))
            .relabel_nodes(&above),
    };
    Ok(BuildingBlocks { u, l, upper, lower })
}

/// `Γ(H, mask)`: `H` at mask-1 nodes, `=` elsewhere. The mask must cover
/// every node of `H`'s shape.
pub fn gamma(h: &GpSchema, mask: &GpMask) -> Result<GpSchema> {
    if mask.nodes() != h.paths().as_slice() {
        return Err(Error::MaskMismatch(format!(
            "mask covers {} nodes, schema has {}",
            mask.nodes().len(),
            h.length()
        )));
    }
    Ok(GpSchema(h.0.relabel_nodes(&|p| !mask.get(p).expect("mask covers the shape"))))
}
