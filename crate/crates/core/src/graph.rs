//! Theory graphs: one node per predicate, one labelled edge per body atom
//! pointing at the clause head. Assertions hang off a `TRUE` tail node and
//! goal clauses point at a `FALSE` head node.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::TheoryError;
use crate::theory::{Atom, Clause, Name, Term, Theory};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    True,
    False,
    Predicate { name: Name, arity: usize },
}

impl Node {
    fn predicate(atom: &Atom) -> Self {
        Node::Predicate { name: atom.predicate.clone(), arity: atom.arity() }
    }

    pub fn is_sentinel(&self) -> bool {
        !matches!(self, Node::Predicate { .. })
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::True => f.write_str("TRUE"),
            Node::False => f.write_str("FALSE"),
            Node::Predicate { name, arity } => write!(f, "{name}/{arity}"),
        }
    }
}

/// `(axiom, body arguments, head arguments)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub clause: Name,
    pub body_args: Vec<Term>,
    pub head_args: Vec<Term>,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ts: &[Term]| ts.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{}:({})->({})", self.clause, join(&self.body_args), join(&self.head_args))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: Node,
    pub to: Node,
    pub label: EdgeLabel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TheoryGraph {
    nodes: BTreeSet<Node>,
    edges: Vec<Edge>,
}

/// Shortest-path length to a protected predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

pub fn build_graph(theory: &Theory) -> TheoryGraph {
    let mut g = TheoryGraph::default();
    for c in theory.clauses() {
        let label = |body: Option<&Atom>, head: Option<&Atom>| EdgeLabel {
            clause: c.id.clone(),
            body_args: body.map(|a| a.args.clone()).unwrap_or_default(),
            head_args: head.map(|a| a.args.clone()).unwrap_or_default(),
        };
        let to = c.head.as_ref().map(Node::predicate).unwrap_or(Node::False);
        if c.body.is_empty() {
            g.push(Node::True, to, label(None, c.head.as_ref()));
            continue;
        }
        for b in &c.body {
            g.push(Node::predicate(b), to.clone(), label(Some(b), c.head.as_ref()));
        }
    }
    g
}

impl TheoryGraph {
    fn push(&mut self, from: Node, to: Node, label: EdgeLabel) {
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        self.edges.push(Edge { from, to, label });
    }

    pub fn nodes(&self) -> &BTreeSet<Node> {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Name> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Predicate { name, .. } => Some(name),
            _ => None,
        })
    }

    /// Whether a directed path of one or more edges leads from `from` to `to`
    /// without passing through a sentinel.
    pub fn reaches(&self, from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&str> = VecDeque::from([from]);
        while let Some(cur) = queue.pop_front() {
            for e in &self.edges {
                if let (Node::Predicate { name: a, .. }, Node::Predicate { name: b, .. }) = (&e.from, &e.to) {
                    if &**a == cur {
                        if &**b == to {
                            return true;
                        }
                        if seen.insert(&**b) {
                            queue.push_back(b);
                        }
                    }
                }
            }
        }
        false
    }

    /// Rebuilds the clauses the edges were drawn from, in first-edge order.
    pub fn to_theory(&self) -> Result<Theory, TheoryError> {
        let mut order: Vec<Name> = Vec::new();
        let mut groups: BTreeMap<Name, Vec<&Edge>> = BTreeMap::new();
        for e in &self.edges {
            if !groups.contains_key(&e.label.clause) {
                order.push(e.label.clause.clone());
            }
            groups.entry(e.label.clause.clone()).or_default().push(e);
        }
        let atom = |n: &Node, args: &[Term]| match n {
            Node::Predicate { name, .. } => Some(Atom::new(name.clone(), args.to_vec())),
            _ => None,
        };
        let clauses = order
            .into_iter()
            .map(|id| {
                let edges = &groups[&id];
                let head = atom(&edges[0].to, &edges[0].label.head_args);
                let body = edges.iter().filter_map(|e| atom(&e.from, &e.label.body_args)).collect();
                Clause::new(id, body, head)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Theory::new(clauses)
    }
}

/// Confidence distance of every predicate node: 0 for protected ones, else
/// the edge count of the shortest forward path to a protected predicate.
pub fn confidence_distances(graph: &TheoryGraph, protected: &BTreeSet<Name>) -> BTreeMap<Name, Distance> {
    let mut dist: BTreeMap<Name, Distance> = graph.predicates().map(|p| (p.clone(), Distance::Infinite)).collect();
    let mut queue = VecDeque::new();
    for p in graph.predicates() {
        if protected.contains(p) {
            dist.insert(p.clone(), Distance::Finite(0));
            queue.push_back((p.clone(), 0usize));
        }
    }
    // Breadth-first over reversed edges.
    while let Some((cur, d)) = queue.pop_front() {
        for e in &graph.edges {
            let (Node::Predicate { name: from, .. }, Node::Predicate { name: to, .. }) = (&e.from, &e.to) else {
                continue;
            };
            if *to == cur && dist[from] == Distance::Infinite {
                dist.insert(from.clone(), Distance::Finite(d + 1));
                queue.push_back((from.clone(), d + 1));
            }
        }
    }
    dist
}

/// Graphviz rendering with nodes and edges in lexicographic order. The
/// optional annotation is appended to a node's label on a second line.
pub fn to_dot(graph: &TheoryGraph, annotations: Option<&BTreeMap<Name, String>>) -> String {
    let mut out = String::from("digraph theory {\n");
    let mut nodes: Vec<(String, Option<&String>)> = graph
        .nodes
        .iter()
        .map(|n| {
            let note = match (n, annotations) {
                (Node::Predicate { name, .. }, Some(a)) => a.get(name),
                _ => None,
            };
            (n.to_string(), note)
        })
        .collect();
    nodes.sort();
    for (n, note) in nodes {
        match note {
            Some(note) => out.push_str(&format!("  \"{n}\" [label=\"{n}\\n{note}\"];\n")),
            None => out.push_str(&format!("  \"{n}\";\n")),
        }
    }
    let mut edges: Vec<(String, String, String)> =
        graph.edges.iter().map(|e| (e.from.to_string(), e.to.to_string(), e.label.to_string())).collect();
    edges.sort();
    for (from, to, label) in edges {
        out.push_str(&format!("  \"{from}\" -> \"{to}\" [label=\"{label}\"];\n"));
    }
    out.push_str("}\n");
    out
}
