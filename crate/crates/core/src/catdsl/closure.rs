//! Closure of generators and relations into a finite category by coset
//! enumeration: nodes are morphisms out of identities, edges postcompose a
//! generator, and relations are traced from every node.

use std::collections::VecDeque;

use crate::fincat::{CategoryBuilder, CategoryError, FinCat};

pub(crate) struct Generator {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// `lhs = rhs` as generator indices in application order, both starting at
/// `source`.
pub(crate) struct Rel {
    pub source: usize,
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

#[derive(Debug)]
pub(crate) enum ClosureError {
    Budget,
    Category(CategoryError),
}

struct Enumeration<'a> {
    gens: &'a [Generator],
    budget: usize,
    /// Nodes that are still their own representative.
    live: usize,
    parent: Vec<usize>,
    /// Target object of each node.
    obj: Vec<usize>,
    edges: Vec<Vec<Option<usize>>>,
}

impl Enumeration<'_> {
    fn find(&mut self, mut n: usize) -> usize {
        while self.parent[n] != n {
            self.parent[n] = self.parent[self.parent[n]];
            n = self.parent[n];
        }
        n
    }

    fn node(&mut self, obj: usize) -> Result<usize, ClosureError> {
        // merged nodes are not counted, but the total is capped as well so
        // that enumeration always stops
        if self.live >= self.budget || self.parent.len() >= self.budget.saturating_mul(16).max(1024) {
            return Err(ClosureError::Budget);
        }
        self.live += 1;
        let n = self.parent.len();
        self.parent.push(n);
        self.obj.push(obj);
        self.edges.push(vec![None; self.gens.len()]);
        Ok(n)
    }

    fn step(&mut self, n: usize, g: usize) -> Result<usize, ClosureError> {
        let n = self.find(n);
        match self.edges[n][g] {
            Some(t) => Ok(self.find(t)),
            None => {
                let t = self.node(self.gens[g].target)?;
                self.edges[n][g] = Some(t);
                Ok(t)
            }
        }
    }

    fn trace(&mut self, n: usize, path: &[usize]) -> Result<usize, ClosureError> {
        path.iter().try_fold(n, |cur, &g| self.step(cur, g))
    }

    fn merge(&mut self, a: usize, b: usize) {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, drop) = (a.min(b), a.max(b));
            self.parent[drop] = keep;
            self.live -= 1;
            for g in 0..self.gens.len() {
                if let Some(t) = self.edges[drop][g] {
                    match self.edges[keep][g] {
                        Some(u) => queue.push((u, t)),
                        None => self.edges[keep][g] = Some(t),
                    }
                }
            }
        }
    }

    /// One pass over all live nodes; returns whether anything changed.
    fn pass(&mut self, rels: &[Rel]) -> Result<bool, ClosureError> {
        let mut changed = false;
        let mut i = 0;
        while i < self.parent.len() {
            if self.find(i) == i {
                let o = self.obj[i];
                for r in rels.iter().filter(|r| r.source == o) {
                    let before = self.parent.len();
                    let a = self.trace(i, &r.lhs)?;
                    let b = self.trace(i, &r.rhs)?;
                    if a != b || self.parent.len() != before {
                        changed = true;
                        self.merge(a, b);
                    }
                }
            }
            if self.find(i) == i {
                for g in 0..self.gens.len() {
                    if self.gens[g].source == self.obj[i] && self.edges[i][g].is_none() {
                        self.step(i, g)?;
                        changed = true;
                    }
                }
            }
            i += 1;
        }
        Ok(changed)
    }
}

/// Closes generators under relations. Composites are named by their
/// shortest path, least in generator-name order, written outermost first.
pub(crate) fn close(
    objects: &[String],
    gens: &[Generator],
    rels: &[Rel],
    budget: usize,
) -> Result<FinCat, ClosureError> {
    let mut e = Enumeration {
        gens,
        budget,
        live: 0,
        parent: Vec::new(),
        obj: Vec::new(),
        edges: Vec::new(),
    };
    let roots: Vec<usize> = (0..objects.len()).map(|o| e.node(o)).collect::<Result<_, _>>()?;
    while e.pass(rels)? {}

    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by(|&a, &b| gens[a].name.cmp(&gens[b].name));
    let mut obj_order: Vec<usize> = (0..objects.len()).collect();
    obj_order.sort_by(|&a, &b| objects[a].cmp(&objects[b]));

    let mut b = CategoryBuilder::new();
    for o in objects {
        b.add_object(o.clone());
    }
    // breadth-first from each identity gives shortlex-least words
    let mut index = vec![usize::MAX; e.parent.len()];
    let mut words: Vec<Vec<usize>> = Vec::new();
    for &o in &obj_order {
        let root = e.find(roots[o]);
        let id = b.add_morphism(format!("id_{}", objects[o]), o, o);
        b.set_identity(o, id);
        index[root] = id;
        words.push(Vec::new());
        let mut queue = VecDeque::from([(root, Vec::new())]);
        while let Some((n, word)) = queue.pop_front() {
            for &g in &order {
                let Some(t) = e.edges[n][g] else { continue };
                let t = e.find(t);
                if index[t] != usize::MAX {
                    continue;
                }
                let mut w: Vec<usize> = word.clone();
                w.push(g);
                let name = w
                    .iter()
                    .rev()
                    .map(|&g| gens[g].name.as_str())
                    .collect::<Vec<_>>()
                    .join(".");
                index[t] = b.add_morphism(name, o, e.obj[t]);
                words.push(w.clone());
                queue.push_back((t, w));
            }
        }
    }
    let mut node_of = vec![0; words.len()];
    for (n, &i) in index.iter().enumerate() {
        if i != usize::MAX {
            node_of[i] = n;
        }
    }
    let mut failed = false;
    b.fill_composites(|g, f| {
        let mut cur = node_of[f];
        for &s in &words[g] {
            match e.edges[cur][s] {
                Some(t) => cur = e.find(t),
                None => {
                    failed = true;
                    return g;
                }
            }
        }
        index[cur]
    });
    debug_assert!(!failed, "closed enumeration has every edge");
    b.build().map_err(ClosureError::Category)
}
