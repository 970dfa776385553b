use std::collections::BTreeSet;

/// A finite rooted tree. Node 0 is the root and nodes are numbered in preorder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    parent: Vec<Option<usize>>,
}

impl Tree {
    pub fn single() -> Tree {
        Tree { parent: vec![None] }
    }

    /// Tree from a parent array; returns `None` unless node 0 is the only root
    /// and every other node reaches it.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Option<Tree> {
        let n = parent.len();
        if n == 0 || parent[0].is_some() {
            return None;
        }
        for v in 1..n {
            let mut cur = v;
            let mut steps = 0;
            while let Some(p) = parent[cur] {
                if p >= n || steps > n {
                    return None;
                }
                cur = p;
                steps += 1;
            }
            if cur != 0 {
                return None;
            }
        }
        Some(Tree { parent })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| self.parent[w] == Some(v))
            .collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.children(v).is_empty())
            .collect()
    }

    /// Covering pairs (parent, child).
    pub fn cover(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter_map(|w| self.parent[w].map(|p| (p, w)))
            .collect()
    }

    /// Is `v` below or equal to `w`?
    pub fn leq(&self, v: usize, w: usize) -> bool {
        let mut cur = Some(w);
        while let Some(c) = cur {
            if c == v {
                return true;
            }
            cur = self.parent[c];
        }
        false
    }

    /// Isomorphism-invariant encoding: children encodings sorted and parenthesised.
    pub fn canonical(&self) -> String {
        self.encode(0)
    }

    fn encode(&self, v: usize) -> String {
        let mut parts: Vec<String> = self
            .children(v)
            .into_iter()
            .map(|c| self.encode(c))
            .collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    fn from_canonical(code: &str) -> Tree {
        let mut parent = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for c in code.chars() {
            if c == '(' {
                parent.push(stack.last().copied());
                stack.push(parent.len() - 1);
            } else {
                stack.pop();
            }
        }
        Tree { parent }
    }
}

/// Every rooted tree with at most `max_nodes` nodes, once per isomorphism
/// class, ordered by size and then by canonical encoding.
pub fn enumerate_finite_trees(max_nodes: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    if max_nodes == 0 {
        return out;
    }
    let mut level: BTreeSet<String> = BTreeSet::from([Tree::single().canonical()]);
    for size in 1..=max_nodes {
        out.extend(level.iter().map(|c| Tree::from_canonical(c)));
        if size == max_nodes {
            break;
        }
        let mut next = BTreeSet::new();
        for code in &level {
            let t = Tree::from_canonical(code);
            for v in 0..t.len() {
                let mut parent = t.parent.clone();
                parent.push(Some(v));
                next.insert(Tree { parent }.canonical());
            }
        }
        level = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn isomorphic(a: &Tree, b: &Tree) -> bool {
        let n = a.len();
        n == b.len()
            && permutations(n)
                .iter()
                .any(|pi| (0..n).all(|v| a.parent(v).map(|p| pi[p]) == b.parent(pi[v])))
    }

    // Census of all parent arrays on n labelled nodes, grouped by explicit isomorphism tests.
    fn brute_force_census(n: usize) -> usize {
        let mut reps: Vec<Tree> = Vec::new();
        let mut choice = vec![0usize; n];
        loop {
            let parent: Vec<Option<usize>> = (0..n)
                .map(|v| if v == 0 { None } else { Some(choice[v]) })
                .collect();
            if let Some(t) = Tree::from_parents(parent) {
                if !reps.iter().any(|r| isomorphic(r, &t)) {
                    reps.push(t);
                }
            }
            let mut k = 1;
            while k < n {
                choice[k] += 1;
                if choice[k] < n {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k >= n {
                return reps.len();
            }
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_finite_trees(1).len(), 1);
        let two = enumerate_finite_trees(2);
        assert_eq!(two.len(), 2);
        assert_eq!(two[1].cover(), vec![(0, 1)]);
        assert_eq!(enumerate_finite_trees(3).len(), 4);
    }

    #[test]
    fn census_agrees_with_brute_force() {
        let trees = enumerate_finite_trees(6);
        for n in 1..=6 {
            let by_size = trees.iter().filter(|t| t.len() == n).count();
            assert_eq!(by_size, brute_force_census(n), "size {n}");
        }
    }

    #[test]
    fn counts_per_size() {
        // rooted unlabelled trees by node count
        let expected = [1, 1, 2, 4, 9, 20, 48, 115, 286];
        let trees = enumerate_finite_trees(9);
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(trees.iter().filter(|t| t.len() == i + 1).count(), *e);
        }
        assert_eq!(trees.len(), 486);
    }

    #[test]
    fn pairwise_non_isomorphic() {
        let trees = enumerate_finite_trees(5);
        for (i, a) in trees.iter().enumerate() {
            for b in &trees[i + 1..] {
                assert!(!isomorphic(a, b));
            }
        }
    }

    #[test]
    fn preorder_numbering() {
        for t in enumerate_finite_trees(6) {
            for v in 1..t.len() {
                assert!(t.parent(v).unwrap() < v);
            }
        }
    }
}
