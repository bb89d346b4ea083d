//! Finite pasted event structures: atoms glued together by contexts.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(String);

impl AtomId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One measurement: a set of mutually exclusive, jointly exhaustive atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    name: String,
    /// Atom indices in structure order.
    atoms: Vec<usize>,
}

impl Context {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.atoms.binary_search(&atom).is_ok()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// A validated pasted logic. Atoms keep their declaration order, contexts
/// their input order, and every context lists its atoms in atom order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventStructure {
    atoms: Vec<AtomId>,
    index: HashMap<String, usize>,
    contexts: Vec<Context>,
}

impl EventStructure {
    /// Builds a structure with contexts named `C1`, `C2`, ...
    pub fn new<A, S, C>(atoms: A, contexts: C) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        C: IntoIterator,
        C::Item: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let named = contexts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (format!("C{}", i + 1), c.into_iter().map(Into::into).collect()))
            .collect();
        Self::with_names(atoms.into_iter().map(Into::into).collect(), named)
    }

    pub fn with_names(atoms: Vec<String>, contexts: Vec<(String, Vec<String>)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, name) in atoms.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptyAtomName);
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateAtom(name.clone()));
            }
        }

        let mut built: Vec<Context> = Vec::with_capacity(contexts.len());
        let mut names = HashMap::new();
        let mut seen_sets: HashMap<Vec<usize>, usize> = HashMap::new();
        for (ci, (cname, members)) in contexts.into_iter().enumerate() {
            if members.is_empty() {
                return Err(Error::EmptyContext(cname));
            }
            let mut ids = Vec::with_capacity(members.len());
            let mut local = BTreeSet::new();
            for m in &members {
                let id = *index.get(m).ok_or_else(|| Error::UnknownAtomInContext {
                    context: cname.clone(),
                    atom: m.clone(),
                })?;
                if !local.insert(id) {
                    return Err(Error::DuplicateAtomInContext {
                        context: cname.clone(),
                        atom: m.clone(),
                    });
                }
                ids.push(id);
            }
            ids.sort_unstable();
            if names.insert(cname.clone(), ci).is_some() {
                return Err(Error::DuplicateContextName(cname));
            }
            if let Some(&prev) = seen_sets.get(&ids) {
                return Err(Error::DuplicateContext {
                    first: built[prev].name.clone(),
                    second: cname,
                });
            }
            seen_sets.insert(ids.clone(), ci);
            built.push(Context {
                name: cname,
                atoms: ids,
            });
        }

        let mut covered = vec![false; atoms.len()];
        for c in &built {
            for &a in &c.atoms {
                covered[a] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::OrphanAtom(atoms[i].clone()));
        }

        Ok(EventStructure {
            atoms: atoms.into_iter().map(AtomId).collect(),
            index,
            contexts: built,
        })
    }

    pub fn atoms(&self) -> &[AtomId] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_name(&self, i: usize) -> &str {
        self.atoms[i].as_str()
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn context_index(&self, name: &str) -> Option<usize> {
        self.contexts.iter().position(|c| c.name == name)
    }

    pub fn incidence(&self) -> IncidenceIndex {
        IncidenceIndex::new(self)
    }

    /// Finest partition of the atoms in which every context lies inside one block.
    /// Blocks are listed by their smallest atom.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.atoms.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for c in &self.contexts {
            let first = c.atoms[0];
            for &a in &c.atoms[1..] {
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, a));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for a in 0..self.atoms.len() {
            let r = find(&mut parent, a);
            blocks.entry(r).or_default().push(a);
        }
        blocks.into_values().collect()
    }

    /// Recognises the odd/even cycle shape: `n` three-atom contexts, each with
    /// two atoms shared with its neighbours and one private atom, and the
    /// overlap graph a single `n`-cycle.
    pub fn as_cycle(&self) -> Result<CycleView> {
        let n = self.contexts.len();
        let not = |why: &str| Error::NotACycleStructure(why.to_string());
        if n < 3 {
            return Err(not("fewer than three contexts"));
        }
        if self.atoms.len() != 2 * n {
            return Err(not("atom count is not twice the context count"));
        }
        let inc = self.incidence();
        let mut private = vec![usize::MAX; n];
        for (ci, c) in self.contexts.iter().enumerate() {
            if c.len() != 3 {
                return Err(not("context without exactly three atoms"));
            }
            let mut shared = 0;
            for &a in c.atoms() {
                match inc.contexts_of(a).len() {
                    1 => private[ci] = a,
                    2 => shared += 1,
                    _ => return Err(not("atom in more than two contexts")),
                }
            }
            if shared != 2 {
                return Err(not("context without exactly two shared atoms"));
            }
        }
        // Walk the overlap cycle from the first context towards its
        // lower-indexed neighbour.
        let neighbour = |ci: usize, a: usize| -> usize {
            let cs = inc.contexts_of(a);
            if cs[0] == ci {
                cs[1]
            } else {
                cs[0]
            }
        };
        let shared_of = |ci: usize| -> Vec<usize> {
            self.contexts[ci]
                .atoms()
                .iter()
                .copied()
                .filter(|&a| inc.contexts_of(a).len() == 2)
                .collect()
        };
        let s0 = shared_of(0);
        let (incoming, mut outgoing) = if neighbour(0, s0[0]) > neighbour(0, s0[1]) {
            (s0[0], s0[1])
        } else {
            (s0[1], s0[0])
        };
        let mut cyclic = vec![incoming];
        let mut midpoint = vec![private[0]];
        let mut visited = vec![false; n];
        visited[0] = true;
        let mut ci = 0;
        loop {
            let next = neighbour(ci, outgoing);
            if next == 0 {
                break;
            }
            if visited[next] {
                return Err(not("overlap graph is not a single cycle"));
            }
            visited[next] = true;
            cyclic.push(outgoing);
            midpoint.push(private[next]);
            let s = shared_of(next);
            outgoing = if s[0] == outgoing { s[1] } else { s[0] };
            ci = next;
        }
        if cyclic.len() != n || outgoing != incoming {
            return Err(not("overlap graph is not a single cycle"));
        }
        Ok(CycleView { n, cyclic, midpoint })
    }
}

/// The cycle logic with atoms `a1..an, x1..xn` and contexts
/// `Ci = {ai, a(i+1 mod n), xi}`. Even `n` is allowed.
pub fn cycle_logic(n: usize) -> Result<EventStructure> {
    if n < 3 {
        return Err(Error::InvalidN(n));
    }
    let atoms: Vec<String> = (1..=n)
        .map(|i| format!("a{i}"))
        .chain((1..=n).map(|i| format!("x{i}")))
        .collect();
    let contexts = (1..=n)
        .map(|i| {
            (
                format!("C{i}"),
                vec![format!("a{i}"), format!("a{}", i % n + 1), format!("x{i}")],
            )
        })
        .collect();
    EventStructure::with_names(atoms, contexts)
}

/// Cycle atoms located inside a structure: `cyclic[i]` and `cyclic[i+1]`
/// share the context whose private atom is `midpoint[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleView {
    pub n: usize,
    pub cyclic: Vec<usize>,
    pub midpoint: Vec<usize>,
}

/// Which contexts contain each atom, and which atoms each pair of contexts share.
#[derive(Clone, Debug)]
pub struct IncidenceIndex {
    atom_contexts: Vec<Vec<usize>>,
    shared: BTreeMap<(usize, usize), Vec<usize>>,
}

impl IncidenceIndex {
    pub fn new(e: &EventStructure) -> Self {
        let mut atom_contexts = vec![Vec::new(); e.atom_count()];
        for (ci, c) in e.contexts().iter().enumerate() {
            for &a in c.atoms() {
                atom_contexts[a].push(ci);
            }
        }
        let mut shared: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (a, cs) in atom_contexts.iter().enumerate() {
            for (i, &c1) in cs.iter().enumerate() {
                for &c2 in &cs[i + 1..] {
                    shared.entry((c1, c2)).or_default().push(a);
                }
            }
        }
        IncidenceIndex { atom_contexts, shared }
    }

    pub fn contexts_of(&self, atom: usize) -> &[usize] {
        &self.atom_contexts[atom]
    }

    pub fn shared_atoms(&self, c1: usize, c2: usize) -> &[usize] {
        let key = (c1.min(c2), c1.max(c2));
        self.shared.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Context pairs `(c1 < c2)` with at least one common atom.
    pub fn overlapping_pairs(&self) -> impl Iterator<Item = (usize, usize, &[usize])> {
        self.shared.iter().map(|(&(a, b), v)| (a, b, v.as_slice()))
    }

    pub fn is_shared(&self, atom: usize) -> bool {
        self.atom_contexts[atom].len() > 1
    }
}

/// Spanning forest of the context-overlap graph plus one fundamental cycle
/// per non-tree edge. Each cycle is a closed walk of context indices.
pub(crate) fn fundamental_cycles(e: &EventStructure, inc: &IncidenceIndex) -> Vec<Vec<usize>> {
    let m = e.contexts().len();
    let mut adj = vec![Vec::new(); m];
    for (a, b, _) in inc.overlapping_pairs() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![usize::MAX; m];
    let mut depth = vec![0usize; m];
    let mut seen = vec![false; m];
    let mut tree = BTreeSet::new();
    for root in 0..m {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = c;
                    depth[d] = depth[c] + 1;
                    tree.insert((c.min(d), c.max(d)));
                    queue.push_back(d);
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for (a, b, _) in inc.overlapping_pairs() {
        if tree.contains(&(a, b)) {
            continue;
        }
        // tree path a -> lca <- b, closed by the edge b -> a
        let (mut x, mut y) = (a, b);
        let mut left = vec![x];
        let mut right = vec![y];
        while x != y {
            if depth[x] >= depth[y] {
                x = parent[x];
                left.push(x);
            } else {
                y = parent[y];
                right.push(y);
            }
        }
        right.pop();
        right.reverse();
        left.extend(right);
        left.push(a);
        cycles.push(left);
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> EventStructure {
        let t = cycle_logic(3).unwrap();
        let mut atoms = Vec::new();
        let mut ctx = Vec::new();
        for p in ["L", "R"] {
            atoms.extend(t.atoms().iter().map(|a| format!("{p}{a}")));
            for c in t.contexts() {
                ctx.push((
                    format!("{p}{}", c.name()),
                    c.atoms().iter().map(|&a| format!("{p}{}", t.atom_name(a))).collect(),
                ));
            }
        }
        EventStructure::with_names(atoms, ctx).unwrap()
    }

    #[test]
    fn minimal_structure() {
        let e = EventStructure::new(["a"], [["a"]]).unwrap();
        assert_eq!(e.atom_count(), 1);
        assert_eq!(e.contexts().len(), 1);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            EventStructure::new(["a", "a"], [["a"]]),
            Err(Error::DuplicateAtom(_))
        ));
        assert!(matches!(EventStructure::new([""], [[""]]), Err(Error::EmptyAtomName)));
        assert!(matches!(
            EventStructure::new(["a"], [["a", "a"]]),
            Err(Error::DuplicateAtomInContext { .. })
        ));
        assert!(matches!(
            EventStructure::new(["a"], [vec!["b"]]),
            Err(Error::UnknownAtomInContext { .. })
        ));
        let empty: Vec<Vec<&str>> = vec![vec![]];
        assert!(matches!(EventStructure::new(["a"], empty), Err(Error::EmptyContext(_))));
        assert!(matches!(
            EventStructure::new(["a", "b"], [vec!["a", "b"], vec!["b", "a"]]),
            Err(Error::DuplicateContext { .. })
        ));
        assert!(matches!(
            EventStructure::new(["a", "b"], [["a"]]),
            Err(Error::OrphanAtom(_))
        ));
    }

    #[test]
    fn cycle_logic_shapes() {
        let tri = cycle_logic(3).unwrap();
        assert_eq!((tri.atom_count(), tri.contexts().len()), (6, 3));
        assert!(matches!(cycle_logic(2), Err(Error::InvalidN(2))));

        let p = cycle_logic(5).unwrap();
        let c1: Vec<&str> = p.contexts()[0].atoms().iter().map(|&a| p.atom_name(a)).collect();
        assert_eq!(c1, ["a1", "a2", "x1"]);
        let c5: Vec<&str> = p.contexts()[4].atoms().iter().map(|&a| p.atom_name(a)).collect();
        assert_eq!(c5, ["a1", "a5", "x5"]);
    }

    #[test]
    fn cycle_degrees() {
        for n in 3..=12 {
            let e = cycle_logic(n).unwrap();
            assert_eq!(e.atom_count(), 2 * n);
            assert_eq!(e.contexts().len(), n);
            let inc = e.incidence();
            for i in 1..=n {
                assert_eq!(inc.contexts_of(e.atom_index(&format!("a{i}")).unwrap()).len(), 2);
                assert_eq!(inc.contexts_of(e.atom_index(&format!("x{i}")).unwrap()).len(), 1);
            }
        }
    }

    #[test]
    fn pentagon_incidence() {
        let p = cycle_logic(5).unwrap();
        let inc = p.incidence();
        assert_eq!(inc.contexts_of(p.atom_index("a2").unwrap()), &[0, 1]);
        assert_eq!(inc.contexts_of(p.atom_index("x3").unwrap()), &[2]);
        assert_eq!(inc.shared_atoms(1, 0), &[p.atom_index("a2").unwrap()]);
        assert_eq!(inc.shared_atoms(0, 2), &[] as &[usize]);
        assert_eq!(inc.overlapping_pairs().count(), 5);
    }

    #[test]
    fn incidence_matches_membership() {
        let e = two_triangles();
        let inc = e.incidence();
        for a in 0..e.atom_count() {
            for (ci, c) in e.contexts().iter().enumerate() {
                assert_eq!(inc.contexts_of(a).contains(&ci), c.contains(a));
            }
        }
    }

    #[test]
    fn single_context_incidence() {
        let e = EventStructure::new(["a", "b", "c"], [["a", "b", "c"]]).unwrap();
        let inc = e.incidence();
        for a in 0..3 {
            assert_eq!(inc.contexts_of(a), &[0]);
        }
        assert_eq!(e.connected_components(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn components() {
        assert_eq!(cycle_logic(5).unwrap().connected_components().len(), 1);
        let e = two_triangles();
        let comps = e.connected_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.len() == 6));
        // every context inside one block
        for c in e.contexts() {
            assert!(comps.iter().any(|b| c.atoms().iter().all(|a| b.contains(a))));
        }
    }

    #[test]
    fn cycle_view_recovers_generator_order() {
        for n in 3..=9 {
            let e = cycle_logic(n).unwrap();
            let v = e.as_cycle().unwrap();
            let names: Vec<&str> = v.cyclic.iter().map(|&a| e.atom_name(a)).collect();
            let expect: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
            assert_eq!(names, expect);
            let mids: Vec<&str> = v.midpoint.iter().map(|&a| e.atom_name(a)).collect();
            let expect: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            assert_eq!(mids, expect);
        }
        assert!(two_triangles().as_cycle().is_err());
        assert!(EventStructure::new(["a"], [["a"]]).unwrap().as_cycle().is_err());
    }

    #[test]
    fn fundamental_cycles_of_pentagon_and_forest() {
        let p = cycle_logic(5).unwrap();
        let cycles = fundamental_cycles(&p, &p.incidence());
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 6);
        assert_eq!(cycles[0].first(), cycles[0].last());
        let e = two_triangles();
        assert_eq!(fundamental_cycles(&e, &e.incidence()).len(), 2);
        let single = EventStructure::new(["a", "b"], [["a", "b"]]).unwrap();
        assert!(fundamental_cycles(&single, &single.incidence()).is_empty());
    }
}
