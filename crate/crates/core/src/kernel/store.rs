//! The clause store and the metavariable store. Both follow a strict
//! stack discipline: whatever a rule adds is removed before it returns.

use crate::term::{normalize_with, MetaType, MetaVar, Term};

#[derive(Clone, Debug)]
pub struct Entry {
    pub clause: Term,
    /// Number of entries below this one when it was pushed.
    pub depth: usize,
}

#[derive(Default)]
pub struct ClauseStore {
    entries: Vec<Entry>,
}

impl ClauseStore {
    pub fn push(&mut self, clause: Term) {
        let depth = self.entries.len();
        self.entries.push(Entry { clause, depth });
    }

    pub fn pop(&mut self) -> Entry {
        let e = self.entries.pop().expect("clause store underflow");
        debug_assert_eq!(e.depth, self.entries.len());
        e
    }

    /// Put back an entry taken with [`ClauseStore::pop`].
    pub fn restore(&mut self, e: Entry) {
        assert_eq!(e.depth, self.entries.len(), "clause restored out of order");
        self.entries.push(e);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
    }

    /// Clause at position `i` counting from the most recent.
    pub fn nth_recent(&self, i: usize) -> Option<&Term> {
        let n = self.entries.len();
        (i < n).then(|| &self.entries[n - 1 - i].clause)
    }
}

struct Cell {
    ty: MetaType,
    /// The eigenvariable counter when the metavariable was created; its
    /// value may only mention eigenvariables at or below this stamp.
    birth: u64,
    value: Option<Term>,
}

#[derive(Default)]
pub struct MetaVarStore {
    cells: Vec<Cell>,
    trail: Vec<u32>,
}

impl MetaVarStore {
    pub fn fresh(&mut self, ty: MetaType, birth: u64) -> Term {
        let id = self.cells.len() as u32;
        self.cells.push(Cell {
            ty: ty.clone(),
            birth,
            value: None,
        });
        Term::meta(MetaVar { id, ty })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Forget metavariables created after `n`; they must be unbound.
    pub fn truncate(&mut self, n: usize) {
        debug_assert!(self.cells[n.min(self.cells.len())..].iter().all(|c| c.value.is_none()));
        self.cells.truncate(n);
    }

    pub fn birth(&self, id: u32) -> u64 {
        self.cells[id as usize].birth
    }

    pub fn ty(&self, id: u32) -> &MetaType {
        &self.cells[id as usize].ty
    }

    pub fn value(&self, id: u32) -> Option<Term> {
        self.cells.get(id as usize).and_then(|c| c.value.clone())
    }

    pub fn bind(&mut self, id: u32, value: Term) {
        let cell = &mut self.cells[id as usize];
        assert!(cell.value.is_none(), "metavariable ?M{} bound twice", id);
        assert!(
            value.max_stamp() <= cell.birth,
            "binding of ?M{} mentions an eigenvariable younger than it",
            id
        );
        cell.value = Some(value);
        self.trail.push(id);
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let id = self.trail.pop().unwrap();
            self.cells[id as usize].value = None;
        }
    }

    /// Substitute current bindings and renormalize.
    pub fn resolve(&self, t: &Term, ctx: &[MetaType]) -> Term {
        if !t.has_metas() {
            return t.clone();
        }
        normalize_with(t, ctx, &|id| self.value(id))
    }
}
