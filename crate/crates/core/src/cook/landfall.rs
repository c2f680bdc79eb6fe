//! Landfall: the intraprocedural dependence fixpoint.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::alias::Context;
use crate::cfg::{build_cfg, control_dependents, transitive_controllers, Cfg, CfgError, NodeId, NodeKind};
use crate::cook::facts::{transfer_with, Fact, FactSet, Summaries, Transfer, TransferOptions};
use crate::lang::ast::{free_vars, Method, StmtKind, RET};
use crate::repr::{DivergenceCause, MethodId, Representative};

/// Order in which pending nodes or methods are taken.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum WorklistOrder {
    #[default]
    Fifo,
    Lifo,
}

/// Deduplicating worklist.
pub(crate) struct Worklist {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    order: WorklistOrder,
}

impl Worklist {
    pub(crate) fn new(n: usize, order: WorklistOrder) -> Worklist {
        Worklist { queue: VecDeque::new(), queued: vec![false; n], order }
    }

    pub(crate) fn push(&mut self, k: usize) {
        if !self.queued[k] {
            self.queued[k] = true;
            self.queue.push_back(k);
        }
    }

    pub(crate) fn pop(&mut self) -> Option<usize> {
        let k = match self.order {
            WorklistOrder::Fifo => self.queue.pop_front(),
            WorklistOrder::Lifo => self.queue.pop_back(),
        }?;
        self.queued[k] = false;
        Some(k)
    }

    pub(crate) fn drain(&mut self) -> Vec<usize> {
        let all: Vec<usize> = self.queue.drain(..).collect();
        for &k in &all {
            self.queued[k] = false;
        }
        all
    }
}

/// Per-method data that does not change across Explore iterations.
#[derive(Clone, Debug)]
pub struct MethodPlan {
    pub id: MethodId,
    pub method: Method,
    pub cfg: Cfg,
    /// Branches each node is transitively control-dependent on.
    pub controllers: Vec<Vec<NodeId>>,
    /// Inverse of `controllers`.
    pub controlled: Vec<Vec<NodeId>>,
    /// ℛ of the variables each branch condition reads.
    pub cond_reps: Vec<Vec<Representative>>,
    /// w̃ of each statement node.
    pub writes: Vec<Vec<Representative>>,
}

impl MethodPlan {
    pub fn new(cx: &Context, m: &Method) -> Result<MethodPlan, CfgError> {
        let id = m.id();
        let cfg = build_cfg(m);
        let deps = control_dependents(&cfg)?;
        let trans = transitive_controllers(&cfg, &deps);
        let controllers: Vec<Vec<NodeId>> = trans.iter().map(|s| s.iter().copied().collect()).collect();
        let mut controlled = vec![Vec::new(); cfg.len()];
        for (n, bs) in controllers.iter().enumerate() {
            for &b in bs {
                controlled[b].push(n);
            }
        }
        let mut cond_reps = vec![Vec::new(); cfg.len()];
        let mut writes = vec![Vec::new(); cfg.len()];
        for n in 0..cfg.len() {
            match &cfg.node(n).kind {
                NodeKind::Branch { cond, .. } => {
                    cond_reps[n] = free_vars(cond).iter().map(|v| cx.var_rep(&id, v)).collect();
                }
                NodeKind::Stmt(s) => writes[n] = cx.written_reps(&id, s).into_iter().collect(),
                _ => {}
            }
        }
        Ok(MethodPlan { id, method: m.clone(), cfg, controllers, controlled, cond_reps, writes })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LandfallConfig {
    pub order: WorklistOrder,
    /// Loop and recursion `⊥` assignments also record `(⊥, ⊥)`, which no
    /// later assignment kills.
    pub sticky: bool,
    pub transfer: TransferOptions,
}

impl Default for LandfallConfig {
    fn default() -> Self {
        LandfallConfig { order: WorklistOrder::Fifo, sticky: true, transfer: TransferOptions::default() }
    }
}

/// Facts as a dense bit matrix: row `dep`, column `4 * src + cause`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct Matrix {
    bits: Vec<u64>,
}

impl Matrix {
    fn new(rows: usize, width: usize) -> Matrix {
        Matrix { bits: vec![0; rows * width] }
    }

    fn row(&self, r: u32, width: usize) -> &[u64] {
        let i = r as usize * width;
        &self.bits[i..i + width]
    }

    fn or_row(&mut self, dst: u32, src: &[u64]) {
        let i = dst as usize * src.len();
        for (a, b) in self.bits[i..i + src.len()].iter_mut().zip(src) {
            *a |= b;
        }
    }

    fn set(&mut self, r: u32, col: usize, width: usize) {
        self.bits[r as usize * width + col / 64] |= 1u64 << (col % 64);
    }

    fn clear_row(&mut self, r: u32, width: usize) {
        let i = r as usize * width;
        self.bits[i..i + width].fill(0);
    }

    fn union(&mut self, other: &Matrix) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }
}

/// Facts before and after each node at the fixpoint.
#[derive(Clone, Debug, Default)]
pub struct LandfallResult {
    reps: Vec<Representative>,
    width: usize,
    input: Vec<Matrix>,
    output: Vec<Matrix>,
    pub exit: NodeId,
    /// Node visits until the fixpoint.
    pub steps: usize,
}

impl LandfallResult {
    fn facts(&self, m: &Matrix) -> FactSet {
        let mut out = FactSet::new();
        for (d, dep) in self.reps.iter().enumerate() {
            for (w, &word) in m.row(d as u32, self.width).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let col = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    out.insert(Fact { dep: dep.clone(), src: self.reps[col / 4].clone(), cause: cause_of((col % 4) as u8) });
                }
            }
        }
        out
    }

    pub fn input(&self, n: NodeId) -> FactSet {
        self.facts(&self.input[n])
    }

    pub fn output(&self, n: NodeId) -> FactSet {
        self.facts(&self.output[n])
    }

    /// Facts entering every node.
    pub fn inputs(&self) -> Vec<FactSet> {
        (0..self.input.len()).map(|n| self.input(n)).collect()
    }

    pub fn at_exit(&self) -> FactSet {
        self.output(self.exit)
    }
}

const BOTTOM: u32 = 0;

fn cause_code(c: Option<DivergenceCause>) -> u8 {
    match c {
        None => 0,
        Some(DivergenceCause::Api) => 1,
        Some(DivergenceCause::Loop) => 2,
        Some(DivergenceCause::Recursion) => 3,
    }
}

fn cause_of(k: u8) -> Option<DivergenceCause> {
    match k {
        1 => Some(DivergenceCause::Api),
        2 => Some(DivergenceCause::Loop),
        3 => Some(DivergenceCause::Recursion),
        _ => None,
    }
}

/// Dense numbering of the representatives one run touches.
struct Interner {
    reps: Vec<Representative>,
    index: BTreeMap<Representative, u32>,
}

impl Interner {
    fn new() -> Interner {
        let mut i = Interner { reps: Vec::new(), index: BTreeMap::new() };
        i.id(&Representative::Bottom);
        i
    }

    fn id(&mut self, r: &Representative) -> u32 {
        if let Some(&k) = self.index.get(r) {
            return k;
        }
        let k = self.reps.len() as u32;
        self.reps.push(r.clone());
        self.index.insert(r.clone(), k);
        k
    }
}

/// `(dep, src, cause)` with interned representatives.
type Packed = (u32, u32, u8);

struct NodeTransfer {
    gen: Vec<Packed>,
    kill: Vec<u32>,
}

/// Dependence fixpoint on one method: the entry holds identity facts for every
/// representative the method touches (excluding `ret`), each node applies
/// its data dependence plus the control dependence induced by the
/// branches governing it, and the exit's facts are the result.
pub fn landfall(cx: &Context, plan: &MethodPlan, summaries: &Summaries, cfg: &LandfallConfig) -> LandfallResult {
    let g = &plan.cfg;
    let n = g.len();
    let mut intern = Interner::new();
    let ret = cx.var_rep(&plan.id, RET);
    let mut transfers = Vec::with_capacity(n);
    for k in 0..n {
        let t = match &g.node(k).kind {
            NodeKind::Stmt(s) => {
                let mut t: Transfer = transfer_with(cx, &plan.id, s, summaries, cfg.transfer);
                if cfg.sticky {
                    if let StmtKind::Bottom(b) = &s.kind {
                        if b.cause != DivergenceCause::Api {
                            t.gen.push(Fact::bottom(Representative::Bottom, b.cause));
                        }
                    }
                }
                t
            }
            _ => Transfer::default(),
        };
        let gen = t.gen.iter().map(|f| (intern.id(&f.dep), intern.id(&f.src), cause_code(f.cause))).collect();
        let kill = t.kill.iter().map(|r| intern.id(r)).collect();
        transfers.push(NodeTransfer { gen, kill });
    }
    let writes: Vec<Vec<u32>> = plan.writes.iter().map(|ws| ws.iter().map(|r| intern.id(r)).collect()).collect();
    let conds: Vec<Vec<u32>> = plan.cond_reps.iter().map(|vs| vs.iter().map(|r| intern.id(r)).collect()).collect();
    for v in crate::cook::facts::locals(cx, &plan.id) {
        intern.id(&v);
    }
    let ret_id = intern.id(&ret);
    let rows = intern.reps.len();
    let width = (4 * rows).div_ceil(64);
    let empty = Matrix::new(rows, width);
    let mut seed = empty.clone();
    for k in (1..rows as u32).filter(|&k| k != ret_id) {
        seed.set(k, 4 * k as usize, width);
    }

    let mut input = vec![empty.clone(); n];
    let mut output = vec![empty.clone(); n];
    let mut work = Worklist::new(n, cfg.order);
    work.push(g.entry);
    let mut visited = vec![false; n];
    let mut steps = 0;
    let mut new_in = empty.clone();
    while let Some(k) = work.pop() {
        steps += 1;
        if k == g.entry {
            new_in.clone_from(&seed);
        } else {
            new_in.bits.fill(0);
            for &p in g.pred(k) {
                new_in.union(&output[p]);
            }
        }
        let in_changed = new_in != input[k];
        if in_changed {
            core::mem::swap(&mut input[k], &mut new_in);
        }
        let d = &input[k];
        let t = &transfers[k];
        let mut out = d.clone();
        for &x in &t.kill {
            out.clear_row(x, width);
        }
        for &(x, z, c) in &t.gen {
            if z == BOTTOM {
                out.set(x, c as usize, width);
            } else {
                out.or_row(x, d.row(z, width));
            }
        }
        for &b in &plan.controllers[k] {
            for &v in &conds[b] {
                let row = input[b].row(v, width);
                for &x in &writes[k] {
                    out.or_row(x, row);
                }
            }
        }
        if out != output[k] || !visited[k] {
            visited[k] = true;
            output[k] = out;
            for &s in g.succ(k) {
                work.push(s);
            }
        }
        if in_changed && !conds[k].is_empty() {
            for &c in &plan.controlled[k] {
                work.push(c);
            }
        }
    }
    LandfallResult { reps: intern.reps, width, input, output, exit: g.exit, steps }
}

/// Facts node `n` receives from the branches governing it, given the
/// facts entering every node.
pub fn control_dep_facts(plan: &MethodPlan, n: NodeId, input: &[FactSet]) -> FactSet {
    let mut out = FactSet::new();
    for &b in &plan.controllers[n] {
        for v in &plan.cond_reps[b] {
            for f in input[b].iter().filter(|f| &f.dep == v) {
                for x in &plan.writes[n] {
                    out.insert(Fact { dep: x.clone(), src: f.src.clone(), cause: f.cause });
                }
            }
        }
    }
    out
}
