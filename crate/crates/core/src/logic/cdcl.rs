//! Small conflict-driven clause-learning SAT solver used by the bounded
//! oracle. Literals are `2 * var + sign`, sign 1 meaning negated.

pub(crate) type Lit = u32;

const NO_REASON: usize = usize::MAX;

pub(crate) fn pos(var: u32) -> Lit {
    var << 1
}

pub(crate) fn neg(lit: Lit) -> Lit {
    lit ^ 1
}

#[derive(Default)]
pub(crate) struct Cdcl {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    inc: f64,
    unsat: bool,
    seen: Vec<bool>,
    pub conflicts: u64,
}

/// Returned when the conflict limit is reached.
pub(crate) struct OutOfBudget;

impl Cdcl {
    pub fn new() -> Self {
        Cdcl {
            inc: 1.0,
            ..Default::default()
        }
    }

    pub fn new_var(&mut self) -> u32 {
        let v = self.value.len() as u32;
        self.value.push(0);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        v
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[(l >> 1) as usize];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    pub fn model_value(&self, var: u32) -> bool {
        self.value[var as usize] == 1
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: usize) {
        let v = (l >> 1) as usize;
        self.value[v] = if l & 1 == 1 { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause; only valid before `solve`.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        if self.unsat {
            return;
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        if c.iter().any(|&l| self.lit_value(l) == 1) {
            return;
        }
        c.retain(|&l| self.lit_value(l) != -1);
        match c.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                let id = self.clauses.len();
                self.watches[c[0] as usize].push(id);
                self.watches[c[1] as usize].push(id);
                self.clauses.push(c);
            }
        }
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let false_lit = self.trail[self.qhead] ^ 1;
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cid = ws[i];
                i += 1;
                let clause = &mut self.clauses[cid];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.value[(first >> 1) as usize];
                    if first & 1 == 1 {
                        -v
                    } else {
                        v
                    }
                };
                if first_val == 1 {
                    ws[j] = cid;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.value[(l >> 1) as usize];
                    let lv = if l & 1 == 1 { -v } else { v };
                    if lv != -1 {
                        clause.swap(1, k);
                        self.watches[clause[1] as usize].push(cid);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = cid;
                j += 1;
                if first_val == -1 {
                    conflict = Some(cid);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, cid);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
    }

    fn analyze(&mut self, mut cid: usize) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![0];
        let mut counter = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let lits = self.clauses[cid].clone();
            for q in lits {
                if Some(q) == p {
                    continue;
                }
                let v = (q >> 1) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] == self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[(self.trail[idx] >> 1) as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[(lit >> 1) as usize] = false;
            counter -= 1;
            if counter == 0 {
                break;
            }
            cid = self.reason[(lit >> 1) as usize];
        }
        learnt[0] = p.unwrap() ^ 1;
        for &l in &learnt[1..] {
            self.seen[(l >> 1) as usize] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 1..learnt.len() {
                if self.level[(learnt[k] >> 1) as usize] > self.level[(learnt[best] >> 1) as usize] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            back = self.level[(learnt[1] >> 1) as usize];
        }
        (learnt, back)
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let v = (self.trail[k] >> 1) as usize;
            self.value[v] = 0;
            self.reason[v] = NO_REASON;
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    pub fn solve(&mut self, max_conflicts: u64) -> Result<bool, OutOfBudget> {
        if self.unsat {
            return Ok(false);
        }
        loop {
            if let Some(cid) = self.propagate() {
                self.conflicts += 1;
                if self.conflicts > max_conflicts {
                    return Err(OutOfBudget);
                }
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return Ok(false);
                }
                let (learnt, back) = self.analyze(cid);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let id = self.clauses.len();
                    self.watches[learnt[0] as usize].push(id);
                    self.watches[learnt[1] as usize].push(id);
                    let first = learnt[0];
                    self.clauses.push(learnt);
                    self.enqueue(first, id);
                }
                self.inc /= 0.95;
            } else {
                let mut pick: Option<usize> = None;
                for v in 0..self.value.len() {
                    if self.value[v] == 0
                        && pick.is_none_or(|b| self.activity[v] > self.activity[b])
                    {
                        pick = Some(v);
                    }
                }
                let Some(v) = pick else {
                    return Ok(true);
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(neg(pos(v as u32)), NO_REASON);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        let mut s = Cdcl::new();
        // x[p][h]
        let x: Vec<Vec<u32>> = (0..3).map(|_| (0..2).map(|_| s.new_var()).collect()).collect();
        for row in &x {
            s.add_clause(&row.iter().map(|&v| pos(v)).collect::<Vec<_>>());
        }
        for h in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    s.add_clause(&[neg(pos(x[a][h])), neg(pos(x[b][h]))]);
                }
            }
        }
        assert!(!s.solve(10_000).ok().unwrap());
    }

    #[test]
    fn finds_model() {
        let mut s = Cdcl::new();
        let a = s.new_var();
        let b = s.new_var();
        let c = s.new_var();
        s.add_clause(&[pos(a), pos(b)]);
        s.add_clause(&[neg(pos(a)), pos(c)]);
        s.add_clause(&[neg(pos(b)), pos(c)]);
        s.add_clause(&[neg(pos(c)), pos(a)]);
        assert!(s.solve(100).ok().unwrap());
        let val = |v| s.model_value(v);
        assert!(val(a) || val(b));
        assert!(!val(a) || val(c));
        assert!(val(c));
    }
}
