//! Linear programming behind vector pruning.
//!
//! Pruning only needs `maximize c·x` over nonnegative variables subject to
//! a handful of linear rows; [`LpBackend`] is that interface and
//! [`DenseSimplex`] is the bundled two-phase tableau implementation. The
//! tableau has one row per constraint, so it stays cheap when there are
//! few constraints and many variables, which is the shape of witness LPs.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub kind: ConstraintKind,
    pub rhs: f64,
}

/// `maximize objective·x` subject to `constraints`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

pub trait LpBackend: Send + Sync {
    fn maximize(&self, lp: &LinearProgram) -> Result<LpOutcome, String>;
}

#[derive(Debug, Clone)]
pub struct DenseSimplex {
    /// Reduced-cost and feasibility tolerance.
    pub tolerance: f64,
    /// Smallest pivot element accepted by the ratio test.
    pub pivot_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        DenseSimplex {
            tolerance: 1e-9,
            pivot_tolerance: 1e-7,
            max_iterations: 100_000,
        }
    }
}

struct Tableau {
    width: usize,
    data: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let piv = self.data[row * w + col];
        for v in &mut self.data[row * w..(row + 1) * w] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for r in 0..self.rows() {
            if r == row {
                continue;
            }
            let f = self.data[r * w + col];
            if f != 0.0 {
                for (v, p) in self.data[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs for `cost` under the current basis; the last entry is
    /// minus the objective value.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width;
        self.obj = cost.to_vec();
        for r in 0..self.rows() {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.obj[c] -= cb * self.data[r * w + c];
                }
            }
        }
    }

    /// Rebuilds the tableau as `B^-1 * orig` for the current basis `B`,
    /// discarding accumulated round-off. A numerically singular basis
    /// leaves the tableau untouched.
    fn refactor(&mut self, orig: &[f64], cost: &[f64]) {
        let (m, w) = (self.rows(), self.width);
        let mut b: Vec<f64> = (0..m)
            .flat_map(|r| self.basis.iter().map(move |&c| orig[r * w + c]))
            .collect();
        let mut x = orig.to_vec();
        for k in 0..m {
            let p = (k..m)
                .max_by(|&i, &j| b[i * m + k].abs().total_cmp(&b[j * m + k].abs()))
                .expect("nonempty range");
            if b[p * m + k].abs() < 1e-12 {
                return;
            }
            if p != k {
                for j in 0..m {
                    b.swap(p * m + j, k * m + j);
                }
                for j in 0..w {
                    x.swap(p * w + j, k * w + j);
                }
            }
            let piv = b[k * m + k];
            for i in 0..m {
                let f = b[i * m + k] / piv;
                if i == k || f == 0.0 {
                    continue;
                }
                for j in k..m {
                    b[i * m + j] -= f * b[k * m + j];
                }
                for j in 0..w {
                    x[i * w + j] -= f * x[k * w + j];
                }
            }
        }
        for k in 0..m {
            let piv = b[k * m + k];
            for v in &mut x[k * w..(k + 1) * w] {
                *v /= piv;
            }
        }
        self.data = x;
        self.set_objective(cost);
    }
}


enum Phase {
    Optimal,
    Unbounded,
}

impl DenseSimplex {
    fn run(&self, t: &mut Tableau, allowed: usize, cost: &[f64], orig: &[f64]) -> Result<Phase, String> {
        const REFACTOR_EVERY: usize = 64;
        const UNBOUNDED_RAY: f64 = 1e-7;
        const RATIO_RELAXATION: f64 = 1e-9;
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut stale = 0usize;
        // Columns whose reduced cost is noise-sized but that admit no
        // pivot; skipped until the next pivot changes the basis.
        let mut blocked = vec![false; allowed];
        for _ in 0..self.max_iterations {
            if stale >= REFACTOR_EVERY {
                t.refactor(orig, cost);
                stale = 0;
            }
            // Dantzig's rule, switching to Bland's rule after a run of
            // degenerate pivots so that cycling cannot occur.
            bland |= degenerate > 50;
            let mut enter = None;
            let mut best = self.tolerance;
            for j in 0..allowed {
                let rc = t.obj[j];
                if rc > best && !blocked[j] {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(col) = enter else {
                return Ok(Phase::Optimal);
            };
            // Two-pass ratio test: bound the step with a small relaxation,
            // then take the largest pivot among rows within that bound.
            let mut bound = f64::INFINITY;
            for r in 0..t.rows() {
                let a = t.at(r, col);
                if a > self.pivot_tolerance {
                    bound = bound.min((t.rhs(r).max(0.0) + RATIO_RELAXATION) / a);
                }
            }
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..t.rows() {
                let a = t.at(r, col);
                if a <= self.pivot_tolerance {
                    continue;
                }
                let ratio = t.rhs(r).max(0.0) / a;
                if ratio > bound {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((lr, _)) if bland => t.basis[r] < t.basis[lr],
                    Some((lr, _)) => a > t.at(lr, col),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, ratio)) = leave else {
                if stale != 0 {
                    t.refactor(orig, cost);
                    stale = 0;
                } else if t.obj[col] > UNBOUNDED_RAY {
                    return Ok(Phase::Unbounded);
                } else {
                    blocked[col] = true;
                }
                continue;
            };
            blocked.iter_mut().for_each(|b| *b = false);
            if ratio <= self.tolerance {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            t.pivot(row, col);
            stale += 1;
        }
        Err(format!("simplex did not converge in {} iterations", self.max_iterations))
    }
}

impl LpBackend for DenseSimplex {
    fn maximize(&self, lp: &LinearProgram) -> Result<LpOutcome, String> {
        let n = lp.objective.len();
        if lp.constraints.iter().any(|c| c.coeffs.len() != n) {
            return Err("constraint width does not match objective".into());
        }
        // Normalize to nonnegative right-hand sides.
        let rows: Vec<(Vec<f64>, ConstraintKind, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let kind = match c.kind {
                        ConstraintKind::Le => ConstraintKind::Ge,
                        ConstraintKind::Ge => ConstraintKind::Le,
                        ConstraintKind::Eq => ConstraintKind::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), kind, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.kind, c.rhs)
                }
            })
            .collect();
        let m = rows.len();
        let n_slack = rows.iter().filter(|r| r.1 != ConstraintKind::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != ConstraintKind::Le).count();
        let cols = n + n_slack + n_art;
        let width = cols + 1;
        let mut t = Tableau {
            width,
            data: vec![0.0; m * width],
            obj: vec![0.0; width],
            basis: vec![0; m],
        };
        let (mut slack, mut art) = (n, n + n_slack);
        // Per tableau row: index into `rows` and the column that started as e_r.
        let mut info: Vec<(usize, usize)> = Vec::with_capacity(m);
        for (r, (coeffs, kind, rhs)) in rows.iter().enumerate() {
            t.data[r * width..r * width + n].copy_from_slice(coeffs);
            t.data[r * width + cols] = *rhs;
            match kind {
                ConstraintKind::Le => {
                    t.data[r * width + slack] = 1.0;
                    t.basis[r] = slack;
                    info.push((r, slack));
                    slack += 1;
                }
                ConstraintKind::Ge => {
                    t.data[r * width + slack] = -1.0;
                    slack += 1;
                    t.data[r * width + art] = 1.0;
                    t.basis[r] = art;
                    info.push((r, art));
                    art += 1;
                }
                ConstraintKind::Eq => {
                    t.data[r * width + art] = 1.0;
                    t.basis[r] = art;
                    info.push((r, art));
                    art += 1;
                }
            }
        }

        let art_start = n + n_slack;
        let mut orig = t.data.clone();
        if n_art > 0 {
            // Phase 1: maximize -(sum of artificials).
            let mut cost = vec![0.0; width];
            cost[art_start..cols].iter_mut().for_each(|c| *c = -1.0);
            t.set_objective(&cost);
            self.run(&mut t, art_start, &cost, &orig)?;
            let infeasibility = t.obj[cols];
            let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
            if infeasibility > 1e-9 * scale {
                return Ok(LpOutcome::Infeasible);
            }
            // Drive zero-level artificials out of the basis.
            let mut r = 0;
            while r < t.rows() {
                if t.basis[r] >= art_start {
                    let c = (0..art_start).max_by(|&a, &b| t.at(r, a).abs().total_cmp(&t.at(r, b).abs()));
                    match c.filter(|&c| t.at(r, c).abs() > 1e-9) {
                        Some(c) => t.pivot(r, c),
                        None => {
                            // Redundant row.
                            t.data.drain(r * width..(r + 1) * width);
                            orig.drain(r * width..(r + 1) * width);
                            t.basis.remove(r);
                            info.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }

        let mut cost = vec![0.0; width];
        cost[..n].copy_from_slice(&lp.objective);
        t.set_objective(&cost);
        for _ in 0..3 {
            if let Phase::Unbounded = self.run(&mut t, art_start, &cost, &orig)? {
                return Ok(LpOutcome::Unbounded);
            }
            let mut x = vec![0.0; n];
            for r in 0..t.rows() {
                if t.basis[r] < n {
                    x[t.basis[r]] = t.rhs(r).max(0.0);
                }
            }
            // Duals: the column that started as e_r has reduced cost -y_r.
            let mut y = vec![0.0; rows.len()];
            for &(row, col) in &info {
                y[row] = -t.obj[col];
            }
            if certified(&rows, &lp.objective, &x, &y) {
                let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                return Ok(LpOutcome::Optimal { x, value });
            }
            // Round-off broke optimality or feasibility; restart from a
            // fresh factorization of the current basis.
            t.refactor(&orig, &cost);
        }
        Err("no optimality certificate after refactoring".into())
    }
}

/// Primal feasibility of `x`, dual feasibility of `y` and a zero duality
/// gap, all checked against the original rows.
fn certified(rows: &[(Vec<f64>, ConstraintKind, f64)], objective: &[f64], x: &[f64], y: &[f64]) -> bool {
    const TOL: f64 = 1e-9;
    for ((coeffs, kind, rhs), &yi) in rows.iter().zip(y) {
        let ax: f64 = coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let slack = TOL * (1.0 + rhs.abs());
        let ok = match kind {
            ConstraintKind::Le => ax <= rhs + slack && yi >= -TOL,
            ConstraintKind::Ge => ax >= rhs - slack && yi <= TOL,
            ConstraintKind::Eq => (ax - rhs).abs() <= slack,
        };
        if !ok {
            return false;
        }
    }
    for (j, &c) in objective.iter().enumerate() {
        let ya: f64 = rows.iter().zip(y).map(|(r, yi)| yi * r.0[j]).sum();
        if c - ya > TOL {
            return false;
        }
    }
    let primal: f64 = objective.iter().zip(x).map(|(c, v)| c * v).sum();
    let dual: f64 = rows.iter().zip(y).map(|(r, yi)| yi * r.2).sum();
    (primal - dual).abs() <= TOL * (1.0 + primal.abs())
}
