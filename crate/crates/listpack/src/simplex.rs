//! Exact rational simplex over equality-form linear programs, with column
//! addition after a solve for pricing loops.
//!
//! The tableau is column-major. Artificial columns are installed once and
//! updated forever; their tableau entries are the rows of the current basis
//! inverse, which is what makes warm column addition and dual extraction
//! cheap. Bland's rule everywhere, so pivoting terminates.

use crate::Rat;
use num::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

struct Col {
    data: Vec<Rat>,
    /// Objective coefficient once feasibility is established.
    cost: Rat,
    reduced: Rat,
    allowed: bool,
    artificial: bool,
}

enum Phase {
    Fresh,
    Ready,
    Failed(Outcome),
}

/// Minimises `cost . x` subject to `A x = rhs`, `x >= 0`.
pub struct Simplex {
    m: usize,
    b: Vec<Rat>,
    cols: Vec<Col>,
    /// Column index of the artificial for each row.
    art: Vec<usize>,
    /// Row basis: `basis[r]` is the column basic in row `r`.
    basis: Vec<usize>,
    /// Rows negated at intake to make the right side nonnegative.
    flipped: Vec<bool>,
    /// Insertion order of non-artificial columns.
    user_cols: Vec<usize>,
    phase: Phase,
    pivots: u64,
}

const PIVOT_GUARD: u64 = 5_000_000;

impl Simplex {
    pub fn new(rhs: Vec<Rat>, columns: Vec<(Vec<Rat>, Rat)>) -> Self {
        let m = rhs.len();
        let flipped: Vec<bool> = rhs.iter().map(|v| *v < Rat::zero()).collect();
        let b: Vec<Rat> = rhs
            .into_iter()
            .zip(&flipped)
            .map(|(v, &f)| if f { -v } else { v })
            .collect();
        let mut s = Simplex {
            m,
            b,
            cols: Vec::new(),
            art: Vec::new(),
            basis: Vec::new(),
            flipped,
            user_cols: Vec::new(),
            phase: Phase::Fresh,
            pivots: 0,
        };
        for (a, cost) in columns {
            s.push_user_column(a, cost);
        }
        s
    }

    fn apply_flips(&self, a: &[Rat]) -> Vec<Rat> {
        assert_eq!(a.len(), self.m, "column length must match row count");
        a.iter()
            .zip(&self.flipped)
            .map(|(v, &f)| if f { -v.clone() } else { v.clone() })
            .collect()
    }

    fn push_user_column(&mut self, a: Vec<Rat>, cost: Rat) {
        let data = self.apply_flips(&a);
        let idx = self.cols.len();
        self.cols.push(Col {
            data,
            cost,
            reduced: Rat::zero(),
            allowed: true,
            artificial: false,
        });
        self.user_cols.push(idx);
    }

    /// Adds a column after a successful solve; call [`Simplex::solve`]
    /// again to re-optimise. The tableau form of the new column is the
    /// basis inverse applied to it, read off the artificial block.
    pub fn add_column(&mut self, a: Vec<Rat>, cost: Rat) {
        match self.phase {
            Phase::Ready => {}
            _ => panic!("add_column requires a previously optimal solve"),
        }
        let signed = self.apply_flips(&a);
        let mut data = vec![Rat::zero(); self.m];
        let mut reduced = cost.clone();
        for k in 0..self.m {
            if signed[k].is_zero() {
                continue;
            }
            let art = &self.cols[self.art[k]];
            for i in 0..self.m {
                let delta = &signed[k] * &art.data[i];
                data[i] += delta;
            }
            // Internal dual of row k is the negated artificial reduced cost.
            let y_k = -art.reduced.clone();
            reduced -= &y_k * &signed[k];
        }
        let idx = self.cols.len();
        self.cols.push(Col {
            data,
            cost,
            reduced,
            allowed: true,
            artificial: false,
        });
        self.user_cols.push(idx);
    }

    fn pivot(&mut self, e: usize, r: usize) {
        self.pivots += 1;
        assert!(self.pivots < PIVOT_GUARD, "pivot guard tripped");
        let snapshot = self.cols[e].data.clone();
        let red_e = self.cols[e].reduced.clone();
        let p = snapshot[r].clone();
        for col in self.cols.iter_mut() {
            let t = &col.data[r] / &p;
            if !red_e.is_zero() && !t.is_zero() {
                col.reduced -= &red_e * &t;
            }
            for i in 0..self.m {
                if i != r && !snapshot[i].is_zero() && !t.is_zero() {
                    let delta = &snapshot[i] * &t;
                    col.data[i] -= delta;
                }
            }
            col.data[r] = t;
        }
        let tb = &self.b[r] / &p;
        for i in 0..self.m {
            if i != r && !snapshot[i].is_zero() && !tb.is_zero() {
                let delta = &snapshot[i] * &tb;
                self.b[i] -= delta;
            }
        }
        self.b[r] = tb;
        let leaving = self.basis[r];
        if self.cols[leaving].artificial {
            self.cols[leaving].allowed = false;
        }
        self.basis[r] = e;
    }

    /// Bland: entering column is the lowest-index allowed column with a
    /// negative reduced cost; leaving row takes the minimum ratio with ties
    /// to the lowest basic column index.
    fn run_pivots(&mut self) -> Outcome {
        loop {
            let entering = self
                .cols
                .iter()
                .position(|c| c.allowed && c.reduced < Rat::zero());
            let Some(e) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<(Rat, usize, usize)> = None;
            for r in 0..self.m {
                let a = &self.cols[e].data[r];
                if *a > Rat::zero() {
                    let theta = &self.b[r] / a;
                    let key = (theta, self.basis[r], r);
                    match &best {
                        Some((t, bcol, _)) if (&key.0, &key.1) >= (t, bcol) => {}
                        _ => best = Some(key),
                    }
                }
            }
            match best {
                Some((_, _, r)) => self.pivot(e, r),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn install_artificials(&mut self) {
        for r in 0..self.m {
            let mut data = vec![Rat::zero(); self.m];
            data[r] = Rat::one();
            let idx = self.cols.len();
            self.cols.push(Col {
                data,
                cost: Rat::zero(),
                reduced: Rat::zero(),
                allowed: true,
                artificial: true,
            });
            self.art.push(idx);
            self.basis.push(idx);
        }
    }

    /// Reduced costs for the current basis from scratch: `c_j - c_B . col_j`.
    fn recompute_reduced(&mut self, phase_one: bool) {
        let basis_costs: Vec<Rat> = self
            .basis
            .iter()
            .map(|&j| {
                if phase_one {
                    if self.cols[j].artificial {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                } else {
                    self.cols[j].cost.clone()
                }
            })
            .collect();
        for j in 0..self.cols.len() {
            let own = if phase_one {
                if self.cols[j].artificial {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            } else {
                self.cols[j].cost.clone()
            };
            let mut red = own;
            for i in 0..self.m {
                if !basis_costs[i].is_zero() && !self.cols[j].data[i].is_zero() {
                    let delta = &basis_costs[i] * &self.cols[j].data[i];
                    red -= delta;
                }
            }
            self.cols[j].reduced = red;
        }
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if !self.cols[self.basis[r]].artificial {
                continue;
            }
            debug_assert!(self.b[r].is_zero());
            let replacement = self
                .user_cols
                .iter()
                .copied()
                .find(|&j| !self.cols[j].data[r].is_zero());
            if let Some(j) = replacement {
                self.pivot(j, r);
            }
            // Otherwise the row is redundant: its artificial stays basic at
            // zero and every user column keeps a zero entry there.
        }
    }

    pub fn solve(&mut self) -> Outcome {
        match self.phase {
            Phase::Fresh => {}
            Phase::Ready => {
                // Re-optimise after added columns.
                let out = self.run_pivots();
                if !matches!(out, Outcome::Optimal) {
                    self.phase = Phase::Failed(out);
                }
                return out;
            }
            Phase::Failed(out) => return out,
        }
        self.install_artificials();
        self.recompute_reduced(true);
        let phase1 = self.run_pivots();
        debug_assert!(matches!(phase1, Outcome::Optimal));
        let residue: Rat = (0..self.m)
            .filter(|&r| self.cols[self.basis[r]].artificial)
            .fold(Rat::zero(), |acc, r| acc + &self.b[r]);
        if !residue.is_zero() {
            self.phase = Phase::Failed(Outcome::Infeasible);
            return Outcome::Infeasible;
        }
        self.drive_out_artificials();
        for &j in &self.art {
            self.cols[j].allowed = false;
        }
        self.recompute_reduced(false);
        let out = self.run_pivots();
        self.phase = match out {
            Outcome::Optimal => Phase::Ready,
            other => Phase::Failed(other),
        };
        out
    }

    /// Values of the non-artificial columns in insertion order.
    pub fn primal(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.user_cols.len()];
        let mut user_pos = vec![usize::MAX; self.cols.len()];
        for (k, &j) in self.user_cols.iter().enumerate() {
            user_pos[j] = k;
        }
        for r in 0..self.m {
            let j = self.basis[r];
            if user_pos[j] != usize::MAX {
                x[user_pos[j]] = self.b[r].clone();
            }
        }
        x
    }

    pub fn value(&self) -> Rat {
        (0..self.m).fold(Rat::zero(), |acc, r| {
            let j = self.basis[r];
            if self.cols[j].artificial || self.cols[j].cost.is_zero() {
                acc
            } else {
                acc + &self.cols[j].cost * &self.b[r]
            }
        })
    }

    /// Row duals for the solved program, in the caller's row orientation.
    pub fn duals(&self) -> Vec<Rat> {
        (0..self.m)
            .map(|r| {
                let y = -self.cols[self.art[r]].reduced.clone();
                if self.flipped[r] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    /// After an infeasible solve: a vector `y` with `y . A_j <= 0` for every
    /// column and `y . rhs > 0`, in the caller's row orientation.
    pub fn farkas(&self) -> Vec<Rat> {
        (0..self.m)
            .map(|r| {
                let y = Rat::one() - &self.cols[self.art[r]].reduced;
                if self.flipped[r] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub minimize: bool,
    pub costs: Vec<Rat>,
    pub rows: Vec<(Vec<Rat>, Cmp, Rat)>,
}

#[derive(Debug, Clone)]
pub enum LpResult {
    /// Duals satisfy `value = duals . rhs` for the problem as given.
    Optimal {
        x: Vec<Rat>,
        value: Rat,
        duals: Vec<Rat>,
    },
    Infeasible {
        farkas: Vec<Rat>,
    },
    Unbounded,
}

/// Inequality-form front end: slack and surplus columns are appended per
/// row, then the equality core runs.
pub fn solve_lp(p: &LpProblem) -> LpResult {
    let n = p.costs.len();
    let m = p.rows.len();
    let sign = if p.minimize { Rat::one() } else { -Rat::one() };
    let mut columns: Vec<(Vec<Rat>, Rat)> = (0..n)
        .map(|j| {
            let a = p.rows.iter().map(|(coeffs, _, _)| coeffs[j].clone()).collect();
            (a, &sign * &p.costs[j])
        })
        .collect();
    for (r, (_, cmp, _)) in p.rows.iter().enumerate() {
        let dir = match cmp {
            Cmp::Le => Rat::one(),
            Cmp::Ge => -Rat::one(),
            Cmp::Eq => continue,
        };
        let mut a = vec![Rat::zero(); m];
        a[r] = dir;
        columns.push((a, Rat::zero()));
    }
    let rhs: Vec<Rat> = p.rows.iter().map(|(_, _, b)| b.clone()).collect();
    let mut s = Simplex::new(rhs, columns);
    match s.solve() {
        Outcome::Optimal => {
            let full = s.primal();
            let x = full[..n].to_vec();
            let value = &sign * &s.value();
            let duals = s.duals().into_iter().map(|y| &sign * &y).collect();
            LpResult::Optimal { x, value, duals }
        }
        Outcome::Infeasible => LpResult::Infeasible { farkas: s.farkas() },
        Outcome::Unbounded => LpResult::Unbounded,
    }
}
