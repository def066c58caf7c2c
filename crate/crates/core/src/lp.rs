//! Exact rational linear feasibility.
//!
//! A small phase-I simplex over [`Rational`] with Bland's pivoting rule, which
//! guarantees termination.  Variables are implicitly nonnegative; callers
//! shift variables when they need lower bounds.  This is enough for every
//! linear question in the crate: recurrence, transverse recurrence, carried
//! positivity witnesses, and collapse admissibility all reduce to feasibility
//! of systems with a few dozen variables.

use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone)]
struct Constraint {
    coeffs: Vec<(usize, Rational)>,
    cmp: Cmp,
    rhs: Rational,
}

/// A feasibility problem over nonnegative variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, constraints: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Add `sum coeffs · x  cmp  rhs`.  Coefficients may repeat a variable;
    /// they are accumulated.
    pub fn constrain(&mut self, coeffs: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) {
        for &(j, _) in &coeffs {
            assert!(j < self.n_vars, "variable index out of range");
        }
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    /// Search for a nonnegative solution.  Returns one witness if the system
    /// is feasible.
    pub fn feasible(&self) -> Option<Vec<Rational>> {
        // Assemble rows with dense coefficients and nonnegative right sides.
        let mut rows: Vec<(Vec<Rational>, Cmp, Rational)> = Vec::new();
        for c in &self.constraints {
            let mut dense = vec![Rational::zero(); self.n_vars];
            for (j, a) in &c.coeffs {
                dense[*j] += a.clone();
            }
            let mut cmp = c.cmp;
            let mut rhs = c.rhs.clone();
            if rhs.is_negative() {
                for a in dense.iter_mut() {
                    *a = -a.clone();
                }
                rhs = -rhs;
                cmp = match cmp {
                    Cmp::Eq => Cmp::Eq,
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                };
            }
            rows.push((dense, cmp, rhs));
        }

        // Columns: structural, then slack/surplus, then artificial.
        let m = rows.len();
        let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n = self.n_vars + n_slack;
        let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut basis: Vec<usize> = Vec::with_capacity(m);
        let total = n + m;
        let mut slack_at = self.n_vars;
        for (i, (dense, cmp, rhs)) in rows.iter().enumerate() {
            let mut row = vec![Rational::zero(); total + 1];
            row[..self.n_vars].clone_from_slice(dense);
            match cmp {
                Cmp::Le => {
                    row[slack_at] = Rational::one();
                    slack_at += 1;
                }
                Cmp::Ge => {
                    row[slack_at] = -Rational::one();
                    slack_at += 1;
                }
                Cmp::Eq => {}
            }
            // One artificial variable per row keeps the start basis trivial.
            row[n + i] = Rational::one();
            row[total] = rhs.clone();
            tableau.push(row);
            basis.push(n + i);
        }

        // Phase-I objective: minimize the sum of artificial variables,
        // tracked as reduced costs z_j - c_j for c = indicator of artificials.
        let mut obj = vec![Rational::zero(); total + 1];
        for row in &tableau {
            for (j, v) in row.iter().enumerate() {
                obj[j] += v.clone();
            }
        }
        for j in n..total {
            obj[j] = Rational::zero();
        }

        loop {
            // Bland: entering column = smallest index with positive
            // phase-I reduced cost among non-artificial columns first,
            // artificial columns never re-enter.
            let mut entering = None;
            for (j, o) in obj.iter().enumerate().take(n) {
                if o.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else { break };
            // Ratio test, Bland tie-break by basis variable index.
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..m {
                if tableau[i][e].is_positive() {
                    let ratio = &tableau[i][total] / &tableau[i][e];
                    match &leaving {
                        None => leaving = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((li, _)) = leaving else {
                // Phase-I objective is bounded below by zero, so an
                // unbounded pivot direction cannot happen.
                return None;
            };
            pivot(&mut tableau, &mut obj, li, e, total);
            basis[li] = e;
        }

        if obj[total].is_positive() {
            return None;
        }

        let mut x = vec![Rational::zero(); self.n_vars];
        for i in 0..m {
            if basis[i] < self.n_vars {
                x[basis[i]] = tableau[i][total].clone();
            }
        }
        debug_assert!(self.check(&x), "simplex produced a non-solution");
        Some(x)
    }

    /// Substitute a candidate point.
    pub fn check(&self, x: &[Rational]) -> bool {
        if x.len() != self.n_vars || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs: Rational =
                c.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
            match c.cmp {
                Cmp::Eq => lhs == c.rhs,
                Cmp::Le => lhs <= c.rhs,
                Cmp::Ge => lhs >= c.rhs,
            }
        })
    }
}

fn pivot(tableau: &mut [Vec<Rational>], obj: &mut [Rational], li: usize, e: usize, total: usize) {
    let p = tableau[li][e].clone();
    for v in tableau[li].iter_mut() {
        *v /= p.clone();
    }
    for i in 0..tableau.len() {
        if i == li || tableau[i][e].is_zero() {
            continue;
        }
        let f = tableau[i][e].clone();
        for j in 0..=total {
            let d = &tableau[li][j] * &f;
            tableau[i][j] -= d;
        }
    }
    if !obj[e].is_zero() {
        let f = obj[e].clone();
        for j in 0..=total {
            let d = &tableau[li][j] * &f;
            obj[j] -= d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn simple_feasible_system() {
        // x0 + x1 = 3, x0 - x1 = 1  →  x = (2, 1).
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![(0, rat(1)), (1, rat(1))], Cmp::Eq, rat(3));
        lp.constrain(vec![(0, rat(1)), (1, rat(-1))], Cmp::Eq, rat(1));
        let x = lp.feasible().unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
    }

    #[test]
    fn infeasible_system() {
        // x0 = -1 is impossible for x0 ≥ 0.
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![(0, rat(1))], Cmp::Eq, rat(-1));
        assert!(lp.feasible().is_none());
        // x0 + x1 ≤ 1, x0 ≥ 2.
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![(0, rat(1)), (1, rat(1))], Cmp::Le, rat(1));
        lp.constrain(vec![(0, rat(1))], Cmp::Ge, rat(2));
        assert!(lp.feasible().is_none());
    }

    #[test]
    fn inequalities_and_duplicates() {
        // 2 x0 ≥ 5 with coefficient given twice.
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![(0, rat(1)), (0, rat(1))], Cmp::Ge, rat(5));
        let x = lp.feasible().unwrap();
        assert!(lp.check(&x));
        assert!(x[0] >= crate::ratio(5, 2));
    }

    #[test]
    fn degenerate_cycling_guard() {
        // A classic degenerate instance; Bland's rule must terminate.
        let mut lp = LinearProgram::new(4);
        lp.constrain(
            vec![(0, crate::ratio(1, 4)), (1, rat(-8)), (2, rat(-1)), (3, rat(9))],
            Cmp::Le,
            rat(0),
        );
        lp.constrain(
            vec![(0, crate::ratio(1, 2)), (1, rat(-12)), (2, crate::ratio(-1, 2)), (3, rat(3))],
            Cmp::Le,
            rat(0),
        );
        lp.constrain(vec![(2, rat(1))], Cmp::Le, rat(1));
        assert!(lp.feasible().is_some());
    }
}
