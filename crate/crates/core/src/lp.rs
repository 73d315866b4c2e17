//! Exact rational linear feasibility via the two-phase simplex method's
//! first phase, with Bland's rule against cycling.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Converts a float to a rational. Values that are within 1e-15 (relative) of
/// a fraction with a modest denominator map to that fraction, so decimal
/// inputs like `0.01` become `1/100`; everything else converts exactly.
pub fn to_rational(x: f64) -> Rational {
    if x == 0.0 {
        return Rational::zero();
    }
    if let Some(r) = Ratio::<i64>::approximate_float(x) {
        let (n, d) = (*r.numer(), *r.denom());
        if d.abs() <= 1 << 40 && (n as f64 / d as f64 - x).abs() <= 1e-15 * x.abs() {
            return Rational::new(BigInt::from(n), BigInt::from(d));
        }
    }
    Rational::from_float(x).expect("finite float")
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
}

/// A system of linear constraints over variables that are either
/// nonnegative or free.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    free: Vec<bool>,
    rows: Vec<Row>,
}

impl LinearSystem {
    /// `vars` nonnegative variables.
    pub fn nonnegative(vars: usize) -> Self {
        LinearSystem {
            free: vec![false; vars],
            rows: Vec::new(),
        }
    }

    /// `vars` unrestricted variables.
    pub fn free(vars: usize) -> Self {
        LinearSystem {
            free: vec![true; vars],
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.free.len()
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.free.len()));
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    /// A feasible point, or `None` if the system is infeasible.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        // Column layout: one column per nonnegative variable, two per free
        // variable (x = x+ - x-), then slack/surplus, then artificials.
        let mut col_of = Vec::with_capacity(self.free.len());
        let mut structural = 0;
        for &f in &self.free {
            col_of.push(structural);
            structural += if f { 2 } else { 1 };
        }
        let m = self.rows.len();
        let slack_count = self.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::with_capacity(m);
        for r in &self.rows {
            let mut dense = vec![Rational::zero(); structural];
            for (j, c) in &r.coeffs {
                dense[col_of[*j]] += c;
                if self.free[*j] {
                    dense[col_of[*j] + 1] -= c;
                }
            }
            let (mut rel, mut rhs) = (r.relation, r.rhs.clone());
            if rhs.is_negative() {
                for x in dense.iter_mut() {
                    *x = -x.clone();
                }
                rhs = -rhs;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            rows.push((dense, rel, rhs));
        }
        let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let width = structural + slack_count + art_count;
        let rhs_col = width;
        let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut is_art = vec![false; width];
        let (mut next_slack, mut next_art) = (structural, structural + slack_count);
        for (dense, rel, rhs) in rows {
            let mut row = dense;
            row.resize(width + 1, Rational::zero());
            row[rhs_col] = rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    is_art[next_art] = true;
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    is_art[next_art] = true;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            tab.push(row);
        }
        // Phase-one objective: minimise the sum of artificials. `obj[j]` is the
        // rate at which that sum falls when column j enters.
        let mut obj = vec![Rational::zero(); width + 1];
        for (i, row) in tab.iter().enumerate() {
            if is_art[basis[i]] {
                for (j, x) in row[..width].iter().enumerate() {
                    if !is_art[j] && !x.is_zero() {
                        obj[j] += x;
                    }
                }
                obj[rhs_col] += &row[rhs_col];
            }
        }
        loop {
            if obj[rhs_col].is_zero() {
                break;
            }
            // Bland: lowest-index improving column.
            let Some(enter) = (0..width).find(|&j| !is_art[j] && obj[j].is_positive()) else {
                break;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in tab.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[rhs_col] / &row[enter];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (pr, _) = leave.expect("phase-one objective is bounded below by zero");
            pivot(&mut tab, &mut obj, pr, enter);
            basis[pr] = enter;
        }
        if !obj[rhs_col].is_zero() {
            return None;
        }
        let mut values = vec![Rational::zero(); width];
        for (i, &b) in basis.iter().enumerate() {
            values[b] = tab[i][rhs_col].clone();
        }
        Some(
            self.free
                .iter()
                .enumerate()
                .map(|(j, &f)| {
                    let c = col_of[j];
                    if f {
                        &values[c] - &values[c + 1]
                    } else {
                        values[c].clone()
                    }
                })
                .collect(),
        )
    }

    /// Checks a candidate point exactly.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        if x.len() != self.free.len() {
            return false;
        }
        if self.free.iter().zip(x).any(|(&f, v)| !f && v.is_negative()) {
            return false;
        }
        self.rows.iter().all(|r| {
            let lhs: Rational = r.coeffs.iter().map(|(j, c)| c * &x[*j]).sum();
            match r.relation {
                Relation::Le => lhs <= r.rhs,
                Relation::Ge => lhs >= r.rhs,
                Relation::Eq => lhs == r.rhs,
            }
        })
    }
}

fn pivot(tab: &mut [Vec<Rational>], obj: &mut [Rational], pr: usize, pc: usize) {
    let p = tab[pr][pc].clone();
    if !p.is_one() {
        for x in tab[pr].iter_mut() {
            if !x.is_zero() {
                *x = &*x / &p;
            }
        }
    }
    let pivot_row = tab[pr].clone();
    let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for &j in &nz {
            row[j] -= &f * &pivot_row[j];
        }
    }
    if !obj[pc].is_zero() {
        let f = obj[pc].clone();
        for &j in &nz {
            obj[j] -= &f * &pivot_row[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimal_floats_become_small_fractions() {
        assert_eq!(to_rational(0.01), q(1, 100));
        assert_eq!(to_rational(1.5), q(3, 2));
        assert_eq!(to_rational(-0.375), q(-3, 8));
        assert_eq!(to_rational(0.0), q(0, 1));
        let x = std::f64::consts::SQRT_2;
        assert!((to_f64(&to_rational(x)) - x).abs() < 1e-15);
    }

    #[test]
    fn feasible_point_is_exact() {
        // x + y = 1, x - y >= 1/3, x, y >= 0
        let mut s = LinearSystem::nonnegative(2);
        s.constrain(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Eq, q(1, 1));
        s.constrain(vec![(0, q(1, 1)), (1, q(-1, 1))], Relation::Ge, q(1, 3));
        let x = s.solve().unwrap();
        assert!(s.satisfied_by(&x));
    }

    #[test]
    fn infeasible_detected() {
        let mut s = LinearSystem::nonnegative(2);
        s.constrain(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Le, q(1, 1));
        s.constrain(vec![(0, q(1, 1))], Relation::Ge, q(2, 1));
        assert!(s.solve().is_none());
    }

    #[test]
    fn free_variables_take_negative_values() {
        let mut s = LinearSystem::free(2);
        s.constrain(vec![(0, q(1, 1))], Relation::Eq, q(-5, 2));
        s.constrain(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Le, q(-3, 1));
        let x = s.solve().unwrap();
        assert_eq!(x[0], q(-5, 2));
        assert!(s.satisfied_by(&x));
    }

    #[test]
    fn degenerate_system_terminates() {
        // Redundant constraints through the origin: x <= y <= z, x + y + z = 1.
        let mut s = LinearSystem::nonnegative(3);
        for k in 1..8 {
            s.constrain(vec![(0, q(k, 1)), (1, q(-k, 1))], Relation::Le, q(0, 1));
            s.constrain(vec![(1, q(1, k)), (2, q(-1, k))], Relation::Le, q(0, 1));
            s.constrain(vec![(0, q(1, 1)), (2, q(-1, 1))], Relation::Le, q(0, 1));
        }
        s.constrain(vec![(0, q(1, 1)), (1, q(1, 1)), (2, q(1, 1))], Relation::Eq, q(1, 1));
        let x = s.solve().unwrap();
        assert!(s.satisfied_by(&x));
        s.constrain(vec![(0, q(1, 1))], Relation::Ge, q(1, 2));
        assert!(s.solve().is_none());
    }

    #[test]
    fn empty_system_is_feasible() {
        let s = LinearSystem::free(3);
        assert_eq!(s.solve().unwrap().len(), 3);
    }
}
