//! Monopole tableaux: winding numbers on the diagonals of a `k x (n-k)`
//! rectangle and the scaling degree of the corresponding monopole operator.

use serde::Serialize;
use thiserror::Error;

use crate::coulomb::diagonal_len;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableauError {
    #[error("malformed tableau: {0}")]
    Malformed(String),
    #[error("search space of {size} tableaux exceeds the cap {cap}")]
    SearchTooLarge { size: u128, cap: u128 },
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

/// Row-major filling; box `(i, j)` (1-based) lies on diagonal `i + j - 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct MonopoleTableau {
    pub k: usize,
    pub n: usize,
    pub rows: Vec<Vec<i32>>,
}

impl MonopoleTableau {
    pub fn zero(k: usize, n: usize) -> MonopoleTableau {
        MonopoleTableau { k, n, rows: vec![vec![0; n - k]; k] }
    }

    /// Fills each diagonal from its sorted winding numbers, left to right.
    pub fn from_diagonals(k: usize, n: usize, diags: &[Vec<i32>]) -> Result<MonopoleTableau, TableauError> {
        check_shape(k, n)?;
        if diags.len() != n - 1 {
            return Err(TableauError::Malformed(format!("expected {} diagonals", n - 1)));
        }
        let mut t = MonopoleTableau::zero(k, n);
        for (m0, d) in diags.iter().enumerate() {
            let boxes = diagonal_boxes(k, n, m0 + 1);
            if boxes.len() != d.len() {
                return Err(TableauError::Malformed(format!("diagonal {} needs {} entries", m0 + 1, boxes.len())));
            }
            let mut sorted = d.clone();
            sorted.sort();
            for ((i, j), a) in boxes.into_iter().zip(sorted) {
                t.rows[i - 1][j - 1] = a;
            }
        }
        Ok(t)
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.rows[i - 1][j - 1]
    }

    /// The entries of diagonal `m`, left to right.
    pub fn diagonal(&self, m: usize) -> Vec<i32> {
        diagonal_boxes(self.k, self.n, m).into_iter().map(|(i, j)| self.get(i, j)).collect()
    }

    pub fn diagonals(&self) -> Vec<Vec<i32>> {
        (1..self.n).map(|m| self.diagonal(m)).collect()
    }

    pub fn validate(&self) -> Result<(), TableauError> {
        check_shape(self.k, self.n)?;
        if self.rows.len() != self.k || self.rows.iter().any(|r| r.len() != self.n - self.k) {
            return Err(TableauError::Malformed(format!("expected {} rows of length {}", self.k, self.n - self.k)));
        }
        for m in 1..self.n {
            let d = self.diagonal(m);
            if d.windows(2).any(|w| w[0] > w[1]) {
                return Err(TableauError::Malformed(format!("diagonal {m} is not increasing: {d:?}")));
            }
        }
        Ok(())
    }

    /// Total winding per label.
    pub fn winding(&self) -> Vec<i32> {
        self.diagonals().iter().map(|d| d.iter().sum()).collect()
    }

    /// The filling turned through a half turn, so that box `(i, j)` moves to
    /// `(k + 1 - i, n - k + 1 - j)`.
    pub fn rotated(&self) -> MonopoleTableau {
        let rows = self.rows.iter().rev().map(|r| r.iter().rev().copied().collect()).collect();
        MonopoleTableau { k: self.k, n: self.n, rows }
    }

    /// `a(i-1, j) <= a(i, j) <= a(i, j-1)` wherever both sides exist.
    pub fn is_monotone(&self) -> bool {
        for i in 1..=self.k {
            for j in 1..=self.n - self.k {
                let a = self.get(i, j);
                if i > 1 && self.get(i - 1, j) > a {
                    return false;
                }
                if j > 1 && a > self.get(i, j - 1) {
                    return false;
                }
            }
        }
        true
    }

    /// The shape condition for a minimal twisted tableau.  Diagonals are
    /// filled increasing to the right, so the inequalities hold for the
    /// half-turned filling.
    pub fn is_minimal_shape(&self, l: i32) -> bool {
        self.rows.iter().flatten().all(|&a| (0..=l).contains(&a)) && self.rotated().is_monotone()
    }
}

fn check_shape(k: usize, n: usize) -> Result<(), TableauError> {
    if k == 0 || k >= n {
        return Err(TableauError::BadParameters(format!("need 0 < k < n, got k={k}, n={n}")));
    }
    Ok(())
}

/// Boxes of diagonal `m` in increasing column order.
pub fn diagonal_boxes(k: usize, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> =
        (1..=k).filter(|&i| m + 1 > i && m + 1 - i <= n - k).map(|i| (i, m + 1 - i)).collect();
    out.sort_by_key(|&(_, j)| j);
    out
}

/// Scaling degree of the monopole operator at twist `l`.
pub fn tableau_degree(t: &MonopoleTableau, l: i32) -> Result<i64, TableauError> {
    t.validate()?;
    Ok(degree_of_diagonals(t.k, t.n, &t.diagonals(), l))
}

fn degree_of_diagonals(k: usize, n: usize, diags: &[Vec<i32>], l: i32) -> i64 {
    let mut deg = 0i64;
    for (m0, d) in diags.iter().enumerate() {
        for p in 0..d.len() {
            for q in p + 1..d.len() {
                deg -= 2 * (d[p] - d[q]).abs() as i64;
            }
        }
        if let Some(next) = diags.get(m0 + 1) {
            for &a in d {
                for &b in next {
                    deg += (a - b).abs() as i64;
                }
            }
        }
        let m = m0 + 1;
        for &a in d {
            if m == k {
                deg += a.abs() as i64;
            }
            if m == n - k {
                deg += (a - l).abs() as i64;
            }
        }
    }
    deg - (k as i64) * (l as i64)
}

/// Nondecreasing sequences of length `len` with entries in `lo..=hi`.
fn sorted_tuples(len: usize, lo: i32, hi: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &out {
            let start = t.last().copied().unwrap_or(lo);
            for a in start..=hi {
                let mut u = t.clone();
                u.push(a);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn binom(a: u128, b: u128) -> u128 {
    let mut r = 1u128;
    for i in 0..b {
        r = r * (a - i) / (i + 1);
    }
    r
}

pub const DEFAULT_SEARCH_CAP: u128 = 20_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub k: usize,
    pub n: usize,
    pub twist: i32,
    pub window: i32,
    /// Entries searched lie in `[lo, hi]`.
    pub lo: i32,
    pub hi: i32,
    pub searched: u128,
    pub min_degree: i64,
    /// The tableaux of degree 0, sorted.
    pub tableaux: Vec<MonopoleTableau>,
    pub note: String,
}

/// All tableaux of degree 0 at twist `l` with entries in `[-window, l + window]`.
pub fn enumerate_min_tableaux(k: usize, n: usize, l: i32, window: i32) -> Result<Vec<MonopoleTableau>, TableauError> {
    Ok(enumerate(k, n, l, window, DEFAULT_SEARCH_CAP)?.tableaux)
}

pub fn enumerate(k: usize, n: usize, l: i32, window: i32, cap: u128) -> Result<Enumeration, TableauError> {
    check_shape(k, n)?;
    if l < 0 || window < l {
        return Err(TableauError::BadParameters(format!("need 0 <= l <= window, got l={l}, window={window}")));
    }
    let (lo, hi) = (-window, l + window);
    let width = (hi - lo + 1) as u128;
    let lens: Vec<usize> = (1..n).map(|m| diagonal_len(k, n, m)).collect();
    let size: u128 = lens.iter().map(|&v| binom(width + v as u128 - 1, v as u128)).product();
    if size > cap {
        return Err(TableauError::SearchTooLarge { size, cap });
    }
    let choices: Vec<Vec<Vec<i32>>> = lens.iter().map(|&v| sorted_tuples(v, lo, hi)).collect();

    // Each first-diagonal choice is searched independently.
    let search = |first: &Vec<i32>| -> (i64, Vec<MonopoleTableau>) {
        let mut best = i64::MAX;
        let mut found = Vec::new();
        let mut current = vec![first.clone()];
        walk(k, n, l, &choices, &mut current, &mut best, &mut found);
        (best, found)
    };
    let parts: Vec<(i64, Vec<MonopoleTableau>)> = crate::par::map(&choices[0], true, search);

    let min_degree = parts.iter().map(|p| p.0).min().unwrap_or(i64::MAX);
    let mut tableaux: Vec<MonopoleTableau> = parts.into_iter().flat_map(|p| p.1).collect();
    tableaux.sort();
    let note = format!(
        "exhaustive over entries in [{lo}, {hi}]; lowering the largest entry of a positive tableau, \
         or raising the smallest of a negative one, never raises the degree, so entries outside [0, {l}] \
         cannot occur at the minimum"
    );
    Ok(Enumeration { k, n, twist: l, window, lo, hi, searched: size, min_degree, tableaux, note })
}

fn walk(
    k: usize,
    n: usize,
    l: i32,
    choices: &[Vec<Vec<i32>>],
    current: &mut Vec<Vec<i32>>,
    best: &mut i64,
    found: &mut Vec<MonopoleTableau>,
) {
    if current.len() == choices.len() {
        let d = degree_of_diagonals(k, n, current, l);
        *best = (*best).min(d);
        if d == 0 {
            found.push(MonopoleTableau::from_diagonals(k, n, current).expect("shape checked"));
        }
        return;
    }
    for c in &choices[current.len()] {
        current.push(c.clone());
        walk(k, n, l, choices, current, best, found);
        current.pop();
    }
}

/// Dimension of the irreducible `sl_n` representation of highest weight `l * omega_k`.
pub fn weyl_dim(l: u32, k: usize, n: usize) -> u128 {
    let lambda: Vec<i64> = (0..n).map(|i| if i < k { l as i64 } else { 0 }).collect();
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..n {
        for j in i + 1..n {
            num *= (lambda[i] - lambda[j] + (j - i) as i64) as u128;
            den *= (j - i) as u128;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
    }
    num / den
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        assert_eq!(tableau_degree(&MonopoleTableau::zero(2, 4), 0).unwrap(), 0);
        let ones = MonopoleTableau { k: 2, n: 4, rows: vec![vec![1, 1], vec![1, 1]] };
        assert_eq!(tableau_degree(&ones, 1).unwrap(), 0);
        let mut t = MonopoleTableau::zero(2, 4);
        t.rows[0][1] = 1;
        assert!(tableau_degree(&t, 0).unwrap() > 0);
    }

    #[test]
    fn malformed_diagonal_is_rejected() {
        let t = MonopoleTableau { k: 2, n: 4, rows: vec![vec![0, 0], vec![1, 0]] };
        assert!(matches!(tableau_degree(&t, 0), Err(TableauError::Malformed(_))));
    }

    #[test]
    fn weyl_dimensions() {
        assert_eq!(weyl_dim(1, 2, 4), 6);
        assert_eq!(weyl_dim(0, 2, 4), 1);
        assert_eq!(weyl_dim(1, 1, 4), 4);
        assert_eq!(weyl_dim(2, 2, 4), 20);
    }

    #[test]
    fn untwisted_minimum_is_zero_tableau() {
        let e = enumerate(2, 4, 0, 3, DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(e.tableaux, vec![MonopoleTableau::zero(2, 4)]);
        assert_eq!(e.min_degree, 0);
    }

    #[test]
    fn twisted_counts() {
        assert_eq!(enumerate_min_tableaux(2, 4, 1, 2).unwrap().len(), 6);
        assert_eq!(enumerate_min_tableaux(2, 4, 2, 2).unwrap().len(), 20);
    }

    #[test]
    fn minimal_tableaux_have_minimal_shape() {
        for l in 1..=3 {
            let ts = enumerate_min_tableaux(2, 4, l, 3).unwrap();
            assert_eq!(ts.len() as u128, weyl_dim(l as u32, 2, 4));
            assert!(ts.iter().all(|t| t.is_minimal_shape(l)));
        }
    }

    #[test]
    fn search_cap() {
        assert!(matches!(enumerate(2, 5, 0, 3, 10), Err(TableauError::SearchTooLarge { .. })));
    }
}
