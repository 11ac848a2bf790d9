//! The difference operator `Δ P(V) = P(V + 1) − P(V)` on `Q[V]_{≤d}`.
//!
//! `Δ` kills exactly the constants and maps `Q[V]_{≤d}` onto `Q[V]_{≤d−1}`;
//! preimages come from the falling factorials, `Δ (V)_{k+1} = (k+1)(V)_k`.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::binomial;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Q128 = Ratio<i128>;

pub const MAX_DEGREE: usize = 12;

/// Coefficients, lowest degree first.
pub type Poly = Vec<Q128>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// `P(V + 1) − P(V)`.
pub fn delta(p: &[Q128]) -> Poly {
    let mut out = vec![Q128::zero(); p.len().saturating_sub(1)];
    for (j, c) in p.iter().enumerate() {
        for (i, slot) in out.iter_mut().enumerate().take(j) {
            *slot += *c * Q128::from(binomial(j as i128, i as i128));
        }
    }
    trim(out)
}

/// Matrix of `Δ` from degree `≤ d` to degree `≤ d`, column `j` = `Δ V^j`.
pub fn delta_matrix(d: usize) -> Vec<Vec<Q128>> {
    let mut m = vec![vec![Q128::zero(); d + 1]; d + 1];
    for j in 0..=d {
        let mut e = vec![Q128::zero(); j + 1];
        e[j] = Q128::one();
        for (i, c) in delta(&e).into_iter().enumerate() {
            m[i][j] = c;
        }
    }
    m
}

/// Null space basis by reduced row echelon form.
pub fn null_space(a: &[Vec<Q128>]) -> Vec<Poly> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Q128>> = a.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(i) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, i);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let t = m[r][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![Q128::zero(); cols];
            v[free] = Q128::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m[row][free];
            }
            v
        })
        .collect()
}

/// Stirling numbers of the second kind `S(n, k)`, `n, k ≤ d`.
fn stirling2(d: usize) -> Vec<Vec<i128>> {
    let mut s = vec![vec![0i128; d + 1]; d + 1];
    s[0][0] = 1;
    for n in 1..=d {
        for k in 1..=n {
            s[n][k] = k as i128 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    s
}

/// Monomial coefficients of `(V)_k = V(V−1)⋯(V−k+1)`.
fn falling(k: usize) -> Vec<i128> {
    let mut p = vec![1i128];
    for j in 0..k as i128 {
        let mut next = vec![0i128; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= j * c;
        }
        p = next;
    }
    p
}

/// `Q` with `Δ Q = V^e`: `V^e = Σ_k S(e,k)(V)_k` and `(V)_k = Δ (V)_{k+1}/(k+1)`.
pub fn preimage_of_monomial(e: usize) -> Poly {
    let s = stirling2(e);
    let mut out = vec![Q128::zero(); e + 2];
    for k in 0..=e {
        if s[e][k] == 0 {
            continue;
        }
        let c = Q128::new(s[e][k], k as i128 + 1);
        for (i, f) in falling(k + 1).into_iter().enumerate() {
            out[i] += c * Q128::from(f);
        }
    }
    trim(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinDiffReport {
    pub deg_bound: usize,
    /// Basis of `ker Δ` on degree `≤ d`.
    pub kernel: Vec<Poly>,
    pub kernel_is_constants: bool,
    /// `preimages[e]` is a polynomial of degree `e + 1` with `Δ = V^e`, `e < d`.
    pub preimages: Vec<Poly>,
    pub surjective_below_bound: bool,
}

impl FinDiffReport {
    pub fn ok(&self) -> bool {
        self.kernel_is_constants && self.surjective_below_bound
    }
}

pub fn finite_difference_cohomology(deg_bound: usize) -> Result<FinDiffReport> {
    if deg_bound > MAX_DEGREE {
        return Err(Error::Unsupported("degree bound above 12".into()));
    }
    let kernel = null_space(&delta_matrix(deg_bound));
    let kernel_is_constants =
        kernel.len() == 1 && kernel[0].iter().skip(1).all(Zero::is_zero) && !kernel[0][0].is_zero();
    let preimages: Vec<Poly> = (0..deg_bound).map(preimage_of_monomial).collect();
    let surjective_below_bound = preimages.iter().enumerate().all(|(e, q)| {
        let mut want = vec![Q128::zero(); e + 1];
        want[e] = Q128::one();
        q.len() == e + 2 && delta(q) == want
    });
    Ok(FinDiffReport { deg_bound, kernel, kernel_is_constants, preimages, surjective_below_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i128, b: i128) -> Q128 {
        Q128::new(a, b)
    }

    #[test]
    fn small_differences() {
        assert!(delta(&[q(1, 1)]).is_empty());
        assert_eq!(delta(&[q(0, 1), q(1, 1)]), vec![q(1, 1)]);
        // Δ V^2 = 2V + 1.
        assert_eq!(delta(&[q(0, 1), q(0, 1), q(1, 1)]), vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn sum_of_squares_preimage() {
        // Σ_{v<V} v^2 = V^3/3 − V^2/2 + V/6.
        assert_eq!(preimage_of_monomial(2), vec![q(0, 1), q(1, 6), q(-1, 2), q(1, 3)]);
    }

    /// `Δ` restricted to degrees `1..=d` is upper triangular onto degrees `0..d`.
    fn triangular_solve(target: &[Q128], d: usize) -> Poly {
        let m = delta_matrix(d);
        let mut x = vec![Q128::zero(); d + 1];
        for i in (0..d).rev() {
            let mut r = target.get(i).copied().unwrap_or_else(Q128::zero);
            for j in i + 2..=d {
                r -= m[i][j] * x[j];
            }
            x[i + 1] = r / m[i][i + 1];
        }
        trim(x)
    }

    #[test]
    fn preimages_agree_with_triangular_oracle() {
        for d in [4, 8, 12] {
            let rep = finite_difference_cohomology(d).unwrap();
            assert!(rep.ok());
            for (e, p) in rep.preimages.iter().enumerate() {
                let mut t = vec![Q128::zero(); e + 1];
                t[e] = Q128::one();
                // Preimages are unique up to constants; ours has zero constant term.
                assert_eq!(*p, triangular_solve(&t, d), "e={e}");
            }
        }
        assert!(finite_difference_cohomology(13).is_err());
    }

    #[test]
    fn kernel_is_the_constants() {
        for d in 0..=MAX_DEGREE {
            let k = finite_difference_cohomology(d).unwrap().kernel;
            assert_eq!(
                k,
                vec![{
                    let mut v = vec![Q128::zero(); d + 1];
                    v[0] = Q128::one();
                    v
                }]
            );
        }
    }
}
