use num_integer::Integer as _;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Integer, IntMatrix};

/// `u * a * v = s` with `s` in Smith normal form and `u`, `v` unimodular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Diagonal of `s`: nonnegative, each entry dividing the next, zeros last.
    pub fn invariant_factors(&self) -> Vec<Integer> {
        self.s.diagonal()
    }
}

/// Smith normal form by repeated least-magnitude pivoting.
///
/// Row operations are mirrored on `u`, column operations on `v`. Pivot signs
/// are fixed by negating a column, so the sign ends up in `v`.
pub fn snf(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&s, t) else {
                return SnfResult { u, s, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = s[(t, t)].clone();
            let mut leftover = false;
            for i in t + 1..m {
                let q = &s[(i, t)] / &pivot;
                let nq = -q;
                s.add_row_multiple(i, t, &nq);
                u.add_row_multiple(i, t, &nq);
                leftover |= !s[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = &s[(t, j)] / &pivot;
                let nq = -q;
                s.add_col_multiple(j, t, &nq);
                v.add_col_multiple(j, t, &nq);
                leftover |= !s[(t, j)].is_zero();
            }
            if leftover {
                continue;
            }

            // Pivot must divide the whole remaining block.
            let bad_row = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&pivot))
            });
            match bad_row {
                Some(i) => {
                    let one = Integer::from(1);
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_col(t);
            v.negate_col(t);
        }
    }
    SnfResult { u, s, v }
}

fn smallest_nonzero(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = &s[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < s[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn check(a: &IntMatrix) -> SnfResult {
        let r = snf(a);
        assert_eq!(&(&r.u * a) * &r.v, r.s);
        assert!(r.s.is_diagonal());
        let d = r.invariant_factors();
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        assert_eq!(r.u.det().unwrap().abs(), int(1));
        assert_eq!(r.v.det().unwrap().abs(), int(1));
        r
    }

    #[test]
    fn identity_is_fixed() {
        let i3 = IntMatrix::identity(3);
        let r = check(&i3);
        assert_eq!(r, SnfResult { u: i3.clone(), s: i3.clone(), v: i3 });
    }

    #[test]
    fn two_by_two_example() {
        let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let r = check(&a);
        assert_eq!(r.s, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        // d1 * d2 = |det a| = 8
        assert_eq!(&r.s[(0, 0)] * &r.s[(1, 1)], a.det().unwrap().abs());
    }

    #[test]
    fn zero_and_empty() {
        let r = check(&IntMatrix::from_i64(&[&[0]]));
        assert_eq!(r.s, IntMatrix::from_i64(&[&[0]]));
        check(&IntMatrix::zeros(0, 0));
        check(&IntMatrix::zeros(3, 0));
        check(&IntMatrix::zeros(0, 2));
        check(&IntMatrix::zeros(2, 3));
    }

    #[test]
    fn negative_pivot_sign_goes_to_v() {
        let r = check(&IntMatrix::from_i64(&[&[-6]]));
        assert_eq!(r.s, IntMatrix::from_i64(&[&[6]]));
        assert_eq!(r.u, IntMatrix::identity(1));
        assert_eq!(r.v, IntMatrix::from_i64(&[&[-1]]));
    }

    #[test]
    fn needs_divisibility_repair() {
        // diag(2, 3) is diagonal but not Smith: expect diag(1, 6)
        let r = check(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(r.invariant_factors(), vec![int(1), int(6)]);
    }

    #[test]
    fn rectangular() {
        let r = check(&IntMatrix::from_i64(&[&[2, 0], &[0, 0]]));
        assert_eq!(r.invariant_factors(), vec![int(2), int(0)]);
        let r = check(&IntMatrix::from_i64(&[&[4, 6, 8]]));
        assert_eq!(r.invariant_factors(), vec![int(2)]);
    }
}
