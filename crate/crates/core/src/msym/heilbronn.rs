//! Heilbronn matrices: Cremona's determinant-p family for prime Hecke
//! operators, and Merel's determinant-n family (valid for every n) used for
//! composite indices and as a cross-check.

use crate::weight::{det, GL2};

/// Cremona's Heilbronn matrices of determinant p (p prime).
pub fn heilbronn_cremona(p: u64) -> Vec<GL2> {
    let p = p as i64;
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let mut out: Vec<GL2> = vec![[1, 0, 0, p]];
    for r in -(p / 2)..=(p / 2) {
        let mut x1 = p;
        let mut x2 = -r;
        let mut y1 = 0i64;
        let mut y2 = 1i64;
        let mut a = -p;
        let mut b = r;
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let q = round_div(a, b);
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

/// nearest integer to a/b, halves away from zero
fn round_div(a: i64, b: i64) -> i64 {
    let q2 = 2 * a;
    let d = 2 * b;
    let (q, r) = (q2.div_euclid(d), q2.rem_euclid(d));
    if 2 * r >= d.abs() {
        q + 1
    } else {
        q
    }
}

/// Merel's matrices of determinant n: the universal family computing T_n on
/// Manin symbols for every n (triangular part b < a resp. c < d, plus the
/// bc = ad - n solutions with b < a, c < d).
pub fn heilbronn_merel(n: u64) -> Vec<GL2> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        let q = n / a;
        if q * a == n {
            let d = q;
            for b in 0..a {
                out.push([a, b, 0, d]);
            }
            for c in 1..d {
                out.push([a, 0, c, d]);
            }
        }
        for d in q + 1..=n {
            let m = a * d - n;
            for c in 1..d {
                if m % c == 0 {
                    let b = m / c;
                    if b < a {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

pub fn all_det(mats: &[GL2], n: i64) -> bool {
    mats.iter().all(|m| det(m) == n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cremona_determinants() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let h = heilbronn_cremona(p);
            assert!(all_det(&h, p as i64), "p = {p}");
            assert!(!h.is_empty());
        }
    }

    #[test]
    fn cremona_p3_known_list() {
        let h = heilbronn_cremona(3);
        assert_eq!(h.len(), 6);
        assert!(h.contains(&[1, 0, 0, 3]));
        assert!(h.contains(&[3, 1, 0, 1]));
        assert!(h.contains(&[1, 0, 1, 3]));
        assert!(h.contains(&[3, 0, 0, 1]));
        assert!(h.contains(&[3, -1, 0, 1]));
        assert!(h.contains(&[-1, 0, 1, -3]));
    }

    #[test]
    fn merel_determinants_and_counts() {
        for n in [2u64, 3, 4, 5, 6, 9] {
            let h = heilbronn_merel(n);
            assert!(all_det(&h, n as i64), "n = {n}");
        }
        assert_eq!(heilbronn_merel(2).len(), 4);
        assert_eq!(heilbronn_merel(3).len(), 7);
    }
}
