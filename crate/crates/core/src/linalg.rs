//! Dense linear algebra over a prime field, for the obstruction solver.

use alloc::vec;
use alloc::vec::Vec;

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime and small, Fermat is fine
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Solves `A x = b` over `F_p`; `rows` are the rows of `A`. Returns the
/// solution with all free variables zero, or `None` if inconsistent.
pub(crate) fn solve_mod_p(rows: &[Vec<u32>], rhs: &[u32], cols: usize, p: u32) -> Option<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut row = r.clone();
            row.push(b % p);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let iv = inv_mod(m[r][c], p);
        for v in m[r].iter_mut() {
            *v = (*v as u64 * iv as u64 % p as u64) as u32;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for k in c..=cols {
                    let sub = (f as u64 * m[r][k] as u64 % p as u64) as u32;
                    m[i][k] = (m[i][k] + p - sub) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| row[cols] != 0) {
        return None;
    }
    let mut x = vec![0u32; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        // x + y = 1, y = 1 over F2
        let x = solve_mod_p(&[vec![1, 1], vec![0, 1]], &[1, 1], 2, 2).unwrap();
        assert_eq!(x, vec![0, 1]);
        assert!(solve_mod_p(&[vec![1, 1], vec![1, 1]], &[0, 1], 2, 2).is_none());
        let x = solve_mod_p(&[vec![2, 1]], &[1], 2, 3).unwrap();
        assert_eq!((2 * x[0] + x[1]) % 3, 1);
    }
}
