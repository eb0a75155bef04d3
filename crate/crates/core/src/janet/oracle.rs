//! Brute-force dimension counts at a random point modulo a large prime.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{Poly, Scalar};
use crate::ore::{binomial, Jet, Row};

use super::basis::{JanetBasis, JetSystem};

const P: u64 = 2_305_843_009_213_693_951; // 2^61 - 1

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn reduce_int(i: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let r = ((i % &m) + &m) % &m;
    r.to_u64().expect("reduced")
}

fn reduce_rational(q: &BigRational) -> Option<u64> {
    let d = reduce_int(q.denom());
    if d == 0 {
        return None;
    }
    Some(mul(reduce_int(q.numer()), inv(d)))
}

fn eval_poly(p: &Poly, point: &[u64]) -> Option<u64> {
    let mut acc = 0;
    for (m, c) in p.terms() {
        let mut t = reduce_rational(c)?;
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                t = mul(t, pow(*point.get(i)?, e as u64));
            }
        }
        acc = add(acc, t);
    }
    Some(acc)
}

fn eval_scalar(s: &Scalar, point: &[u64]) -> Option<u64> {
    let d = eval_poly(s.denom(), point)?;
    if d == 0 {
        return None;
    }
    Some(mul(eval_poly(s.numer(), point)?, inv(d)))
}

/// Rank of rows modulo P; columns are jets, pivots taken highest first.
/// Returns the number of pivots whose jet satisfies `low`.
fn rank_split(rows: &[Row], point: &[u64], low: impl Fn(&Jet) -> bool) -> Option<(usize, usize)> {
    let mut jets: Vec<Jet> = rows.iter().flat_map(|r| r.terms().map(|(j, _)| j.clone())).collect();
    jets.sort();
    jets.dedup();
    jets.reverse();
    let col: HashMap<&Jet, usize> = jets.iter().enumerate().map(|(i, j)| (j, i)).collect();
    let mut mat: Vec<Vec<u64>> = Vec::with_capacity(rows.len());
    for r in rows {
        let mut v = vec![0u64; jets.len()];
        for (j, c) in r.terms() {
            v[col[j]] = eval_scalar(c, point)?;
        }
        mat.push(v);
    }
    let mut pivot_rows: Vec<Vec<u64>> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    // incremental elimination keeps memory proportional to the rank
    for mut v in mat {
        for (pr, &pc) in pivot_rows.iter().zip(&pivot_cols) {
            let f = v[pc];
            if f != 0 {
                for k in pc..v.len() {
                    if pr[k] != 0 {
                        v[k] = sub(v[k], mul(f, pr[k]));
                    }
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let iv = inv(v[pc]);
            for x in v.iter_mut().skip(pc) {
                *x = mul(*x, iv);
            }
            pivot_rows.push(v);
            pivot_cols.push(pc);
        }
    }
    let total = pivot_cols.len();
    let lows = pivot_cols.iter().filter(|&&c| low(&jets[c])).count();
    Some((total, lows))
}

fn random_point(nvars: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..nvars).map(|_| rng.gen_range(2..P - 1)).collect()
}

fn all_prolongations(rows: &[Row], n: usize, top: u32) -> Vec<Row> {
    let mut out = Vec::new();
    for r in rows {
        let Some(o) = r.order() else { continue };
        let mut layer: Vec<(Row, usize)> = vec![(r.clone(), 0)];
        for _ in o..=top {
            let mut next = Vec::new();
            for (x, last) in &layer {
                if x.order().unwrap_or(0) < top {
                    for i in *last..n {
                        next.push((x.prolong(i), i));
                    }
                }
                out.push(x.clone());
            }
            layer = next;
        }
    }
    out
}

fn nvars_of(rows: &[Row], n: usize) -> usize {
    rows.iter().map(Row::coeff_span).max().unwrap_or(0).max(n)
}

/// `dim R_order` of the system, from the ranks of its prolongations up to
/// `order + extra` projected back to `order`, at a random point.
pub fn rank_oracle(sys: &JetSystem, order: u32, extra: u32, seed: u64) -> u64 {
    let top = order + extra;
    let rows = all_prolongations(&sys.equations, sys.n, top);
    let nv = nvars_of(&rows, sys.n);
    for attempt in 0..16 {
        let point = random_point(nv, seed.wrapping_add(attempt));
        if let Some((_, low)) = rank_split(&rows, &point, |j| j.order() <= order) {
            return sys.m as u64 * binomial(sys.n as u64 + order as u64, order as u64) - low as u64;
        }
    }
    panic!("no pole-free point found");
}

/// `dim g_{q+1}` from the rank of the prolonged symbol of the basis.
pub fn symbol_oracle(b: &JanetBasis, seed: u64) -> u64 {
    let q = b.q;
    let mut tops = Vec::new();
    for r in b.rows() {
        if r.order() == Some(q) {
            for i in 0..b.n {
                tops.push(r.prolong(i).filter(|j| j.order() == q + 1));
            }
        }
    }
    let nv = nvars_of(b.rows(), b.n);
    let total = b.m as u64 * binomial(b.n as u64 + q as u64, q as u64 + 1);
    for attempt in 0..16 {
        let point = random_point(nv, seed.wrapping_add(attempt));
        if let Some((rank, _)) = rank_split(&tops, &point, |_| true) {
            return total - rank as u64;
        }
    }
    panic!("no pole-free point found");
}

