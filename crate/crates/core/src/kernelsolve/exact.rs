//! Sparse fraction-free elimination over the integers.
//!
//! Rows are cleared of denominators and kept primitive (content divided out
//! after every combination), so the only arithmetic is on `BigInt`.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::scalar::Rational;

type IntRow = Vec<(usize, BigInt)>;

/// Scales a rational row to a primitive integer row with positive lead.
fn to_primitive(row: &[(usize, Rational)]) -> IntRow {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut out: IntRow = row
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect();
    out.sort_by_key(|(c, _)| *c);
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let Some((_, lead)) = row.first() else {
        return;
    };
    let negate = lead.is_negative();
    let g = row
        .iter()
        .fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if g.is_one() && !negate {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v = &*v / &g;
        if negate {
            *v = -&*v;
        }
    }
}

/// `a·x - b·y` for sorted sparse rows.
fn combine(a: &BigInt, x: &IntRow, b: &BigInt, y: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, a * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Eliminates entry `col` of `row` using `pivot` (whose entry at `col` is
/// nonzero).
fn eliminate(row: &IntRow, pivot: &IntRow, col: usize) -> IntRow {
    let rv = &row.iter().find(|(c, _)| *c == col).expect("entry present").1;
    let pv = &pivot.iter().find(|(c, _)| *c == col).expect("pivot present").1;
    let g = rv.gcd(pv);
    let a = pv / &g;
    let b = rv / &g;
    let mut out = combine(&a, row, &b, pivot);
    make_primitive(&mut out);
    out
}

/// Row echelon form keyed by leading column.
fn echelon(rows: impl IntoIterator<Item = IntRow>) -> BTreeMap<usize, IntRow> {
    let mut pivots: BTreeMap<usize, IntRow> = BTreeMap::new();
    for mut row in rows {
        while let Some(&(lead, _)) = row.first() {
            match pivots.get(&lead) {
                Some(p) => row = eliminate(&row, p, lead),
                None => {
                    make_primitive(&mut row);
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots
}

pub(crate) fn rank(rows: &[Vec<(usize, Rational)>]) -> usize {
    echelon(rows.iter().map(|r| to_primitive(r))).len()
}

/// Kernel basis of the matrix with the given sparse rows: one vector per
/// free column `f`, with `x_f = 1` and zeros on the other free columns.
pub(crate) fn kernel(rows: &[Vec<(usize, Rational)>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = echelon(rows.iter().map(|r| to_primitive(r)));

    // back-substitute to reduced form, highest lead first
    let leads: Vec<usize> = pivots.keys().rev().copied().collect();
    for &lead in &leads {
        let mut row = pivots.remove(&lead).expect("pivot row");
        loop {
            let next = row
                .iter()
                .skip(1)
                .map(|(c, _)| *c)
                .find(|c| pivots.contains_key(c));
            match next {
                Some(c) => row = eliminate(&row, &pivots[&c], c),
                None => break,
            }
        }
        pivots.insert(lead, row);
    }

    let mut is_pivot = vec![false; ncols];
    for &lead in pivots.keys() {
        is_pivot[lead] = true;
    }
    let free: Vec<usize> = (0..ncols).filter(|&c| !is_pivot[c]).collect();
    let free_pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut basis = vec![vec![Rational::zero(); ncols]; free.len()];
    for (i, &f) in free.iter().enumerate() {
        basis[i][f] = Rational::one();
    }
    for (&lead, row) in &pivots {
        let lead_val = &row[0].1;
        for (c, v) in row.iter().skip(1) {
            let i = free_pos[c];
            basis[i][lead] = -Rational::new(v.clone(), lead_val.clone());
        }
    }
    basis
}
