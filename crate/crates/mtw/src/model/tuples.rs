//! Enumeration of τ(r, n): n-tuples of nonnegative integers summing to r.

/// All n-tuples of nonnegative integers that sum to r, in lexicographic
/// order. The count is C(r + n − 1, n − 1).
pub fn tuples(r: usize, n: usize) -> Vec<Vec<usize>> {
    assert!(n >= 1, "tuples requires n >= 1");
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fill(r, 0, &mut current, &mut out);
    out
}

fn fill(remaining: usize, idx: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if idx == current.len() - 1 {
        current[idx] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[idx] = v;
        fill(remaining - v, idx + 1, current, out);
    }
}

/// C(r + n − 1, n − 1) without enumerating.
pub fn tuples_count(r: usize, n: usize) -> u128 {
    assert!(n >= 1);
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..(n - 1) {
        num *= (r + n - 1 - i) as u128;
        den *= (i + 1) as u128;
    }
    num / den
}
