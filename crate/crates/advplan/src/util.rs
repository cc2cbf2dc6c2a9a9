//! Small shared helpers: bounded subset enumeration for the exhaustive
//! interdiction searches.

/// Number of subsets of size ≤ k from p candidates, saturating.
pub(crate) fn subset_count(p: u64, k: u32) -> u64 {
    let mut total: u64 = 0;
    let mut c: u64 = 1; // C(p, 0)
    for j in 0..=k as u64 {
        if j > 0 {
            if p < j {
                break;
            }
            c = match c.checked_mul(p - j + 1) {
                Some(v) => v / j,
                None => return u64::MAX,
            };
        }
        total = total.saturating_add(c);
    }
    total
}

/// Advance `idx` to the next k-combination of 0..n in lexicographic
/// order; false once exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visit all subsets of `items` of size 0..=k, size-ascending,
/// lexicographic within a size. Stops early when `f` returns false.
pub(crate) fn for_each_subset<T, F: FnMut(&[T]) -> bool>(items: &[T], k: u32, mut f: F)
where
    T: Copy,
{
    if !f(&[]) {
        return;
    }
    let mut chosen: Vec<T> = Vec::new();
    for size in 1..=(k as usize).min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            chosen.clear();
            chosen.extend(idx.iter().map(|&i| items[i]));
            if !f(&chosen) {
                return;
            }
            if !next_combination(&mut idx, items.len()) {
                break;
            }
        }
    }
}
