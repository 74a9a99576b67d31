//! Bipartite matching for choosing distinct witness edges (a system of
//! distinct representatives).

/// Augmenting-path matching. `options[i]` lists the right-hand items that
/// left item `i` may take. Returns, for each left item, its assigned right
/// item, or `None` when no matching saturates the left side.
pub fn saturating_matching(options: &[Vec<usize>], right_len: usize) -> Option<Vec<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; right_len];
    for left in 0..options.len() {
        let mut seen = vec![false; right_len];
        if !augment(left, options, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut assigned = vec![usize::MAX; options.len()];
    for (right, o) in owner.iter().enumerate() {
        if let Some(left) = *o {
            assigned[left] = right;
        }
    }
    Some(assigned)
}

fn augment(
    left: usize,
    options: &[Vec<usize>],
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &r in &options[left] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if owner[r].is_none_or(|other| augment(other, options, owner, seen)) {
            owner[r] = Some(left);
            return true;
        }
    }
    false
}
