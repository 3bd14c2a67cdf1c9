//! Binomial-tree schedules over group-relative indices, root at 0.

pub fn ceil_log2(p: usize) -> u32 {
    if p <= 1 {
        0
    } else {
        usize::BITS - (p - 1).leading_zeros()
    }
}

/// `(from, to)` pairs in send order: masks from the highest power of two
/// down, each holder `rel` with `rel % 2mask == 0` sending to `rel + mask`.
/// `p − 1` messages in `⌈log₂ p⌉` rounds.
pub fn broadcast_schedule(p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(p.saturating_sub(1));
    for d in (0..ceil_log2(p)).rev() {
        let mask = 1usize << d;
        for rel in (0..p).step_by(2 * mask) {
            if rel + mask < p {
                out.push((rel, rel + mask));
            }
        }
    }
    out
}

/// Mirror of [`broadcast_schedule`]: masks from 1 up, `rel + mask` sending
/// its partial to `rel`.
pub fn reduce_schedule(p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(p.saturating_sub(1));
    for d in 0..ceil_log2(p) {
        let mask = 1usize << d;
        for rel in (0..p).step_by(2 * mask) {
            if rel + mask < p {
                out.push((rel + mask, rel));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_values() {
        let got: Vec<u32> = [0, 1, 2, 3, 4, 5, 8, 9, 16].iter().map(|&p| ceil_log2(p)).collect();
        assert_eq!(got, vec![0, 0, 1, 2, 2, 3, 3, 4, 4]);
    }

    #[test]
    fn broadcast_reaches_everyone_once() {
        for p in 1..40 {
            let s = broadcast_schedule(p);
            assert_eq!(s.len(), p - 1);
            let mut has = vec![false; p];
            has[0] = true;
            for (f, t) in s {
                assert!(has[f] && !has[t]);
                has[t] = true;
            }
            assert!(has.iter().all(|&h| h));
        }
        assert_eq!(broadcast_schedule(4), vec![(0, 2), (0, 1), (2, 3)]);
    }

    #[test]
    fn reduce_collects_everyone_once() {
        for p in 1..40 {
            let s = reduce_schedule(p);
            assert_eq!(s.len(), p - 1);
            let mut done = vec![false; p];
            for (f, t) in s {
                assert!(!done[f] && !done[t]);
                done[f] = true;
            }
            assert!(!done[0]);
            assert_eq!(done.iter().filter(|&&d| d).count(), p - 1);
        }
    }
}
