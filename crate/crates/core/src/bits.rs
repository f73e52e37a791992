//! Small helpers for event sets packed into a `u64`.

#[inline]
pub fn bit(i: usize) -> u64 {
    1u64 << i
}

#[inline]
pub fn contains(set: u64, i: usize) -> bool {
    set & bit(i) != 0
}

/// Iterates the members of `set` in increasing order.
pub fn iter(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let i = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(i)
        }
    })
}

#[inline]
pub fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterates_in_order() {
        assert_eq!(iter(0b1011_0010).collect::<Vec<_>>(), vec![1, 4, 5, 7]);
        assert_eq!(iter(0).count(), 0);
        assert_eq!(iter(u64::MAX).count(), 64);
        assert_eq!(full(3), 0b111);
        assert_eq!(full(64), u64::MAX);
    }
}
