use alloc::vec;
use alloc::vec::Vec;

/// Natural (filter-path) leaf indices listed from the lowest to the highest
/// frequency band: `gray_order(J)[m]` is the leaf covering band `m`.
///
/// Decimating a highpass output mirrors its spectrum, so the two children of
/// a node whose band has odd frequency rank swap places. Starting from
/// `[0, 1]` at depth 1, a child pair is emitted low-then-high under an
/// even-ranked parent and high-then-low under an odd-ranked one, which yields
/// the binary reflected Gray code.
pub fn gray_order(depth: u32) -> Vec<usize> {
    assert!(depth >= 1, "depth must be at least 1");
    let mut order = vec![0usize, 1];
    for _ in 1..depth {
        let mut next = Vec::with_capacity(order.len() * 2);
        for (rank, &node) in order.iter().enumerate() {
            let (low, high) = (2 * node, 2 * node + 1);
            if rank % 2 == 0 {
                next.extend([low, high]);
            } else {
                next.extend([high, low]);
            }
        }
        order = next;
    }
    order
}

/// Inverse of [`gray_order`]: `frequency_rank(J)[n]` is the band index
/// (0 = lowest) of natural leaf `n`.
pub fn frequency_rank(depth: u32) -> Vec<usize> {
    let order = gray_order(depth);
    let mut rank = vec![0; order.len()];
    for (m, &n) in order.iter().enumerate() {
        rank[n] = m;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_depths() {
        assert_eq!(gray_order(1), [0, 1]);
        assert_eq!(gray_order(2), [0, 1, 3, 2]);
        assert_eq!(gray_order(3), [0, 1, 3, 2, 6, 7, 5, 4]);
        assert_eq!(frequency_rank(3), [0, 1, 3, 2, 7, 6, 4, 5]);
    }

    #[test]
    fn equals_reflected_gray_code_and_is_a_bijection() {
        for depth in 1..=12 {
            let order = gray_order(depth);
            let mut seen = vec![false; order.len()];
            for (m, &n) in order.iter().enumerate() {
                assert_eq!(n, m ^ (m >> 1));
                assert!(!seen[n]);
                seen[n] = true;
            }
        }
    }
}
