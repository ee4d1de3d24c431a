//! Seed derivation. SplitMix64 finalizer for mixing, FNV-1a for strings.

/// SplitMix64 output function applied to `a` combined with `b`.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(b.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn hash_f64s(values: &[f64]) -> u64 {
    values
        .iter()
        .fold(values.len() as u64, |h, v| mix(h, v.to_bits()))
}

/// Seed of one experiment cell: hash64(master, experiment, alpha index, rep index).
pub fn cell_seed(master: u64, experiment: &str, alpha_index: u64, rep_index: u64) -> u64 {
    mix(mix(mix(master, hash_str(experiment)), alpha_index), rep_index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_cells_get_distinct_seeds() {
        let mut seen = std::collections::HashSet::new();
        for a in 0..10 {
            for r in 0..10 {
                assert!(seen.insert(cell_seed(7, "rotation", a, r)));
            }
        }
        assert_ne!(cell_seed(7, "rotation", 0, 0), cell_seed(7, "noise", 0, 0));
    }

    #[test]
    fn fnv_reference() {
        assert_eq!(hash_str(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(hash_str("a"), 0xaf63_dc4c_8601_ec8c);
    }
}
