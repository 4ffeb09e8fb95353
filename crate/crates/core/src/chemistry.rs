//! Base-pairing binding rule between transcription factors and regulatory sites.

use crate::genome::Base;

pub fn complements(a: Base, b: Base) -> bool {
    a.complement() == b
}

/// Number of aligned complementary positions. Sequences are compared from
/// position 0 and the surplus of the longer one is ignored. Zero means the
/// pair does not bind.
pub fn binding_strength(tf: &[Base], site: &[Base]) -> u32 {
    tf.iter()
        .zip(site)
        .filter(|(&a, &b)| complements(a, b))
        .count() as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::DnaSequence;
    use proptest::prelude::*;

    fn seq(s: &str) -> DnaSequence {
        s.parse().unwrap()
    }

    fn strength(a: &str, b: &str) -> u32 {
        binding_strength(seq(a).bases(), seq(b).bases())
    }

    #[test]
    fn pairing_table() {
        use Base::*;
        let pairs = [(A, T), (T, A), (G, C), (C, G)];
        for a in Base::ALL {
            for b in Base::ALL {
                assert_eq!(complements(a, b), pairs.contains(&(a, b)), "{a}{b}");
            }
        }
    }

    #[test]
    fn strength_examples() {
        assert_eq!(strength("ATGC", "TACG"), 4);
        assert_eq!(strength("AAA", "AAA"), 0);
        assert_eq!(strength("AT", "TAGC"), 2);
        assert_eq!(strength("", "ACGT"), 0);
    }

    fn bases() -> impl Strategy<Value = Vec<Base>> {
        prop::collection::vec(prop::sample::select(Base::ALL.to_vec()), 0..40)
    }

    proptest! {
        #[test]
        fn symmetric(a in bases(), b in bases()) {
            prop_assert_eq!(binding_strength(&a, &b), binding_strength(&b, &a));
        }

        #[test]
        fn bounded_by_shorter(a in bases(), b in bases()) {
            prop_assert!(binding_strength(&a, &b) as usize <= a.len().min(b.len()));
        }

        #[test]
        fn extending_longer_sequence_is_neutral(a in bases(), b in bases(), extra in bases()) {
            let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            let mut extended = long.clone();
            extended.extend(extra);
            prop_assert_eq!(binding_strength(&short, &long), binding_strength(&short, &extended));
        }

        #[test]
        fn complement_strand_binds_fully(a in bases()) {
            let comp: Vec<Base> = a.iter().map(|b| b.complement()).collect();
            prop_assert_eq!(binding_strength(&a, &comp) as usize, a.len());
            // no base pairs with itself
            prop_assert_eq!(binding_strength(&a, &a), 0);
        }
    }
}
