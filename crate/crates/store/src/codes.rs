//! Meeting-code generation: short lowercase base-32 strings, easy to share
//! verbally or paste into a URL.

use rand::Rng;

/// 32 unambiguous characters: the lowercase alphabet plus digits 2–7.
pub const CODE_ALPHABET: &[u8; 32] = b"abcdefghijklmnopqrstuvwxyz234567";

/// Code length — 32⁸ ≈ 1.1 × 10¹² possible codes.
pub const CODE_LEN: usize = 8;

/// Draw one meeting code from `rng`.
pub fn meeting_code<R: Rng + ?Sized>(rng: &mut R) -> String {
    (0..CODE_LEN).map(|_| CODE_ALPHABET[rng.random_range(0..CODE_ALPHABET.len())] as char).collect()
}

/// Check a string is a well-formed meeting code.
pub fn is_meeting_code(s: &str) -> bool {
    s.len() == CODE_LEN && s.bytes().all(|b| CODE_ALPHABET.contains(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn codes_have_fixed_length_and_alphabet() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let code = meeting_code(&mut rng);
            assert!(is_meeting_code(&code), "{code}");
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let mut a = StdRng::seed_from_u64(11);
        let mut b = StdRng::seed_from_u64(11);
        assert_eq!(meeting_code(&mut a), meeting_code(&mut b));
    }

    #[test]
    fn distinct_draws_are_distinct() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = meeting_code(&mut rng);
        let b = meeting_code(&mut rng);
        assert_ne!(a, b);
    }
}
