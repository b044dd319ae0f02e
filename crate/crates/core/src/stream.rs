use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for one `(seed, domain, block, index)` coordinate.
///
/// Every randomised quantity in the crate draws from its own keyed stream so
/// results do not depend on evaluation order or thread count.
pub(crate) fn substream(seed: u64, domain: u64, block: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    key[16..24].copy_from_slice(&block.to_le_bytes());
    key[24..].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
