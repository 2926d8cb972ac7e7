// SPDX-License-Identifier: Apache-2.0

//! Seeded, platform-independent random source used by every generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type BenchRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> BenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}
