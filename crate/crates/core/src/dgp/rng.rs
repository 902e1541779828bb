use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random-number streams of one Monte Carlo replication.
///
/// Every replication owns a family of independent ChaCha8 streams, one per
/// `lane` (a covariate column, the regression noise, ...). The generator for
/// `(base_seed, replication, lane)` is keyed by `mix(base_seed, lane)` and
/// uses `replication` as its stream id, so draws never depend on the order
/// in which replications are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicationSeed {
    pub base_seed: u64,
    pub replication: u64,
}

/// Lanes `0..RESPONSE_LANE` are reserved for covariate innovations.
pub const RESPONSE_LANE: u64 = 1 << 32;

impl ReplicationSeed {
    pub fn new(base_seed: u64, replication: u64) -> Self {
        ReplicationSeed { base_seed, replication }
    }

    pub fn rng(&self, lane: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(
            self.base_seed ^ splitmix64(lane.wrapping_add(0x5851_f42d_4c95_7f2d)),
        ));
        rng.set_stream(self.replication);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
