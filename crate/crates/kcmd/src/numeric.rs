//! Deterministic numeric helpers: compensated summation and seed splitting.

/// Neumaier-compensated accumulator. Summation order is fixed by the caller,
/// so results are reproducible across runs and thread counts.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums an iterator with compensation, in iteration order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Counter-based seed derivation (the splitmix64 output function applied to
/// `master + (index+1)·golden`). Replicate `i` gets the same seed no matter
/// how replicates are scheduled across threads.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    let golden = 0x9E37_79B9_7F4A_7C15u64;
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(golden));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
