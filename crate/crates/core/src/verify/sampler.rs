use crate::jetspace::{sample_with, FieldKind, JetPoint, SampleOptions};
use crate::liealg::AlgebraSpec;

/// Deterministic source of generic jet points of one shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    pub n_base: usize,
    pub n_fields: usize,
    pub kind: FieldKind,
    pub opts: SampleOptions,
}

impl Sampler {
    pub fn new(n_base: usize, n_fields: usize, kind: FieldKind) -> Self {
        Sampler {
            n_base,
            n_fields,
            kind,
            opts: SampleOptions::default(),
        }
    }

    pub fn for_spec(spec: &AlgebraSpec) -> Self {
        Sampler::new(spec.geometry().n_base(), spec.m, spec.field_kind())
    }

    /// Point number `index` of the stream `seed`.
    pub fn sample(&self, seed: u64, index: u64) -> JetPoint {
        sample_with(self.n_base, self.n_fields, self.kind, point_seed(seed, index), self.opts)
            .expect("sampler shape validated at construction")
    }
}

fn point_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 of the pair
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
