use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FieldKind, JetCoordinateId, JetError, JetPoint};
use crate::C64;

/// Knobs for [`sample_generic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    /// Force field values `u^r` to have positive real part (needed for `u^λ`).
    pub positive_fields: bool,
    /// Smallest magnitude of any sampled component.
    pub min_abs: f64,
    /// Largest magnitude of any sampled component.
    pub max_abs: f64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            positive_fields: true,
            min_abs: 0.5,
            max_abs: 2.0,
        }
    }
}

// Minimum separation between diagonal second derivatives of one field.
const DIAGONAL_GAP: f64 = 1e-6;

/// Draws a deterministic generic point: every component has magnitude in
/// `[0.5, 2.0]` with a random sign, and diagonal second derivatives of each
/// field are pairwise distinct.
///
/// Complex points draw real and imaginary parts independently and copy
/// conjugates into the partner slots.
pub fn sample_generic(
    n_base: usize,
    n_fields: usize,
    kind: FieldKind,
    seed: u64,
) -> Result<JetPoint, JetError> {
    sample_with(n_base, n_fields, kind, seed, SampleOptions::default())
}

pub fn sample_with(
    n_base: usize,
    n_fields: usize,
    kind: FieldKind,
    seed: u64,
    opts: SampleOptions,
) -> Result<JetPoint, JetError> {
    let mut p = JetPoint::zeros(n_base, n_fields, kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = p.shape();
    let mut draw = |rng: &mut ChaCha8Rng, positive: bool| -> f64 {
        let mag = rng.gen_range(opts.min_abs..=opts.max_abs);
        if positive || rng.gen_bool(0.5) {
            mag
        } else {
            -mag
        }
    };

    let ids: Vec<JetCoordinateId> = shape.coordinates().collect();
    for id in ids {
        let owner = match id.field() {
            Some(r) if r >= n_fields => continue,
            other => other,
        };
        let positive = opts.positive_fields && matches!(id, JetCoordinateId::Field(_));
        let re = draw(&mut rng, positive);
        let value = match (kind, owner) {
            (FieldKind::Complex, Some(_)) => C64::new(re, draw(&mut rng, false)),
            _ => C64::new(re, 0.0),
        };
        p.set(id, value)?;
    }

    for r in 0..n_fields {
        separate_diagonal(&mut p, r, &mut rng, &mut draw)?;
    }
    if kind == FieldKind::Complex {
        copy_conjugates(&mut p);
    }
    Ok(p)
}

fn separate_diagonal(
    p: &mut JetPoint,
    r: usize,
    rng: &mut ChaCha8Rng,
    draw: &mut impl FnMut(&mut ChaCha8Rng, bool) -> f64,
) -> Result<(), JetError> {
    let n = p.n_base();
    for i in 1..n {
        while (0..i).any(|j| (p.ddu(r, i, i) - p.ddu(r, j, j)).norm() <= DIAGONAL_GAP) {
            let im = p.ddu(r, i, i).im;
            p.set(JetCoordinateId::D2 { field: r, i, j: i }, C64::new(draw(rng, false), im))?;
        }
    }
    Ok(())
}

fn copy_conjugates(p: &mut JetPoint) {
    let m = p.n_fields();
    let shape = p.shape();
    let ids: Vec<JetCoordinateId> = shape.coordinates().collect();
    for id in ids {
        let Some(r) = id.field() else { continue };
        if r >= m {
            continue;
        }
        let partner = match id {
            JetCoordinateId::Field(_) => JetCoordinateId::Field(r + m),
            JetCoordinateId::D1 { i, .. } => JetCoordinateId::D1 { field: r + m, i },
            JetCoordinateId::D2 { i, j, .. } => JetCoordinateId::D2 { field: r + m, i, j },
            JetCoordinateId::Base(_) => unreachable!(),
        };
        let v = p.values()[shape.index_unchecked(id)];
        p.values_mut()[shape.index_unchecked(partner)] = v.conj();
    }
}
