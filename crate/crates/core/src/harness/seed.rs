//! Per-run seed derivation.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for run `run` of cell `cell` under `master`.
///
/// Each input is folded through a bijective multiply-xor-shift finalizer, so
/// for a fixed `(master, cell)` distinct runs always get distinct seeds.
pub fn derive_run_seed(master: u64, cell: u64, run: u64) -> u64 {
    let h = mix(master.wrapping_add(GOLDEN));
    let h = mix(h ^ cell.wrapping_mul(GOLDEN).wrapping_add(1));
    mix(h ^ run)
}
