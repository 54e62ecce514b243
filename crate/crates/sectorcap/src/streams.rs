//! Random stream ids. Each experiment family owns the upper 32 bits; the
//! lower 32 bits index rows or orientations within it.

pub const ROC: u64 = 1;
pub const BEAMS: u64 = 2;
pub const ORIENTATIONS: u64 = 3;
pub const FRAMES: u64 = 4;
/// Validation criteria use `VALIDATION + criterion`.
pub const VALIDATION: u64 = 16;

pub const fn id(family: u64, index: u64) -> u64 {
    (family << 32) | (index & 0xffff_ffff)
}
