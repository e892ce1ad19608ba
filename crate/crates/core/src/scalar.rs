use std::fmt::Debug;
use std::iter::Sum;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Numbers that support exact field arithmetic on counts.
///
/// Implemented for every primitive float and for [`crate::Exact`].
pub trait Scalar:
    Clone + Num + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Clone + Num + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// Floating point scalars used by the embedding trainer and the scoring code.
///
/// `Cell` is the lock-free storage used by the parallel trainer, where
/// concurrent updates to the same row are allowed to race.
pub trait Real: Scalar + Float + Sum + Copy + Default {
    type Cell: Send + Sync;

    fn new_cell(v: Self) -> Self::Cell;
    fn load(cell: &Self::Cell) -> Self;
    fn store(cell: &Self::Cell, v: Self);

    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 not representable")
    }
}

impl Real for f32 {
    type Cell = AtomicU32;

    fn new_cell(v: f32) -> AtomicU32 {
        AtomicU32::new(v.to_bits())
    }
    fn load(cell: &AtomicU32) -> f32 {
        f32::from_bits(cell.load(Ordering::Relaxed))
    }
    fn store(cell: &AtomicU32, v: f32) {
        cell.store(v.to_bits(), Ordering::Relaxed)
    }
}

impl Real for f64 {
    type Cell = AtomicU64;

    fn new_cell(v: f64) -> AtomicU64 {
        AtomicU64::new(v.to_bits())
    }
    fn load(cell: &AtomicU64) -> f64 {
        f64::from_bits(cell.load(Ordering::Relaxed))
    }
    fn store(cell: &AtomicU64, v: f64) {
        cell.store(v.to_bits(), Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    #[test]
    fn exact_counts_roundtrip() {
        let x = Exact::from_count(7) / Exact::from_count(3);
        assert_eq!(x, Exact::new(7, 3));
        assert!((x.to_f64_lossy() - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn atomic_cells() {
        let c = f32::new_cell(1.5);
        f32::store(&c, -2.25);
        assert_eq!(f32::load(&c), -2.25);
        let c = f64::new_cell(0.1);
        assert_eq!(f64::load(&c), 0.1);
    }
}
