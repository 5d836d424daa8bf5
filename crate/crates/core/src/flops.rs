//! Floating-point operation accounting.
//!
//! Kernels are generic over [`Flops`]; the unit type `()` counts nothing and
//! compiles away, while [`FlopCounter`] tallies every addition, subtraction,
//! multiplication and division the kernel performs.

pub trait Flops {
    fn add(&mut self, n: u64);
}

impl Flops for () {
    #[inline(always)]
    fn add(&mut self, _n: u64) {}
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopCounter {
    pub count: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Flops for FlopCounter {
    #[inline]
    fn add(&mut self, n: u64) {
        self.count += n;
    }
}
