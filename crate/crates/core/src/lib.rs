//! Exact invariants of knot complements and sutured manifolds with torus
//! boundary: group rings over finitely generated abelian groups, torsion via
//! free differential calculus, combinatorial knot Floer homology of
//! doubly-pointed genus-1 Heegaard diagrams, and the detection criteria that
//! tie them together. All arithmetic is exact; no floating point anywhere.

pub mod abelian;
pub mod cli;
pub mod cyclotomic;
pub mod decomp;
pub mod diagram;
pub mod formats;
pub mod fox;
pub mod ring;
pub mod window;

#[cfg(test)]
pub(crate) mod test_rng {
    /// xorshift64*, deterministic across platforms, for randomized tests.
    pub struct Rng(u64);

    impl Rng {
        pub fn new(seed: u64) -> Self {
            Rng(seed.max(1))
        }

        #[allow(clippy::should_implement_trait)]
        pub fn next(&mut self) -> u64 {
            let mut x = self.0;
            x ^= x >> 12;
            x ^= x << 25;
            x ^= x >> 27;
            self.0 = x;
            x.wrapping_mul(0x2545_f491_4f6c_dd1d)
        }

        pub fn below(&mut self, n: u64) -> u64 {
            self.next() % n
        }

        pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
            lo + (self.next() % ((hi - lo + 1) as u64)) as i64
        }
    }
}
