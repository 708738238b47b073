//! Three-dimensional Sobol' sequence with a random digital shift.

const BITS: usize = 32;

/// Direction numbers for the first three Sobol' dimensions
/// (primitive polynomials 1, x + 1, x^2 + x + 1).
fn direction_numbers() -> [[u32; BITS]; 3] {
    let mut v = [[0u32; BITS]; 3];
    for k in 0..BITS {
        v[0][k] = 1u32 << (31 - k);
    }
    // x + 1: degree 1, m_1 = 1
    v[1][0] = 1u32 << 31;
    for k in 1..BITS {
        v[1][k] = v[1][k - 1] ^ (v[1][k - 1] >> 1);
    }
    // x^2 + x + 1: degree 2, a_1 = 1, m = (1, 3)
    v[2][0] = 1u32 << 31;
    v[2][1] = 3u32 << 30;
    for k in 2..BITS {
        v[2][k] = v[2][k - 1] ^ v[2][k - 2] ^ (v[2][k - 2] >> 2);
    }
    v
}

/// Digitally shifted Sobol' points in the open unit cube.
#[derive(Debug, Clone)]
pub struct Sobol3 {
    directions: [[u32; BITS]; 3],
    shift: [u32; 3],
}

impl Sobol3 {
    pub fn new(shift: [u32; 3]) -> Self {
        Self {
            directions: direction_numbers(),
            shift,
        }
    }

    /// The `index`-th point; coordinates are cell midpoints so they never hit 0 or 1.
    pub fn point(&self, index: u32) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (d, slot) in out.iter_mut().enumerate() {
            let mut x = 0u32;
            let mut i = index;
            let mut k = 0;
            while i != 0 {
                if i & 1 == 1 {
                    x ^= self.directions[d][k];
                }
                i >>= 1;
                k += 1;
            }
            x ^= self.shift[d];
            *slot = (x as f64 + 0.5) / 4_294_967_296.0;
        }
        out
    }
}
