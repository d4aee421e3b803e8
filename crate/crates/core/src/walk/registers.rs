/// Tensor product of registers with the given dimensions, first register most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registers {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl Registers {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Self { dims: dims.to_vec(), strides, size: dims.iter().product() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn decode_into(&self, mut index: usize, digits: &mut [usize]) {
        for (d, &s) in digits.iter_mut().zip(&self.strides) {
            *d = index / s;
            index %= s;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut d = vec![0; self.dims.len()];
        self.decode_into(index, &mut d);
        d
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }
}

/// Arithmetic on a state register of dimension `n`: bitwise XOR when `n` is a power of two
/// (what CNOT blocks compute), addition modulo `n` otherwise. Either way `add(·, a)` is a
/// bijection with inverse `sub(·, a)` and `sub(b, a) = 0` exactly when `a = b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arith {
    Xor,
    Cyclic(usize),
}

impl Arith {
    pub fn for_dim(n: usize) -> Self {
        if n.is_power_of_two() {
            Arith::Xor
        } else {
            Arith::Cyclic(n)
        }
    }

    pub fn add(self, b: usize, a: usize) -> usize {
        match self {
            Arith::Xor => b ^ a,
            Arith::Cyclic(n) => (b + a) % n,
        }
    }

    pub fn sub(self, b: usize, a: usize) -> usize {
        match self {
            Arith::Xor => b ^ a,
            Arith::Cyclic(n) => (b + n - a) % n,
        }
    }

    /// `x ⊕ b ⊕ c`, read cyclically as `b + c - x`.
    pub fn mix(self, x: usize, b: usize, c: usize) -> usize {
        self.sub(self.add(b, c), x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        let r = Registers::new(&[2, 3, 4]);
        assert_eq!(r.size(), 24);
        for i in 0..24 {
            assert_eq!(r.encode(&r.decode(i)), i);
        }
        assert_eq!(r.encode(&[1, 2, 3]), 23);
    }

    #[test]
    fn cyclic_arith_inverts() {
        let a = Arith::for_dim(5);
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(a.sub(a.add(y, x), x), y);
                assert_eq!(a.sub(y, x) == 0, x == y);
            }
        }
        assert_eq!(Arith::for_dim(4), Arith::Xor);
    }
}
