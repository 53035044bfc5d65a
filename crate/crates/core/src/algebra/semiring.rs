/// Additive monoid plus multiplication over `f64`.
///
/// `add` must be associative with identity [`Semiring::zero`]; `mul` has
/// identity [`Semiring::one`].
pub trait Semiring: Sync {
    fn zero(&self) -> f64;
    fn one(&self) -> f64;
    fn add(&self, a: f64, b: f64) -> f64;
    fn mul(&self, a: f64, b: f64) -> f64;
}

/// The ordinary `(+, ×)` ring over reals, the only one HPCG needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlusTimes;

impl Semiring for PlusTimes {
    #[inline]
    fn zero(&self) -> f64 {
        0.0
    }

    #[inline]
    fn one(&self) -> f64 {
        1.0
    }

    #[inline]
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn mul(&self, a: f64, b: f64) -> f64 {
        a * b
    }
}

/// Per-call flags modifying a primitive.
///
/// Masks in this crate are always structural, so `structural` only records
/// the caller's intent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Descriptor {
    pub structural: bool,
    pub transpose_matrix: bool,
}

impl Descriptor {
    pub const DEFAULT: Descriptor = Descriptor {
        structural: false,
        transpose_matrix: false,
    };
    pub const STRUCTURAL: Descriptor = Descriptor {
        structural: true,
        transpose_matrix: false,
    };
    pub const TRANSPOSE_MATRIX: Descriptor = Descriptor {
        structural: false,
        transpose_matrix: true,
    };
}
