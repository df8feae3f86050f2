//! Compensated (Neumaier) accumulation for real and complex series.

use num_complex::Complex;

use crate::real::Real;

/// Running Neumaier sum: tracks the low-order bits lost by each addition.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<R: Real> {
    sum: R,
    comp: R,
}

impl<R: Real> Default for CompensatedSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        Self {
            sum: R::zero(),
            comp: R::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum + self.comp
    }
}

impl<R: Real> Extend<R> for CompensatedSum<R> {
    fn extend<I: IntoIterator<Item = R>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl<R: Real> FromIterator<R> for CompensatedSum<R> {
    fn from_iter<I: IntoIterator<Item = R>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Componentwise compensated sum of complex terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum<R: Real> {
    re: CompensatedSum<R>,
    im: CompensatedSum<R>,
}

impl<R: Real> ComplexSum<R> {
    pub fn new() -> Self {
        Self {
            re: CompensatedSum::new(),
            im: CompensatedSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex<R>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex<R> {
        Complex::new(self.re.value(), self.im.value())
    }
}

impl<R: Real> Extend<Complex<R>> for ComplexSum<R> {
    fn extend<I: IntoIterator<Item = Complex<R>>>(&mut self, iter: I) {
        for z in iter {
            self.add(z);
        }
    }
}

impl<R: Real> FromIterator<Complex<R>> for ComplexSum<R> {
    fn from_iter<I: IntoIterator<Item = Complex<R>>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Sums terms largest-magnitude first with compensation.
pub fn sum_descending<R: Real>(terms: &mut [Complex<R>]) -> Complex<R> {
    terms.sort_by(|a, b| {
        b.norm_sqr()
            .partial_cmp(&a.norm_sqr())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    terms.iter().copied().collect::<ComplexSum<R>>().value()
}
