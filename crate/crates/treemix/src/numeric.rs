//! Log-space arithmetic helpers.
//!
//! Likelihood coefficients alternate in sign and their magnitudes overflow in
//! raw form well before D = 15, so tables and sums are carried as
//! (log magnitude, sign) pairs.

/// A real number stored as sign and natural log of its absolute value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSigned {
    pub ln_abs: f64,
    /// +1.0, -1.0, or 0.0 for exact zero.
    pub sign: f64,
}

impl LogSigned {
    pub const ZERO: LogSigned = LogSigned {
        ln_abs: f64::NEG_INFINITY,
        sign: 0.0,
    };

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            LogSigned::ZERO
        } else {
            LogSigned {
                ln_abs: x.abs().ln(),
                sign: x.signum(),
            }
        }
    }

    /// A positive number given directly by its log.
    pub fn from_ln(ln_abs: f64) -> Self {
        LogSigned { ln_abs, sign: 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }

    pub fn mul(&self, other: &LogSigned) -> LogSigned {
        if self.is_zero() || other.is_zero() {
            return LogSigned::ZERO;
        }
        LogSigned {
            ln_abs: self.ln_abs + other.ln_abs,
            sign: self.sign * other.sign,
        }
    }

    pub fn scale(&self, factor: f64) -> LogSigned {
        self.mul(&LogSigned::from_value(factor))
    }

    pub fn add(&self, other: &LogSigned) -> LogSigned {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let r = (small.ln_abs - big.ln_abs).exp();
        let s = if big.sign == small.sign {
            1.0 + r
        } else {
            1.0 - r
        };
        if s == 0.0 {
            LogSigned::ZERO
        } else {
            LogSigned {
                ln_abs: big.ln_abs + s.abs().ln(),
                sign: big.sign * s.signum(),
            }
        }
    }
}

/// Accumulator for Σ s_i·exp(l_i) kept in log space.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogSignedSum {
    acc: Option<LogSigned>,
}

impl LogSignedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, term: LogSigned) {
        self.acc = Some(match self.acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }

    pub fn total(&self) -> LogSigned {
        self.acc.unwrap_or(LogSigned::ZERO)
    }
}

/// log(exp(a) + exp(b)) without overflow.
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log Σ exp(x_i) over a slice.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
