use serde::Serialize;

/// A nonnegative quantity carried together with its natural logarithm.
///
/// Local estimates decay like `exp(-tH)` and routinely leave the range of
/// `f64`; `ln_value` stays finite when `value` has underflowed to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scaled {
    pub value: f64,
    pub ln_value: f64,
    pub underflow: bool,
}

impl Scaled {
    pub fn from_ln(ln_value: f64) -> Self {
        let value = ln_value.exp();
        Scaled {
            value,
            ln_value,
            underflow: ln_value.is_finite() && (value == 0.0 || value < f64::MIN_POSITIVE),
        }
    }

    pub fn zero() -> Self {
        Scaled {
            value: 0.0,
            ln_value: f64::NEG_INFINITY,
            underflow: false,
        }
    }

    pub fn from_value(value: f64) -> Self {
        if value > 0.0 {
            Scaled {
                value,
                ln_value: value.ln(),
                underflow: value < f64::MIN_POSITIVE,
            }
        } else {
            Scaled::zero()
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        if factor <= 0.0 {
            return Scaled::zero();
        }
        Scaled::from_ln(self.ln_value + factor.ln())
    }

    /// `|self/other - 1|`, evaluated through the logarithms.
    pub fn rel_diff(&self, other: &Scaled) -> f64 {
        if self.ln_value == f64::NEG_INFINITY && other.ln_value == f64::NEG_INFINITY {
            return 0.0;
        }
        (self.ln_value - other.ln_value).exp_m1().abs()
    }
}
