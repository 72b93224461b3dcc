//! Closed-form scalar functions with their first three derivatives.
//!
//! Named functions parse from and print to a compact string form so that
//! model configurations stay readable in JSON:
//!
//! | name               | f(z)                              |
//! |--------------------|-----------------------------------|
//! | `identity`         | z                                 |
//! | `power:k`          | z^k                               |
//! | `dual-power:k`     | 1 - (1 - z)^k                     |
//! | `poly:c0,c1,..`    | sum c_i z^i                       |
//! | `exp-cara:a`       | (1 - e^{-a z}) / a                |
//! | `neg-exp`          | -e^{-z}                           |
//! | `cara:a`           | -e^{-a z} / a                     |
//! | `log1p`            | ln(1 + z)                         |
//! | `log-shift:c`      | ln(z + c)                         |
//! | `crra:rho:c`       | ((z + c)^{1-rho} - 1) / (1 - rho) |
//! | `neg-power:k`      | -(-z)^k  (for z < 0)              |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Callback = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied function with closed-form derivatives.
#[derive(Clone)]
pub struct CustomFn {
    pub name: String,
    pub value: Callback,
    pub d1: Callback,
    pub d2: Callback,
    pub d3: Callback,
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomFn({})", self.name)
    }
}

#[derive(Clone, Debug)]
pub enum SmoothFn {
    Identity,
    Power(f64),
    DualPower(f64),
    Poly(Vec<f64>),
    ExpCara(f64),
    NegExp,
    Cara(f64),
    Log1p,
    LogShift(f64),
    Crra { rho: f64, shift: f64 },
    NegPower(f64),
    Custom(CustomFn),
}

impl PartialEq for SmoothFn {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SmoothFn::Custom(a), SmoothFn::Custom(b)) => Arc::ptr_eq(&a.value, &b.value),
            (SmoothFn::Custom(_), _) | (_, SmoothFn::Custom(_)) => false,
            _ => self.to_string() == other.to_string(),
        }
    }
}

impl SmoothFn {
    pub fn custom<V, D1, D2, D3>(name: &str, value: V, d1: D1, d2: D2, d3: D3) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
        D3: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SmoothFn::Custom(CustomFn {
            name: name.to_string(),
            value: Arc::new(value),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            d3: Arc::new(d3),
        })
    }

    /// Derivative of order `k` (0 is the value itself).
    pub fn deriv(&self, k: u8, z: f64) -> f64 {
        match self {
            SmoothFn::Identity => match k {
                0 => z,
                1 => 1.0,
                _ => 0.0,
            },
            SmoothFn::Power(p) => falling_power(*p, k) * z.powf(p - k as f64),
            SmoothFn::DualPower(p) => {
                let q = 1.0 - z;
                let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
                if k == 0 {
                    1.0 - q.powf(*p)
                } else {
                    sign * falling_power(*p, k) * q.powf(p - k as f64)
                }
            }
            SmoothFn::Poly(c) => {
                let mut acc = 0.0;
                for (i, ci) in c.iter().enumerate().skip(k as usize) {
                    acc += ci * falling_power(i as f64, k) * z.powi(i as i32 - k as i32);
                }
                acc
            }
            SmoothFn::ExpCara(a) => match k {
                0 => (1.0 - (-a * z).exp()) / a,
                _ => (-a).powi(k as i32 - 1) * (-a * z).exp(),
            },
            SmoothFn::NegExp => {
                let e = (-z).exp();
                if k.is_multiple_of(2) {
                    -e
                } else {
                    e
                }
            }
            SmoothFn::Cara(a) => -(-a).powi(k as i32) * (-a * z).exp() / a,
            SmoothFn::Log1p => log_deriv(1.0 + z, k),
            SmoothFn::LogShift(c) => log_deriv(z + c, k),
            SmoothFn::Crra { rho, shift } => {
                let y = z + shift;
                if (rho - 1.0).abs() < 1e-12 {
                    log_deriv(y, k)
                } else if k == 0 {
                    (y.powf(1.0 - rho) - 1.0) / (1.0 - rho)
                } else {
                    // d^k/dz^k of y^{1-rho}/(1-rho) = falling(-rho, k-1) y^{-rho-(k-1)}
                    falling_power(-rho, k - 1) * y.powf(-rho - (k as f64 - 1.0))
                }
            }
            SmoothFn::NegPower(p) => {
                let y = -z;
                // f(z) = -y^p with y = -z; each z-derivative flips the sign once.
                let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
                sign * falling_power(*p, k) * y.powf(p - k as f64)
            }
            SmoothFn::Custom(c) => match k {
                0 => (c.value)(z),
                1 => (c.d1)(z),
                2 => (c.d2)(z),
                3 => (c.d3)(z),
                _ => f64::NAN,
            },
        }
    }

    pub fn value(&self, z: f64) -> f64 {
        self.deriv(0, z)
    }

    pub fn d1(&self, z: f64) -> f64 {
        self.deriv(1, z)
    }

    pub fn d2(&self, z: f64) -> f64 {
        self.deriv(2, z)
    }

    pub fn d3(&self, z: f64) -> f64 {
        self.deriv(3, z)
    }

    /// Largest relative disagreement between each analytic derivative and a
    /// central difference of the derivative one order below.
    pub fn derivative_consistency(&self, grid: &[f64], h: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for &z in grid {
            for k in 1..=3u8 {
                let fd = (self.deriv(k - 1, z + h) - self.deriv(k - 1, z - h)) / (2.0 * h);
                let an = self.deriv(k, z);
                let err = (fd - an).abs() / an.abs().max(1.0);
                worst = worst.max(err);
            }
        }
        worst
    }

    /// Strictly increasing on the grid?
    pub fn is_increasing_on(&self, grid: &[f64]) -> bool {
        grid.windows(2).all(|w| self.value(w[1]) > self.value(w[0]))
            && grid.iter().all(|&z| self.d1(z) > 0.0)
    }
}

/// p (p-1) ... (p-k+1)
fn falling_power(p: f64, k: u8) -> f64 {
    (0..k).map(|i| p - i as f64).product()
}

/// k-th derivative of ln(y) with dy/dz = 1.
fn log_deriv(y: f64, k: u8) -> f64 {
    match k {
        0 => y.ln(),
        1 => 1.0 / y,
        2 => -1.0 / (y * y),
        _ => 2.0 / (y * y * y),
    }
}

impl fmt::Display for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothFn::Identity => write!(f, "identity"),
            SmoothFn::Power(k) => write!(f, "power:{k}"),
            SmoothFn::DualPower(k) => write!(f, "dual-power:{k}"),
            SmoothFn::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            SmoothFn::ExpCara(a) => write!(f, "exp-cara:{a}"),
            SmoothFn::NegExp => write!(f, "neg-exp"),
            SmoothFn::Cara(a) => write!(f, "cara:{a}"),
            SmoothFn::Log1p => write!(f, "log1p"),
            SmoothFn::LogShift(c) => write!(f, "log-shift:{c}"),
            SmoothFn::Crra { rho, shift } => write!(f, "crra:{rho}:{shift}"),
            SmoothFn::NegPower(k) => write!(f, "neg-power:{k}"),
            SmoothFn::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

fn parse_num(name: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::UnknownFunction(name.to_string()))
}

impl FromStr for SmoothFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let arg = || rest.ok_or_else(|| Error::UnknownFunction(s.to_string()));
        let f = match head {
            "identity" => SmoothFn::Identity,
            "power" => SmoothFn::Power(parse_num(s, arg()?)?),
            "dual-power" => SmoothFn::DualPower(parse_num(s, arg()?)?),
            "poly" => SmoothFn::Poly(
                arg()?
                    .split(',')
                    .map(|c| parse_num(s, c))
                    .collect::<Result<Vec<_>>>()?,
            ),
            "exp-cara" => {
                let a = parse_num(s, arg()?)?;
                if a <= 0.0 {
                    return Err(Error::InvalidModel(format!("{s}: coefficient must be > 0")));
                }
                SmoothFn::ExpCara(a)
            }
            "neg-exp" => SmoothFn::NegExp,
            "cara" => {
                let a = parse_num(s, arg()?)?;
                if a == 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "{s}: coefficient must be non-zero"
                    )));
                }
                SmoothFn::Cara(a)
            }
            "log1p" => SmoothFn::Log1p,
            "log-shift" => SmoothFn::LogShift(parse_num(s, arg()?)?),
            "crra" => {
                let (rho, shift) = arg()?
                    .split_once(':')
                    .ok_or_else(|| Error::UnknownFunction(s.to_string()))?;
                SmoothFn::Crra {
                    rho: parse_num(s, rho)?,
                    shift: parse_num(s, shift)?,
                }
            }
            "neg-power" => SmoothFn::NegPower(parse_num(s, arg()?)?),
            _ => return Err(Error::UnknownFunction(s.to_string())),
        };
        if rest.is_some() && matches!(f, SmoothFn::Identity | SmoothFn::NegExp | SmoothFn::Log1p) {
            return Err(Error::UnknownFunction(s.to_string()));
        }
        Ok(f)
    }
}

impl Serialize for SmoothFn {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        if let SmoothFn::Custom(c) = self {
            return Err(serde::ser::Error::custom(format!(
                "custom function `{}` has no JSON form",
                c.name
            )));
        }
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SmoothFn {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
