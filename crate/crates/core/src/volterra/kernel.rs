//! Kernels `f` on `[0, 1]` and their cell integrals on the midpoint grid.
//!
//! Cell `0` is `[0, h/2]` and cell `k >= 1` is `[(k - 1/2)h, (k + 1/2)h]`, so
//! the last cell ends at `1 - h/2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numkit::{compensated_sum, find_root, C64};

/// Analytic kernel description (the CLI kernel mini-language).
#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    Const(f64),
    /// `sum_i c_i u^i`
    Poly(Vec<f64>),
    /// `u^n / n!`
    PowerN(u32),
    /// Sum of `v * indicator[a, b)` terms.
    Step(Vec<(f64, f64, f64)>),
    /// `sum_{n=1}^m (2^n/n) indicator[1 - 2^{1-n}, 1 - 2^{-n})`
    NotEll1(u32),
    /// `(1 - u)^{-3/2}`
    Singular32,
}

impl KernelSpec {
    /// Indicator of `[a, b)`.
    pub fn indicator(a: f64, b: f64) -> Self {
        Self::Step(vec![(a, b, 1.0)])
    }

    pub(crate) fn profile(&self) -> Result<Profile> {
        Ok(match self {
            Self::Const(c) => Profile::Poly(vec![*c]),
            Self::Poly(c) => Profile::Poly(c.clone()),
            Self::PowerN(n) => {
                let mut c = vec![0.0; *n as usize + 1];
                c[*n as usize] = 1.0 / (1..=*n).map(f64::from).product::<f64>();
                Profile::Poly(c)
            }
            Self::Step(terms) => Profile::Pieces(disjoint_pieces(terms)?),
            Self::NotEll1(m) => {
                if *m == 0 || *m > 60 {
                    return Err(Error::input(format!(
                        "notell1 block count must lie in 1..=60, got {m}"
                    )));
                }
                let terms: Vec<(f64, f64, f64)> = (1..=*m)
                    .map(|n| {
                        let a = 1.0 - 0.5f64.powi(n as i32 - 1);
                        let b = 1.0 - 0.5f64.powi(n as i32);
                        (a, b, 2f64.powi(n as i32) / f64::from(n))
                    })
                    .collect();
                Profile::Pieces(terms)
            }
            Self::Singular32 => Profile::Singular32,
        })
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        match self {
            Self::Const(c) => write!(f, "const:{c}"),
            Self::Poly(c) => write!(f, "poly:{}", join(c)),
            Self::PowerN(n) => write!(f, "powern:{n}"),
            Self::Step(t) => {
                let parts: Vec<String> = t.iter().map(|(a, b, v)| format!("{a},{b},{v}")).collect();
                write!(f, "step:{}", parts.join(";"))
            }
            Self::NotEll1(m) => write!(f, "notell1:{m}"),
            Self::Singular32 => f.write_str("singular32"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// `const:c` | `poly:c0,c1,...` | `powern:n` | `step:a,b,v;...` |
    /// `notell1:m` | `singular32`
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let number = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::input(format!("kernel: {s:?} is not a finite number")))
        };
        let count = |s: &str| -> Result<u32> {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::input(format!("kernel: {s:?} is not a nonnegative integer")))
        };
        let parsed = match spec.split_once(':') {
            None if spec == "singular32" => Self::Singular32,
            Some(("const", c)) => Self::Const(number(c)?),
            Some(("poly", cs)) => Self::Poly(cs.split(',').map(number).collect::<Result<_>>()?),
            Some(("powern", n)) => {
                let n = count(n)?;
                if n > 170 {
                    return Err(Error::input(format!("kernel: powern:{n} overflows n!")));
                }
                Self::PowerN(n)
            }
            Some(("step", terms)) => Self::Step(
                terms
                    .split(';')
                    .map(|t| {
                        let parts: Vec<&str> = t.split(',').collect();
                        if parts.len() != 3 {
                            return Err(Error::input(format!("kernel: step term {t:?} needs a,b,v")));
                        }
                        Ok((number(parts[0])?, number(parts[1])?, number(parts[2])?))
                    })
                    .collect::<Result<_>>()?,
            ),
            Some(("notell1", m)) => Self::NotEll1(count(m)?),
            _ => {
                return Err(Error::input(format!(
                    "kernel: unknown spec {spec:?} (expected const, poly, powern, step, notell1 or singular32)"
                )))
            }
        };
        parsed.profile()?;
        Ok(parsed)
    }
}

fn disjoint_pieces(terms: &[(f64, f64, f64)]) -> Result<Vec<(f64, f64, f64)>> {
    if terms.is_empty() {
        return Err(Error::input("step kernel needs at least one term"));
    }
    for &(a, b, _) in terms {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::input(format!(
                "step interval [{a}, {b}) must satisfy 0 <= a < b <= 1"
            )));
        }
    }
    let mut cuts: Vec<f64> = terms.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    Ok(cuts
        .windows(2)
        .map(|w| {
            let v: f64 = terms
                .iter()
                .filter(|&&(a, b, _)| a <= w[0] && w[1] <= b)
                .map(|t| t.2)
                .sum();
            (w[0], w[1], v)
        })
        .filter(|p| p.2 != 0.0)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Quantity {
    /// `f`
    Value,
    /// `|f|`
    Abs,
    /// `|f|^2 (1 - t)`
    WeightedSquare,
}

/// Closed-form integration backend for a [`KernelSpec`].
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Profile {
    Poly(Vec<f64>),
    /// Disjoint `(a, b, v)` pieces.
    Pieces(Vec<(f64, f64, f64)>),
    Singular32,
}

impl Profile {
    pub(crate) fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
            Self::Pieces(p) => p
                .iter()
                .filter(|&&(a, b, _)| a <= x && x < b)
                .map(|t| t.2)
                .sum(),
            Self::Singular32 => (1.0 - x).powf(-1.5),
        }
    }

    /// Integral of `q` over `[center - half, center + half]`.
    pub(crate) fn integral(&self, q: Quantity, center: f64, half: f64) -> f64 {
        if half <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Poly(c) => poly_integral(c, q, center, half),
            Self::Pieces(p) => {
                let (lo, hi) = (center - half, center + half);
                p.iter()
                    .map(|&(a, b, v)| {
                        let (x0, x1) = (a.max(lo), b.min(hi));
                        if x1 <= x0 {
                            return 0.0;
                        }
                        let len = x1 - x0;
                        match q {
                            Quantity::Value => v * len,
                            Quantity::Abs => v.abs() * len,
                            Quantity::WeightedSquare => v * v * len * (1.0 - 0.5 * (x0 + x1)),
                        }
                    })
                    .sum()
            }
            Self::Singular32 => {
                let u0 = 1.0 - (center - half);
                let u1 = 1.0 - (center + half);
                let width = 2.0 * half;
                match q {
                    // 2 (u1^{-1/2} - u0^{-1/2})
                    Quantity::Value | Quantity::Abs => {
                        let (r0, r1) = (u0.sqrt(), u1.sqrt());
                        2.0 * width / ((r0 + r1) * r0 * r1)
                    }
                    // u1^{-1} - u0^{-1}
                    Quantity::WeightedSquare => width / (u0 * u1),
                }
            }
        }
    }

    pub(crate) fn integral_between(&self, q: Quantity, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.integral(q, 0.5 * (lo + hi), 0.5 * (hi - lo))
    }

    /// Midpoint-rule value of `q` over `[center - half, center + half]`.
    pub(crate) fn midpoint(&self, q: Quantity, center: f64, half: f64) -> f64 {
        let v = self.eval(center);
        let w = 2.0 * half;
        match q {
            Quantity::Value => w * v,
            Quantity::Abs => w * v.abs(),
            Quantity::WeightedSquare => w * v * v * (1.0 - center),
        }
    }
}

/// Coefficients of `p(center + s)`.
fn taylor_shift(c: &[f64], center: f64) -> Vec<f64> {
    let mut b = c.to_vec();
    let d = b.len().saturating_sub(1);
    for i in 0..d {
        for j in (i..d).rev() {
            b[j] += center * b[j + 1];
        }
    }
    b
}

/// `int_{-w}^{w} sum_m b_m s^m ds`.
fn symmetric_integral(b: &[f64], half: f64) -> f64 {
    b.iter()
        .enumerate()
        .step_by(2)
        .map(|(m, &bm)| bm * 2.0 * half.powi(m as i32 + 1) / (m as f64 + 1.0))
        .sum()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_integral(c: &[f64], q: Quantity, center: f64, half: f64) -> f64 {
    match q {
        Quantity::Value => symmetric_integral(&taylor_shift(c, center), half),
        Quantity::WeightedSquare => {
            let sq = poly_mul(&poly_mul(c, c), &[1.0, -1.0]);
            symmetric_integral(&taylor_shift(&sq, center), half)
        }
        Quantity::Abs => {
            let (lo, hi) = (center - half, center + half);
            let p = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
            const PIECES: usize = 16;
            let mut cuts = vec![lo];
            let mut prev = lo;
            for i in 1..=PIECES {
                let x = if i == PIECES {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / PIECES as f64
                };
                if p(prev) * p(x) < 0.0 {
                    let tol = 4.0 * f64::EPSILON * prev.abs().max(x.abs()).max(1.0);
                    if let Ok(r) = find_root(p, prev, x, tol) {
                        cuts.push(r.root);
                    }
                }
                prev = x;
            }
            cuts.push(hi);
            if cuts.len() == 2 {
                return symmetric_integral(&taylor_shift(c, center), half).abs();
            }
            cuts.windows(2)
                .map(|w| {
                    symmetric_integral(&taylor_shift(c, 0.5 * (w[0] + w[1])), 0.5 * (w[1] - w[0]))
                        .abs()
                })
                .sum()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    /// Cell value = width x f(cell center).
    Midpoint,
    /// Cell value = exact integral of f over the cell.
    Exact,
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(Self::Midpoint),
            "exact" => Ok(Self::Exact),
            other => Err(Error::input(format!(
                "sampling mode must be midpoint or exact, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Source {
    spec: KernelSpec,
    profile: Profile,
    /// The kernel is `f * indicator[cutoff, 1]`.
    cutoff: f64,
}

/// A kernel represented by its cell integrals `mu_k` on an `N`-cell grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledKernel {
    n: usize,
    mode: SamplingMode,
    cells: Vec<C64>,
    abs_cells: Vec<f64>,
    weighted_square_cells: Vec<f64>,
    /// `|f|^2 (1 - t)` over `[1 - h/2, 1]`, beyond the last cell.
    weighted_square_tail: f64,
    source: Option<Source>,
}

/// `(center, half width)` of cell `k`.
fn cell_geometry(k: usize, h: f64) -> (f64, f64) {
    if k == 0 {
        (0.25 * h, 0.25 * h)
    } else {
        (k as f64 * h, 0.5 * h)
    }
}

impl SampledKernel {
    pub fn new(spec: &KernelSpec, n: usize, mode: SamplingMode) -> Result<Self> {
        Self::with_cutoff(spec.clone(), spec.profile()?, n, mode, 0.0)
    }

    fn with_cutoff(
        spec: KernelSpec,
        profile: Profile,
        n: usize,
        mode: SamplingMode,
        cutoff: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("grid needs at least one cell"));
        }
        let h = 1.0 / n as f64;
        let eval = |q: Quantity, center: f64, half: f64| -> f64 {
            let (lo, hi) = (center - half, center + half);
            if hi <= cutoff {
                return 0.0;
            }
            let (center, half) = if lo < cutoff {
                (0.5 * (cutoff + hi), 0.5 * (hi - cutoff))
            } else {
                (center, half)
            };
            match mode {
                SamplingMode::Exact => profile.integral(q, center, half),
                SamplingMode::Midpoint => profile.midpoint(q, center, half),
            }
        };
        let mut cells = Vec::with_capacity(n);
        let mut abs_cells = Vec::with_capacity(n);
        let mut weighted_square_cells = Vec::with_capacity(n);
        for k in 0..n {
            let (c, w) = cell_geometry(k, h);
            cells.push(C64::new(eval(Quantity::Value, c, w), 0.0));
            abs_cells.push(eval(Quantity::Abs, c, w));
            weighted_square_cells.push(eval(Quantity::WeightedSquare, c, w));
        }
        let weighted_square_tail = eval(Quantity::WeightedSquare, 1.0 - 0.25 * h, 0.25 * h);
        if let Some(k) = cells.iter().position(|z| !z.re.is_finite()) {
            return Err(Error::input(format!("cell integral {k} is not finite")));
        }
        Ok(Self {
            n,
            mode,
            cells,
            abs_cells,
            weighted_square_cells,
            weighted_square_tail,
            source: Some(Source {
                spec,
                profile,
                cutoff,
            }),
        })
    }

    /// Kernel given directly by its cell values; the derived quantities treat
    /// each cell as constant.
    pub fn from_cells(cells: Vec<C64>) -> Result<Self> {
        let n = cells.len();
        if n == 0 {
            return Err(Error::input("grid needs at least one cell"));
        }
        if let Some(k) = cells
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::input(format!("cell integral {k} is not finite")));
        }
        let h = 1.0 / n as f64;
        let abs_cells = cells.iter().map(|z| z.norm()).collect();
        let weighted_square_cells = cells
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let (c, w) = cell_geometry(k, h);
                z.norm_sqr() / (2.0 * w) * (1.0 - c)
            })
            .collect();
        Ok(Self {
            n,
            mode: SamplingMode::Midpoint,
            cells,
            abs_cells,
            weighted_square_cells,
            weighted_square_tail: 0.0,
            source: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn spec(&self) -> Option<&KernelSpec> {
        self.source.as_ref().map(|s| &s.spec)
    }

    pub fn cells(&self) -> &[C64] {
        &self.cells
    }

    /// Width of cell `k`.
    pub fn cell_width(&self, k: usize) -> f64 {
        2.0 * cell_geometry(k, self.h()).1
    }

    pub fn first_nonzero_cell(&self) -> Option<usize> {
        self.cells.iter().position(|z| *z != C64::default())
    }

    /// `alpha = k0 h` for the first nonzero cell `k0`; `1` for the zero kernel.
    pub fn support_start(&self) -> f64 {
        self.first_nonzero_cell()
            .map_or(1.0, |k| k as f64 * self.h())
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero_cell().is_none()
    }

    /// `sum_k |mu_k|`.
    pub fn l1_cells(&self) -> f64 {
        compensated_sum(self.cells.iter().map(|z| z.norm()))
    }

    /// `int_0^x |f|`: whole cells plus the exact share of the cell containing `x`.
    pub fn l1_partial(&self, x: f64) -> f64 {
        let h = self.h();
        let x = x.clamp(0.0, 1.0);
        let mut full = 0usize;
        while full < self.n && cell_geometry(full, h).0 + cell_geometry(full, h).1 <= x {
            full += 1;
        }
        let head = compensated_sum(self.abs_cells[..full].iter().copied());
        let lo = if full == 0 {
            0.0
        } else {
            (full as f64 - 0.5) * h
        };
        let rest = match &self.source {
            Some(src) => {
                let lo = lo.max(src.cutoff);
                match self.mode {
                    SamplingMode::Exact => src.profile.integral_between(Quantity::Abs, lo, x),
                    SamplingMode::Midpoint => {
                        if x <= lo {
                            0.0
                        } else {
                            src.profile
                                .midpoint(Quantity::Abs, 0.5 * (lo + x), 0.5 * (x - lo))
                        }
                    }
                }
            }
            None if full < self.n => {
                let (c, w) = cell_geometry(full, h);
                self.abs_cells[full] * ((x - (c - w)) / (2.0 * w)).max(0.0)
            }
            None => 0.0,
        };
        head + rest
    }

    /// `||f||_# = (int_0^1 |f(t)|^2 (1 - t) dt)^{1/2}`, the Hilbert-Schmidt
    /// norm of `V_f`.
    pub fn hs_norm(&self) -> f64 {
        let total = compensated_sum(
            self.weighted_square_cells
                .iter()
                .copied()
                .chain(std::iter::once(self.weighted_square_tail)),
        );
        total.sqrt()
    }

    /// `f * indicator[delta, 1]`, re-integrated from the source when known.
    pub fn truncated_below(&self, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::input(format!("cutoff {delta} outside [0, 1]")));
        }
        match &self.source {
            Some(src) => Self::with_cutoff(
                src.spec.clone(),
                src.profile.clone(),
                self.n,
                self.mode,
                src.cutoff.max(delta),
            ),
            None => {
                let h = self.h();
                let cells = self
                    .cells
                    .iter()
                    .enumerate()
                    .map(|(k, &z)| {
                        let (c, w) = cell_geometry(k, h);
                        let kept = ((c + w - delta) / (2.0 * w)).clamp(0.0, 1.0);
                        z * kept
                    })
                    .collect();
                Self::from_cells(cells)
            }
        }
    }

    /// `alpha f + g`, cellwise.
    pub fn combine(alpha: C64, f: &Self, g: &Self) -> Result<Self> {
        if f.n != g.n {
            return Err(Error::input(format!(
                "grid mismatch: {} vs {} cells",
                f.n, g.n
            )));
        }
        Self::from_cells(
            f.cells
                .iter()
                .zip(&g.cells)
                .map(|(a, b)| alpha * a + b)
                .collect(),
        )
    }
}
