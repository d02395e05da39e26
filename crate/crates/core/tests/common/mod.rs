//! Hand-derived formulas for the linear market, written out independently of
//! the library's evaluator chain, plus a nested-bisection root oracle.
#![allow(dead_code, clippy::excessive_precision)]

#[derive(Debug, Clone, Copy)]
pub struct Lin {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f: f64,
}

pub const P0: Lin = Lin {
    a: 11.0,
    b: 0.8,
    c: 1.0,
    f: 4.0,
};

impl Lin {
    /// Firm count on the free-entry locus: `(a − x − (n−1)bx − c)·x = f`.
    pub fn entry_n(&self, x: f64) -> f64 {
        1.0 + (self.a - self.c - x - self.f / x) / (self.b * x)
    }

    /// Own first-order bracket `a − 2x − (n−1)bx − c`.
    pub fn own(&self, x: f64, n: f64) -> f64 {
        self.a - 2.0 * x - (n - 1.0) * self.b * x - self.c
    }

    /// Monopoly-bundle bracket `a − 2x − 2(n−1)bx − c`.
    pub fn bundle(&self, x: f64, n: f64) -> f64 {
        self.a - 2.0 * x - 2.0 * (n - 1.0) * self.b * x - self.c
    }

    /// `a − 2x − (n−2)bx − c`.
    pub fn bertrand(&self, x: f64, n: f64) -> f64 {
        self.a - 2.0 * x - (n - 2.0) * self.b * x - self.c
    }

    pub fn lambda_ol(&self, x: f64, n: f64, s: f64, rho: f64) -> f64 {
        -s * self.b * x * x / (rho + n * s * self.b * x * x)
    }

    /// Rivals' output response to entry for linear demand.
    pub fn dxi_dn(&self, x: f64, n: f64) -> f64 {
        -(self.a - 2.0 * x - self.c) / (2.0 * (n - 1.0))
    }

    pub fn lambda_cl(&self, x: f64, n: f64, s: f64, rho: f64) -> f64 {
        let num = -s * self.b * x * x - (n - 1.0) * s * self.bertrand(x, n) * self.dxi_dn(x, n);
        num / (rho + n * s * self.b * x * x)
    }

    pub fn foc_ol(&self, x: f64, n: f64, s: f64, rho: f64) -> f64 {
        self.own(x, n) + self.lambda_ol(x, n, s, rho) * self.bundle(x, n)
    }

    pub fn foc_cl(&self, x: f64, n: f64, s: f64, rho: f64) -> f64 {
        self.own(x, n) + self.lambda_cl(x, n, s, rho) * self.bundle(x, n)
    }

    /// Outputs where the entry locus has `n ≥ 1`: roots of `x² − (a−c)x + f`.
    pub fn entry_window(&self) -> (f64, f64) {
        let h = 0.5 * (self.a - self.c);
        let r = (h * h - self.f).sqrt();
        (h - r, h + r)
    }
}

pub fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All roots `(x, n)` of `foc` on the free-entry locus: dense scan of the
/// entry window for sign changes, each refined by bisection. Poles and
/// points where the costate denominator is not positive are dropped.
pub fn oracle(m: &Lin, s: f64, rho: f64, foc: impl Fn(&Lin, f64, f64, f64, f64) -> f64) -> Vec<(f64, f64)> {
    const SAMPLES: usize = 20_000;
    let (lo, hi) = m.entry_window();
    let admissible = |x: f64| {
        let n = m.entry_n(x);
        n > 1.0 && rho + n * s * m.b * x * x > 0.0
    };
    let g = |x: f64| foc(m, x, m.entry_n(x), s, rho);
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..SAMPLES {
        let x = lo + (hi - lo) * k as f64 / SAMPLES as f64;
        let here = if admissible(x) { Some((x, g(x))) } else { None };
        if let (Some((xa, ga)), Some((xb, gb))) = (prev, here) {
            if (ga > 0.0) != (gb > 0.0) {
                let r = bisect(xa, xb, g);
                if g(r).abs() < 1e-9 {
                    roots.push((r, m.entry_n(r)));
                }
            }
        }
        prev = here;
    }
    roots
}

/// Reference values computed with 30-digit arithmetic, `(s, ρ, x, n)`.
pub const OPEN_LOOP_FIXTURES: [(f64, f64, f64, f64); 4] = [
    (0.1, 0.5, 3.2710892446994083152, 3.1040684318612010971),
    (0.05, 1.0, 2.4554614020300223889, 4.0114079859774095496),
    (0.5, 1.0, 3.8204968356586201438, 2.6792707659544697909),
    (1.0, 0.1, 4.4296942953573038806, 2.3170516243198211884),
];

pub const CLOSED_LOOP_FIXTURES: [(f64, f64, f64, f64); 3] = [
    (0.1, 0.5, 1.0417112543669453649, 7.1418808297873007883),
    (0.05, 1.0, 1.6445096044566399664, 5.5022193293594708932),
    (0.5, 1.0, 0.94358972127435096034, 7.3815867679015807863),
];

/// Rate points used for solver-versus-oracle equivalence.
pub const DESIGNATED: [(f64, f64); 3] = [(0.1, 0.5), (0.05, 1.0), (0.5, 1.0)];
