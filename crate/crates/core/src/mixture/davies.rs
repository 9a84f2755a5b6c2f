//! Davies' characteristic-function inversion for `P(Σ λ_j χ²_1 < c)`.
//!
//! A direct port of the reference `qfc` routine restricted to central
//! one-degree-of-freedom terms with no extra normal component. The control
//! flow (and the magic constants) mirror the original so results can be
//! compared against other implementations term for term.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{atan, exp, fabs, floor, log, pow, sin, sqrt};

const LOG28: f64 = 0.0866; // log(2) / 8
const RATS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
const DIVIS: [f64; 4] = [2.0, 1.4, 1.2, 1.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DaviesFault {
    /// Required accuracy not achieved within the term limit.
    AccuracyNotAchieved = 1,
    /// Round-off error possibly significant; the value is still returned.
    RoundOff = 2,
    /// Invalid parameters.
    InvalidParameters = 3,
    /// Unable to locate integration parameters.
    IntegrationParameters = 4,
}

impl DaviesFault {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaviesOutput {
    /// Distribution function at `c`; only meaningful when `fault` is not 1, 3 or 4.
    pub cdf: f64,
    pub fault: Option<DaviesFault>,
    /// Absolute-value sum of the integral terms.
    pub abs_sum: f64,
    pub terms: usize,
    pub integrations: usize,
}

struct LimitReached;

struct State<'a> {
    lb: &'a [f64],
    th: Vec<usize>,
    sorted: bool,
    sigsq: f64,
    lmax: f64,
    lmin: f64,
    mean: f64,
    c: f64,
    intl: f64,
    ersm: f64,
    count: usize,
    lim: usize,
    fail: bool,
}

fn exp1(x: f64) -> f64 {
    if x < -50.0 {
        0.0
    } else {
        exp(x)
    }
}

/// `log(1 + x)` if `first`, else `log(1 + x) - x`.
fn log1(x: f64, first: bool) -> f64 {
    if fabs(x) > 0.1 {
        return if first { log(1.0 + x) } else { log(1.0 + x) - x };
    }
    let mut y = x / (2.0 + x);
    let mut term = 2.0 * y * y * y;
    let mut k = 3.0;
    let mut s = if first { 2.0 } else { -x } * y;
    y *= y;
    let mut s1 = s + term / k;
    while s1 != s {
        k += 2.0;
        term *= y;
        s = s1;
        s1 = s + term / k;
    }
    s
}

impl State<'_> {
    fn counter(&mut self) -> Result<(), LimitReached> {
        self.count += 1;
        if self.count > self.lim {
            Err(LimitReached)
        } else {
            Ok(())
        }
    }

    /// Indices of `lb` by decreasing absolute value (stable).
    fn order(&mut self) {
        let lb = self.lb;
        self.th = (0..lb.len()).collect();
        self.th.sort_by(|&a, &b| fabs(lb[b]).total_cmp(&fabs(lb[a])));
        self.sorted = true;
    }

    /// Chernoff-type tail bound at `u`; the matching cutoff goes to `cx`.
    fn errbd(&mut self, u: f64, cx: &mut f64) -> Result<f64, LimitReached> {
        self.counter()?;
        let mut xconst = u * self.sigsq;
        let mut sum1 = u * xconst;
        let u = 2.0 * u;
        for &lj in self.lb.iter().rev() {
            let x = u * lj;
            let y = 1.0 - x;
            xconst += lj / y;
            sum1 += x * x / y + log1(-x, false);
        }
        *cx = xconst;
        Ok(exp1(-0.5 * sum1))
    }

    /// Cutoff with `P(Q > ctff) < accx` for `upn > 0`, else `P(Q < ctff) < accx`.
    fn ctff(&mut self, accx: f64, upn: &mut f64) -> Result<f64, LimitReached> {
        let mut u2 = *upn;
        let mut u1 = 0.0;
        let mut c1 = self.mean;
        let mut c2 = 0.0;
        let rb = 2.0 * if u2 > 0.0 { self.lmax } else { self.lmin };
        let mut u = u2 / (1.0 + u2 * rb);
        while self.errbd(u, &mut c2)? > accx {
            u1 = u2;
            c1 = c2;
            u2 *= 2.0;
            u = u2 / (1.0 + u2 * rb);
        }
        u = (c1 - self.mean) / (c2 - self.mean);
        while u < 0.9 {
            u = 0.5 * (u1 + u2);
            let mut xconst = 0.0;
            if self.errbd(u / (1.0 + u * rb), &mut xconst)? > accx {
                u1 = u;
                c1 = xconst;
            } else {
                u2 = u;
                c2 = xconst;
            }
            u = (c1 - self.mean) / (c2 - self.mean);
        }
        *upn = u2;
        Ok(c2)
    }

    /// Bound on the integration error from truncating at `u`.
    fn truncation(&mut self, u: f64, tausq: f64) -> Result<f64, LimitReached> {
        self.counter()?;
        let mut prod2 = 0.0;
        let mut prod3 = 0.0;
        let mut s = 0usize;
        let sum2 = (self.sigsq + tausq) * u * u;
        let mut prod1 = 2.0 * sum2;
        let u = 2.0 * u;
        for &lj in self.lb {
            let x = (u * lj) * (u * lj);
            if x > 1.0 {
                prod2 += log(x);
                prod3 += log1(x, true);
                s += 1;
            } else {
                prod1 += log1(x, true);
            }
        }
        prod2 += prod1;
        prod3 += prod1;
        let x = exp1(-0.25 * prod2) / PI;
        let y = exp1(-0.25 * prod3) / PI;
        let mut err1 = if s == 0 { 1.0 } else { x * 2.0 / s as f64 };
        let err2 = if prod3 > 1.0 { 2.5 * y } else { 1.0 };
        if err2 < err1 {
            err1 = err2;
        }
        let x = 0.5 * sum2;
        let err2 = if x <= y { 1.0 } else { y / x };
        Ok(if err1 < err2 { err1 } else { err2 })
    }

    /// Smallest (roughly) `u` with `truncation(u) < accx`.
    fn findu(&mut self, utx: &mut f64, accx: f64) -> Result<(), LimitReached> {
        let mut ut = *utx;
        let mut u = ut / 4.0;
        if self.truncation(u, 0.0)? > accx {
            u = ut;
            while self.truncation(u, 0.0)? > accx {
                ut *= 4.0;
                u = ut;
            }
        } else {
            ut = u;
            u /= 4.0;
            while self.truncation(u, 0.0)? <= accx {
                ut = u;
                u /= 4.0;
            }
        }
        for d in DIVIS {
            let u = ut / d;
            if self.truncation(u, 0.0)? <= accx {
                ut = u;
            }
        }
        *utx = ut;
        Ok(())
    }

    /// Trapezoidal inversion with `nterm + 1` terms at spacing `interv`. When
    /// `!mainx` the integrand carries the factor `1 - exp(-tausq u² / 2)`.
    fn integrate(&mut self, nterm: usize, interv: f64, tausq: f64, mainx: bool) {
        let inpi = interv / PI;
        for k in (0..=nterm).rev() {
            let u = (k as f64 + 0.5) * interv;
            let mut sum1 = -2.0 * u * self.c;
            let mut sum2 = fabs(sum1);
            let mut sum3 = -0.5 * self.sigsq * u * u;
            for &lj in self.lb.iter().rev() {
                let x = 2.0 * lj * u;
                sum3 -= 0.25 * log1(x * x, true);
                let z = atan(x);
                sum1 += z;
                sum2 += fabs(z);
            }
            let mut x = inpi * exp1(sum3) / u;
            if !mainx {
                x *= 1.0 - exp1(-0.5 * tausq * u * u);
            }
            self.intl += sin(0.5 * sum1) * x;
            self.ersm += 0.5 * sum2 * x;
        }
    }

    /// Coefficient of tausq in the error from the convergence factor at `x`.
    fn cfe(&mut self, x: f64) -> Result<f64, LimitReached> {
        self.counter()?;
        if !self.sorted {
            self.order();
        }
        let mut axl = fabs(x);
        let sxl = if x > 0.0 { 1.0 } else { -1.0 };
        let mut sum1 = 0.0;
        for j in (0..self.th.len()).rev() {
            let lt = self.lb[self.th[j]];
            if lt * sxl > 0.0 {
                let lj = fabs(lt);
                let axl1 = axl - lj;
                let axl2 = lj / LOG28;
                if axl1 > axl2 {
                    axl = axl1;
                } else {
                    if axl > axl2 {
                        axl = axl2;
                    }
                    // each remaining term contributes n + nc = 1
                    sum1 = (axl - axl1) / lj + j as f64;
                    break;
                }
            }
        }
        if sum1 > 100.0 {
            self.fail = true;
            Ok(1.0)
        } else {
            Ok(pow(2.0, sum1 / 4.0) / (PI * axl * axl))
        }
    }
}

/// `P(Σ λ_j Z_j² < c)` to absolute accuracy `acc`, using at most `lim`
/// integration terms.
pub fn davies_cdf(lambdas: &[f64], c: f64, lim: usize, acc: f64) -> DaviesOutput {
    let mut st = State {
        lb: lambdas,
        th: Vec::new(),
        sorted: false,
        sigsq: 0.0,
        lmax: 0.0,
        lmin: 0.0,
        mean: 0.0,
        c,
        intl: 0.0,
        ersm: 0.0,
        count: 0,
        lim,
        fail: false,
    };
    let mut out = DaviesOutput { cdf: -1.0, fault: None, abs_sum: 0.0, terms: 0, integrations: 0 };
    if let Err(LimitReached) = run(&mut st, acc, &mut out) {
        out.fault = Some(DaviesFault::IntegrationParameters);
    }
    out
}

fn run(st: &mut State<'_>, acc: f64, out: &mut DaviesOutput) -> Result<(), LimitReached> {
    let mut acc1 = acc;
    let mut xlim = st.lim as f64;
    let mut sd = st.sigsq;
    for &lj in st.lb {
        sd += 2.0 * lj * lj;
        st.mean += lj;
        if st.lmax < lj {
            st.lmax = lj;
        } else if st.lmin > lj {
            st.lmin = lj;
        }
    }
    if sd == 0.0 {
        out.cdf = if st.c > 0.0 { 1.0 } else { 0.0 };
        return Ok(());
    }
    if st.lmin == 0.0 && st.lmax == 0.0 {
        out.fault = Some(DaviesFault::InvalidParameters);
        return Ok(());
    }
    sd = sqrt(sd);
    let almx = if st.lmax < -st.lmin { -st.lmin } else { st.lmax };

    let mut utx = 16.0 / sd;
    let mut up = 4.5 / sd;
    let mut un = -up;
    st.findu(&mut utx, 0.5 * acc1)?;
    // does a convergence factor help
    if st.c != 0.0 && almx > 0.07 * sd {
        let tausq = 0.25 * acc1 / st.cfe(st.c)?;
        if st.fail {
            st.fail = false;
        } else if st.truncation(utx, tausq)? < 0.2 * acc1 {
            st.sigsq += tausq;
            st.findu(&mut utx, 0.25 * acc1)?;
        }
    }
    acc1 *= 0.5;

    loop {
        // range of the distribution
        let d1 = st.ctff(acc1, &mut up)? - st.c;
        if d1 < 0.0 {
            out.cdf = 1.0;
            return Ok(());
        }
        let d2 = st.c - st.ctff(acc1, &mut un)?;
        if d2 < 0.0 {
            out.cdf = 0.0;
            return Ok(());
        }
        let intv = 2.0 * PI / if d1 > d2 { d1 } else { d2 };
        let xnt = utx / intv;
        let xntm = 3.0 / sqrt(acc1);
        if xnt > xntm * 1.5 {
            // auxiliary integration
            if xntm > xlim {
                out.fault = Some(DaviesFault::AccuracyNotAchieved);
                return Ok(());
            }
            let ntm = floor(xntm + 0.5) as usize;
            let intv1 = utx / ntm as f64;
            let x = 2.0 * PI / intv1;
            if x > fabs(st.c) {
                let tausq = 0.33 * acc1 / (1.1 * (st.cfe(st.c - x)? + st.cfe(st.c + x)?));
                if !st.fail {
                    acc1 *= 0.67;
                    st.integrate(ntm, intv1, tausq, false);
                    xlim -= xntm;
                    st.sigsq += tausq;
                    out.integrations += 1;
                    out.terms += ntm + 1;
                    st.findu(&mut utx, 0.25 * acc1)?;
                    acc1 *= 0.75;
                    continue;
                }
            }
        }

        // main integration
        if xnt > xlim {
            out.fault = Some(DaviesFault::AccuracyNotAchieved);
            return Ok(());
        }
        let nt = floor(xnt + 0.5) as usize;
        st.integrate(nt, intv, 0.0, true);
        out.integrations += 1;
        out.terms += nt + 1;
        out.cdf = 0.5 - st.intl;
        out.abs_sum = st.ersm;

        // could round-off be significant (radix 8 or 16 machines too)
        let up = st.ersm;
        let x = up + acc / 10.0;
        if RATS.iter().any(|&r| r * x == r * up) {
            out.fault = Some(DaviesFault::RoundOff);
        }
        return Ok(());
    }
}
