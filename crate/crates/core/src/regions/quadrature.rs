//! Vector-valued adaptive Gauss-Kronrod (G7/K15) quadrature.
//!
//! All channels of a vector integrand share one set of panels, so quantities
//! that coincide pointwise (a region and an intersection that never cuts it)
//! come out bit-identical. Refinement always splits the panel with the
//! largest error estimate (ties broken by position), which makes the result
//! a deterministic function of the integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Debug)]
pub struct QuadOptions {
    /// Stop when the summed error estimate is below
    /// `rel_tol * max(|largest channel|, 1)`.
    pub rel_tol: f64,
    pub initial_panels: usize,
    pub max_evals: usize,
    /// Panels narrower than this are accepted whatever their error estimate
    /// (lets discontinuous integrands terminate).
    pub min_width: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            initial_panels: 16,
            max_evals: 1 << 20,
            min_width: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub values: Vec<f64>,
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub values: Vec<f64>,
    pub error: f64,
    pub evals: usize,
    /// Final panels, sorted by left endpoint.
    pub panels: Vec<Panel>,
}

struct HeapEntry {
    error: f64,
    a: f64,
    idx: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One K15 panel: returns (Kronrod values, max |K - G| over channels).
pub fn gk15_panel<F>(f: &mut F, a: f64, b: f64, channels: usize, buf: &mut [f64]) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = vec![0.0; channels];
    let mut g = vec![0.0; channels];
    for (j, &x) in XGK.iter().enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &sign in nodes {
            f(center + sign * half * x, buf)?;
            for c in 0..channels {
                k[c] += WGK[j] * buf[c];
                if j % 2 == 1 {
                    g[c] += WG[j / 2] * buf[c];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for c in 0..channels {
        k[c] *= half;
        g[c] *= half;
        err = err.max((k[c] - g[c]).abs());
    }
    Ok((k, err))
}

/// Integrates the `channels`-valued function `f` over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, channels: usize, opts: &QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let mut buf = vec![0.0; channels];
    let mut panels: Vec<Panel> = Vec::new();
    let mut heap = BinaryHeap::new();
    let n0 = opts.initial_panels.max(1);
    let mut evals = 0;
    for i in 0..n0 {
        let pa = a + (b - a) * i as f64 / n0 as f64;
        let pb = if i + 1 == n0 {
            b
        } else {
            a + (b - a) * (i + 1) as f64 / n0 as f64
        };
        let (values, error) = gk15_panel(&mut f, pa, pb, channels, &mut buf)?;
        evals += 15;
        heap.push(HeapEntry {
            error,
            a: pa,
            idx: panels.len(),
        });
        panels.push(Panel {
            a: pa,
            b: pb,
            values,
            error,
        });
    }
    let mut sums: Vec<f64> = (0..channels)
        .map(|c| panels.iter().map(|p| p.values[c]).sum())
        .collect();
    let mut total_err: f64 = panels.iter().map(|p| p.error).sum();
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps.is_multiple_of(1024) {
            // resynchronise the running sums with the panel list
            total_err = heap.iter().map(|e| e.error).sum();
            for (c, s) in sums.iter_mut().enumerate() {
                *s = panels.iter().map(|p| p.values[c]).sum();
            }
        }
        let scale = sums.iter().map(|s| s.abs()).fold(1.0, f64::max);
        if total_err <= opts.rel_tol * scale {
            break;
        }
        if evals + 30 > opts.max_evals {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                residual: total_err,
            });
        }
        let Some(top) = heap.pop() else { break };
        let p = panels[top.idx].clone();
        total_err -= p.error;
        if p.b - p.a <= opts.min_width {
            continue;
        }
        let mid = 0.5 * (p.a + p.b);
        let (lv, le) = gk15_panel(&mut f, p.a, mid, channels, &mut buf)?;
        let (rv, re) = gk15_panel(&mut f, mid, p.b, channels, &mut buf)?;
        evals += 30;
        for c in 0..channels {
            sums[c] += lv[c] + rv[c] - p.values[c];
        }
        total_err += le + re;
        panels[top.idx] = Panel {
            a: p.a,
            b: mid,
            values: lv,
            error: le,
        };
        heap.push(HeapEntry {
            error: le,
            a: p.a,
            idx: top.idx,
        });
        heap.push(HeapEntry {
            error: re,
            a: mid,
            idx: panels.len(),
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            values: rv,
            error: re,
        });
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values = (0..channels)
        .map(|c| panels.iter().map(|p| p.values[c]).sum())
        .collect();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        values,
        error,
        evals,
        panels,
    })
}

/// Re-integrates `f` with every panel of `prior` split in two; the
/// difference from `prior.values` audits the reported accuracy.
pub fn audit<F>(mut f: F, prior: &QuadResult, channels: usize) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let mut buf = vec![0.0; channels];
    let mut out = vec![0.0; channels];
    for p in &prior.panels {
        let mid = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let (v, _) = gk15_panel(&mut f, a, b, channels, &mut buf)?;
            for c in 0..channels {
                out[c] += v[c];
            }
        }
    }
    Ok(out)
}
