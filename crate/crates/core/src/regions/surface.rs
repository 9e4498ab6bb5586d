//! Boundary surface area of a three-parameter star-shaped region.
//!
//! With `r(omega)` the radial function, the surface element is
//! `dS = r * sqrt(r^2 + |grad_S r|^2) domega`. The spherical gradient is
//! taken by central differences along two great circles through `omega`,
//! Richardson-extrapolated.

use super::quadrature::QuadOptions;
use super::{integrate_sphere, SphereOptions, StarRegion, BOUNDARY_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SurfaceOptions {
    pub sphere: SphereOptions,
    /// Angular step of the finite differences, in radians.
    pub fd_step: f64,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self {
            sphere: SphereOptions {
                outer: QuadOptions {
                    rel_tol: 1e-6,
                    initial_panels: 8,
                    min_width: 1e-6,
                    ..QuadOptions::default()
                },
                inner: QuadOptions {
                    rel_tol: 1e-7,
                    initial_panels: 16,
                    min_width: 1e-7,
                    max_evals: 1 << 16,
                },
            },
            fd_step: 1e-4,
        }
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn tangent_basis(u: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = if u[0].abs() <= u[1].abs() && u[0].abs() <= u[2].abs() {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() <= u[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalized(cross(u, axis));
    let e2 = cross(u, e1);
    (e1, e2)
}

fn rotated(u: [f64; 3], e: [f64; 3], h: f64) -> [f64; 3] {
    let (s, c) = h.sin_cos();
    [u[0] * c + e[0] * s, u[1] * c + e[1] * s, u[2] * c + e[2] * s]
}

/// Surface element density `dS/domega` at the unit direction `u`, with the
/// radius there.
fn surface_density<R: StarRegion + ?Sized>(region: &R, u: [f64; 3], h: f64) -> Result<(f64, f64)> {
    let r = region.radial_extent(&u)?;
    let (e1, e2) = tangent_basis(u);
    let mut grad2 = 0.0;
    for e in [e1, e2] {
        let diff = |step: f64| -> Result<f64> {
            let plus = region.radial_extent(&rotated(u, e, step))?;
            let minus = region.radial_extent(&rotated(u, e, -step))?;
            Ok((plus - minus) / (2.0 * step))
        };
        let coarse = diff(h)?;
        let fine = diff(0.5 * h)?;
        let d = (4.0 * fine - coarse) / 3.0;
        grad2 += d * d;
    }
    Ok((r * (r * r + grad2).sqrt(), r))
}

/// Total boundary area of `region` and the area of the boundary part lying
/// in `classifier` (margin at least -1e-9).
pub fn surface_area_3d<R, C>(region: &R, classifier: &C, opts: &SurfaceOptions) -> Result<(f64, f64)>
where
    R: StarRegion + ?Sized,
    C: StarRegion + ?Sized,
{
    if region.arity() != 3 || classifier.arity() != 3 {
        return Err(Error::invalid("surface areas need three-parameter regions"));
    }
    let f = |u: [f64; 3], out: &mut [f64]| -> Result<()> {
        let (density, r) = surface_density(region, u, opts.fd_step)?;
        out[0] = density;
        let p = [r * u[0], r * u[1], r * u[2]];
        out[1] = if classifier.margin(&p)? >= -BOUNDARY_TOL {
            density
        } else {
            0.0
        };
        Ok(())
    };
    let q = integrate_sphere(f, 2, &opts.sphere)?;
    Ok((q.values[0], q.values[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    struct Ball(f64);

    impl StarRegion for Ball {
        fn arity(&self) -> usize {
            3
        }
        fn bounding_radius(&self) -> f64 {
            2.0 * self.0
        }
        fn margin(&self, c: &[f64]) -> Result<f64> {
            Ok(self.0 - c.iter().map(|x| x * x).sum::<f64>().sqrt())
        }
    }

    struct HalfSpace;

    impl StarRegion for HalfSpace {
        fn arity(&self) -> usize {
            3
        }
        fn bounding_radius(&self) -> f64 {
            10.0
        }
        fn margin(&self, c: &[f64]) -> Result<f64> {
            Ok(c[2])
        }
    }

    #[test]
    fn unit_sphere() {
        let (total, half) = surface_area_3d(&Ball(1.0), &HalfSpace, &SurfaceOptions::default()).unwrap();
        assert!((total - 4.0 * PI).abs() < 1e-5, "{total}");
        assert!((half - 2.0 * PI).abs() < 1e-4, "{half}");
    }
}
