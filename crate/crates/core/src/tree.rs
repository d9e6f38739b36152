//! Vertices of the Bruhat-Tits tree as lattice classes `g x_*`, their distance,
//! and geometric checks on coded trajectories.

use crate::coding::Window;
use crate::error::{Error, Result};
use crate::moebius::{affine_decompose, Homography};

/// The class `g x_*` where `x_*` is the class of the standard lattice O x O.
#[derive(Clone, Debug)]
pub struct TreeVertex(pub Homography);

impl TreeVertex {
    pub fn base(k: &crate::algebra::FieldSpec) -> Self {
        TreeVertex(Homography::identity(k))
    }

    pub fn translate(&self, g: &Homography) -> Self {
        TreeVertex(g.compose(&self.0))
    }
}

impl PartialEq for TreeVertex {
    fn eq(&self, other: &Self) -> bool {
        vertex_distance(self, other) == 0
    }
}

/// `2 max deg(M) - deg det(M)` for `M = adj(v) w`, which is the difference of
/// the valuations of the elementary divisors of `v^-1 w` over O.
pub fn vertex_distance(v: &TreeVertex, w: &TreeVertex) -> i64 {
    let m = v.0.inverse().compose(&w.0);
    let max_deg = m
        .entries()
        .iter()
        .filter_map(|e| e.deg())
        .max()
        .expect("nonsingular") as i64;
    let det = m.det().deg().expect("nonsingular") as i64;
    2 * max_deg - det
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicReport {
    /// Window index of the first `n` with `d(x_(n-1), x_(n+1)) != d(x_(n-1), x_n) + d(x_n, x_(n+1))`.
    pub first_violation: Option<i64>,
    pub checked: usize,
}

impl GeodesicReport {
    pub fn aligned(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks that consecutive segments `[x_(n-1), x_n]`, `[x_n, x_(n+1)]` of
/// `x_n = gamma_n x_*` meet only at `x_n`.
pub fn validate_geodesic(gammas: &Window<Homography>) -> GeodesicReport {
    let xs: Vec<(i64, TreeVertex)> = gammas
        .iter()
        .map(|(n, g)| (n, TreeVertex(g.clone())))
        .collect();
    let mut checked = 0;
    for w in xs.windows(3) {
        let (a, b, c) = (&w[0].1, &w[1].1, &w[2].1);
        checked += 1;
        if vertex_distance(a, c) != vertex_distance(a, b) + vertex_distance(b, c) {
            return GeodesicReport {
                first_violation: Some(w[1].0),
                checked,
            };
        }
    }
    GeodesicReport {
        first_violation: None,
        checked,
    }
}

/// `d(x_(n-1), x_n)` for each `n` past the first, checked against `2 deg a_n`
/// where `a_n` is the translation part of `beta_n = i gamma_(n-1)^-1 gamma_n`.
pub fn sojourn_lengths(gammas: &Window<Homography>) -> Result<Window<i64>> {
    let Some(first) = gammas.items().first() else {
        return Ok(Window::from_parts(0, Vec::new()));
    };
    let inv = Homography::inversion(first.field());
    let mut out = Vec::new();
    for (n, g) in gammas.iter().skip(1) {
        let prev = gammas.get(n - 1).unwrap();
        let d = vertex_distance(&TreeVertex(prev.clone()), &TreeVertex(g.clone()));
        let beta = affine_decompose(&inv.compose(&prev.inverse()).compose(g))?;
        let expect = 2 * beta.a.deg().map_or(0, |x| x as i64);
        if d != expect {
            return Err(Error::Consistency(format!(
                "segment {n} has length {d}, expected 2 deg a_{n} = {expect}"
            )));
        }
        out.push(d);
    }
    Ok(Window::from_parts(gammas.start() + 1, out))
}

/// CSV `n,d,cumulative` of segment lengths.
pub fn geometry_csv(lengths: &Window<i64>) -> String {
    let mut out = String::from("n,d,cumulative\n");
    let mut total = 0;
    for (n, d) in lengths.iter() {
        total += d;
        out.push_str(&format!("{n},{d},{total}\n"));
    }
    out
}
