//! Star bodies about the origin as lazy radial-function expression trees.
//!
//! A body is a tree of primitive shapes (balls, ellipsoids, `ℓ_q`
//! balls, custom radial functions) and combinators (dilation,
//! invertible linear images, pointwise lattice min/max, Orlicz radial
//! sums). Radii are evaluated per direction on demand; nothing is
//! discretized at construction time, so implicitly-defined sum nodes
//! compose freely with every other node.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::orlicz_functions::{f64_field, str_field, OrliczBivariate};
use crate::radial_addition::{self, LinearOrliczSpec};
use crate::spherical_quadrature::{unit_ball_volume, QuadratureRule};

/// Fixed seed for deterministic direction grids in dimension ≥ 3.
const GRID_SEED: u64 = 0x5eed_d12e;

/// Unit vector on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    components: Vec<f64>,
}

impl Direction {
    /// Wraps a vector that is already unit length up to 1e-12 drift;
    /// the stored components are renormalized to keep `‖u‖ = 1` within
    /// 1e-14.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let norm = norm(&components);
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "direction must be unit length, got norm {norm}"
            )));
        }
        Ok(Self::normalized(components, norm))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        let norm = norm(v);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize vector with norm {norm}"
            )));
        }
        Ok(Self::normalized(v.to_vec(), norm))
    }

    fn normalized(mut components: Vec<f64>, norm: f64) -> Self {
        for c in &mut components {
            *c /= norm;
        }
        Self { components }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self {
            components: vec![theta.cos(), theta.sin()],
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn negated(&self) -> Self {
        Self {
            components: self.components.iter().map(|c| -c).collect(),
        }
    }

    /// Standard-normal direction sample.
    pub fn sample_gaussian<R: Rng>(dim: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let n = norm(&v);
            if n > 1e-8 {
                return Self::normalized(v, n);
            }
        }
    }

    /// Deterministic evaluation grid: equally spaced angles on the
    /// circle, seeded Gaussian directions in higher dimensions.
    pub fn grid(dim: usize, count: usize) -> Result<Vec<Direction>> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be at least 2, got {dim}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("grid must be nonempty".into()));
        }
        if dim == 2 {
            return Ok((0..count)
                .map(|k| {
                    Direction::from_angle(2.0 * std::f64::consts::PI * k as f64 / count as f64)
                })
                .collect());
        }
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED ^ (dim as u64) << 32 ^ count as u64);
        Ok((0..count)
            .map(|_| Direction::sample_gaussian(dim, &mut rng))
            .collect())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Invertible linear transform with a cached inverse and |det|.
#[derive(Debug, Clone)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det_abs: f64,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::InvalidParameter(format!(
                "linear map must be square of dimension >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let det = matrix.determinant();
        let inverse = matrix.clone().try_inverse().ok_or(Error::SingularMatrix {
            detail: format!("det = {det}"),
        })?;
        let residual =
            (&matrix * &inverse - DMatrix::identity(matrix.nrows(), matrix.ncols())).amax();
        if !(det.abs() > 0.0) || residual > 1e-10 {
            return Err(Error::SingularMatrix {
                detail: format!("det = {det}, inverse residual = {residual:e}"),
            });
        }
        Ok(Self {
            matrix,
            inverse,
            det_abs: det.abs(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("matrix rows must be square".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
            inverse: DMatrix::identity(n, n),
            det_abs: 1.0,
        }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let n = entries.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        Self::new(m)
    }

    pub fn rotation_2d(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(DMatrix::from_row_slice(2, 2, &[c, -s, s, c])).expect("rotation is invertible")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply_to(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v)).data.into()
    }

    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        (&self.inverse * DVector::from_column_slice(v)).data.into()
    }

    /// `|det T| = 1` within the given tolerance.
    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.det_abs - 1.0).abs() <= tol
    }
}

type RadialFn = Arc<dyn Fn(&Direction) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub(crate) enum Node {
    Ball {
        r: f64,
    },
    Ellipsoid {
        semi_axes: Vec<f64>,
    },
    LpBall {
        q: f64,
        scale: f64,
    },
    CustomRadial {
        label: String,
        f: RadialFn,
    },
    Dilate {
        lambda: f64,
        child: StarBody,
    },
    LinearImage {
        map: LinearMap,
        child: StarBody,
    },
    Intersect {
        children: Vec<StarBody>,
    },
    Union {
        children: Vec<StarBody>,
    },
    OrliczSum {
        phi: OrliczBivariate,
        tau: f64,
        children: Vec<StarBody>,
        /// `radius = ratio · radius(children[0])` when the second child
        /// is a recognized dilate of the first.
        dilate_ratio: Option<f64>,
    },
    LinearOrliczSum {
        spec: LinearOrliczSpec,
        k: StarBody,
        l: StarBody,
        dilate_ratio: Option<f64>,
    },
}

/// Star body about the origin: an immutable expression tree with a
/// strictly positive continuous radial function.
#[derive(Clone)]
pub struct StarBody {
    dim: usize,
    node: Arc<Node>,
}

impl fmt::Debug for StarBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StarBody(n={}, {})", self.dim, self.node_name())
    }
}

impl StarBody {
    pub fn ball(dim: usize, r: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {r}"
            )));
        }
        Ok(Self::from_node(dim, Node::Ball { r }))
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(dim, 1.0)
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn ellipsoid(semi_axes: Vec<f64>) -> Result<Self> {
        check_dim(semi_axes.len())?;
        if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "semi-axes must be positive, got {semi_axes:?}"
            )));
        }
        let dim = semi_axes.len();
        Ok(Self::from_node(dim, Node::Ellipsoid { semi_axes }))
    }

    /// `ℓ_q` ball `ρ(u) = scale · (Σ|u_i|^q)^{-1/q}`. Star-shaped for
    /// every `q > 0`, convex only for `q ≥ 1`.
    pub fn lp_ball(dim: usize, q: f64, scale: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(q.is_finite() && q > 0.0) || !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lp ball needs q > 0 and scale > 0, got q = {q}, scale = {scale}"
            )));
        }
        Ok(Self::from_node(dim, Node::LpBall { q, scale }))
    }

    /// Wraps a user-supplied radial function. The function is probed on
    /// a 64-direction grid and rejected if it returns anything
    /// non-finite or not strictly positive.
    pub fn custom_radial<F>(dim: usize, label: &str, f: F) -> Result<Self>
    where
        F: Fn(&Direction) -> f64 + Send + Sync + 'static,
    {
        Self::custom_radial_fallible(dim, label, move |u| Ok(f(u)))
    }

    pub fn custom_radial_fallible<F>(dim: usize, label: &str, f: F) -> Result<Self>
    where
        F: Fn(&Direction) -> Result<f64> + Send + Sync + 'static,
    {
        check_dim(dim)?;
        let f: RadialFn = Arc::new(f);
        for u in Direction::grid(dim, 64)? {
            let v = f(&u)?;
            if !v.is_finite() || v <= 1e-300 {
                return Err(Error::InvalidParameter(format!(
                    "custom radial function `{label}` returned {v} at {:?}",
                    u.components()
                )));
            }
        }
        Ok(Self::from_node(
            dim,
            Node::CustomRadial {
                label: label.to_string(),
                f,
            },
        ))
    }

    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must be positive, got {lambda}"
            )));
        }
        Ok(Self::from_node(
            self.dim,
            Node::Dilate {
                lambda,
                child: self.clone(),
            },
        ))
    }

    pub fn linear_image(&self, map: &LinearMap) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: map.dim(),
            });
        }
        Ok(Self::from_node(
            self.dim,
            Node::LinearImage {
                map: map.clone(),
                child: self.clone(),
            },
        ))
    }

    pub fn intersect(children: Vec<StarBody>) -> Result<Self> {
        let dim = check_family(&children)?;
        Ok(Self::from_node(dim, Node::Intersect { children }))
    }

    pub fn union(children: Vec<StarBody>) -> Result<Self> {
        let dim = check_family(&children)?;
        Ok(Self::from_node(dim, Node::Union { children }))
    }

    pub(crate) fn orlicz_sum_node(
        dim: usize,
        phi: OrliczBivariate,
        tau: f64,
        children: Vec<StarBody>,
        dilate_ratio: Option<f64>,
    ) -> Self {
        Self::from_node(
            dim,
            Node::OrliczSum {
                phi,
                tau,
                children,
                dilate_ratio,
            },
        )
    }

    pub(crate) fn linear_orlicz_sum_node(
        dim: usize,
        spec: LinearOrliczSpec,
        k: StarBody,
        l: StarBody,
        dilate_ratio: Option<f64>,
    ) -> Self {
        Self::from_node(
            dim,
            Node::LinearOrliczSum {
                spec,
                k,
                l,
                dilate_ratio,
            },
        )
    }

    fn from_node(dim: usize, node: Node) -> Self {
        Self {
            dim,
            node: Arc::new(node),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn node_name(&self) -> String {
        match &*self.node {
            Node::Ball { .. } => "ball".into(),
            Node::Ellipsoid { .. } => "ellipsoid".into(),
            Node::LpBall { .. } => "lp_ball".into(),
            Node::CustomRadial { label, .. } => format!("custom_radial({label})"),
            Node::Dilate { .. } => "dilate".into(),
            Node::LinearImage { .. } => "linear_image".into(),
            Node::Intersect { .. } => "intersect".into(),
            Node::Union { .. } => "union".into(),
            Node::OrliczSum { .. } => "orlicz_sum".into(),
            Node::LinearOrliczSum { .. } => "linear_orlicz_sum".into(),
        }
    }

    /// Distance from the origin to the boundary in direction `u`.
    pub fn radius(&self, u: &Direction) -> Result<f64> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.dim(),
            });
        }
        let value = match &*self.node {
            Node::Ball { r } => *r,
            Node::Ellipsoid { semi_axes } => {
                let s: f64 = u
                    .components()
                    .iter()
                    .zip(semi_axes)
                    .map(|(c, a)| (c / a) * (c / a))
                    .sum();
                s.sqrt().recip()
            }
            Node::LpBall { q, scale } => {
                let s: f64 = u.components().iter().map(|c| c.abs().powf(*q)).sum();
                scale * s.powf(-1.0 / q)
            }
            Node::CustomRadial { f, .. } => f(u)?,
            Node::Dilate { lambda, child } => lambda * child.radius(u)?,
            Node::LinearImage { map, child } => {
                // ρ_{TK}(u)·‖T⁻¹u‖ = ρ_K(T⁻¹u / ‖T⁻¹u‖)
                let w = map.apply_inverse(u.components());
                let nw = norm(&w);
                if !(nw.is_finite() && nw > 0.0) {
                    return Err(Error::NonFinite {
                        context: "linear_image".into(),
                        detail: format!("‖T⁻¹u‖ = {nw}"),
                    });
                }
                let v = Direction::normalized(w, nw);
                child.radius(&v)? / nw
            }
            Node::Intersect { children } => {
                let mut best = f64::INFINITY;
                for c in children {
                    best = best.min(c.radius(u)?);
                }
                best
            }
            Node::Union { children } => {
                let mut best: f64 = 0.0;
                for c in children {
                    best = best.max(c.radius(u)?);
                }
                best
            }
            Node::OrliczSum {
                phi,
                tau,
                children,
                dilate_ratio,
            } => {
                if let Some(ratio) = dilate_ratio {
                    ratio * children[0].radius(u)?
                } else {
                    let mut radii = Vec::with_capacity(children.len());
                    for c in children {
                        radii.push(c.radius(u)?);
                    }
                    radial_addition::solve_radial_values(phi, *tau, &radii)?
                }
            }
            Node::LinearOrliczSum {
                spec,
                k,
                l,
                dilate_ratio,
            } => {
                if let Some(ratio) = dilate_ratio {
                    ratio * k.radius(u)?
                } else {
                    spec.solve(k.radius(u)?, l.radius(u)?)?
                }
            }
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonFinite {
                context: self.node_name(),
                detail: format!("radius at {:?} evaluated to {value}", u.components()),
            });
        }
        Ok(value)
    }

    /// Radii on a direction grid, in grid order.
    pub fn radii(&self, grid: &[Direction]) -> Result<Vec<f64>> {
        grid.iter().map(|u| self.radius(u)).collect()
    }

    /// Origin-centered ball with the same volume, computed by quadrature.
    pub fn ball_equivalent(&self, rule: &QuadratureRule) -> Result<StarBody> {
        let vol = crate::spherical_quadrature::volume(self, rule)?;
        let r = (vol.value / unit_ball_volume(self.dim)).powf(1.0 / self.dim as f64);
        StarBody::ball(self.dim, r)
    }

    pub fn to_json(&self) -> Result<Value> {
        Ok(match &*self.node {
            Node::Ball { r } => json!({"kind": "ball", "r": r}),
            Node::Ellipsoid { semi_axes } => json!({"kind": "ellipsoid", "semi_axes": semi_axes}),
            Node::LpBall { q, scale } => json!({"kind": "lp_ball", "q": q, "scale": scale}),
            Node::CustomRadial { label, .. } => {
                return Err(Error::Json(format!(
                    "custom radial function `{label}` has no serializable descriptor"
                )))
            }
            Node::Dilate { lambda, child } => {
                json!({"kind": "dilate", "lambda": lambda, "child": child.to_json()?})
            }
            Node::LinearImage { map, child } => {
                let rows: Vec<Vec<f64>> = (0..map.dim())
                    .map(|i| (0..map.dim()).map(|j| map.matrix()[(i, j)]).collect())
                    .collect();
                json!({"kind": "linear_image", "matrix": rows, "child": child.to_json()?})
            }
            Node::Intersect { children } => {
                let cs: Result<Vec<Value>> = children.iter().map(|c| c.to_json()).collect();
                json!({"kind": "intersect", "children": cs?})
            }
            Node::Union { children } => {
                let cs: Result<Vec<Value>> = children.iter().map(|c| c.to_json()).collect();
                json!({"kind": "union", "children": cs?})
            }
            Node::OrliczSum { phi, children, .. } => {
                let cs: Result<Vec<Value>> = children.iter().map(|c| c.to_json()).collect();
                json!({"kind": "orlicz_sum", "phi": phi.to_json()?, "children": cs?})
            }
            Node::LinearOrliczSum { spec, k, l, .. } => json!({
                "kind": "linear_orlicz_sum",
                "alpha": spec.alpha(),
                "beta": spec.beta(),
                "phi1": spec.phi1().to_json()?,
                "phi2": spec.phi2().to_json()?,
                "K": k.to_json()?,
                "L": l.to_json()?,
            }),
        })
    }

    pub fn from_json(v: &Value, dim: usize) -> Result<Self> {
        match str_field(v, "kind")? {
            "ball" => Self::ball(dim, f64_field(v, "r")?),
            "ellipsoid" => {
                let axes: Vec<f64> = v
                    .get("semi_axes")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Json("ellipsoid requires `semi_axes` array".into()))?
                    .iter()
                    .map(|x| {
                        x.as_f64()
                            .ok_or_else(|| Error::Json("non-numeric semi-axis".into()))
                    })
                    .collect::<Result<_>>()?;
                if axes.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: axes.len(),
                    });
                }
                Self::ellipsoid(axes)
            }
            "lp_ball" => Self::lp_ball(dim, f64_field(v, "q")?, f64_field(v, "scale")?),
            "dilate" => {
                let child = Self::from_json(child_field(v, "child")?, dim)?;
                child.dilate(f64_field(v, "lambda")?)
            }
            "linear_image" => {
                let rows: Vec<Vec<f64>> = v
                    .get("matrix")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Json("linear_image requires `matrix`".into()))?
                    .iter()
                    .map(|row| {
                        row.as_array()
                            .ok_or_else(|| Error::Json("matrix rows must be arrays".into()))?
                            .iter()
                            .map(|x| {
                                x.as_f64()
                                    .ok_or_else(|| Error::Json("non-numeric matrix entry".into()))
                            })
                            .collect()
                    })
                    .collect::<Result<_>>()?;
                let map = LinearMap::from_rows(&rows)?;
                let child = Self::from_json(child_field(v, "child")?, dim)?;
                child.linear_image(&map)
            }
            "intersect" => Self::intersect(children_field(v, dim)?),
            "union" => Self::union(children_field(v, dim)?),
            "orlicz_sum" => {
                let phi = OrliczBivariate::from_json(
                    v.get("phi")
                        .ok_or_else(|| Error::Json("orlicz_sum requires `phi`".into()))?,
                )?;
                let children = children_field(v, dim)?;
                radial_addition::orlicz_radial_sum(&phi, &children)
            }
            "linear_orlicz_sum" => {
                let spec = LinearOrliczSpec::new(
                    f64_field(v, "alpha")?,
                    f64_field(v, "beta")?,
                    crate::orlicz_functions::OrliczUnivariate::from_json(
                        v.get("phi1").ok_or_else(|| {
                            Error::Json("linear_orlicz_sum requires `phi1`".into())
                        })?,
                    )?,
                    crate::orlicz_functions::OrliczUnivariate::from_json(
                        v.get("phi2").ok_or_else(|| {
                            Error::Json("linear_orlicz_sum requires `phi2`".into())
                        })?,
                    )?,
                )?;
                let k = Self::from_json(
                    v.get("K")
                        .ok_or_else(|| Error::Json("linear_orlicz_sum requires `K`".into()))?,
                    dim,
                )?;
                let l = Self::from_json(
                    v.get("L")
                        .ok_or_else(|| Error::Json("linear_orlicz_sum requires `L`".into()))?,
                    dim,
                )?;
                radial_addition::linear_orlicz_sum(&spec, &k, &l)
            }
            other => Err(Error::Json(format!("unknown body kind `{other}`"))),
        }
    }
}

fn child_field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Json(format!("missing field `{key}`")))
}

fn children_field(v: &Value, dim: usize) -> Result<Vec<StarBody>> {
    v.get("children")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Json("missing `children` array".into()))?
        .iter()
        .map(|c| StarBody::from_json(c, dim))
        .collect()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    Ok(())
}

fn check_family(children: &[StarBody]) -> Result<usize> {
    let first = children
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one child body".into()))?;
    for c in children {
        if c.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: c.dim(),
            });
        }
    }
    Ok(first.dim())
}

/// Recognizes `l = λ·k` at the tree level (shared nodes and dilate
/// wrappers); returns λ when the relation is structural.
pub(crate) fn detect_dilate(k: &StarBody, l: &StarBody) -> Option<f64> {
    if Arc::ptr_eq(&k.node, &l.node) {
        return Some(1.0);
    }
    if let Node::Dilate { lambda, child } = &*l.node {
        if Arc::ptr_eq(&child.node, &k.node) {
            return Some(*lambda);
        }
        if let Node::Dilate {
            lambda: mu,
            child: base,
        } = &*k.node
        {
            if Arc::ptr_eq(&base.node, &child.node) {
                return Some(lambda / mu);
            }
        }
    }
    if let Node::Dilate { lambda: mu, child } = &*k.node {
        if Arc::ptr_eq(&child.node, &l.node) {
            return Some(1.0 / mu);
        }
    }
    None
}

/// Grid maximum of `|ρ_K − ρ_L|`: a lower bound for the radial metric
/// that is exact in the limit of grid refinement.
#[derive(Debug, Clone, Copy)]
pub struct RadialDistance {
    pub value: f64,
    pub grid_size: usize,
}

pub fn radial_distance(k: &StarBody, l: &StarBody, grid: &[Direction]) -> Result<RadialDistance> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: l.dim(),
        });
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("direction grid is empty".into()));
    }
    let mut value: f64 = 0.0;
    for u in grid {
        value = value.max((k.radius(u)? - l.radius(u)?).abs());
    }
    Ok(RadialDistance {
        value,
        grid_size: grid.len(),
    })
}

/// Image of a star body under an invertible linear map.
pub fn apply_linear(map: &LinearMap, body: &StarBody) -> Result<StarBody> {
    body.linear_image(map)
}
