//! Mixed-integer linear reformulation of modularity density maximization
//! with a fixed number of communities `m`.
//!
//! Variables, for vertices `i`, edges `{i, j}` and communities `l`:
//!
//! * `x_i_l` binary: vertex `i` belongs to community `l`;
//! * `w_i_j_l` in `[0, 1]`: the product `x_i_l * x_j_l`, linearized with the
//!   three Fortet inequalities;
//! * `a_l`: the density of community `l`, bounded by [`AlphaBounds`];
//! * `y_i_l`: the product `a_l * x_i_l`, linearized with the four McCormick
//!   inequalities.
//!
//! Clearing the denominator of `a_l = (4 sum w - sum k x) / sum x` gives the
//! linear link row `4 sum_E w_ijl - sum_i k_i x_il - sum_i y_il = 0`. The
//! objective is `max sum_l a_l`.

mod lp;

use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::graph::Graph;
use crate::metrics::{all_stats, Weak};
use crate::partition::Partition;

pub use lp::{emit_lp, sidecar_json};

pub type Coef = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("graph needs at least 2 vertices, has {0}")]
    TooSmall(usize),
    #[error("community count {m} out of range 2..={max}")]
    CommunityCount { m: usize, max: usize },
    #[error("partition has {found} communities, model expects {expected}")]
    PartitionShape { found: usize, expected: usize },
    #[error("partition infeasible for these bounds: community {community} has density {density} outside [{lower}, {upper}]")]
    OutOfBounds {
        community: usize,
        density: String,
        lower: String,
        upper: String,
    },
}

/// How the density bounds are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaRule {
    /// Bounds valid for every partition allowed by the active constraints:
    /// `-k_max` without a weak constraint, `0` for `L = 0`, and `1/(n-1)`
    /// (rounded down to six decimals) for `L = 1`.
    #[default]
    Valid,
    /// `-(k_max1 + k_max2)/2` without a weak constraint and `L` with one.
    /// Tighter, but excludes a singleton holding a unique maximum-degree
    /// vertex, and for `L = 1` any community with `0 < d < 1`.
    DegreePair,
}

/// Lower and upper bound on a community density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaBounds {
    pub lower: Coef,
    pub upper: Coef,
}

impl AlphaBounds {
    pub fn contains(&self, d: Coef) -> bool {
        self.lower <= d && d <= self.upper
    }
}

pub fn alpha_bounds(g: &Graph, weak: Option<Weak>, rule: AlphaRule) -> Result<AlphaBounds, ModelError> {
    let n = g.n();
    if n < 2 {
        return Err(ModelError::TooSmall(n));
    }
    let mut degrees = g.degrees().to_vec();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let (k1, k2) = (degrees[0] as i64, degrees[1] as i64);
    let lower = match (weak, rule) {
        (None, AlphaRule::Valid) => Coef::from_integer(-k1),
        (None, AlphaRule::DegreePair) => Coef::new(-(k1 + k2), 2),
        (Some(Weak::NonNegative), _) => Coef::zero(),
        (Some(Weak::Strict), AlphaRule::DegreePair) => Coef::from_integer(1),
        (Some(Weak::Strict), AlphaRule::Valid) => {
            const SCALE: i64 = 1_000_000;
            Coef::new(SCALE / (n as i64 - 1), SCALE)
        }
    };
    Ok(AlphaBounds {
        lower,
        upper: Coef::from_integer(n as i64 - 1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// What a variable stands for, with 0-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Assign { vertex: usize, community: usize },
    Product { edge: usize, community: usize },
    Density { community: usize },
    Scaled { vertex: usize, community: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub role: Role,
    pub lower: Coef,
    pub upper: Coef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, Coef)>,
    pub sense: Sense,
    pub rhs: Coef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildOptions {
    pub weak: Option<Weak>,
    pub symmetry_break: bool,
    pub alpha_rule: AlphaRule,
}

/// A maximization MILP with named variables and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, Coef)>,
    pub n: usize,
    pub m: usize,
    pub edges: Vec<(usize, usize)>,
    pub bounds: AlphaBounds,
    pub options: BuildOptions,
}

impl LinearModel {
    fn x(&self, i: usize, l: usize) -> usize {
        i * self.m + l
    }

    fn w(&self, e: usize, l: usize) -> usize {
        self.n * self.m + e * self.m + l
    }

    fn alpha(&self, l: usize) -> usize {
        self.n * self.m + self.edges.len() * self.m + l
    }

    fn y(&self, i: usize, l: usize) -> usize {
        self.n * self.m + self.edges.len() * self.m + self.m + i * self.m + l
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn objective_value(&self, values: &[Coef]) -> Coef {
        self.objective.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// Names of every bound, integrality or row violated by `values`.
    pub fn violations(&self, values: &[Coef]) -> Vec<String> {
        let mut out = Vec::new();
        for (var, &value) in self.variables.iter().zip(values) {
            if value < var.lower || value > var.upper {
                out.push(format!("bound {}", var.name));
            }
            if var.kind == VarKind::Binary && !value.is_integer() {
                out.push(format!("integrality {}", var.name));
            }
        }
        for row in &self.constraints {
            let lhs: Coef = row.terms.iter().map(|&(v, c)| c * values[v]).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs,
                Sense::Ge => lhs >= row.rhs,
                Sense::Eq => lhs == row.rhs,
            };
            if !ok {
                out.push(row.name.clone());
            }
        }
        out
    }

    pub fn is_feasible(&self, values: &[Coef]) -> bool {
        self.violations(values).is_empty()
    }

    /// Reads the communities back from solver values keyed by variable name,
    /// taking `x_i_l > 0.5` as membership.
    pub fn decode_partition(&self, values: &HashMap<String, f64>) -> Option<Partition> {
        let mut labels = vec![None; self.n];
        for (idx, var) in self.variables.iter().enumerate() {
            if let Role::Assign { vertex, community } = var.role {
                if values.get(&var.name).copied().unwrap_or(0.0) > 0.5 {
                    if labels[vertex].is_some() {
                        return None;
                    }
                    labels[vertex] = Some(community);
                }
                debug_assert_eq!(idx, self.x(vertex, community));
            }
        }
        let labels: Option<Vec<usize>> = labels.into_iter().collect();
        Partition::from_labels(&labels?).ok()
    }
}

struct Builder {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind, role: Role, lower: Coef, upper: Coef) {
        self.variables.push(Variable {
            name,
            kind,
            role,
            lower,
            upper,
        });
    }

    fn row(&mut self, name: String, terms: Vec<(usize, Coef)>, sense: Sense, rhs: Coef) {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
    }
}

fn int(v: i64) -> Coef {
    Coef::from_integer(v)
}

pub fn build_model(g: &Graph, m: usize, options: BuildOptions) -> Result<LinearModel, ModelError> {
    let n = g.n();
    let bounds = alpha_bounds(g, options.weak, options.alpha_rule)?;
    if m < 2 || m > n - 1 {
        return Err(ModelError::CommunityCount { m, max: n - 1 });
    }
    let edges = g.edges().to_vec();
    let mut model = LinearModel {
        variables: Vec::new(),
        constraints: Vec::new(),
        objective: Vec::new(),
        n,
        m,
        edges,
        bounds,
        options,
    };
    let mut b = Builder {
        variables: Vec::new(),
        constraints: Vec::new(),
    };
    let (lo, up) = (bounds.lower, bounds.upper);
    let one = int(1);
    let zero = Coef::zero();

    for i in 0..n {
        for l in 0..m {
            let upper = if options.symmetry_break && l > i { zero } else { one };
            let role = Role::Assign { vertex: i, community: l };
            b.var(format!("x_{}_{}", i + 1, l + 1), VarKind::Binary, role, zero, upper);
        }
    }
    for (e, &(i, j)) in model.edges.iter().enumerate() {
        for l in 0..m {
            let role = Role::Product { edge: e, community: l };
            let name = format!("w_{}_{}_{}", i + 1, j + 1, l + 1);
            b.var(name, VarKind::Continuous, role, zero, one);
        }
    }
    for l in 0..m {
        let role = Role::Density { community: l };
        b.var(format!("a_{}", l + 1), VarKind::Continuous, role, lo, up);
    }
    for i in 0..n {
        for l in 0..m {
            let role = Role::Scaled { vertex: i, community: l };
            let name = format!("y_{}_{}", i + 1, l + 1);
            b.var(name, VarKind::Continuous, role, lo.min(zero), up.max(zero));
        }
    }

    for i in 0..n {
        let terms = (0..m).map(|l| (model.x(i, l), one)).collect();
        b.row(format!("assign_{}", i + 1), terms, Sense::Eq, one);
    }
    for l in 0..m {
        let terms: Vec<_> = (0..n).map(|i| (model.x(i, l), one)).collect();
        b.row(format!("size_min_{}", l + 1), terms.clone(), Sense::Ge, one);
        b.row(format!("size_max_{}", l + 1), terms, Sense::Le, int(n as i64 - 1));
    }
    for (e, &(i, j)) in model.edges.iter().enumerate() {
        for l in 0..m {
            let (w, xi, xj) = (model.w(e, l), model.x(i, l), model.x(j, l));
            let tag = format!("{}_{}_{}", i + 1, j + 1, l + 1);
            b.row(format!("fortet_i_{tag}"), vec![(w, one), (xi, -one)], Sense::Le, zero);
            b.row(format!("fortet_j_{tag}"), vec![(w, one), (xj, -one)], Sense::Le, zero);
            b.row(
                format!("fortet_ij_{tag}"),
                vec![(w, one), (xi, -one), (xj, -one)],
                Sense::Ge,
                -one,
            );
        }
    }
    for i in 0..n {
        for l in 0..m {
            let (y, x, a) = (model.y(i, l), model.x(i, l), model.alpha(l));
            let tag = format!("{}_{}", i + 1, l + 1);
            b.row(format!("mc_up_x_{tag}"), vec![(y, one), (x, -up)], Sense::Le, zero);
            b.row(format!("mc_lo_x_{tag}"), vec![(y, one), (x, -lo)], Sense::Ge, zero);
            b.row(
                format!("mc_up_a_{tag}"),
                vec![(y, one), (a, -one), (x, -lo)],
                Sense::Le,
                -lo,
            );
            b.row(
                format!("mc_lo_a_{tag}"),
                vec![(y, one), (a, -one), (x, -up)],
                Sense::Ge,
                -up,
            );
        }
    }
    let balance_terms = |l: usize| -> Vec<(usize, Coef)> {
        let mut terms: Vec<_> = (0..model.edges.len()).map(|e| (model.w(e, l), int(4))).collect();
        terms.extend((0..n).map(|i| (model.x(i, l), int(-(g.degree(i) as i64)))));
        terms
    };
    for l in 0..m {
        let mut terms = balance_terms(l);
        terms.extend((0..n).map(|i| (model.y(i, l), -one)));
        b.row(format!("link_{}", l + 1), terms, Sense::Eq, zero);
    }
    if let Some(weak) = options.weak {
        for l in 0..m {
            b.row(format!("weak_{}", l + 1), balance_terms(l), Sense::Ge, int(weak.offset()));
        }
    }
    model.objective = (0..m).map(|l| (model.alpha(l), one)).collect();
    model.variables = b.variables;
    model.constraints = b.constraints;
    Ok(model)
}

/// The point of the model that encodes partition `p`: `x` from `p`,
/// `w = x_i x_j`, `a_l = d_l`, `y = a_l x_il`.
pub fn induced_solution(model: &LinearModel, g: &Graph, p: &Partition) -> Result<Vec<Coef>, ModelError> {
    if p.m() != model.m || p.n() != model.n {
        return Err(ModelError::PartitionShape {
            found: p.m(),
            expected: model.m,
        });
    }
    let densities: Vec<Coef> = all_stats(g, p).iter().map(|s| s.density()).collect();
    for (l, &d) in densities.iter().enumerate() {
        if !model.bounds.contains(d) {
            return Err(ModelError::OutOfBounds {
                community: l + 1,
                density: d.to_string(),
                lower: model.bounds.lower.to_string(),
                upper: model.bounds.upper.to_string(),
            });
        }
    }
    let mut values = vec![Coef::zero(); model.variables.len()];
    for i in 0..model.n {
        let l = p.community_of(i);
        values[model.x(i, l)] = int(1);
        values[model.y(i, l)] = densities[l];
    }
    for (e, &(i, j)) in model.edges.iter().enumerate() {
        let l = p.community_of(i);
        if l == p.community_of(j) {
            values[model.w(e, l)] = int(1);
        }
    }
    for (l, &d) in densities.iter().enumerate() {
        values[model.alpha(l)] = d;
    }
    Ok(values)
}
