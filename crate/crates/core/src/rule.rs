//! Public facade: assembled quadrature rules and integration.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::nodes::{self, CorrectionOrder};
use crate::oracle;
use crate::params::{validate_regime, JacobiParams, RegimeConfig};
use crate::weights::{self, WeightKind};

/// How the rule was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Phase inversion plus corrections, weights from the expansions.
    Asymptotic,
    /// Extended-precision recurrence throughout.
    Oracle,
    /// Asymptotic with one oracle Newton polish on flagged edge nodes.
    Hybrid,
}

/// Per-node regime classification collapsed to one tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFlag {
    Bulk,
    NearLeftTp,
    NearRightTp,
    OutOfRegime,
}

/// Construction options; the defaults reproduce the standard pipeline
/// (order-4 corrections, series truncated after `j = 3`).
#[derive(Debug, Clone, Copy)]
pub struct RuleOptions {
    pub order: CorrectionOrder,
    pub truncation: usize,
    /// Forced method; `None` dispatches on degree and regime.
    pub method: Option<Method>,
    /// Fail instead of falling back when the parameters leave the regime.
    pub strict: bool,
    /// Build nodes with the partitioned parallel sweep.
    pub parallel: bool,
}

impl Default for RuleOptions {
    fn default() -> Self {
        Self {
            order: CorrectionOrder::Four,
            truncation: 3,
            method: None,
            strict: false,
            parallel: false,
        }
    }
}

/// Degree below which the oracle path is both exact and cheap.
pub const SMALL_DEGREE_CUTOFF: u32 = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleMeta {
    pub node_order: u8,
    pub truncation: usize,
    pub method: Method,
    pub flags: Vec<NodeFlag>,
}

/// An assembled Gauss-Jacobi rule. Classical weights are kept both in
/// plain form (absent if any node's weight leaves the f64 range) and as
/// logarithms, which never overflow; scaled weights are always plain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub params: JacobiParams,
    pub nodes: Vec<f64>,
    pub weights_classical: Option<Vec<f64>>,
    pub log_weights_classical: Vec<f64>,
    pub weights_scaled: Vec<f64>,
    pub meta: RuleMeta,
}

/// What [`QuadratureRule::integrate`] sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrandMode {
    /// `sum w_l f(x_l)`, approximating the integral of `f` against the
    /// Jacobi weight function.
    Weighted,
    /// The weight function divided out node by node, approximating the
    /// plain integral of `f` (which must absorb any endpoint behavior).
    Plain,
}

fn flag_for(p: &JacobiParams, cfg: &RegimeConfig, x: f64) -> NodeFlag {
    let r = validate_regime(p, cfg, x);
    if r.out_of_regime {
        NodeFlag::OutOfRegime
    } else if r.near_left_tp {
        NodeFlag::NearLeftTp
    } else if r.near_right_tp {
        NodeFlag::NearRightTp
    } else {
        NodeFlag::Bulk
    }
}

/// Builds the `n`-point rule. Small degrees and out-of-regime parameters
/// dispatch to the oracle; otherwise the asymptotic pipeline runs at the
/// requested order and truncation.
pub fn gauss_jacobi_rule(n: u32, alpha: f64, beta: f64, options: &RuleOptions) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let p = JacobiParams::new(n, alpha, beta)?;
    let cfg = RegimeConfig {
        truncation: options.truncation,
        ..Default::default()
    };
    let in_regime = cfg.params_in_regime(&p) && alpha >= 0.0 && beta >= 0.0;
    let method = options.method.unwrap_or({
        if n < SMALL_DEGREE_CUTOFF || !in_regime {
            Method::Oracle
        } else {
            Method::Asymptotic
        }
    });
    if options.strict && method != Method::Oracle && !in_regime {
        return Err(Error::OutOfRegime(format!(
            "sigma = {}, tau = {} outside the trusted box",
            p.sigma, p.tau
        )));
    }
    match method {
        Method::Oracle => oracle_rule(&p, &cfg, options),
        Method::Asymptotic => asymptotic_rule(&p, &cfg, options, false),
        Method::Hybrid => asymptotic_rule(&p, &cfg, options, true),
    }
}

fn oracle_rule(p: &JacobiParams, cfg: &RegimeConfig, options: &RuleOptions) -> Result<QuadratureRule> {
    let zs = oracle::oracle_nodes(p.n, p.alpha, p.beta)?;
    let ws = oracle::oracle_weights(p.n, p.alpha, p.beta, &zs)?;
    let scaling = weights::scaling_constant(p)?;
    let nodes: Vec<f64> = zs.iter().map(|z| z.to_f64()).collect();
    let log_weights: Vec<f64> = ws.iter().map(|w| w.log_value.to_f64()).collect();
    let mut weights_classical = Some(Vec::with_capacity(nodes.len()));
    for w in &ws {
        let v = w.value.to_f64();
        if v.is_finite() && v > 0.0 {
            if let Some(list) = weights_classical.as_mut() {
                list.push(v);
            }
        } else {
            weights_classical = None;
            break;
        }
    }
    let weights_scaled: Vec<f64> = nodes
        .iter()
        .zip(&log_weights)
        .map(|(&x, &lw)| {
            (lw - scaling.log_value - p.alpha * (1.0 - x).ln() - p.beta * (1.0 + x).ln()).exp()
        })
        .collect();
    let flags = nodes.iter().map(|&x| flag_for(p, cfg, x)).collect();
    Ok(QuadratureRule {
        params: *p,
        nodes,
        weights_classical,
        log_weights_classical: log_weights,
        weights_scaled,
        meta: RuleMeta {
            node_order: options.order.as_u8(),
            truncation: options.truncation,
            method: Method::Oracle,
            flags,
        },
    })
}

/// One double-double Newton step toward the true zero; used by the
/// hybrid polish on flagged edge nodes.
fn polish_node(p: &JacobiParams, x: f64, lo: f64, hi: f64) -> f64 {
    let xd = Dd::from_f64(x);
    let (v, ve) = oracle::eval_scaled(p.n, p.alpha, p.beta, xd);
    let (d, de) = oracle::deriv_scaled(p.n, p.alpha, p.beta, xd);
    if d.is_zero() {
        return x;
    }
    let step = (v / d).ldexp((ve - de).clamp(-1000, 1000));
    let next = (xd - step).to_f64();
    if next > lo && next < hi {
        next
    } else {
        x
    }
}

fn asymptotic_rule(
    p: &JacobiParams,
    cfg: &RegimeConfig,
    options: &RuleOptions,
    polish: bool,
) -> Result<QuadratureRule> {
    let estimates = if options.parallel {
        nodes::all_nodes_parallel(p, options.order)?
    } else {
        nodes::all_nodes(p, options.order)?
    };
    let mut xs: Vec<f64> = estimates.iter().map(|e| e.value()).collect();
    let flags: Vec<NodeFlag> = xs.iter().map(|&x| flag_for(p, cfg, x)).collect();
    let method = if polish {
        for i in 0..xs.len() {
            if flags[i] != NodeFlag::Bulk {
                let lo = if i == 0 { p.x_minus } else { 0.5 * (xs[i - 1] + xs[i]) };
                let hi = if i + 1 == xs.len() {
                    p.x_plus
                } else {
                    0.5 * (xs[i] + xs[i + 1])
                };
                xs[i] = polish_node(p, xs[i], lo, hi);
            }
        }
        Method::Hybrid
    } else {
        Method::Asymptotic
    };
    let pairs = weights::all_weights(p, &xs, options.truncation, WeightKind::Both)?;
    let log_weights: Vec<f64> = pairs
        .iter()
        .map(|w| w.log_w.expect("classical weights requested"))
        .collect();
    let weights_scaled: Vec<f64> = pairs
        .iter()
        .map(|w| w.omega_scaled.expect("scaled weights requested"))
        .collect();
    let weights_classical: Option<Vec<f64>> = pairs
        .iter()
        .map(|w| w.w_classical.filter(|v| v.is_finite() && *v > 0.0))
        .collect();
    Ok(QuadratureRule {
        params: *p,
        nodes: xs,
        weights_classical,
        log_weights_classical: log_weights,
        weights_scaled,
        meta: RuleMeta {
            node_order: options.order.as_u8(),
            truncation: options.truncation,
            method,
            flags,
        },
    })
}

/// Compensated (Neumaier) accumulation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for y in values {
        let t = sum + y;
        comp += if sum.abs() >= y.abs() {
            (sum - t) + y
        } else {
            (y - t) + sum
        };
        sum = t;
    }
    sum + comp
}

impl QuadratureRule {
    pub fn n(&self) -> u32 {
        self.params.n
    }

    /// Classical weight at index `i`, through the log form when the plain
    /// list is absent.
    pub fn classical_weight(&self, i: usize) -> f64 {
        match &self.weights_classical {
            Some(w) => w[i],
            None => self.log_weights_classical[i].exp(),
        }
    }

    /// Applies the rule to `f` with compensated accumulation.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, mode: IntegrandMode) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (i, &x) in self.nodes.iter().enumerate() {
            let fx = f(x);
            if !fx.is_finite() {
                return Err(Error::NonFiniteIntegrand { x });
            }
            let w = match mode {
                IntegrandMode::Weighted => self.classical_weight(i),
                IntegrandMode::Plain => {
                    // divide the weight function out node by node
                    (self.log_weights_classical[i]
                        - self.params.alpha * (1.0 - x).ln()
                        - self.params.beta * (1.0 + x).ln())
                    .exp()
                }
            };
            terms.push(w * fx);
        }
        Ok(compensated_sum(terms.into_iter()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_legendre_rule() {
        let r = gauss_jacobi_rule(1, 0.0, 0.0, &RuleOptions::default()).unwrap();
        assert_eq!(r.meta.method, Method::Oracle);
        assert_eq!(r.nodes.len(), 1);
        assert!(r.nodes[0].abs() < 1e-15);
        assert!((r.weights_classical.as_ref().unwrap()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn example_rule_matches_printed_first_node_at_order_zero() {
        let opts = RuleOptions {
            order: CorrectionOrder::Zero,
            ..Default::default()
        };
        let r = gauss_jacobi_rule(25, 50.0, 41.0, &opts).unwrap();
        assert_eq!(r.meta.method, Method::Asymptotic);
        assert!((r.nodes[0] - (-0.7415548)).abs() < 5e-8);
    }

    #[test]
    fn dispatch_and_flags_for_standard_case() {
        let r = gauss_jacobi_rule(100, 50.0, 41.0, &RuleOptions::default()).unwrap();
        assert_eq!(r.meta.method, Method::Asymptotic);
        assert_eq!(r.nodes.len(), 100);
        let non_bulk = r
            .meta
            .flags
            .iter()
            .filter(|f| **f != NodeFlag::Bulk)
            .count();
        assert!(non_bulk <= 10, "{non_bulk} non-bulk nodes");
        for w in r.weights_classical.as_ref().unwrap() {
            assert!(*w > 0.0);
        }
        for w in &r.weights_scaled {
            assert!(*w > 0.0);
        }
    }

    #[test]
    fn sequential_construction_is_bit_deterministic() {
        let opts = RuleOptions::default();
        let a = gauss_jacobi_rule(60, 12.0, 7.5, &opts).unwrap();
        let b = gauss_jacobi_rule(60, 12.0, 7.5, &opts).unwrap();
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.log_weights_classical, b.log_weights_classical);
        assert_eq!(a.weights_scaled, b.weights_scaled);
    }

    #[test]
    fn small_degree_routes_to_oracle() {
        let r = gauss_jacobi_rule(5, 2.0, 3.0, &RuleOptions::default()).unwrap();
        assert_eq!(r.meta.method, Method::Oracle);
        assert_eq!(r.nodes.len(), 5);
    }

    #[test]
    fn out_of_regime_routes_to_oracle_or_errors_when_strict() {
        // sigma = 300/(2 kappa) with n = 25: sigma > 0.95
        let r = gauss_jacobi_rule(25, 500.0, 500.0, &RuleOptions::default()).unwrap();
        assert_eq!(r.meta.method, Method::Oracle);
        let strict = RuleOptions {
            strict: true,
            method: Some(Method::Asymptotic),
            ..Default::default()
        };
        assert!(matches!(
            gauss_jacobi_rule(25, 500.0, 500.0, &strict),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn hybrid_polish_changes_only_edge_nodes() {
        let base = gauss_jacobi_rule(
            100,
            50.0,
            41.0,
            &RuleOptions {
                method: Some(Method::Asymptotic),
                ..Default::default()
            },
        )
        .unwrap();
        let hybrid = gauss_jacobi_rule(
            100,
            50.0,
            41.0,
            &RuleOptions {
                method: Some(Method::Hybrid),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(hybrid.meta.method, Method::Hybrid);
        for i in 0..base.nodes.len() {
            if base.meta.flags[i] == NodeFlag::Bulk {
                assert_eq!(base.nodes[i], hybrid.nodes[i], "bulk node {i} moved");
            }
        }
        // polished nodes stay ordered
        for pair in hybrid.nodes.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn integrate_constant_gives_total_mass() {
        let r = gauss_jacobi_rule(100, 50.0, 41.0, &RuleOptions::default()).unwrap();
        let mass = oracle::moments(50.0, 41.0, 0).unwrap()[0].to_f64();
        let got = r.integrate(|_| 1.0, IntegrandMode::Weighted).unwrap();
        assert!(
            ((got - mass) / mass).abs() < 1e-9,
            "rel err {}",
            ((got - mass) / mass).abs()
        );
    }

    #[test]
    fn integrate_odd_function_on_symmetric_rule() {
        let r = gauss_jacobi_rule(60, 8.0, 8.0, &RuleOptions::default()).unwrap();
        let mass = oracle::moments(8.0, 8.0, 0).unwrap()[0].to_f64();
        let got = r.integrate(|x| x, IntegrandMode::Weighted).unwrap();
        assert!(got.abs() < 1e-12 * mass);
    }

    #[test]
    fn integrate_rejects_non_finite_integrand() {
        let r = gauss_jacobi_rule(10, 0.0, 0.0, &RuleOptions::default()).unwrap();
        assert!(matches!(
            r.integrate(|x| (x - r.nodes[3]).recip(), IntegrandMode::Weighted),
            Err(Error::NonFiniteIntegrand { .. })
        ));
    }

    #[test]
    fn plain_mode_divides_the_weight_out() {
        // integral of 1 over [-1,1] is 2 once the weight is divided out;
        // the integrand must be smooth for this to converge, and a
        // constant is as smooth as it gets
        let r = gauss_jacobi_rule(200, 0.5, 0.25, &RuleOptions::default()).unwrap();
        let got = r.integrate(|_| 1.0, IntegrandMode::Plain).unwrap();
        assert!((got - 2.0).abs() < 1e-3, "got {got}");
    }

    #[test]
    fn rejects_zero_degree() {
        assert!(gauss_jacobi_rule(0, 0.0, 0.0, &RuleOptions::default()).is_err());
    }
}
