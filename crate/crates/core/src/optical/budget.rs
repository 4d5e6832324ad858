//! Analytic loss and OSNR budget.
//!
//! Each traversed span ends at a node whose add/drop structure (splitter or
//! coupler, plus the wavelength blocker when fitted) adds insertion loss, and
//! whose amplifier restores the launch power. One span plus its downstream node
//! form an amplified stage:
//!
//! ```text
//! OSNR_i [dB] = 58 + P_launch - L_i - NF_i
//! 1 / OSNR    = sum_i 1 / OSNR_i          (linear units)
//! ```
//!
//! SOA-based lossless nodes add no net node loss but still contribute their
//! noise figure.

use serde::{Deserialize, Serialize};

use super::{ModulationFormat, OpticalPath};
use crate::num::{inf_as_str, Real};
use crate::topology::{AmpVariant, Node, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImpairmentParams<R> {
    /// Splitter/coupler insertion per traversed node.
    pub splitter_coupler_db: R,
    /// Wavelength blocker insertion.
    pub blocker_db: R,
    pub edfa_nf_db: R,
    pub soa_nf_db: R,
    /// 10·log10 of the photon energy in the 0.1 nm reference bandwidth, negated, in dBm.
    pub osnr_reference_db: R,
}

impl<R: Real> Default for ImpairmentParams<R> {
    fn default() -> Self {
        ImpairmentParams {
            splitter_coupler_db: R::lit(3.5),
            blocker_db: R::lit(7.0),
            edfa_nf_db: R::lit(5.5),
            soa_nf_db: R::lit(7.0),
            osnr_reference_db: R::lit(58.0),
        }
    }
}

impl<R: Real> ImpairmentParams<R> {
    /// Net node loss seen by the stage ending at `node`.
    pub fn node_loss_db(&self, node: &Node) -> R {
        match node.amp_variant {
            AmpVariant::SoaLossless => R::zero(),
            AmpVariant::Edfa if node.has_blocker => self.splitter_coupler_db + self.blocker_db,
            AmpVariant::Edfa => self.splitter_coupler_db,
        }
    }

    pub fn noise_figure_db(&self, node: &Node) -> R {
        match node.amp_variant {
            AmpVariant::Edfa => self.edfa_nf_db,
            AmpVariant::SoaLossless => self.soa_nf_db,
        }
    }

    pub fn stage_osnr_db(&self, launch_power_dbm: R, stage_loss_db: R, nf_db: R) -> R {
        self.osnr_reference_db + (launch_power_dbm - stage_loss_db) - nf_db
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport<R: Real> {
    pub total_loss_db: R,
    /// `+inf` when no stage is traversed.
    #[serde(with = "inf_as_str")]
    pub osnr_db: R,
    pub required_osnr_db: R,
    pub feasible: bool,
}

/// Combines per-stage OSNR values (dB) by reciprocal summation in linear units.
/// An empty chain yields `+inf`.
pub fn combine_osnr_db<R: Real>(stages: impl IntoIterator<Item = R>) -> R {
    let ten = R::lit(10.0);
    let inv: R = stages.into_iter().map(|s| ten.powf(-s / ten)).fold(R::zero(), |a, b| a + b);
    if inv == R::zero() {
        R::infinity()
    } else {
        -ten * inv.log10()
    }
}

/// (stage loss, noise figure) for every amplified stage along the path.
pub fn path_stages<R: Real>(topo: &Topology, path: &OpticalPath, params: &ImpairmentParams<R>) -> Vec<(R, R)> {
    path.spans
        .iter()
        .zip(path.hops.iter().skip(1))
        .map(|(span_id, node_id)| {
            let span = topo.span(span_id).expect("path spans belong to the topology");
            let node = topo.node(node_id).expect("path hops belong to the topology");
            let fiber = R::lit(span.length_km) * R::lit(span.loss_coeff_db_per_km);
            (fiber + params.node_loss_db(node), params.noise_figure_db(node))
        })
        .collect()
}

pub fn evaluate_feasibility<R: Real>(
    topo: &Topology,
    path: &OpticalPath,
    format: &ModulationFormat<R>,
    launch_power_dbm: R,
    params: &ImpairmentParams<R>,
) -> FeasibilityReport<R> {
    let stages = path_stages(topo, path, params);
    let total_loss_db = stages.iter().fold(R::zero(), |acc, (l, _)| acc + *l);
    let osnr_db = combine_osnr_db(stages.iter().map(|&(l, nf)| params.stage_osnr_db(launch_power_dbm, l, nf)));
    FeasibilityReport {
        total_loss_db,
        osnr_db,
        required_osnr_db: format.required_osnr_db,
        feasible: osnr_db >= format.required_osnr_db,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optical::{FormatCatalog, FormatName};
    use crate::topology::load_topology;
    use approx::assert_abs_diff_eq;

    fn single_span(km: f64, variant: &str) -> Topology {
        load_topology(&format!(
            r#"{{"nodes":[{{"id":"M1","kind":"MCEN"}},{{"id":"M2","kind":"MCEN","amp_variant":"{variant}"}}],
                "spans":[{{"id":"S","a":"M1","z":"M2","length_km":{km}}}]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn hand_computed_single_span() {
        let topo = single_span(80.0, "EDFA");
        let path = crate::optical::route_path(&topo, &"M1".into(), &"M2".into()).unwrap();
        let cat = FormatCatalog::<f64>::default();
        let p = ImpairmentParams::default();
        let r = evaluate_feasibility(&topo, &path, cat.get(FormatName::Dp16Qam), 0.0, &p);
        assert_abs_diff_eq!(r.total_loss_db, 26.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.osnr_db, 26.0, epsilon = 1e-9);
        assert!(r.feasible);
        let r = evaluate_feasibility(&topo, &path, cat.get(FormatName::Dp64Qam), 0.0, &p);
        assert!(!r.feasible);
    }

    #[test]
    fn same_computation_in_f32() {
        let topo = single_span(80.0, "EDFA");
        let path = crate::optical::route_path(&topo, &"M1".into(), &"M2".into()).unwrap();
        let cat = FormatCatalog::<f32>::default();
        let r = evaluate_feasibility(&topo, &path, cat.get(FormatName::Dp16Qam), 0.0f32, &ImpairmentParams::default());
        assert_abs_diff_eq!(r.osnr_db, 26.0f32, epsilon = 1e-4);
    }

    #[test]
    fn soa_node_has_no_node_loss() {
        let topo = single_span(80.0, "SOA_LOSSLESS");
        let path = crate::optical::route_path(&topo, &"M1".into(), &"M2".into()).unwrap();
        let cat = FormatCatalog::<f64>::default();
        let r = evaluate_feasibility(&topo, &path, cat.get(FormatName::DpQpsk), 0.0, &ImpairmentParams::default());
        assert_abs_diff_eq!(r.total_loss_db, 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.osnr_db, 58.0 - 16.0 - 7.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_span_path_is_unimpaired() {
        let topo = single_span(80.0, "EDFA");
        let path = OpticalPath::local("M1".into());
        let cat = FormatCatalog::<f64>::default();
        for f in cat.iter() {
            let r = evaluate_feasibility(&topo, &path, f, 0.0, &ImpairmentParams::default());
            assert_eq!(r.total_loss_db, 0.0);
            assert_eq!(r.osnr_db, f64::INFINITY);
            assert!(r.feasible);
        }
        let json = serde_json::to_string(&evaluate_feasibility(
            &topo,
            &path,
            cat.get(FormatName::DpQpsk),
            0.0,
            &ImpairmentParams::default(),
        ))
        .unwrap();
        assert!(json.contains(r#""osnr_db":"+inf""#), "{json}");
        let back: FeasibilityReport<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.osnr_db, f64::INFINITY);
    }

    #[test]
    fn two_equal_stages_lose_3db() {
        let one = combine_osnr_db([20.0f64]);
        let two = combine_osnr_db([20.0f64, 20.0]);
        assert_abs_diff_eq!(one - two, 10.0 * 2f64.log10(), epsilon = 1e-12);
    }
}
