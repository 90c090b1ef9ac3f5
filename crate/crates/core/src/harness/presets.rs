//! Named experiments.

use crate::agents::{Temperature, UpdateRule};
use crate::system::{Mode, Topology};
use crate::vicarious::SharingMask;

use super::spec::{ExperimentSpec, Grid};

pub const PRESETS: &[&str] = &[
    "fig2",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig4",
    "fig_inspiration",
    "fig_imitation",
    "fig_m",
    "fig_spike",
    "fig_T",
    "appA",
    "appB",
    "appC",
    "appD",
    "appE",
    "appF",
    "appF_er",
    "appF_lattice",
    "appG",
];

const GREEDY: Temperature<f64> = Temperature::Greedy;
const TAUS: [Temperature<f64>; 3] = [GREEDY, Temperature::Softmax(0.01), Temperature::Softmax(0.1)];
const EWA: UpdateRule = UpdateRule::Ewa;
const AVG: UpdateRule = UpdateRule::Averaging;

use Mode::{BeliefSharing as BS, Hybrid, None as Solo, Observational as Obs};

fn soft(t: f64) -> Temperature<f64> {
    Temperature::Softmax(t)
}

fn rates() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Dyad at the illustration point: m = 50, pi_max = 1, alpha = 0.8,
/// eps = 0.1, phi = 0.5, greedy choice, T = 1000.
fn baseline(modes: &[Mode]) -> Grid {
    Grid {
        mode: modes.to_vec(),
        ..Grid::default()
    }
}

/// Noisy short-horizon settings with the full `(phi_1, phi_2)` grid.
fn contingency(m: &[usize], pi_max: &[f64], horizon: &[usize]) -> Grid {
    Grid {
        mode: vec![Obs, BS],
        m: m.to_vec(),
        pi_max: pi_max.to_vec(),
        epsilon: vec![1.0],
        horizon: horizon.to_vec(),
        tau: vec![soft(0.01)],
        phi_1: rates(),
        phi_2: rates(),
        ..Grid::default()
    }
}

fn network(topology: Topology) -> Grid {
    Grid {
        mode: vec![Solo, Obs, BS],
        topology: vec![topology],
        pi_max: vec![1.0, 2.0],
        epsilon: vec![1.0],
        horizon: vec![100],
        tau: vec![soft(0.01)],
        ..Grid::default()
    }
}

const ER: Topology = Topology::ErdosRenyi { nodes: 100, p: 0.02 };
const LATTICE: Topology = Topology::Lattice { rows: 5, cols: 5 };

/// The preset called `name`, at the default run count and seed.
pub fn preset(name: &str) -> Option<ExperimentSpec> {
    let grids = match name {
        "fig2" => vec![baseline(&[Solo, Obs, BS, Hybrid])],
        "fig3a" | "fig3b" | "appA" => vec![Grid {
            tau: TAUS.to_vec(),
            ..baseline(&[Solo, Obs, BS])
        }],
        "fig3c" => vec![
            Grid {
                tau: TAUS.to_vec(),
                ..baseline(&[Solo, Obs])
            },
            Grid {
                tau: TAUS.to_vec(),
                phi_bs: vec![0.5, 0.3, 0.1],
                ..baseline(&[BS])
            },
        ],
        "fig4" => vec![Grid {
            full_feedback: vec![true],
            ..baseline(&[Solo, Obs, BS])
        }],
        "fig_inspiration" => vec![Grid {
            mode: vec![Solo, Mode::Inspiration],
            m: vec![5],
            epsilon: vec![0.1, 1.0],
            horizon: vec![50],
            tau: vec![soft(0.01)],
            phi_1: rates(),
            ..Grid::default()
        }],
        "fig_imitation" => vec![Grid {
            mode: vec![Solo, Mode::Imitation],
            m: vec![10],
            epsilon: vec![1.0],
            horizon: vec![50],
            tau: vec![soft(0.01), soft(0.1)],
            phi_1: rates(),
            ..Grid::default()
        }],
        "fig_m" => vec![contingency(&[10, 50], &[1.0], &[50])],
        "fig_spike" => vec![contingency(&[50], &[1.0, 1.5], &[50])],
        "fig_T" => vec![contingency(&[50], &[1.0], &[50, 1000])],
        "appB" => vec![contingency(&[10], &[1.0], &[50])],
        "appC" => vec![Grid {
            epsilon: vec![1.0],
            horizon: vec![100],
            tau: vec![soft(0.01)],
            ..baseline(&[Solo, Obs, BS])
        }],
        "appD" => vec![Grid {
            tau: vec![soft(0.01)],
            rules: vec![[EWA, EWA], [AVG, EWA], [AVG, AVG]],
            ..baseline(&[Solo, Obs, BS])
        }],
        "appE" => vec![Grid {
            alpha: vec![1.0],
            epsilon: vec![0.0],
            tau: TAUS.to_vec(),
            rules: vec![[EWA, EWA], [AVG, AVG]],
            ..baseline(&[Solo, Obs, BS])
        }],
        "appF" => vec![network(ER), network(LATTICE)],
        "appF_er" => vec![network(ER)],
        "appF_lattice" => vec![network(LATTICE)],
        "appG" => vec![
            Grid {
                sharing_mask: vec![SharingMask::All, SharingMask::ChosenOnly, SharingMask::RandomK(1)],
                ..baseline(&[BS])
            },
            Grid {
                tau: vec![soft(0.01)],
                sharing_freq: vec![1, 2, 5, 10],
                ..baseline(&[BS])
            },
            Grid {
                tau: vec![GREEDY, soft(0.01)],
                ..baseline(&[Solo, Obs])
            },
        ],
        _ => return None,
    };
    let mut spec = ExperimentSpec::new(name, grids);
    spec.search_scope = name == "appC";
    Some(spec)
}
