use super::*;
use crate::agents::Temperature;
use crate::metrics::Metric;
use crate::system::Mode;

fn small(modes: &[Mode]) -> Grid {
    Grid {
        mode: modes.to_vec(),
        m: vec![6],
        epsilon: vec![1.0],
        horizon: vec![30],
        tau: vec![Temperature::Softmax(0.05)],
        ..Grid::default()
    }
}

fn spec(grids: Vec<Grid>, runs: usize) -> ExperimentSpec {
    ExperimentSpec {
        runs,
        seed: 7,
        ..ExperimentSpec::new("test", grids)
    }
}

fn summaries(outcomes: Vec<CellOutcome<f64>>) -> Vec<CellSummary<f64>> {
    outcomes.into_iter().map(|o| o.result.unwrap()).collect()
}

#[test]
fn reproducible_and_worker_independent() {
    let s = spec(vec![small(&[Mode::None, Mode::Hybrid])], 300);
    let one = summaries(execute(&s, 1).unwrap());
    let again = summaries(execute(&s, 1).unwrap());
    let three = summaries(execute(&s, 3).unwrap());
    assert_eq!(one, again);
    assert_eq!(one, three);
}

#[test]
fn single_run_matches_the_trace() {
    let s = spec(vec![small(&[Mode::Observational])], 1);
    let out = summaries(execute(&s, 1).unwrap()).remove(0);
    let cell = &s.cells()[0];
    let config = cell.system_config().unwrap();
    let trace = simulate_run::<f64>(cell, &config, derive_run_seed(7, 0, 0)).unwrap();
    assert_eq!(out.series, MetricSeries::from_traces(&[trace]).unwrap());
}

#[test]
fn common_random_numbers() {
    let grids = vec![small(&[Mode::None, Mode::None, Mode::Observational])];
    let mut s = spec(grids, 200);
    s.crn = true;
    let out = summaries(execute(&s, 1).unwrap());
    assert_eq!(out[0], out[1]);
    // same environments, priors and first draws: period 1 coincides
    let first = |c: &CellSummary<f64>| c.series.get(Metric::MeanPayoff).at(1);
    assert_eq!(first(&out[0]), first(&out[2]));
    assert_ne!(out[0], out[2]);

    s.crn = false;
    let out = summaries(execute(&s, 1).unwrap());
    assert_ne!(out[0], out[1]);
}

#[test]
fn failing_cells_are_isolated() {
    let bad_config = Grid {
        m: vec![0, 6],
        ..small(&[Mode::None])
    };
    let overflow = Grid {
        pi_max: vec![5000.0],
        ..small(&[Mode::None])
    };
    let s = spec(vec![bad_config, overflow], 20);
    let out = execute::<f64>(&s, 2).unwrap();
    assert_eq!(out.len(), 3);
    assert!(out[0].result.is_err());
    assert!(out[1].result.is_ok());
    assert!(matches!(out[2].result, Err(Error::CellFailed { cell: 2, .. })));
}

#[test]
fn progress_callback_sees_every_cell() {
    let s = spec(vec![small(&[Mode::None, Mode::BeliefSharing])], 5);
    let mut seen = Vec::new();
    execute_with::<f64>(&s, 1, |o| seen.push(o.index)).unwrap();
    assert_eq!(seen, [0, 1]);
}

#[test]
fn rate_axis_validation() {
    assert_eq!(rate_axis(0.1).unwrap().len(), 11);
    assert_eq!(rate_axis(0.1).unwrap()[3], 0.3);
    assert_eq!(rate_axis(0.25).unwrap(), [0.0, 0.25, 0.5, 0.75, 1.0]);
    assert!(rate_axis(0.3).is_err());
    assert!(rate_axis(0.0).is_err());
    assert!(rate_axis(-0.5).is_err());
}

#[test]
fn individual_sweep_is_symmetric() {
    let base = CellParams {
        m: 5,
        horizon: 20,
        epsilon: 1.0,
        tau: Temperature::Softmax(0.05),
        ..CellParams::default()
    };
    let h = sweep_learning_rates::<f64>(&base, 0.5, 3000, 3, 1).unwrap();
    assert_eq!(h.side(), 3);
    for i in 0..3 {
        for j in 0..i {
            let (a, sa) = h.get(i, j);
            let (b, sb) = h.get(j, i);
            assert!((a - b).abs() < 2.0 * (sa * sa + sb * sb).sqrt(), "({i},{j})");
        }
    }
}

// With no learning a greedy agent keeps its best-prior alternative, which is
// the optimum with probability 1/m: expected payoff 1/m + (m-1)/m * alpha/2.
#[test]
fn zero_rates_give_the_static_baseline() {
    let base = CellParams {
        m: 5,
        horizon: 10,
        epsilon: 0.1,
        ..CellParams::default()
    };
    let h = sweep_learning_rates::<f64>(&base, 1.0, 20_000, 4, 1).unwrap();
    let (v, se) = h.get(0, 0);
    let expected = 0.2 + 0.8 * 0.4;
    assert!((v - expected).abs() < 3.0 * se, "{v} vs {expected}");
}
