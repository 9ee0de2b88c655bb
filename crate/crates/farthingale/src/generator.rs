//! Greedy construction of outcome paths that keep a test superfarthingale
//! from growing, plus the adversarial "spite" forecasting system.
//!
//! Given announced forecasts and a test superfarthingale `F`, some outcome at
//! each step keeps `F` at or below its current value: the conditional upper
//! expectation of the next capital is bounded by the current one, and an
//! upper expectation is never smaller than the worst-case outcome value.
//! [`greedy_random_path`] follows that recipe — point forecasts `[0,0]` and
//! `[1,1]` force their only non-degenerate outcome, every other forecast gets
//! the capital-minimizing outcome — so the produced prequential path is
//! non-degenerate and the capital trajectory never rises.

use std::sync::Arc;

use crate::error::Error;
use crate::forecast::IntervalForecast;
use crate::preq::{PreqProcess, PreqTrajectory};
use crate::seq::{
    pair_is_degenerate, ForecastStream, Outcome, OutcomeStream, PrequentialSituation, Situation,
};
use crate::system::ForecastingSystem;

/// The forecasting system that always bets against a hidden outcome path:
/// `[0, 1/2]` when the path's next bit is 1, `[1/2, 1]` when it is 0. It
/// depends on the situation only through its length. Evaluation errors when
/// the hidden stream is exhausted.
pub fn spite_system(omega: Arc<dyn OutcomeStream>) -> ForecastingSystem {
    ForecastingSystem::from_fn(move |w: &Situation| {
        let next = omega.outcome_at(w.len())?;
        Ok(match next {
            Outcome::One => IntervalForecast::lower_half(),
            Outcome::Zero => IntervalForecast::upper_half(),
        })
    })
}

/// Outcome of a greedy run: the chosen path and its capital trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyRun {
    pub outcomes: Vec<Outcome>,
    pub trajectory: PreqTrajectory,
}

impl GreedyRun {
    pub fn outcome_situation(&self) -> Situation {
        Situation::from_outcomes(self.outcomes.clone())
    }
}

/// Walk `horizon` steps of `iota`, choosing each outcome so the capital of
/// `f` never increases: forced outcomes under `[0,0]` and `[1,1]`, otherwise
/// the child with the smaller capital (ties resolve to 0). Errors if the
/// chosen child's capital exceeds its parent — then `f` is not a
/// superfarthingale at that node — or on stream exhaustion.
pub fn greedy_random_path(
    iota: &dyn ForecastStream,
    f: &PreqProcess,
    horizon: usize,
) -> Result<GreedyRun, Error> {
    let mut v = PrequentialSituation::empty();
    let mut capital = f.value(&v)?;
    let mut values = vec![capital.clone()];
    let mut running_max = vec![capital.clone()];
    let mut outcomes = Vec::with_capacity(horizon);
    for n in 0..horizon {
        let forecast = iota.forecast_at(n)?;
        let child0 = f.value(&v.child(forecast.clone(), Outcome::Zero))?;
        let child1 = f.value(&v.child(forecast.clone(), Outcome::One))?;
        let x = if forecast.is_point_zero() {
            Outcome::Zero
        } else if forecast.is_point_one() {
            Outcome::One
        } else if child1 < child0 {
            Outcome::One
        } else {
            Outcome::Zero
        };
        let chosen = match x {
            Outcome::Zero => child0.clone(),
            Outcome::One => child1.clone(),
        };
        if chosen > capital {
            return Err(Error::NotSuperfarthingaleAt {
                node: v.label(),
                parent: capital,
                child0,
                child1,
            });
        }
        debug_assert!(!pair_is_degenerate(&forecast, x));
        capital = chosen;
        let max = running_max.last().unwrap().clone().max(capital.clone());
        values.push(capital.clone());
        running_max.push(max);
        outcomes.push(x);
        v.push(forecast, x);
    }
    Ok(GreedyRun {
        outcomes,
        trajectory: PreqTrajectory {
            values,
            running_max,
            steps: v.steps().to_vec(),
            first_degenerate: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::{lower_calibration_farthingale, SelectionFunction};
    use crate::preq::{doubler, mixture, MixtureSpec};
    use crate::rational::{int, pow2, rat, Rational};
    use crate::seq::{is_nondegenerate, ConstantForecasts, CycleForecasts};
    use crate::system::prequential_along;

    fn iv(lo: Rational, hi: Rational) -> IntervalForecast {
        IntervalForecast::new(lo, hi).unwrap()
    }

    fn bits(s: &str) -> Vec<Outcome> {
        s.bytes().map(|b| Outcome::from_bit(b - b'0').unwrap()).collect()
    }

    #[test]
    fn spite_forecasts_oppose_the_hidden_path() {
        let phi = spite_system(Arc::new(bits("11")));
        assert_eq!(
            phi.forecast(&Situation::empty()).unwrap(),
            IntervalForecast::lower_half()
        );

        let phi = spite_system(Arc::new(bits("10")));
        for w in [Situation::parse("0").unwrap(), Situation::parse("1").unwrap()] {
            assert_eq!(phi.forecast(&w).unwrap(), IntervalForecast::upper_half());
        }

        // Exhausted hidden stream surfaces as an error.
        let phi = spite_system(Arc::new(bits("10")));
        assert!(matches!(
            phi.forecast(&Situation::parse("01").unwrap()),
            Err(Error::StreamExhausted { .. })
        ));
    }

    #[test]
    fn spite_feeds_the_doubler_exponentially() {
        let omega = bits("1001101011");
        let phi = spite_system(Arc::new(omega.clone()));
        let f = doubler();
        for n in 0..=10 {
            let w = Situation::from_outcomes(omega[..n].to_vec());
            let v = prequential_along(&phi, &w).unwrap();
            assert_eq!(f.value(&v).unwrap(), pow2(n as u32));
        }
    }

    #[test]
    fn greedy_starves_the_doubler() {
        let iota = ConstantForecasts(IntervalForecast::lower_half());
        let run = greedy_random_path(&iota, &doubler(), 6).unwrap();
        assert_eq!(run.outcomes, bits("000000"));
        let mut expected = vec![int(1)];
        expected.extend(std::iter::repeat_n(int(0), 6));
        assert_eq!(run.trajectory.values, expected);
    }

    #[test]
    fn greedy_on_the_mixture_settles_at_the_residual() {
        let spec = MixtureSpec::new(vec![(rat(1, 2), doubler())]).unwrap();
        let f = mixture(&spec);
        let iota = ConstantForecasts(IntervalForecast::lower_half());
        let run = greedy_random_path(&iota, &f, 5).unwrap();
        assert_eq!(run.outcomes, bits("00000"));
        let mut expected = vec![int(1)];
        expected.extend(std::iter::repeat_n(rat(1, 2), 5));
        assert_eq!(run.trajectory.values, expected);
    }

    #[test]
    fn ties_resolve_to_zero_and_points_are_forced() {
        let iota = CycleForecasts(vec![
            IntervalForecast::point(int(0)).unwrap(),
            IntervalForecast::point(int(1)).unwrap(),
            iv(rat(1, 4), rat(3, 4)),
            IntervalForecast::point(rat(1, 2)).unwrap(),
        ]);
        let f = PreqProcess::constant(int(1));
        let run = greedy_random_path(&iota, &f, 8).unwrap();
        assert_eq!(run.outcomes, bits("01000100"));
        assert!(run.trajectory.values.iter().all(|q| q == &int(1)));
        assert!(is_nondegenerate(&run.trajectory.situation()));
    }

    #[test]
    fn greedy_milks_a_calibration_process() {
        // Under a constant [2/5, 3/5] the lower calibration factors are
        // 26/25 for outcome 0 and 47/50 for outcome 1; greedy always sells.
        let s = SelectionFunction::always();
        let f = lower_calibration_farthingale(&s, &rat(3, 10)).unwrap();
        let iota = ConstantForecasts(iv(rat(2, 5), rat(3, 5)));
        let run = greedy_random_path(&iota, &f, 12).unwrap();
        assert_eq!(run.outcomes, vec![Outcome::One; 12]);
        for (n, value) in run.trajectory.values.iter().enumerate() {
            assert_eq!(*value, num_traits::pow(rat(47, 50), n));
        }
        for pair in run.trajectory.values.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn greedy_rejects_processes_that_jump() {
        let f = PreqProcess::from_fn(|v| Ok(if v.is_empty() { int(1) } else { int(3) }));
        let iota = ConstantForecasts(iv(rat(1, 2), rat(1, 2)));
        let err = greedy_random_path(&iota, &f, 4).unwrap_err();
        match err {
            Error::NotSuperfarthingaleAt { node, parent, child0, child1 } => {
                assert_eq!(node, "-");
                assert_eq!(parent, int(1));
                assert_eq!(child0, int(3));
                assert_eq!(child1, int(3));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_horizon_returns_the_starting_capital() {
        let iota = ConstantForecasts(iv(rat(1, 4), rat(3, 4)));
        let run = greedy_random_path(&iota, &PreqProcess::constant(int(1)), 0).unwrap();
        assert!(run.outcomes.is_empty());
        assert_eq!(run.trajectory.values, vec![int(1)]);
        assert_eq!(run.outcome_situation(), Situation::empty());
    }
}
