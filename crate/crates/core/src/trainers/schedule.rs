use rand::seq::SliceRandom;
use rand::Rng;

use super::TrainError;

/// Uniform ordered sample of `s` distinct clients out of `0..m`.
pub fn sample_round_schedule<R: Rng + ?Sized>(
    m: usize,
    s: usize,
    rng: &mut R,
) -> Result<Vec<usize>, TrainError> {
    if s > m || s == 0 {
        return Err(TrainError::TooManyParticipants { s, m });
    }
    let mut clients: Vec<usize> = (0..m).collect();
    let (chosen, _) = clients.partial_shuffle(rng, s);
    Ok(chosen.to_vec())
}

pub(crate) fn check_schedule(
    schedule: &[usize],
    m: usize,
    s: usize,
    round: usize,
) -> Result<(), TrainError> {
    let bad = |reason: String| Err(TrainError::BadSchedule { round, reason });
    if schedule.len() != s {
        return bad(format!("expected {s} clients, got {}", schedule.len()));
    }
    let mut seen = vec![false; m];
    for &c in schedule {
        if c >= m {
            return bad(format!("client {c} out of range"));
        }
        if std::mem::replace(&mut seen[c], true) {
            return bad(format!("client {c} repeated"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::schedule_stream;

    #[test]
    fn full_schedule_is_permutation() {
        let mut s = sample_round_schedule(3, 3, &mut schedule_stream(4)).unwrap();
        s.sort_unstable();
        assert_eq!(s, vec![0, 1, 2]);
    }

    #[test]
    fn deterministic_and_rejects_oversampling() {
        let a = sample_round_schedule(10, 4, &mut schedule_stream(9)).unwrap();
        let b = sample_round_schedule(10, 4, &mut schedule_stream(9)).unwrap();
        assert_eq!(a, b);
        assert!(sample_round_schedule(2, 3, &mut schedule_stream(0)).is_err());
    }

    #[test]
    fn single_participant_is_uniform() {
        // χ² goodness of fit over 5 clients, 5000 draws; 4 dof, 99.9% quantile ≈ 18.47
        let (m, n) = (5, 5000);
        let mut counts = vec![0usize; m];
        for seed in 0..n {
            counts[sample_round_schedule(m, 1, &mut schedule_stream(seed)).unwrap()[0]] += 1;
        }
        let e = n as f64 / m as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        assert!(chi2 < 18.47, "χ² = {chi2}, counts {counts:?}");
    }

    #[test]
    fn replay_validation() {
        assert!(check_schedule(&[1, 0], 2, 2, 0).is_ok());
        assert!(check_schedule(&[1, 1], 2, 2, 0).is_err());
        assert!(check_schedule(&[2], 2, 1, 0).is_err());
        assert!(check_schedule(&[0], 2, 2, 0).is_err());
    }
}
