use super::{finish, prepare, unpinned, SolveError, SolveRequest, SolveResult};

/// Scores every completion of the pins and keeps the best feasible one.
///
/// Completions are visited in lexicographic order: unpinned components by
/// id, the first one most significant, each cycling through ECUs by id.
/// Among equal scores the first visited wins.
pub fn solve_exhaustive(req: &SolveRequest<'_>) -> Result<SolveResult, SolveError> {
    let (problem, mut assignment) = prepare(req)?;
    let free = unpinned(&assignment);
    let ne = problem.num_ecus();

    let size = (ne as u128).checked_pow(free.len() as u32);
    match size {
        Some(n) if n <= req.params.exhaustive_cap as u128 => {}
        _ => {
            return Err(SolveError::InstanceTooLarge {
                size: size.map_or_else(
                    || format!("{ne}^{}", free.len()),
                    |n| n.to_string(),
                ),
                cap: req.params.exhaustive_cap,
            })
        }
    }

    let mut digits = vec![0usize; free.len()];
    for &c in &free {
        assignment[c] = Some(0);
    }
    let mut best: Option<(i64, Vec<Option<usize>>)> = None;
    let mut explored = 0u64;
    loop {
        explored += 1;
        let score = problem.score(&assignment);
        if score >= 0 && best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, assignment.clone()));
        }

        // odometer increment, last free component fastest
        let mut pos = free.len();
        loop {
            if pos == 0 {
                return Ok(finish(&problem, best, explored));
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < ne {
                assignment[free[pos]] = Some(digits[pos]);
                break;
            }
            digits[pos] = 0;
            assignment[free[pos]] = Some(0);
        }
    }
}
