//! K-means clustering with silhouette-based model selection.
//!
//! Lloyd's algorithm over plain Euclidean distance. The quality measure is
//! the within-cluster sum of squares
//! `J = sum_i ||x_i - c_{a(i)}||^2`, which is non-increasing across
//! iterations: the assignment step can only lower each point's term, the
//! update step replaces each centroid by the mean of its members (the
//! minimizer of the cluster's term), and the empty-cluster repair moves an
//! empty centroid onto the point currently farthest from its own centroid
//! (dropping that point's term to zero).

use crate::error::Error;
use crate::scalar::Real;
use rand::Rng;

/// Convergence threshold on the largest centroid displacement.
const DISPLACEMENT_TOL: f64 = 1e-9;

/// Result of one clustering: centroids, per-point assignment, cluster sizes.
///
/// On return every point is assigned to its nearest centroid (ties to the
/// lower centroid index), every cluster is nonempty, and sizes sum to the
/// number of points.
#[derive(Debug, Clone)]
pub struct ClusterModel<F: Real> {
    pub centroids: Vec<Vec<F>>,
    pub assignments: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl<F: Real> ClusterModel<F> {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

fn squared_distance<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn distance<F: Real>(a: &[F], b: &[F]) -> F {
    squared_distance(a, b).sqrt()
}

/// Within-cluster sum of squares for a given assignment.
pub fn wcss<F: Real>(data: &[Vec<F>], centroids: &[Vec<F>], assignments: &[usize]) -> F {
    data.iter()
        .zip(assignments)
        .map(|(x, &a)| squared_distance(x, &centroids[a]))
        .sum()
}

/// Nearest-centroid index, ties to the lower index.
fn nearest<F: Real>(x: &[F], centroids: &[Vec<F>]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(x, &centroids[0]);
    for (c, centroid) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(x, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn assign_all<F: Real>(data: &[Vec<F>], centroids: &[Vec<F>], assignments: &mut [usize]) {
    for (i, x) in data.iter().enumerate() {
        assignments[i] = nearest(x, centroids);
    }
}

fn counts(assignments: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0usize; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    sizes
}

/// Give every empty cluster the point currently farthest from its own
/// centroid (from a cluster with at least two members), moving the empty
/// centroid onto that point. Keeps J non-increasing.
fn repair_empty<F: Real>(
    data: &[Vec<F>],
    centroids: &mut [Vec<F>],
    assignments: &mut [usize],
) {
    let k = centroids.len();
    let mut sizes = counts(assignments, k);
    for e in 0..k {
        if sizes[e] > 0 {
            continue;
        }
        let mut far_i = usize::MAX;
        let mut far_d = F::neg_infinity();
        for (i, x) in data.iter().enumerate() {
            if sizes[assignments[i]] < 2 {
                continue;
            }
            let d = squared_distance(x, &centroids[assignments[i]]);
            if d > far_d {
                far_d = d;
                far_i = i;
            }
        }
        if far_i == usize::MAX {
            // Every nonempty cluster is a singleton; duplicate one point.
            far_i = 0;
        }
        sizes[assignments[far_i]] -= 1;
        centroids[e] = data[far_i].clone();
        assignments[far_i] = e;
        sizes[e] += 1;
    }
}

fn cluster_means<F: Real>(
    data: &[Vec<F>],
    assignments: &[usize],
    old_centroids: &[Vec<F>],
) -> Vec<Vec<F>> {
    let k = old_centroids.len();
    let dim = data[0].len();
    let mut sums = vec![vec![F::zero(); dim]; k];
    let mut counts = vec![0usize; k];
    for (x, &a) in data.iter().zip(assignments) {
        counts[a] += 1;
        for (s, &v) in sums[a].iter_mut().zip(x) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .zip(old_centroids)
        .map(|((sum, count), old)| {
            if count == 0 {
                old.clone()
            } else {
                let n = F::of(count as f64);
                sum.into_iter().map(|s| s / n).collect()
            }
        })
        .collect()
}

/// Pick `k` initial centroids: distinct dataset points when the data has at
/// least `k` distinct values, otherwise distinct indices.
fn init_centroids<F: Real, R: Rng + ?Sized>(
    data: &[Vec<F>],
    k: usize,
    rng: &mut R,
) -> Vec<Vec<F>> {
    // First occurrence index of each distinct value.
    let mut unique: Vec<usize> = Vec::new();
    'outer: for (i, x) in data.iter().enumerate() {
        for &u in &unique {
            if data[u] == *x {
                continue 'outer;
            }
        }
        unique.push(i);
    }
    let pool: Vec<usize> = if unique.len() >= k {
        unique
    } else {
        (0..data.len()).collect()
    };
    let picked = rand::seq::index::sample(rng, pool.len(), k);
    picked.iter().map(|j| data[pool[j]].clone()).collect()
}

/// Lloyd iteration from explicit starting centroids.
///
/// Returns the model and the per-iteration J trace (one entry per
/// assignment pass). Stops when the largest centroid displacement falls
/// below 1e-9 or after `max_iters` update rounds.
pub fn kmeans_from<F: Real>(
    data: &[Vec<F>],
    initial_centroids: Vec<Vec<F>>,
    max_iters: usize,
) -> Result<(ClusterModel<F>, Vec<F>), Error> {
    let k = initial_centroids.len();
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if data.len() < k {
        return Err(Error::NotEnoughPoints { needed: k, got: data.len() });
    }
    let dim = data[0].len();
    if data.iter().any(|x| x.len() != dim) || initial_centroids.iter().any(|c| c.len() != dim) {
        return Err(Error::InvalidConfig("inconsistent point dimensions".into()));
    }

    let tol = F::of(DISPLACEMENT_TOL);
    let mut centroids = initial_centroids;
    let mut assignments = vec![0usize; data.len()];
    let mut trace: Vec<F> = Vec::new();

    for _ in 0..max_iters.max(1) {
        assign_all(data, &centroids, &mut assignments);
        repair_empty(data, &mut centroids, &mut assignments);
        trace.push(wcss(data, &centroids, &assignments));

        let new_centroids = cluster_means(data, &assignments, &centroids);
        let moved = centroids
            .iter()
            .zip(&new_centroids)
            .map(|(a, b)| distance(a, b))
            .fold(F::zero(), F::max);
        centroids = new_centroids;
        if moved < tol {
            break;
        }
    }

    // Final tidy so the returned assignment is nearest-centroid consistent
    // (a no-op when the loop converged rather than hit the iteration cap).
    assign_all(data, &centroids, &mut assignments);
    repair_empty(data, &mut centroids, &mut assignments);
    let sizes = counts(&assignments, k);
    Ok((ClusterModel { centroids, assignments, sizes }, trace))
}

/// K-means with seeded random initialization (k distinct dataset points).
pub fn kmeans<F: Real, R: Rng + ?Sized>(
    data: &[Vec<F>],
    k: usize,
    max_iters: usize,
    rng: &mut R,
) -> Result<ClusterModel<F>, Error> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if data.len() < k {
        return Err(Error::NotEnoughPoints { needed: k, got: data.len() });
    }
    let initial = init_centroids(data, k, rng);
    kmeans_from(data, initial, max_iters).map(|(model, _)| model)
}

/// Mean silhouette coefficient of an assignment.
///
/// For point i with mean same-cluster distance `a` and smallest mean
/// other-cluster distance `b`, the coefficient is `(b - a) / max(a, b)`.
/// Singleton clusters contribute 0 for their point, as does the degenerate
/// `a = b = 0` case. Needs at least two clusters; the result is in [-1, 1].
pub fn silhouette_score<F: Real>(data: &[Vec<F>], assignments: &[usize]) -> Result<F, Error> {
    if data.len() != assignments.len() {
        return Err(Error::DimensionMismatch { expected: data.len(), got: assignments.len() });
    }
    let k = assignments.iter().copied().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(Error::InvalidConfig("silhouette needs at least two clusters".into()));
    }
    let sizes = counts(assignments, k);
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidConfig("silhouette needs every cluster nonempty".into()));
    }

    let n = data.len();
    let mut total = F::zero();
    for i in 0..n {
        let own = assignments[i];
        if sizes[own] == 1 {
            continue; // contributes 0
        }
        // Mean distance from i to each cluster.
        let mut dist_sum = vec![F::zero(); k];
        for j in 0..n {
            if i == j {
                continue;
            }
            dist_sum[assignments[j]] += distance(&data[i], &data[j]);
        }
        let a = dist_sum[own] / F::of((sizes[own] - 1) as f64);
        let mut b = F::infinity();
        for (c, &s) in sizes.iter().enumerate() {
            if c != own && s > 0 {
                let mean = dist_sum[c] / F::of(s as f64);
                if mean < b {
                    b = mean;
                }
            }
        }
        let denom = a.max(b);
        if denom > F::zero() {
            total += (b - a) / denom;
        }
    }
    Ok(total / F::of(n as f64))
}

/// Scan cluster counts in `[k_lower, k_upper]` and return the K with the
/// best silhouette (ties to the smaller K). Every candidate K is clustered
/// from fresh seeded starting points drawn from `rng`.
pub fn choose_k<F: Real, R: Rng + ?Sized>(
    data: &[Vec<F>],
    k_lower: usize,
    k_upper: usize,
    max_iters: usize,
    rng: &mut R,
) -> Result<usize, Error> {
    if k_lower < 2 || k_lower > k_upper {
        return Err(Error::InvalidConfig(format!(
            "cluster-count range [{k_lower}, {k_upper}] must satisfy 2 <= lower <= upper"
        )));
    }
    if data.len() < k_upper {
        return Err(Error::NotEnoughPoints { needed: k_upper, got: data.len() });
    }
    let mut best_k = k_lower;
    let mut best_score = F::neg_infinity();
    for k in k_lower..=k_upper {
        let model = kmeans(data, k, max_iters, rng)?;
        let score = silhouette_score(data, &model.assignments)?;
        if score > best_score {
            best_score = score;
            best_k = k;
        }
    }
    Ok(best_k)
}
