//! Seeded k-means over ground positions: k-means++ seeding, Lloyd updates,
//! best of several restarts by inertia.

use rand::Rng;

use crate::cat::dist2;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centers: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
    /// Sum of squared distances to the assigned centers.
    pub inertia: f64,
}

fn nearest(p: [f64; 2], centers: &[[f64; 2]]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(k, &c)| (k, dist2(p, c)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn plus_plus<R: Rng + ?Sized>(points: &[[f64; 2]], k: usize, rng: &mut R) -> Vec<[f64; 2]> {
    let mut centers = vec![points[rng.gen_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|&p| dist2(p, centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.gen_range(0.0..total);
            let mut idx = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            rng.gen_range(0..points.len())
        };
        let c = points[pick];
        centers.push(c);
        for (d, &p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, c));
        }
    }
    centers
}

fn lloyd(points: &[[f64; 2]], mut centers: Vec<[f64; 2]>, iters: usize) -> Clustering {
    let k = centers.len();
    let mut labels = vec![0; points.len()];
    for _ in 0..iters {
        for (l, &p) in labels.iter_mut().zip(points) {
            *l = nearest(p, &centers).0;
        }
        let mut sum = vec![[0.0, 0.0]; k];
        let mut count = vec![0usize; k];
        for (&l, &p) in labels.iter().zip(points) {
            sum[l][0] += p[0];
            sum[l][1] += p[1];
            count[l] += 1;
        }
        let mut moved = false;
        for c in 0..k {
            // an empty cluster keeps its previous center
            if count[c] > 0 {
                let n = count[c] as f64;
                let new = [sum[c][0] / n, sum[c][1] / n];
                moved |= new != centers[c];
                centers[c] = new;
            }
        }
        if !moved {
            break;
        }
    }
    let mut inertia = 0.0;
    for (l, &p) in labels.iter_mut().zip(points) {
        let (idx, d) = nearest(p, &centers);
        *l = idx;
        inertia += d;
    }
    Clustering { centers, labels, inertia }
}

/// Clusters `points` into `k` groups. The first restart with the lowest
/// inertia wins, so the result depends only on the RNG state.
///
/// # Panics
/// If `points` is empty or `k == 0`.
pub fn kmeans<R: Rng + ?Sized>(points: &[[f64; 2]], k: usize, iters: usize, restarts: usize, rng: &mut R) -> Clustering {
    assert!(!points.is_empty() && k > 0, "k-means needs points and k >= 1");
    let mut best: Option<Clustering> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(points, plus_plus(points, k, rng), iters);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}
