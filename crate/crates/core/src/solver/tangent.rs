/// Renormalisation record of a tangent-space integration.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentLog<const N: usize = 3> {
    pub renorm_times: Vec<f64>,
    /// `ln R_vv` of each renormalisation, one entry per tangent direction.
    pub log_norms: Vec<[f64; N]>,
    /// Largest `|QᵀQ − I|` entry seen over all renormalisations.
    pub max_orthonormality_defect: f64,
}

impl<const N: usize> Default for TangentLog<N> {
    fn default() -> Self {
        TangentLog { renorm_times: Vec::new(), log_norms: Vec::new(), max_orthonormality_defect: 0.0 }
    }
}

impl<const N: usize> TangentLog<N> {
    pub(crate) fn push(&mut self, t: f64, logs: [f64; N], q: &[[f64; N]]) {
        self.renorm_times.push(t);
        self.log_norms.push(logs);
        let defect = orthonormality_defect(q);
        if defect > self.max_orthonormality_defect {
            self.max_orthonormality_defect = defect;
        }
    }

    pub fn len(&self) -> usize {
        self.renorm_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.renorm_times.is_empty()
    }
}

/// Result of [`gram_schmidt`]: `vectors[v] = Σ_u q[u]·r[u][v]`.
#[derive(Debug, Clone)]
pub struct QrBasis<const N: usize> {
    pub q: Vec<[f64; N]>,
    pub r: [[f64; N]; N],
}

/// Modified Gram–Schmidt with one re-orthogonalisation pass.
pub fn gram_schmidt<const N: usize>(vectors: &[[f64; N]]) -> QrBasis<N> {
    assert_eq!(vectors.len(), N, "need N vectors of length N");
    let mut q: Vec<[f64; N]> = vectors.to_vec();
    let mut r = [[0.0; N]; N];
    for v in 0..N {
        for _pass in 0..2 {
            for u in 0..v {
                let proj: f64 = (0..N).map(|i| q[u][i] * q[v][i]).sum();
                r[u][v] += proj;
                for i in 0..N {
                    q[v][i] -= proj * q[u][i];
                }
            }
        }
        let norm = q[v].iter().map(|x| x * x).sum::<f64>().sqrt();
        r[v][v] = norm;
        if norm > 0.0 {
            for x in q[v].iter_mut() {
                *x /= norm;
            }
        }
    }
    QrBasis { q, r }
}

fn orthonormality_defect<const N: usize>(q: &[[f64; N]]) -> f64 {
    let mut worst: f64 = 0.0;
    for u in 0..q.len() {
        for v in 0..q.len() {
            let d: f64 = (0..N).map(|i| q[u][i] * q[v][i]).sum();
            let target = if u == v { 1.0 } else { 0.0 };
            worst = worst.max((d - target).abs());
        }
    }
    worst
}
