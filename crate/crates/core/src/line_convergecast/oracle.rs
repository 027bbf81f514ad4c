use crate::model::LineConfig;
use crate::scalar::Scalar;

/// A continuous piecewise-linear function on `[0, inf)`.
///
/// Piece `k` covers `[start_k, start_{k+1})` and evaluates to `offset + slope * x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    pieces: Vec<(Scalar, Scalar, Scalar)>,
}

impl PiecewiseLinear {
    pub fn linear(offset: Scalar, slope: Scalar) -> Self {
        PiecewiseLinear { pieces: vec![(Scalar::zero(), offset, slope)] }
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Start points of the pieces, beginning with 0.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        self.pieces.iter().map(|p| p.0.clone()).collect()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let k = self.pieces.partition_point(|p| &p.0 <= x).max(1) - 1;
        let (_, a, m) = &self.pieces[k];
        a + &(m * x)
    }

    /// Applies `y -> mul * y + add + add_slope * x` to every piece.
    pub fn affine(&self, mul: &Scalar, add: &Scalar, add_slope: &Scalar) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|(s, a, m)| (s.clone(), mul * a + add, mul * m + add_slope))
            .collect();
        PiecewiseLinear { pieces }.simplified()
    }

    fn combine(&self, other: &Self, take_min: bool) -> Self {
        let mut starts: Vec<Scalar> = self.breakpoints();
        starts.extend(other.breakpoints());
        starts.sort();
        starts.dedup();
        let mut pieces = Vec::new();
        for (idx, s) in starts.iter().enumerate() {
            let line_at = |f: &Self| {
                let k = f.pieces.partition_point(|p| &p.0 <= s) - 1;
                (f.pieces[k].1.clone(), f.pieces[k].2.clone())
            };
            let (a1, m1) = line_at(self);
            let (a2, m2) = line_at(other);
            let end = starts.get(idx + 1);
            let pick = |x: &Scalar| {
                let v1 = &a1 + &(&m1 * x);
                let v2 = &a2 + &(&m2 * x);
                if (v1 <= v2) == take_min {
                    (a1.clone(), m1.clone())
                } else {
                    (a2.clone(), m2.clone())
                }
            };
            let (a, m) = pick(s);
            pieces.push((s.clone(), a, m));
            if m1 != m2 {
                let cross = (&a2 - &a1) / (&m1 - &m2);
                if &cross > s && end.is_none_or(|e| &cross < e) {
                    let after = match end {
                        Some(e) => pick(&(&cross + e).half()),
                        None => pick(&(&cross + &Scalar::one())),
                    };
                    pieces.push((cross, after.0, after.1));
                }
            }
        }
        PiecewiseLinear { pieces }.simplified()
    }

    pub fn min(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn max(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    fn simplified(mut self) -> Self {
        self.pieces.dedup_by(|next, prev| next.1 == prev.1 && next.2 == prev.2);
        self
    }

    /// Least `x >= 0` with `f(x) >= 0`, for a nondecreasing function.
    pub fn first_nonnegative(&self) -> Option<Scalar> {
        for (k, (s, a, m)) in self.pieces.iter().enumerate() {
            if a + &(m * s) >= Scalar::zero() {
                return Some(s.clone());
            }
            if m.is_positive() {
                let x = -(a / m);
                if self.pieces.get(k + 1).is_none_or(|next| x < next.0) {
                    return Some(x);
                }
            }
        }
        None
    }
}

/// `ReachLR(j, .)` for `j = 1..=n` as explicit piecewise-linear functions.
fn reach_functions(positions: &[Scalar]) -> Vec<PiecewiseLinear> {
    let one = Scalar::one();
    let mut out: Vec<PiecewiseLinear> = Vec::with_capacity(positions.len());
    out.push(PiecewiseLinear::linear(positions[0].clone(), one.clone()));
    for x in &positions[1..] {
        let prev = out.last().expect("non-empty");
        let stay = PiecewiseLinear::linear(x.clone(), one.clone());
        let carried = prev.affine(&Scalar::from_int(2), &-x, &one);
        out.push(stay.min(&carried));
    }
    out
}

/// Least power at which the information of agent 1 reaches each agent `j`.
fn activation(positions: &[Scalar], reach: &[PiecewiseLinear]) -> Vec<Scalar> {
    let one = Scalar::one();
    let mut ac = vec![Scalar::zero(); positions.len()];
    for j in 1..positions.len() {
        let slack = reach[j - 1].affine(&one, &-&positions[j], &one);
        let need = slack.first_nonnegative().expect("slack grows without bound");
        ac[j] = Scalar::max_of(&ac[j - 1], &need);
    }
    ac
}

/// Optimal convergecast power by intersecting explicitly built reach functions.
pub fn quadratic_oracle_convergecast(c: &LineConfig) -> Scalar {
    let n = c.n();
    if n == 1 {
        return Scalar::zero();
    }
    let lr_pos = c.positions().to_vec();
    let rl_pos: Vec<Scalar> = c.positions().iter().rev().map(|x| -x).collect();
    let lr = reach_functions(&lr_pos);
    let rl = reach_functions(&rl_pos);
    let ac_lr = activation(&lr_pos, &lr);
    let ac_rl = activation(&rl_pos, &rl);
    (1..n)
        .map(|r| {
            // ReachLR(r) - ReachRL(r+1) = ReachLR(r) + ReachLR'(n-r)
            let diff = sum(&lr[r - 1], &rl[n - r - 1]);
            let root = diff.first_nonnegative().expect("gap grows without bound");
            Scalar::max_of(&Scalar::max_of(&root, &ac_lr[r - 1]), &ac_rl[n - r - 1])
        })
        .min()
        .expect("n >= 2")
}

fn sum(f: &PiecewiseLinear, g: &PiecewiseLinear) -> PiecewiseLinear {
    let mut starts = f.breakpoints();
    starts.extend(g.breakpoints());
    starts.sort();
    starts.dedup();
    let pieces = starts
        .into_iter()
        .map(|s| {
            let kf = f.pieces.partition_point(|p| p.0 <= s) - 1;
            let kg = g.pieces.partition_point(|p| p.0 <= s) - 1;
            let a = &f.pieces[kf].1 + &g.pieces[kg].1;
            let m = &f.pieces[kf].2 + &g.pieces[kg].2;
            (s, a, m)
        })
        .collect();
    PiecewiseLinear { pieces }.simplified()
}
