use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use multree::chains::chain_rng;
use multree::coalescent::{merger_distribution, merger_rate, CoalescentSampler, LambdaBeta};
use multree::TreeShape;
use rand::Rng;

/// log(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Tanh-sinh quadrature of `x^(p-1) (1-x)^(q-1)` on `(0, 1)`. Both logs are
/// taken from the substitution variable directly so the endpoint
/// singularities never meet a cancelled `1 - x`.
fn beta_integral(p: f64, q: f64) -> f64 {
    let h = 1.0 / 128.0;
    let mut sum = 0.0;
    let mut j: i64 = -1200;
    while j <= 1200 {
        let t = j as f64 * h;
        let s = FRAC_PI_2 * t.sinh();
        // x = 1/(1+e^{-2s}), 1-x = 1/(1+e^{2s})
        let ln_x = -softplus(-2.0 * s);
        let ln_1mx = -softplus(2.0 * s);
        // dx/dt = (pi/2) cosh t * x (1 - x) * 2
        let ln_w = (FRAC_PI_2 * t.cosh() * 2.0).ln() + ln_x + ln_1mx;
        sum += ((p - 1.0) * ln_x + (q - 1.0) * ln_1mx + ln_w).exp();
        j += 1;
    }
    sum * h
}

#[test]
fn rates_match_quadrature() {
    let mut rng = chain_rng(2024, 0);
    for _ in 0..20 {
        let a = rng.gen_range(0.5..3.0);
        let bp = rng.gen_range(0.5..3.0);
        let b = rng.gen_range(2..40usize);
        let k = rng.gen_range(2..=b);
        let m = LambdaBeta::new(a, bp).unwrap();
        let want = beta_integral(k as f64 - 2.0 + a, (b - k) as f64 + bp) / beta_integral(a, bp);
        let got = merger_rate(b, k, &m).unwrap();
        assert!(
            (got - want).abs() <= 1e-10 * want,
            "a={a} b'={bp} b={b} k={k}: {got} vs {want}"
        );
    }
}

#[test]
fn rates_are_consistent() {
    // lambda_{b,k} = lambda_{b+1,k} + lambda_{b+1,k+1}
    let m = LambdaBeta::new(0.8, 1.7).unwrap();
    for b in 2..30 {
        for k in 2..=b {
            let lhs = merger_rate(b, k, &m).unwrap();
            let rhs = merger_rate(b + 1, k, &m).unwrap() + merger_rate(b + 1, k + 1, &m).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }
}

#[test]
fn first_merger_sizes_follow_the_rates() {
    let n = 8;
    let m = LambdaBeta::new(1.0, 1.0).unwrap();
    let sampler = CoalescentSampler::new(n, m).unwrap();
    // oracle weights from quadrature, normalised by hand
    let w: Vec<f64> = (2..=n)
        .map(|k| {
            let choose = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            choose * beta_integral(k as f64 - 1.0, (n - k) as f64 + 1.0)
        })
        .collect();
    let total: f64 = w.iter().sum();
    let draws = 1_000_000;
    let mut hits = vec![0usize; n - 1];
    let mut rng = chain_rng(8, 0);
    for _ in 0..draws {
        let (_, sizes) = sampler.sample_history(&mut rng);
        hits[sizes[0] - 2] += 1;
        assert_eq!(sizes.iter().map(|k| k - 1).sum::<usize>(), n - 1);
    }
    for (i, &h) in hits.iter().enumerate() {
        let p = w[i] / total;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        let got = h as f64 / draws as f64;
        assert!((got - p).abs() < 3.0 * se + 1e-9, "k={}: {got} vs {p}", i + 2);
    }
}

#[test]
fn three_tip_star_probability() {
    let p = merger_distribution(3, &LambdaBeta::uniform()).unwrap();
    assert!((p[1] - 0.25).abs() < 1e-14);
}

/// A rooted tree built from merger events; node `i` was created by event
/// `i` and lists its children as tips or earlier nodes.
#[derive(Clone)]
struct Forest {
    lineages: Vec<Option<usize>>,
    children: Vec<(usize, Vec<usize>)>,
}

impl Forest {
    /// Ranks nodes by event time with the last event as rank 1 and reads off
    /// the parent-rank and leaf-count vectors.
    fn shape(&self) -> TreeShape {
        let k = self.children.len();
        let rank = |e: usize| k - e;
        let mut t = vec![0; k];
        let mut l = vec![0; k];
        for (e, (tips, kids)) in self.children.iter().enumerate() {
            l[rank(e) - 1] = *tips;
            for &c in kids {
                t[rank(c) - 1] = rank(e);
            }
        }
        TreeShape::new(t, l).unwrap()
    }
}

fn subsets(b: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << b) {
        if mask.count_ones() as usize == k {
            out.push((0..b).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

fn exact_law(f: &Forest, p: f64, m: &LambdaBeta, out: &mut HashMap<TreeShape, f64>) {
    let b = f.lineages.len();
    if b == 1 {
        *out.entry(f.shape()).or_default() += p;
        return;
    }
    let law = merger_distribution(b, m).unwrap();
    for k in 2..=b {
        let picks = subsets(b, k);
        let each = p * law[k - 2] / picks.len() as f64;
        for pick in picks {
            let mut g = f.clone();
            let event = g.children.len();
            let mut tips = 0;
            let mut kids = Vec::new();
            for &i in &pick {
                match f.lineages[i] {
                    None => tips += 1,
                    Some(c) => kids.push(c),
                }
            }
            g.lineages = (0..b).filter(|i| !pick.contains(i)).map(|i| f.lineages[i]).collect();
            g.lineages.push(Some(event));
            g.children.push((tips, kids));
            exact_law(&g, each, m, out);
        }
    }
}

#[test]
fn shape_law_matches_exhaustive_histories() {
    for (n, m) in [(4, LambdaBeta::uniform()), (5, LambdaBeta::new(0.5, 1.5).unwrap())] {
        let mut law = HashMap::new();
        exact_law(
            &Forest {
                lineages: vec![None; n],
                children: Vec::new(),
            },
            1.0,
            &m,
            &mut law,
        );
        assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-12);
        let sampler = CoalescentSampler::new(n, m).unwrap();
        let draws = 200_000;
        let mut rng = chain_rng(n as u64, 0);
        let mut hits: HashMap<TreeShape, usize> = HashMap::new();
        for _ in 0..draws {
            *hits.entry(sampler.sample(&mut rng)).or_default() += 1;
        }
        for s in hits.keys() {
            assert!(law.contains_key(s), "{s} has probability zero");
        }
        for (s, &p) in &law {
            let got = hits.get(s).copied().unwrap_or(0) as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((got - p).abs() < 4.0 * se, "N={n} {s}: {got} vs {p}");
        }
    }
}

#[test]
fn uniform_three_tip_law() {
    let sampler = CoalescentSampler::new(3, LambdaBeta::uniform()).unwrap();
    let mut rng = chain_rng(3, 0);
    let draws = 400_000;
    let stars = (0..draws).filter(|_| sampler.sample(&mut rng).is_star()).count();
    let se = (0.25f64 * 0.75 / draws as f64).sqrt();
    assert!((stars as f64 / draws as f64 - 0.25).abs() < 4.0 * se);
}

#[test]
fn heavy_right_tail_gives_mostly_binary_trees() {
    // Beta(a, b') with a large b' puts its mass near 0, where pairwise
    // mergers dominate.
    let m = LambdaBeta::new(1.0, 400.0).unwrap();
    let p = merger_distribution(10, &m).unwrap();
    assert!(p[0] > 0.98);
    let sampler = CoalescentSampler::new(10, m).unwrap();
    let mut rng = chain_rng(4, 0);
    let binary = (0..2_000).filter(|_| sampler.sample(&mut rng).is_binary()).count();
    assert!(binary > 1_700);
}
