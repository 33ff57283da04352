//! Reference implementations written without the library, for cross-checks.
#![allow(dead_code)]

/// Minimal fee-free constant-product pool.
#[derive(Clone, Copy, Debug)]
pub struct RefPool {
    pub x: f64,
    pub y: f64,
}

impl RefPool {
    pub fn price(&self) -> f64 {
        self.y / self.x
    }

    /// `sell == true` pays X for Y; otherwise pays Y for X. Returns the output.
    pub fn swap(&mut self, sell: bool, amount: f64) -> f64 {
        if sell {
            let out = self.y - self.x * self.y / (self.x + amount);
            self.x += amount;
            self.y -= out;
            out
        } else {
            let out = self.x - self.x * self.y / (self.y + amount);
            self.y += amount;
            self.x -= out;
            out
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RefTrade {
    pub sell: bool,
    pub amount: f64,
}

/// Mean squared log deviation of post-trade prices from the opening price.
pub fn ref_volatility(pool: RefPool, trades: &[RefTrade], order: &[usize]) -> (f64, RefPool) {
    let mut p = pool;
    let p0 = pool.price().ln();
    let mut acc = 0.0;
    for &i in order {
        p.swap(trades[i].sell, trades[i].amount);
        acc += (p0 - p.price().ln()).powi(2);
    }
    (acc / order.len() as f64, p)
}

/// Greedy: at each step take the trade whose post-trade price lands closest
/// (in log terms) to the opening price; lowest index on ties.
pub fn ref_clvr(pool: RefPool, trades: &[RefTrade]) -> Vec<usize> {
    let p0 = pool.price().ln();
    let mut p = pool;
    let mut left: Vec<usize> = (0..trades.len()).collect();
    let mut order = Vec::new();
    while !left.is_empty() {
        let mut best = 0;
        let mut best_dev = f64::INFINITY;
        for (k, &i) in left.iter().enumerate() {
            let mut q = p;
            q.swap(trades[i].sell, trades[i].amount);
            let dev = (p0 - q.price().ln()).abs();
            if dev < best_dev {
                best_dev = dev;
                best = k;
            }
        }
        let i = left.remove(best);
        p.swap(trades[i].sell, trades[i].amount);
        order.push(i);
    }
    order
}

/// Alternate sides around the opening price, smallest trade (valued in X at
/// the opening price) first.
pub fn ref_vhgsr(pool: RefPool, trades: &[RefTrade]) -> Vec<usize> {
    let p0 = pool.price();
    let size = |t: &RefTrade| if t.sell { t.amount } else { t.amount / p0 };
    let mut p = pool;
    let mut left: Vec<usize> = (0..trades.len()).collect();
    let mut order = Vec::new();
    while !left.is_empty() {
        let want_sell = if p.price() > p0 {
            Some(true)
        } else if p.price() < p0 {
            Some(false)
        } else {
            None
        };
        let side: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| want_sell.is_none_or(|s| trades[i].sell == s))
            .collect();
        let pool_of = if side.is_empty() { left.clone() } else { side };
        let pick = pool_of
            .iter()
            .copied()
            .min_by(|&a, &b| size(&trades[a]).total_cmp(&size(&trades[b])).then(a.cmp(&b)))
            .unwrap();
        left.retain(|&i| i != pick);
        p.swap(trades[pick].sell, trades[pick].amount);
        order.push(pick);
    }
    order
}

/// Visits every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Smallest and largest volatility over all orderings.
pub fn ref_volatility_range(pool: RefPool, trades: &[RefTrade]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for_each_permutation(trades.len(), |perm| {
        let v = ref_volatility(pool, trades, perm).0;
        lo = lo.min(v);
        hi = hi.max(v);
    });
    (lo, hi)
}

/// Ordering with the smallest volatility (any one of them).
pub fn ref_brute_force_min(pool: RefPool, trades: &[RefTrade]) -> Vec<usize> {
    let mut best = (f64::INFINITY, Vec::new());
    for_each_permutation(trades.len(), |perm| {
        let v = ref_volatility(pool, trades, perm).0;
        if v < best.0 {
            best = (v, perm.to_vec());
        }
    });
    best.1
}

/// Gini coefficient by the mean-absolute-difference definition.
pub fn ref_gini(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    let total: f64 = w.iter().sum();
    let mut diff = 0.0;
    for a in w {
        for b in w {
            diff += (a - b).abs();
        }
    }
    diff / (2.0 * n * total)
}

/// Upper tail of Student's t with `df` degrees of freedom, by Simpson's rule
/// on the density over [t, t + 400] (plenty for the df used in tests).
pub fn ref_t_sf(t: f64, df: f64) -> f64 {
    let ln_c = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let density = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let (a, b, n) = (t, t + 400.0, 400_000);
    let h = (b - a) / n as f64;
    let mut s = density(a) + density(b);
    for k in 1..n {
        let x = a + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * density(x);
    }
    s * h / 3.0
}

/// Lanczos approximation (g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Standard normal CDF (Abramowitz-Stegun 7.1.26, absolute error < 1.5e-7).
pub fn normal_cdf(z: f64) -> f64 {
    let x = z.abs() / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t * (0.254_829_592
        + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    let erfc = poly * (-x * x).exp();
    if z >= 0.0 {
        1.0 - 0.5 * erfc
    } else {
        0.5 * erfc
    }
}

pub struct RefSwap {
    pub block: u64,
    pub trade: RefTrade,
}

/// Parses the swap fixture format with plain string handling.
pub fn ref_parse_swaps(text: &str) -> Vec<RefSwap> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            RefSwap {
                block: f[0].parse().unwrap(),
                trade: RefTrade {
                    sell: f[1] == "sell",
                    amount: f[2].parse().unwrap(),
                },
            }
        })
        .collect()
}

/// Percent reduction in mean per-block volatility of `rule` against the
/// observed order, each following its own pool trajectory.
pub fn ref_replay_reduction(
    pool: RefPool,
    blocks: &[Vec<RefTrade>],
    rule: impl Fn(RefPool, &[RefTrade]) -> Vec<usize>,
) -> f64 {
    let run = |choose: &dyn Fn(RefPool, &[RefTrade]) -> Vec<usize>| {
        let mut p = pool;
        let mut total = 0.0;
        for b in blocks {
            let order = choose(p, b);
            let (v, next) = ref_volatility(p, b, &order);
            total += v;
            p = next;
        }
        total / blocks.len() as f64
    };
    let observed = run(&|_, b: &[RefTrade]| (0..b.len()).collect());
    let ruled = run(&rule);
    100.0 * (1.0 - ruled / observed)
}

/// Groups parsed swaps by consecutive equal block numbers.
pub fn ref_group(swaps: &[RefSwap]) -> Vec<Vec<RefTrade>> {
    let mut out: Vec<Vec<RefTrade>> = Vec::new();
    let mut last = None;
    for s in swaps {
        if last != Some(s.block) {
            out.push(Vec::new());
            last = Some(s.block);
        }
        out.last_mut().unwrap().push(s.trade);
    }
    out
}
