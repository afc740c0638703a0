//! Named invariant suites. Each check records the extremal value it
//! measured next to the limit it was held to.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{ext_gcd, is_generalized_pentagonal, jacobi, kronecker, mod_inverse, pow_mod, squarefree_decompose};
use crate::error::{Error, Result};
use crate::hecke::{
    dilate_l, dirichlet_convolve, dirichlet_inverse_fn, eta_delta_qexp, hecke_tn2_half, hecke_tp2_half,
    shimura_holo, shimura_holo_recover, MultiplicativeFunction,
};
use crate::kloosterman::cache::SumCache;
use crate::kloosterman::oracle::BruteTable;
use crate::kloosterman::partial::SumOptions;
use crate::kloosterman::{eta_conj_sum, eta_sum, weil_ratio, SumKind, TwistCharacter};
use crate::multiplier::{
    cocycle_defect, eta_transform_residual, random_matrix, theta_transform_residual, MultiplierSystem,
};
use crate::rademacher::{fit_kappa, kappa_max_residual, partition_sweep};
use crate::special::decay::{hat_decay_checks, phi_decay_checks, DECAY_PRESETS};
use crate::special::bessel::bessel_i_3_2;
use crate::special::{bessel_i, transform_check, transform_hat_with, transform_phi, ForcedWeight};
use crate::special::{HatForm, SpectralParam, TestFunctionParams};

/// Coefficients of `ηΔ` for the `T_25 T_49` order check; about 100 survive.
pub const ORDER_CHECK_LEN: usize = 125_000;

/// Default seed for randomized suites.
pub const DEFAULT_SEED: u64 = 20821;

/// Records audited exhaustively from the start of each cache file.
pub const AUDIT_PREFIX: u64 = 5000;
/// Additional seeded random records audited beyond the prefix.
pub const AUDIT_SAMPLES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Arith,
    Multiplier,
    Kloosterman,
    Transforms,
    Hecke,
    Rademacher,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Arith, Suite::Multiplier, Suite::Kloosterman, Suite::Transforms, Suite::Hecke, Suite::Rademacher];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Arith => "arith",
            Suite::Multiplier => "multiplier",
            Suite::Kloosterman => "kloosterman",
            Suite::Transforms => "transforms",
            Suite::Hecke => "hecke",
            Suite::Rademacher => "rademacher",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// One invariant: `measured ≤ limit` unless stated otherwise in `detail`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn at_most(suite: &'static str, name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Check { suite, name: name.into(), measured, limit, passed: measured <= limit, detail: String::new() }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}/{}: measured {:.3e}, limit {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.measured,
            self.limit
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Cache files here are audited by the kloosterman suite.
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: DEFAULT_SEED, cache_dir: None, threads: None }
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<Report> {
    let mut report = Report::default();
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        let checks = match s {
            Suite::Arith => arith_suite(opts),
            Suite::Multiplier => multiplier_suite(opts)?,
            Suite::Kloosterman => kloosterman_suite(opts)?,
            Suite::Transforms => transforms_suite()?,
            Suite::Hecke => hecke_suite()?,
            Suite::Rademacher => rademacher_suite(),
            Suite::All => unreachable!(),
        };
        report.checks.extend(checks);
    }
    Ok(report)
}

fn arith_suite(opts: &VerifyOptions) -> Vec<Check> {
    const S: &str = "arith";
    let mut out = Vec::new();

    // Euler's criterion for odd primes
    let mut bad = 0u64;
    for p in (3u64..400).filter(|&p| crate::arith::is_prime(p)) {
        for a in 0..p {
            let e = pow_mod(a, (p - 1) / 2, p);
            let want = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
            if jacobi(a, p) != want {
                bad += 1;
            }
        }
    }
    out.push(Check::at_most(S, "jacobi = Euler criterion, p < 400", bad as f64, 0.0));

    let mut bad = 0u64;
    for n in (1i64..=199).step_by(2) {
        for a in -60i64..=60 {
            for b in -60i64..=60 {
                if kronecker(a, n) * kronecker(b, n) != kronecker(a * b, n) {
                    bad += 1;
                }
            }
        }
    }
    out.push(Check::at_most(S, "kronecker multiplicative in the top argument", bad as f64, 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut bad = 0u64;
    for _ in 0..10_000 {
        let a = rng.gen_range(-1_000_000i64..1_000_000);
        let c = rng.gen_range(1u64..1_000_000);
        let (g, x, y) = ext_gcd(a, c as i64);
        if a as i128 * x as i128 + c as i128 * y as i128 != g as i128 {
            bad += 1;
        }
        if g == 1 {
            let inv = mod_inverse(a, c).expect("unit");
            if (a as i128 * inv as i128).rem_euclid(c as i128) != 1 % c as i128 {
                bad += 1;
            }
        }
        let sq = squarefree_decompose(c);
        if sq.root * sq.root * sq.core != c {
            bad += 1;
        }
    }
    out.push(Check::at_most(S, "ext_gcd, mod_inverse and square-free round trips", bad as f64, 0.0));

    let mut pent = vec![false; 10_001];
    for k in 0..100i64 {
        for v in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            if (v as usize) < pent.len() {
                pent[v as usize] = true;
            }
        }
    }
    let bad = (0..pent.len()).filter(|&v| pent[v] != is_generalized_pentagonal(v as u64)).count();
    out.push(Check::at_most(S, "pentagonal membership up to 10^4", bad as f64, 0.0));
    out
}

fn multiplier_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    const S: &str = "multiplier";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let eta = MultiplierSystem::eta();
    let theta = MultiplierSystem::theta();
    let (mut we, mut wt) = (0.0f64, 0.0f64);
    for _ in 0..2000 {
        let (g1, g2) = (random_matrix(&mut rng, 1000, 1), random_matrix(&mut rng, 1000, 1));
        we = we.max(cocycle_defect(&eta, &g1, &g2, Complex64::i())?);
        let (g1, g2) = (random_matrix(&mut rng, 1000, 4), random_matrix(&mut rng, 1000, 4));
        wt = wt.max(cocycle_defect(&theta, &g1, &g2, Complex64::new(1.0, 2.0))?);
    }
    out.push(Check::at_most(S, "eta cocycle defect (2000 pairs)", we, 1e-10));
    out.push(Check::at_most(S, "theta cocycle defect (2000 pairs)", wt, 1e-10));
    let (mut re, mut rt) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        re = re.max(eta_transform_residual(&random_matrix(&mut rng, 50, 1), Complex64::i(), None)?);
        rt = rt.max(theta_transform_residual(&random_matrix(&mut rng, 50, 4), Complex64::new(1.0, 2.0))?);
    }
    out.push(Check::at_most(S, "eta transformation residual (100 matrices)", re, 1e-10));
    out.push(Check::at_most(S, "theta transformation residual (100 matrices)", rt, 1e-10));
    Ok(out)
}

fn kloosterman_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    const S: &str = "kloosterman";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let pairs: Vec<(i64, i64)> =
        (0..10).map(|_| (rng.gen_range(-10_000..=10_000), rng.gen_range(-10_000..=10_000))).collect();

    let mut bad = Vec::new();
    for c in 1..=80u64 {
        let brute = BruteTable::new(c);
        for &(m, n) in &pairs {
            if eta_sum(m, n, c) != brute.eta_sum(m, n) {
                bad.push(c);
            }
        }
    }
    out.push(
        Check::at_most(S, "eta_sum = matrix enumeration, c ≤ 80", bad.len() as f64, 0.0)
            .with_detail(format!("{} pairs", pairs.len())),
    );

    let mut bad = 0u64;
    for c in 1..=120u64 {
        for &(m, n) in &pairs {
            if eta_sum(m, n, c).conjugate() != eta_conj_sum(1 - m, 1 - n, c) {
                bad += 1;
            }
        }
    }
    out.push(Check::at_most(S, "conjugation identity exact, c ≤ 120", bad as f64, 0.0));

    let (mut wc, mut we) = (0.0f64, 0.0f64);
    for c in 1..=500u64 {
        for &(m, n) in &pairs[..5] {
            wc = wc.max(weil_ratio(m, n, c, SumKind::Classical)?);
            we = we.max(weil_ratio(m, n, c, SumKind::Eta)?);
        }
    }
    out.push(Check::at_most(S, "classical Weil ratio, c ≤ 500", wc, 1.0 + 1e-9));
    out.push(Check::at_most(S, "eta Weil ratio, c ≤ 500", we, 1.0 + 1e-9));
    let mut wt = 0.0f64;
    for n in [1i64, 4, 17] {
        let big = 24 * n - 23;
        for j in 1..=5u64 {
            wt = wt.max(weil_ratio(big, big, 576 * j, SumKind::Twisted(TwistCharacter::Chi12))?);
        }
    }
    out.push(Check::at_most(S, "chi12-twisted bound, c = 576j, j ≤ 5", wt, 1.0 + 1e-9));

    // the fast kernel against exact multisets just above the exact cap
    let opts_fast = SumOptions { exact_cap: 0, ..SumOptions::default() };
    let mut scratch = crate::kloosterman::fast::Scratch::default();
    let mut worst = 0.0f64;
    for c in 1001..=1100u64 {
        for &(m, n) in &pairs[..3] {
            let fast = crate::kloosterman::partial::single_value(m, n, c, &opts_fast, &mut scratch);
            worst = worst.max((fast - eta_sum(m, n, c).evaluate()).norm());
        }
    }
    out.push(Check::at_most(S, "fast kernel vs exact, 1000 < c ≤ 1100", worst, 1e-9));

    if let Some(dir) = &opts.cache_dir {
        let cache = SumCache::new(dir);
        let sum_opts = SumOptions { threads: opts.threads, ..SumOptions::default() };
        for (m, n, kind, len) in cache.entries()? {
            let len = len as u64;
            let mut cs: Vec<u64> = (1..=len.min(AUDIT_PREFIX)).collect();
            if len > AUDIT_PREFIX {
                let mut r = ChaCha8Rng::seed_from_u64(opts.seed ^ len);
                cs.extend((0..AUDIT_SAMPLES).map(|_| r.gen_range(AUDIT_PREFIX + 1..=len)));
            }
            let bad = cache.audit(m, n, kind, &cs, &sum_opts)?;
            let detail = if bad.is_empty() {
                format!("{} records checked", cs.len())
            } else {
                format!("mismatch at c = {:?}", &bad[..bad.len().min(10)])
            };
            out.push(
                Check::at_most(S, format!("cache audit {kind} m={m} n={n}"), bad.len() as f64, 0.0).with_detail(detail),
            );
        }
    }
    Ok(out)
}

fn transforms_suite() -> Result<Vec<Check>> {
    const S: &str = "transforms";
    let mut out = Vec::new();

    let w = ForcedWeight { f: |y| y * (-y).exp(), lo: 0.0, hi: 60.0 };
    let mut worst = 0.0f64;
    for r in [2.0, 3.0, 5.0] {
        let want = (2f64.sqrt() - 1.0).powf(r - 1.0) / 2f64.sqrt();
        worst = worst.max((transform_check(&w, r)?.value.re - want).abs());
    }
    out.push(Check::at_most(S, "Laplace oracle for J_{r-1}", worst, 1e-8));

    let w = ForcedWeight { f: |y| y, lo: 0.0, hi: 60.0 };
    let k0 = transform_phi(&w, SpectralParam::Real(0.0))?.value.re;
    out.push(Check::at_most(S, "integral of K_0 = pi/2", (k0 - std::f64::consts::FRAC_PI_2).abs(), 1e-8));

    let p = TestFunctionParams::new(20.0, 10.0, 3.0)?;
    let mut worst = 0.0f64;
    for r in [0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
        let a = transform_hat_with(&p, r, HatForm::Hat)?.value;
        let b = transform_hat_with(&p, r, HatForm::Con)?.value;
        worst = worst.max((a - b).norm());
    }
    out.push(Check::at_most(S, "hat form = con form at six r", worst, 1e-10));

    let mut worst = 0.0f64;
    for i in 1..=200 {
        let y = i as f64 * 0.1;
        let a = bessel_i_3_2(y);
        worst = worst.max((a - bessel_i(1.5, y)).abs() / a);
    }
    out.push(Check::at_most(S, "I_{3/2} closed form vs series, y ≤ 20 (relative)", worst, 1e-12));

    for (a, x, t) in DECAY_PRESETS {
        let p = TestFunctionParams::new(a, x, t)?;
        for c in hat_decay_checks(&p)?.into_iter().chain(phi_decay_checks(&p)?) {
            let slope = c.slope.unwrap_or(f64::NEG_INFINITY);
            out.push(
                Check::at_most(S, format!("{} (a={a}, x={x}, T={t})", c.label), slope, c.limit)
                    .with_detail(format!("{} grid points", c.grid.len())),
            );
        }
    }
    Ok(out)
}

fn hecke_suite() -> Result<Vec<Check>> {
    const S: &str = "hecke";
    let mut out = Vec::new();
    let chi12 = MultiplicativeFunction::kronecker_character(12);
    let f = eta_delta_qexp(2000)?;
    let lf = dilate_l(&f)?;
    for p in [5u64, 7] {
        let left = dilate_l(&hecke_tp2_half(&f, p, 12, &chi12)?)?;
        let right = hecke_tp2_half(&lf, p, 12, &chi12)?;
        let m = left.len().min(right.len());
        let bad = (0..m).filter(|&i| left.exact_values().unwrap()[i] != right.exact_values().unwrap()[i]).count();
        out.push(
            Check::at_most(S, format!("L T_{}^2 = T_{}^2 L on 2000 coefficients", p, p), bad as f64, 0.0)
                .with_detail(format!("{m} indices compared")),
        );
    }
    let long = eta_delta_qexp(ORDER_CHECK_LEN)?;
    let ab = hecke_tn2_half(&hecke_tn2_half(&long, 5, 12, &chi12)?, 7, 12, &chi12)?;
    let ba = hecke_tn2_half(&hecke_tn2_half(&long, 7, 12, &chi12)?, 5, 12, &chi12)?;
    let m = ab.len().min(ba.len());
    let (av, bv) = (ab.exact_values().unwrap(), ba.exact_values().unwrap());
    let mut bad = (0..m).filter(|&i| av[i] != bv[i]).count();
    if av.iter().all(|v| v.is_zero()) {
        bad += 1;
    }
    out.push(Check::at_most(S, "T_25 T_49 = T_49 T_25", bad as f64, 0.0).with_detail(format!("{m} indices")));

    let n = 500;
    let h = MultiplicativeFunction::h_holomorphic(6, 73);
    let inv = dirichlet_inverse_fn(&h, n)?;
    let prod = dirichlet_convolve(&h.table(n), &inv);
    let bad = prod.iter().enumerate().filter(|(i, v)| if *i == 0 { !v.is_one() } else { !v.is_zero() }).count();
    out.push(Check::at_most(S, "h * h^-1 = delta (exact, N = 500)", bad as f64, 0.0));

    let big = eta_delta_qexp(2000)?;
    let c = dilate_l(&big)?;
    let psi_t = MultiplicativeFunction::shimura_kernel(12, 73, 12);
    let lift = shimura_holo(&c, 73, &psi_t, 5)?;
    let back = shimura_holo_recover(&lift.b, &psi_t)?;
    let ok = lift.b[0] == c.exact_at(73).cloned().unwrap_or_else(BigRational::zero) && back == lift.g;
    out.push(Check::at_most(S, "b_t(1) = a(t) and exact round trip, t = 73", if ok { 0.0 } else { 1.0 }, 0.0));
    Ok(out)
}

fn rademacher_suite() -> Vec<Check> {
    const S: &str = "rademacher";
    let mut out = Vec::new();
    let sweep = partition_sweep(500);
    let worst = sweep.iter().map(|r| r.residual).fold(0.0, f64::max);
    let wrong = sweep.iter().filter(|r| !r.rounds_correctly()).count();
    out.push(Check::at_most(S, "max |p_est - p_exact|, n ≤ 500, N = ceil(3 sqrt n)", worst, 0.5));
    out.push(Check::at_most(S, "rounding failures, n ≤ 500", wrong as f64, 0.0));
    match fit_kappa(20, 30) {
        Some(k) => {
            let r = kappa_max_residual(k, 100, 30);
            out.push(
                Check::at_most(S, "A_c = kappa S(1, 1-n, c), c ≤ 100, n ≤ 30", r, 1e-9)
                    .with_detail(format!("kappa = {:.12} {:+.12}i", k.re, k.im)),
            );
        }
        None => out.push(Check::at_most(S, "kappa fit on c ≤ 20", 1.0, 0.0).with_detail("no usable ratios")),
    }
    out
}
