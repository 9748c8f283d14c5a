//! Named checks with pass/fail reports, grouped into suites.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::algebra::{Bounds, Coeff, EvenPoly, Mono, PiScalar, Rat, TruncSeries};
use crate::kdv::{
    bgw_initial, kdv_residual, kw_initial, p_polys, verify_translation, verify_unshifted,
    TranslationFlavor,
};
use crate::specrec::{
    laplace_bridge, tr_correlator, tr_dilaton_check, tr_free_energy, tr_omega_g0, SpectralCurve,
};
use crate::virasoro::{
    assemble_tau, bracket, bracket_with, coeff_dictionary, commutator_defect, free_energy,
    multisets_with_sum, Model, VirasoroOp,
};
use crate::volumes::{
    dilaton_eval_theta, keys_upto, string_dilaton_wp, theta_closed_form, vol_theta_n0, vol_wp_n0,
    wp_closed_form, VolCache,
};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub pass: bool,
    /// Number of individual coefficients or identities compared.
    pub checked: usize,
    pub diffs: Vec<String>,
    /// Informational lines, e.g. both sides of an identity.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(rename = "duration_ms", serialize_with = "ser_ms")]
    pub duration: Duration,
}

fn ser_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            pass: true,
            checked: 0,
            diffs: Vec::new(),
            notes: Vec::new(),
            duration: Duration::ZERO,
        }
    }

    pub fn fail(&mut self, diff: impl Into<String>) {
        self.pass = false;
        self.diffs.push(diff.into());
    }

    /// Counts one comparison and records a diff when `ok` is false.
    pub fn expect(&mut self, ok: bool, diff: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(diff());
        }
    }

    pub fn finish(&mut self, start: Instant) {
        self.duration = start.elapsed();
    }

    /// Runs `body`, turning an error into a failed report.
    fn run(name: impl Into<String>, body: impl FnOnce(&mut Report) -> Result<()>) -> Report {
        let start = Instant::now();
        let mut r = Report::new(name);
        if let Err(e) = body(&mut r) {
            r.fail(format!("error: {e}"));
        }
        r.finish(start);
        r
    }

    pub fn status_line(&self) -> String {
        format!(
            "{} {} ({} checked, {:.1} ms)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.duration.as_secs_f64() * 1000.0
        )
    }
}

/// Every monomial of `a - b` inside `region` must vanish.
pub fn compare_series<C: Coeff>(
    report: &mut Report,
    label: &str,
    a: &TruncSeries<C>,
    b: &TruncSeries<C>,
    region: &Bounds,
) {
    if !a.bounds().covers(region) || !b.bounds().covers(region) {
        report.fail(format!(
            "{label}: operands known on {} and {}, check region {region}",
            a.bounds(),
            b.bounds()
        ));
        return;
    }
    let d = a.sub(b).restrict(region);
    report.checked += t_positions(region);
    for (m, c) in d.sorted_terms() {
        report.fail(format!(
            "{label} {}: differs by {}",
            m.to_human(),
            c.to_pi().to_human()
        ));
    }
}

/// Number of t-monomials in a region; each is compared at every `hbar` power.
fn t_positions(region: &Bounds) -> usize {
    if region.max_degree < 0 || region.max_index < 0 {
        return 0;
    }
    let (n, k) = (region.max_degree as u64, region.max_index as u64 + 1);
    // C(n + k, k)
    (1..=k).fold(1u64, |acc, i| acc * (n + i) / i) as usize
}

/// `s` restricted to `region` must vanish.
pub fn expect_zero<C: Coeff>(
    report: &mut Report,
    label: &str,
    s: &TruncSeries<C>,
    region: &Bounds,
) {
    let zero = TruncSeries::zero(s.bounds());
    compare_series(report, label, s, &zero, region);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    All,
    Volumes,
    Virasoro,
    Kdv,
    Translation,
    Specrec,
    Dilaton,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = [
        "all",
        "volumes",
        "virasoro",
        "kdv",
        "translation",
        "specrec",
        "dilaton",
    ];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "volumes" => Suite::Volumes,
            "virasoro" => Suite::Virasoro,
            "kdv" => Suite::Kdv,
            "translation" => Suite::Translation,
            "specrec" => Suite::Specrec,
            "dilaton" => Suite::Dilaton,
            _ => return Err(Error::Parse(format!("unknown suite '{s}'"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::All,
            Suite::Volumes,
            Suite::Virasoro,
            Suite::Kdv,
            Suite::Translation,
            Suite::Specrec,
            Suite::Dilaton,
        ]
        .iter()
        .position(|s| s == self)
        .expect("listed");
        f.write_str(Suite::NAMES[i])
    }
}

/// Bounds for every suite. The defaults are the desk-scale ones.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Super volumes and their dilaton identity: `2g - 2 + n <= max_euler`.
    pub max_euler: u32,
    /// Mirzakhani volumes, string identities and the KW dictionary.
    pub wp_euler: u32,
    /// Correlators on the Theta curve.
    pub theta_corr_euler: u32,
    /// Correlators on the sine curve.
    pub sine_corr_euler: u32,
    /// Output region of the Virasoro and KdV checks.
    pub tau: Bounds,
    pub translation_theta: Bounds,
    pub translation_wp: Bounds,
    /// Restricts the dilaton suite to one key.
    pub only_key: Option<(u32, u32)>,
    /// Replaces `Z^Θ` by `exp(t_0^2)` in the KdV suite.
    pub bad_input: bool,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_euler: 6,
            wp_euler: 5,
            theta_corr_euler: 5,
            sine_corr_euler: 4,
            tau: Bounds::new(3, 4, 4),
            translation_theta: Bounds::new(1, 2, 4),
            translation_wp: Bounds::new(0, 4, 4),
            only_key: None,
            bad_input: false,
            seed: 0x5eed,
        }
    }
}

impl VerifyConfig {
    /// Caps every Euler-characteristic bound at `e`.
    pub fn with_max_euler(mut self, e: u32) -> Self {
        self.max_euler = e;
        self.wp_euler = self.wp_euler.min(e);
        self.theta_corr_euler = self.theta_corr_euler.min(e);
        self.sine_corr_euler = self.sine_corr_euler.min(e);
        self
    }
}

/// Runs a suite; reports are sorted by name and never abort each other.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig, cache: &VolCache) -> Vec<Report> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Volumes {
        out.extend(volume_checks(cfg, cache));
    }
    if all || suite == Suite::Virasoro {
        out.extend(virasoro_checks(cfg, cache));
    }
    if all || suite == Suite::Kdv {
        out.extend(kdv_checks(cfg));
    }
    if all || suite == Suite::Translation {
        out.extend(translation_checks(cfg, cache));
    }
    if all || suite == Suite::Specrec {
        out.extend(specrec_checks(cfg, cache));
    }
    if all || suite == Suite::Dilaton {
        out.extend(dilaton_checks(cfg, cache));
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

fn theta_keys(euler: u32) -> Vec<(u32, u32)> {
    keys_upto(euler)
        .into_iter()
        .filter(|&(g, _)| g >= 1)
        .collect()
}

fn volume_checks(cfg: &VerifyConfig, cache: &VolCache) -> Vec<Report> {
    let e = cfg.max_euler;
    let we = cfg.wp_euler;
    vec![
        Report::run("volumes/theta-closed-forms", |r| {
            for (g, n) in theta_keys(e) {
                if let Some(want) = theta_closed_form(g, n) {
                    let got = cache.vol_theta(g, n)?;
                    r.expect(got == want, || {
                        format!("V^Θ_{{{g},{n}}} = {got}, expected {want}")
                    });
                }
            }
            Ok(())
        }),
        Report::run("volumes/wp-table", |r| {
            for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
                let want = wp_closed_form(g, n).expect("tabulated");
                let got = cache.vol_wp(g, n)?;
                r.expect(got == want, || {
                    format!("V^WP_{{{g},{n}}} = {got}, expected {want}")
                });
            }
            Ok(())
        }),
        Report::run("volumes/symmetry", |r| {
            for (g, n) in theta_keys(e) {
                let v = cache.vol_theta(g, n)?;
                r.expect(v.is_symmetric(), || {
                    format!("V^Θ_{{{g},{n}}} not symmetric")
                });
            }
            for (g, n) in keys_upto(we) {
                let v = cache.vol_wp(g, n)?;
                r.expect(v.is_symmetric(), || {
                    format!("V^WP_{{{g},{n}}} not symmetric")
                });
            }
            Ok(())
        }),
        Report::run("volumes/degree-and-grading", |r| {
            for (g, n) in theta_keys(e) {
                let v = cache.vol_theta(g, n)?;
                r.expect(v.degree() == Some(g - 1), || {
                    format!("deg V^Θ_{{{g},{n}}} = {:?}", v.degree())
                });
                r.expect(v.pi_grading_ok(g - 1), || {
                    format!("π grading of V^Θ_{{{g},{n}}}")
                });
            }
            for (g, n) in keys_upto(we) {
                let v = cache.vol_wp(g, n)?;
                let d = 3 * g + n - 3;
                r.expect(v.degree() == Some(d), || {
                    format!("deg V^WP_{{{g},{n}}} = {:?}", v.degree())
                });
                r.expect(v.pi_grading_ok(d), || {
                    format!("π grading of V^WP_{{{g},{n}}}")
                });
            }
            Ok(())
        }),
        Report::run("volumes/top-parts", |r| {
            for (g, n) in theta_keys(e) {
                let ok = cache.vol_theta(g, n)?.top_part() == cache.vol_theta_top(g, n)?;
                r.expect(ok, || format!("top of V^Θ_{{{g},{n}}}"));
            }
            for (g, n) in keys_upto(we) {
                let ok = cache.vol_wp(g, n)?.top_part() == cache.vol_wp_top(g, n)?;
                r.expect(ok, || format!("top of V^WP_{{{g},{n}}}"));
            }
            Ok(())
        }),
        Report::run("volumes/determinism", |r| {
            let cold = VolCache::in_memory();
            for (g, n) in theta_keys(e.min(4)) {
                r.expect(cold.vol_theta(g, n)? == cache.vol_theta(g, n)?, || {
                    format!("V^Θ_{{{g},{n}}} cold vs warm")
                });
            }
            for (g, n) in keys_upto(we.min(4)) {
                r.expect(cold.vol_wp(g, n)? == cache.vol_wp(g, n)?, || {
                    format!("V^WP_{{{g},{n}}} cold vs warm")
                });
            }
            Ok(())
        }),
    ]
}

/// Compares the bracket table read off top-degree volumes with the recursion.
pub fn dictionary_check(r: &mut Report, model: Model, euler: u32, cache: &VolCache) -> Result<()> {
    let keys = match model {
        Model::Theta => theta_keys(euler),
        Model::KW => keys_upto(euler),
    };
    for (g, n) in keys {
        let top = match model {
            Model::Theta => cache.vol_theta_top(g, n)?,
            Model::KW => cache.vol_wp_top(g, n)?,
        };
        let dict = coeff_dictionary(&top)?;
        let weight = match model {
            Model::Theta => g - 1,
            Model::KW => 3 * g + n - 3,
        };
        for ks in multisets_with_sum(n as usize, weight, weight) {
            let want = bracket(model, &ks);
            let got = dict.get(&ks).cloned().unwrap_or_default();
            r.expect(got == want, || {
                format!(
                    "{} bracket {ks:?} (g={g}): volume gives {got}, recursion gives {want}",
                    model.tag()
                )
            });
        }
    }
    Ok(())
}

/// Sparse pseudo-random series for operator identities.
pub fn random_series(seed: u64, bounds: Bounds, terms: usize) -> TruncSeries<Rat> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut s = TruncSeries::zero(bounds);
    for _ in 0..terms {
        let deg = rng.gen_range(0..=bounds.max_degree.max(0));
        let ks: Vec<u32> = (0..deg)
            .map(|_| rng.gen_range(0..=bounds.max_index.max(0) as u32))
            .collect();
        let h = rng.gen_range(-1..=bounds.max_hbar);
        let c = Rat::new(
            rng.gen_range(-9i64..=9).into(),
            rng.gen_range(1i64..=5).into(),
        );
        s.add_term(Mono::from_indices(h, &ks), c);
    }
    s
}

/// Region a Virasoro operator needs on its input for the output to cover `out`.
pub fn virasoro_source(model: Model, m: i32, out: Bounds) -> Bounds {
    let lead = match model {
        Model::Theta => m,
        Model::KW => m + 1,
    };
    Bounds::new(
        out.max_hbar + 1,
        out.max_degree + 2,
        (out.max_index + m.max(0)).max(lead),
    )
}

fn virasoro_checks(cfg: &VerifyConfig, cache: &VolCache) -> Vec<Report> {
    let tau = cfg.tau;
    let mut out = vec![
        Report::run("virasoro/k1-choice", |r| {
            for model in [Model::Theta, Model::KW] {
                for n in 1..=4 {
                    for s in 0..=4 {
                        for ks in multisets_with_sum(n, s, 4) {
                            let want = bracket(model, &ks);
                            let mut seen = Vec::new();
                            for first in 0..ks.len() {
                                if seen.contains(&ks[first]) {
                                    continue;
                                }
                                seen.push(ks[first]);
                                let got = bracket_with(model, &ks, first);
                                r.expect(got == want, || {
                                    format!("{} {ks:?} via k1 = {}", model.tag(), ks[first])
                                });
                            }
                        }
                    }
                }
            }
            Ok(())
        }),
        Report::run("virasoro/equivalence-theta", |r| {
            dictionary_check(r, Model::Theta, cfg.max_euler, cache)
        }),
        Report::run("virasoro/equivalence-kw", |r| {
            dictionary_check(r, Model::KW, cfg.wp_euler, cache)
        }),
        Report::run("virasoro/low-genus-bgw", |r| {
            let f = free_energy(Model::Theta, Bounds::new(2, 3, 2));
            let rows: [(i32, &[u32], i64, i64); 7] = [
                (0, &[0], 1, 8),
                (0, &[0, 0], 1, 16),
                (0, &[0, 0, 0], 1, 24),
                (1, &[1], 3, 128),
                (1, &[0, 1], 9, 128),
                (2, &[2], 15, 1024),
                (2, &[1, 1], 63, 1024),
            ];
            for (h, ks, num, den) in rows {
                let m = Mono::from_indices(h, ks);
                let got = f.coeff(&m)?;
                let want = Rat::new(num.into(), den.into());
                r.expect(got == want, || {
                    format!("{}: {got}, expected {want}", m.to_human())
                });
            }
            Ok(())
        }),
        Report::run("virasoro/commutators", |r| {
            let b = Bounds::new(2, 7, 8);
            let s = random_series(cfg.seed, b, 60);
            for (model, lo) in [(Model::Theta, 0), (Model::KW, -1)] {
                for a in lo..=3 {
                    for c in lo..=3 {
                        if a + c < lo || a == c {
                            continue;
                        }
                        let d = commutator_defect(model, a, c, &s)?;
                        let region = d.bounds();
                        r.expect(region.max_degree >= 0, || {
                            format!("{} [L{a},L{c}] region empty", model.tag())
                        });
                        expect_zero(r, &format!("{} [L{a},L{c}]", model.tag()), &d, &region);
                    }
                }
            }
            Ok(())
        }),
    ];
    for (model, lo, name) in [
        (Model::Theta, 0, "virasoro/annihilation-theta"),
        (Model::KW, -1, "virasoro/annihilation-kw"),
    ] {
        out.push(Report::run(name, |r| {
            for m in lo..=3 {
                let src = virasoro_source(model, m, tau);
                let z = assemble_tau(model, src)?;
                let lz = VirasoroOp::new(model, m)?.apply(&z);
                expect_zero(r, &format!("L{m} Z"), &lz, &tau);
            }
            Ok(())
        }));
    }
    out
}

/// Input region for `kdv_residual` to be exact on `out`.
pub fn kdv_source(out: Bounds) -> Bounds {
    Bounds::new(out.max_hbar, out.max_degree + 5, out.max_index.max(1))
}

fn exp_t0_squared(b: Bounds) -> Result<TruncSeries<Rat>> {
    let mut x = TruncSeries::zero(b);
    x.add_term(Mono::new(0, vec![2]), Rat::from_integer(1.into()));
    x.exp()
}

fn kdv_checks(cfg: &VerifyConfig) -> Vec<Report> {
    let tau = cfg.tau;
    let bad = cfg.bad_input;
    let theta_z = |b: Bounds| {
        if bad {
            exp_t0_squared(b)
        } else {
            assemble_tau(Model::Theta, b)
        }
    };
    vec![
        Report::run("kdv/residual-theta", |r| {
            let z = theta_z(kdv_source(tau))?;
            expect_zero(r, "KdV", &kdv_residual(&z)?, &tau);
            Ok(())
        }),
        Report::run("kdv/residual-kw", |r| {
            let z = assemble_tau(Model::KW, kdv_source(tau))?;
            expect_zero(r, "KdV", &kdv_residual(&z)?, &tau);
            Ok(())
        }),
        Report::run("kdv/initial-bgw", |r| {
            let out = Bounds::new(tau.max_hbar, 6, 0);
            let z = theta_z(Bounds::new(tau.max_hbar, 8, 0))?;
            expect_zero(r, "U(t0) - hbar/8(1-t0)^2", &bgw_initial(&z)?, &out);
            Ok(())
        }),
        Report::run("kdv/initial-kw", |r| {
            let out = Bounds::new(tau.max_hbar, 6, 0);
            let z = assemble_tau(Model::KW, Bounds::new(tau.max_hbar, 8, 0))?;
            expect_zero(r, "U(t0) - t0", &kw_initial(&z)?, &out);
            Ok(())
        }),
        Report::run("kdv/p-polynomials", |r| {
            // p_j(s,0,…) = (-1)^{j-1} s^j / j!
            let s = PiScalar::pi2().scale(&Rat::from_integer(2.into()));
            for (i, p) in p_polys(8).iter().enumerate() {
                let j = i as u32 + 1;
                let sign: i64 = if j % 2 == 1 { 1 } else { -1 };
                let want = s
                    .pow(j)
                    .scale(&Rat::new(sign.into(), crate::algebra::rat::factorial(j)));
                let got = p.eval(std::slice::from_ref(&s));
                r.expect(got == want, || format!("p_{j}(2π²): {}", got.to_human()));
            }
            Ok(())
        }),
    ]
}

fn translation_checks(cfg: &VerifyConfig, cache: &VolCache) -> Vec<Report> {
    let lift = |res: Result<Report>, name: &str| {
        res.unwrap_or_else(|e| {
            let mut r = Report::new(name);
            r.fail(format!("error: {e}"));
            r
        })
    };
    vec![
        lift(
            verify_translation(cache, TranslationFlavor::Theta, cfg.translation_theta),
            "translation/theta",
        ),
        lift(
            verify_translation(cache, TranslationFlavor::WP, cfg.translation_wp),
            "translation/wp",
        ),
        lift(
            verify_unshifted(cache, Model::Theta, cfg.translation_theta),
            "translation/theta-unshifted",
        ),
        lift(
            verify_unshifted(cache, Model::KW, cfg.translation_wp),
            "translation/wp-unshifted",
        ),
    ]
}

fn pi_free<C: Coeff>(s: &TruncSeries<C>) -> TruncSeries<Rat> {
    TruncSeries::from_terms(
        s.bounds(),
        s.terms()
            .iter()
            .map(|(m, c)| (m.clone(), c.to_pi().coeff(0))),
    )
}

/// `tr_partition` against the volume-built partition function and, at `π = 0`,
/// against the tau function.
pub fn partition_check(
    r: &mut Report,
    curve: &SpectralCurve,
    bounds: Bounds,
    cache: &VolCache,
) -> Result<()> {
    let (kappa, model) = match curve.name.as_str() {
        "theta" => (
            crate::kdv::kappa_free_energy_theta(cache, bounds)?,
            Model::Theta,
        ),
        "sine" => (crate::kdv::kappa_free_energy_wp(cache, bounds)?, Model::KW),
        other => return Err(Error::Domain(format!("no volume model for curve {other}"))),
    };
    let tr = tr_free_energy(curve, bounds)?;
    compare_series(r, "log Z vs volumes", &tr, &kappa, &bounds);
    let z_tr = crate::specrec::tr_partition(curve, bounds)?;
    let z_vol = match model {
        Model::Theta => crate::kdv::kappa_partition_theta(cache, bounds)?,
        Model::KW => crate::kdv::kappa_partition_wp(cache, bounds)?,
    };
    compare_series(r, "Z vs volumes", &z_tr, &z_vol, &bounds);
    let tau = assemble_tau(model, bounds)?;
    compare_series(r, "Z at π=0 vs tau", &pi_free(&z_tr), &tau, &bounds);
    Ok(())
}

fn specrec_checks(cfg: &VerifyConfig, cache: &VolCache) -> Vec<Report> {
    let theta = SpectralCurve::theta();
    let sine = SpectralCurve::sine();
    vec![
        Report::run("specrec/bridge-theta", |r| {
            for (g, n) in keys_upto(cfg.theta_corr_euler) {
                let tr = tr_correlator(&theta, g, n)?;
                let v = if g == 0 {
                    EvenPoly::zero(n as usize)
                } else {
                    cache.vol_theta(g, n)?
                };
                let br = laplace_bridge(g, &v);
                r.expect(tr.terms == br.terms, || {
                    format!("ω_{{{g},{n}}} = {tr}, bridge {br}")
                });
            }
            Ok(())
        }),
        Report::run("specrec/bridge-sine", |r| {
            for (g, n) in keys_upto(cfg.sine_corr_euler) {
                let tr = tr_correlator(&sine, g, n)?;
                let br = laplace_bridge(g, &cache.vol_wp(g, n)?);
                r.expect(tr.terms == br.terms, || {
                    format!("ω_{{{g},{n}}} = {tr}, bridge {br}")
                });
            }
            Ok(())
        }),
        Report::run("specrec/symmetry-and-poles", |r| {
            for (curve, e) in [(&theta, cfg.theta_corr_euler), (&sine, cfg.sine_corr_euler)] {
                for (g, n) in keys_upto(e) {
                    let w = tr_correlator(curve, g, n)?;
                    r.expect(w.is_symmetric(), || {
                        format!("{} ω_{{{g},{n}}} not symmetric", curve.name)
                    });
                    let bound = curve.pole_bound(g, n).expect("builtin");
                    r.expect(w.max_pole() <= bound, || {
                        format!(
                            "{} ω_{{{g},{n}}} pole {} > {bound}",
                            curve.name,
                            w.max_pole()
                        )
                    });
                }
            }
            Ok(())
        }),
        Report::run("specrec/omega-1-1", |r| {
            let w = tr_correlator(&theta, 1, 1)?;
            let want = PiScalar::from_rat(Rat::new(1.into(), 8.into()));
            r.expect(w.terms.len() == 1 && w.coeff(&[0]) == want, || {
                format!("ω_{{1,1}} = {w}")
            });
            Ok(())
        }),
        Report::run("specrec/partition-theta", |r| {
            partition_check(r, &theta, Bounds::new(1, 3, 4), cache)
        }),
        Report::run("specrec/partition-sine", |r| {
            partition_check(r, &sine, Bounds::new(0, 3, 4), cache)
        }),
    ]
}

fn dilaton_checks(cfg: &VerifyConfig, cache: &VolCache) -> Vec<Report> {
    let only = cfg.only_key;
    let keep = |g: u32, n: u32| only.is_none_or(|k| k == (g, n));
    let theta = SpectralCurve::theta();
    let sine = SpectralCurve::sine();
    vec![
        Report::run("dilaton/theta-volumes", |r| {
            let mut keys: Vec<(u32, u32)> = Vec::new();
            for g in 1..=(cfg.max_euler + 2) / 2 {
                for n in 0..=cfg.max_euler {
                    // both (g,n) and (g,n+1) in range; n = 0 uses the defined V_{g,0}
                    if 2 * g + n > 2 && 2 * g + n < cfg.max_euler + 2 {
                        keys.push((g, n));
                    }
                }
            }
            for (g, n) in keys.into_iter().filter(|&(g, n)| keep(g, n)) {
                let id = dilaton_eval_theta(cache, g, n)?;
                if only.is_some() {
                    r.notes
                        .push(format!("lhs V^Θ_{{{g},{}}}(L, 2πi) = {}", n + 1, id.lhs));
                    r.notes
                        .push(format!("rhs (2g-2+n) V^Θ_{{{g},{n}}} = {}", id.rhs));
                }
                r.expect(id.holds(), || {
                    format!("{}: {} vs {}", id.name, id.lhs, id.rhs)
                });
            }
            Ok(())
        }),
        Report::run("dilaton/wp-string", |r| {
            for (g, n) in keys_upto(cfg.wp_euler.saturating_sub(1)) {
                if !keep(g, n) {
                    continue;
                }
                for id in string_dilaton_wp(cache, g, n)? {
                    if only.is_some() {
                        r.notes
                            .push(format!("{}: lhs {} ; rhs {}", id.name, id.lhs, id.rhs));
                    }
                    r.expect(id.holds(), || {
                        format!("{}: {} vs {}", id.name, id.lhs, id.rhs)
                    });
                }
            }
            Ok(())
        }),
        Report::run("dilaton/tr", |r| {
            for (curve, e) in [(&theta, cfg.theta_corr_euler), (&sine, cfg.sine_corr_euler)] {
                // ω_{g,n+1} is computed; ω_{g,n} must be stable too
                for (g, m) in keys_upto(e) {
                    let n = m - 1;
                    if n == 0 || 2 * g + n <= 2 || !keep(g, n) {
                        continue;
                    }
                    let rep = tr_dilaton_check(curve, g, n)?;
                    r.checked += rep.checked;
                    for d in rep.diffs {
                        r.fail(format!("{}: {d}", rep.name));
                    }
                }
            }
            Ok(())
        }),
        Report::run("dilaton/omega-g0", |r| {
            for g in 2..=cfg.theta_corr_euler.div_ceil(2) {
                if !keep(g, 0) {
                    continue;
                }
                let (a, b) = (tr_omega_g0(&theta, g)?, vol_theta_n0(cache, g)?);
                if only.is_some() {
                    r.notes.push(format!(
                        "ω_{{{g},0}} = {} ; V^Θ_{{{g},0}} = {}",
                        a.to_human(),
                        b.to_human()
                    ));
                }
                r.expect(a == b, || {
                    format!("theta ω_{{{g},0}} = {}, V = {}", a.to_human(), b.to_human())
                });
            }
            for g in 2..=cfg.sine_corr_euler.div_ceil(2) {
                if !keep(g, 0) {
                    continue;
                }
                let (a, b) = (tr_omega_g0(&sine, g)?, vol_wp_n0(cache, g)?);
                r.expect(a == b, || {
                    format!("sine ω_{{{g},0}} = {}, V = {}", a.to_human(), b.to_human())
                });
            }
            Ok(())
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for n in Suite::NAMES {
            assert_eq!(n.parse::<Suite>().unwrap().to_string(), n);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suite_passes() {
        let cfg = VerifyConfig {
            tau: Bounds::new(1, 2, 2),
            ..VerifyConfig::default()
        }
        .with_max_euler(3);
        let cache = VolCache::in_memory();
        for r in run_suite(Suite::All, &cfg, &cache) {
            assert!(r.pass, "{}: {:?}", r.name, r.diffs);
        }
    }

    #[test]
    fn bad_input_fails() {
        let cfg = VerifyConfig {
            tau: Bounds::new(1, 2, 2),
            bad_input: true,
            ..VerifyConfig::default()
        };
        let reports = run_suite(Suite::Kdv, &cfg, &VolCache::in_memory());
        assert!(reports.iter().any(|r| !r.pass));
    }
}
