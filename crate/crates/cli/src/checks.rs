//! One function per subcommand. Each check builds its fixtures from the
//! configured seed, runs the verification at the configured scale, and
//! returns verdict records; thresholds use the built-in defaults unless
//! overridden through `tolerance.<key>` settings.

use anyhow::Result;
use num_complex::Complex64 as C64;

use ymloop_core::fock::{
    chi_field_pairing, combo_inner, ggv_apply, CoherentCombo, ExpVectorLabel,
};
use ymloop_core::gauge::{
    gauge_transform, gauge_transform_links, wilson, LatticeField, LinkConfiguration, SamplePoint,
};
use ymloop_core::group::{character_k, AlgebraVector, ComplexAlgebraVector, GroupElement, Rep};
use ymloop_core::heat::{
    hall_overlap, l2k_inner, mu_hbar_sample, HallState, HeatKernelEvaluator, PairingMethod,
};
use ymloop_core::paths::{
    bridge_restart_count, cm_weight_flat, cm_weight_loop, ito_map, loop_bridge,
    sample_increments, translate, GroupPath, IncrementPath, LoopFactor, Profile, SmoothLoop,
};
use ymloop_core::reduction::{
    compact_oracle, reduced_form, reduced_log_sample, u1_reduced_closed_form,
    u1_reduction_bookkeeping, verify_gauge, FiniteRep, McConfig,
};
use ymloop_core::stats::{self, shard_rng};
use ymloop_core::GroupSpec;

use crate::config::ExperimentConfig;
use crate::report::Record;

/// Coherent-state-side evaluator built from the configured parameters.
fn hall_evaluator(cfg: &ExperimentConfig, spec: GroupSpec) -> Result<HeatKernelEvaluator> {
    Ok(HeatKernelEvaluator::new(
        spec,
        cfg.t_min,
        cfg.im_z_max,
        cfg.eps_tail,
    )?)
}

fn mc_config(cfg: &ExperimentConfig) -> McConfig {
    McConfig {
        n_steps: cfg.steps,
        samples: cfg.samples,
        seed: cfg.seed,
        shards: cfg.workers,
    }
}

/// Three low-energy smooth based loops for the configured group.
fn test_loops(spec: GroupSpec) -> Vec<SmoothLoop> {
    match spec {
        GroupSpec::Su2 => vec![
            SmoothLoop::new(
                spec,
                vec![LoopFactor {
                    direction: AlgebraVector::new(spec, &[0.0, 0.6, 0.8]),
                    profile: Profile::contractible(vec![(1, 0.15)]),
                }],
            )
            .unwrap(),
            SmoothLoop::new(
                spec,
                vec![
                    LoopFactor {
                        direction: AlgebraVector::new(spec, &[1.0, 0.0, 0.0]),
                        profile: Profile::contractible(vec![(1, 0.10), (2, 0.05)]),
                    },
                    LoopFactor {
                        direction: AlgebraVector::new(spec, &[0.0, 0.0, 1.0]),
                        profile: Profile::contractible(vec![(1, -0.08)]),
                    },
                ],
            )
            .unwrap(),
            SmoothLoop::new(
                spec,
                vec![LoopFactor {
                    direction: AlgebraVector::new(spec, &[0.48, 0.6, 0.64]),
                    profile: Profile::contractible(vec![(2, 0.12), (3, -0.04)]),
                }],
            )
            .unwrap(),
        ],
        GroupSpec::U1 => vec![
            SmoothLoop::new(
                spec,
                vec![LoopFactor {
                    direction: AlgebraVector::new(spec, &[1.0]),
                    profile: Profile::contractible(vec![(1, 0.3)]),
                }],
            )
            .unwrap(),
            SmoothLoop::new(
                spec,
                vec![LoopFactor {
                    direction: AlgebraVector::new(spec, &[1.0]),
                    profile: Profile {
                        winding: 2.0 * std::f64::consts::PI,
                        harmonics: vec![(1, 0.25)],
                    },
                }],
            )
            .unwrap(),
            SmoothLoop::new(
                spec,
                vec![LoopFactor {
                    direction: AlgebraVector::new(spec, &[1.0]),
                    profile: Profile::contractible(vec![(2, 0.2), (3, 0.1)]),
                }],
            )
            .unwrap(),
        ],
    }
}

/// General complex U(1) field with controlled mean and oscillation.
fn u1_field(seed: u64, n: usize, mean_amp: f64, osc_amp: f64) -> LatticeField {
    let mut rng = shard_rng(seed, 900);
    let mut draw = move |a: f64| {
        use rand::Rng;
        C64::new(a * (rng.random::<f64>() - 0.5), a * (rng.random::<f64>() - 0.5))
    };
    let m = draw(mean_amp);
    let c1 = draw(osc_amp);
    let c2 = draw(osc_amp);
    LatticeField::sample(
        move |t| {
            let tau = 2.0 * std::f64::consts::PI * t;
            ComplexAlgebraVector::new(GroupSpec::U1, &[m + c1 * tau.cos() + c2 * (2.0 * tau).sin()])
        },
        n,
        SamplePoint::Left,
    )
}

/// Oscillation-dominant SU(2) field with constant imaginary parts and
/// small means (keeping the reduction-map label phase well inside the
/// ratio-constancy band).
fn su2_field(seed: u64, n: usize, amp: f64) -> LatticeField {
    let mut rng = shard_rng(seed, 901);
    let mut draw = move |a: f64| {
        use rand::Rng;
        a * (rng.random::<f64>() - 0.5)
    };
    let re0 = [draw(0.3 * amp), draw(0.3 * amp), draw(0.3 * amp)];
    let re1 = [draw(amp), draw(amp), draw(amp)];
    let im0 = [draw(0.3 * amp), draw(0.3 * amp), draw(0.3 * amp)];
    LatticeField::sample(
        move |t| {
            let tau = 2.0 * std::f64::consts::PI * t;
            ComplexAlgebraVector::new(
                GroupSpec::Su2,
                &[
                    C64::new(re0[0] + re1[0] * tau.cos(), im0[0]),
                    C64::new(re0[1] + re1[1] * tau.sin(), im0[1]),
                    C64::new(re0[2] + re1[2] * (2.0 * tau).cos(), im0[2]),
                ],
            )
        },
        n,
        SamplePoint::Left,
    )
}

fn field_pair(cfg: &ExperimentConfig, idx: u64) -> (ExpVectorLabel, ExpVectorLabel) {
    let n = cfg.steps;
    match cfg.group_spec().expect("validated") {
        GroupSpec::U1 => (
            ExpVectorLabel::new(u1_field(cfg.seed.wrapping_add(2 * idx), n, 0.2, 0.5)),
            ExpVectorLabel::new(u1_field(cfg.seed.wrapping_add(2 * idx + 1), n, 0.2, 0.5)),
        ),
        GroupSpec::Su2 => (
            ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(2 * idx), n, 0.4)),
            ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(2 * idx + 1), n, 0.4)),
        ),
    }
}

/// Semigroup, restriction, and normalization checks for the heat kernels.
pub fn heat_check(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();

    // SU(2) semigroup by convolution at s = t = 0.25.
    let ev = HeatKernelEvaluator::with_defaults(GroupSpec::Su2);
    let mut rng = shard_rng(cfg.seed, 10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = GroupSpec::Su2.haar_sample(&mut rng);
        let f = |k: &GroupElement| C64::new(ev.rho(&x.mul(&k.inverse()), 0.25).unwrap(), 0.0);
        let g = |k: &GroupElement| C64::new(ev.rho(k, 0.25).unwrap(), 0.0);
        let conv = l2k_inner(GroupSpec::Su2, f, g, PairingMethod::Quadrature { level: 32 })?
            .value;
        worst = worst.max((conv.re - ev.rho(&x, 0.5)?).abs());
    }
    out.push(
        Record::new("heat-check", "su2-semigroup", cfg)
            .value(C64::new(worst, 0.0))
            .verdict_leq(worst, cfg.tol("semigroup", 1e-6)),
    );

    // U(1) semigroup against the wrapped-Gaussian (Poisson summation)
    // oracle, written out independently here.
    let evu = HeatKernelEvaluator::with_defaults(GroupSpec::U1);
    let wrapped = |theta: f64, t: f64| {
        let mut s = 0.0;
        for k in -8i32..=8 {
            let u = theta + 2.0 * std::f64::consts::PI * k as f64;
            s += (-u * u / (2.0 * t)).exp();
        }
        s * (2.0 * std::f64::consts::PI / t).sqrt()
    };
    let mut worst_u1: f64 = 0.0;
    for i in 0..20 {
        let theta = -3.0 + 6.0 * i as f64 / 19.0;
        let x = GroupElement::U1(C64::from_polar(1.0, theta));
        let f = |k: &GroupElement| C64::new(evu.rho(&x.mul(&k.inverse()), 0.25).unwrap(), 0.0);
        let g = |k: &GroupElement| C64::new(evu.rho(k, 0.25).unwrap(), 0.0);
        let conv = l2k_inner(GroupSpec::U1, f, g, PairingMethod::Quadrature { level: 256 })?
            .value;
        worst_u1 = worst_u1.max((conv.re - wrapped(theta, 0.5)).abs());
    }
    out.push(
        Record::new("heat-check", "u1-semigroup-vs-wrapped", cfg)
            .value(C64::new(worst_u1, 0.0))
            .verdict_leq(worst_u1, cfg.tol("u1_semigroup", 1e-8)),
    );

    // Restriction of the continuation to the compact group.
    let mut worst_restr: f64 = 0.0;
    for _ in 0..50 {
        let k = GroupSpec::Su2.haar_sample(&mut rng);
        let a = ev.rho(&k, 0.4)?;
        let b = ev.rho_c(&k.complexify(), 0.4)?;
        worst_restr = worst_restr.max((b - C64::new(a, 0.0)).norm());
    }
    out.push(
        Record::new("heat-check", "restriction", cfg)
            .value(C64::new(worst_restr, 0.0))
            .verdict_leq(worst_restr, cfg.tol("restriction", 1e-10)),
    );

    // Diagnostic: sigma-dependence of the unnormalized coherent-function
    // norm over phase-space samples (reported, not thresholded).
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for _ in 0..10 {
        let sigma = mu_hbar_sample(GroupSpec::Su2, &mut rng, 0.5, 32);
        let nrm = HallState::new(sigma, 0.5).unnorm_norm(&ev)?;
        lo = lo.min(nrm);
        hi = hi.max(nrm);
    }
    out.push(
        Record::new("heat-check", "hall-norm-spread-diagnostic", cfg)
            .value(C64::new(hi / lo - 1.0, 0.0))
            .verdict_leq(0.0, f64::INFINITY),
    );
    Ok(out)
}

/// Ito-map heat-kernel marginal at N and 2N.
pub fn bm_check(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let want = 2.0 * (-0.375f64).exp();
    let rep = Rep::Su2 { twice_j: 1 };
    let run = |n_steps: usize, stream: u64| {
        let vals = stats::sharded_samples(cfg.seed.wrapping_add(stream), cfg.samples, cfg.workers, |rng, _| {
            character_k(rep, ito_map(&sample_increments(rng, n_steps, 1.0, GroupSpec::Su2)).endpoint()).re
        });
        stats::mean_se(&vals)
    };
    let a = run(cfg.steps, 0);
    let b = run(2 * cfg.steps, 1);
    let mut out = Vec::new();
    for (case, m, n_val) in [("marginal-n", &a, cfg.steps), ("marginal-2n", &b, 2 * cfg.steps)] {
        let mut rec = Record::new("bm-check", case, cfg)
            .value(C64::new(m.mean, 0.0))
            .closed(C64::new(want, 0.0))
            .se(m.se)
            .verdict_leq((m.mean - want).abs(), 3.0 * m.se);
        rec.n = n_val;
        out.push(rec);
    }
    let comb = (a.se * a.se + b.se * b.se).sqrt();
    out.push(
        Record::new("bm-check", "refinement-compatible", cfg)
            .value(C64::new(a.mean - b.mean, 0.0))
            .se(comb)
            .verdict_leq((a.mean - b.mean).abs(), 3.0 * comb),
    );
    Ok(out)
}

/// Bridge pinning, midpoint marginal, winding sectors, restart diagnostics.
pub fn bridge_check(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = cfg.group_spec()?;
    let n = cfg.steps;
    let ev = HeatKernelEvaluator::real_domain(spec, 1.0 / n as f64)?;
    let m_paths = cfg.samples.min(20_000);
    let restarts_before = bridge_restart_count();

    let mut out = Vec::new();
    match spec {
        GroupSpec::Su2 => {
            // Midpoint marginal: density rho(x, 1/2)^2 / rho(e, 1).
            let c = |twice_j: u32, t: f64| {
                let rep = Rep::Su2 { twice_j };
                rep.dim() * (-t * rep.casimir() / 2.0).exp()
            };
            let mut num = 0.0;
            let mut den = 0.0;
            for tj in 0..80u32 {
                num += c(tj, 0.5) * c(tj + 1, 0.5);
                if tj > 0 {
                    num += c(tj, 0.5) * c(tj - 1, 0.5);
                }
                den += c(tj, 1.0) * Rep::Su2 { twice_j: tj }.dim();
            }
            let want = num / den;
            let samples: Vec<ymloop_core::Result<(f64, bool)>> =
                stats::sharded_samples(cfg.seed, m_paths, cfg.workers, |rng, _| {
                    let b = loop_bridge(rng, n, spec, &ev)?;
                    Ok((
                        character_k(Rep::Su2 { twice_j: 1 }, &b.points()[n / 2]).re,
                        *b.endpoint() == spec.identity(),
                    ))
                });
            let samples: Vec<(f64, bool)> = samples.into_iter().collect::<ymloop_core::Result<_>>()?;
            let pinned = samples.iter().filter(|s| s.1).count();
            let vals: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let m = stats::mean_se(&vals);
            out.push(
                Record::new("bridge-check", "endpoint-pinned", cfg)
                    .value(C64::new(pinned as f64 / m_paths as f64, 0.0))
                    .verdict_leq((m_paths - pinned) as f64, 0.0),
            );
            out.push(
                Record::new("bridge-check", "midpoint-marginal", cfg)
                    .value(C64::new(m.mean, 0.0))
                    .closed(C64::new(want, 0.0))
                    .se(m.se)
                    .verdict_leq((m.mean - want).abs(), 3.0 * m.se),
            );
        }
        GroupSpec::U1 => {
            let windings: Vec<ymloop_core::Result<i64>> =
                stats::sharded_samples(cfg.seed, m_paths, cfg.workers, |rng, _| {
                    Ok(loop_bridge(rng, n, spec, &ev)?.winding_u1())
                });
            let windings: Vec<i64> = windings.into_iter().collect::<ymloop_core::Result<_>>()?;
            let nonzero = windings.iter().filter(|&&w| w != 0).count();
            // Theta sector masses put ~2 e^{-2 pi^2} of the mass off the
            // zero sector; 3 SE of the Poisson count.
            let expected = 2.0 * (-2.0 * std::f64::consts::PI.powi(2)).exp() * m_paths as f64;
            out.push(
                Record::new("bridge-check", "winding-sector-masses", cfg)
                    .value(C64::new(nonzero as f64, 0.0))
                    .closed(C64::new(expected, 0.0))
                    .verdict_leq(
                        (nonzero as f64 - expected).abs(),
                        3.0 * expected.sqrt() + 1.0,
                    ),
            );
        }
    }
    out.push(
        Record::new("bridge-check", "restart-count-diagnostic", cfg)
            .value(C64::new((bridge_restart_count() - restarts_before) as f64, 0.0))
            .verdict_leq(0.0, f64::INFINITY),
    );
    Ok(out)
}

/// Flat Cameron-Martin reweighting against the shifted characteristic
/// function (4-dimensional Gaussian: U(1) increments over 4 steps).
pub fn cm_flat(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let n = 4usize;
    let spec = GroupSpec::U1;
    let mut wr = shard_rng(cfg.seed, 20);
    let raw = sample_increments(&mut wr, n, 1.0, spec);
    let w = IncrementPath::new(1.0, raw.increments().iter().map(|d| d.scale(0.5)).collect());
    let minus_w = IncrementPath::new(1.0, w.increments().iter().map(|d| d.scale(-1.0)).collect());
    let lin = |p: &IncrementPath, c: &[f64]| -> f64 {
        p.increments()
            .iter()
            .zip(c)
            .map(|(dx, ci)| ci * dx.coeff(0))
            .sum()
    };
    let mut out = Vec::new();
    for fi in 0..5u64 {
        let mut cr = shard_rng(cfg.seed.wrapping_add(21 + fi), 0);
        use rand::Rng;
        let c: Vec<f64> = (0..n).map(|_| 2.0 * (cr.random::<f64>() - 0.5)).collect();
        let q: f64 = c.iter().map(|ci| ci * ci / n as f64).sum();
        let closed = C64::from_polar(1.0, lin(&w, &c)) * (-0.5 * q).exp();
        let cw = c.clone();
        let direct = stats::sharded_samples(cfg.seed.wrapping_add(30 + fi), cfg.samples, cfg.workers, {
            let w = w.clone();
            move |rng, _| {
                let v = sample_increments(rng, n, 1.0, spec);
                let shifted = IncrementPath::new(
                    1.0,
                    v.increments()
                        .iter()
                        .zip(w.increments())
                        .map(|(a, b)| a.add(b))
                        .collect(),
                );
                C64::from_polar(1.0, lin(&shifted, &cw))
            }
        });
        let cw2 = c.clone();
        let reweighted = stats::sharded_samples(cfg.seed.wrapping_add(30 + fi), cfg.samples, cfg.workers, {
            let minus_w = minus_w.clone();
            move |rng, _| {
                let v = sample_increments(rng, n, 1.0, spec);
                C64::from_polar(1.0, lin(&v, &cw2)) * cm_weight_flat(&v, &minus_w)
            }
        });
        let md = stats::mean_se_complex(&direct);
        let mr = stats::mean_se_complex(&reweighted);
        out.push(
            Record::new("cm-flat", &format!("direct-vs-closed-{fi}"), cfg)
                .value(md.mean)
                .closed(closed)
                .se(md.se)
                .verdict_leq((md.mean - closed).norm(), 3.0 * md.se),
        );
        out.push(
            Record::new("cm-flat", &format!("reweighted-vs-closed-{fi}"), cfg)
                .value(mr.mean)
                .closed(closed)
                .se(mr.se)
                .verdict_leq((mr.mean - closed).norm(), 3.0 * mr.se),
        );
    }
    // Unit mass of the Girsanov density.
    let mass = stats::sharded_samples(cfg.seed.wrapping_add(40), cfg.samples, cfg.workers, {
        let w = w.clone();
        move |rng, _| cm_weight_flat(&sample_increments(rng, n, 1.0, spec), &w)
    });
    let mm = stats::mean_se(&mass);
    out.push(
        Record::new("cm-flat", "unit-mass", cfg)
            .value(C64::new(mm.mean, 0.0))
            .closed(C64::ONE)
            .se(mm.se)
            .verdict_leq((mm.mean - 1.0).abs(), 3.0 * mm.se),
    );
    Ok(out)
}

/// Loop-group Cameron-Martin: change of variables and unit mass on
/// bridges, three loops x three observables with common random numbers.
pub fn cm_loop(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = GroupSpec::Su2;
    let n = cfg.steps.min(100);
    let ev = HeatKernelEvaluator::real_domain(spec, 1.0 / n as f64)?;
    let loops = test_loops(spec);
    let obs: [(&str, Box<dyn Fn(&GroupPath) -> f64 + Sync>); 3] = [
        ("re-chi-half-quarter", Box::new(move |p: &GroupPath| {
            character_k(Rep::Su2 { twice_j: 1 }, &p.points()[n / 4]).re
        })),
        ("re-chi-half-mid", Box::new(move |p: &GroupPath| {
            character_k(Rep::Su2 { twice_j: 1 }, &p.points()[n / 2]).re
        })),
        ("re-chi-one-three-quarter", Box::new(move |p: &GroupPath| {
            character_k(Rep::Su2 { twice_j: 2 }, &p.points()[3 * n / 4]).re
        })),
    ];
    let mut out = Vec::new();
    for (li, chi) in loops.iter().enumerate() {
        let chi_inv = chi.inverse();
        // Per sample: the three observables on the translated path, the
        // three reweighted observables, and the weight itself.
        let rows: Vec<ymloop_core::Result<[f64; 7]>> =
            stats::sharded_samples(cfg.seed.wrapping_add(50 + li as u64), cfg.samples, cfg.workers, |rng, _| {
                let b = loop_bridge(rng, n, spec, &ev)?;
                let tb = translate(&b, chi);
                let wgt = cm_weight_loop(&b, &chi_inv);
                Ok([
                    obs[0].1(&tb),
                    obs[1].1(&tb),
                    obs[2].1(&tb),
                    obs[0].1(&b) * wgt,
                    obs[1].1(&b) * wgt,
                    obs[2].1(&b) * wgt,
                    cm_weight_loop(&b, chi),
                ])
            });
        let rows: Vec<[f64; 7]> = rows.into_iter().collect::<ymloop_core::Result<_>>()?;
        for (oi, (oname, _)) in obs.iter().enumerate() {
            let diffs: Vec<f64> = rows.iter().map(|r| r[oi] - r[oi + 3]).collect();
            let d = stats::mean_se(&diffs);
            out.push(
                Record::new("cm-loop", &format!("loop{li}-{oname}"), cfg)
                    .value(C64::new(d.mean, 0.0))
                    .se(d.se)
                    .verdict_leq(d.mean.abs(), 3.0 * d.se),
            );
        }
        let mass: Vec<f64> = rows.iter().map(|r| r[6]).collect();
        let mm = stats::mean_se(&mass);
        out.push(
            Record::new("cm-loop", &format!("loop{li}-unit-mass"), cfg)
                .value(C64::new(mm.mean, 0.0))
                .closed(C64::ONE)
                .se(mm.se)
                .verdict_leq((mm.mean - 1.0).abs(), 3.0 * mm.se),
        );
        // Effective sample size of the reweighting, (sum w)^2 / sum w^2,
        // reported as a fraction of M (diagnostic only).
        let sw: f64 = mass.iter().sum();
        let sw2: f64 = mass.iter().map(|w| w * w).sum();
        let ess = sw * sw / sw2 / mass.len() as f64;
        out.push(
            Record::new("cm-loop", &format!("loop{li}-ess-fraction"), cfg)
                .value(C64::new(ess, 0.0))
                .verdict_leq(0.0, f64::INFINITY),
        );
    }
    Ok(out)
}

/// Exact link-form holonomy invariance and the sampled-field convergence
/// order.
pub fn gauge_cov(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = GroupSpec::Su2;
    let profile = |t: f64| {
        let tau = 2.0 * std::f64::consts::PI * t;
        ComplexAlgebraVector::new(
            spec,
            &[
                C64::new(0.9 * tau.cos(), 0.0),
                C64::new(0.4 * (2.0 * tau).sin() - 0.2, 0.0),
                C64::new(0.6, 0.0),
            ],
        )
    };
    let mut out = Vec::new();

    // Link form: exact invariance under based site transformations.
    let field = LatticeField::sample(profile, 40, SamplePoint::Left);
    let links = LinkConfiguration::from_field(&field);
    let mut rng = shard_rng(cfg.seed, 60);
    let mut sites: Vec<GroupElement> = (0..=40).map(|_| spec.haar_sample(&mut rng)).collect();
    sites[0] = spec.identity();
    sites[40] = spec.identity();
    let transformed = gauge_transform_links(&links, &sites)?;
    let dev_hol = transformed.holonomy().dist(&links.holonomy());
    out.push(
        Record::new("gauge-cov", "link-holonomy-exact", cfg)
            .value(C64::new(dev_hol, 0.0))
            .verdict_leq(dev_hol, cfg.tol("link_exact", 1e-12)),
    );
    let g0 = spec.haar_sample(&mut rng);
    let conj = g0.mul(&links.holonomy()).mul(&g0.inverse());
    let dev_tr = (conj.trace() - links.holonomy().trace()).norm();
    out.push(
        Record::new("gauge-cov", "link-trace-exact", cfg)
            .value(C64::new(dev_tr, 0.0))
            .verdict_leq(dev_tr, cfg.tol("link_exact", 1e-12)),
    );

    // Sampled-field Wilson invariance: measured convergence order >= 1.
    let chi = &test_loops(spec)[1];
    let mut errs = Vec::new();
    let mut ns = Vec::new();
    for n in [50usize, 100, 200, 400] {
        let z = LatticeField::sample(profile, n, SamplePoint::Left);
        let base = ymloop_core::gauge::wilson_c(&z);
        let tr = ymloop_core::gauge::wilson_c(&gauge_transform(&z, chi));
        errs.push(tr.dist(&base).ln());
        ns.push((n as f64).ln());
    }
    let slope = -stats::ls_slope(&ns, &errs);
    let min_order = cfg.tol("gauge_cov_min_order", 0.95);
    out.push(
        Record::new("gauge-cov", "sampled-field-order", cfg)
            .value(C64::new(slope, 0.0))
            .verdict_leq(min_order - slope, 0.0),
    );

    // Midpoint-sampled Wilson integration converges at second order.
    let reference = wilson(&LatticeField::sample(profile, 8192, SamplePoint::Mid));
    let mut errs2 = Vec::new();
    for n in [50usize, 100, 200, 400] {
        let f = LatticeField::sample(profile, n, SamplePoint::Mid);
        errs2.push(wilson(&f).dist(&reference).ln());
    }
    let slope2 = -stats::ls_slope(&ns, &errs2);
    out.push(
        Record::new("gauge-cov", "midpoint-order", cfg)
            .value(C64::new(slope2, 0.0))
            .verdict_leq(1.9 - slope2, 0.0),
    );
    Ok(out)
}

/// Unitarity and composition residuals of the gauge representation.
pub fn ggv_unitarity(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = GroupSpec::Su2;
    let n = cfg.steps.max(400);
    let tol = cfg.tol("ggv", 1e-8);
    let mut out = Vec::new();
    let loops = test_loops(spec);
    for i in 0..10u64 {
        let chi = &loops[(i % 3) as usize];
        let c1 = CoherentCombo::new(vec![
            (
                C64::new(0.8, 0.1),
                ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(70 + i), n, 0.5)),
            ),
            (
                C64::new(-0.2, 0.5),
                ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(80 + i), n, 0.4)),
            ),
        ]);
        let c2 = CoherentCombo::new(vec![(
            C64::ONE,
            ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(90 + i), n, 0.5)),
        )]);
        let before = combo_inner(&c1, &c2)?;
        let after = combo_inner(&ggv_apply(chi, &c1)?, &ggv_apply(chi, &c2)?)?;
        let dev = (before - after).norm() / before.norm().max(1.0);
        let mut rec = Record::new("ggv-unitarity", &format!("unitarity-{i}"), cfg)
            .value(after)
            .closed(before)
            .verdict_leq(dev, tol);
        rec.n = n;
        out.push(rec);
    }
    // Composition residual, term-wise.
    for i in 0..10u64 {
        let chi = &loops[(i % 3) as usize];
        let eta = &loops[((i + 1) % 3) as usize];
        let combo = CoherentCombo::single(
            C64::new(0.6, -0.2),
            ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(100 + i), n, 0.5)),
        );
        let two = ggv_apply(chi, &ggv_apply(eta, &combo)?)?;
        let one = ggv_apply(&chi.compose(eta), &combo)?;
        let mut dev: f64 = 0.0;
        for ((ca, la), (cb, lb)) in two.terms().iter().zip(one.terms()) {
            dev = dev.max((ca - cb).norm() / cb.norm().max(1e-300));
            for (x, y) in la.field().slices().iter().zip(lb.field().slices()) {
                dev = dev.max(x.sub(y).norm_sq().sqrt());
            }
        }
        let mut rec = Record::new("ggv-unitarity", &format!("composition-{i}"), cfg)
            .value(C64::new(dev, 0.0))
            .verdict_leq(dev, tol);
        rec.n = n;
        out.push(rec);
    }
    Ok(out)
}

/// The reduction identity: abelian closed forms and Monte Carlo for U(1),
/// the ratio-constancy protocol for SU(2) (shared bridge ensemble).
pub fn reduce_verify(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = cfg.group_spec()?;
    let n = cfg.steps;
    let ev = HeatKernelEvaluator::real_domain(spec, 1.0 / n as f64)?;
    let hall_ev = hall_evaluator(cfg, spec)?;
    let mut out = Vec::new();

    // Anchor: the vacuum pair is exactly 1 sample-by-sample.
    let om = ExpVectorLabel::vacuum(spec, n);
    let anchor = reduced_form(
        &om,
        &om,
        &McConfig {
            samples: cfg.samples.min(1000),
            ..mc_config(cfg)
        },
        &ev,
    )?;
    out.push(
        Record::new("reduce-verify", "anchor-vacuum", cfg)
            .value(anchor.value)
            .closed(C64::ONE)
            .se(anchor.std_error)
            .verdict_leq((anchor.value - C64::ONE).norm(), 0.0),
    );

    let pairs: Vec<(ExpVectorLabel, ExpVectorLabel)> =
        (0..5).map(|i| field_pair(cfg, 100 + i)).collect();

    match spec {
        GroupSpec::U1 => {
            for (i, (w, z)) in pairs.iter().enumerate() {
                let winding = u1_reduced_closed_form(w, z)?;
                let overlap = hall_overlap(
                    &hall_ev,
                    &ymloop_core::reduction::reduce_map(w),
                    &ymloop_core::reduction::reduce_map(z),
                )?;
                let w_conj =
                    LatticeField::new(w.field().slices().iter().map(|s| s.conj()).collect());
                let theta_side = u1_reduction_bookkeeping(&w_conj)?
                    * u1_reduction_bookkeeping(z.field())?
                    * overlap;
                let cc = (winding - theta_side).norm() / theta_side.norm().max(1e-300);
                out.push(
                    Record::new("reduce-verify", &format!("closed-vs-closed-{i}"), cfg)
                        .value(winding)
                        .closed(theta_side)
                        .verdict_leq(cc, cfg.tol("closed_closed", 1e-8)),
                );
            }
            // Monte Carlo against the winding form on a shared ensemble.
            let logs: Vec<ymloop_core::Result<Vec<C64>>> =
                stats::sharded_samples(cfg.seed, cfg.samples, cfg.workers, |rng, _| {
                    let g = loop_bridge(rng, n, spec, &ev)?;
                    pairs
                        .iter()
                        .map(|(w, z)| Ok(reduced_log_sample(w.field(), z.field(), &g)?.exp()))
                        .collect()
                });
            let logs: Vec<Vec<C64>> = logs.into_iter().collect::<ymloop_core::Result<_>>()?;
            for (i, (w, z)) in pairs.iter().enumerate() {
                let col: Vec<C64> = logs.iter().map(|r| r[i]).collect();
                let m = stats::mean_se_complex(&col);
                let closed = u1_reduced_closed_form(w, z)?;
                out.push(
                    Record::new("reduce-verify", &format!("mc-vs-winding-{i}"), cfg)
                        .value(m.mean)
                        .closed(closed)
                        .se(m.se)
                        .ratio(m.mean / closed)
                        .verdict_leq((m.mean - closed).norm(), 3.0 * m.se),
                );
            }
        }
        GroupSpec::Su2 => {
            let band = cfg.tol("ratio_band", 0.05);
            let logs: Vec<ymloop_core::Result<Vec<C64>>> =
                stats::sharded_samples(cfg.seed, cfg.samples, cfg.workers, |rng, _| {
                    let g = loop_bridge(rng, n, spec, &ev)?;
                    pairs
                        .iter()
                        .map(|(w, z)| Ok(reduced_log_sample(w.field(), z.field(), &g)?.exp()))
                        .collect()
                });
            let logs: Vec<Vec<C64>> = logs.into_iter().collect::<ymloop_core::Result<_>>()?;
            let mut ratios = Vec::new();
            for (i, (w, z)) in pairs.iter().enumerate() {
                let col: Vec<C64> = logs.iter().map(|r| r[i]).collect();
                let m = stats::mean_se_complex(&col);
                let overlap = hall_overlap(
                    &hall_ev,
                    &ymloop_core::reduction::reduce_map(w),
                    &ymloop_core::reduction::reduce_map(z),
                )?;
                let closed = C64::new(w.vector_norm() * z.vector_norm(), 0.0) * overlap;
                let ratio = m.mean / closed;
                ratios.push(ratio);
                out.push(
                    Record::new("reduce-verify", &format!("ratio-{i}"), cfg)
                        .value(m.mean)
                        .closed(closed)
                        .se(m.se)
                        .ratio(ratio)
                        .verdict_leq((ratio - C64::ONE).norm(), band),
                );
            }
            // Mutual constancy across pairs.
            let mean_ratio = ratios.iter().sum::<C64>() / ratios.len() as f64;
            let spread = ratios
                .iter()
                .map(|r| (r - mean_ratio).norm())
                .fold(0.0f64, f64::max)
                / mean_ratio.norm();
            out.push(
                Record::new("reduce-verify", "ratio-constancy", cfg)
                    .value(mean_ratio)
                    .verdict_leq(spread, band),
            );
        }
    }
    Ok(out)
}

/// Gauge invariance of the reduced form.
pub fn gauge_inv(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = cfg.group_spec()?;
    let n = cfg.steps.min(100);
    let loops = test_loops(spec);
    let mut out = Vec::new();
    match spec {
        GroupSpec::U1 => {
            // Analytic both sides, including a winding loop.
            let w = ExpVectorLabel::new(u1_field(cfg.seed.wrapping_add(120), n, 0.2, 0.5));
            let z = ExpVectorLabel::new(u1_field(cfg.seed.wrapping_add(121), n, 0.2, 0.5));
            for (i, chi) in loops.iter().enumerate() {
                let coeff = (C64::new(-0.5 * chi.energy(), 0.0)
                    - chi_field_pairing(chi, z.field())?)
                .exp();
                let z_chi = ExpVectorLabel::new(gauge_transform(z.field(), chi));
                let gauged = coeff * u1_reduced_closed_form(&w, &z_chi)?;
                let plain = u1_reduced_closed_form(&w, &z)?;
                let dev = (gauged - plain).norm() / plain.norm().max(1e-300);
                out.push(
                    Record::new("gauge-inv", &format!("closed-form-loop{i}"), cfg)
                        .value(gauged)
                        .closed(plain)
                        .verdict_leq(dev, cfg.tol("closed_closed", 1e-8)),
                );
            }
        }
        GroupSpec::Su2 => {
            let ev = HeatKernelEvaluator::real_domain(spec, 1.0 / n as f64)?;
            let w = ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(130), n, 0.4));
            let z = ExpVectorLabel::new(su2_field(cfg.seed.wrapping_add(131), n, 0.4));
            for (i, chi) in loops.iter().enumerate() {
                let mc = McConfig {
                    n_steps: n,
                    seed: cfg.seed.wrapping_add(140 + i as u64),
                    samples: cfg.samples,
                    shards: cfg.workers,
                };
                let rep = verify_gauge(chi, &w, &z, &mc, &ev)?;
                out.push(
                    Record::new("gauge-inv", &format!("shared-seed-loop{i}"), cfg)
                        .value(rep.gauged)
                        .closed(rep.plain)
                        .se(rep.diff_se)
                        .verdict_leq(rep.difference.norm(), 3.0 * rep.diff_se),
                );
            }
        }
    }
    Ok(out)
}

/// Resolution of identity over the phase-space measure: the completeness
/// sum is constant over a five-function test family.
pub fn resolution(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = GroupSpec::Su2;
    let hbar = 0.5;
    let ev = hall_evaluator(cfg, spec)?;
    let reps = [
        Rep::Su2 { twice_j: 0 },
        Rep::Su2 { twice_j: 1 },
        Rep::Su2 { twice_j: 2 },
    ];
    let vals = stats::sharded_samples(cfg.seed, cfg.samples, cfg.workers, |rng, _| {
        let sigma = mu_hbar_sample(spec, rng, hbar, 32);
        let p: Vec<C64> = reps
            .iter()
            .map(|&r| ev.char_pairing(hbar, r, &sigma).unwrap())
            .collect();
        [
            p[0].norm_sqr(),
            p[1].norm_sqr(),
            p[2].norm_sqr(),
            (p[0] + p[2]).norm_sqr() / 2.0,
            (p[1] + p[2]).norm_sqr() / 2.0,
        ]
    });
    let mut c = [0.0f64; 5];
    for v in &vals {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += vi;
        }
    }
    for ci in c.iter_mut() {
        *ci /= vals.len() as f64;
    }
    let mean = c.iter().sum::<f64>() / 5.0;
    let spread = c
        .iter()
        .map(|ci| (ci - mean).abs())
        .fold(0.0f64, f64::max)
        / mean;
    let names = ["chi0", "chi-half", "chi1", "mix-02", "mix-12"];
    let mut out = Vec::new();
    for (name, ci) in names.iter().zip(&c) {
        out.push(
            Record::new("resolution", &format!("c-{name}"), cfg)
                .value(C64::new(*ci, 0.0))
                .closed(C64::new(mean, 0.0))
                .verdict_leq((ci - mean).abs() / mean, cfg.tol("resolution_spread", 0.05)),
        );
    }
    out.push(
        Record::new("resolution", "relative-spread", cfg)
            .value(C64::new(spread, 0.0))
            .verdict_leq(spread, cfg.tol("resolution_spread", 0.05)),
    );
    Ok(out)
}

/// Classical limit of the coherent-state overlaps.
pub fn classical_limit(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let spec = GroupSpec::Su2;
    let ev = hall_evaluator(cfg, spec)?;
    let mut hbars = cfg.hbar_set.clone();
    hbars.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let pairs = [
        ([0.9, 0.0, 0.2], [0.0, -0.7, 0.4]),
        ([0.3, 0.3, 0.0], [-0.4, 0.1, 0.5]),
        ([1.1, -0.2, 0.1], [0.6, 0.6, -0.3]),
    ];
    let mut out = Vec::new();
    for (pi, (a, b)) in pairs.iter().enumerate() {
        let sig = AlgebraVector::new(spec, a).exp().complexify();
        let rho = AlgebraVector::new(spec, b).exp().complexify();
        let mut prev = f64::INFINITY;
        let mut monotone = true;
        let mut last = 0.0;
        for &h in &hbars {
            let ov = hall_overlap(&ev, &HallState::new(sig, h), &HallState::new(rho, h))?
                .norm_sqr();
            monotone &= ov < prev;
            prev = ov;
            last = ov;
        }
        out.push(
            Record::new("classical-limit", &format!("pair{pi}-decreasing"), cfg)
                .value(C64::new(last, 0.0))
                .verdict_leq(if monotone { 0.0 } else { 1.0 }, 0.0),
        );
        // Equal labels pin the overlap at exactly 1 for every hbar.
        let mut worst: f64 = 0.0;
        for &h in &hbars {
            let ov = hall_overlap(&ev, &HallState::new(sig, h), &HallState::new(sig, h))?;
            worst = worst.max((ov - C64::ONE).norm());
        }
        out.push(
            Record::new("classical-limit", &format!("pair{pi}-self-unit"), cfg)
                .value(C64::new(worst, 0.0))
                .verdict_leq(worst, 1e-12),
        );
    }
    Ok(out)
}

/// Compact-group projection oracle.
pub fn compact_oracle_check(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let tol = cfg.tol("compact", 1e-8);
    let mut out = Vec::new();

    let rep = FiniteRep::Tensor(
        Box::new(FiniteRep::Spin { twice_j: 1 }),
        Box::new(FiniteRep::Spin { twice_j: 1 }),
    );
    let s = 1.0 / 2.0f64.sqrt();
    let singlet = [C64::ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), C64::ZERO];
    let mut proj = vec![vec![C64::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            proj[i][j] = singlet[i] * singlet[j].conj();
        }
    }
    let r1 = compact_oracle(&rep, &proj, 20, tol);
    out.push(
        Record::new("compact-oracle", "singlet-projector", cfg)
            .value(C64::new(r1.max_deviation, 0.0))
            .verdict_leq(r1.max_deviation.max(r1.idempotency_defect), tol),
    );

    let half = FiniteRep::Spin { twice_j: 1 };
    let zero = vec![vec![C64::ZERO; 2]; 2];
    let r2 = compact_oracle(&half, &zero, 20, tol);
    out.push(
        Record::new("compact-oracle", "no-trivial-subrep", cfg)
            .value(C64::new(r2.projector_norm, 0.0))
            .verdict_leq(r2.projector_norm.max(r2.max_deviation), tol),
    );

    let triv = FiniteRep::Trivial;
    let id = vec![vec![C64::ONE]];
    let r3 = compact_oracle(&triv, &id, 8, 1e-12);
    out.push(
        Record::new("compact-oracle", "trivial-rep-identity", cfg)
            .value(C64::new(r3.max_deviation, 0.0))
            .verdict_leq(r3.max_deviation, 1e-12),
    );
    Ok(out)
}

/// Extra surface used by `reduce-verify --out`: dump the verification
/// fields in the documented columnar format.
pub fn dump_fields(cfg: &ExperimentConfig) -> Result<()> {
    let pairs: Vec<(ExpVectorLabel, ExpVectorLabel)> =
        (0..5).map(|i| field_pair(cfg, 100 + i)).collect();
    let mut fields = Vec::new();
    for (w, z) in &pairs {
        fields.push(w.field().clone());
        fields.push(z.field().clone());
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut buf = Vec::new();
    ymloop_core::gauge::write_field_ensemble(&fields, &mut buf)?;
    std::fs::write(cfg.out_dir.join("reduce-verify-fields.txt"), buf)?;
    Ok(())
}

/// Everything, in a fixed order, no short-circuiting.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<(String, Vec<Record>)>> {
    let mut u1_cfg = cfg.clone();
    u1_cfg.group = "u1".into();
    u1_cfg.steps = cfg.steps.min(100);
    let mut su2_cfg = cfg.clone();
    su2_cfg.group = "su2".into();

    let mut all = Vec::new();
    all.push(("heat-check".to_string(), heat_check(cfg)?));
    all.push(("bm-check".to_string(), bm_check(cfg)?));
    all.push(("bridge-check".to_string(), bridge_check(&su2_cfg)?));
    all.push(("cm-flat".to_string(), cm_flat(cfg)?));
    all.push(("cm-loop".to_string(), cm_loop(cfg)?));
    all.push(("gauge-cov".to_string(), gauge_cov(cfg)?));
    all.push(("ggv-unitarity".to_string(), ggv_unitarity(cfg)?));
    all.push(("reduce-verify-u1".to_string(), reduce_verify(&u1_cfg)?));
    all.push(("reduce-verify-su2".to_string(), reduce_verify(&su2_cfg)?));
    all.push(("gauge-inv-u1".to_string(), gauge_inv(&u1_cfg)?));
    all.push(("gauge-inv-su2".to_string(), gauge_inv(&su2_cfg)?));
    all.push(("resolution".to_string(), resolution(cfg)?));
    all.push(("classical-limit".to_string(), classical_limit(cfg)?));
    all.push(("compact-oracle".to_string(), compact_oracle_check(cfg)?));
    Ok(all)
}
