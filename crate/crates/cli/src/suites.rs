//! Verification batteries, one per module, plus the measurements they use.

use std::time::Instant;

use cosserat::algebra::{bracket, exp, Generator, BASIS};
use cosserat::dirac::{
    antisymmetric_energy_momentum, conservation_report, current_j, density_velocity, dirac_residual, dual_spin,
    energy_momentum, spin_tensor, takabayasi, GammaBasis,
};
use cosserat::dynamics::{
    convergence_order, cosserat_residual, eulerian_density, lagrangian_density, poincare_invariance_residual,
    spatialize, EulerianVariation, ResidualVariant,
};
use cosserat::forms::{dislocation, ext_d, incompatibility, nabla_group, FormField, GroupField, Lattice};
use cosserat::kinematics::prolong;
use cosserat::lorentz::{dot, eta, lorentz_residual, lower, FourVector, LorentzMatrix, Units};
use cosserat::weyssenhoff::{
    integrate_worldline, momentum_from_state, spin_from_lower, split_momentum, stress_tensors, transverse_momentum,
    FlowField, IntegratorConfig, RestMass, WeyssenhoffElement,
};
use nalgebra::{Matrix4, Vector4};
use rand::Rng;

use crate::config::SuiteConfig;
use crate::fixtures::{self, Manufactured};
use crate::report::{timed, Check, SuiteReport};

pub const SUITES: [&str; 5] = ["algebra", "forms", "cosserat", "dirac", "weyssenhoff"];

/// Runs a named suite, or every suite for "all". `None` for an unknown name.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    let t = Instant::now();
    let checks = match name {
        "algebra" => algebra(cfg),
        "forms" => forms(cfg),
        "cosserat" => cosserat(cfg),
        "dirac" => dirac(cfg),
        "weyssenhoff" => weyssenhoff(cfg),
        "all" => {
            let mut all = algebra(cfg);
            all.extend(forms(cfg));
            all.extend(cosserat(cfg));
            all.extend(dirac(cfg));
            all.extend(weyssenhoff(cfg));
            all
        }
        _ => return None,
    };
    Some(SuiteReport::new(name, cfg.seed, &cfg.grids, checks, t.elapsed().as_secs_f64() * 1e3))
}

// ---------------------------------------------------------------- algebra

fn eps(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1,
        _ => 0,
    }
}

fn slot(g: Generator) -> usize {
    BASIS.iter().position(|b| *b == g).expect("basis generator")
}

/// Structure constants written out from the commutation rules, independent
/// of the matrix representation.
pub fn expected_bracket(a: Generator, b: Generator) -> [i64; 10] {
    use Generator::*;
    let mut out = [0i64; 10];
    let mut put = |g: Generator, c: i64| out[slot(g)] += c;
    match (a, b) {
        (Rotation(i), Rotation(j)) => (1..=3).for_each(|k| put(Rotation(k), eps(i, j, k))),
        (Rotation(i), Boost(j)) => (1..=3).for_each(|k| put(Boost(k), eps(i, j, k))),
        (Boost(i), Boost(j)) => (1..=3).for_each(|k| put(Rotation(k), -eps(i, j, k))),
        (Translation(_), Translation(_)) => {}
        (Translation(0), Rotation(_)) => {}
        (Translation(i), Rotation(j)) => (1..=3).for_each(|k| put(Translation(k), eps(i, j, k))),
        (Translation(0), Boost(i)) => put(Translation(i), -1),
        (Translation(i), Boost(j)) => put(Translation(0), if i == j { -1 } else { 0 }),
        _ => return expected_bracket(b, a).map(|c| -c),
    }
    out
}

fn bracket_mismatch(a: Generator, b: Generator) -> f64 {
    match a.integer().bracket(&b.integer()).coordinates() {
        Some(c) => c.iter().zip(expected_bracket(a, b)).map(|(x, y)| (x - y).abs()).max().unwrap_or(0) as f64,
        None => f64::NAN,
    }
}

/// Largest Jacobi-identity defect over `n` seeded random triples.
pub fn jacobi_defect(seed: u64, n: usize) -> f64 {
    let mut rng = fixtures::rng(seed);
    (0..n)
        .map(|_| {
            let (x, y, z) = (
                fixtures::random_element(&mut rng, 1.0),
                fixtures::random_element(&mut rng, 1.0),
                fixtures::random_element(&mut rng, 1.0),
            );
            let j = bracket(&x, &bracket(&y, &z)) + bracket(&y, &bracket(&z, &x)) + bracket(&z, &bracket(&x, &y));
            j.max_abs()
        })
        .fold(0.0, f64::max)
}

/// Worst Lorentz residual, determinant defect and one-parameter-subgroup
/// defect of `exp` over `n` seeded random elements.
pub fn exp_defects(seed: u64, n: usize) -> (f64, f64, f64) {
    let mut rng = fixtures::rng(seed ^ 0x5eed);
    let mut out = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..n {
        let x = fixtures::random_element(&mut rng, 1.0);
        let g = exp(&x);
        out.0 = out.0.max(lorentz_residual(g.l.matrix()));
        out.1 = out.1.max((g.l.matrix().determinant() - 1.0).abs());
        let (s, t) = (fixtures::uniform(&mut rng, 1.0), fixtures::uniform(&mut rng, 1.0));
        let lhs = exp(&(x * (s + t))).to_homogeneous();
        let rhs = exp(&(x * s)).compose(&exp(&(x * t))).to_homogeneous();
        out.2 = out.2.max((lhs - rhs).amax());
    }
    out
}

pub fn algebra(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = timed(|| {
        let mut v = Vec::new();
        for (i, a) in BASIS.iter().enumerate() {
            for b in &BASIS[i + 1..] {
                let id = format!("algebra.bracket.{}.{}", a.name(), b.name());
                v.push(Check::at_most(id, "basis-brackets", bracket_mismatch(*a, *b), 0.0));
            }
        }
        v
    });
    out.extend(timed(|| vec![Check::at_most("algebra.jacobi", "jacobi", jacobi_defect(cfg.seed, cfg.samples), 1e-12)]));
    out.extend(timed(|| {
        let (lor, det, sub) = exp_defects(cfg.seed, cfg.samples);
        vec![
            Check::at_most("algebra.exp.lorentz", "exp-lorentz", lor, 1e-10),
            Check::at_most("algebra.exp.det", "exp-det", det, 1e-9),
            Check::at_most("algebra.exp.one_parameter", "one-parameter-subgroup", sub, 1e-9),
        ]
    }));
    out
}

// ---------------------------------------------------------------- forms

/// Interior norm of the dislocation of displacement field `k` on an `n^p` grid.
pub fn dislocation_norm(p: usize, n: usize, k: usize) -> f64 {
    let l = Lattice::unit_cube(p, n).expect("valid lattice");
    let g = GroupField::from_fn(&l, |r| fixtures::displacement(k, r));
    dislocation(&nabla_group(&g)).expect("p >= 2").interior_max_norm()
}

/// Interior norm of the incompatibility of the dislocation of a generic
/// deformation on an `n^3` grid.
pub fn bianchi_norm(n: usize) -> f64 {
    let l = Lattice::unit_cube(3, n).expect("valid lattice");
    let e = fixtures::generic_deformation(&l);
    let omega = dislocation(&e).expect("p >= 2");
    incompatibility(&omega, &e).expect("p >= 3").interior_max_norm()
}

fn refinement(a: usize, b: usize) -> f64 {
    (b - 1) as f64 / (a - 1) as f64
}

fn order_checks(prefix: &str, identity: &str, grids: &[usize], norms: &[f64], low: f64, high: f64) -> Vec<Check> {
    let mut v: Vec<Check> = grids
        .windows(2)
        .zip(norms.windows(2))
        .map(|(g, n)| {
            Check::within(
                format!("{prefix}.order.{}-{}", g[0], g[1]),
                identity,
                convergence_order(n[0], n[1], refinement(g[0], g[1])),
                low,
                high,
            )
        })
        .collect();
    for (g, n) in grids.iter().zip(norms) {
        v.push(Check::at_most(format!("{prefix}.norm.{g:03}"), "plumbing", *n, f64::INFINITY));
    }
    v
}

pub fn forms(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let fine = *cfg.grids.last().expect("validated grids");
    for p in [2, 3] {
        for k in 0..fixtures::DISPLACEMENT_FIELDS {
            out.extend(timed(|| {
                let norms: Vec<f64> = cfg.grids.iter().map(|&n| dislocation_norm(p, n, k)).collect();
                let prefix = format!("forms.dislocation.p{p}.g{k}");
                let mut v = order_checks(&prefix, "nabla-squared-zero", &cfg.grids, &norms, 1.7, 2.3);
                v.push(Check::at_most(format!("{prefix}.fine"), "nabla-squared-zero", norms[norms.len() - 1], 1e-3));
                v
            }));
        }
    }
    out.extend(timed(|| {
        let norms: Vec<f64> = cfg.grids.iter().map(|&n| bianchi_norm(n)).collect();
        order_checks("forms.bianchi.p3", "bianchi", &cfg.grids, &norms, 1.7, 2.3)
    }));
    out.extend(timed(|| {
        let l = Lattice::unit_cube(3, fine.min(17)).expect("valid lattice");
        let f = FormField::from_fn(&l, 0, |r, _| (r[0] * r[1]).sin() + r[2].exp() * r[0]).expect("0-form");
        let dd = ext_d(&ext_d(&f).expect("d")).expect("dd").interior_max_norm();
        vec![Check::at_most("forms.dd_zero", "d-squared-zero", dd, 1e-10)]
    }));
    out
}

// ---------------------------------------------------------------- cosserat

/// Interior norms of the general residual for the balanced manufactured state.
pub fn manufactured_general(n: usize) -> (f64, f64) {
    let s = Manufactured::state(n);
    let phi = Manufactured::balanced(&s).expect("regular frames");
    cosserat_residual(&phi, &s, ResidualVariant::General, 1e-6).expect("integrable").interior_norms()
}

/// Interior error of the Poincare-invariant residual against its exact value.
pub fn manufactured_invariant_error(n: usize) -> (f64, f64) {
    let s = Manufactured::state(n);
    let phi = Manufactured::invariant(&s).expect("regular frames");
    let r = cosserat_residual(&phi, &s, ResidualVariant::PoincareInvariant, 1e-6).expect("integrable");
    let l = s.lattice();
    let mut err = (0.0_f64, 0.0_f64);
    for i in l.interior_indices() {
        let (f, m) = Manufactured::invariant_residual(&l.coords(i));
        err.0 = err.0.max((r.force[i] - f).amax());
        err.1 = err.1.max((r.moment[i] - m).amax());
    }
    err
}

/// Force and barred-couple norms of the invariant construction.
pub fn invariant_construction(n: usize) -> (f64, f64) {
    let s = Manufactured::state(n);
    let phi = Manufactured::invariant(&s).expect("regular frames");
    poincare_invariance_residual(&phi, &s).expect("same lattice")
}

/// Largest difference between the Eulerian density and the Lagrangian density
/// of the converted variation, over `n` random samples.
pub fn virtual_work_pictures(seed: u64, n: usize) -> f64 {
    let mut rng = fixtures::rng(seed ^ 0x1a9);
    (0..n)
        .map(|_| {
            let p = rng.random_range(1..=4);
            let jet = fixtures::random_jet(&mut rng, p);
            let phi = fixtures::random_dynamical_point(&mut rng, p);
            let d = EulerianVariation {
                dxi: fixtures::random_vector(&mut rng, 1.0),
                di: fixtures::random_generator(&mut rng, 1.0),
                dxi_d: (0..p).map(|_| fixtures::random_vector(&mut rng, 1.0)).collect(),
                di_d: (0..p).map(|_| fixtures::random_generator(&mut rng, 1.0)).collect(),
            };
            (eulerian_density(&phi, &jet, &d) - lagrangian_density(&phi, &d.to_lagrangian(&jet))).abs()
        })
        .fold(0.0, f64::max)
}

/// Difference between the spatial form and the material invariant residual
/// when the body is embedded by the identity map.
pub fn identity_embedding_defect(n: usize) -> f64 {
    let l = Lattice::unit_cube(4, n).expect("valid lattice");
    let s = prolong(&l, |r| {
        let w = Generator::Rotation(2).element().w * (0.3 * r[1]) + Generator::Boost(3).element().w * (0.2 * r[0] * r[3]);
        (Vector4::new(r[0], r[1], r[2], r[3]), cosserat::expm::expm(&w))
    })
    .expect("Lorentz frames");
    let phi = cosserat::dynamics::DynamicalState::poincare_invariant(
        &s,
        |r| (0..4).map(|a| Vector4::from_fn(|m, _| ((a + m) as f64 * r[a] + r[(a + 1) % 4]).sin())).collect(),
        |r| (0..4).map(|a| Matrix4::from_fn(|i, j| (r[a] * (i as f64 + 1.0) - r[3 - a] * j as f64).cos() * 0.1)).collect(),
    )
    .expect("regular frames");
    let a = spatialize(&phi, &s).expect("regular embedding");
    let b = cosserat_residual(&phi, &s, ResidualVariant::PoincareInvariant, 1e-6).expect("integrable");
    let mut d = 0.0_f64;
    for i in 0..l.len() {
        d = d.max((a.force[i] - b.force[i]).amax()).max((a.moment[i] - b.moment[i]).amax());
    }
    d
}

pub fn cosserat(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = timed(|| {
        let norms: Vec<(f64, f64)> = cfg.grids.iter().map(|&n| manufactured_general(n)).collect();
        let mut v = order_checks("cosserat.general.force", "cosserat-balance", &cfg.grids, &norms.iter().map(|n| n.0).collect::<Vec<_>>(), 1.7, 2.3);
        v.extend(order_checks("cosserat.general.moment", "cosserat-balance", &cfg.grids, &norms.iter().map(|n| n.1).collect::<Vec<_>>(), 1.7, 2.3));
        v
    });
    out.extend(timed(|| {
        let norms: Vec<(f64, f64)> = cfg.grids.iter().map(|&n| manufactured_invariant_error(n)).collect();
        let mut v = order_checks("cosserat.invariant.force", "invariant-balance", &cfg.grids, &norms.iter().map(|n| n.0).collect::<Vec<_>>(), 1.7, 2.3);
        v.extend(order_checks("cosserat.invariant.moment", "invariant-balance", &cfg.grids, &norms.iter().map(|n| n.1).collect::<Vec<_>>(), 1.7, 2.3));
        v
    }));
    out.extend(timed(|| {
        let (f, m) = invariant_construction(cfg.grids[0]);
        vec![
            Check::at_most("cosserat.invariant_form.force", "invariant-form", f, 1e-12),
            Check::at_most("cosserat.invariant_form.barred_couple", "invariant-form", m, 1e-12),
        ]
    }));
    out.extend(timed(|| {
        vec![Check::at_most("cosserat.virtual_work.pictures", "virtual-work-pictures", virtual_work_pictures(cfg.seed, cfg.samples), 1e-12)]
    }));
    out.extend(timed(|| vec![Check::at_most("cosserat.spatial.identity_embedding", "spatial-balance", identity_embedding_defect(5), 1e-10)]));
    out
}

// ---------------------------------------------------------------- dirac

/// Worst values over `n` random single plane waves.
#[derive(Clone, Copy, Debug, Default)]
pub struct PlaneWaveDefects {
    pub dirac: f64,
    pub velocity_norm: f64,
    pub frenkel: f64,
    pub spin_forms: f64,
    pub spin_antisymmetry: f64,
    pub antisymmetric_stress: f64,
    pub conservation: f64,
    pub fierz: f64,
    pub duality: f64,
}

pub fn plane_wave_defects(seed: u64, n: usize) -> PlaneWaveDefects {
    let g = GammaBasis::dirac();
    let units = Units::default();
    let mut rng = fixtures::rng(seed ^ 0xd1a);
    let mut d = PlaneWaveDefects::default();
    let c2 = units.c * units.c;
    for _ in 0..n {
        let kappa = rng.random_range(0.5..2.0);
        let w = fixtures::random_plane_wave(&mut rng, kappa, units);
        let x = fixtures::random_vector(&mut rng, 3.0);
        d.dirac = d.dirac.max(dirac_residual(&g, &w, &x));
        let j = current_j(&g, &w, &x).expect("real current");
        let (rho, u) = density_velocity(&j, units).expect("timelike current");
        d.velocity_norm = d.velocity_norm.max((u.interval() - c2).abs());
        let (full, frenkel, defect) = spin_tensor(&g, &w, &x, &u).expect("real spin");
        d.frenkel = d.frenkel.max((u.lower().transpose() * frenkel).amax());
        d.spin_forms = d.spin_forms.max(defect);
        d.spin_antisymmetry = d.spin_antisymmetry.max(full.antisymmetry_defect());
        let t = energy_momentum(&g, &w, &x).expect("real stress");
        let tl = eta() * t;
        let anti = (tl - tl.transpose()) * 0.5;
        d.antisymmetric_stress = d.antisymmetric_stress.max((anti - antisymmetric_energy_momentum(&g, &w, &x)).amax());
        let c = conservation_report(&g, &w, &[x]).expect("real bilinears");
        d.conservation = d.conservation.max(c.current).max(c.energy_momentum).max(c.angular_momentum);
        let tk = takabayasi(&g, &w, &x).expect("nonzero density");
        d.fierz = d.fierz.max((tk.omega.powi(2) + tk.omega_hat.powi(2) - rho * rho).abs() / (rho * rho));
        d.duality = d.duality.max((dual_spin(&u, &tk.spin_vector) - tk.spin_form).amax());
    }
    d
}

/// Conservation residuals of a random two-wave superposition on 16 points,
/// and the Fierz defect there.
pub fn two_wave_defects(seed: u64) -> (f64, f64, f64, f64) {
    let g = GammaBasis::dirac();
    let mut rng = fixtures::rng(seed ^ 0x2a2e);
    let f = fixtures::random_superposition(&mut rng, 1.3, 2, Units::default());
    let points: Vec<Vector4<f64>> = (0..16).map(|_| fixtures::random_vector(&mut rng, 2.0)).collect();
    let r = conservation_report(&g, &f, &points).expect("real bilinears");
    let mut fierz = 0.0_f64;
    for x in &points {
        let j = current_j(&g, &f, x).expect("real current");
        let rho2 = j.interval();
        let tk = takabayasi(&g, &f, x).expect("nonzero density");
        fierz = fierz.max((tk.omega.powi(2) + tk.omega_hat.powi(2) - rho2).abs() / rho2.abs().max(1e-300));
    }
    (r.current, r.energy_momentum, r.angular_momentum, fierz)
}

pub fn dirac(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = timed(|| {
        let g = GammaBasis::dirac();
        vec![
            Check::at_most("dirac.clifford", "clifford", g.clifford_residual(), 1e-14),
            Check::at_most("dirac.hermiticity", "gamma-hermiticity", g.hermiticity_residual(), 1e-14),
        ]
    });
    out.extend(timed(|| {
        let d = plane_wave_defects(cfg.seed, cfg.samples.min(200));
        vec![
            Check::at_most("dirac.plane_wave.equation", "dirac-equation", d.dirac, 1e-12),
            Check::at_most("dirac.plane_wave.velocity_norm", "velocity-normalization", d.velocity_norm, 1e-10),
            Check::at_most("dirac.plane_wave.frenkel", "frenkel-constraint", d.frenkel, 1e-10),
            Check::at_most("dirac.plane_wave.spin_forms", "spin-tensor-forms", d.spin_forms, 1e-12),
            Check::at_most("dirac.plane_wave.spin_antisymmetry", "spin-antisymmetry", d.spin_antisymmetry, 1e-12),
            Check::at_most("dirac.plane_wave.antisymmetric_stress", "antisymmetric-stress", d.antisymmetric_stress, 1e-12),
            Check::at_most("dirac.plane_wave.conservation", "conservation-laws", d.conservation, 1e-12),
            Check::at_most("dirac.plane_wave.fierz", "takabayasi-fierz", d.fierz, 1e-10),
            Check::at_most("dirac.plane_wave.duality", "spin-duality", d.duality, 1e-12),
        ]
    }));
    out.extend(timed(|| {
        let (cur, em, am, fierz) = two_wave_defects(cfg.seed);
        vec![
            Check::at_most("dirac.two_wave.current", "current-conservation", cur, 1e-10),
            Check::at_most("dirac.two_wave.energy_momentum", "energy-momentum-conservation", em, 1e-10),
            Check::at_most("dirac.two_wave.angular_momentum", "angular-momentum-balance", am, 1e-10),
            Check::at_most("dirac.two_wave.fierz", "takabayasi-fierz", fierz, 1e-10),
        ]
    }));
    out
}

// ---------------------------------------------------------------- weyssenhoff

/// Rest-frame element with spin `s_12 = sigma` and acceleration `(0, alpha, 0, 0)`,
/// moved by `l`.
pub fn boosted_element(sigma: f64, alpha: f64, rho0: f64, l: &LorentzMatrix) -> WeyssenhoffElement {
    let u = FourVector::new(1.0, 0.0, 0.0, 0.0);
    let s = spin_from_lower([0.0, 0.0, 0.0, sigma, 0.0, 0.0]);
    let g = momentum_from_state(&u, &s, rho0, &Vector4::new(0.0, alpha, 0.0, 0.0), 1.0).expect("a orthogonal to u");
    let li = l.inverse();
    WeyssenhoffElement { x: FourVector::zero(), u: l.apply(&u), g: li.matrix().transpose() * g, s: l.matrix() * s * li.matrix(), tau: 0.0 }
}

/// The generic worldline used for the refinement study.
pub fn generic_worldline_element() -> WeyssenhoffElement {
    boosted_element(0.5, 0.3, 1.0, &LorentzMatrix::boost(1, 0.3).compose(&LorentzMatrix::boost(2, 0.2)))
}

/// Largest constraint drift of the generic worldline over `steps` steps of `dtau`.
pub fn worldline_drift(steps: usize, dtau: f64) -> Result<f64, cosserat::weyssenhoff::WeyssenhoffError> {
    let cfg = IntegratorConfig { steps, dtau, record_every: steps.max(1), max_drift: 1e-3, ..Default::default() };
    Ok(integrate_worldline(&generic_worldline_element(), 1.0, &cfg)?.diagnostics.constraint_drift())
}

/// Largest deviation from straight, constant-velocity motion.
pub fn free_motion_defect(e: &WeyssenhoffElement, steps: usize, dtau: f64) -> Result<f64, cosserat::weyssenhoff::WeyssenhoffError> {
    let cfg = IntegratorConfig { steps, dtau, ..Default::default() };
    let tr = integrate_worldline(e, 1.0, &cfg)?;
    let mut d = 0.0_f64;
    for r in &tr.records {
        let x = e.x.as_vector() + e.u.as_vector() * (r.tau - e.tau);
        d = d.max((Vector4::from(r.x) - x).amax()).max((Vector4::from(r.u) - e.u.as_vector()).amax());
    }
    Ok(d)
}

/// Random valid element: rest-frame spin, momentum and acceleration moved by a
/// random Lorentz matrix.
pub fn random_element(rng: &mut impl Rng) -> (WeyssenhoffElement, f64, Vector4<f64>) {
    let l = fixtures::random_lorentz(rng, 0.6);
    let spatial = [0.0, 0.0, 0.0, fixtures::uniform(rng, 1.0), fixtures::uniform(rng, 1.0), fixtures::uniform(rng, 1.0)];
    let s_rest = spin_from_lower(spatial);
    let a_rest = Vector4::new(0.0, fixtures::uniform(rng, 1.0), fixtures::uniform(rng, 1.0), fixtures::uniform(rng, 1.0));
    let rho0 = rng.random_range(0.5..2.0);
    let li = l.inverse();
    let u = l.apply(&FourVector::new(1.0, 0.0, 0.0, 0.0));
    let s = l.matrix() * s_rest * li.matrix();
    let a = l.matrix() * a_rest;
    let g = momentum_from_state(&u, &s, rho0, &a, 1.0).expect("a orthogonal to u");
    (WeyssenhoffElement { x: FourVector::zero(), u, g, s, tau: 0.0 }, rho0, a)
}

/// Worst trace-identity, split-roundtrip and rest-mass-identity defects.
pub fn element_defects(seed: u64, n: usize) -> (f64, f64, f64) {
    let mut rng = fixtures::rng(seed ^ 0x3e55);
    let mut d = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..n {
        let (e, rho0, a) = random_element(&mut rng);
        let t = stress_tensors(&e);
        d.0 = d.0.max((t.trace - rho0).abs());
        let sp = split_momentum(&e.g, &e.u, 1.0);
        let pi = transverse_momentum(&e.u, &e.s, &a, 1.0).expect("a orthogonal to u");
        d.1 = d.1.max((sp.rho0 - rho0).abs()).max((sp.pi - lower(&pi)).amax());
        let pi2 = dot(&pi, &pi);
        if let RestMass::Real(mu0) = sp.mass {
            d.2 = d.2.max((mu0 * mu0 - (rho0 * rho0 + pi2)).abs());
        }
    }
    d
}

/// Max deviation of the rest-frame energy-momentum tensor from its block layout.
pub fn rest_frame_layout_defect() -> f64 {
    let e = boosted_element(0.5, 0.3, 2.0, &LorentzMatrix::identity());
    let t = stress_tensors(&e);
    let sp = split_momentum(&e.g, &e.u, 1.0);
    let mut expect = Matrix4::zeros();
    expect[(0, 0)] = 2.0;
    for j in 1..4 {
        expect[(0, j)] = sp.pi[j];
    }
    (t.t - expect).amax()
}

fn analytic_flow() -> FlowField {
    let u = |x: &Vector4<f64>| {
        let v = Vector4::new(1.5 + 0.1 * x[1].sin(), 0.3 * x[2].sin(), 0.2 * x[0].cos() * x[1], 0.1 * x[3]);
        v / dot(&v, &v).sqrt()
    };
    let g = move |x: &Vector4<f64>| {
        let uu = u(x);
        let rho0 = 1.0 + 0.2 * (x[0] + x[3]).sin();
        let w = Vector4::new(0.0, x[2].cos(), 0.3 * x[0], 0.1 * x[1] * x[3]);
        let pi = w - uu * dot(&uu, &w);
        lower(&(uu * rho0 + pi))
    };
    FlowField::new(Box::new(u), Box::new(g), Box::new(|_| Matrix4::zeros()), 1.0)
}

/// Worst product-rule and momentum-divergence-expansion defects on an analytic flow.
pub fn flow_defects(seed: u64, n: usize) -> (f64, f64) {
    let flow = analytic_flow();
    let mut rng = fixtures::rng(seed ^ 0xf10);
    let f = |x: &Vector4<f64>| (x[0] * x[1]).sin() + 2.0;
    let h = |x: &Vector4<f64>| x[2].exp() * x[3].cos();
    let fh = |x: &Vector4<f64>| f(x) * h(x);
    let mut d = (0.0_f64, 0.0_f64);
    for _ in 0..n {
        let x = fixtures::random_vector(&mut rng, 1.0);
        let k = flow.kinematics(&x);
        let (dfh, _) = flow.density_derivative(&fh, &x);
        let (df, _) = flow.density_derivative(&f, &x);
        let (_, h_comoving) = flow.density_derivative(&h, &x);
        let dh_dtau = h_comoving - k.compressibility * h(&x);
        d.0 = d.0.max((dfh - (df * h(&x) + f(&x) * dh_dtau)).abs());
        d.1 = d.1.max((k.momentum_divergence - k.momentum_divergence_expanded).abs());
    }
    d
}

/// Flow with constant `u` and `g` varying only across `u`, so `d_l(u^l g_n) = 0`.
fn conserved_flow() -> FlowField {
    let l = LorentzMatrix::boost(1, 0.4).compose(&LorentzMatrix::rotation(3, 0.3));
    let u = *l.apply(&FourVector::new(1.0, 0.0, 0.0, 0.0)).as_vector();
    let k = l.matrix() * Vector4::new(0.0, 1.0, 0.5, 0.0);
    let q = l.matrix() * Vector4::new(0.0, -0.2, 0.7, 1.0);
    let g = move |x: &Vector4<f64>| {
        let xi = dot(&k, x);
        lower(&(u * (1.0 + 0.3 * xi.sin()) + q * xi.cos()))
    };
    FlowField::new(Box::new(move |_| u), Box::new(g), Box::new(|_| Matrix4::zeros()), 1.0)
}

pub fn orbital_defect(seed: u64, n: usize) -> f64 {
    let flow = conserved_flow();
    let mut rng = fixtures::rng(seed ^ 0x0b17);
    (0..n)
        .map(|_| {
            let (div, expected) = flow.orbital_divergence(&fixtures::random_vector(&mut rng, 2.0));
            (div - expected).amax()
        })
        .fold(0.0, f64::max)
}

pub fn weyssenhoff(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = timed(|| {
        let (trace, split, mass) = element_defects(cfg.seed, cfg.samples);
        vec![
            Check::at_most("weyssenhoff.trace", "trace-identity", trace, 1e-12),
            Check::at_most("weyssenhoff.split_roundtrip", "momentum-split", split, 1e-12),
            Check::at_most("weyssenhoff.rest_mass", "rest-mass-identity", mass, 1e-12),
            Check::at_most("weyssenhoff.rest_frame_layout", "rest-frame-layout", rest_frame_layout_defect(), 1e-12),
        ]
    });
    out.extend(timed(|| {
        let (prod, expand) = flow_defects(cfg.seed, 20);
        vec![
            Check::at_most("weyssenhoff.flow.product_rule", "product-rule", prod, 1e-10),
            Check::at_most("weyssenhoff.flow.momentum_divergence", "momentum-divergence-expansion", expand, 1e-10),
            Check::at_most("weyssenhoff.flow.orbital", "orbital-divergence", orbital_defect(cfg.seed, 20), 1e-9),
        ]
    }));
    out.extend(timed(|| {
        let coarse = worldline_drift(10_000, 0.02);
        let fine = worldline_drift(20_000, 0.01);
        match (coarse, fine) {
            (Ok(c), Ok(f)) => vec![
                Check::at_least("weyssenhoff.worldline.drift_order", "worldline-constraints", (c / f).log2(), 3.7),
                Check::at_most("weyssenhoff.worldline.drift", "worldline-constraints", c, 1e-6),
            ],
            _ => vec![Check::failed("weyssenhoff.worldline.drift_order", "worldline-constraints", crate::report::Bound::AtLeast { limit: 3.7 })],
        }
    }));
    out.extend(timed(|| {
        let u = FourVector::new(1.25, 0.0, 0.75, 0.0);
        let dust = WeyssenhoffElement { x: FourVector::zero(), u, g: u.lower() * 1.5, s: Matrix4::zeros(), tau: 0.0 };
        let spinning = boosted_element(0.7, 0.0, 1.0, &LorentzMatrix::boost(3, 0.5));
        let value = |r: Result<f64, _>| r.unwrap_or(f64::NAN);
        vec![
            Check::at_most("weyssenhoff.worldline.spinless", "spinless-free-motion", value(free_motion_defect(&dust, 1000, 0.05)), 1e-10),
            Check::at_most("weyssenhoff.worldline.stationary_spin", "stationary-spin", value(free_motion_defect(&spinning, 1000, 0.05)), 1e-10),
        ]
    }));
    out
}
