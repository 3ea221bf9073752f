//! Property suites run by `qent validate`.

use std::fmt;

use serde::Serialize;

use crate::bell_analyzer::{bell_probabilities, corner_differences, protocol_gamma_sup};
use crate::gamma_sup::{brute_force_oracle, coordinate_ascent, ORACLE_AGREEMENT};
use crate::local_unitary::{apply, apply_phase_only, haar_local_unitary, PhaseOnlyParams};
use crate::measures::{concurrence_mixed, concurrence_pure, is_ppt, negativity};
use crate::optimize::OptimizerConfig;
use crate::phase_povm::{gamma_closed_form, gamma_numeric, PhaseGrid};
use crate::qmath::hermitian_eigen;
use crate::rng::{uniform_in, RngSeed};
use crate::states::{density_from_pure, haar_random_pure, random_mixed, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationLevel {
    Quick,
    Default,
    Oracle,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl PropertyOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationSummary {
    pub properties: Vec<PropertyOutcome>,
}

impl ValidationSummary {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(PropertyOutcome::ok)
    }
}

impl fmt::Display for ValidationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            writeln!(
                f,
                "{} {:<14} {:<44} {:>4}/{:<4} worst {:.3e} (tol {:.0e})",
                if p.ok() { "PASS" } else { "FAIL" },
                p.module,
                p.name,
                p.passed,
                p.total,
                p.worst,
                p.tolerance
            )?;
        }
        let failed = self.properties.iter().filter(|p| !p.ok()).count();
        write!(f, "{} properties, {} failed", self.properties.len(), failed)
    }
}

struct Suite {
    out: Vec<PropertyOutcome>,
    seed: u64,
}

impl Suite {
    /// Runs `deviation` on `n` seeded samples; a sample passes when its
    /// deviation is at most `tol`.
    fn check(
        &mut self,
        module: &'static str,
        name: &'static str,
        n: usize,
        tol: f64,
        deviation: impl Fn(RngSeed) -> f64,
    ) {
        let base = self.seed.wrapping_add(1_000_003 * (self.out.len() as u64 + 1));
        let mut worst: f64 = 0.0;
        let mut passed = 0;
        for k in 0..n {
            let d = deviation(RngSeed(base.wrapping_add(k as u64)));
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
            if d <= tol {
                passed += 1;
            }
        }
        self.out.push(PropertyOutcome {
            module,
            name,
            passed,
            total: n,
            worst,
            tolerance: tol,
        });
    }
}

fn mixed(seed: RngSeed) -> DensityMatrix {
    let rank = 1 + (seed.0 % 4) as usize;
    random_mixed(seed, rank).expect("rank in 1..=4")
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

pub fn run_validation(level: ValidationLevel, cfg: &OptimizerConfig) -> ValidationSummary {
    let scale = |full: usize, quick: usize| if level == ValidationLevel::Quick { quick } else { full };
    let mut s = Suite {
        out: Vec::new(),
        seed: cfg.seed.0,
    };

    s.check("qmath", "eigendecomposition reconstructs matrix", scale(200, 20), 1e-12, |seed| {
        let m = *mixed(seed).matrix();
        let e = hermitian_eigen(&m).unwrap();
        let mut r = crate::qmath::Mat4::zeros();
        for k in 0..4 {
            let v = e.vector(k);
            r = r + crate::qmath::Mat4::outer(&v, &v) * e.values[k];
        }
        r.max_abs_diff(&m)
    });
    s.check("states", "random states are valid density matrices", scale(200, 20), 1e-10, |seed| {
        let rho = mixed(seed);
        let tr = (rho.matrix().trace().re - 1.0).abs();
        tr.max(-rho.eigenvalues()[3])
    });
    s.check("phase_povm", "Fourier path equals closed form", scale(200, 20), 1e-10, |seed| {
        let rho = mixed(seed);
        let g = gamma_closed_form(&rho);
        [4, 8, 16]
            .iter()
            .map(|&n| (gamma_numeric(&rho, PhaseGrid::square(n).unwrap()) - g).abs())
            .fold(0.0, f64::max)
    });
    s.check("local_unitary", "phase quotient leaves gamma unchanged", scale(100, 10), 1e-12, |seed| {
        let rho = apply(&haar_local_unitary(seed), &mixed(seed));
        let mut rng = seed.stream(1);
        let d = PhaseOnlyParams::wrapped(uniform_in(&mut rng, 0.0, 6.3), uniform_in(&mut rng, 0.0, 6.3));
        (gamma_closed_form(&apply_phase_only(&d, &rho)) - gamma_closed_form(&rho)).abs()
    });
    s.check("local_unitary", "spectrum preserved", scale(100, 10), 1e-9, |seed| {
        let rho = mixed(seed);
        let moved = apply(&haar_local_unitary(seed), &rho);
        rho.eigenvalues()
            .iter()
            .zip(moved.eigenvalues())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    s.check("gamma_sup", "pure states: gamma_sup equals concurrence", scale(500, 20), 1e-6, |seed| {
        let psi = haar_random_pure(seed);
        (coordinate_ascent(&density_from_pure(&psi), cfg).value - concurrence_pure(&psi)).abs()
    });
    s.check("gamma_sup", "dominates 50 random local frames", scale(20, 3), 1e-6, |seed| {
        let rho = mixed(seed);
        let sup = coordinate_ascent(&rho, cfg).value;
        (0..50)
            .map(|k| gamma_closed_form(&apply(&haar_local_unitary(seed.stream(k).into_seed()), &rho)) - sup)
            .fold(0.0, f64::max)
    });
    s.check("gamma_sup", "invariant under local unitaries", scale(30, 3), 2e-6, |seed| {
        let rho = mixed(seed);
        let moved = apply(&haar_local_unitary(seed), &rho);
        (coordinate_ascent(&rho, cfg).value - coordinate_ascent(&moved, cfg).value).abs()
    });
    s.check("measures", "PPT iff concurrence vanishes", scale(300, 30), 0.0, |seed| {
        let rho = mixed(seed);
        flag(is_ppt(&rho) == (concurrence_mixed(&rho) <= 1e-6))
    });
    s.check("measures", "mixed concurrence reduces to pure", scale(200, 20), 1e-9, |seed| {
        let psi = haar_random_pure(seed);
        (concurrence_mixed(&density_from_pure(&psi)) - concurrence_pure(&psi)).abs()
    });
    s.check("measures", "concurrence and negativity are LU-invariant", scale(100, 10), 2e-9, |seed| {
        let rho = mixed(seed);
        let moved = apply(&haar_local_unitary(seed), &rho);
        (concurrence_mixed(&rho) - concurrence_mixed(&moved))
            .abs()
            .max((negativity(&rho) - negativity(&moved)).abs())
    });
    s.check("bell_analyzer", "d1, d2 equal twice the real corners", scale(200, 20), 1e-12, |seed| {
        let rho = mixed(seed);
        let (d1, d2) = corner_differences(&rho);
        (d1 - 2.0 * rho.rho14().re).abs().max((d2 - 2.0 * rho.rho23().re).abs())
    });
    s.check("bell_analyzer", "Bell probabilities sum to one", scale(200, 20), 1e-10, |seed| {
        (bell_probabilities(&mixed(seed)).sum() - 1.0).abs()
    });
    s.check("bell_analyzer", "noiseless protocol equals gamma_sup", scale(20, 2), 1e-4, |seed| {
        let rho = mixed(seed);
        let p = protocol_gamma_sup(&rho, cfg, None, seed).unwrap();
        (p.gamma_sup_estimate - coordinate_ascent(&rho, cfg).value).abs()
    });

    if level == ValidationLevel::Oracle {
        s.check("gamma_sup", "optimizer agrees with grid oracle", 20, ORACLE_AGREEMENT, |seed| {
            let rho = mixed(seed);
            (coordinate_ascent(&rho, cfg).value - brute_force_oracle(&rho, 24, false).unwrap()).abs()
        });
        s.check("gamma_sup", "four angles reach the six-angle oracle", 5, ORACLE_AGREEMENT, |seed| {
            let rho = mixed(seed);
            (brute_force_oracle(&rho, 16, false).unwrap() - brute_force_oracle(&rho, 16, true).unwrap()).abs()
        });
    }

    ValidationSummary { properties: s.out }
}

trait IntoSeed {
    fn into_seed(self) -> RngSeed;
}

impl IntoSeed for crate::rng::SimRng {
    fn into_seed(mut self) -> RngSeed {
        use rand::RngCore;
        RngSeed(self.next_u64())
    }
}
