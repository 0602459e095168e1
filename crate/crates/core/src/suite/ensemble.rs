use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ids::CheckId;
use crate::delta::validate_nu;
use crate::error::{Error, Result};
use crate::linalg::{svd, vec_norm, ComplexMatrix, ToleranceConfig};
use crate::radii::{validate_rho, AngleSolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ginibre,
    Hermitian,
    Normal,
    Unitary,
    Nilpotent2,
    RankDeficient,
    Psd,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Ginibre,
        Family::Hermitian,
        Family::Normal,
        Family::Unitary,
        Family::Nilpotent2,
        Family::RankDeficient,
        Family::Psd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ginibre => "ginibre",
            Family::Hermitian => "hermitian",
            Family::Normal => "normal",
            Family::Unitary => "unitary",
            Family::Nilpotent2 => "nilpotent2",
            Family::RankDeficient => "rank_deficient",
            Family::Psd => "psd",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Numerical settings shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckSettings {
    pub solver: AngleSolverConfig,
    pub tolerances: ToleranceConfig,
}

impl Default for CheckSettings {
    /// The suite evaluates millions of numerical radii, so it starts the
    /// angular search from a 64-point grid; refinement is unchanged.
    fn default() -> Self {
        Self {
            solver: AngleSolverConfig {
                coarse_points: 32,
                ..AngleSolverConfig::default()
            },
            tolerances: ToleranceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub families: Vec<Family>,
    pub dims: Vec<usize>,
    pub samples_per_cell: usize,
    pub master_seed: u64,
    pub rho_grid: Vec<f64>,
    pub nu_grid: Vec<f64>,
    pub lambda_set: Vec<Complex64>,
    pub s_set: Vec<f64>,
    /// Restrict evaluation to these checks; `None` runs all of them.
    pub only: Option<BTreeSet<CheckId>>,
    /// Witnesses kept per check.
    pub worst_k: usize,
    pub settings: CheckSettings,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            families: Family::ALL.to_vec(),
            dims: vec![2, 3, 4, 5, 6],
            samples_per_cell: 50,
            master_seed: 0,
            rho_grid: vec![0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0],
            nu_grid: vec![0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0],
            lambda_set: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(5.0, 0.0),
            ],
            s_set: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            only: None,
            worst_k: 10,
            settings: CheckSettings::default(),
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::OutOfRange {
                name: "dim",
                value: d as f64,
                range: "[2,inf)",
            });
        }
        for &r in &self.rho_grid {
            validate_rho(r)?;
        }
        for &n in &self.nu_grid {
            validate_nu(n)?;
        }
        if self.lambda_set.iter().any(|l| l.norm() == 0.0 || !l.is_finite()) {
            return Err(Error::ZeroLambda);
        }
        if let Some(&s) = self.s_set.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::OutOfRange {
                name: "s",
                value: s,
                range: "[0,1]",
            });
        }
        self.settings.solver.validate()?;
        self.settings.tolerances.validate()
    }

    pub fn enabled(&self, id: CheckId) -> bool {
        self.only.as_ref().map_or(true, |s| s.contains(&id))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-sample seed; independent of evaluation order and platform.
pub fn sample_seed(master: u64, family: Family, dim: usize, index: usize) -> u64 {
    let mut h = splitmix64(master);
    for b in family.as_str().bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h = splitmix64(h ^ dim as u64);
    splitmix64(h ^ index as u64)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Q factor of a Ginibre matrix with the phases of `R`'s diagonal removed,
/// which makes it Haar distributed.
fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(q, c)| q.conj() * c).sum();
                let qk = cols[k].clone();
                for (c, q) in cols[j].iter_mut().zip(&qk) {
                    *c -= proj * q;
                }
            }
        }
        let nrm = vec_norm(&cols[j]);
        for c in cols[j].iter_mut() {
            *c /= nrm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Deterministic matrix for `(family, dim, seed)`.
pub fn generate_matrix(family: Family, dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim < 2 {
        return Err(Error::OutOfRange {
            name: "dim",
            value: dim as f64,
            range: "[2,inf)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dim;
    Ok(match family {
        Family::Ginibre => ginibre(&mut rng, n),
        Family::Hermitian => ginibre(&mut rng, n).hermitian_part(),
        Family::Normal => {
            let u = haar_unitary(&mut rng, n);
            let d = ComplexMatrix::from_diag(&gaussian_vector(&mut rng, n));
            u.matmul(&d).matmul(&u.adjoint())
        }
        Family::Unitary => haar_unitary(&mut rng, n),
        Family::Nilpotent2 => {
            let u = gaussian_vector(&mut rng, n);
            let mut v = gaussian_vector(&mut rng, n);
            let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            let vu: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<Complex64>() / uu;
            for (b, a) in v.iter_mut().zip(&u) {
                *b -= vu * a;
            }
            ComplexMatrix::from_fn(n, n, |i, j| u[i] * v[j].conj())
        }
        Family::RankDeficient => {
            let mut s = svd(&ginibre(&mut rng, n))?;
            *s.singular_values.last_mut().expect("dim >= 2") = 0.0;
            s.reconstruct()
        }
        Family::Psd => ginibre(&mut rng, n).gram(),
    })
}

/// Auxiliary inputs drawn for one sample, all derived from its seed.
#[derive(Debug, Clone)]
pub struct SampleAux {
    /// Second summand for the triangle inequality.
    pub second: ComplexMatrix,
    /// `Y` in the congruence bound.
    pub congruence: ComplexMatrix,
    pub unitary: ComplexMatrix,
    /// Positive `Z` for the interpolation checks.
    pub positive: ComplexMatrix,
    /// Second positive factor for the Heinz lemma.
    pub positive_alt: ComplexMatrix,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    /// Unit vector.
    pub e: Vec<Complex64>,
}

impl SampleAux {
    pub fn generate(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0xa0c1_11a2_7e55_0000));
        let second = ginibre(&mut rng, dim);
        let congruence = ginibre(&mut rng, dim);
        let unitary = haar_unitary(&mut rng, dim);
        let positive = ginibre(&mut rng, dim).gram();
        let positive_alt = ginibre(&mut rng, dim).gram();
        let u = gaussian_vector(&mut rng, dim);
        let v = gaussian_vector(&mut rng, dim);
        let mut e = gaussian_vector(&mut rng, dim);
        let en = vec_norm(&e);
        for z in e.iter_mut() {
            *z /= en;
        }
        Self {
            second,
            congruence,
            unitary,
            positive,
            positive_alt,
            u,
            v,
            e,
        }
    }
}
