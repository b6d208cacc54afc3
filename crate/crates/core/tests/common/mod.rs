//! Checks shared by the property tests and the acceptance run. Each returns
//! a short summary on success and a description of the first violation
//! otherwise.

#![allow(dead_code)]

use boundex::detection::{
    bcs_search, detect, Archive, Budget, DetectionConfig, Strategy, DEFAULT_MAX_DOUBLINGS,
};
use boundex::distance::{jaccard_ngram, levenshtein, strlendist, OutputDistanceKind};
use boundex::io::write_csv;
use boundex::sampling::{sample_value, Sampler, SamplerConfig, SamplingMethod, TypeDomain};
use boundex::summarize::{kmeans, summarize_seeded, FeatureMatrix, SummaryConfig};
use boundex::sut::SutDescriptor;
use boundex::{BoundaryCandidate, SutValue};
use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn suts() -> [SutDescriptor; 4] {
    [
        SutDescriptor::bytecount(),
        SutDescriptor::bmi_value(),
        SutDescriptor::bmi_classification(),
        SutDescriptor::date(),
    ]
}

pub fn adjacent_on_one_argument(c: &BoundaryCandidate) -> bool {
    let diffs: Vec<BigInt> = c
        .i1
        .values()
        .iter()
        .zip(c.i2.values())
        .map(|(a, b)| a.abs_diff(b))
        .filter(|d| *d != BigInt::from(0))
        .collect();
    diffs.len() == 1 && diffs[0].is_one()
}

fn random_text<R: Rng>(rng: &mut R) -> String {
    const ALPHABET: [char; 9] = ['a', 'b', '1', '.', ' ', 'k', 'B', 'é', '9'];
    let n = rng.gen_range(0..=12);
    (0..n).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect()
}

/// Identity, symmetry and triangle inequality on random string triples.
pub fn distance_axioms(triples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..triples {
        let [a, b, c] = [0; 3].map(|_| random_text(&mut rng));
        for (name, d) in [("strlendist", strlendist as fn(&str, &str) -> usize), ("levenshtein", levenshtein)] {
            if d(&a, &a) != 0 || d(&a, &b) != d(&b, &a) || d(&a, &c) > d(&a, &b) + d(&b, &c) {
                return Err(format!("{name} axioms fail on triple {t}: {a:?} {b:?} {c:?}"));
            }
        }
        if (levenshtein(&a, &b) == 0) != (a == b) {
            return Err(format!("levenshtein zero on distinct {a:?} {b:?}"));
        }
        for n in [1, 2] {
            let j = |x: &str, y: &str| jaccard_ngram(n, x, y);
            if j(&a, &a) != 0.0
                || j(&a, &b) != j(&b, &a)
                || !(0.0..=1.0).contains(&j(&a, &b))
                || j(&a, &c) > j(&a, &b) + j(&b, &c) + 1e-12
            {
                return Err(format!("jaccard{n} axioms fail on {a:?} {b:?} {c:?}"));
            }
        }
    }
    Ok(format!("{triples} triples"))
}

/// Key uniqueness, threshold, score consistency and adjacency.
pub fn archive_invariants(archive: &Archive, d_o: OutputDistanceKind) -> Check {
    archive.check_invariants()?;
    for c in archive {
        let score = c.rescore(d_o).map_err(|e| e.to_string())?;
        if score != c.score {
            return Err(format!("{} stored score {} != {}", c.key(), c.score, score));
        }
        if !adjacent_on_one_argument(c) {
            return Err(format!("{} is not a single-step pair", c.key()));
        }
    }
    Ok(format!("{} entries", archive.len()))
}

/// Iteration-budget runs of both strategies on every built-in SUT.
pub fn archive_invariants_all(iterations: u64) -> Check {
    let mut total = 0;
    for sut in suts() {
        for (strategy, seed) in [(Strategy::Lns, 1), (Strategy::Bcs, 2)] {
            let cfg = DetectionConfig::new(strategy, Budget::Iterations(iterations)).with_seed(seed);
            let run = detect(&sut, &cfg).map_err(|e| e.to_string())?;
            if run.stats.candidates as usize != run.archive.len() {
                return Err(format!("{} {strategy}: count mismatch", sut.name()));
            }
            archive_invariants(&run.archive, cfg.output_distance)
                .map_err(|e| format!("{} {strategy}: {e}", sut.name()))?;
            total += run.archive.len();
        }
    }
    Ok(format!("{total} candidates over 8 runs"))
}

/// Each search returns a single-step pair that either beats the initial
/// score or is the initial pair itself.
pub fn bcs_postcondition(searches: u64) -> Check {
    let d_o = OutputDistanceKind::StrLen;
    let mut squeezed = 0;
    for seed in 0..searches {
        let sut = &suts()[seed as usize % 4];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = Sampler::new(sut, &SamplerConfig::default()).map_err(|e| e.to_string())?;
        let s = sampler.sample(&mut rng);
        let domains: Vec<TypeDomain> = s.domains.iter().map(|d| (*d).clone()).collect();
        let r = bcs_search(sut, d_o, &s.input, &mut rng, DEFAULT_MAX_DOUBLINGS, Some(&domains))
            .ok_or("search on a SUT without arguments")?;
        let c = &r.candidate;
        if !adjacent_on_one_argument(c) {
            return Err(format!("seed {seed}: {} not adjacent", c.key()));
        }
        if r.squeezed {
            squeezed += 1;
            if c.score <= r.initial_score {
                return Err(format!("seed {seed}: {} does not improve the initial pair", c.key()));
            }
        } else if c.i1 != s.input || c.score != r.initial_score {
            return Err(format!("seed {seed}: unsqueezed result is not the initial pair"));
        }
    }
    Ok(format!("{searches} searches, {squeezed} squeezed"))
}

/// Magnitude bit lengths of 64-bit signed draws are uniform over 0..=63
/// and the sign is a fair coin, each within three standard deviations.
pub fn bituniform_uniformity(draws: usize, seed: u64) -> Check {
    let domain = TypeDomain::signed(64);
    let buckets = 64;
    let mut counts = vec![0usize; buckets];
    let mut negative = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..draws {
        let v = match sample_value(&domain, SamplingMethod::Bituniform, &mut rng) {
            SutValue::Int(v) => v,
            SutValue::Bool(_) => return Err("integer domain produced a boolean".into()),
        };
        if !domain.contains(&SutValue::Int(v.clone())) {
            return Err(format!("{v} outside {domain}"));
        }
        counts[v.bits() as usize] += 1;
        negative += usize::from(v < BigInt::from(0));
    }
    let p = 1.0 / buckets as f64;
    let mean = draws as f64 * p;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    let worst = counts
        .iter()
        .map(|&c| (c as f64 - mean).abs() / sd)
        .fold(0.0, f64::max);
    if worst > 3.0 {
        return Err(format!("bit-length count {worst:.2} sd from the mean"));
    }
    // Zero has no sign, so length 0 is left out of the sign test.
    let signed = (draws - counts[0]) as f64;
    let z = (negative as f64 - signed / 2.0).abs() / (signed / 4.0).sqrt();
    if z > 3.0 {
        return Err(format!("sign balance {z:.2} sd off"));
    }
    Ok(format!("{draws} draws, worst bucket {worst:.2} sd, sign {z:.2} sd"))
}

/// WCSS never increases between iterations and silhouettes stay in [-1, 1].
pub fn kmeans_properties(matrices: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..matrices {
        let n = rng.gen_range(4..40);
        let pts: Vec<[f64; 4]> = (0..n)
            .map(|_| [0; 4].map(|_| rng.gen_range(-5.0..5.0)))
            .collect();
        let k = rng.gen_range(2..7usize).min(n);
        let m = FeatureMatrix::from_points(pts);
        let model = kmeans(&m, k, &mut rng, 100).map_err(|e| e.to_string())?;
        if model.wcss.windows(2).any(|w| w[1] > w[0] + 1e-9 * w[0].max(1.0)) {
            return Err(format!("matrix {t}: WCSS rose: {:?}", model.wcss));
        }
        if !(-1.0..=1.0).contains(&model.silhouette) {
            return Err(format!("matrix {t}: silhouette {}", model.silhouette));
        }
    }
    Ok(format!("{matrices} random matrices"))
}

pub fn csv_bytes(cs: &[BoundaryCandidate]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, cs).expect("writing to memory");
    buf
}

/// Two identical iteration-budget runs give byte-identical archives and
/// cluster reports.
pub fn fixed_seed_determinism(iterations: u64) -> Check {
    let summary = SummaryConfig {
        restarts: 20,
        ..SummaryConfig::default()
    };
    for sut in suts() {
        for strategy in [Strategy::Lns, Strategy::Bcs] {
            let cfg = DetectionConfig::new(strategy, Budget::Iterations(iterations)).with_seed(77);
            let run = || -> Result<(Vec<u8>, String), String> {
                let a = detect(&sut, &cfg).map_err(|e| e.to_string())?.archive.into_entries();
                let r = summarize_seeded(&a, &[], &summary, 5).map_err(|e| e.to_string())?;
                Ok((csv_bytes(&a), serde_json::to_string(&r).map_err(|e| e.to_string())?))
            };
            if run()? != run()? {
                return Err(format!("{} {strategy}: runs differ", sut.name()));
            }
        }
    }
    Ok("8 run pairs identical".into())
}
