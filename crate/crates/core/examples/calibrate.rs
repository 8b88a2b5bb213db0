// Temporary calibration probe for acceptance windows. Not part of the API.
use fraclab_core::exponents::approximation_exponents;
use fraclab_core::jumps::{sample_jump_shells, sample_jumps};
use fraclab_core::lacunary::{
    lacunary_spectrum, sample_support, torus_exponents, CountGenerator, LacunaryModel,
};
use fraclab_core::levy::LevyModel;
use fraclab_core::limsup::{build_limsup_set, intersect_independent, modulus_exceptional_set};
use fraclab_core::measure::RadialMeasure;
use fraclab_core::modulus::Modulus;
use fraclab_core::netmeasure::box_dimension;
use fraclab_core::series::linear_fit;
use fraclab_core::spectrum::estimate_spectrum;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());

    if which == "c4" || which == "all" {
        // Criterion 4: median h over seeds.
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        for (win, eps_pow, m) in [((16u32, 16u32), -17, 1 << 14), ((15, 16), -17, 1 << 14)] {
            let t0 = Instant::now();
            let mut medians = Vec::new();
            for seed in 0..20u64 {
                let js = sample_jumps(&model, 1.0, 2.0_f64.powi(eps_pow), seed).unwrap();
                let f = approximation_exponents(&js, m, win).unwrap();
                medians.push(f.median_h().unwrap());
            }
            let mean = medians.iter().sum::<f64>() / medians.len() as f64;
            let lo = medians.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = medians.iter().cloned().fold(-f64::INFINITY, f64::max);
            println!(
                "C4 win={win:?}: mean median {mean:.4} range [{lo:.4},{hi:.4}] target 0.8333±0.07  ({:.1?})",
                t0.elapsed()
            );
        }
    }

    if which == "c5" || which == "all" {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        for seed in 0..5u64 {
            let t0 = Instant::now();
            let js = sample_jumps(&model, 1.0, 2.0_f64.powi(-14), seed).unwrap();
            let spec = fraclab_core::spectrum::coarse_spectrum(&js, 0.05, (8, 14)).unwrap();
            print!("C5 seed {seed}: ");
            for h in [0.3, 0.5, 0.7] {
                let row = spec.row_at(h).unwrap();
                print!(
                    "h={h}: dim {:.3} (target {:.2}, r2 {:.3})  ",
                    row.dim.unwrap_or(f64::NAN),
                    1.2 * h,
                    row.r2.unwrap_or(f64::NAN)
                );
            }
            println!("({:.1?})", t0.elapsed());
        }
    }

    if which == "c6" || which == "all" {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        for t_horizon in [2.0, 4.0] {
            for seed in 0..5u64 {
                let t0 = Instant::now();
                let sets: Vec<_> = (0..3)
                    .map(|k| {
                        let js =
                            sample_jump_shells(&model, t_horizon, (3, 8), 1000 * seed + k).unwrap();
                        build_limsup_set(&js, |r| r * r, "r^2", (3, 8)).unwrap()
                    })
                    .collect();
                let inter = intersect_independent(&sets).unwrap();
                match box_dimension(&inter, 2, (6, 16)) {
                    Ok((slope, r2)) => println!(
                        "C6 T={t_horizon} seed {seed}: dim {slope:.3} r2 {r2:.3} target [0.45,0.75] (single {:.3}) ({:.1?})",
                        box_dimension(&sets[0], 2, (6, 16)).unwrap().0,
                        t0.elapsed()
                    ),
                    Err(e) => println!("C6 T={t_horizon} seed {seed}: ERR {e}"),
                }
            }
        }
    }

    if which == "c3" || which == "all" {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        let t0 = Instant::now();
        let mut measures = Vec::new();
        for seed in 0..3u64 {
            let js = sample_jump_shells(&model, 1.0, (10, 20), seed).unwrap();
            let set = build_limsup_set(&js, |r| r.sqrt(), "sqrt", (10, 20)).unwrap();
            measures.push(set.measure());
        }
        println!("C3 divergent: measures {measures:?} (≥0.95) ({:.1?})", t0.elapsed());
        // Convergent: φ = r², sliding windows.
        let t0 = Instant::now();
        for seed in 0..3u64 {
            let mut line = format!("C3 convergent seed {seed}: ");
            for j_hi in [12u32, 16, 20] {
                let js = sample_jump_shells(&model, 1.0, (j_hi / 2, j_hi), seed + 100).unwrap();
                let set = build_limsup_set(&js, |r| r * r, "r^2", (j_hi / 2, j_hi)).unwrap();
                let covering: f64 = js.iter().map(|r| r.size * r.size).sum();
                line += &format!("j_hi={j_hi}: m={:.2e} cov={covering:.2e}  ", set.measure());
            }
            println!("{line} ({:.1?})", t0.elapsed());
        }
    }

    if which == "c9" || which == "all" {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.0).unwrap());
        let t0 = Instant::now();
        for seed in 0..3u64 {
            let js = sample_jump_shells(&model, 1.0, (8, 20), seed).unwrap();
            let w = Modulus::power(2.0).unwrap();
            let set = modulus_exceptional_set(&js, &w, 5, (8, 20)).unwrap();
            print!("C9 div seed {seed}: measure {:.4} (≥0.9)  ", set.measure());
        }
        println!("({:.1?})", t0.elapsed());
        let w = Modulus::power(0.25).unwrap();
        for seed in 0..2u64 {
            let mut line = format!("C9 conv seed {seed}: ");
            for j_hi in [12u32, 16, 20] {
                let js = sample_jump_shells(&model, 1.0, (j_hi / 2, j_hi), seed).unwrap();
                let set = modulus_exceptional_set(&js, &w, 5, (j_hi / 2, j_hi)).unwrap();
                line += &format!("j_hi={j_hi}: {:.3e}  ", set.measure());
            }
            println!("{line}");
        }
    }

    if which == "c10" || which == "all" {
        for seed in 0..4u64 {
            let t0 = Instant::now();
            let model =
                LacunaryModel::new(1, 0.7, CountGenerator::Eta { eta: 0.5 }, seed).unwrap();
            let support = sample_support(&model, 26).unwrap();
            let spec =
                fraclab_core::lacunary::coarse_lacunary_spectrum(&support, &model, 0.05, (8, 13))
                    .unwrap();
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let mut line = format!("C10 seed {seed}: ");
            for row in &spec.rows {
                if row.h_center >= 0.8 && row.h_center <= 1.3 {
                    if let Some(d) = row.dim {
                        xs.push(row.h_center);
                        ys.push(d);
                        line += &format!("({:.3},{d:.3})", row.h_center);
                    }
                }
            }
            let (slope, _, r2) = linear_fit(&xs, &ys);
            println!(
                "{line} slope {slope:.4} target {:.4}±15% r2 {r2:.3} ({:.1?})",
                1.0 / 1.4,
                t0.elapsed()
            );
        }
    }
}
