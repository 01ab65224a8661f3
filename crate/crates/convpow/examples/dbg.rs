use convpow::families::*;
use convpow::spectral::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_nu(rng: &mut ChaCha8Rng, family: Family) -> RepresentativeMeasure {
    let k = rng.gen_range(2..=5);
    let nodes: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.gen_range(0.05..0.95), rng.gen_range(0.1..1.0)))
        .collect();
    normalize_nu(&nodes, family).unwrap()
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    // replay the rng stream exactly as the acceptance test does
    for family in [Family::Cm, Family::Ccm, Family::Scm] {
        for _ in 0..10 { let _ = random_nu(&mut rng, family); }
        let nu = random_nu(&mut rng, family);
        println!("== {family:?} fd nu = {:?}", nu.nodes());
        let built = match family {
            Family::Cm => build_cm(&nu, 2000, 1e-12),
            Family::Ccm => build_ccm(&nu, 2000, 1e-12),
            Family::Scm => build_scm(&nu, 2000, 1e-12),
        }.unwrap();
        let theta = 2e-8f64;
        let h = 1e-4 * theta;
        let single = |t: f64| ThetaGrid::from_points(vec![t]).unwrap();
        let nu_eval = |t: f64| match family {
            Family::Cm => fourier_cm_from_nu(&nu, &single(t)).unwrap()[0],
            Family::Ccm => fourier_ccm_from_nu(&nu, &single(t)).unwrap()[0],
            Family::Scm => fourier_scm_from_nu(&nu, &single(t)).unwrap()[0],
        };
        for (name, eval) in [
            ("nu", Box::new(nu_eval) as Box<dyn Fn(f64) -> SpectralSample>),
            ("coeffs", Box::new(|t: f64| eval_coeffs_at(&built.measure, t, 2))),
        ] {
            let s = eval(theta);
            let sp = eval(theta + h);
            let sm = eval(theta - h);
            let fd_im = (sp.f.im - sm.f.im) / (2.0 * h);
            println!("  {name}: f.im {:.6e}  f.im(+h) {:.6e}  f.im(-h) {:.6e}  fd.im {:.6e}  f1.im {:.6e}",
                s.f.im, sp.f.im, sm.f.im, fd_im, s.f1.im);
        }
    }
}
