use std::time::Instant;

use slopeforge_core::linalg::charpoly::charpoly_rational_crt;
use slopeforge_core::linalg::newton::newton_polygon_rational;
use slopeforge_core::msym::build_space;
use slopeforge_core::padic::dirichlet::DirichletCharacter;

fn main() {
    for k in [4u32, 58, 112] {
        let t0 = Instant::now();
        let chi = DirichletCharacter::trivial(6);
        let s = build_space(6, k, &chi).unwrap();
        let t_build = t0.elapsed();
        let t1 = Instant::now();
        let u3 = s.hecke_tn(3).unwrap();
        let t_hecke = t1.elapsed();
        let t2 = Instant::now();
        let q = u3.map(num_rational::BigRational::from_integer(0.into()), |c| {
            c.as_rational().unwrap()
        });
        let poly = charpoly_rational_crt(&q);
        let t_cp = t2.elapsed();
        let (_, profile) = newton_polygon_rational(&poly, 3).unwrap();
        println!(
            "k={k}: dim={} build={:?} hecke={:?} charpoly={:?} ordinary_dim={}",
            s.dim,
            t_build,
            t_hecke,
            t_cp,
            profile.dim_at(num_rational::Rational64::new(0, 1))
        );
    }
}
