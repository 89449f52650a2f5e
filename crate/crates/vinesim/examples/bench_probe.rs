use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vinesim::environment::{generate_uniform_squares_env, SceneConfig};
use vinesim::mapping::*;

fn main() {
    let cfg_scene = SceneConfig {
        bounds_size: 1.0,
        robot_radius: 0.0323,
        launch_count: 2,
    };
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let env = generate_uniform_squares_env(&mut rng, &cfg_scene);
        let space = generate_action_space(ActionSpaceKind::Straight, &env, 1.0);
        let cfg = PlannerConfig::new(42 + seed);
        let t0 = std::time::Instant::now();
        let ideal = run_campaign(&env, &space, &cfg, Policy::Ideal);
        let t1 = std::time::Instant::now();
        let mc = run_campaign(&env, &space, &cfg, Policy::MonteCarlo);
        let t2 = std::time::Instant::now();
        let random = run_campaign(&env, &space, &cfg, Policy::Random);
        let t3 = std::time::Instant::now();
        let rs = random.random_stats.as_ref().unwrap();
        println!(
            "seed {seed}: obstacles {} | ideal {:.2} ({:.1?}) | mc {:.2} ({:.1?}) | random {:.2} +- {:.2} ({:.1?})",
            env.obstacles().len(),
            ideal.final_score, t1 - t0,
            mc.final_score, t2 - t1,
            rs.mean_final, rs.std_final, t3 - t2
        );
    }
}
