// Compares the serial reference kernels with their parallel twins: identical
// results by construction (fixed-order reduction), wall time reported here.
#include <chrono>
#include <cstdio>

#include "lsr/geometry.hpp"
#include "lsr/parallel.hpp"
#include "lsr/reduction.hpp"

using namespace lsr;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_ms(F&& f, int reps) {
  auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) f();
  auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = argc > 1 ? std::atoi(argv[1]) : 0;
  set_threads(threads);
  std::printf("threads: %d\n", thread_count());

  MetricSpec spec = MetricSpec::schwarzschild(2.0);
  auto sph = SphereRule::product_gauss(48);
  BallRule ball = BallRule::product_gauss(sph, 32);
  Vec3 a{160, 0, 0};
  auto f = [&](const Vec3& x) { return scalar_curvature(spec, x) + x.norm2(); };

  volatile double sink = 0;
  double t_ser = time_ms([&] { sink = integrate_sphere_serial(f, a, 40.0, *sph); }, 5);
  double t_par = time_ms([&] { sink = integrate_sphere(f, a, 40.0, *sph); }, 5);
  std::printf("integrate_sphere   serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
              t_ser, t_par, t_ser / t_par);

  t_ser = time_ms([&] { sink = integrate_ball_serial(f, a, 40.0, ball); }, 3);
  t_par = time_ms([&] { sink = integrate_ball(f, a, 40.0, ball); }, 3);
  std::printf("integrate_ball     serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
              t_ser, t_par, t_ser / t_par);

  GraphSurface s = GraphSurface::round_sphere(a, 40.0, 24);
  double t_geo = time_ms([&] { sink = area(spec, s); }, 5);
  std::printf("area (L=24 grid)   %8.3f ms\n", t_geo);
  double t_vol = time_ms([&] { sink = enclosed_volume(spec, s); }, 5);
  std::printf("enclosed_volume    %8.3f ms\n", t_vol);
  double t_h = time_ms([&] { sink = surface_geometry(spec, s).mean_curvature[0]; }, 3);
  std::printf("surface_geometry   %8.3f ms\n", t_h);

  double t_solve = time_ms([&] { sink = reduced_area(spec, {8, 0, 0}, 40.0); }, 1);
  std::printf("solve_graph        %8.3f ms\n", t_solve);
  (void)sink;
  return 0;
}
