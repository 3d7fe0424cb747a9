// Compares the OpenMP kernels against the serial reference path on one
// scenario: same inputs, bitwise-identical outputs, wall times side by side.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "hardygeo/constants.hpp"
#include "hardygeo/parallel.hpp"
#include "hardygeo/scenario.hpp"
#include "hardygeo/sobolev.hpp"

using namespace hardygeo;

namespace {

double time_call(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Row {
  std::string name;
  double serial = 0.0, parallel = 0.0;
  bool match = false;
};

void print_row(const Row& r) {
  std::printf("%-22s %10.4fs %10.4fs %8.2fx   %s\n", r.name.c_str(), r.serial, r.parallel,
              r.serial / r.parallel, r.match ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  double n = (argc > 1) ? std::atof(argv[1]) : 192.0;
  ScenarioSpec spec = built_in_scenario("square-edge");
  spec.resolution = n;
  VoxelDomain dom = rasterize(spec);
  BoundaryLabeling lab = label_boundary(dom, spec);
  std::printf("square-edge at %g cells/unit: %lld cells, %zu boundary faces\n\n", n,
              static_cast<long long>(dom.inside_count()), lab.faces.size());
  std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  bool all_match = true;
  auto compare = [&](const std::string& name, const std::function<double()>& fn) {
    set_parallel_enabled(false);
    Row r;
    r.name = name;
    double vs = 0.0, vp = 0.0;
    r.serial = time_call([&] { vs = fn(); });
    set_parallel_enabled(true);
    r.parallel = time_call([&] { vp = fn(); });
    r.match = vs == vp;
    all_match = all_match && r.match;
    print_row(r);
  };

  compare("distance_to_D", [&] {
    DistanceField f = distance_to_D(dom, lab);
    return f.v[f.v.size() / 2];
  });

  GridFunction u = sample_function(dom, [&](const Vec& x) {
    return std::sin(7.0 * x[0]) * std::cos(5.0 * x[1]) + 0.25 * x[0] * x[1];
  });
  FaceCalculus fc = face_calculus(dom, lab);
  compare("gradient + norms p=3", [&] {
    Norms nm = norms(u, 3.0, fc);
    return nm.lp + nm.grad_lp;
  });

  compare("hardy eig p=2", [&] { return hardy_constant(dom, lab, 2.0).c; });

  compare("glue extension p=2", [&] {
    PartitionOfUnity pou = build_partition(dom, lab, spec.glue_patches);
    return glue_extension(enforce_D(u, lab, 2.0), pou, 2.0).ratio;
  });

  std::printf("\n%s\n", all_match ? "all kernels bitwise-identical across paths"
                                  : "kernel outputs diverged between paths");
  return all_match ? 0 : 1;
}
