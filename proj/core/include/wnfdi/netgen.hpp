#pragma once

#include <cstdint>
#include <vector>

#include "wnfdi/hydraulics.hpp"
#include "wnfdi/network.hpp"

namespace wnfdi {

// Seeded synthetic network generation. Junctions are scattered in a unit
// square with the tank at the center; a nearest-neighbor spanning tree makes
// the network connected and the shortest remaining node pairs become loops
// until the pipe budget is spent. Same spec -> byte-identical network file.
struct GenSpec {
  int n_junctions = 20;
  int n_pipes = 25;            // must be >= n_junctions (spanning tree size)
  std::uint64_t seed = 1;

  double tank_head_m = 60.0;
  double length_min_m = 100.0;
  double length_max_m = 1500.0;
  // Diameters are drawn from a discrete commercial set; pipes touching the
  // tank get the largest entry so the source can feed the whole network.
  std::vector<double> diameter_set_m = {0.2032, 0.254, 0.3048, 0.4064, 0.508};
  double roughness_min = 100.0;
  double roughness_max = 140.0;
  double demand_min_m3s = 0.002;
  double demand_max_m3s = 0.010;
};

Network generate_network(const GenSpec& spec);

// 96-sample daily demand curve (15-minute resolution): flat night valley,
// morning and evening peaks. Samples 10..20 are exactly constant, which
// gives scenario averaging a stationary window.
std::vector<double> default_daily_curve();

// Default averaging window: a slice of the flat night valley.
std::vector<int> default_window();

// Profile bank: profile 1 is `base` itself; profiles 2..P multiply each
// sample by an independent uniform factor in [1-beta, 1+beta].
ProfileBank generate_profiles(int n_profiles, double beta,
                              std::uint64_t seed,
                              const std::vector<double>& base =
                                  default_daily_curve());

// Built-in 31-junction benchmark-style network: one reservoir, 34 pipes,
// three loops, flat terrain, heavy demands. Junction j<k> is the k-th
// consumer node; indices match published sensor placement studies on this
// topology.
Network hanoi_like_network();

// Fault magnitude set (m^3/s) tuned for the preset above: large enough to
// dominate +-2.5% demand uncertainty, small against the ~5.5 m^3/s total
// draw.
std::vector<double> hanoi_like_magnitudes();

}  // namespace wnfdi
