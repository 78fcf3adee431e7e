#ifndef CCSIM_EXPERIMENT_HPP
#define CCSIM_EXPERIMENT_HPP

#include <cstdint>
#include <vector>

#include "ccsim/config.hpp"
#include "ccsim/report.hpp"
#include "ccsim/workloads.hpp"

namespace ccsim {

// A sweep: the cross product of workloads, variants, working-set fractions
// and seeds, each combination run on a fresh simulator. llc_override_bytes,
// when nonzero, shrinks the LLC for privatizing-variant runs only; it exists
// for the half-capacity comparison against dup at full size.
struct ExperimentPlan {
  std::vector<Workload> workloads;
  std::vector<Variant> variants;
  std::vector<double> fractions;
  std::vector<uint64_t> seeds;
  WorkloadConfig base;  // remaining knobs shared by every combination
  CacheConfig cache;
  uint64_t llc_override_bytes = 0;
};

std::vector<SimReport> run_plan(const ExperimentPlan& plan);

// True when every row completed and matched its oracle.
bool all_passed(const std::vector<SimReport>& reports);

}  // namespace ccsim

#endif
