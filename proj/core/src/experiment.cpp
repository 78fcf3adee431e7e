#include "ccsim/experiment.hpp"

namespace ccsim {

std::vector<SimReport> run_plan(const ExperimentPlan& plan) {
  std::vector<SimReport> out;
  for (Workload w : plan.workloads) {
    for (Variant v : plan.variants) {
      for (double f : plan.fractions) {
        for (uint64_t s : plan.seeds) {
          WorkloadConfig wc = plan.base;
          wc.workload = w;
          wc.variant = v;
          wc.ws_fraction = f;
          wc.seed = s;
          CacheConfig cc = plan.cache;
          if (plan.llc_override_bytes != 0 && v == Variant::CCache)
            cc.llc.capacity_bytes = plan.llc_override_bytes;
          out.push_back(run_workload(wc, cc));
        }
      }
    }
  }
  return out;
}

bool all_passed(const std::vector<SimReport>& reports) {
  for (const auto& r : reports)
    if (!r.oracle_pass || !r.error.empty()) return false;
  return true;
}

}  // namespace ccsim
