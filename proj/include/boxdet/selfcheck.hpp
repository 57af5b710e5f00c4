// boxdet/selfcheck.hpp
//
// Oracle suites behind the `check` CLI subcommand: sign-test soundness
// against explicit distances, box decoding against brute-force ML at B = A,
// sphere decoding against brute-force ML, and measured visit counters
// against the closed forms. Each suite reports the first counterexample it
// finds. The metric suite accepts replacement implementations so a broken
// metric can be demonstrated to fail.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "boxdet/boxdec.hpp"

namespace boxdet {

struct CheckReport {
    std::string suite;
    bool pass = false;
    std::uint64_t cases = 0;
    std::string failure;  // first counterexample, empty on pass
};

using Metric1Fn = std::function<int(Cx, double)>;
using Metric2Fn = std::function<std::array<int, 4>(Cx, double)>;

CheckReport check_metric_signs(std::uint64_t trials, std::uint64_t seed,
                               Metric1Fn metric1 = metric1_select,
                               Metric2Fn metric2 = metric2_order);

CheckReport check_box_equals_ml(std::uint64_t trials, std::uint64_t seed);

CheckReport check_sphere_equals_ml(std::uint64_t trials, std::uint64_t seed);

CheckReport check_counter_reconciliation(std::uint64_t trials, std::uint64_t seed);

// All four suites in a fixed order.
std::vector<CheckReport> run_all_checks(std::uint64_t trials, std::uint64_t seed);

}  // namespace boxdet
