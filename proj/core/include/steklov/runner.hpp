#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steklov/config.hpp"
#include "steklov/coupled.hpp"
#include "steklov/geometry.hpp"

namespace steklov {

struct RunOutcome {
    int exit_code = 0;  // 0 success, 2 config error, 3 solver failure
    std::string message;
    std::vector<std::string> artifacts;  // files written, in emission order
};

// Execute one experiment described by the configuration. Deterministic:
// identical (config, seed) produce byte-identical artifacts.
RunOutcome run(const RunConfig& config);

struct BuiltGeometry {
    Mesh mesh;
    ConformalMetric metric;
    std::optional<GlueResult> glued;
};

// Geometry named by the [geometry] (and, for glued shapes, [glue]) sections.
BuiltGeometry build_geometry(const RunConfig& config);

GlueParams glue_params_from(const RunConfig& config, const Mesh& base);

}  // namespace steklov
