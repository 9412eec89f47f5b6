#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include "lorentz_ot/dynamics.hpp"
#include "lorentz_ot/geometry.hpp"
#include "lorentz_ot/measures.hpp"
#include "lorentz_ot/transport.hpp"

namespace lorentz_ot::io {

// Model file:
//   kind=minkowski | kind=rw
//   dim=<1+d>
//   t a          (rw only, one table row per line)
// Blank lines and text after '#' are ignored.
std::shared_ptr<const SpacetimeModel> parse_model(std::istream& in);
void write_model(std::ostream& out, const SpacetimeModel& model);

// Measure file: `dim=<1+d>` then one `t x1 ... xd weight` line per atom.
DiscreteMeasure parse_measure(std::istream& in);
void write_measure(std::ostream& out, const DiscreteMeasure& m);

/// A plan together with what is needed to rebuild its geodesics.
struct PlanFile {
  std::shared_ptr<const SpacetimeModel> model;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  TransportPlan plan;
};

// Plan file: `model` block ending in `end`, `sources m` and `targets n`
// blocks of measure rows, `denominator N`, `coupling K` with 1-based
// `i j mass` lines, `psi m`, `phi n` (one value per line), `primal v`, `dual v`.
PlanFile parse_plan(std::istream& in);
void write_plan(std::ostream& out, const PlanFile& file);

/// One `path_id s t x1 ... xd mass` line per stored geodesic sample.
void write_trajectories(std::ostream& out, const DynamicalCoupling& dc);

/// One `i -> j` line per source, 1-based.
void write_map(std::ostream& out, std::span<const Index> map);

std::shared_ptr<const SpacetimeModel> read_model(const std::filesystem::path& path);
DiscreteMeasure read_measure(const std::filesystem::path& path);
PlanFile read_plan(const std::filesystem::path& path);

}  // namespace lorentz_ot::io
